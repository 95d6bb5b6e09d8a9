#ifndef DUALTEACH_METRICS_HPP
#define DUALTEACH_METRICS_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace dualteach {

struct ConfusionMatrix {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }
};

inline ConfusionMatrix confusion(const std::vector<int>& predicted,
                                 const std::vector<int>& actual) {
    if (predicted.size() != actual.size() || predicted.empty())
        throw std::invalid_argument("confusion: lists must have equal nonzero length");
    ConfusionMatrix m;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] > 0)
            (actual[i] > 0 ? m.tp : m.fp)++;
        else
            (actual[i] > 0 ? m.fn : m.tn)++;
    }
    return m;
}

// Empty denominators yield nullopt, not an exception: "teacher flagged
// nothing" must stay distinguishable from precision zero.
inline std::optional<double> precision(const ConfusionMatrix& m) {
    if (m.tp + m.fp == 0) return std::nullopt;
    return static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
}

inline std::optional<double> recall(const ConfusionMatrix& m) {
    if (m.tp + m.fn == 0) return std::nullopt;
    return static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
}

inline double accuracy(const ConfusionMatrix& m) {
    return static_cast<double>(m.tp + m.tn) / static_cast<double>(m.total());
}

}  // namespace dualteach

#endif
