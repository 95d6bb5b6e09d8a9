#ifndef DUALTEACH_DATASET_HPP
#define DUALTEACH_DATASET_HPP

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dualteach {

/// Binary-classification dataset, dense in memory. Labels are +1/-1.
struct Dataset {
    std::vector<std::vector<double>> examples;
    std::vector<int> labels;
    std::size_t feature_dim = 0;
    std::string name;

    std::size_t size() const { return examples.size(); }

    // Throws std::invalid_argument on any invariant violation.
    void validate() const;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& msg);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses LIBSVM sparse text ("label idx:val idx:val ..."), 1-based strictly
/// increasing indices, into a dense Dataset. feature_dim = max index seen
/// (promoted to 1 for all-empty records). Labels other than +1/-1 are accepted
/// when exactly two distinct numeric values occur; the smaller maps to -1.
Dataset parse_libsvm(const std::string& text, const std::string& name = "");

/// Inverse writer for parse_libsvm: parse(serialize(d)) == d.
std::string serialize_libsvm(const Dataset& d);

/// What training code is allowed to see: labeled pool plus unlabeled features.
struct TrainView {
    const std::vector<std::vector<double>>& labeled_examples;
    const std::vector<int>& labels;
    const std::vector<std::vector<double>>& unlabeled_examples;
    std::size_t feature_dim;
};

/// Labeled pool, unlabeled pool, and the hidden ground truth of the unlabeled
/// pool. hidden_truth is for evaluation and oracle fixtures only; learning
/// code receives a TrainView, which does not carry it.
struct PartialDataset {
    std::vector<std::vector<double>> labeled_examples;
    std::vector<int> labeled_labels;
    std::vector<std::vector<double>> unlabeled_examples;
    std::vector<int> hidden_truth;
    std::size_t feature_dim = 0;

    std::size_t labeled_count() const { return labeled_examples.size(); }
    std::size_t unlabeled_count() const { return unlabeled_examples.size(); }

    TrainView train_view() const {
        return TrainView{labeled_examples, labeled_labels, unlabeled_examples, feature_dim};
    }

    void validate() const;
};

/// Per-feature min-max scaling to [0,1], fit on `train` only; the same affine
/// map is applied to every dataset in `others` (values may leave [0,1]).
/// Constant features map to 0.
std::pair<Dataset, std::vector<Dataset>> normalize_features(const Dataset& train,
                                                            const std::vector<Dataset>& others);

/// Deterministic stratified split; per-class counts match train_fraction as
/// closely as rounding allows. Errors if any class has fewer than 2 examples.
std::pair<Dataset, Dataset> split_train_test(const Dataset& d, double train_fraction,
                                             std::uint64_t seed);

/// Stratified selection of ceil(labeled_ratio * n) labeled examples; the rest
/// become the unlabeled pool with their labels moved to hidden_truth.
/// Errors if the labeled pool cannot contain both classes.
PartialDataset split_labeled_unlabeled(const Dataset& train, double labeled_ratio,
                                       std::uint64_t seed);

/// Two isotropic gaussians at +-separation/2 along all axes, with optional
/// independent label flips. Deterministic under seed.
Dataset generate_two_gaussians(std::size_t n_per_class, std::size_t dim, double separation,
                               double noise_flip_rate, std::uint64_t seed);

}  // namespace dualteach

#endif
