#include "dualteach/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dualteach/rng.hpp"

namespace dualteach {

SelfTrainResult run_self_training(const PartialDataset& pd, const BaseLearnerSpec& spec,
                                  const SelfTrainOptions& opts, std::uint64_t seed) {
    pd.validate();
    if (!(opts.add_fraction_per_iter > 0.0 && opts.add_fraction_per_iter <= 1.0))
        throw std::invalid_argument("add_fraction_per_iter must be in (0,1]");
    const TrainView view = pd.train_view();

    std::vector<std::vector<double>> pool_x = view.labeled_examples;
    std::vector<int> pool_y = view.labels;
    std::vector<std::size_t> remaining(view.unlabeled_examples.size());
    std::iota(remaining.begin(), remaining.end(), 0);

    SelfTrainResult res;
    res.model = fit(spec, pool_x, pool_y, nullptr, derive_seed(seed, 0));
    res.history.push_back({0, pool_x.size(), remaining.size()});

    const std::size_t batch = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::ceil(opts.add_fraction_per_iter *
                             static_cast<double>(view.unlabeled_examples.size()) -
                         1e-9)));

    for (std::size_t it = 1; it <= opts.max_iters && !remaining.empty(); ++it) {
        std::vector<std::pair<double, std::size_t>> scored;
        scored.reserve(remaining.size());
        for (std::size_t id : remaining) {
            double s = predict_score(res.model, view.unlabeled_examples[id]);
            if (std::abs(s) >= opts.confidence_floor) scored.emplace_back(std::abs(s), id);
        }
        if (scored.empty()) break;
        std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
            return a.first > b.first || (a.first == b.first && a.second < b.second);
        });
        std::size_t take = std::min(batch, scored.size());
        std::vector<std::size_t> taken;
        for (std::size_t t = 0; t < take; ++t) {
            std::size_t id = scored[t].second;
            pool_x.push_back(view.unlabeled_examples[id]);
            pool_y.push_back(predict(res.model, view.unlabeled_examples[id]));
            taken.push_back(id);
        }
        for (std::size_t id : taken)
            remaining.erase(std::find(remaining.begin(), remaining.end(), id));
        res.model = fit(spec, pool_x, pool_y, nullptr, derive_seed(seed, it));
        res.history.push_back({it, pool_x.size(), remaining.size()});
    }
    return res;
}

namespace {

std::vector<double> project(const std::vector<double>& x, const std::vector<std::size_t>& feats) {
    std::vector<double> out;
    out.reserve(feats.size());
    for (std::size_t j : feats) out.push_back(x[j]);
    return out;
}

std::vector<std::vector<double>> project_all(const std::vector<std::vector<double>>& xs,
                                             const std::vector<std::size_t>& feats) {
    std::vector<std::vector<double>> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(project(x, feats));
    return out;
}

}  // namespace

double CoTrainResult::score(const std::vector<double>& x) const {
    return predict_score(view_a, project(x, features_a)) +
           predict_score(view_b, project(x, features_b));
}

int CoTrainResult::predict_label(const std::vector<double>& x) const {
    return score(x) > 0.0 ? +1 : -1;
}

std::vector<int> CoTrainResult::predict_labels(const std::vector<std::vector<double>>& xs) const {
    std::vector<int> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(predict_label(x));
    return out;
}

CoTrainResult run_co_training(const PartialDataset& pd, const BaseLearnerSpec& spec,
                              const CoTrainOptions& opts, std::uint64_t seed) {
    pd.validate();
    if (pd.feature_dim < 2) throw std::invalid_argument("co-training needs feature_dim >= 2");
    if (opts.adds_per_class_per_round < 1)
        throw std::invalid_argument("adds_per_class_per_round must be >= 1");
    const TrainView view = pd.train_view();

    CoTrainResult res;
    {
        std::vector<std::size_t> feats(pd.feature_dim);
        std::iota(feats.begin(), feats.end(), 0);
        Rng rng(derive_seed(opts.feature_split_seed, 0xc07a));
        std::shuffle(feats.begin(), feats.end(), rng);
        std::size_t half = pd.feature_dim / 2;
        res.features_a.assign(feats.begin(), feats.begin() + half);
        res.features_b.assign(feats.begin() + half, feats.end());
        std::sort(res.features_a.begin(), res.features_a.end());
        std::sort(res.features_b.begin(), res.features_b.end());
    }

    // Each view keeps its own training pool, seeded with all labeled data.
    struct ViewState {
        std::vector<std::vector<double>> xs;
        std::vector<int> ys;
        Model model;
    };
    ViewState a, b;
    a.xs = project_all(view.labeled_examples, res.features_a);
    b.xs = project_all(view.labeled_examples, res.features_b);
    a.ys = b.ys = view.labels;

    auto refit = [&](ViewState& v, std::uint64_t s) { v.model = fit(spec, v.xs, v.ys, nullptr, s); };
    refit(a, derive_seed(seed, 0xa));
    refit(b, derive_seed(seed, 0xb));

    std::vector<std::size_t> remaining(view.unlabeled_examples.size());
    std::iota(remaining.begin(), remaining.end(), 0);
    res.history.push_back({0, a.xs.size(), remaining.size()});

    for (std::size_t round = 1; round <= opts.max_rounds && !remaining.empty(); ++round) {
        bool donated_any = false;
        // Donor view labels; receiver view trains on the donated examples.
        auto donate = [&](const ViewState& donor, const std::vector<std::size_t>& donor_feats,
                          ViewState& receiver, const std::vector<std::size_t>& receiver_feats) {
            std::vector<std::pair<double, std::size_t>> scored;
            scored.reserve(remaining.size());
            for (std::size_t id : remaining)
                scored.emplace_back(
                    predict_score(donor.model, project(view.unlabeled_examples[id], donor_feats)),
                    id);
            std::stable_sort(scored.begin(), scored.end(), [](const auto& p, const auto& q) {
                return p.first > q.first || (p.first == q.first && p.second < q.second);
            });
            std::vector<std::size_t> taken;
            // most confident positives from the front, negatives from the back
            for (std::size_t t = 0; t < opts.adds_per_class_per_round && t < scored.size(); ++t)
                taken.push_back(scored[t].second);
            for (std::size_t t = 0; t < opts.adds_per_class_per_round; ++t) {
                if (scored.size() < taken.size() + 1) break;
                std::size_t id = scored[scored.size() - 1 - t].second;
                if (std::find(taken.begin(), taken.end(), id) != taken.end()) break;
                taken.push_back(id);
            }
            for (std::size_t id : taken) {
                int label =
                    predict(donor.model, project(view.unlabeled_examples[id], donor_feats));
                receiver.xs.push_back(project(view.unlabeled_examples[id], receiver_feats));
                receiver.ys.push_back(label);
                remaining.erase(std::find(remaining.begin(), remaining.end(), id));
                donated_any = true;
            }
        };
        donate(a, res.features_a, b, res.features_b);
        if (!remaining.empty()) donate(b, res.features_b, a, res.features_a);
        refit(a, derive_seed(seed, 0xa00 + round));
        refit(b, derive_seed(seed, 0xb00 + round));
        res.history.push_back({round, std::min(a.xs.size(), b.xs.size()), remaining.size()});
        if (!donated_any) break;
    }

    res.view_a = a.model;
    res.view_b = b.model;
    return res;
}

}  // namespace dualteach
