#ifndef DUALTEACH_BASELINES_HPP
#define DUALTEACH_BASELINES_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dualteach/dataset.hpp"
#include "dualteach/learners.hpp"

namespace dualteach {

struct SelfTrainOptions {
    double add_fraction_per_iter = 0.1;
    double confidence_floor = 0.0;
    std::size_t max_iters = 20;
};

struct CoTrainOptions {
    std::uint64_t feature_split_seed = 0;
    std::size_t adds_per_class_per_round = 1;
    std::size_t max_rounds = 30;
};

struct BaselineIteration {
    std::size_t iteration = 0;
    std::size_t training_pool_size = 0;
    std::size_t unlabeled_remaining = 0;
};

struct SelfTrainResult {
    Model model;
    std::vector<BaselineIteration> history;
};

/// Two view models over a random disjoint feature split; the final decision is
/// the sign of the summed view scores (ties to -1).
struct CoTrainResult {
    Model view_a;
    Model view_b;
    std::vector<std::size_t> features_a;
    std::vector<std::size_t> features_b;
    std::vector<BaselineIteration> history;

    double score(const std::vector<double>& x) const;
    int predict_label(const std::vector<double>& x) const;
    std::vector<int> predict_labels(const std::vector<std::vector<double>>& xs) const;
};

/// Classic self-training: fit on the labeled pool, then repeatedly move the
/// highest-|score| fraction of remaining unlabeled examples into the training
/// set with their predicted labels (never revised) and refit.
SelfTrainResult run_self_training(const PartialDataset& pd, const BaseLearnerSpec& spec,
                                  const SelfTrainOptions& opts, std::uint64_t seed);

/// Co-training over a random two-way feature split: each round, each view
/// donates its most confident positive and negative unlabeled examples (with
/// pseudo-labels) to the other view's training pool.
CoTrainResult run_co_training(const PartialDataset& pd, const BaseLearnerSpec& spec,
                              const CoTrainOptions& opts, std::uint64_t seed);

}  // namespace dualteach

#endif
