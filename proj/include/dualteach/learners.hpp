#ifndef DUALTEACH_LEARNERS_HPP
#define DUALTEACH_LEARNERS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dualteach {

enum class LearnerKind { logistic, linear_svm, adaboost_stumps };
enum class ClassWeighting { equal, balanced };

std::string to_string(LearnerKind k);
std::string to_string(ClassWeighting w);

struct BaseLearnerSpec {
    LearnerKind kind = LearnerKind::logistic;
    ClassWeighting weighting = ClassWeighting::equal;

    // logistic: full-batch gradient descent
    double logistic_l2 = 1e-4;
    double logistic_rate = 0.1;
    int logistic_epochs = 500;
    double logistic_grad_tol = 1e-6;

    // linear_svm: primal hinge subgradient, fixed permutation per seed
    double svm_c = 1.0;
    int svm_epochs = 200;

    // adaboost: depth-1 stumps over per-feature midpoint thresholds
    int boost_rounds = 50;

    bool operator==(const BaseLearnerSpec&) const = default;
};

struct Stump {
    std::size_t feature = 0;
    double threshold = 0.0;
    int polarity = 1;  // +1: predict +1 when x[feature] > threshold
    double alpha = 0.0;

    bool operator==(const Stump&) const = default;
};

struct Model {
    BaseLearnerSpec spec;
    std::size_t feature_dim = 0;
    std::vector<double> weights;  // linear kinds
    double bias = 0.0;
    std::vector<Stump> stumps;
    // Single-class training degenerates to a constant classifier. Kept as a
    // decision override so every stored parameter stays finite.
    std::optional<int> constant_label;
    std::size_t trained_on_count = 0;

    bool operator==(const Model&) const = default;
};

/// Model with all parameters zero; scores everything 0, so predicts -1.
Model zero_model(const BaseLearnerSpec& spec, std::size_t feature_dim);

/// Deterministic supervised fit. Optional per-example weights must be positive
/// and the same length as labels; balanced class weighting additionally scales
/// each example by n_total / (2 * n_class).
Model fit(const BaseLearnerSpec& spec, const std::vector<std::vector<double>>& examples,
          const std::vector<int>& labels, const std::vector<double>* per_example_weights,
          std::uint64_t seed);

double predict_score(const Model& m, const std::vector<double>& x);

/// +1 iff score > 0; ties (score == 0, e.g. the zero model) go to -1.
int predict(const Model& m, const std::vector<double>& x);

std::vector<int> predict_all(const Model& m, const std::vector<std::vector<double>>& xs);

/// sigma(w.x + b); logistic kind only.
double predict_proba(const Model& m, const std::vector<double>& x);

/// Weighted regularized logistic loss and its analytic gradient, exposed for
/// finite-difference verification. effective_weights must already include any
/// class weighting; gradient is d/d(w,b) with bias last.
double logistic_loss(const std::vector<double>& w, double b,
                     const std::vector<std::vector<double>>& examples,
                     const std::vector<int>& labels, const std::vector<double>& effective_weights,
                     double l2);
void logistic_gradient(const std::vector<double>& w, double b,
                       const std::vector<std::vector<double>>& examples,
                       const std::vector<int>& labels,
                       const std::vector<double>& effective_weights, double l2,
                       std::vector<double>& grad_w, double& grad_b);

/// Per-example loss weights after applying spec.weighting on top of the
/// optional user weights.
std::vector<double> effective_weights(const BaseLearnerSpec& spec, const std::vector<int>& labels,
                                      const std::vector<double>* per_example_weights);

// Versioned JSON round trip for the CLI's model save/load.
std::string model_to_json(const Model& m);
Model model_from_json(const std::string& text);

}  // namespace dualteach

#endif
