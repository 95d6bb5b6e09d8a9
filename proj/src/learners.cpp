#include "dualteach/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "dualteach/rng.hpp"
#include "json.hpp"

namespace dualteach {

std::string to_string(LearnerKind k) {
    switch (k) {
        case LearnerKind::logistic: return "lr";
        case LearnerKind::linear_svm: return "svm";
        case LearnerKind::adaboost_stumps: return "ada";
    }
    return "?";
}

std::string to_string(ClassWeighting w) {
    return w == ClassWeighting::equal ? "equal" : "balanced";
}

namespace {

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(x)) without overflow
double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }

double dot(const std::vector<double>& w, const std::vector<double>& x) {
    double s = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * x[j];
    return s;
}

void check_training_input(const std::vector<std::vector<double>>& examples,
                          const std::vector<int>& labels,
                          const std::vector<double>* per_example_weights) {
    if (examples.empty()) throw std::invalid_argument("fit: empty training set");
    if (examples.size() != labels.size())
        throw std::invalid_argument("fit: examples/labels length mismatch");
    if (per_example_weights) {
        if (per_example_weights->size() != labels.size())
            throw std::invalid_argument("fit: weights length mismatch");
        for (double w : *per_example_weights)
            if (!(w > 0.0)) throw std::invalid_argument("fit: weights must be positive");
    }
}

}  // namespace

std::vector<double> effective_weights(const BaseLearnerSpec& spec, const std::vector<int>& labels,
                                      const std::vector<double>* per_example_weights) {
    const std::size_t n = labels.size();
    std::vector<double> w(n, 1.0);
    if (per_example_weights) w = *per_example_weights;
    if (spec.weighting == ClassWeighting::balanced) {
        std::size_t n_pos = 0;
        for (int y : labels) n_pos += y > 0;
        std::size_t n_neg = n - n_pos;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t n_cls = labels[i] > 0 ? n_pos : n_neg;
            w[i] *= static_cast<double>(n) / (2.0 * static_cast<double>(n_cls));
        }
    }
    return w;
}

Model zero_model(const BaseLearnerSpec& spec, std::size_t feature_dim) {
    if (feature_dim < 1) throw std::invalid_argument("feature_dim must be >= 1");
    Model m;
    m.spec = spec;
    m.feature_dim = feature_dim;
    m.weights.assign(feature_dim, 0.0);
    return m;
}

double logistic_loss(const std::vector<double>& w, double b,
                     const std::vector<std::vector<double>>& examples,
                     const std::vector<int>& labels, const std::vector<double>& ew, double l2) {
    double total_w = std::accumulate(ew.begin(), ew.end(), 0.0);
    double loss = 0.0;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        double z = dot(w, examples[i]) + b;
        loss += ew[i] * softplus(-labels[i] * z);
    }
    loss /= total_w;
    for (double wj : w) loss += 0.5 * l2 * wj * wj;
    return loss;
}

void logistic_gradient(const std::vector<double>& w, double b,
                       const std::vector<std::vector<double>>& examples,
                       const std::vector<int>& labels, const std::vector<double>& ew, double l2,
                       std::vector<double>& grad_w, double& grad_b) {
    double total_w = std::accumulate(ew.begin(), ew.end(), 0.0);
    grad_w.assign(w.size(), 0.0);
    grad_b = 0.0;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        double z = dot(w, examples[i]) + b;
        double g = -labels[i] * sigmoid(-labels[i] * z) * ew[i];
        for (std::size_t j = 0; j < w.size(); ++j) grad_w[j] += g * examples[i][j];
        grad_b += g;
    }
    for (std::size_t j = 0; j < w.size(); ++j) grad_w[j] = grad_w[j] / total_w + l2 * w[j];
    grad_b /= total_w;
}

namespace {

void fit_logistic(Model& m, const std::vector<std::vector<double>>& examples,
                  const std::vector<int>& labels, const std::vector<double>& ew) {
    const BaseLearnerSpec& s = m.spec;
    std::vector<double> grad_w;
    double grad_b;
    for (int epoch = 0; epoch < s.logistic_epochs; ++epoch) {
        logistic_gradient(m.weights, m.bias, examples, labels, ew, s.logistic_l2, grad_w, grad_b);
        double norm2 = grad_b * grad_b;
        for (double g : grad_w) norm2 += g * g;
        if (std::sqrt(norm2) < s.logistic_grad_tol) break;
        for (std::size_t j = 0; j < m.weights.size(); ++j)
            m.weights[j] -= s.logistic_rate * grad_w[j];
        m.bias -= s.logistic_rate * grad_b;
    }
}

void fit_linear_svm(Model& m, const std::vector<std::vector<double>>& examples,
                    const std::vector<int>& labels, const std::vector<double>& ew,
                    std::uint64_t seed) {
    const std::size_t n = examples.size();
    const double total_w = std::accumulate(ew.begin(), ew.end(), 0.0);
    const double lambda = 1.0 / (m.spec.svm_c * static_cast<double>(n));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, 0x5f3));
    std::shuffle(order.begin(), order.end(), rng);  // one permutation, reused each epoch

    std::size_t t = 0;
    for (int epoch = 0; epoch < m.spec.svm_epochs; ++epoch) {
        for (std::size_t i : order) {
            ++t;
            const double eta = 1.0 / (lambda * static_cast<double>(t + n));
            const double c = ew[i] * static_cast<double>(n) / total_w;
            double z = dot(m.weights, examples[i]) + m.bias;
            double shrink = 1.0 - eta * lambda;
            for (double& wj : m.weights) wj *= shrink;
            if (labels[i] * z < 1.0) {
                const double step = eta * c * labels[i];
                for (std::size_t j = 0; j < m.weights.size(); ++j)
                    m.weights[j] += step * examples[i][j];
                m.bias += step;
            }
        }
    }
}

void fit_adaboost(Model& m, const std::vector<std::vector<double>>& examples,
                  const std::vector<int>& labels, const std::vector<double>& ew) {
    const std::size_t n = examples.size();
    const std::size_t d = m.feature_dim;

    // Per-feature sort order, computed once.
    std::vector<std::vector<std::size_t>> order(d);
    for (std::size_t j = 0; j < d; ++j) {
        order[j].resize(n);
        std::iota(order[j].begin(), order[j].end(), 0);
        std::stable_sort(order[j].begin(), order[j].end(),
                         [&](std::size_t a, std::size_t b) { return examples[a][j] < examples[b][j]; });
    }

    std::vector<double> dist = ew;
    double sum = std::accumulate(dist.begin(), dist.end(), 0.0);
    for (double& v : dist) v /= sum;

    const double eps = 1e-12;
    for (int round = 0; round < m.spec.boost_rounds; ++round) {
        double best_err = std::numeric_limits<double>::infinity();
        Stump best;
        double w_pos = 0.0;  // total weight of y=+1
        for (std::size_t i = 0; i < n; ++i)
            if (labels[i] > 0) w_pos += dist[i];

        for (std::size_t j = 0; j < d; ++j) {
            // Error of "predict +1 when x > t" with t below the smallest value
            // equals the weight of negatives; walk the sorted order moving
            // examples to the <= side at each midpoint.
            double err_gt = 1.0 - w_pos;  // polarity +1, everything on the > side
            for (std::size_t k = 0; k + 1 <= n; ++k) {
                std::size_t i = order[j][k];
                // moving example i to the <= side (predicted -1 by polarity +1)
                err_gt += labels[i] > 0 ? dist[i] : -dist[i];
                if (k + 1 < n) {
                    double a = examples[order[j][k]][j];
                    double b = examples[order[j][k + 1]][j];
                    if (a == b) continue;
                    double thr = a + (b - a) / 2.0;
                    // polarity +1 then -1; first strict improvement wins, so
                    // ties resolve by (feature, threshold, polarity) order.
                    if (err_gt < best_err) {
                        best_err = err_gt;
                        best = Stump{j, thr, +1, 0.0};
                    }
                    if (1.0 - err_gt < best_err) {
                        best_err = 1.0 - err_gt;
                        best = Stump{j, thr, -1, 0.0};
                    }
                }
            }
        }

        if (!std::isfinite(best_err) || best_err >= 0.5 - eps) break;
        double err = std::clamp(best_err, eps, 1.0 - eps);
        best.alpha = 0.5 * std::log((1.0 - err) / err);
        m.stumps.push_back(best);
        if (best_err <= eps) break;  // perfect stump; distribution would degenerate

        double z = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            int h = (examples[i][best.feature] > best.threshold ? best.polarity : -best.polarity);
            dist[i] *= std::exp(-best.alpha * labels[i] * h);
            z += dist[i];
        }
        for (double& v : dist) v /= z;
    }
}

}  // namespace

Model fit(const BaseLearnerSpec& spec, const std::vector<std::vector<double>>& examples,
          const std::vector<int>& labels, const std::vector<double>* per_example_weights,
          std::uint64_t seed) {
    check_training_input(examples, labels, per_example_weights);
    Model m = zero_model(spec, examples[0].size());
    m.trained_on_count = examples.size();

    bool has_pos = false, has_neg = false;
    for (int y : labels) (y > 0 ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) {
        m.constant_label = has_pos ? +1 : -1;
        return m;
    }

    std::vector<double> ew = effective_weights(spec, labels, per_example_weights);
    switch (spec.kind) {
        case LearnerKind::logistic: fit_logistic(m, examples, labels, ew); break;
        case LearnerKind::linear_svm: fit_linear_svm(m, examples, labels, ew, seed); break;
        case LearnerKind::adaboost_stumps: fit_adaboost(m, examples, labels, ew); break;
    }
    return m;
}

double predict_score(const Model& m, const std::vector<double>& x) {
    if (m.constant_label) return static_cast<double>(*m.constant_label);
    if (x.size() != m.feature_dim) throw std::invalid_argument("predict: dimension mismatch");
    switch (m.spec.kind) {
        case LearnerKind::logistic: return sigmoid(dot(m.weights, x) + m.bias) - 0.5;
        case LearnerKind::linear_svm: return dot(m.weights, x) + m.bias;
        case LearnerKind::adaboost_stumps: {
            double s = 0.0;
            for (const Stump& st : m.stumps)
                s += st.alpha * (x[st.feature] > st.threshold ? st.polarity : -st.polarity);
            return s;
        }
    }
    return 0.0;
}

int predict(const Model& m, const std::vector<double>& x) {
    return predict_score(m, x) > 0.0 ? +1 : -1;
}

std::vector<int> predict_all(const Model& m, const std::vector<std::vector<double>>& xs) {
    std::vector<int> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(predict(m, x));
    return out;
}

double predict_proba(const Model& m, const std::vector<double>& x) {
    if (m.spec.kind != LearnerKind::logistic)
        throw std::logic_error("predict_proba requires a logistic model");
    if (m.constant_label) return *m.constant_label > 0 ? 1.0 : 0.0;
    if (x.size() != m.feature_dim) throw std::invalid_argument("predict: dimension mismatch");
    return sigmoid(dot(m.weights, x) + m.bias);
}

std::string model_to_json(const Model& m) {
    nlohmann::json j;
    j["version"] = 1;
    j["kind"] = to_string(m.spec.kind);
    j["weighting"] = to_string(m.spec.weighting);
    j["hyperparameters"] = {
        {"logistic_l2", m.spec.logistic_l2},       {"logistic_rate", m.spec.logistic_rate},
        {"logistic_epochs", m.spec.logistic_epochs}, {"logistic_grad_tol", m.spec.logistic_grad_tol},
        {"svm_c", m.spec.svm_c},                   {"svm_epochs", m.spec.svm_epochs},
        {"boost_rounds", m.spec.boost_rounds},
    };
    j["feature_dim"] = m.feature_dim;
    j["weights"] = m.weights;
    j["bias"] = m.bias;
    nlohmann::json stumps = nlohmann::json::array();
    for (const Stump& s : m.stumps)
        stumps.push_back({{"feature", s.feature}, {"threshold", s.threshold},
                          {"polarity", s.polarity}, {"alpha", s.alpha}});
    j["stumps"] = stumps;
    if (m.constant_label) j["constant_label"] = *m.constant_label;
    j["trained_on_count"] = m.trained_on_count;
    return j.dump(2);
}

Model model_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.at("version").get<int>() != 1) throw std::runtime_error("unsupported model version");
    Model m;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "lr")
        m.spec.kind = LearnerKind::logistic;
    else if (kind == "svm")
        m.spec.kind = LearnerKind::linear_svm;
    else if (kind == "ada")
        m.spec.kind = LearnerKind::adaboost_stumps;
    else
        throw std::runtime_error("unknown learner kind '" + kind + "'");
    m.spec.weighting = j.at("weighting").get<std::string>() == "balanced" ? ClassWeighting::balanced
                                                                          : ClassWeighting::equal;
    const auto& h = j.at("hyperparameters");
    m.spec.logistic_l2 = h.at("logistic_l2").get<double>();
    m.spec.logistic_rate = h.at("logistic_rate").get<double>();
    m.spec.logistic_epochs = h.at("logistic_epochs").get<int>();
    m.spec.logistic_grad_tol = h.at("logistic_grad_tol").get<double>();
    m.spec.svm_c = h.at("svm_c").get<double>();
    m.spec.svm_epochs = h.at("svm_epochs").get<int>();
    m.spec.boost_rounds = h.at("boost_rounds").get<int>();
    m.feature_dim = j.at("feature_dim").get<std::size_t>();
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    for (const auto& s : j.at("stumps"))
        m.stumps.push_back(Stump{s.at("feature").get<std::size_t>(), s.at("threshold").get<double>(),
                                 s.at("polarity").get<int>(), s.at("alpha").get<double>()});
    if (j.contains("constant_label")) m.constant_label = j.at("constant_label").get<int>();
    m.trained_on_count = j.at("trained_on_count").get<std::size_t>();
    return m;
}

}  // namespace dualteach
