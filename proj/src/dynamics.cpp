#include "dualteach/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dualteach/rng.hpp"

namespace dualteach {

void TeacherQuality::validate() const {
    for (double v : {p_plus, r_plus, p_minus, r_minus})
        if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("teacher quality outside [0,1]");
    if ((r_plus > 0.0 && p_plus == 0.0) || (r_minus > 0.0 && p_minus == 0.0))
        throw std::invalid_argument("zero precision with positive recall");
}

namespace {

// (1-P)/P * R with the dead-channel convention R = 0 -> 0.
double cross_term(double p, double r) {
    if (r == 0.0) return 0.0;
    return (1.0 - p) / p * r;
}

}  // namespace

TransitionMatrix transition_matrix(const TeacherQuality& q) {
    q.validate();
    TransitionMatrix m;
    m.m11 = 1.0 - q.r_plus;
    m.m12 = cross_term(q.p_minus, q.r_minus);
    m.m21 = cross_term(q.p_plus, q.r_plus);
    m.m22 = 1.0 - q.r_minus;
    return m;
}

EigenReport eigen_report(const TeacherQuality& q) {
    TransitionMatrix m = transition_matrix(q);
    EigenReport rep;
    double cross = (q.r_plus == 0.0 || q.r_minus == 0.0)
                       ? 0.0
                       : (1.0 - q.p_plus) * (1.0 - q.p_minus) / (q.p_plus * q.p_minus) * q.r_plus *
                             q.r_minus;
    double diff = q.r_plus - q.r_minus;
    rep.delta = diff * diff + 4.0 * cross;
    double s = 2.0 - q.r_minus - q.r_plus;
    double root = std::sqrt(rep.delta);
    rep.lambda1 = (s + root) / 2.0;
    rep.lambda2 = (s - root) / 2.0;
    rep.max_magnitude = std::max(std::abs(rep.lambda1), std::abs(rep.lambda2));

    // Independent route: characteristic polynomial of the assembled matrix.
    double tr = m.m11 + m.m22;
    double det = m.m11 * m.m22 - m.m12 * m.m21;
    double disc = tr * tr - 4.0 * det;
    double numeric1 = (tr + std::sqrt(std::max(disc, 0.0))) / 2.0;
    double numeric2 = (tr - std::sqrt(std::max(disc, 0.0))) / 2.0;
    double scale = std::max({1.0, std::abs(rep.lambda1), std::abs(rep.lambda2)});
    if (std::abs(numeric1 - rep.lambda1) > 1e-12 * scale ||
        std::abs(numeric2 - rep.lambda2) > 1e-12 * scale)
        throw std::logic_error("closed-form and numeric eigenvalues disagree");
    return rep;
}

bool converges(const TeacherQuality& q) {
    q.validate();
    return q.r_plus * q.r_minus > 0.0 && q.p_plus + q.p_minus > 1.0;
}

std::vector<ErrorState> simulate_trajectory(const TeacherQuality& q, const ErrorState& e0,
                                            std::size_t steps) {
    if (steps < 1) throw std::invalid_argument("steps must be >= 1");
    TransitionMatrix m = transition_matrix(q);
    std::vector<ErrorState> out;
    out.reserve(steps + 1);
    out.push_back(e0);
    ErrorState e = e0;
    for (std::size_t k = 0; k < steps; ++k) {
        ErrorState next;
        next.alpha = m.m11 * e.alpha + m.m12 * e.beta;
        next.beta = m.m21 * e.alpha + m.m22 * e.beta;
        out.push_back(next);
        e = next;
    }
    return out;
}

namespace {

// Spectral radius that tolerates P = 0 grid points (returns +infinity).
double lambda_max_total(double p_plus, double r_plus, double p_minus, double r_minus) {
    if ((p_plus == 0.0 && r_plus > 0.0) || (p_minus == 0.0 && r_minus > 0.0))
        return std::numeric_limits<double>::infinity();
    double cross = (r_plus == 0.0 || r_minus == 0.0)
                       ? 0.0
                       : (1.0 - p_plus) * (1.0 - p_minus) / (p_plus * p_minus) * r_plus * r_minus;
    double diff = r_plus - r_minus;
    double delta = diff * diff + 4.0 * cross;
    return (2.0 - r_minus - r_plus + std::sqrt(delta)) / 2.0;
}

}  // namespace

std::vector<SweepRow> sweep_eigen_surface(std::size_t grid_resolution, SweepMode mode,
                                          double fixed_a, double fixed_b) {
    if (grid_resolution < 2) throw std::invalid_argument("grid_resolution must be >= 2");
    std::vector<SweepRow> rows;
    rows.reserve(grid_resolution * grid_resolution);
    for (std::size_t i = 0; i < grid_resolution; ++i) {
        double x = static_cast<double>(i) / static_cast<double>(grid_resolution - 1);
        for (std::size_t j = 0; j < grid_resolution; ++j) {
            double y = static_cast<double>(j) / static_cast<double>(grid_resolution - 1);
            double lam = mode == SweepMode::precision ? lambda_max_total(x, fixed_a, y, fixed_b)
                                                      : lambda_max_total(fixed_a, x, fixed_b, y);
            rows.push_back(SweepRow{x, y, lam});
        }
    }
    return rows;
}

OracleRun simulate_oracle_run(const TeacherQuality& q, std::size_t n_unlabeled,
                              double positive_fraction, std::size_t steps, std::size_t trials,
                              std::uint64_t seed) {
    q.validate();
    if (n_unlabeled < 1 || trials < 1)
        throw std::invalid_argument("n_unlabeled and trials must be >= 1");
    if (!(positive_fraction >= 0.0 && positive_fraction <= 1.0))
        throw std::invalid_argument("positive_fraction must be in [0,1]");

    const std::size_t n_pos =
        static_cast<std::size_t>(std::llround(positive_fraction * static_cast<double>(n_unlabeled)));
    // truth[i]: first n_pos examples are the true positives
    auto truth = [&](std::size_t i) { return i < n_pos ? +1 : -1; };

    OracleRun run;
    std::vector<std::vector<double>> alphas(steps + 1), betas(steps + 1);

    for (std::size_t trial = 0; trial < trials; ++trial) {
        Rng rng(derive_seed(seed, 0x0c1e, trial));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        // Memorizer learner: prediction is the stored label, -1 when absent.
        std::vector<int> stored(n_unlabeled, 0);  // 0 = absent
        auto predicted = [&](std::size_t i) { return stored[i] == 0 ? -1 : stored[i]; };

        auto measure = [&](std::size_t k) {
            double a = 0.0, b = 0.0;
            for (std::size_t i = 0; i < n_unlabeled; ++i) {
                int pred = predicted(i);
                if (pred > 0 && truth(i) < 0) a += 1.0;
                if (pred < 0 && truth(i) > 0) b += 1.0;
            }
            alphas[k].push_back(a);
            betas[k].push_back(b);
        };
        measure(0);

        for (std::size_t k = 1; k <= steps; ++k) {
            std::vector<std::size_t> fp_true, fn_true, pos_correct, neg_correct;
            for (std::size_t i = 0; i < n_unlabeled; ++i) {
                int pred = predicted(i);
                if (pred > 0)
                    (truth(i) < 0 ? fp_true : pos_correct).push_back(i);
                else
                    (truth(i) > 0 ? fn_true : neg_correct).push_back(i);
            }

            auto flag_channel = [&](const std::vector<std::size_t>& errors,
                                    std::vector<std::size_t>& correct, double p, double r,
                                    int corrected_label) {
                std::size_t hits = 0;
                std::vector<std::pair<std::size_t, int>> updates;
                for (std::size_t i : errors)
                    if (unif(rng) < r) {
                        updates.emplace_back(i, corrected_label);
                        ++hits;
                    }
                std::size_t misflags = 0;
                if (hits > 0 && p < 1.0 && p > 0.0)
                    misflags = static_cast<std::size_t>(
                        std::llround(static_cast<double>(hits) * (1.0 - p) / p));
                if (misflags > correct.size()) {
                    misflags = correct.size();
                    ++run.saturation_warnings;
                }
                std::shuffle(correct.begin(), correct.end(), rng);
                for (std::size_t m = 0; m < misflags; ++m)
                    updates.emplace_back(correct[m], corrected_label);
                return updates;
            };

            auto fp_updates = flag_channel(fp_true, pos_correct, q.p_plus, q.r_plus, -1);
            auto fn_updates = flag_channel(fn_true, neg_correct, q.p_minus, q.r_minus, +1);
            for (auto& [i, label] : fp_updates) stored[i] = label;
            for (auto& [i, label] : fn_updates) stored[i] = label;
            measure(k);
        }
    }

    run.steps.resize(steps + 1);
    const double nt = static_cast<double>(trials);
    for (std::size_t k = 0; k <= steps; ++k) {
        auto summarize = [&](const std::vector<double>& v, double& mean, double& se) {
            double s = 0.0;
            for (double x : v) s += x;
            mean = s / nt;
            double var = 0.0;
            for (double x : v) var += (x - mean) * (x - mean);
            var = trials > 1 ? var / (nt - 1.0) : 0.0;
            se = std::sqrt(var / nt);
        };
        summarize(alphas[k], run.steps[k].alpha_mean, run.steps[k].alpha_se);
        summarize(betas[k], run.steps[k].beta_mean, run.steps[k].beta_se);
    }
    return run;
}

}  // namespace dualteach
