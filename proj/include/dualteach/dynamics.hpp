#ifndef DUALTEACH_DYNAMICS_HPP
#define DUALTEACH_DYNAMICS_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace dualteach {

/// Precision and recall of the FP teacher (plus) and FN teacher (minus).
/// Valid when all four lie in [0,1] and precision is positive wherever the
/// paired recall is positive.
struct TeacherQuality {
    double p_plus = 1.0;
    double r_plus = 1.0;
    double p_minus = 1.0;
    double r_minus = 1.0;

    void validate() const;
};

/// Expected false-positive and false-negative counts; the recursion is a
/// mean-field model, so these are reals.
struct ErrorState {
    double alpha = 0.0;
    double beta = 0.0;
};

struct TransitionMatrix {
    double m11 = 0.0, m12 = 0.0, m21 = 0.0, m22 = 0.0;
};

struct EigenReport {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double delta = 0.0;          // discriminant; always >= 0 for valid quality
    double max_magnitude = 0.0;  // spectral radius
};

/// M = [[1-R+, (1-P-)/P- R-], [(1-P+)/P+ R+, 1-R-]]. A zero recall kills its
/// cross term regardless of the paired precision (no error mass moves through
/// a dead channel).
TransitionMatrix transition_matrix(const TeacherQuality& q);

/// Closed-form eigenvalues of the transition matrix, cross-checked against
/// the characteristic polynomial of the assembled matrix within 1e-12.
EigenReport eigen_report(const TeacherQuality& q);

/// The convergence assumptions: both recalls positive and the precisions sum
/// above 1. Equivalent to spectral radius < 1.
bool converges(const TeacherQuality& q);

/// Iterates e(k+1) = M e(k); returns steps+1 states including e0.
std::vector<ErrorState> simulate_trajectory(const TeacherQuality& q, const ErrorState& e0,
                                            std::size_t steps);

enum class SweepMode {
    precision,  // grid over (P+, P-), recalls fixed
    recall      // grid over (R+, R-), precisions fixed
};

struct SweepRow {
    double x = 0.0, y = 0.0;  // the two swept coordinates
    double max_magnitude = 0.0;
};

/// Evaluates the spectral radius over a unit-square grid. In precision mode a
/// grid point with P = 0 and positive recall yields +infinity rather than an
/// error, so full-square surfaces stay total.
std::vector<SweepRow> sweep_eigen_surface(std::size_t grid_resolution, SweepMode mode,
                                          double fixed_a, double fixed_b);

struct OracleStep {
    double alpha_mean = 0.0, beta_mean = 0.0;
    double alpha_se = 0.0, beta_se = 0.0;  // standard error of the trial mean
};

struct OracleRun {
    std::vector<OracleStep> steps;  // steps+1 entries including the initial state
    std::size_t saturation_warnings = 0;
};

/// Stochastic validation of the error recursion: an idealized memorizer
/// learner (predicts the stored retraining label if present, else -1) over a
/// population with known truth, corrected each step by stochastic teachers of
/// quality q. Each true error in a channel is flagged independently with
/// probability R; round(flags * (1-P)/P) correctly classified examples in the
/// same channel are mis-flagged uniformly (clamped to availability, counted
/// as a saturation warning). Retraining-set updates use overwrite semantics.
OracleRun simulate_oracle_run(const TeacherQuality& q, std::size_t n_unlabeled,
                              double positive_fraction, std::size_t steps, std::size_t trials,
                              std::uint64_t seed);

}  // namespace dualteach

#endif
