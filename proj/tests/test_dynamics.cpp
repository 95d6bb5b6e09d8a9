#include "dualteach/dynamics.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "dualteach/rng.hpp"

using namespace dualteach;

TEST_CASE("transition matrix entries for a symmetric quality point") {
    TeacherQuality q{0.8, 0.5, 0.8, 0.5};
    TransitionMatrix m = transition_matrix(q);
    CHECK(m.m11 == doctest::Approx(0.5));
    CHECK(m.m22 == doctest::Approx(0.5));
    CHECK(m.m12 == doctest::Approx(0.125));
    CHECK(m.m21 == doctest::Approx(0.125));

    EigenReport e = eigen_report(q);
    CHECK(e.delta == doctest::Approx(0.0625));
    CHECK(e.max_magnitude == doctest::Approx(0.625));
    CHECK(e.lambda2 == doctest::Approx(0.375));
    CHECK(converges(q));
}

TEST_CASE("degenerate quality points") {
    // zero recall on both sides: identity matrix, spectral radius 1
    TeacherQuality frozen{0.8, 0.0, 0.8, 0.0};
    TransitionMatrix m = transition_matrix(frozen);
    CHECK(m.m11 == 1.0);
    CHECK(m.m22 == 1.0);
    CHECK(m.m12 == 0.0);
    CHECK(m.m21 == 0.0);
    CHECK(eigen_report(frozen).max_magnitude == doctest::Approx(1.0));
    CHECK_FALSE(converges(frozen));

    // perfect teachers: zero matrix, instant convergence
    TeacherQuality perfect{1.0, 1.0, 1.0, 1.0};
    EigenReport e = eigen_report(perfect);
    CHECK(e.max_magnitude == doctest::Approx(0.0));
    CHECK(converges(perfect));

    // zero precision with positive recall is invalid
    TeacherQuality bad{0.0, 0.5, 0.8, 0.5};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    // ... but zero precision with zero recall is a dead channel, allowed
    TeacherQuality dead{0.0, 0.0, 0.8, 0.5};
    CHECK_NOTHROW(dead.validate());
    TransitionMatrix md = transition_matrix(dead);
    CHECK(md.m21 == 0.0);
}

TEST_CASE("precisions summing to exactly 1 pin the spectral radius at 1") {
    for (auto [pp, pm] : {std::pair{0.5, 0.5}, {0.3, 0.7}, {0.9, 0.1}}) {
        for (auto [rp, rm] : {std::pair{0.5, 0.5}, {0.2, 0.9}, {1.0, 1.0}}) {
            TeacherQuality q{pp, rp, pm, rm};
            CHECK(eigen_report(q).max_magnitude == doctest::Approx(1.0).epsilon(1e-12));
            CHECK_FALSE(converges(q));
        }
    }
}

TEST_CASE("closed form matches the characteristic polynomial on random quality"
          * doctest::description("also checks delta >= 0 and radius ordering")) {
    Rng rng(2024);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 10000; ++trial) {
        TeacherQuality q;
        q.p_plus = 0.05 + 0.95 * unif(rng);
        q.p_minus = 0.05 + 0.95 * unif(rng);
        q.r_plus = unif(rng);
        q.r_minus = unif(rng);
        EigenReport e = eigen_report(q);  // throws internally on any mismatch
        CHECK(e.delta >= 0.0);
        CHECK(e.lambda1 >= e.lambda2);
        CHECK(e.max_magnitude >= std::abs(e.lambda2) - 1e-12);

        TransitionMatrix m = transition_matrix(q);
        double tr = m.m11 + m.m22, det = m.m11 * m.m22 - m.m12 * m.m21;
        CHECK(e.lambda1 * e.lambda1 - tr * e.lambda1 + det ==
              doctest::Approx(0.0).epsilon(1e-9).scale(std::max(1.0, e.lambda1 * e.lambda1)));
    }
}

TEST_CASE("trajectory decay rate approaches the spectral radius") {
    TeacherQuality q{0.8, 0.5, 0.8, 0.5};
    ErrorState e0{100.0, 100.0};
    auto traj = simulate_trajectory(q, e0, 200);
    REQUIRE(traj.size() == 201);
    CHECK(traj[0].alpha == 100.0);
    double rate = (traj[200].alpha + traj[200].beta) / (traj[199].alpha + traj[199].beta);
    CHECK(rate == doctest::Approx(eigen_report(q).max_magnitude).epsilon(1e-9));
    // one hand-computed step: e1 = M e0
    CHECK(traj[1].alpha == doctest::Approx(0.5 * 100 + 0.125 * 100));
    CHECK(traj[1].beta == doctest::Approx(0.125 * 100 + 0.5 * 100));
}

TEST_CASE("trajectory diverges when the assumptions fail") {
    TeacherQuality q{0.45, 0.8, 0.45, 0.8};  // precisions sum below 1
    CHECK_FALSE(converges(q));
    auto traj = simulate_trajectory(q, {10.0, 10.0}, 100);
    CHECK(traj.back().alpha > traj.front().alpha);
}

TEST_CASE("sweep covers the grid and flags P=0 cells with +inf") {
    auto rows = sweep_eigen_surface(11, SweepMode::precision, 0.5, 0.5);
    REQUIRE(rows.size() == 121);
    CHECK(rows.front().x == 0.0);
    CHECK(rows.back().x == 1.0);
    CHECK(rows.back().y == 1.0);
    std::size_t infinities = 0;
    for (const auto& r : rows) {
        if (std::isinf(r.max_magnitude)) {
            ++infinities;
            CHECK((r.x == 0.0 || r.y == 0.0));
        }
        if (r.x + r.y > 1.01 && r.x > 0 && r.y > 0) CHECK(r.max_magnitude < 1.0);
        if (r.x + r.y <= 1.0) CHECK(r.max_magnitude >= 1.0 - 1e-12);
    }
    CHECK(infinities == 21);  // both axes, origin counted once

    // recall mode at complementary precisions: flat surface at exactly 1
    auto flat = sweep_eigen_surface(6, SweepMode::recall, 0.6, 0.4);
    for (const auto& r : flat)
        CHECK(r.max_magnitude == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("oracle simulation tracks the mean-field recursion") {
    // kept in the regime where expected counts stay well above 1: the integer
    // realization only tracks the real-valued recursion while rounding effects
    // are negligible relative to the counts themselves
    TeacherQuality q{0.9, 0.6, 0.9, 0.6};
    const std::size_t n = 4000, steps = 6, trials = 40;
    OracleRun run = simulate_oracle_run(q, n, 0.5, steps, trials, 7);
    REQUIRE(run.steps.size() == steps + 1);

    // the initial state is deterministic: everything predicted -1, so
    // beta(0) = #positives and alpha(0) = 0
    CHECK(run.steps[0].alpha_mean == 0.0);
    CHECK(run.steps[0].beta_mean == doctest::Approx(n / 2.0));
    CHECK(run.steps[0].alpha_se == 0.0);

    auto traj = simulate_trajectory(q, {0.0, n / 2.0}, steps);
    for (std::size_t k = 0; k <= steps; ++k) {
        double tol_a = 4.0 * run.steps[k].alpha_se + 1e-9 + 0.02 * traj[k].beta;
        double tol_b = 4.0 * run.steps[k].beta_se + 1e-9 + 0.02 * traj[k].beta;
        CHECK(std::abs(run.steps[k].alpha_mean - traj[k].alpha) <= tol_a);
        CHECK(std::abs(run.steps[k].beta_mean - traj[k].beta) <= tol_b);
    }

    // determinism
    OracleRun again = simulate_oracle_run(q, n, 0.5, steps, trials, 7);
    for (std::size_t k = 0; k <= steps; ++k) {
        CHECK(again.steps[k].alpha_mean == run.steps[k].alpha_mean);
        CHECK(again.steps[k].beta_mean == run.steps[k].beta_mean);
    }
}

TEST_CASE("oracle saturation is reported, not hidden") {
    // Step 1: the imprecise FN teacher floods the positive side with false
    // positives. Step 2: the FP teacher (precision 0.05) then demands 19
    // mis-flags per hit, far beyond the small pool of correct positives, so
    // the clamp must engage and be counted.
    TeacherQuality q{0.05, 1.0, 0.5, 1.0};
    OracleRun run = simulate_oracle_run(q, 40, 0.5, 3, 5, 1);
    CHECK(run.saturation_warnings > 0);
}
