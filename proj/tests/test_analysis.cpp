#include "support.hpp"

#include "tubal/analysis.hpp"
#include "tubal/errors.hpp"
#include "tubal/experiment.hpp"
#include "tubal/solver.hpp"

#include <doctest.h>

#include <cmath>

using namespace tubal;

TEST_CASE("ric_threshold values") {
    CHECK(ric_threshold(2.0, 1) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
    CHECK(ric_threshold(2.0, 5) == doctest::Approx(std::sqrt(1.0 / 26.0)).epsilon(1e-14));
    CHECK(ric_threshold(1.0 + 1e-12, 5) < 1e-6);
    CHECK_THROWS_AS(ric_threshold(1.0, 5), DimensionError);
    CHECK_THROWS_AS(ric_threshold(2.0, 0), DimensionError);
}

TEST_CASE("property: ric_threshold monotonicity") {
    for (Index n3 = 1; n3 <= 10; ++n3) {
        double prev = 0.0;
        for (double t = 1.1; t <= 10.0; t += 0.1) {
            const double v = ric_threshold(t, n3);
            CHECK(v > prev);
            CHECK(v < 1.0);
            prev = v;
        }
    }
    for (double t : {1.1, 2.0, 5.0, 10.0}) {
        for (Index n3 = 2; n3 <= 10; ++n3) CHECK(ric_threshold(t, n3) < ric_threshold(t, n3 - 1));
    }
}

TEST_CASE("rip_order") {
    CHECK(rip_order(2.0, 3) == 6);
    CHECK(rip_order(1.5, 3) == 5);
    CHECK(rip_order(10.0, 2, 10) == 10);
    CHECK(rip_order(10.0, 2, 5) == 5);
}

TEST_CASE("eta_constants") {
    const auto z = eta_constants(0.0, 2.0, 5);
    CHECK(z.eta1 == 2.0);
    CHECK(z.eta2 == 0.0);
    CHECK(eta_constants(0.5, 2.0, 1).eta1 == doctest::Approx(2.0 / (0.5 * std::sqrt(1.5))).epsilon(1e-14));
    CHECK(eta_constants(0.5, 2.0, 1).eta1 == doctest::Approx(3.2660).epsilon(1e-4));
    CHECK_THROWS_AS(eta_constants(1.0, 2.0, 1), DimensionError);
    for (double t : {1.1, 1.5, 2.0, 3.0, 5.0, 10.0}) {
        for (Index n3 = 1; n3 <= 10; ++n3) {
            const double e2 = eta_constants(ric_threshold(t, n3), t, n3).eta2;
            CHECK(std::abs(e2 - 1.0 / std::sqrt(static_cast<double>(n3))) <= 1e-12);
        }
    }
}

TEST_CASE("theorem and corollary constants") {
    const BoundConstants a = theorem1_constants(0.0, 2.0, 1, 5, 1.0, 0.0);
    CHECK(a.c1 == doctest::Approx(1.0));
    CHECK(a.c2 == doctest::Approx(4.0));
    const BoundConstants b = corollary_constants(0.0, 2.0, 1, 5, 1.0);
    CHECK(b.c1 == doctest::Approx(1.0));
    CHECK(b.c2 == doctest::Approx(5.0));

    const double d = 0.1, t = 4.0, lambda = 0.3;
    const auto eta = eta_constants(d, t, 5);
    CHECK(theorem1_constants(d, t, 2, 5, lambda, 0.0).c2 ==
          doctest::Approx(2.0 * std::sqrt(2.0) * eta.eta1 * lambda).epsilon(1e-14));

    // The corollary is the epsilon = lambda / 2 case.
    for (double dd : {0.0, 0.05, 0.15}) {
        for (double tt : {3.0, 6.0}) {
            for (Index r : {1, 2, 4}) {
                for (double l : {1e-3, 0.1, 2.0}) {
                    if (dd >= ric_threshold(tt, 3)) continue;
                    const BoundConstants th = theorem1_constants(dd, tt, r, 3, l, l / 2.0);
                    const BoundConstants co = corollary_constants(dd, tt, r, 3, l);
                    CHECK(th.c1 == doctest::Approx(co.c1).epsilon(1e-12));
                    CHECK(th.c2 == doctest::Approx(co.c2 * l).epsilon(1e-12));
                    CHECK(th.c3 == doctest::Approx(co.c3).epsilon(1e-12));
                    CHECK(th.c4 == doctest::Approx(co.c4 * l).epsilon(1e-12));
                }
            }
        }
    }
}

TEST_CASE("constants reject violated preconditions") {
    const double thr = ric_threshold(2.0, 5);
    try {
        theorem1_constants(thr, 2.0, 1, 5, 0.1, 0.0);
        FAIL("expected ConditionError");
    } catch (const ConditionError& e) {
        CHECK(e.condition() == "ric_threshold");
    }
    CHECK_THROWS_AS(corollary_constants(thr + 1e-3, 2.0, 1, 5, 0.1), ConditionError);
    CHECK_THROWS_AS(theorem1_constants(0.1, 2.0, 0, 5, 0.1, 0.0), DimensionError);
    CHECK_THROWS_AS(theorem1_constants(0.1, 4.0, 1, 5, 0.0, 0.0), DimensionError);
    CHECK_THROWS_AS(theorem1_constants(0.1, 4.0, 1, 5, 0.1, -1.0), DimensionError);
}

TEST_CASE("property: constants are finite and continuous below the threshold") {
    for (double t : {1.5, 3.0, 8.0}) {
        const double top = 0.9 * ric_threshold(t, 5);
        BoundConstants prev = theorem1_constants(0.0, t, 2, 5, 0.1, 0.05);
        for (int i = 1; i <= 200; ++i) {
            const BoundConstants c = theorem1_constants(top * i / 200.0, t, 2, 5, 0.1, 0.05);
            for (double v : {c.c1, c.c2, c.c3, c.c4}) {
                CHECK(std::isfinite(v));
                CHECK(v > 0.0);
            }
            CHECK(std::abs(c.c3 - prev.c3) <= 0.05 * prev.c3);
            CHECK(std::abs(c.c4 - prev.c4) <= 0.05 * prev.c4);
            prev = c;
        }
    }
}

TEST_CASE("estimate_ric on exact maps") {
    const Dims3 d{3, 3, 2};
    const LinearMap id(Eigen::MatrixXd::Identity(18, 18), d);
    CHECK(estimate_ric(id, 1, 20, 1).delta_hat <= 1e-12);
    const LinearMap twice(2.0 * Eigen::MatrixXd::Identity(18, 18), d);
    CHECK(estimate_ric(twice, 2, 20, 1).delta_hat == doctest::Approx(3.0).epsilon(1e-12));
    CHECK_THROWS_AS(estimate_ric(id, 0, 20, 1), DimensionError);
    CHECK_THROWS_AS(estimate_ric(id, 4, 20, 1), DimensionError);
    CHECK_THROWS_AS(estimate_ric(id, 1, 0, 1), DimensionError);
}

TEST_CASE("estimate_ric on Gaussian maps") {
    const Dims3 d{6, 6, 4};
    const RipEstimate e = estimate_ric(gaussian_map(72, d, 3), 1, 20, 9);
    CHECK(e.delta_hat > 0.0);
    CHECK(e.delta_hat < 1.0);
    CHECK(e.distortion_samples.size() == 20);
    CHECK(e.delta_hat == *std::max_element(e.distortion_samples.begin(), e.distortion_samples.end()));

    // Larger m gives smaller distortion on average.
    double prev = 1e300;
    for (Index m : {36, 72, 144}) {
        double mean = 0.0;
        for (std::uint64_t s = 0; s < 8; ++s) mean += estimate_ric(gaussian_map(m, d, 100 + s), 2, 20, s).delta_hat;
        CHECK(mean < prev);
        prev = mean;
    }
}

TEST_CASE("property: nested estimates are monotone in r") {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const LinearMap map = gaussian_map(60, Dims3{5, 5, 3}, s);
        double prev = 0.0;
        for (Index r = 1; r <= 5; ++r) {
            const double v = estimate_ric(map, r, 15, 1000 + s).delta_hat;
            CHECK(v >= prev);
            prev = v;
        }
    }
}

TEST_CASE("verify_bounds") {
    const Tensor3 x = generate_lowrank(6, 6, 3, 1, 5);
    const LinearMap map = gaussian_map(78, x.dims(), 6);
    const Eigen::VectorXd y = apply(map, x);

    const BoundReport exact = verify_bounds(x, x, map, y, 1, 4.0, 0.1, 0.1, 0.0);
    CHECK(exact.lhs_meas == 0.0);
    CHECK(exact.lhs_fro == 0.0);
    CHECK(exact.tail_tnn <= 1e-10);
    CHECK(exact.satisfied());

    const NoisySample noisy = add_noise(y, 0.1, 7);
    try {
        verify_bounds(x, x, map, noisy.y, 1, 4.0, 0.1, 0.1, 0.5 * noisy.noise_norm);
        FAIL("expected ConditionError");
    } catch (const ConditionError& e) {
        CHECK(e.condition() == "noise_bound");
    }
    CHECK_NOTHROW(verify_bounds(x, x, map, noisy.y, 1, 4.0, 0.1, 0.1, noisy.noise_norm));
    CHECK_THROWS_AS(verify_bounds(x, x, map, y, 1, 2.0, 0.5, 0.1, 0.0), ConditionError);

    // With epsilon = 0 the Frobenius right-hand side shrinks with lambda.
    double prev = 1e300;
    for (double l : {1e-2, 1e-3, 1e-4}) {
        const double rhs = verify_bounds(x, x, map, y, 1, 4.0, 0.1, l, 0.0).rhs_fro;
        CHECK(rhs < prev);
        prev = rhs;
    }
}

TEST_CASE("sweep_bounds on a solved instance") {
    const Tensor3 x = generate_lowrank(8, 8, 3, 1, 41);
    const LinearMap map = gaussian_map(2 * 17 * 3, x.dims(), 42);
    const NoisySample s = add_noise(apply(map, x), 0.01, 43);
    const double lambda = 0.1;
    const SolveResult res = admm_solve(map, s.y, continuation_config(lambda));
    const BoundSweep sweep =
        sweep_bounds(x, res.x_hat, map, s.y, 1, lambda, s.noise_norm, {1.5, 2.0, 4.0, 6.0, 8.0}, 50, 44);
    REQUIRE(sweep.entries.size() == 5);
    int verified = 0;
    for (const auto& e : sweep.entries) {
        CHECK(e.order == rip_order(e.t, 1, 8));
        if (e.report) {
            ++verified;
            CHECK(e.report->satisfied());
        }
    }
    CHECK(verified > 0);
    CHECK(sweep.tightest.has_value());
}
