#pragma once

#include "tubal/measurement.hpp"
#include "tubal/tensor.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

namespace tubal {

// sqrt((t - 1) / (n3^2 + t - 1)): the t-RIC level below which the recovery
// bounds hold. Requires t > 1 and n3 >= 1.
double ric_threshold(double t, Index n3);

// RIP order used for an oversampling factor t: ceil(t * r), capped at kappa
// when kappa > 0.
Index rip_order(double t, Index r, Index kappa = 0);

struct EtaConstants {
    double eta1 = 0.0;
    double eta2 = 0.0;
};

// eta1 = 2 / ((1 - d) sqrt(1 + d)),  eta2 = sqrt(n3) d / sqrt((1 - d^2)(t - 1)).
// delta is accepted in [0, 1); delta = 0 gives the limiting values (2, 0).
EtaConstants eta_constants(double delta, double t, Index n3);

struct BoundConstants {
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
    double c4 = 0.0;
};

// Constants of the error bounds
//   ||M(X^ - X)||_2 <= c1 ||X_-max(r)||_* + c2
//   ||X^ - X||_F    <= c3 ||X_-max(r)||_* + c4
// for noise ||w||_2 <= epsilon. Throws ConditionError("ric_threshold") when
// delta >= ric_threshold(t, n3).
BoundConstants theorem1_constants(double delta, double t, Index r, Index n3, double lambda, double epsilon);

// The epsilon = lambda / 2 specialisation; c2 and c4 multiply lambda.
BoundConstants corollary_constants(double delta, double t, Index r, Index n3, double lambda);

struct RipEstimate {
    Index r = 0;
    int trials = 0;
    double delta_hat = 0.0;
    std::vector<double> distortion_samples;
};

/// Empirical lower estimate of the t-RIC of order r.
///
/// Trial i draws Gaussian factor columns A(:,q,:) and rows B(q,:,:) for
/// q = 0..r-1 from a stream keyed on (seed, i, q), and evaluates
/// | ||M(X)||^2 / ||X||_F^2 - 1 | on every prefix product
/// X_q = sum_{p <= q} A(:,p,:) * B(p,:,:). The trial's sample is the largest
/// of these, so estimates for nested ranks on the same seed are monotone.
RipEstimate estimate_ric(const LinearMap& map, Index r, int trials, std::uint64_t seed);

struct BoundReport {
    double t = 0.0;
    Index r = 0;
    Index n3 = 0;
    double delta = 0.0;
    double eta1 = 0.0;
    double eta2 = 0.0;
    BoundConstants theorem;
    BoundConstants corollary;
    double lambda = 0.0;
    double epsilon = 0.0;
    double tail_tnn = 0.0; // ||X_-max(r)||_*
    double lhs_meas = 0.0;
    double rhs_meas = 0.0;
    double lhs_fro = 0.0;
    double rhs_fro = 0.0;
    bool meas_satisfied = false;
    bool fro_satisfied = false;

    bool satisfied() const { return meas_satisfied && fro_satisfied; }
};

/// Evaluates both error bounds for a recovered tensor. Throws ConditionError
/// when delta is at or above the threshold, or when the realized noise
/// ||y - M(x_true)||_2 exceeds epsilon.
BoundReport verify_bounds(const Tensor3& x_true, const Tensor3& x_hat, const LinearMap& map,
                          const Eigen::VectorXd& y, Index r, double t, double delta, double lambda,
                          double epsilon);

struct BoundSweepEntry {
    double t = 0.0;
    Index order = 0;
    double delta_hat = 0.0;
    double threshold = 0.0;
    std::optional<BoundReport> report; // present when delta_hat < threshold
};

struct BoundSweep {
    std::vector<BoundSweepEntry> entries;
    // Index into entries of the satisfied report with the smallest rhs_fro.
    std::optional<std::size_t> tightest;
};

/// For every t in t_grid, estimates the RIC of order ceil(t r) and, where it
/// is below the threshold, verifies the bounds with that estimate. Choosing
/// the tightest t is a tool convention.
BoundSweep sweep_bounds(const Tensor3& x_true, const Tensor3& x_hat, const LinearMap& map,
                        const Eigen::VectorXd& y, Index r, double lambda, double epsilon,
                        const std::vector<double>& t_grid, int trials, std::uint64_t seed);

} // namespace tubal
