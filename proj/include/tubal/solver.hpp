#pragma once

#include "tubal/measurement.hpp"
#include "tubal/tensor.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <vector>

namespace tubal {

struct SolverConfig {
    double lambda = 1e-1;
    double rho0 = 1e-4;
    double rho_max = 1e10;
    double vartheta = 1.5; // penalty growth factor
    double varpi = 1e-8;   // stopping tolerance on the three sup-norm gaps
    int max_iters = 500;

    // Throws DimensionError when a field is out of range.
    void validate() const;
};

// Slow-continuation schedule (rho0 = lambda / 100, vartheta = 1.05, up to
// 5000 iterations). The defaults stop once rho is large, well before the
// RTNNM minimizer when lambda is small; this schedule reaches it.
SolverConfig continuation_config(double lambda);

struct AdmmState {
    Tensor3 x;
    Tensor3 z;
    Tensor3 k_mult;
    double rho = 0.0;
    int iter = 0;
};

struct SolveResult {
    Tensor3 x_hat;
    int iterations = 0;
    bool converged = false;
    // Per iteration: ||X_{k+1}-X_k||_inf, ||Z_{k+1}-Z_k||_inf, ||X_{k+1}-Z_{k+1}||_inf.
    std::vector<std::array<double, 3>> residual_history;
    // ||X_{k+1}||_* + ||y - M vec(X_{k+1})||^2 / (2 lambda).
    std::vector<double> objective_history;
    AdmmState final_state;
    // Input and threshold of the last X-update, kept for optimality checks.
    Tensor3 last_prox_center;
    double last_prox_tau = 0.0;
};

/// Tensor singular value thresholding: the minimizer of
/// tau * ||X||_* + 0.5 * ||X - y||_F^2. Each Fourier slice has its singular
/// values soft-thresholded by tau.
Tensor3 tsvt(const Tensor3& y, double tau);

struct ThresholdedTensor {
    Tensor3 x;
    double tnn = 0.0; // ||x||_*, available for free from the shrunk spectra
};
ThresholdedTensor tsvt_with_norm(const Tensor3& y, double tau);

/// Largest decrease of tau*||X||_* + 0.5*||X - y||^2 found by probing
/// `trials` random perturbations of x_out with norm rel_size * ||x_out||
/// (rel_size * ||y|| if x_out is zero). Values <= 0 mean no decrease.
double prox_optimality_check(const Tensor3& y, double tau, const Tensor3& x_out, int trials = 200,
                             double rel_size = 1e-3, std::uint64_t seed = 0x70726f78);

/// Applies (M^T M + rho I)^{-1} for any rho > 0 after one symmetric
/// eigendecomposition. With m < N the Woodbury form is used:
/// (M^T M + rho I)^{-1} = (1/rho) (I - M^T (M M^T + rho I)^{-1} M), and
/// M M^T = Q diag(g) Q^T is factored once, so changing rho costs nothing.
/// Otherwise M^T M itself is decomposed.
class NormalEquationSolver {
public:
    explicit NormalEquationSolver(const LinearMap& map);

    Eigen::VectorXd solve(const Eigen::VectorXd& rhs, double rho) const;

    bool uses_woodbury() const { return woodbury_; }

private:
    bool woodbury_ = true;
    Eigen::VectorXd eig_;   // eigenvalues of M M^T or M^T M
    Eigen::MatrixXd basis_; // Q^T M (m x N) for Woodbury, eigenvectors (N x N) otherwise
};

// Z-update: reshape((M^T M + rho I)^{-1} (M^T y + vec(K) + rho vec(X_next))).
Tensor3 z_update(const LinearMap& map, const Eigen::VectorXd& y, const Tensor3& k_mult, const Tensor3& x_next,
                 double rho);
Tensor3 z_update(const NormalEquationSolver& normal, const Eigen::VectorXd& mty, const Tensor3& k_mult,
                 const Tensor3& x_next, double rho);

double rtnnm_objective(const LinearMap& map, const Eigen::VectorXd& y, const Tensor3& x, double lambda);

/// ADMM for min ||X||_* + ||y - M vec(X)||^2 / (2 lambda), started from
/// X = Z = K = 0. Throws NumericalError if an iterate becomes non-finite.
SolveResult admm_solve(const LinearMap& map, const Eigen::VectorXd& y, const SolverConfig& config);

} // namespace tubal
