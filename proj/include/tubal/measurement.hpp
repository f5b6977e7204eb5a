#pragma once

#include "tubal/tensor.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <optional>
#include <string>

namespace tubal {

enum class VarianceMode {
    unit,       // N(0, 1) entries
    one_over_m, // N(0, 1/m) entries
};

std::string to_string(VarianceMode mode);
VarianceMode variance_mode_from_string(const std::string& s);

struct GaussianProvenance {
    std::uint64_t seed = 0;
    VarianceMode variance_mode = VarianceMode::one_over_m;
};

/// Linear map from n1 x n2 x n3 tensors to R^m, stored as the dense matrix
/// acting on vec(X) (frontal-slice-major, column-major within a slice).
/// Immutable after construction.
class LinearMap {
public:
    LinearMap(Eigen::MatrixXd matrix, Dims3 dims, std::optional<GaussianProvenance> provenance = std::nullopt);

    Index m() const { return matrix_.rows(); }
    Index vec_size() const { return matrix_.cols(); }
    const Dims3& dims() const { return dims_; }
    const Eigen::MatrixXd& matrix() const { return matrix_; }
    const std::optional<GaussianProvenance>& provenance() const { return provenance_; }

private:
    Eigen::MatrixXd matrix_;
    Dims3 dims_;
    std::optional<GaussianProvenance> provenance_;
};

// Entries are drawn in column-major order of the matrix from the map stream
// of `seed`, so regenerating with the same arguments is bit-exact.
LinearMap gaussian_map(Index m, Dims3 dims, std::uint64_t seed, VarianceMode mode = VarianceMode::one_over_m);

Eigen::VectorXd apply(const LinearMap& map, const Tensor3& x);
Tensor3 adjoint_apply(const LinearMap& map, const Eigen::VectorXd& v);

struct NoisySample {
    Eigen::VectorXd y;
    double sigma = 0.0;
    std::uint64_t noise_seed = 0;
    double noise_norm = 0.0; // realized ||w||_2
};

NoisySample add_noise(const Eigen::VectorXd& y, double sigma, std::uint64_t noise_seed);

// Returned by snr_db when the reconstruction error is numerically zero.
inline constexpr double kSnrExact = std::numeric_limits<double>::infinity();

double snr_db(const Tensor3& x_true, const Tensor3& x_hat);

} // namespace tubal
