#include "tubal/measurement.hpp"

#include "tubal/errors.hpp"
#include "tubal/random.hpp"
#include "tubal/t_algebra.hpp"

#include <cmath>

namespace tubal {

std::string to_string(VarianceMode mode) {
    return mode == VarianceMode::unit ? "unit" : "one_over_m";
}

VarianceMode variance_mode_from_string(const std::string& s) {
    if (s == "unit") return VarianceMode::unit;
    if (s == "one_over_m") return VarianceMode::one_over_m;
    throw DimensionError("unknown variance mode '" + s + "' (expected unit or one_over_m)");
}

LinearMap::LinearMap(Eigen::MatrixXd matrix, Dims3 dims, std::optional<GaussianProvenance> provenance)
    : matrix_(std::move(matrix)), dims_(dims), provenance_(provenance) {
    if (dims.n1 < 1 || dims.n2 < 1 || dims.n3 < 1) throw DimensionError("LinearMap: dims must be >= 1");
    if (matrix_.rows() < 1) throw DimensionError("LinearMap: m must be >= 1");
    if (matrix_.cols() != dims.size()) {
        throw DimensionError("LinearMap: matrix has " + std::to_string(matrix_.cols()) + " columns, dims need " +
                             std::to_string(dims.size()));
    }
    if (!matrix_.allFinite()) throw DimensionError("LinearMap: matrix has non-finite entries");
}

LinearMap gaussian_map(Index m, Dims3 dims, std::uint64_t seed, VarianceMode mode) {
    if (m < 1) throw DimensionError("gaussian_map: m must be >= 1");
    if (dims.n1 < 1 || dims.n2 < 1 || dims.n3 < 1) throw DimensionError("gaussian_map: dims must be >= 1");
    const double scale = mode == VarianceMode::unit ? 1.0 : 1.0 / std::sqrt(static_cast<double>(m));
    GaussianSource g(seed, Stream::map);
    Eigen::MatrixXd a(m, dims.size());
    double* p = a.data();
    for (Index i = 0; i < a.size(); ++i) p[i] = scale * g();
    return LinearMap(std::move(a), dims, GaussianProvenance{seed, mode});
}

Eigen::VectorXd apply(const LinearMap& map, const Tensor3& x) {
    if (x.dims() != map.dims()) throw DimensionError("apply: tensor dims do not match the map");
    return map.matrix() * x.vec();
}

Tensor3 adjoint_apply(const LinearMap& map, const Eigen::VectorXd& v) {
    if (v.size() != map.m()) throw DimensionError("adjoint_apply: vector length does not match m");
    Tensor3 out(map.dims());
    out.vec().noalias() = map.matrix().transpose() * v;
    return out;
}

NoisySample add_noise(const Eigen::VectorXd& y, double sigma, std::uint64_t noise_seed) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DimensionError("add_noise: sigma must be finite and >= 0");
    NoisySample out{y, sigma, noise_seed, 0.0};
    if (sigma == 0.0) return out;
    GaussianSource g(noise_seed, Stream::noise);
    Eigen::VectorXd w(y.size());
    for (Index i = 0; i < w.size(); ++i) w(i) = sigma * g();
    out.y += w;
    out.noise_norm = w.norm();
    return out;
}

double snr_db(const Tensor3& x_true, const Tensor3& x_hat) {
    require_same_dims(x_true, x_hat, "snr_db");
    const double signal = fro_norm(x_true);
    if (signal == 0.0) throw DimensionError("snr_db: ground truth is the zero tensor");
    const double err = fro_norm(x_true - x_hat);
    if (err < 1e-300) return kSnrExact;
    return 20.0 * std::log10(signal / err);
}

} // namespace tubal
