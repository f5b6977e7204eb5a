#include "tubal/solver.hpp"

#include "tubal/errors.hpp"
#include "tubal/random.hpp"
#include "tubal/t_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tubal {

void SolverConfig::validate() const {
    auto bad = [](const std::string& what) { throw DimensionError("SolverConfig: " + what); };
    if (!(lambda > 0.0) || !std::isfinite(lambda)) bad("lambda must be positive");
    if (!(rho0 > 0.0)) bad("rho0 must be positive");
    if (!(rho_max >= rho0)) bad("rho_max must be >= rho0");
    if (!(vartheta > 1.0)) bad("vartheta must be > 1");
    if (!(varpi > 0.0)) bad("varpi must be positive");
    if (max_iters < 1) bad("max_iters must be >= 1");
}

SolverConfig continuation_config(double lambda) {
    SolverConfig c;
    c.lambda = lambda;
    c.rho0 = lambda * 1e-2;
    c.vartheta = 1.05;
    c.max_iters = 5000;
    c.validate();
    return c;
}

ThresholdedTensor tsvt_with_norm(const Tensor3& y, double tau) {
    if (!(tau > 0.0)) throw DimensionError("tsvt: tau must be positive");
    const Dims3 d = y.dims();
    const auto svds = fourier_slice_svds(y, false);
    FourierTensor3 out(d);
    double nuclear = 0.0;
    for (std::size_t k = 0; k < svds.size(); ++k) {
        const auto& f = svds[k];
        const Eigen::VectorXd shrunk = (f.s.array() - tau).max(0.0).matrix();
        nuclear += slice_weight(static_cast<Index>(k), d.n3) * shrunk.sum();
        const Index keep = static_cast<Index>((shrunk.array() > 0.0).count());
        if (keep > 0) {
            out.slices[k].noalias() =
                f.u.leftCols(keep) * shrunk.head(keep).asDiagonal() * f.v.leftCols(keep).adjoint();
        }
    }
    complete_conjugate_half(out);
    return {idft_mode3(out), nuclear / static_cast<double>(d.n3)};
}

Tensor3 tsvt(const Tensor3& y, double tau) { return tsvt_with_norm(y, tau).x; }

double prox_optimality_check(const Tensor3& y, double tau, const Tensor3& x_out, int trials, double rel_size,
                             std::uint64_t seed) {
    require_same_dims(y, x_out, "prox_optimality_check");
    auto objective = [&](const Tensor3& x) {
        const double r = fro_norm(x - y);
        return tau * tnn(x) + 0.5 * r * r;
    };
    const double base = objective(x_out);
    double scale = fro_norm(x_out);
    if (scale == 0.0) scale = fro_norm(y);
    if (scale == 0.0) scale = 1.0;
    scale *= rel_size;

    GaussianSource g(seed, Stream::probe);
    double worst = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        Tensor3 dir = g.tensor(y.n1(), y.n2(), y.n3());
        dir *= scale / fro_norm(dir);
        worst = std::max(worst, base - objective(x_out + dir));
    }
    return worst;
}

NormalEquationSolver::NormalEquationSolver(const LinearMap& map) {
    const Eigen::MatrixXd& a = map.matrix();
    woodbury_ = a.rows() < a.cols();
    if (woodbury_) {
        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(a.rows(), a.rows());
        gram.selfadjointView<Eigen::Lower>().rankUpdate(a);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
        if (es.info() != Eigen::Success) throw NumericalError("NormalEquationSolver: Gram eigendecomposition failed");
        eig_ = es.eigenvalues().cwiseMax(0.0);
        basis_.noalias() = es.eigenvectors().transpose() * a;
    } else {
        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(a.cols(), a.cols());
        gram.selfadjointView<Eigen::Lower>().rankUpdate(a.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
        if (es.info() != Eigen::Success) throw NumericalError("NormalEquationSolver: Gram eigendecomposition failed");
        eig_ = es.eigenvalues().cwiseMax(0.0);
        basis_ = es.eigenvectors();
    }
}

Eigen::VectorXd NormalEquationSolver::solve(const Eigen::VectorXd& rhs, double rho) const {
    if (!(rho > 0.0)) throw DimensionError("NormalEquationSolver: rho must be positive");
    if (woodbury_) {
        Eigen::VectorXd proj = basis_ * rhs;
        proj.array() /= (eig_.array() + rho);
        Eigen::VectorXd out = rhs;
        out.noalias() -= basis_.transpose() * proj;
        return out / rho;
    }
    Eigen::VectorXd proj = basis_.transpose() * rhs;
    proj.array() /= (eig_.array() + rho);
    return basis_ * proj;
}

Tensor3 z_update(const NormalEquationSolver& normal, const Eigen::VectorXd& mty, const Tensor3& k_mult,
                 const Tensor3& x_next, double rho) {
    require_same_dims(k_mult, x_next, "z_update");
    if (mty.size() != x_next.size()) throw DimensionError("z_update: M^T y has the wrong length");
    Eigen::VectorXd rhs = mty + k_mult.vec() + rho * x_next.vec();
    Tensor3 z(x_next.dims());
    z.vec() = normal.solve(rhs, rho);
    return z;
}

Tensor3 z_update(const LinearMap& map, const Eigen::VectorXd& y, const Tensor3& k_mult, const Tensor3& x_next,
                 double rho) {
    if (y.size() != map.m()) throw DimensionError("z_update: y length does not match m");
    if (x_next.dims() != map.dims()) throw DimensionError("z_update: tensor dims do not match the map");
    const NormalEquationSolver normal(map);
    return z_update(normal, map.matrix().transpose() * y, k_mult, x_next, rho);
}

double rtnnm_objective(const LinearMap& map, const Eigen::VectorXd& y, const Tensor3& x, double lambda) {
    const double r = (y - apply(map, x)).norm();
    return tnn(x) + r * r / (2.0 * lambda);
}

SolveResult admm_solve(const LinearMap& map, const Eigen::VectorXd& y, const SolverConfig& config) {
    config.validate();
    if (y.size() != map.m()) throw DimensionError("admm_solve: y length does not match m");
    if (!y.allFinite()) throw DimensionError("admm_solve: y has non-finite entries");

    const Dims3 d = map.dims();
    const NormalEquationSolver normal(map);
    const Eigen::VectorXd mty = map.matrix().transpose() * y;

    SolveResult result;
    AdmmState s{Tensor3(d), Tensor3(d), Tensor3(d), config.rho0, 0};
    result.residual_history.reserve(static_cast<std::size_t>(config.max_iters));
    result.objective_history.reserve(static_cast<std::size_t>(config.max_iters));

    while (s.iter < config.max_iters) {
        Tensor3 center = s.z - s.k_mult * (1.0 / s.rho);
        const double tau = config.lambda / s.rho;
        ThresholdedTensor xt = tsvt_with_norm(center, tau);
        Tensor3 z_next = z_update(normal, mty, s.k_mult, xt.x, s.rho);
        Tensor3 k_next = s.k_mult + s.rho * (xt.x - z_next);

        if (!xt.x.all_finite() || !z_next.all_finite() || !k_next.all_finite()) {
            std::ostringstream os;
            os << "admm_solve: non-finite iterate at iteration " << s.iter + 1 << " (rho = " << s.rho << ")";
            throw NumericalError(os.str());
        }

        const std::array<double, 3> gaps{max_abs(xt.x - s.x), max_abs(z_next - s.z), max_abs(xt.x - z_next)};
        const double misfit = (y - map.matrix() * xt.x.vec()).norm();
        result.residual_history.push_back(gaps);
        result.objective_history.push_back(xt.tnn + misfit * misfit / (2.0 * config.lambda));
        result.last_prox_center = std::move(center);
        result.last_prox_tau = tau;

        s.x = std::move(xt.x);
        s.z = std::move(z_next);
        s.k_mult = std::move(k_next);
        s.rho = std::min(config.vartheta * s.rho, config.rho_max);
        ++s.iter;

        if (gaps[0] <= config.varpi && gaps[1] <= config.varpi && gaps[2] <= config.varpi) {
            result.converged = true;
            break;
        }
    }

    result.iterations = s.iter;
    result.x_hat = s.x;
    result.final_state = std::move(s);
    return result;
}

} // namespace tubal
