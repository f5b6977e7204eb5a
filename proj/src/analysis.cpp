#include "tubal/analysis.hpp"

#include "tubal/errors.hpp"
#include "tubal/random.hpp"
#include "tubal/t_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tubal {

namespace {

void check_t(double t) {
    if (!(t > 1.0) || !std::isfinite(t)) throw DimensionError("oversampling factor t must be finite and > 1");
}

void check_common(double delta, double t, Index r, Index n3, double lambda) {
    check_t(t);
    if (n3 < 1) throw DimensionError("n3 must be >= 1");
    if (r < 1) throw DimensionError("r must be >= 1 (the bounds divide by sqrt(r))");
    if (!(delta >= 0.0) || !(delta < 1.0)) throw DimensionError("delta must lie in [0, 1)");
    if (!(lambda > 0.0)) throw DimensionError("lambda must be positive");
    const double thr = ric_threshold(t, n3);
    if (delta >= thr) {
        std::ostringstream os;
        os << "t-RIC condition fails: delta = " << delta << " >= threshold " << thr << " (t = " << t
           << ", n3 = " << n3 << ")";
        throw ConditionError("ric_threshold", os.str());
    }
}

} // namespace

double ric_threshold(double t, Index n3) {
    check_t(t);
    if (n3 < 1) throw DimensionError("n3 must be >= 1");
    const double n3d = static_cast<double>(n3);
    return std::sqrt((t - 1.0) / (n3d * n3d + t - 1.0));
}

Index rip_order(double t, Index r, Index kappa) {
    check_t(t);
    if (r < 1) throw DimensionError("r must be >= 1");
    auto order = static_cast<Index>(std::ceil(t * static_cast<double>(r) - 1e-12));
    if (kappa > 0) order = std::min(order, kappa);
    return order;
}

EtaConstants eta_constants(double delta, double t, Index n3) {
    check_t(t);
    if (n3 < 1) throw DimensionError("n3 must be >= 1");
    if (!(delta >= 0.0) || !(delta < 1.0)) throw DimensionError("delta must lie in [0, 1)");
    EtaConstants e;
    e.eta1 = 2.0 / ((1.0 - delta) * std::sqrt(1.0 + delta));
    e.eta2 = std::sqrt(static_cast<double>(n3)) * delta / std::sqrt((1.0 - delta * delta) * (t - 1.0));
    return e;
}

BoundConstants theorem1_constants(double delta, double t, Index r, Index n3, double lambda, double epsilon) {
    check_common(delta, t, r, n3, lambda);
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw DimensionError("epsilon must be finite and >= 0");
    const auto [eta1, eta2] = eta_constants(delta, t, n3);
    const double rd = static_cast<double>(r);
    const double sr = std::sqrt(rd);
    const double sn3 = std::sqrt(static_cast<double>(n3));
    const double snr = std::sqrt(static_cast<double>(n3) * rd);

    BoundConstants c;
    c.c1 = 2.0 / (sr * eta1);
    c.c2 = 2.0 * sr * eta1 * lambda + 2.0 * epsilon;
    c.c3 = (2.0 * sr * eta1 * (2.0 * snr + 1.0 + eta2) * lambda + 2.0 * (snr + eta2) * epsilon) /
           (rd * eta1 * (1.0 - eta2) * lambda);
    c.c4 = ((snr + 1.0) * eta1 * lambda + (snr - sn3 * eta2 + sn3 + 1.0) * epsilon) * c.c2 /
           ((1.0 - eta2) * lambda);
    return c;
}

BoundConstants corollary_constants(double delta, double t, Index r, Index n3, double lambda) {
    check_common(delta, t, r, n3, lambda);
    const auto [eta1, eta2] = eta_constants(delta, t, n3);
    const double rd = static_cast<double>(r);
    const double sr = std::sqrt(rd);
    const double sn3 = std::sqrt(static_cast<double>(n3));
    const double snr = std::sqrt(static_cast<double>(n3) * rd);

    BoundConstants c;
    c.c1 = 2.0 / (sr * eta1);
    c.c2 = 2.0 * sr * eta1 + 1.0;
    c.c3 = (2.0 * sr * eta1 * (2.0 * snr + 1.0 + eta2) + snr + eta2) / (rd * eta1 * (1.0 - eta2));
    c.c4 = (2.0 * (snr + 1.0) * eta1 + snr - sn3 * eta2 + sn3 + 1.0) * c.c2 / (2.0 * (1.0 - eta2));
    return c;
}

RipEstimate estimate_ric(const LinearMap& map, Index r, int trials, std::uint64_t seed) {
    const Dims3 d = map.dims();
    if (r < 1 || r > std::min(d.n1, d.n2)) {
        throw DimensionError("estimate_ric: r = " + std::to_string(r) + " outside [1, min(n1, n2)]");
    }
    if (trials < 1) throw DimensionError("estimate_ric: trials must be >= 1");

    RipEstimate est;
    est.r = r;
    est.trials = trials;
    est.distortion_samples.reserve(static_cast<std::size_t>(trials));
    for (int i = 0; i < trials; ++i) {
        Tensor3 x(d);
        double worst = 0.0;
        for (Index q = 0; q < r; ++q) {
            GaussianSource g(derive_seed(seed, {static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(q)}),
                             Stream::probe);
            const Tensor3 col = g.tensor(d.n1, 1, d.n3);
            const Tensor3 row = g.tensor(1, d.n2, d.n3);
            x += tprod(col, row);
            const double nx = fro_norm(x);
            if (nx == 0.0) continue;
            const double nm = apply(map, x).norm() / nx;
            worst = std::max(worst, std::abs(nm * nm - 1.0));
        }
        est.distortion_samples.push_back(worst);
    }
    est.delta_hat = *std::max_element(est.distortion_samples.begin(), est.distortion_samples.end());
    return est;
}

BoundReport verify_bounds(const Tensor3& x_true, const Tensor3& x_hat, const LinearMap& map,
                          const Eigen::VectorXd& y, Index r, double t, double delta, double lambda,
                          double epsilon) {
    require_same_dims(x_true, x_hat, "verify_bounds");
    if (x_true.dims() != map.dims()) throw DimensionError("verify_bounds: tensor dims do not match the map");
    if (y.size() != map.m()) throw DimensionError("verify_bounds: y length does not match m");
    const Index n3 = x_true.n3();
    if (r > std::min(x_true.n1(), x_true.n2())) throw DimensionError("verify_bounds: r exceeds min(n1, n2)");

    const double noise = (y - apply(map, x_true)).norm();
    if (noise > epsilon * (1.0 + 1e-12) + 1e-300) {
        std::ostringstream os;
        os << "noise bound fails: ||y - M(x)||_2 = " << noise << " > epsilon = " << epsilon;
        throw ConditionError("noise_bound", os.str());
    }

    BoundReport rep;
    rep.t = t;
    rep.r = r;
    rep.n3 = n3;
    rep.delta = delta;
    rep.lambda = lambda;
    rep.epsilon = epsilon;
    rep.theorem = theorem1_constants(delta, t, r, n3, lambda, epsilon);
    rep.corollary = corollary_constants(delta, t, r, n3, lambda);
    const auto eta = eta_constants(delta, t, n3);
    rep.eta1 = eta.eta1;
    rep.eta2 = eta.eta2;

    rep.tail_tnn = tnn(truncate(x_true, r).tail);
    const Tensor3 err = x_hat - x_true;
    rep.lhs_meas = apply(map, err).norm();
    rep.rhs_meas = rep.theorem.c1 * rep.tail_tnn + rep.theorem.c2;
    rep.lhs_fro = fro_norm(err);
    rep.rhs_fro = rep.theorem.c3 * rep.tail_tnn + rep.theorem.c4;
    rep.meas_satisfied = rep.lhs_meas <= rep.rhs_meas;
    rep.fro_satisfied = rep.lhs_fro <= rep.rhs_fro;
    return rep;
}

BoundSweep sweep_bounds(const Tensor3& x_true, const Tensor3& x_hat, const LinearMap& map,
                        const Eigen::VectorXd& y, Index r, double lambda, double epsilon,
                        const std::vector<double>& t_grid, int trials, std::uint64_t seed) {
    const Index kappa = std::min(x_true.n1(), x_true.n2());
    BoundSweep out;
    for (double t : t_grid) {
        BoundSweepEntry e;
        e.t = t;
        e.order = rip_order(t, r, kappa);
        e.threshold = ric_threshold(t, x_true.n3());
        e.delta_hat = estimate_ric(map, e.order, trials, seed).delta_hat;
        if (e.delta_hat < e.threshold) {
            e.report = verify_bounds(x_true, x_hat, map, y, r, t, e.delta_hat, lambda, epsilon);
        }
        out.entries.push_back(std::move(e));
    }
    for (std::size_t i = 0; i < out.entries.size(); ++i) {
        const auto& rep = out.entries[i].report;
        if (!rep || !rep->satisfied()) continue;
        if (!out.tightest || rep->rhs_fro < out.entries[*out.tightest].report->rhs_fro) out.tightest = i;
    }
    return out;
}

} // namespace tubal
