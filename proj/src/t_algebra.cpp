#include "tubal/t_algebra.hpp"

#include "tubal/errors.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tubal {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kImagTolerance = 1e-8;

// Rotate column `col` of `a` (and the same column of `b`, when given) so the
// largest-magnitude entry of a(:, col) becomes real and positive.
void fix_phase(MatrixXcd& a, Index col, MatrixXcd* b) {
    Index best = 0;
    double best_abs = -1.0;
    for (Index i = 0; i < a.rows(); ++i) {
        const double v = std::abs(a(i, col));
        if (v > best_abs) {
            best_abs = v;
            best = i;
        }
    }
    if (best_abs <= 0.0) return;
    const Complex rot = std::conj(a(best, col)) / best_abs;
    a.col(col) *= rot;
    if (b != nullptr) b->col(col) *= rot;
    a(best, col) = Complex(a(best, col).real(), 0.0);
}

SliceSvd slice_svd(const MatrixXcd& m, bool real_slice, bool full) {
    const unsigned opts = full ? (Eigen::ComputeFullU | Eigen::ComputeFullV)
                               : (Eigen::ComputeThinU | Eigen::ComputeThinV);
    SliceSvd out;
    if (real_slice) {
        Eigen::JacobiSVD<MatrixXd> svd(m.real(), opts);
        if (svd.info() != Eigen::Success) throw NumericalError("slice SVD failed to converge");
        out.u = svd.matrixU().cast<Complex>();
        out.s = svd.singularValues();
        out.v = svd.matrixV().cast<Complex>();
    } else {
        Eigen::JacobiSVD<MatrixXcd> svd(m, opts);
        if (svd.info() != Eigen::Success) throw NumericalError("slice SVD failed to converge");
        out.u = svd.matrixU();
        out.s = svd.singularValues();
        out.v = svd.matrixV();
    }
    if (!out.s.allFinite()) throw NumericalError("slice SVD produced non-finite singular values");

    const Index kappa = out.s.size();
    for (Index i = 0; i < kappa; ++i) fix_phase(out.u, i, &out.v);
    for (Index i = kappa; i < out.u.cols(); ++i) fix_phase(out.u, i, nullptr);
    for (Index i = kappa; i < out.v.cols(); ++i) fix_phase(out.v, i, nullptr);
    return out;
}

bool is_real_slice(Index k, Index n3) { return k == 0 || 2 * k == n3; }

} // namespace

FourierTensor3 dft_mode3(const Tensor3& x) {
    const Dims3 d = x.dims();
    FourierTensor3 out(d);
    if (d.n3 == 1) {
        out.slices[0] = x.slice(0).cast<Complex>();
        return out;
    }
    Eigen::FFT<double> fft;
    std::vector<double> tube(static_cast<std::size_t>(d.n3));
    std::vector<Complex> spec;
    for (Index j = 0; j < d.n2; ++j) {
        for (Index i = 0; i < d.n1; ++i) {
            for (Index k = 0; k < d.n3; ++k) tube[static_cast<std::size_t>(k)] = x(i, j, k);
            fft.fwd(spec, tube);
            for (Index k = 0; k < d.n3; ++k) out.slices[static_cast<std::size_t>(k)](i, j) = spec[static_cast<std::size_t>(k)];
        }
    }
    return out;
}

Tensor3 idft_mode3(const FourierTensor3& xf) {
    const Dims3 d = xf.dims;
    if (static_cast<Index>(xf.slices.size()) != d.n3) throw DimensionError("idft_mode3: slice count != n3");
    for (const auto& s : xf.slices) {
        if (s.rows() != d.n1 || s.cols() != d.n2) throw DimensionError("idft_mode3: slice shape mismatch");
    }
    Tensor3 out(d);
    double max_real = 0.0;
    double max_imag = 0.0;
    if (d.n3 == 1) {
        out.slice(0) = xf.slices[0].real();
        max_real = xf.slices[0].real().cwiseAbs().maxCoeff();
        max_imag = xf.slices[0].imag().cwiseAbs().maxCoeff();
    } else {
        Eigen::FFT<double> fft;
        std::vector<Complex> spec(static_cast<std::size_t>(d.n3));
        std::vector<Complex> tube;
        for (Index j = 0; j < d.n2; ++j) {
            for (Index i = 0; i < d.n1; ++i) {
                for (Index k = 0; k < d.n3; ++k) spec[static_cast<std::size_t>(k)] = xf.slices[static_cast<std::size_t>(k)](i, j);
                fft.inv(tube, spec);
                for (Index k = 0; k < d.n3; ++k) {
                    const Complex v = tube[static_cast<std::size_t>(k)];
                    out(i, j, k) = v.real();
                    max_real = std::max(max_real, std::abs(v.real()));
                    max_imag = std::max(max_imag, std::abs(v.imag()));
                }
            }
        }
    }
    if (!out.all_finite()) throw NumericalError("idft_mode3: non-finite result");
    if (max_imag > kImagTolerance * std::max(max_real, 1e-300) && max_imag > 1e-300) {
        std::ostringstream os;
        os << "idft_mode3: Fourier tensor is not conjugate-symmetric (imaginary residual " << max_imag
           << " vs real scale " << max_real << ")";
        throw NumericalError(os.str());
    }
    return out;
}

void complete_conjugate_half(FourierTensor3& xf) {
    const Index n3 = xf.dims.n3;
    for (Index k = independent_slices(n3); k < n3; ++k) {
        xf.slices[static_cast<std::size_t>(k)] = xf.slices[static_cast<std::size_t>(n3 - k)].conjugate();
    }
}

MatrixXd bcirc(const Tensor3& x) {
    const Dims3 d = x.dims();
    MatrixXd m(d.n1 * d.n3, d.n2 * d.n3);
    for (Index p = 0; p < d.n3; ++p) {
        for (Index q = 0; q < d.n3; ++q) {
            const Index k = ((p - q) % d.n3 + d.n3) % d.n3;
            m.block(p * d.n1, q * d.n2, d.n1, d.n2) = x.slice(k);
        }
    }
    return m;
}

MatrixXcd bdiag(const FourierTensor3& xf) {
    const Dims3 d = xf.dims;
    MatrixXcd m = MatrixXcd::Zero(d.n1 * d.n3, d.n2 * d.n3);
    for (Index k = 0; k < d.n3; ++k) m.block(k * d.n1, k * d.n2, d.n1, d.n2) = xf.slices[static_cast<std::size_t>(k)];
    return m;
}

MatrixXd unfold(const Tensor3& x) {
    const Dims3 d = x.dims();
    MatrixXd m(d.n1 * d.n3, d.n2);
    for (Index k = 0; k < d.n3; ++k) m.middleRows(k * d.n1, d.n1) = x.slice(k);
    return m;
}

Tensor3 fold(const MatrixXd& m, Index n3) {
    if (n3 < 1 || m.rows() % n3 != 0 || m.rows() == 0 || m.cols() == 0) {
        std::ostringstream os;
        os << "fold: a " << m.rows() << "x" << m.cols() << " matrix cannot be folded with n3 = " << n3;
        throw DimensionError(os.str());
    }
    Tensor3 x(m.rows() / n3, m.cols(), n3);
    for (Index k = 0; k < n3; ++k) x.slice(k) = m.middleRows(k * x.n1(), x.n1());
    return x;
}

Tensor3 tprod(const Tensor3& a, const Tensor3& b) {
    if (a.n2() != b.n1() || a.n3() != b.n3()) {
        std::ostringstream os;
        os << "tprod: cannot multiply " << a.n1() << "x" << a.n2() << "x" << a.n3() << " by " << b.n1() << "x"
           << b.n2() << "x" << b.n3();
        throw DimensionError(os.str());
    }
    const Index n3 = a.n3();
    if (n3 == 1) {
        Tensor3 c(a.n1(), b.n2(), 1);
        c.slice(0).noalias() = a.slice(0) * b.slice(0);
        return c;
    }
    const FourierTensor3 af = dft_mode3(a);
    const FourierTensor3 bf = dft_mode3(b);
    FourierTensor3 cf(Dims3{a.n1(), b.n2(), n3});
    for (Index k = 0; k < independent_slices(n3); ++k) {
        const auto ks = static_cast<std::size_t>(k);
        cf.slices[ks].noalias() = af.slices[ks] * bf.slices[ks];
    }
    complete_conjugate_half(cf);
    return idft_mode3(cf);
}

Tensor3 conj_transpose(const Tensor3& x) {
    const Dims3 d = x.dims();
    Tensor3 out(d.n2, d.n1, d.n3);
    out.slice(0) = x.slice(0).transpose();
    for (Index k = 1; k < d.n3; ++k) out.slice(k) = x.slice(d.n3 - k).transpose();
    return out;
}

Tensor3 identity_tensor(Index n, Index n3) {
    Tensor3 id(n, n, n3);
    id.slice(0).setIdentity();
    return id;
}

bool is_orthogonal(const Tensor3& q, double tol) {
    if (q.n1() != q.n2()) return false;
    const Tensor3 id = identity_tensor(q.n1(), q.n3());
    const Tensor3 qt = conj_transpose(q);
    return fro_norm(tprod(qt, q) - id) <= tol && fro_norm(tprod(q, qt) - id) <= tol;
}

bool is_fdiagonal(const Tensor3& s, double tol) {
    for (Index k = 0; k < s.n3(); ++k) {
        for (Index j = 0; j < s.n2(); ++j) {
            for (Index i = 0; i < s.n1(); ++i) {
                if (i != j && std::abs(s(i, j, k)) > tol) return false;
            }
        }
    }
    return true;
}

VectorXd TsvdFactors::first_slice_diagonal() const {
    const Index kappa = std::min(s.n1(), s.n2());
    VectorXd d(kappa);
    for (Index i = 0; i < kappa; ++i) d(i) = s(i, i, 0);
    return d;
}

std::vector<SliceSvd> fourier_slice_svds(const FourierTensor3& xf, bool full) {
    const Index h = independent_slices(xf.dims.n3);
    std::vector<SliceSvd> out;
    out.reserve(static_cast<std::size_t>(h));
    for (Index k = 0; k < h; ++k) {
        out.push_back(slice_svd(xf.slices[static_cast<std::size_t>(k)], is_real_slice(k, xf.dims.n3), full));
    }
    return out;
}

std::vector<SliceSvd> fourier_slice_svds(const Tensor3& x, bool full) {
    return fourier_slice_svds(dft_mode3(x), full);
}

std::vector<VectorXd> fourier_singular_values(const Tensor3& x) {
    const FourierTensor3 xf = dft_mode3(x);
    const Index h = independent_slices(x.n3());
    std::vector<VectorXd> out;
    out.reserve(static_cast<std::size_t>(h));
    for (Index k = 0; k < h; ++k) {
        const auto& m = xf.slices[static_cast<std::size_t>(k)];
        VectorXd s = is_real_slice(k, x.n3()) ? VectorXd(Eigen::JacobiSVD<MatrixXd>(m.real()).singularValues())
                                               : VectorXd(Eigen::JacobiSVD<MatrixXcd>(m).singularValues());
        if (!s.allFinite()) throw NumericalError("slice SVD produced non-finite singular values");
        out.push_back(std::move(s));
    }
    return out;
}

TsvdFactors tsvd(const Tensor3& x) {
    const Dims3 d = x.dims();
    if (max_abs(x) == 0.0) {
        return {identity_tensor(d.n1, d.n3), Tensor3(d), identity_tensor(d.n2, d.n3)};
    }
    const auto svds = fourier_slice_svds(x, true);
    FourierTensor3 uf(Dims3{d.n1, d.n1, d.n3});
    FourierTensor3 sf(d);
    FourierTensor3 vf(Dims3{d.n2, d.n2, d.n3});
    for (std::size_t k = 0; k < svds.size(); ++k) {
        uf.slices[k] = svds[k].u;
        vf.slices[k] = svds[k].v;
        for (Index i = 0; i < svds[k].s.size(); ++i) sf.slices[k](i, i) = svds[k].s(i);
    }
    complete_conjugate_half(uf);
    complete_conjugate_half(sf);
    complete_conjugate_half(vf);
    return {idft_mode3(uf), idft_mode3(sf), idft_mode3(vf)};
}

namespace {

// S(i,i,1) for every i: the mean over all Fourier slices of the i-th
// singular value.
VectorXd first_slice_singular_values(const std::vector<VectorXd>& sv, Index n3) {
    VectorXd acc = VectorXd::Zero(sv.front().size());
    for (std::size_t k = 0; k < sv.size(); ++k) acc += slice_weight(static_cast<Index>(k), n3) * sv[k];
    return acc / static_cast<double>(n3);
}

} // namespace

Index tubal_rank(const Tensor3& x, double tol) {
    const VectorXd s = first_slice_singular_values(fourier_singular_values(x), x.n3());
    if (s.size() == 0 || s(0) <= 0.0) return 0;
    const double cut = tol * s(0);
    return static_cast<Index>((s.array() > cut).count());
}

AverageRank average_rank(const Tensor3& x, double tol) {
    const auto sv = fourier_singular_values(x);
    double smax = 0.0;
    for (const auto& s : sv) {
        if (s.size() > 0) smax = std::max(smax, s.maxCoeff());
    }
    AverageRank out{0, x.n3()};
    if (smax <= 0.0) return out;
    const double cut = tol * smax;
    for (std::size_t k = 0; k < sv.size(); ++k) {
        const auto r = static_cast<Index>((sv[k].array() > cut).count());
        out.bdiag_rank += static_cast<Index>(slice_weight(static_cast<Index>(k), x.n3())) * r;
    }
    return out;
}

double tnn(const Tensor3& x) {
    return first_slice_singular_values(fourier_singular_values(x), x.n3()).sum();
}

double fro_norm(const Tensor3& x) { return x.vec().norm(); }

Tensor3 restrict(const Tensor3& x, const IndexSet& g) {
    const Index kappa = std::min(x.n1(), x.n2());
    if (g.kappa() != kappa) {
        throw DimensionError("restrict: index set built for kappa = " + std::to_string(g.kappa()) +
                             ", tensor has kappa = " + std::to_string(kappa));
    }
    const Dims3 d = x.dims();
    if (g.empty()) return Tensor3(d);
    const auto svds = fourier_slice_svds(x, false);
    FourierTensor3 out(d);
    for (std::size_t k = 0; k < svds.size(); ++k) {
        auto& slice = out.slices[k];
        for (Index i : g.indices()) {
            slice.noalias() += svds[k].s(i) * svds[k].u.col(i) * svds[k].v.col(i).adjoint();
        }
    }
    complete_conjugate_half(out);
    return idft_mode3(out);
}

Truncation truncate(const Tensor3& x, Index r) {
    const Index kappa = std::min(x.n1(), x.n2());
    if (r < 0 || r > kappa) {
        throw DimensionError("truncate: r = " + std::to_string(r) + " outside [0, " + std::to_string(kappa) + "]");
    }
    Tensor3 head = restrict(x, IndexSet::range(0, r, kappa));
    Tensor3 tail = x - head;
    return {std::move(head), std::move(tail)};
}

} // namespace tubal
