#pragma once

#include "tubal/tensor.hpp"

#include <Eigen/Dense>

#include <vector>

namespace tubal {

// Default relative cutoff for numerical ranks.
inline constexpr double kDefaultRankTol = 1e-8;

// --- Fourier domain -------------------------------------------------------

FourierTensor3 dft_mode3(const Tensor3& x);

// Throws NumericalError when the imaginary part of the inverse exceeds 1e-8
// relative to the real part, i.e. the input was not conjugate-symmetric.
Tensor3 idft_mode3(const FourierTensor3& xf);

// Number of Fourier slices that carry independent information:
// floor(n3/2) + 1. The remaining slices are conjugates of these.
inline Index independent_slices(Index n3) { return n3 / 2 + 1; }

// Fill slices [h, n3) from slices [1, h) by conjugate symmetry.
void complete_conjugate_half(FourierTensor3& xf);

// --- Matrix views ---------------------------------------------------------

Eigen::MatrixXd bcirc(const Tensor3& x);
Eigen::MatrixXcd bdiag(const FourierTensor3& xf);
Eigen::MatrixXd unfold(const Tensor3& x);
Tensor3 fold(const Eigen::MatrixXd& m, Index n3);

// --- t-product algebra ----------------------------------------------------

Tensor3 tprod(const Tensor3& a, const Tensor3& b);
Tensor3 conj_transpose(const Tensor3& x);
Tensor3 identity_tensor(Index n, Index n3);

bool is_orthogonal(const Tensor3& q, double tol);
bool is_fdiagonal(const Tensor3& s, double tol);

// --- t-SVD ----------------------------------------------------------------

struct TsvdFactors {
    Tensor3 u; // n1 x n1 x n3, orthogonal
    Tensor3 s; // n1 x n2 x n3, f-diagonal
    Tensor3 v; // n2 x n2 x n3, orthogonal

    // Diagonal of the first frontal slice of s.
    Eigen::VectorXd first_slice_diagonal() const;
};

/// SVD of one Fourier slice. Columns of u and v are paired with the
/// descending singular values; each column of u (and the matching column of
/// v) is rotated so its largest-magnitude entry is real and positive.
struct SliceSvd {
    Eigen::MatrixXcd u;
    Eigen::VectorXd s;
    Eigen::MatrixXcd v;
};

// SVDs of the independent Fourier slices 0..floor(n3/2). With full = false
// the factors are thin (kappa columns).
std::vector<SliceSvd> fourier_slice_svds(const FourierTensor3& xf, bool full);
std::vector<SliceSvd> fourier_slice_svds(const Tensor3& x, bool full);

// Singular values only, per independent Fourier slice.
std::vector<Eigen::VectorXd> fourier_singular_values(const Tensor3& x);

// Multiplicity of an independent slice in the full spectrum (1 or 2).
inline double slice_weight(Index k, Index n3) { return (k == 0 || 2 * k == n3) ? 1.0 : 2.0; }

TsvdFactors tsvd(const Tensor3& x);

Index tubal_rank(const Tensor3& x, double tol = kDefaultRankTol);

struct AverageRank {
    Index bdiag_rank = 0;
    Index n3 = 1;
    double value() const { return static_cast<double>(bdiag_rank) / static_cast<double>(n3); }
};
AverageRank average_rank(const Tensor3& x, double tol = kDefaultRankTol);

double tnn(const Tensor3& x);
double fro_norm(const Tensor3& x);

struct Truncation {
    Tensor3 head; // X_max(r)
    Tensor3 tail; // X - X_max(r)
};
// Best tubal-rank-r approximation; 0 <= r <= min(n1, n2).
Truncation truncate(const Tensor3& x, Index r);

// Sum over i in g of U(:,i,:) * S(i,i,:) * V(:,i,:)^*.
Tensor3 restrict(const Tensor3& x, const IndexSet& g);

} // namespace tubal
