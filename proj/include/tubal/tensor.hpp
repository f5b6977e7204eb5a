#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace tubal {

using Index = Eigen::Index;
using Complex = std::complex<double>;

struct Dims3 {
    Index n1 = 1;
    Index n2 = 1;
    Index n3 = 1;

    Index size() const { return n1 * n2 * n3; }
    Index slice_size() const { return n1 * n2; }
    friend bool operator==(const Dims3&, const Dims3&) = default;
};

/// Real third-order tensor of shape n1 x n2 x n3.
///
/// Storage is frontal-slice-major and column-major inside a slice, so entry
/// (i, j, k) lives at k*n1*n2 + j*n1 + i. The same order defines vec(X) for
/// the measurement maps. Indices are zero-based.
class Tensor3 {
public:
    Tensor3() : Tensor3(1, 1, 1) {}
    Tensor3(Index n1, Index n2, Index n3);
    explicit Tensor3(Dims3 dims) : Tensor3(dims.n1, dims.n2, dims.n3) {}

    // Takes ownership of data; throws DimensionError on a size mismatch or a
    // non-finite entry.
    static Tensor3 from_data(Dims3 dims, std::vector<double> data);

    const Dims3& dims() const { return dims_; }
    Index n1() const { return dims_.n1; }
    Index n2() const { return dims_.n2; }
    Index n3() const { return dims_.n3; }
    Index size() const { return dims_.size(); }

    double& operator()(Index i, Index j, Index k) {
        return data_[static_cast<std::size_t>(k * dims_.slice_size() + j * dims_.n1 + i)];
    }
    double operator()(Index i, Index j, Index k) const {
        return data_[static_cast<std::size_t>(k * dims_.slice_size() + j * dims_.n1 + i)];
    }

    Eigen::Map<Eigen::MatrixXd> slice(Index k) {
        return {data_.data() + k * dims_.slice_size(), dims_.n1, dims_.n2};
    }
    Eigen::Map<const Eigen::MatrixXd> slice(Index k) const {
        return {data_.data() + k * dims_.slice_size(), dims_.n1, dims_.n2};
    }

    // vec(X) view in storage order.
    Eigen::Map<Eigen::VectorXd> vec() { return {data_.data(), size()}; }
    Eigen::Map<const Eigen::VectorXd> vec() const { return {data_.data(), size()}; }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    bool all_finite() const;

    Tensor3& operator+=(const Tensor3& other);
    Tensor3& operator-=(const Tensor3& other);
    Tensor3& operator*=(double s);

    friend bool operator==(const Tensor3&, const Tensor3&) = default;

private:
    Dims3 dims_;
    std::vector<double> data_;
};

Tensor3 operator+(Tensor3 a, const Tensor3& b);
Tensor3 operator-(Tensor3 a, const Tensor3& b);
Tensor3 operator*(double s, Tensor3 a);
Tensor3 operator*(Tensor3 a, double s);

// Frobenius inner product.
double inner(const Tensor3& a, const Tensor3& b);
// Entrywise max |x_ijk|.
double max_abs(const Tensor3& x);

void require_same_dims(const Tensor3& a, const Tensor3& b, const char* where);

/// Mode-3 DFT of a tensor: slice k holds the k-th DFT coefficient of every
/// tube. Slices are n1 x n2 complex matrices.
struct FourierTensor3 {
    Dims3 dims;
    std::vector<Eigen::MatrixXcd> slices;

    FourierTensor3() = default;
    explicit FourierTensor3(Dims3 d);

    // Relative deviation from slice k == conj(slice n3-k).
    double symmetry_defect() const;
};

/// Ordered set of distinct zero-based singular-tube indices in [0, kappa).
class IndexSet {
public:
    IndexSet() = default;
    IndexSet(std::vector<Index> indices, Index kappa);

    static IndexSet range(Index first, Index last, Index kappa);

    IndexSet complement() const;

    Index kappa() const { return kappa_; }
    const std::vector<Index>& indices() const { return indices_; }
    std::size_t size() const { return indices_.size(); }
    bool empty() const { return indices_.empty(); }
    bool contains(Index i) const;

private:
    std::vector<Index> indices_;
    Index kappa_ = 0;
};

} // namespace tubal
