#include "tubal/tensor.hpp"

#include "tubal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tubal {

Tensor3::Tensor3(Index n1, Index n2, Index n3) : dims_{n1, n2, n3} {
    if (n1 < 1 || n2 < 1 || n3 < 1) {
        std::ostringstream os;
        os << "tensor dims must be >= 1, got " << n1 << "x" << n2 << "x" << n3;
        throw DimensionError(os.str());
    }
    data_.assign(static_cast<std::size_t>(dims_.size()), 0.0);
}

Tensor3 Tensor3::from_data(Dims3 dims, std::vector<double> data) {
    Tensor3 t(dims);
    if (static_cast<Index>(data.size()) != dims.size()) {
        throw DimensionError("tensor data length " + std::to_string(data.size()) +
                             " does not match dims product " + std::to_string(dims.size()));
    }
    t.data_ = std::move(data);
    if (!t.all_finite()) throw DimensionError("tensor data contains non-finite entries");
    return t;
}

bool Tensor3::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Tensor3& Tensor3::operator+=(const Tensor3& other) {
    require_same_dims(*this, other, "operator+=");
    vec() += other.vec();
    return *this;
}

Tensor3& Tensor3::operator-=(const Tensor3& other) {
    require_same_dims(*this, other, "operator-=");
    vec() -= other.vec();
    return *this;
}

Tensor3& Tensor3::operator*=(double s) {
    vec() *= s;
    return *this;
}

Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
Tensor3 operator*(double s, Tensor3 a) { return a *= s; }
Tensor3 operator*(Tensor3 a, double s) { return a *= s; }

double inner(const Tensor3& a, const Tensor3& b) {
    require_same_dims(a, b, "inner");
    return a.vec().dot(b.vec());
}

double max_abs(const Tensor3& x) { return x.vec().cwiseAbs().maxCoeff(); }

void require_same_dims(const Tensor3& a, const Tensor3& b, const char* where) {
    if (a.dims() != b.dims()) {
        std::ostringstream os;
        os << where << ": dims mismatch " << a.n1() << "x" << a.n2() << "x" << a.n3() << " vs "
           << b.n1() << "x" << b.n2() << "x" << b.n3();
        throw DimensionError(os.str());
    }
}

FourierTensor3::FourierTensor3(Dims3 d) : dims(d) {
    slices.assign(static_cast<std::size_t>(d.n3), Eigen::MatrixXcd::Zero(d.n1, d.n2));
}

double FourierTensor3::symmetry_defect() const {
    double scale = 0.0;
    double defect = 0.0;
    const auto n3 = static_cast<Index>(slices.size());
    for (Index k = 0; k < n3; ++k) {
        const auto& a = slices[static_cast<std::size_t>(k)];
        const auto& b = slices[static_cast<std::size_t>((n3 - k) % n3)];
        scale = std::max(scale, a.norm());
        defect = std::max(defect, (a - b.conjugate()).norm());
    }
    return scale > 0.0 ? defect / scale : defect;
}

IndexSet::IndexSet(std::vector<Index> indices, Index kappa) : indices_(std::move(indices)), kappa_(kappa) {
    if (kappa < 0) throw DimensionError("IndexSet: kappa must be nonnegative");
    std::sort(indices_.begin(), indices_.end());
    if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
        throw DimensionError("IndexSet: duplicate index");
    }
    for (Index i : indices_) {
        if (i < 0 || i >= kappa) {
            throw DimensionError("IndexSet: index " + std::to_string(i) + " outside [0, " +
                                 std::to_string(kappa) + ")");
        }
    }
}

IndexSet IndexSet::range(Index first, Index last, Index kappa) {
    std::vector<Index> idx;
    for (Index i = first; i < last; ++i) idx.push_back(i);
    return {std::move(idx), kappa};
}

IndexSet IndexSet::complement() const {
    std::vector<Index> out;
    for (Index i = 0; i < kappa_; ++i) {
        if (!contains(i)) out.push_back(i);
    }
    return {std::move(out), kappa_};
}

bool IndexSet::contains(Index i) const {
    return std::binary_search(indices_.begin(), indices_.end(), i);
}

} // namespace tubal
