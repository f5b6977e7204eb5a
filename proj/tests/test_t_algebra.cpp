#include "support.hpp"

#include "tubal/errors.hpp"
#include "tubal/t_algebra.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace tubal;
using tubal::testing::random_dims;
using tubal::testing::random_tensor;
using tubal::testing::rel_err;

namespace {

// O(n3^2) DFT along mode 3, X_bar(:,:,k) = sum_l X(:,:,l) exp(-2 pi i k l / n3).
FourierTensor3 naive_dft(const Tensor3& x) {
    FourierTensor3 out(x.dims());
    const Index n3 = x.n3();
    for (Index k = 0; k < n3; ++k) {
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(x.n1(), x.n2());
        for (Index l = 0; l < n3; ++l) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(k * l) / static_cast<double>(n3);
            acc += std::polar(1.0, ang) * x.slice(l).cast<Complex>();
        }
        out.slices[static_cast<std::size_t>(k)] = acc;
    }
    return out;
}

// fold(bcirc(a) * unfold(b)).
Tensor3 bcirc_product(const Tensor3& a, const Tensor3& b) { return fold(bcirc(a) * unfold(b), a.n3()); }

Tensor3 tube(std::initializer_list<double> v) {
    return Tensor3::from_data(Dims3{1, 1, static_cast<Index>(v.size())}, std::vector<double>(v));
}

double nuclear(const Eigen::MatrixXcd& m) { return Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues().sum(); }

} // namespace

TEST_CASE("dft_mode3 matches the naive DFT") {
    const Tensor3 x = random_tensor(3, 4, 5, 11);
    const FourierTensor3 a = dft_mode3(x);
    const FourierTensor3 b = naive_dft(x);
    for (Index k = 0; k < 5; ++k) {
        CHECK((a.slices[k] - b.slices[k]).norm() <= 1e-12 * b.slices[k].norm() + 1e-14);
    }
}

TEST_CASE("dft_mode3 small cases") {
    const Tensor3 x = random_tensor(2, 3, 1, 3);
    CHECK((dft_mode3(x).slices[0] - x.slice(0).cast<Complex>()).norm() == 0.0);

    const FourierTensor3 f = dft_mode3(tube({1, 2}));
    CHECK(std::abs(f.slices[0](0, 0) - Complex(3, 0)) < 1e-15);
    CHECK(std::abs(f.slices[1](0, 0) - Complex(-1, 0)) < 1e-15);

    FourierTensor3 g(Dims3{1, 1, 2});
    g.slices[0](0, 0) = 3.0;
    g.slices[1](0, 0) = -1.0;
    const Tensor3 t = idft_mode3(g);
    CHECK(t(0, 0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(t(0, 0, 1) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("idft_mode3 inverts dft_mode3 and rejects non-symmetric input") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const Dims3 d = random_dims(100 + s, 6);
        const Tensor3 x = random_tensor(d.n1, d.n2, d.n3, s);
        CHECK(rel_err(idft_mode3(dft_mode3(x)), x) <= 1e-12);
    }
    const FourierTensor3 zero(Dims3{2, 3, 4});
    CHECK(max_abs(idft_mode3(zero)) == 0.0);

    FourierTensor3 bad(Dims3{1, 1, 3});
    bad.slices[1](0, 0) = Complex(1, 1);
    bad.slices[2](0, 0) = Complex(1, 1); // should be the conjugate
    CHECK_THROWS_AS(idft_mode3(bad), NumericalError);
}

TEST_CASE("conjugate symmetry of real tensors") {
    const Tensor3 x = random_tensor(3, 3, 6, 5);
    FourierTensor3 f = dft_mode3(x);
    CHECK(f.symmetry_defect() <= 1e-12);
    FourierTensor3 half = f;
    for (Index k = independent_slices(6); k < 6; ++k) half.slices[k].setZero();
    complete_conjugate_half(half);
    for (Index k = 0; k < 6; ++k) CHECK((half.slices[k] - f.slices[k]).norm() <= 1e-12);
}

TEST_CASE("bcirc layout") {
    const Tensor3 x = random_tensor(2, 3, 1, 1);
    CHECK(bcirc(x) == Eigen::MatrixXd(x.slice(0)));

    const Eigen::MatrixXd c = bcirc(tube({1, 2, 3}));
    Eigen::Matrix3d want;
    want << 1, 3, 2, 2, 1, 3, 3, 2, 1;
    CHECK(c == Eigen::MatrixXd(want));
}

TEST_CASE("unfold and fold") {
    const Tensor3 x = random_tensor(2, 3, 1, 2);
    CHECK(unfold(x) == Eigen::MatrixXd(x.slice(0)));

    const Tensor3 y = random_tensor(2, 2, 2, 3);
    const Eigen::MatrixXd u = unfold(y);
    REQUIRE(u.rows() == 4);
    CHECK(u.topRows(2) == Eigen::MatrixXd(y.slice(0)));
    CHECK(u.bottomRows(2) == Eigen::MatrixXd(y.slice(1)));

    const Tensor3 z = random_tensor(4, 3, 5, 4);
    CHECK(fold(unfold(z), 5) == z);
    CHECK_THROWS_AS(fold(Eigen::MatrixXd::Zero(5, 2), 2), DimensionError);
}

TEST_CASE("tprod") {
    const Tensor3 ab = tprod(tube({1, 2}), tube({3, 4}));
    CHECK(ab(0, 0, 0) == doctest::Approx(11.0).epsilon(1e-14));
    CHECK(ab(0, 0, 1) == doctest::Approx(10.0).epsilon(1e-14));

    const Tensor3 a = random_tensor(3, 4, 2, 7);
    const Tensor3 b = random_tensor(4, 5, 2, 8);
    CHECK(rel_err(tprod(a, b), bcirc_product(a, b)) <= 1e-10);

    const Tensor3 c = random_tensor(4, 3, 5, 9);
    CHECK(rel_err(tprod(c, identity_tensor(3, 5)), c) <= 1e-14);
    CHECK(rel_err(tprod(identity_tensor(4, 5), c), c) <= 1e-14);

    CHECK_THROWS_AS(tprod(random_tensor(2, 3, 2, 1), random_tensor(4, 2, 2, 1)), DimensionError);
    CHECK_THROWS_AS(tprod(random_tensor(2, 3, 2, 1), random_tensor(3, 2, 3, 1)), DimensionError);
}

TEST_CASE("tprod equals the bcirc oracle on random sizes") {
    for (std::uint64_t s = 0; s < 40; ++s) {
        const Dims3 d = random_dims(200 + s, 6);
        const Index n4 = static_cast<Index>(s % 6) + 1;
        const Tensor3 a = random_tensor(d.n1, d.n2, d.n3, 2 * s);
        const Tensor3 b = random_tensor(d.n2, n4, d.n3, 2 * s + 1);
        CHECK(rel_err(tprod(a, b), bcirc_product(a, b)) <= 1e-10);
    }
}

TEST_CASE("conj_transpose") {
    const Tensor3 m = random_tensor(2, 3, 1, 1);
    CHECK(conj_transpose(m).slice(0) == Eigen::MatrixXd(m.slice(0).transpose()));

    const Tensor3 x = random_tensor(3, 4, 5, 2);
    CHECK(conj_transpose(conj_transpose(x)) == x);

    const Tensor3 a = random_tensor(3, 4, 4, 3);
    const Tensor3 b = random_tensor(4, 2, 4, 4);
    CHECK(rel_err(conj_transpose(tprod(a, b)), tprod(conj_transpose(b), conj_transpose(a))) <= 1e-10);
}

TEST_CASE("identity_tensor") {
    CHECK(identity_tensor(3, 1).slice(0) == Eigen::MatrixXd(Eigen::MatrixXd::Identity(3, 3)));
    const FourierTensor3 f = dft_mode3(identity_tensor(3, 4));
    for (Index k = 0; k < 4; ++k) {
        CHECK((f.slices[k] - Eigen::MatrixXcd::Identity(3, 3)).norm() <= 1e-15);
    }
    CHECK(conj_transpose(identity_tensor(3, 4)) == identity_tensor(3, 4));
}

TEST_CASE("is_orthogonal and is_fdiagonal") {
    CHECK(is_orthogonal(identity_tensor(4, 3), 1e-12));
    CHECK_FALSE(is_orthogonal(2.0 * identity_tensor(4, 3), 1e-12));

    CHECK(is_fdiagonal(Tensor3(3, 4, 2), 0.0));
    Tensor3 s(3, 4, 2);
    s(0, 0, 0) = 1.0;
    s(1, 1, 1) = 2.0;
    CHECK(is_fdiagonal(s, 1e-12));
    s(2, 0, 1) = 1e-3;
    CHECK_FALSE(is_fdiagonal(s, 1e-6));
}

TEST_CASE("tsvd at n3 = 1 is the matrix SVD") {
    const Tensor3 x = random_tensor(5, 3, 1, 21);
    const TsvdFactors f = tsvd(x);
    const Eigen::VectorXd want = Eigen::JacobiSVD<Eigen::MatrixXd>(x.slice(0)).singularValues();
    const Eigen::VectorXd got = f.first_slice_diagonal();
    CHECK((got - want).norm() <= 1e-12 * want.norm());
    CHECK(rel_err(tprod(tprod(f.u, f.s), conj_transpose(f.v)), x) <= 1e-12);
}

TEST_CASE("tsvd contract") {
    const Tensor3 x = random_tensor(6, 5, 4, 22);
    const TsvdFactors f = tsvd(x);
    CHECK(f.u.dims() == Dims3{6, 6, 4});
    CHECK(f.s.dims() == Dims3{6, 5, 4});
    CHECK(f.v.dims() == Dims3{5, 5, 4});
    CHECK(rel_err(tprod(tprod(f.u, f.s), conj_transpose(f.v)), x) <= 1e-10);
    CHECK(is_orthogonal(f.u, 1e-8));
    CHECK(is_orthogonal(f.v, 1e-8));
    CHECK(is_fdiagonal(f.s, 1e-10 * fro_norm(x)));
    const Eigen::VectorXd d = f.first_slice_diagonal();
    for (Index i = 0; i < d.size(); ++i) {
        CHECK(d(i) >= 0.0);
        if (i > 0) CHECK(d(i) <= d(i - 1) + 1e-12);
    }
    // First-slice diagonal is the mean of the Fourier-slice spectra.
    const FourierTensor3 xf = dft_mode3(x);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(5);
    for (Index k = 0; k < 4; ++k) mean += Eigen::JacobiSVD<Eigen::MatrixXcd>(xf.slices[k]).singularValues();
    mean /= 4.0;
    CHECK((d - mean).norm() <= 1e-12 * mean.norm());
    CHECK(d.sum() == doctest::Approx(tnn(x)).epsilon(1e-10));
}

TEST_CASE("tsvd of the zero tensor") {
    const TsvdFactors f = tsvd(Tensor3(3, 2, 4));
    CHECK(max_abs(f.s) == 0.0);
    CHECK(f.u == identity_tensor(3, 4));
    CHECK(f.v == identity_tensor(2, 4));
}

TEST_CASE("tubal_rank") {
    CHECK(tubal_rank(Tensor3(3, 3, 3)) == 0);
    CHECK(tubal_rank(identity_tensor(4, 3)) == 4);
    for (Index r = 1; r <= 3; ++r) {
        const Tensor3 x = tprod(random_tensor(6, r, 5, 30 + r), random_tensor(r, 7, 5, 40 + r));
        CHECK(tubal_rank(x) == r);
        // Every Fourier slice has matrix rank r.
        const FourierTensor3 xf = dft_mode3(x);
        for (const auto& s : xf.slices) {
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(s);
            svd.setThreshold(1e-10);
            CHECK(svd.rank() == r);
        }
    }
}

TEST_CASE("average_rank") {
    CHECK(average_rank(Tensor3(2, 2, 2)).value() == 0.0);
    CHECK(average_rank(identity_tensor(2, 2)).value() == 2.0);
    const AverageRank ar = average_rank(identity_tensor(2, 2));
    CHECK(ar.bdiag_rank == 4);
    const Tensor3 x = tprod(random_tensor(5, 2, 4, 1), random_tensor(2, 5, 4, 2));
    CHECK(average_rank(x).value() <= 2.0);
}

TEST_CASE("tnn and fro_norm") {
    CHECK(tnn(Tensor3(3, 3, 2)) == 0.0);
    CHECK(tnn(identity_tensor(4, 3)) == doctest::Approx(4.0).epsilon(1e-13));
    CHECK(fro_norm(Tensor3(3, 3, 2)) == 0.0);
    Tensor3 ones(2, 2, 2);
    for (auto& v : ones.data()) v = 1.0;
    CHECK(fro_norm(ones) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-15));

    const Tensor3 x = random_tensor(4, 6, 5, 9);
    const Eigen::MatrixXcd bd = bdiag(dft_mode3(x));
    CHECK(tnn(x) == doctest::Approx(nuclear(bd) / 5.0).epsilon(1e-10));
}

TEST_CASE("truncate") {
    const Tensor3 x = random_tensor(4, 4, 3, 50);
    const Truncation full = truncate(x, 4);
    CHECK(rel_err(full.head, x) <= 1e-12);
    CHECK(max_abs(full.tail) <= 1e-12 * max_abs(x));
    const Truncation none = truncate(x, 0);
    CHECK(max_abs(none.head) == 0.0);
    CHECK(none.tail == x);
    CHECK_THROWS_AS(truncate(x, 5), DimensionError);
    CHECK_THROWS_AS(truncate(x, -1), DimensionError);

    const Truncation t1 = truncate(x, 1);
    CHECK(tubal_rank(t1.head) == 1);
    CHECK(rel_err(t1.head + t1.tail, x) <= 1e-14);
    const double best = fro_norm(t1.tail);
    for (std::uint64_t s = 0; s < 100; ++s) {
        // Competitors: random rank-1 directions, least-squares scaled.
        const Tensor3 c = tprod(random_tensor(4, 1, 3, 1000 + s), random_tensor(1, 4, 3, 2000 + s));
        const Tensor3 scaled = (inner(c, x) / inner(c, c)) * c;
        CHECK(fro_norm(x - scaled) >= best);
    }
}

TEST_CASE("restrict") {
    const Tensor3 x = random_tensor(5, 4, 3, 60);
    CHECK(rel_err(restrict(x, IndexSet::range(0, 4, 4)), x) <= 1e-12);
    CHECK(max_abs(restrict(x, IndexSet({}, 4))) == 0.0);
    CHECK(rel_err(restrict(x, IndexSet::range(0, 2, 4)), truncate(x, 2).head) <= 1e-12);
    CHECK_THROWS_AS(restrict(x, IndexSet({0}, 5)), DimensionError);

    const IndexSet g({1, 3}, 4);
    CHECK(fro_norm(restrict(x, g) + restrict(x, g.complement()) - x) <= 1e-10 * fro_norm(x));
}

TEST_CASE("IndexSet validation") {
    CHECK_THROWS_AS(IndexSet({0, 0}, 3), DimensionError);
    CHECK_THROWS_AS(IndexSet({3}, 3), DimensionError);
    CHECK_THROWS_AS(IndexSet({-1}, 3), DimensionError);
    const IndexSet g({2, 0}, 3);
    CHECK(g.indices() == std::vector<Index>{0, 2});
    CHECK(g.complement().indices() == std::vector<Index>{1});
    CHECK(g.contains(2));
    CHECK_FALSE(g.contains(1));
}

TEST_CASE("property: Fourier-domain norm and rank identities") {
    for (std::uint64_t s = 0; s < 30; ++s) {
        const Dims3 d = random_dims(300 + s, 6);
        const Index r = std::min(d.n1, d.n2) > 1 ? static_cast<Index>(s % 2) + 1 : 1;
        const Tensor3 x = s % 3 == 0 ? tprod(random_tensor(d.n1, r, d.n3, s), random_tensor(r, d.n2, d.n3, s + 1))
                                     : random_tensor(d.n1, d.n2, d.n3, s);
        const Eigen::MatrixXcd bd = bdiag(dft_mode3(x));
        const double n3 = static_cast<double>(d.n3);
        CHECK(fro_norm(x) == doctest::Approx(bd.norm() / std::sqrt(n3)).epsilon(1e-10));
        CHECK(tnn(x) == doctest::Approx(nuclear(bd) / n3).epsilon(1e-8));
        CHECK(average_rank(x).bdiag_rank <= d.n3 * tubal_rank(x));
    }
}

TEST_CASE("property: norms are seminorms") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const Tensor3 a = random_tensor(4, 3, 5, 400 + s);
        const Tensor3 b = random_tensor(4, 3, 5, 500 + s);
        const double alpha = -2.5 + 0.3 * static_cast<double>(s);
        CHECK(tnn(a + b) <= tnn(a) + tnn(b) + 1e-12);
        CHECK(fro_norm(a + b) <= fro_norm(a) + fro_norm(b) + 1e-12);
        CHECK(tnn(alpha * a) == doctest::Approx(std::abs(alpha) * tnn(a)).epsilon(1e-12));
        CHECK(fro_norm(alpha * a) == doctest::Approx(std::abs(alpha) * fro_norm(a)).epsilon(1e-12));
    }
}

TEST_CASE("tensor construction rejects bad input") {
    CHECK_THROWS_AS(Tensor3(0, 1, 1), DimensionError);
    CHECK_THROWS_AS(Tensor3::from_data(Dims3{1, 1, 2}, {1.0}), DimensionError);
    CHECK_THROWS_AS(Tensor3::from_data(Dims3{1, 1, 1}, {std::nan("")}), DimensionError);
}
