#include <gtest/gtest.h>

#include "nttkit/dense.hpp"
#include "nttkit/random.hpp"
#include "oracles.hpp"

using namespace nttkit;

namespace {

DenseTensor counting_tensor() {
    // A(i,j,l) = i + 2(j-1) + 4(l-1) with 1-based indices
    DenseTensor a(Shape{2, 2, 2});
    for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 2; ++j)
            for (Index l = 0; l < 2; ++l) {
                const MultiIndex idx{i, j, l};
                a(idx) = static_cast<double>((i + 1) + 2 * j + 4 * l);
            }
    return a;
}

} // namespace

TEST(Unfold, IndexBookkeeping) {
    const DenseTensor a = counting_tensor();
    const Matrix m = unfold(a, 1);
    ASSERT_EQ(m.rows(), 2);
    ASSERT_EQ(m.cols(), 4);
    for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 2; ++j)
            for (Index l = 0; l < 2; ++l) {
                const MultiIndex idx{i, j, l};
                EXPECT_EQ(m(i, j + 2 * l), a(idx));
            }
}

TEST(Unfold, RankOneHasMatrixRankOne) {
    Rng rng(3);
    std::vector<Vector> f{gaussian_vector(3, rng, Field::Complex), gaussian_vector(4, rng, Field::Complex),
                          gaussian_vector(5, rng, Field::Complex)};
    const DenseTensor a = outer_product(f);
    for (Index k = 1; k <= 2; ++k) {
        Eigen::JacobiSVD<Matrix> svd(unfold(a, k));
        EXPECT_LT(svd.singularValues()[1], 1e-12 * svd.singularValues()[0]);
    }
}

TEST(Unfold, NormPreservedAndFoldRoundTrip) {
    Rng rng(5);
    const DenseTensor a = oracle::random_dense({3, 4, 5}, rng);
    for (Index k = 1; k <= 2; ++k) {
        const Matrix m = unfold(a, k);
        EXPECT_NEAR(m.norm(), a.norm(), 1e-12 * a.norm());
        EXPECT_EQ(fold(m, a.shape(), k).data(), a.data());
    }
    EXPECT_THROW(unfold(a, 0), ShapeError);
    EXPECT_THROW(unfold(a, 3), ShapeError);
}

TEST(ModeProduct, IdentityLeavesTensor) {
    Rng rng(7);
    const DenseTensor a = oracle::random_dense({2, 3, 2}, rng);
    for (Index k = 0; k < 3; ++k) EXPECT_EQ(mode_product(a, Matrix::Identity(a.dim(k), a.dim(k)), k).data(), a.data());
}

TEST(ModeProduct, RankOneFactor) {
    Rng rng(8);
    std::vector<Vector> f{gaussian_vector(2, rng, Field::Complex), gaussian_vector(3, rng, Field::Complex),
                          gaussian_vector(2, rng, Field::Complex)};
    const Matrix m = gaussian_matrix(4, 3, rng, Field::Complex);
    std::vector<Vector> g = f;
    g[1] = m * f[1];
    EXPECT_LT(oracle::rel(mode_product(outer_product(f), m, 1), outer_product(g)), 1e-13);
}

TEST(ModeProduct, MatchesTripleLoop) {
    Rng rng(9);
    const DenseTensor a = oracle::random_dense({2, 3, 2}, rng);
    const Matrix m = gaussian_matrix(3, 3, rng, Field::Complex);
    const DenseTensor b = mode_product(a, m, 1);
    for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 3; ++j)
            for (Index l = 0; l < 2; ++l) {
                cplx want = 0.0;
                for (Index q = 0; q < 3; ++q) {
                    const MultiIndex src{i, q, l};
                    want += m(j, q) * a(src);
                }
                const MultiIndex idx{i, j, l};
                EXPECT_LT(std::abs(b(idx) - want), 1e-13);
            }
    EXPECT_THROW(mode_product(a, Matrix::Identity(2, 2), 1), ShapeError);
}

TEST(Dense, LinearIndexRoundTrip) {
    const DenseTensor a(Shape{3, 4, 2});
    for (Index l = 0; l < a.size(); ++l) {
        const MultiIndex idx = a.multi_index(l);
        EXPECT_EQ(idx, oracle::unravel(l, a.shape()));
        EXPECT_EQ(a.linear_index(idx), l);
    }
}

TEST(Dense, SparseToDenseAccumulates) {
    SparseTensor s{{2, 2}, {{0, 1}, {1, 1}, {0, 1}}, Vector::Ones(3)};
    const DenseTensor d = s.to_dense();
    const MultiIndex a{0, 1}, b{1, 1}, c{0, 0};
    EXPECT_EQ(d(a), cplx(2.0));
    EXPECT_EQ(d(b), cplx(1.0));
    EXPECT_EQ(d(c), cplx(0.0));
    EXPECT_THROW(s.to_dense(3), SizeGuardError);
}

TEST(Dense, InnerIsConjugateLinearInFirst) {
    Rng rng(11);
    const DenseTensor a = oracle::random_dense({3, 3}, rng), b = oracle::random_dense({3, 3}, rng);
    const cplx s(0.3, -1.2);
    EXPECT_LT(std::abs(inner(s * a, b) - std::conj(s) * inner(a, b)), 1e-12);
    EXPECT_NEAR(inner(a, a).real(), a.norm() * a.norm(), 1e-12);
}
