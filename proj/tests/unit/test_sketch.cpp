#include "test_gen.hpp"
#include "uga/error.hpp"
#include "uga/generators.hpp"
#include "uga/sketch_lsq.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace uga;

namespace {

Matrix rows_of(std::initializer_list<std::initializer_list<double>> r)
{
    Matrix a(r.size(), r.begin()->size());
    std::size_t i = 0;
    for (const auto& row : r) {
        std::size_t j = 0;
        for (double x : row) a(i, j++) = x;
        ++i;
    }
    return a;
}

Sketch full_sketch(const Matrix& a, std::span<const double> b)
{
    Sketch sk;
    sk.a_tilde = a;
    sk.b_tilde.assign(b.begin(), b.end());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        sk.indices.push_back(i);
        sk.d.push_back(1.0);
    }
    return sk;
}

SymMatrix difference(const SymMatrix& a, const SymMatrix& b)
{
    return SymMatrix::from(subtract(a.matrix(), b.matrix()));
}

void expect_consistent(const Sketch& sk, const Matrix& a, const std::vector<double>& b)
{
    ASSERT_EQ(sk.indices.size(), sk.d.size());
    ASSERT_EQ(sk.a_tilde.rows(), sk.indices.size());
    ASSERT_EQ(sk.b_tilde.size(), sk.indices.size());
    for (std::size_t k = 0; k < sk.indices.size(); ++k) {
        ASSERT_GT(sk.d[k], 0.0);
        const double s = std::sqrt(sk.d[k]);
        for (std::size_t j = 0; j < a.cols(); ++j)
            EXPECT_NEAR(sk.a_tilde(k, j), s * a(sk.indices[k], j), 1e-12 * std::max(1.0, std::abs(s * a(sk.indices[k], j))));
        EXPECT_EQ(sk.b_tilde[k], b[sk.indices[k]]);
    }
}

}  // namespace

TEST(BuildSketch, IdentityStackedTwice)
{
    const std::size_t n = 4;
    Matrix a(2 * n, n);
    for (std::size_t i = 0; i < n; ++i) a(i, i) = a(n + i, i) = 1.0;
    const std::vector<double> b{1, 2, 3, 4, 5, 6, 7, 8};
    const Sketch sk = build_sketch(a, b, 0.2);
    expect_consistent(sk, a, b);
    EXPECT_TRUE(sk.certified);
    const SymMatrix bm = gram(a);
    const SymMatrix g = gram(sk.a_tilde);
    for (std::size_t i = 0; i < n; ++i) {
        EXPECT_GE(g(i, i), (1.0 - 0.2) * bm(i, i) - 1e-9);
        EXPECT_LE(g(i, i), (1.0 + 0.2) * bm(i, i) + 1e-9);
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) EXPECT_NEAR(g(i, j), 0.0, 1e-12);
    }
}

TEST(BuildSketch, SquareInvertibleReproducesGram)
{
    std::mt19937_64 rng(50);
    const Matrix a = uga::testing::gaussian_matrix(6, 6, rng);
    const std::vector<double> b(6, 1.0);
    const Sketch sk = build_sketch(a, b, 0.5);
    const SymMatrix bm = gram(a);
    EXPECT_LE(frobenius_norm(difference(bm, gram(sk.a_tilde)).matrix()), 1e-10 * frobenius_norm(bm.matrix()));
    EXPECT_TRUE(sk.certified);
}

TEST(BuildSketch, RejectsShortMatrix)
{
    const Matrix a(2, 3);
    EXPECT_THROW(build_sketch(a, std::vector<double>(2, 0.0), 0.5), InvalidInput);
}

TEST(BuildSketch, SparsityWithinBudget)
{
    for (std::uint64_t s = 0; s < 10; ++s) {
        const LsqInstance inst = gen_lsq_instance(300, 8, s);
        for (double eps : {0.3, 0.6, 0.9}) {
            const Sketch sk = build_sketch(inst.a, inst.b, eps);
            EXPECT_LE(sk.indices.size(), iteration_budget(8, eps));
            expect_consistent(sk, inst.a, inst.b);
        }
    }
}

TEST(BuildSketch, CertifiedSketchIsSpectrallyClose)
{
    std::mt19937_64 rng(51);
    std::size_t certified = 0;
    for (int t = 0; t < 30; ++t) {
        const std::size_t n = 2 + rng() % 20;
        const std::size_t m = n * n + 4 * n;
        const double eps = std::uniform_real_distribution<double>(0.15, 0.6)(rng);
        const LsqInstance inst = gen_lsq_instance(m, n, rng());
        const Sketch sk = build_sketch(inst.a, inst.b, eps);
        if (!sk.certified) continue;
        ++certified;
        const SymMatrix bm = gram(inst.a);
        const double lmax = sym_eig(bm).values.back();
        EXPECT_LE(spectral_norm(difference(bm, gram(sk.a_tilde))), eps * lmax * (1.0 + 1e-8)) << "n " << n << " eps " << eps;
    }
    EXPECT_GT(certified, 10u);
}

TEST(SolveSketchLs, ConsistentSystem)
{
    const Matrix a = rows_of({{2, 1}, {1, 3}, {0, 1}});
    const std::vector<double> y{0.5, -1.5};
    Sketch sk = full_sketch(a, matvec(a, y));
    const auto got = solve_sketch_ls(sk);
    EXPECT_NEAR(got[0], 0.5, 1e-10);
    EXPECT_NEAR(got[1], -1.5, 1e-10);
}

TEST(SolveSketchLs, ResidualOrthogonality)
{
    std::mt19937_64 rng(52);
    for (int t = 0; t < 20; ++t) {
        const std::size_t n = 1 + rng() % 10;
        const LsqInstance inst = gen_lsq_instance(n * 10, n, rng(), 1.0);
        const Sketch sk = build_sketch(inst.a, inst.b, 0.5);
        const auto y = solve_sketch_ls(sk);
        std::vector<double> r = matvec(sk.a_tilde, y);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= sk.b_tilde[i];
        EXPECT_LE(norm2(matvec_t(sk.a_tilde, r)), 1e-8 * frobenius_norm(sk.a_tilde) * norm2(sk.b_tilde));
    }
}

TEST(SolveSketchLs, RankDeficientThrows)
{
    const Matrix a = rows_of({{1, 2}, {2, 4}, {3, 6}});
    EXPECT_THROW(solve_sketch_ls(full_sketch(a, std::vector<double>{1, 2, 3})), RankDeficient);
}

TEST(SolveNew, PaddedDiagonalByHand)
{
    // A^T A = [2 1; 1 5], A^T b = (4, 7) -> z = (13, 10) / 9.
    const Matrix a = rows_of({{1, 0}, {0, 2}, {1, 1}});
    const std::vector<double> b{1, 2, 3};
    const auto z = solve_new(full_sketch(a, b), a, b);
    EXPECT_NEAR(z[0], 13.0 / 9.0, 1e-14);
    EXPECT_NEAR(z[1], 10.0 / 9.0, 1e-14);
}

TEST(SolveNew, FullSketchMatchesLeastSquares)
{
    for (std::uint64_t s = 0; s < 10; ++s) {
        const LsqInstance inst = gen_lsq_instance(200, 12, s);
        const auto x = HouseholderQr(inst.a).solve_least_squares(inst.b);
        const auto z = solve_new(full_sketch(inst.a, inst.b), inst.a, inst.b);
        EXPECT_LE(relative_error(x, z), 1e-9);
    }
}

TEST(SolveNew, SingularThrows)
{
    const Matrix a = rows_of({{1, 0}, {0, 1}, {1, 1}});
    const Sketch sk = full_sketch(rows_of({{1, 1}}), std::vector<double>{1});
    EXPECT_THROW(solve_new(sk, a, std::vector<double>{1, 1, 1}), NotPositiveDefinite);
}

TEST(ErrorBound, Examples)
{
    const SymMatrix b = gram(rows_of({{1, 0}, {0, 2}, {1, 1}}));
    const std::vector<double> rhs{4, 7};
    EXPECT_EQ(error_bound(b, b, rhs, rhs).value(), 0.0);

    const double delta = 0.3;
    SymMatrix shrunk = SymMatrix::identity(3);
    shrunk.scale(1.0 - delta);
    const std::vector<double> v{1, 2, 3};
    EXPECT_NEAR(error_bound(SymMatrix::identity(3), shrunk, v, v).value(), delta / (1.0 - delta), 1e-14);

    SymMatrix zero(3);
    EXPECT_FALSE(error_bound(SymMatrix::identity(3), zero, v, v).has_value());
}

TEST(ErrorBound, DominatesMeasuredError)
{
    std::mt19937_64 rng(53);
    std::size_t applicable = 0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 1 + rng() % 30;
        const std::size_t m = 3 * n + rng() % (n * n + 1);
        const double eps = std::uniform_real_distribution<double>(0.1, 0.9)(rng);
        const LsqInstance inst = gen_lsq_instance(m, n, rng(), 0.5);
        const Sketch sk = build_sketch(inst.a, inst.b, eps);
        const SymMatrix bm = gram(inst.a);
        const std::vector<double> atb = matvec_t(inst.a, inst.b);
        const auto bound = error_bound(bm, gram(sk.a_tilde), atb, atb);
        if (!bound) continue;
        ++applicable;
        const auto x = HouseholderQr(inst.a).solve_least_squares(inst.b);
        const auto z = solve_new(sk, inst.a, inst.b);
        EXPECT_LE(relative_error(x, z), *bound * (1.0 + 1e-8) + 1e-12) << "trial " << t;
    }
    EXPECT_GT(applicable, 20u);
}

TEST(RelativeError, Examples)
{
    const std::vector<double> x{3, 4};
    EXPECT_EQ(relative_error(x, x), 0.0);
    EXPECT_DOUBLE_EQ(relative_error(x, std::vector<double>{6, 8}), 1.0);
    EXPECT_DOUBLE_EQ(relative_error(x, std::vector<double>{3, 0}), 0.8);
    EXPECT_THROW(relative_error(std::vector<double>{0, 0}, x), InvalidInput);
}
