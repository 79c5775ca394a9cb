#include "test_gen.hpp"
#include "uga/certify.hpp"
#include "uga/error.hpp"
#include "uga/graph_sparsify.hpp"

#include <gtest/gtest.h>

using namespace uga;

namespace {

SymMatrix diag(std::initializer_list<double> d)
{
    Matrix a(d.size(), d.size());
    std::size_t i = 0;
    for (double x : d) a(i, i) = x, ++i;
    return SymMatrix::from(a);
}

SymMatrix scaled(const SymMatrix& l, double c)
{
    SymMatrix out = l;
    out.scale(c);
    return out;
}

WeightedGraph complete(std::size_t n)
{
    std::vector<Edge> e;
    for (std::uint32_t u = 0; u < n; ++u)
        for (std::uint32_t v = u + 1; v < n; ++v) e.push_back({u, v, 1.0});
    return WeightedGraph::from_edges(n, e);
}

}  // namespace

TEST(CertifyIdentity, Examples)
{
    const Certificate id = certify_identity(SymMatrix::identity(3), 0.3);
    EXPECT_TRUE(id.passed);
    EXPECT_NEAR(id.lo, 1.0, 1e-15);
    EXPECT_NEAR(id.hi, 1.0, 1e-15);

    const Certificate low = certify_identity(diag({0.5, 1.0}), 0.2);
    EXPECT_FALSE(low.passed);
    EXPECT_EQ(low.reason, CertificateFailure::Spectrum);
    EXPECT_NEAR(low.target_lo, 0.64, 1e-15);

    EXPECT_TRUE(certify_identity(diag({0.7, 1.3}), 0.2).passed);
    EXPECT_NEAR(certify_identity(diag({0.7, 1.3}), 0.2).target_hi, 1.44, 1e-15);
}

TEST(CertifyIdentity, SlackIsOneEMinusNine)
{
    EXPECT_TRUE(certify_identity(diag({0.64 - 0.5e-9, 1.0}), 0.2).passed);
    EXPECT_FALSE(certify_identity(diag({0.64 - 2e-9, 1.0}), 0.2).passed);
}

TEST(CertifyIdentity, RejectsBadEpsilon)
{
    EXPECT_THROW(certify_identity(SymMatrix::identity(2), 1.0), InvalidInput);
}

TEST(CertifyGraph, SelfAndScaled)
{
    const SymMatrix lg = laplacian_dense(complete(5));
    const Certificate self = certify_graph(lg, lg, 0.1);
    EXPECT_TRUE(self.passed);
    EXPECT_NEAR(self.lo, 1.0, 1e-12);
    EXPECT_NEAR(self.hi, 1.0, 1e-12);
    EXPECT_EQ(self.nullspace_dim_g, 1u);

    const Certificate half = certify_graph(lg, scaled(lg, 0.5), 0.2);
    EXPECT_FALSE(half.passed);
    EXPECT_NEAR(half.lo, 0.5, 1e-12);
}

TEST(CertifyGraph, K4AgainstSparsifier)
{
    const auto g = complete(4);
    const Sparsifier sp = sparsify(g, 0.5);
    const Certificate c = certify_graph(laplacian_dense(g), sparsifier_laplacian(sp, 4), 0.5);
    EXPECT_EQ(c.passed, c.lo >= 0.25 - 1e-9 && c.hi <= 2.25 + 1e-9);
    EXPECT_TRUE(c.passed) << "lo " << c.lo << " hi " << c.hi;
}

TEST(CertifyGraph, NullspaceEscapeDetected)
{
    const SymMatrix lg = laplacian_dense(complete(4));
    SymMatrix lh = lg;
    for (std::size_t i = 0; i < 4; ++i) lh.add_sym(i, i, 1.0);  // no longer annihilates the ones vector
    const Certificate c = certify_graph(lg, lh, 0.9);
    EXPECT_FALSE(c.passed);
    EXPECT_EQ(c.reason, CertificateFailure::NullspaceEscape);
}

TEST(CertifyGraph, DisconnectedGraphNullspace)
{
    const auto g = WeightedGraph::from_edges(5, {{0, 1, 1.0}, {2, 3, 2.0}});
    const SymMatrix lg = laplacian_dense(g);
    const Certificate c = certify_graph(lg, lg, 0.5);
    EXPECT_TRUE(c.passed);
    EXPECT_EQ(c.nullspace_dim_g, 3u);
}

TEST(CertifyGraph, EmptySparsifierFails)
{
    const SymMatrix lg = laplacian_dense(complete(3));
    const Certificate c = certify_graph(lg, SymMatrix(3), 0.5);
    EXPECT_FALSE(c.passed);
    EXPECT_EQ(c.lo, 0.0);
    EXPECT_FALSE(c.kappa.has_value());
}

TEST(CertifyGraph, ScaleCovariance)
{
    std::mt19937_64 rng(31);
    for (int t = 0; t < 20; ++t) {
        const auto g = uga::testing::random_graph(6 + rng() % 20, 0.4, rng);
        const Sparsifier sp = sparsify(g, 0.6);
        const SymMatrix lg = laplacian_dense(g);
        const SymMatrix lh = sparsifier_laplacian(sp, g.n());
        const double c = std::uniform_real_distribution<double>(0.1, 5.0)(rng);
        const Certificate a = certify_graph(lg, lh, 0.6);
        const Certificate b = certify_graph(lg, scaled(lh, c), 0.6);
        EXPECT_NEAR(b.lo, c * a.lo, 1e-9 * std::max(1.0, std::abs(c * a.lo)));
        EXPECT_NEAR(b.hi, c * a.hi, 1e-9 * std::abs(c * a.hi));
    }
}

TEST(CertifyGraph, SelfPassesOnRandomLaplacians)
{
    std::mt19937_64 rng(32);
    for (int t = 0; t < 20; ++t) {
        const auto g = uga::testing::random_graph(2 + rng() % 25, 0.3, rng);
        const SymMatrix lg = laplacian_dense(g);
        EXPECT_TRUE(certify_graph(lg, lg, 0.01 + 0.98 * std::uniform_real_distribution<double>()(rng)).passed);
    }
}

TEST(CertificateCsv, RowLayout)
{
    const Certificate c = certify_identity(diag({0.5, 2.0}), 0.5);
    EXPECT_STREQ(Certificate::csv_header(), "passed,lo,hi,target_lo,target_hi,kappa");
    EXPECT_EQ(c.csv_row(), "1,0.5,2,0.25,2.25,4");
}

TEST(GrammianMinEig, Examples)
{
    EXPECT_NEAR(grammian_min_eig(WeightedGraph::from_edges(2, {{0, 1, 1.0}})), 4.0, 1e-14);
    EXPECT_NEAR(grammian_min_eig(WeightedGraph::from_edges(4, {{0, 1, 1.0}, {2, 3, 1.0}})), 4.0, 1e-14);
    EXPECT_GE(grammian_min_eig(complete(5)), 2.0 - 1e-9);
}

TEST(GrammianMinEig, AtLeastTwoOnRandomGraphs)
{
    std::mt19937_64 rng(33);
    for (int t = 0; t < 50; ++t) {
        const auto g = uga::testing::random_graph(2 + rng() % 11, 0.5, rng);
        EXPECT_GE(grammian_min_eig(g), 2.0 - 1e-9);
    }
}

TEST(GrammianMinEig, RefusesLargeGraphs)
{
    EXPECT_THROW(grammian_min_eig(WeightedGraph::from_edges(61, {{0, 1, 1.0}})), CapExceeded);
}

TEST(ResidualDiagnostics, Examples)
{
    // Single edge of weight 3: ||L_G||_F^2 = 36, Tr = 6.
    const ResidualReport ok = residual_diagnostics(6.0, 36.0, {36.0, 0.0});
    EXPECT_TRUE(ok.all_hold);
    ASSERT_EQ(ok.bound_holds.size(), 2u);
    EXPECT_DOUBLE_EQ(ok.bound[1], 36.0);

    const ResidualReport bad = residual_diagnostics(6.0, 36.0, {36.0, 20.0, 30.0});
    EXPECT_FALSE(bad.all_hold);
    EXPECT_TRUE(bad.bound_holds[1]);
    EXPECT_DOUBLE_EQ(bad.bound[2], 18.0);
    EXPECT_FALSE(bad.bound_holds[2]);
}

TEST(ResidualDiagnostics, SpectralRatio)
{
    const SymMatrix r = diag({1.0, 1.0, 0.0});
    const ResidualReport rep = residual_diagnostics(2.0, 2.0, {2.0}, &r);
    ASSERT_TRUE(rep.spectral_ratio.has_value());
    EXPECT_NEAR(*rep.spectral_ratio, 0.5, 1e-14);
}
