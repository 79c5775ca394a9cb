#include "test_gen.hpp"
#include "uga/cluster_eval.hpp"
#include "uga/error.hpp"
#include "uga/generators.hpp"
#include "uga/graph_sparsify.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

using namespace uga;

namespace {

ClusterAssignment assignment(std::vector<std::size_t> labels, std::size_t k) { return {std::move(labels), k}; }

}  // namespace

TEST(SpectralCluster, TwoCliques)
{
    const PlantedGraph pg = gen_sbm({12, 2, 1.0, 0.0, {}}, 1);
    const ClusterAssignment found = spectral_cluster(laplacian_dense(pg.graph), 2, 3);
    EXPECT_EQ(cluster_accuracy({pg.labels, 2}, found), 1.0);
}

TEST(SpectralCluster, WellSeparatedSbm)
{
    const PlantedGraph pg = gen_sbm({200, 2, 0.1, 0.005, {}}, 1);
    const double acc = cluster_accuracy({pg.labels, 2}, spectral_cluster(laplacian_dense(pg.graph), 2, 1));
    EXPECT_GT(acc, 0.9);
}

TEST(SpectralCluster, SingleCluster)
{
    const PlantedGraph pg = gen_sbm({20, 2, 0.5, 0.1, {}}, 2);
    const ClusterAssignment c = spectral_cluster(laplacian_dense(pg.graph), 1, 1);
    EXPECT_EQ(c.k, 1u);
    EXPECT_TRUE(std::all_of(c.labels.begin(), c.labels.end(), [](std::size_t l) { return l == 0; }));
}

TEST(SpectralCluster, RejectsBadK)
{
    const SymMatrix l = laplacian_dense(gen_sbm({6, 2, 1.0, 0.0, {}}, 1).graph);
    EXPECT_THROW(spectral_cluster(l, 7, 1), InvalidInput);
    EXPECT_THROW(spectral_cluster(l, 0, 1), InvalidInput);
}

TEST(SpectralCluster, IsolatedVertexTolerated)
{
    // Vertex 6 has no edges.
    const auto g = WeightedGraph::from_edges(7, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}, {3, 4, 1}, {4, 5, 1}, {3, 5, 1}});
    const ClusterAssignment c = spectral_cluster(laplacian_dense(g), 3, 1);
    EXPECT_EQ(cluster_accuracy({{0, 0, 0, 1, 1, 1, 2}, 3}, c), 1.0);
}

TEST(SpectralCluster, Deterministic)
{
    const PlantedGraph pg = gen_sbm({120, 3, 0.15, 0.03, {}}, 7);
    const SymMatrix l = laplacian_dense(pg.graph);
    EXPECT_EQ(spectral_cluster(l, 3, 9).labels, spectral_cluster(l, 3, 9).labels);
}

TEST(SpectralCluster, DisconnectedSbmExact)
{
    for (std::size_t k : {2u, 3u, 5u}) {
        const PlantedGraph pg = gen_sbm({20 * k, k, 0.5, 0.0, {}}, k);
        ASSERT_EQ(connected_components(pg.graph), k);
        EXPECT_EQ(cluster_accuracy({pg.labels, k}, spectral_cluster(laplacian_dense(pg.graph), k, 1)), 1.0);
    }
}

TEST(Kmeans, SeparatedBlobs)
{
    Matrix x(6, 1);
    const double v[] = {0.0, 0.1, 0.2, 10.0, 10.1, 10.2};
    for (std::size_t i = 0; i < 6; ++i) x(i, 0) = v[i];
    const ClusterAssignment c = kmeans(x, 2, 4);
    EXPECT_EQ(cluster_accuracy({{0, 0, 0, 1, 1, 1}, 2}, c), 1.0);
}

TEST(Kmeans, DuplicatePointsDoNotLeaveEmptyLabels)
{
    Matrix x(5, 2);  // all points identical
    const ClusterAssignment c = kmeans(x, 3, 1, 5, 10);
    for (std::size_t l : c.labels) EXPECT_LT(l, 3u);
}

TEST(ClusterAccuracy, Examples)
{
    const ClusterAssignment planted = assignment({0, 0, 1, 1}, 2);
    EXPECT_EQ(cluster_accuracy(planted, planted), 1.0);
    EXPECT_EQ(cluster_accuracy(planted, assignment({1, 1, 0, 0}, 2)), 1.0);
    EXPECT_DOUBLE_EQ(cluster_accuracy(planted, assignment({0, 1, 1, 1}, 2)), 0.75);
}

TEST(ClusterAccuracy, Rejections)
{
    EXPECT_THROW(cluster_accuracy(assignment({0, 1}, 2), assignment({0, 1, 1}, 2)), InvalidInput);
    EXPECT_THROW(cluster_accuracy(assignment({0, 1}, 2), assignment({0, 1}, 3)), InvalidInput);
    EXPECT_THROW(cluster_accuracy(assignment({0, 2}, 2), assignment({0, 1}, 2)), InvalidInput);
}

// Brute force over all k! relabelings of `found`.
static double oracle_accuracy(const ClusterAssignment& planted, const ClusterAssignment& found)
{
    const std::size_t k = planted.k;
    std::vector<double> size(k, 0.0);
    for (std::size_t l : planted.labels) size[l] += 1.0;
    std::vector<std::size_t> sigma(k);
    std::iota(sigma.begin(), sigma.end(), 0);
    double best = 0.0;
    do {
        std::vector<double> hit(k, 0.0);
        for (std::size_t i = 0; i < planted.labels.size(); ++i)
            if (sigma[planted.labels[i]] == found.labels[i]) hit[planted.labels[i]] += 1.0;
        double acc = 0.0;
        for (std::size_t c = 0; c < k; ++c)
            if (size[c] > 0.0) acc += hit[c] / size[c];
        best = std::max(best, acc / static_cast<double>(k));
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return best;
}

TEST(ClusterAccuracy, MatchesBruteForceAndIsPermutationInvariant)
{
    std::mt19937_64 rng(60);
    for (int t = 0; t < 200; ++t) {
        const std::size_t k = 1 + rng() % 6;
        const std::size_t n = k + rng() % 30;
        std::vector<std::size_t> p(n), f(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = i < k ? i : rng() % k;
        for (std::size_t i = 0; i < n; ++i) f[i] = rng() % k;
        const ClusterAssignment planted{p, k}, found{f, k};
        const double acc = cluster_accuracy(planted, found);
        EXPECT_DOUBLE_EQ(acc, oracle_accuracy(planted, found));

        std::vector<std::size_t> perm(k);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        ClusterAssignment renamed = found;
        for (auto& l : renamed.labels) l = perm[l];
        EXPECT_EQ(cluster_accuracy(planted, renamed), acc);
    }
}

TEST(ClusterAccuracy, GreedyPathForManyClusters)
{
    const std::size_t k = 10;
    std::vector<std::size_t> p(50), f(50);
    for (std::size_t i = 0; i < 50; ++i) {
        p[i] = i % k;
        f[i] = (i + 3) % k;
    }
    EXPECT_EQ(cluster_accuracy({p, k}, {f, k}), 1.0);
    f[0] = (f[0] + 1) % k;
    EXPECT_DOUBLE_EQ(cluster_accuracy({p, k}, {f, k}), 1.0 - 0.2 / static_cast<double>(k));
}
