#pragma once

#include "uga/dense.hpp"
#include "uga/graph.hpp"
#include "uga/subset_select.hpp"

#include <cstdint>
#include <vector>

namespace uga {

/// All generators draw from std::mt19937_64 seeded with the given value.

/// splitmix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);
/// Per-trial seed: splitmix64(seed ^ splitmix64(trial + 0x9E3779B97F4A7C15)).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t trial);

enum class WeightKind { Poisson, Exponential };

struct WeightDist {
    WeightKind kind = WeightKind::Poisson;
    double lambda = 1.0;  ///< Poisson rate, or the mean of the exponential
};

/// G(n, p) with i.i.d. weights. Poisson draws of 0 are redrawn, so weights
/// follow the zero-truncated Poisson law with mean lambda / (1 - e^-lambda).
WeightedGraph gen_er_weighted(std::size_t n, double p, WeightDist dist, std::uint64_t seed);

struct SbmSpec {
    std::size_t n = 0;
    std::size_t k = 0;
    double p = 0.0;  ///< intra-cluster edge probability
    double q = 0.0;  ///< inter-cluster edge probability
    std::vector<std::size_t> sizes;  ///< empty means balanced_sizes(n, k)
};

/// n / k per cluster, the remainder spread over the first clusters.
std::vector<std::size_t> balanced_sizes(std::size_t n, std::size_t k);

struct PlantedGraph {
    WeightedGraph graph;  ///< unit weights
    std::vector<std::size_t> labels;
    std::size_t k = 0;
};

/// Vertices are assigned to clusters in contiguous blocks.
PlantedGraph gen_sbm(const SbmSpec& spec, std::uint64_t seed);

/// Rows of the orthonormal Q from QR of an m x n Gaussian matrix.
IsotropicSet gen_isotropic(std::size_t n, std::size_t m, std::uint64_t seed);

struct LsqInstance {
    Matrix a;
    std::vector<double> b;
    std::vector<double> x_star;
};

/// Gaussian A (row-major draws), then Gaussian x*, then b = A x* + noise * N(0, 1).
LsqInstance gen_lsq_instance(std::size_t m, std::size_t n, std::uint64_t seed, double noise = 0.1);

}  // namespace uga
