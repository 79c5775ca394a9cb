#pragma once

#include "uga/dense.hpp"

#include <cstdint>
#include <vector>

namespace uga {

struct ClusterAssignment {
    std::vector<std::size_t> labels;  ///< values in 0..k-1
    std::size_t k = 0;
};

/// Normalized spectral clustering: the k eigenvectors of D^-1/2 L D^-1/2 with
/// the smallest eigenvalues (D = diag(L); zero-degree rows are left
/// unscaled), rows normalized to unit length, then k-means with k-means++
/// seeding, 100 restarts of at most 300 Lloyd iterations; lowest inertia wins.
ClusterAssignment spectral_cluster(const SymMatrix& laplacian, std::size_t k, std::uint64_t seed);

/// Lloyd k-means on the rows of x with the restart policy above.
ClusterAssignment kmeans(const Matrix& x, std::size_t k, std::uint64_t seed, std::size_t restarts = 100,
                         std::size_t max_iterations = 300);

/// Mean over planted clusters i of |C_i ∩ F_sigma(i)| / |C_i|, maximized over
/// label permutations sigma (exhaustive for k <= 8, greedy matching above).
double cluster_accuracy(const ClusterAssignment& planted, const ClusterAssignment& found);

}  // namespace uga
