#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace uga {

struct Edge {
    std::uint32_t u = 0;
    std::uint32_t v = 0;
    double w = 0.0;
};

/// Undirected graph with positive edge weights. Edges are stored with u < v
/// and keep their input order as ids 0..m-1.
class WeightedGraph {
public:
    WeightedGraph() = default;

    /// Canonicalizes each edge to u < v. Rejects self-loops, duplicate pairs,
    /// ids >= n and weights that are not finite and strictly positive.
    static WeightedGraph from_edges(std::size_t n, std::vector<Edge> edges);

    std::size_t n() const noexcept { return n_; }
    std::size_t m() const noexcept { return edges_.size(); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const Edge& edge(std::size_t e) const { return edges_[e]; }

    /// Edge ids incident to vertex x.
    std::span<const std::uint32_t> incident(std::size_t x) const
    {
        return {adj_.data() + offsets_[x], adj_.data() + offsets_[x + 1]};
    }
    double weighted_degree(std::size_t x) const { return wdeg_[x]; }

    /// ||L_G||_F^2 = sum_x wdeg(x)^2 + 2 sum_e w_e^2.
    double laplacian_frob_sq() const;
    /// Tr(L_G) = 2 sum_e w_e.
    double laplacian_trace() const;

private:
    std::size_t n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::size_t> offsets_;
    std::vector<std::uint32_t> adj_;
    std::vector<double> wdeg_;
};

/// Number of connected components (isolated vertices count as components).
std::size_t connected_components(const WeightedGraph& g);

// --- edge-list files ----------------------------------------------------------
//
//   # n=<vertex count>   (optional; otherwise max id + 1)
//   u<TAB>v<TAB>w
//
// Tabs or runs of spaces separate fields on input; output always uses tabs.

WeightedGraph read_edge_list(std::istream& in);
WeightedGraph read_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const WeightedGraph& g, std::span<const std::string> comments = {});

/// Writes arbitrary (possibly negative) edge weights in the edge-list layout.
void write_weighted_edges(std::ostream& out, std::span<const Edge> edges, std::span<const std::string> comments = {});

}  // namespace uga
