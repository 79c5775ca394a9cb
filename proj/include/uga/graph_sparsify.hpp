#pragma once

#include "uga/dense.hpp"
#include "uga/graph.hpp"
#include "uga/indexed_heap.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace uga {

/// <phi_a, phi_b> for edge atoms phi = (e_u - e_v)(e_u - e_v)^T: 4 for the
/// same pair, 1 when exactly one endpoint is shared, 0 otherwise.
double edge_atom_inner(const Edge& a, const Edge& b);

/// <phi_e, L_G> = wdeg(u) + wdeg(v) + 2 w_e, from adjacency sums.
double edge_graph_inner(const WeightedGraph& g, std::size_t e);

enum class SelectMode {
    Queue,  ///< bucketed upper-bound heaps, O(log m) per touched edge
    Scan,   ///< O(m) scan; oracle for the queue
};

struct GraphAlphas {
    double a1 = 0.0;
    double a2 = 0.0;
    bool degenerate = false;
};

struct GraphStepInfo {
    std::size_t iteration = 0;  ///< 1-based index of the step just taken
    std::size_t selected = 0;
    double score = 0.0;  ///< <phi_e, R> before the step
    GraphAlphas alphas;
    double residual_sq_before = 0.0;
    double residual_sq_after = 0.0;
    std::size_t touched = 0;  ///< edges whose cached inner product changed
};

/// Incremental state of the greedy graph approximation. Cached h(e) =
/// <phi_e, L_H> and coefficients C(e) are stored as mu * hhat(e) and
/// mu * chat(e) with one shared multiplier mu, so scaling L_H by alpha1 is O(1).
/// The graph must outlive the state.
class SparsifyState {
public:
    explicit SparsifyState(const WeightedGraph& g, SelectMode mode = SelectMode::Queue);

    /// argmax_e |g(e) - h(e)|. Keys within tie_window() of the maximum count
    /// as tied and the smallest id wins, so the choice does not hinge on rounding.
    std::size_t select_edge();
    /// 1e-10 * max_e g(e).
    double tie_window() const noexcept { return tie_; }
    GraphAlphas optimal_weights(std::size_t e) const;
    GraphStepInfo step();

    const WeightedGraph& graph() const noexcept { return *g_; }
    SelectMode mode() const noexcept { return mode_; }
    std::size_t iteration() const noexcept { return iteration_; }
    const std::vector<std::uint32_t>& lambda() const noexcept { return lambda_; }

    double g(std::size_t e) const { return gconst_[e]; }
    double h(std::size_t e) const { return mu_ * hhat_[e]; }
    double score(std::size_t e) const { return gconst_[e] - mu_ * hhat_[e]; }
    double coefficient(std::size_t e) const { return mu_ * chat_[e]; }
    double lh_frob_sq() const noexcept { return lh_; }
    double lg_lh() const noexcept { return lg_lh_; }
    double lg_frob_sq() const noexcept { return lg_; }
    /// ||L_G - L_H||_F^2 tracked by exact per-step decrements.
    double residual_sq() const noexcept { return r2_; }
    /// ||L_G - L_H||_F^2 recomputed from edge differences, O(m).
    double direct_residual_sq() const;
    /// Replaces the tracked residual with direct_residual_sq().
    void resync_residual() { r2_ = direct_residual_sq(); }
    std::size_t fallback_count() const noexcept { return fallbacks_; }
    /// Number of O(m) rebuilds of the multiplier and queue.
    std::size_t rebuild_count() const noexcept { return rebuilds_; }
    /// Queue entries evaluated by select_edge so far.
    std::size_t evaluations() const noexcept { return evaluations_; }

private:
    using Id = IndexedMaxHeap::Id;

    const WeightedGraph* g_;
    SelectMode mode_;
    std::size_t iteration_ = 0;
    std::vector<std::uint32_t> lambda_;

    std::vector<double> gconst_;
    std::vector<double> hhat_;
    std::vector<double> chat_;
    double mu_ = 1.0;
    double lh_ = 0.0;
    double lg_lh_ = 0.0;
    double lg_ = 0.0;
    double tie_ = 0.0;
    double r2_ = 0.0;
    std::size_t fallbacks_ = 0;
    std::size_t rebuilds_ = 0;
    std::size_t evaluations_ = 0;

    // Queue mode. Edges are bucketed by the binary exponent of |hhat|; within
    // a bucket every |hhat| is below cap, so an entry stamped when the total
    // variation of mu was d_s has key(now) <= prio + d_now * cap.
    double variation_ = 0.0;
    std::vector<std::uint16_t> slot_;  // bucket per edge; slot 0 holds hhat == 0
    std::vector<double> prio_;
    std::vector<Id> pos_;
    std::vector<IndexedMaxHeap> buckets_;
    std::vector<std::size_t> live_;  // slots that may be nonempty
    std::vector<char> is_live_;
    std::vector<Id> popped_;

    double key(std::size_t e) const { return std::abs(gconst_[e] - mu_ * hhat_[e]); }
    static std::size_t slot_of(double hhat);
    static double cap_of(std::size_t slot);
    void stamp(std::size_t e);
    void queue_insert(std::size_t e);
    void queue_remove(std::size_t e);
    void fold_multiplier();
    void rebuild_queue();
    std::size_t select_scan() const;
    std::size_t select_queue();
};

struct Sparsifier {
    std::vector<Edge> edges;  ///< selected edges with their weights C(e) != 0 (may be negative)
    std::vector<std::uint32_t> edge_ids;
    std::size_t n = 0;
    std::size_t iterations = 0;
    std::size_t budget = 0;
    double residual_frob = 0.0;
    std::size_t negative_weight_count = 0;
    std::size_t fallback_count = 0;
    bool early_exit = false;
    std::size_t resyncs = 0;  ///< tracked residual re-anchored to a direct recomputation
    std::vector<double> residual_sq_history;  ///< tracked ||R_i||_F^2 for i = 0..iterations
};

using GraphObserver = std::function<void(const SparsifyState&, const GraphStepInfo&)>;

/// Runs iteration_budget(n, epsilon) steps, stopping early once ||R||_F^2 drops
/// to (1e-12)^2 ||L_G||_F^2. The tracked value only schedules direct O(m)
/// recomputations, which decide.
Sparsifier sparsify(const WeightedGraph& g, double epsilon, SelectMode mode = SelectMode::Queue,
                    const GraphObserver& observer = {});

/// ||L_G - sum_e C(e) phi_e||_F from edge differences, without forming matrices.
double sparsifier_residual_frob(const WeightedGraph& g, std::span<const std::uint32_t> edge_ids,
                                std::span<const double> weights);

/// Dense Laplacian; throws CapExceeded above dense_cap().
SymMatrix laplacian_dense(const WeightedGraph& g);
/// Dense sum of C(e) phi_e over the sparsifier's edges on n vertices.
SymMatrix sparsifier_laplacian(const Sparsifier& s, std::size_t n);
SymMatrix laplacian_of_edges(std::span<const Edge> edges, std::size_t n);

}  // namespace uga
