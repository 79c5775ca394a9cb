#include "uga/graph_sparsify.hpp"

#include "uga/error.hpp"
#include "uga/subset_select.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace uga {

namespace {

constexpr int min_exponent = -1073;  // frexp exponent of the smallest subnormal
constexpr int max_exponent = 1024;
constexpr std::size_t slot_count = max_exponent - min_exponent + 2;

// Bound slack for rounding in the stored keys and in the accumulated variation.
constexpr double rel_slack = 1e-12;

// Keys this close to the maximum, relative to max g(e), are ties.
constexpr double tie_rel = 1e-10;

// mu is folded back into the stored values once it leaves [1/16, 16] or its
// accumulated variation since the last fold exceeds this.
constexpr double mu_low = 1.0 / 16.0;
constexpr double mu_high = 16.0;
constexpr double variation_limit = 0.1;

}  // namespace

double edge_atom_inner(const Edge& a, const Edge& b)
{
    const bool uu = a.u == b.u, uv = a.u == b.v, vu = a.v == b.u, vv = a.v == b.v;
    if ((uu && vv) || (uv && vu)) return 4.0;
    return (uu || uv || vu || vv) ? 1.0 : 0.0;
}

double edge_graph_inner(const WeightedGraph& g, std::size_t e)
{
    const Edge& ed = g.edge(e);
    return g.weighted_degree(ed.u) + g.weighted_degree(ed.v) + 2.0 * ed.w;
}

// --- SparsifyState -------------------------------------------------------------

SparsifyState::SparsifyState(const WeightedGraph& g, SelectMode mode) : g_(&g), mode_(mode)
{
    const std::size_t m = g.m();
    if (m == 0) throw InvalidInput("sparsify: graph has no edges");
    gconst_.resize(m);
    for (std::size_t e = 0; e < m; ++e) gconst_[e] = edge_graph_inner(g, e);
    tie_ = tie_rel * *std::max_element(gconst_.begin(), gconst_.end());
    hhat_.assign(m, 0.0);
    chat_.assign(m, 0.0);
    lg_ = g.laplacian_frob_sq();
    r2_ = lg_;
    if (mode_ == SelectMode::Queue) {
        slot_.assign(m, 0);
        prio_.assign(m, 0.0);
        pos_.assign(m, 0);
        buckets_.resize(slot_count);
        is_live_.assign(slot_count, 0);
        rebuild_queue();
    }
}

std::size_t SparsifyState::slot_of(double hhat)
{
    if (hhat == 0.0) return 0;
    int exp = 0;
    std::frexp(hhat, &exp);  // |hhat| < 2^exp
    return static_cast<std::size_t>(exp - min_exponent + 1);
}

double SparsifyState::cap_of(std::size_t slot)
{
    if (slot == 0) return 0.0;
    return std::ldexp(1.0, static_cast<int>(slot) + min_exponent - 1);
}

void SparsifyState::stamp(std::size_t e)
{
    const double cap = cap_of(slot_[e]);
    const double k = key(e);
    prio_[e] = k + rel_slack * (gconst_[e] + std::abs(mu_) * cap) - variation_ * cap;
}

void SparsifyState::queue_insert(std::size_t e)
{
    const std::size_t s = slot_of(hhat_[e]);
    slot_[e] = static_cast<std::uint16_t>(s);
    stamp(e);
    buckets_[s].push(static_cast<Id>(e), prio_, pos_);
    if (!is_live_[s]) {
        is_live_[s] = 1;
        live_.push_back(s);
    }
}

void SparsifyState::queue_remove(std::size_t e)
{
    buckets_[slot_[e]].remove(static_cast<Id>(e), prio_, pos_);
}

void SparsifyState::fold_multiplier()
{
    if (mu_ != 1.0) {
        for (double& x : hhat_) x *= mu_;
        for (double& x : chat_) x *= mu_;
        mu_ = 1.0;
    }
    variation_ = 0.0;
    ++rebuilds_;
}

void SparsifyState::rebuild_queue()
{
    for (std::size_t s : live_) {
        buckets_[s].clear();
        is_live_[s] = 0;
    }
    live_.clear();
    variation_ = 0.0;
    for (std::size_t e = 0; e < gconst_.size(); ++e) queue_insert(e);
}

std::size_t SparsifyState::select_scan() const
{
    double top = key(0);
    for (std::size_t e = 1; e < gconst_.size(); ++e) top = std::max(top, key(e));
    std::size_t e = 0;
    while (key(e) < top - tie_) ++e;
    return e;
}

std::size_t SparsifyState::select_queue()
{
    double top = -1.0;
    popped_.clear();

    // Pop until no bucket can hold a key within the tie window of the best seen.
    for (;;) {
        double max_ub = -std::numeric_limits<double>::infinity();
        std::size_t max_slot = 0;
        bool found = false;
        for (std::size_t i = 0; i < live_.size();) {
            const std::size_t s = live_[i];
            if (buckets_[s].empty()) {
                is_live_[s] = 0;
                live_[i] = live_.back();
                live_.pop_back();
                continue;
            }
            const double ub = prio_[buckets_[s].top()] + variation_ * cap_of(s) * (1.0 + rel_slack);
            if (!found || ub > max_ub) {
                max_ub = ub;
                max_slot = s;
                found = true;
            }
            ++i;
        }
        if (!found || max_ub < top - tie_) break;

        const Id e = buckets_[max_slot].pop(prio_, pos_);
        popped_.push_back(e);
        ++evaluations_;
        top = std::max(top, key(e));
    }
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (Id e : popped_) {
        if (e < best && key(e) >= top - tie_) best = e;
        stamp(e);
        buckets_[slot_[e]].push(e, prio_, pos_);
        if (!is_live_[slot_[e]]) {
            is_live_[slot_[e]] = 1;
            live_.push_back(slot_[e]);
        }
    }
    return best;
}

std::size_t SparsifyState::select_edge()
{
    return mode_ == SelectMode::Queue ? select_queue() : select_scan();
}

GraphAlphas SparsifyState::optimal_weights(std::size_t e) const
{
    const double ge = gconst_[e];
    if (iteration_ == 0 || lh_ <= 0.0) return {0.0, ge / 4.0, false};
    // Unit-diagonal scaling of [[lh, h], [h, 4]].
    const double sl = std::sqrt(lh_);
    const double rho = h(e) / (2.0 * sl);
    const auto sol = solve_2x2({{{1.0, rho}, {rho, 1.0}}}, {lg_lh_ / sl, ge / 2.0});
    if (!sol) return {1.0, score(e) / 4.0, true};
    return {(*sol)[0] / sl, (*sol)[1] / 2.0, false};
}

GraphStepInfo SparsifyState::step()
{
    const std::size_t es = select_edge();
    const double sc = score(es);
    const GraphAlphas al = optimal_weights(es);
    const double a1 = al.a1;
    const double a2 = al.a2;

    GraphStepInfo info;
    info.iteration = iteration_ + 1;
    info.selected = es;
    info.score = sc;
    info.alphas = al;
    info.residual_sq_before = r2_;

    const double h_old = h(es);
    lh_ = a1 * a1 * lh_ + 2.0 * a1 * a2 * h_old + 4.0 * a2 * a2;
    lg_lh_ = a1 * lg_lh_ + a2 * gconst_[es];
    r2_ -= a2 * sc;

    const bool reset = a1 == 0.0;
    if (reset) {
        std::fill(hhat_.begin(), hhat_.end(), 0.0);
        std::fill(chat_.begin(), chat_.end(), 0.0);
        mu_ = 1.0;
        variation_ = 0.0;
    } else {
        const double mu_new = a1 * mu_;
        variation_ += std::abs(mu_new - mu_);
        mu_ = mu_new;
    }

    const Edge& star = g_->edge(es);
    const bool queue = mode_ == SelectMode::Queue && !reset;
    auto touch = [&](std::uint32_t f) {
        hhat_[f] += a2 * edge_atom_inner(g_->edge(f), star) / mu_;
        if (queue) {
            if (slot_of(hhat_[f]) == slot_[f]) {
                stamp(f);
                buckets_[slot_[f]].update(f, prio_, pos_);
            } else {
                queue_remove(f);
                queue_insert(f);
            }
        }
        ++info.touched;
    };
    for (std::uint32_t f : g_->incident(star.u)) touch(f);
    for (std::uint32_t f : g_->incident(star.v))
        if (f != es) touch(f);
    chat_[es] += a2 / mu_;

    const bool fold = std::abs(mu_) < mu_low || std::abs(mu_) > mu_high || variation_ > variation_limit;
    if (fold) fold_multiplier();
    if (mode_ == SelectMode::Queue && (reset || fold)) rebuild_queue();

    lambda_.push_back(static_cast<std::uint32_t>(es));
    ++iteration_;
    if (al.degenerate) ++fallbacks_;
    info.residual_sq_after = r2_;
    return info;
}

double SparsifyState::direct_residual_sq() const
{
    std::vector<double> deg(g_->n(), 0.0);
    double off = 0.0;
    for (std::size_t e = 0; e < gconst_.size(); ++e) {
        const Edge& ed = g_->edge(e);
        const double s = ed.w - coefficient(e);
        deg[ed.u] += s;
        deg[ed.v] += s;
        off += s * s;
    }
    double total = 2.0 * off;
    for (double d : deg) total += d * d;
    return total;
}

// --- driver ----------------------------------------------------------------------

double sparsifier_residual_frob(const WeightedGraph& g, std::span<const std::uint32_t> edge_ids,
                                std::span<const double> weights)
{
    if (edge_ids.size() != weights.size()) throw InvalidInput("sparsifier_residual_frob: length mismatch");
    std::vector<double> s(g.m());
    for (std::size_t e = 0; e < g.m(); ++e) s[e] = g.edge(e).w;
    for (std::size_t q = 0; q < edge_ids.size(); ++q) s[edge_ids[q]] -= weights[q];
    std::vector<double> deg(g.n(), 0.0);
    double off = 0.0;
    for (std::size_t e = 0; e < g.m(); ++e) {
        deg[g.edge(e).u] += s[e];
        deg[g.edge(e).v] += s[e];
        off += s[e] * s[e];
    }
    double total = 2.0 * off;
    for (double d : deg) total += d * d;
    return std::sqrt(total);
}

Sparsifier sparsify(const WeightedGraph& g, double epsilon, SelectMode mode, const GraphObserver& observer)
{
    const std::size_t budget = iteration_budget(g.n(), epsilon);
    SparsifyState state(g, mode);
    const double stop_sq = 1e-24 * state.lg_frob_sq();

    Sparsifier out;
    out.n = g.n();
    out.budget = budget;
    out.residual_sq_history.push_back(state.residual_sq());
    // Same checkpoint scheme as the subset driver: the tracked value only
    // schedules O(m) recomputations.
    double checkpoint = 1e-8 * state.lg_frob_sq();
    while (state.iteration() < budget) {
        if (state.residual_sq() <= std::max(checkpoint, stop_sq)) {
            state.resync_residual();
            if (state.residual_sq() <= stop_sq) {
                out.early_exit = true;
                break;
            }
            checkpoint = 1e-4 * state.residual_sq();
            ++out.resyncs;
        }
        const auto info = state.step();
        out.residual_sq_history.push_back(state.residual_sq());
        if (observer) observer(state, info);
    }

    std::vector<double> weights;
    for (std::size_t e = 0; e < g.m(); ++e) {
        const double c = state.coefficient(e);
        if (c == 0.0) continue;
        Edge ed = g.edge(e);
        ed.w = c;
        out.edges.push_back(ed);
        out.edge_ids.push_back(static_cast<std::uint32_t>(e));
        weights.push_back(c);
        if (c < 0.0) ++out.negative_weight_count;
    }
    out.iterations = state.iteration();
    out.fallback_count = state.fallback_count();
    out.residual_frob = sparsifier_residual_frob(g, out.edge_ids, weights);
    return out;
}

SymMatrix laplacian_of_edges(std::span<const Edge> edges, std::size_t n)
{
    if (n > dense_cap()) throw CapExceeded(fmt::format("dense Laplacian: n = {} exceeds cap {}", n, dense_cap()));
    SymMatrix l(n);
    for (const Edge& e : edges) {
        l.add_sym(e.u, e.u, e.w);
        l.add_sym(e.v, e.v, e.w);
        l.add_sym(e.u, e.v, -e.w);
    }
    return l;
}

SymMatrix laplacian_dense(const WeightedGraph& g) { return laplacian_of_edges(g.edges(), g.n()); }

SymMatrix sparsifier_laplacian(const Sparsifier& s, std::size_t n) { return laplacian_of_edges(s.edges, n); }

}  // namespace uga
