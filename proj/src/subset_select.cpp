#include "uga/subset_select.hpp"

#include "uga/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace uga {

IsotropicSet IsotropicSet::from_rows(Matrix vectors, bool check_isotropy)
{
    const std::size_t m = vectors.rows();
    const std::size_t n = vectors.cols();
    if (n == 0 || m < n)
        throw InvalidInput(fmt::format("IsotropicSet: need m >= n >= 1, got m = {}, n = {}", m, n));
    for (double x : vectors.data())
        if (!std::isfinite(x)) throw InvalidInput("IsotropicSet: non-finite entry");

    IsotropicSet s;
    s.v_ = std::move(vectors);
    s.norms_sq_.resize(m);
    for (std::size_t k = 0; k < m; ++k) s.norms_sq_[k] = dot(s.v_.row(k), s.v_.row(k));

    if (check_isotropy) {
        const double err = isotropy_error(s);
        if (err > 1e-8 * std::sqrt(static_cast<double>(n)))
            throw InvalidInput(fmt::format("IsotropicSet: ||sum v v^T - I||_F = {:.3e} exceeds 1e-8 sqrt(n)", err));
    }
    return s;
}

double isotropy_error(const IsotropicSet& set)
{
    Matrix g = gram(set.vectors()).matrix();
    for (std::size_t i = 0; i < set.n(); ++i) g(i, i) -= 1.0;
    return frobenius_norm(g);
}

double gamma_of(const IsotropicSet& set)
{
    const auto [lo, hi] = std::minmax_element(set.norms_sq().begin(), set.norms_sq().end());
    if (*lo <= 0.0) throw InvalidInput("gamma_of: zero-norm vector");
    return *lo / *hi;
}

double gamma_unsquared(const IsotropicSet& set) { return std::sqrt(gamma_of(set)); }

std::size_t iteration_budget(std::size_t n, double epsilon)
{
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw InvalidInput(fmt::format("epsilon must lie in (0, 1), got {}", epsilon));
    const double q = static_cast<double>(n) / (epsilon * epsilon);
    const double r = std::round(q);
    if (std::abs(q - r) <= 1e-9 * q) return static_cast<std::size_t>(r);
    return static_cast<std::size_t>(std::ceil(q));
}

SubsetState SubsetState::initial(const IsotropicSet& set)
{
    SubsetState s;
    s.c.assign(set.m(), 0.0);
    s.t.assign(set.m(), 0.0);
    s.residual_sq = static_cast<double>(set.n());
    return s;
}

std::size_t select_index(const SubsetState& state, const IsotropicSet& set)
{
    const auto& ns = set.norms_sq();
    std::size_t best = 0;
    double best_score = ns[0] - state.t[0];
    for (std::size_t k = 1; k < set.m(); ++k) {
        const double s = ns[k] - state.t[k];
        if (s > best_score) {
            best_score = s;
            best = k;
        }
    }
    return best;
}

Alphas optimal_weights(const SubsetState& state, const IsotropicSet& set, std::size_t j)
{
    const double nsq = set.norms_sq()[j];
    if (nsq <= 0.0) throw InvalidInput(fmt::format("optimal_weights: vector {} has zero norm", j));
    if (state.iteration == 0 || state.l_frob_sq <= 0.0) return {0.0, 1.0 / nsq, false};

    // Unit-diagonal scaling keeps the degeneracy test independent of magnitudes.
    const double sf = std::sqrt(state.l_frob_sq);
    const double rho = state.t[j] / (sf * nsq);
    const auto sol = solve_2x2({{{1.0, rho}, {rho, 1.0}}}, {state.l_trace / sf, 1.0});
    if (!sol) return {1.0, (nsq - state.t[j]) / (nsq * nsq), true};
    return {(*sol)[0] / sf, (*sol)[1] / nsq, false};
}

SubsetStepInfo step(SubsetState& state, const IsotropicSet& set)
{
    const std::size_t j = select_index(state, set);
    const auto& ns = set.norms_sq();
    const double score = ns[j] - state.t[j];
    const Alphas al = optimal_weights(state, set, j);
    const double a1 = al.a1;
    const double a2 = al.a2;

    SubsetStepInfo info;
    info.iteration = state.iteration + 1;
    info.selected = j;
    info.score = score;
    info.alphas = al;
    info.residual_sq_before = state.residual_sq;

    const double t_old_j = state.t[j];
    const auto vj = set.vector(j);
    for (std::size_t k = 0; k < set.m(); ++k) {
        const double ip = dot(vj, set.vector(k));
        state.t[k] = a1 * state.t[k] + a2 * ip * ip;
    }
    state.l_frob_sq = a1 * a1 * state.l_frob_sq + 2.0 * a1 * a2 * t_old_j + a2 * a2 * ns[j] * ns[j];
    state.l_trace = a1 * state.l_trace + a2 * ns[j];

    double cmin = 0.0, cmax = 0.0;
    for (double& ck : state.c) ck *= a1;
    state.c[j] += a2;
    for (double ck : state.c) {
        cmin = std::min(cmin, ck);
        cmax = std::max(cmax, ck);
    }
    const double floor = -1e-12 * std::max(1.0, cmax);
    if (cmin < floor)
        throw NonnegativityViolation(fmt::format(
            "step {}: coefficient {:.3e} below -1e-12 * max(1, max c) (alpha = ({:.6g}, {:.6g}))", info.iteration,
            cmin, a1, a2));
    for (double& ck : state.c)
        if (ck < 0.0) ck = 0.0;

    state.alpha1 = a1;
    state.alpha2 = a2;
    state.residual_sq -= a2 * score;
    state.lambda.push_back(j);
    ++state.iteration;
    if (al.degenerate) ++state.fallback_count;

    info.residual_sq_after = state.residual_sq;
    info.min_coefficient_raw = cmin;
    info.max_coefficient = cmax;
    return info;
}

SymMatrix subset_matrix(const IsotropicSet& set, std::span<const std::size_t> indices,
                        std::span<const double> coefficients)
{
    if (indices.size() != coefficients.size()) throw InvalidInput("subset_matrix: length mismatch");
    const std::size_t n = set.n();
    Matrix l(n, n);
    for (std::size_t q = 0; q < indices.size(); ++q) {
        const auto v = set.vector(indices[q]);
        const double c = coefficients[q];
        for (std::size_t a = 0; a < n; ++a) {
            const double cva = c * v[a];
            if (cva == 0.0) continue;
            auto la = l.row(a);
            for (std::size_t b = 0; b < n; ++b) la[b] += cva * v[b];
        }
    }
    return SymMatrix::from(l);
}

namespace {

double dense_residual_sq(const IsotropicSet& set, const std::vector<double>& c)
{
    std::vector<std::size_t> idx;
    std::vector<double> w;
    for (std::size_t k = 0; k < c.size(); ++k)
        if (c[k] != 0.0) {
            idx.push_back(k);
            w.push_back(c[k]);
        }
    Matrix r = subset_matrix(set, idx, w).matrix();
    for (std::size_t i = 0; i < set.n(); ++i) r(i, i) -= 1.0;
    const double f = frobenius_norm(r);
    return f * f;
}

}  // namespace

SubsetResult run(const IsotropicSet& set, double epsilon, const SubsetObserver& observer)
{
    const std::size_t n = set.n();
    const std::size_t budget = iteration_budget(n, epsilon);
    const double stop_sq = 1e-24 * static_cast<double>(n);

    SubsetState state = SubsetState::initial(set);
    SubsetResult out;
    out.budget = budget;
    // The tracked residual carries absolute rounding of order 1e-16 * n, so it
    // only schedules direct recomputations; each one re-anchors it and sets the
    // next checkpoint four orders of magnitude lower.
    double checkpoint = 1e-8 * static_cast<double>(n);
    auto converged = [&] {
        if (n > dense_cap()) return state.residual_sq <= stop_sq;
        if (state.residual_sq > std::max(checkpoint, stop_sq)) return false;
        state.residual_sq = dense_residual_sq(set, state.c);
        if (state.residual_sq <= stop_sq) return true;
        checkpoint = 1e-4 * state.residual_sq;
        ++out.resyncs;
        return false;
    };
    while (state.iteration < budget) {
        if (converged()) {
            out.early_exit = true;
            break;
        }
        const auto info = step(state, set);
        if (observer) observer(state, info);
    }

    for (std::size_t k = 0; k < set.m(); ++k) {
        if (state.c[k] > 0.0) {
            out.lambda.push_back(k);
            out.coefficients.push_back(state.c[k]);
        }
    }
    out.iterations = state.iteration;
    out.sparsity = out.lambda.size();
    out.fallback_count = state.fallback_count;
    if (n <= dense_cap()) {
        Matrix r = subset_matrix(set, out.lambda, out.coefficients).matrix();
        for (std::size_t i = 0; i < n; ++i) r(i, i) -= 1.0;
        out.residual_frob = frobenius_norm(r);
        out.residual_exact = true;
    } else {
        out.residual_frob = std::sqrt(std::max(0.0, state.residual_sq));
    }
    return out;
}

ReducedSet reduce_general_b(const Matrix& vectors)
{
    const std::size_t n = vectors.cols();
    if (n > dense_cap()) throw CapExceeded(fmt::format("reduce_general_b: n = {} exceeds dense cap", n));
    bool any_nonzero = false;
    for (double x : vectors.data()) {
        if (!std::isfinite(x)) throw InvalidInput("reduce_general_b: non-finite entry");
        any_nonzero = any_nonzero || x != 0.0;
    }
    if (!any_nonzero) throw InvalidInput("reduce_general_b: all vectors are zero");

    const std::size_t m = vectors.rows();
    const SymMatrix b = gram(vectors);

    try {
        const Matrix l = cholesky(b);
        Matrix u(m, n);
        for (std::size_t k = 0; k < m; ++k) {
            const auto x = forward_substitute(l, vectors.row(k));
            std::copy(x.begin(), x.end(), u.row(k).begin());
        }
        auto set = IsotropicSet::from_rows(std::move(u));
        const double err = isotropy_error(set);
        if (err <= 1e-6 * std::sqrt(static_cast<double>(n)))
            return {std::move(set), Reduction::Cholesky, n, err};
    } catch (const NotPositiveDefinite&) {
    }

    const ThinFactor f = thin_spectral_factor(vectors);
    const std::size_t r = f.rank();
    Matrix u(m, r);
    for (std::size_t k = 0; k < m; ++k) {
        const auto vk = vectors.row(k);
        for (std::size_t q = 0; q < r; ++q) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += f.v(i, q) * vk[i];
            u(k, q) = s / f.s[q];
        }
    }
    auto set = IsotropicSet::from_rows(std::move(u));
    const double err = isotropy_error(set);
    if (err > 1e-6 * std::sqrt(static_cast<double>(r)))
        throw RankDeficient(fmt::format("reduce_general_b: reduced set is not isotropic (error {:.3e})", err));
    return {std::move(set), Reduction::Thin, r, err};
}

}  // namespace uga
