#pragma once

#include "uga/dense.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace uga {

/// m vectors in R^n stored as the rows of an m x n matrix.
class IsotropicSet {
public:
    /// Requires m >= n >= 1 and finite entries. With check_isotropy the sum of
    /// outer products must be within 1e-8 * sqrt(n) of I_n in Frobenius norm.
    static IsotropicSet from_rows(Matrix vectors, bool check_isotropy = false);

    std::size_t n() const noexcept { return v_.cols(); }
    std::size_t m() const noexcept { return v_.rows(); }
    std::span<const double> vector(std::size_t k) const { return v_.row(k); }
    const Matrix& vectors() const noexcept { return v_; }
    const std::vector<double>& norms_sq() const noexcept { return norms_sq_; }

private:
    Matrix v_;
    std::vector<double> norms_sq_;
};

/// ||sum_k v_k v_k^T - I_n||_F.
double isotropy_error(const IsotropicSet& set);

/// min ||v_k||^2 / max ||v_k||^2. Throws InvalidInput on a zero vector.
double gamma_of(const IsotropicSet& set);
/// Same ratio with unsquared norms, reported for diagnostics only.
double gamma_unsquared(const IsotropicSet& set);

/// ceil(n / eps^2), treating quotients within 1e-9 relative of an integer as
/// that integer so that e.g. eps = 0.5 yields exactly 4n.
std::size_t iteration_budget(std::size_t n, double epsilon);

struct SubsetState {
    std::size_t iteration = 0;
    std::vector<std::size_t> lambda;  ///< selected index per iteration
    std::vector<double> c;            ///< coefficient per vector
    std::vector<double> t;            ///< t[k] = v_k^T L v_k
    double l_frob_sq = 0.0;
    double l_trace = 0.0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double residual_sq = 0.0;  ///< ||I - L||_F^2, maintained by exact per-step decrements
    std::size_t fallback_count = 0;

    static SubsetState initial(const IsotropicSet& set);
};

struct Alphas {
    double a1 = 0.0;
    double a2 = 0.0;
    bool degenerate = false;  ///< rank-1 fallback was used
};

struct SubsetStepInfo {
    std::size_t iteration = 0;  ///< 1-based index of the step just taken
    std::size_t selected = 0;
    double score = 0.0;  ///< v_j^T R v_j before the step
    Alphas alphas;
    double residual_sq_before = 0.0;
    double residual_sq_after = 0.0;
    double min_coefficient_raw = 0.0;  ///< smallest coefficient before clamping roundoff negatives
    double max_coefficient = 0.0;
};

/// argmax_k (||v_k||^2 - t[k]); smallest index on ties.
std::size_t select_index(const SubsetState& state, const IsotropicSet& set);

/// Least-squares weights of I_n on span{L, v_j v_j^T}.
Alphas optimal_weights(const SubsetState& state, const IsotropicSet& set, std::size_t j);

/// One greedy step. Throws NonnegativityViolation if a coefficient drops below
/// -1e-12 * max(1, max c); smaller negatives are clamped to zero.
SubsetStepInfo step(SubsetState& state, const IsotropicSet& set);

struct SubsetResult {
    std::vector<std::size_t> lambda;    ///< distinct selected indices, ascending
    std::vector<double> coefficients;   ///< positive weight per entry of lambda
    std::size_t iterations = 0;
    std::size_t budget = 0;
    double residual_frob = 0.0;
    bool residual_exact = false;  ///< residual_frob was recomputed densely
    std::size_t sparsity = 0;
    std::size_t fallback_count = 0;
    bool early_exit = false;
    std::size_t resyncs = 0;  ///< tracked residual re-anchored to a dense recomputation
};

using SubsetObserver = std::function<void(const SubsetState&, const SubsetStepInfo&)>;

/// Runs iteration_budget(n, epsilon) steps, or stops early once ||R||_F^2
/// drops to (1e-12)^2 * n. For n <= dense_cap() the decision uses dense
/// recomputations scheduled by the tracked value; above the cap the tracked
/// value decides alone.
SubsetResult run(const IsotropicSet& set, double epsilon, const SubsetObserver& observer = {});

/// L = sum_k c_k v_k v_k^T.
SymMatrix subset_matrix(const IsotropicSet& set, std::span<const std::size_t> indices,
                        std::span<const double> coefficients);

// --- general PSD target -------------------------------------------------------

enum class Reduction { Cholesky, Thin };

struct ReducedSet {
    IsotropicSet set;  ///< u_k with sum u_k u_k^T = I_r
    Reduction kind = Reduction::Cholesky;
    std::size_t rank = 0;
    double isotropy_error = 0.0;
};

/// Maps vectors with B = sum v_k v_k^T to an isotropic set. Tries Cholesky of B
/// (u_k = L^{-1} v_k) and falls back to the thin factor (u_k = S^{-1} V^T v_k).
/// Indices and coefficients selected on the result apply unchanged to the
/// original vectors.
ReducedSet reduce_general_b(const Matrix& vectors);

}  // namespace uga
