#pragma once

#include "uga/certify.hpp"
#include "uga/dense.hpp"
#include "uga/subset_select.hpp"

#include <optional>
#include <vector>

namespace uga {

/// Weighted row subset of a least-squares system.
struct Sketch {
    std::vector<std::size_t> indices;  ///< selected rows of A
    std::vector<double> d;             ///< positive row weights
    Matrix a_tilde;                    ///< rows sqrt(d_k) a_{j_k}
    std::vector<double> b_tilde;       ///< b_{j_k}, unweighted
    Reduction reduction = Reduction::Cholesky;
    std::size_t iterations = 0;
    /// Extreme eigenvalues of sum d_k u_k u_k^T on the reduced isotropic set,
    /// so lo B <= A~^T A~ <= hi B.
    double lo = 0.0;
    double hi = 0.0;
    /// (1 - eps) <= lo and hi <= (1 + eps), each with 1e-9 slack.
    bool certified = false;
    /// The (1 +- eps)^2 certificate on the reduced set.
    Certificate identity_certificate;
};

/// Selects rows with the nonnegative greedy on B = A^T A (through
/// reduce_general_b). An uncertified sketch is still returned; check certified.
Sketch build_sketch(const Matrix& a, std::span<const double> b, double epsilon);

/// argmin ||A~ y - b~||_2 by Householder QR. Throws RankDeficient.
std::vector<double> solve_sketch_ls(const Sketch& sk);

/// Solves (A~^T A~) z = A^T b. Throws NotPositiveDefinite when A~^T A~ is singular.
std::vector<double> solve_new(const Sketch& sk, const Matrix& a, std::span<const double> b);

/// kappa / (1 - kappa r) * (r + ||atb - atb_tilde|| / ||atb||) with
/// r = ||B - G||_2 / ||B||_2; nullopt when 1 - kappa r <= 0 or B is not PD.
std::optional<double> error_bound(const SymMatrix& b_mat, const SymMatrix& sketch_gram, std::span<const double> atb,
                                  std::span<const double> atb_tilde);

/// ||x - x_ref|| / ||x_ref||. Throws InvalidInput for a zero reference.
double relative_error(std::span<const double> x_ref, std::span<const double> x);

}  // namespace uga
