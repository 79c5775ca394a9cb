#pragma once

#include "uga/dense.hpp"
#include "uga/graph.hpp"

#include <optional>
#include <string>
#include <vector>

namespace uga {

enum class CertificateFailure { None, Spectrum, NullspaceEscape };

struct Certificate {
    bool passed = false;
    double lo = 0.0;
    double hi = 0.0;
    double target_lo = 0.0;  ///< (1 - eps)^2
    double target_hi = 0.0;  ///< (1 + eps)^2
    std::size_t nullspace_dim_g = 0;
    std::size_t nullspace_dim_h = 0;
    std::optional<double> kappa;  ///< hi / lo when lo > 0
    CertificateFailure reason = CertificateFailure::None;

    /// "passed,lo,hi,target_lo,target_hi,kappa"
    std::string csv_row() const;
    static const char* csv_header() { return "passed,lo,hi,target_lo,target_hi,kappa"; }
};

/// (1 - eps)^2 I <= l <= (1 + eps)^2 I, each side with 1e-9 slack.
Certificate certify_identity(const SymMatrix& l, double epsilon);

/// (1 - eps)^2 L_G <= L_H <= (1 + eps)^2 L_G on range(L_G), plus containment of
/// null(L_G) in null(L_H). Eigenvalues of L_G below n * 1e-12 * lambda_max span
/// its nullspace; L_H must map each of those vectors to norm <= 1e-8 ||L_H||_F.
Certificate certify_graph(const SymMatrix& l_g, const SymMatrix& l_h, double epsilon);

/// Smallest eigenvalue of the m x m matrix of edge_atom_inner values. n <= 60.
double grammian_min_eig(const WeightedGraph& g);

struct ResidualReport {
    /// bound_holds[i] for history index i >= 1 checks
    /// ||R_i||^2 <= F / (1 + (i - 1) F / T^2) + 1e-8 F.
    std::vector<bool> bound_holds;
    std::vector<double> bound;
    bool all_hold = true;
    std::optional<double> spectral_ratio;  ///< ||R||_2^2 / ||R||_F^2 at the final iterate
};

/// trace_lg = Tr(L_G), frob_lg_sq = ||L_G||_F^2, history[i] = ||R_i||_F^2.
ResidualReport residual_diagnostics(double trace_lg, double frob_lg_sq, const std::vector<double>& history,
                                    const SymMatrix* final_residual = nullptr);

}  // namespace uga
