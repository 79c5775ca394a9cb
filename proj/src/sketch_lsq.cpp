#include "uga/sketch_lsq.hpp"

#include "uga/error.hpp"

#include <fmt/format.h>

#include <cmath>

namespace uga {

Sketch build_sketch(const Matrix& a, std::span<const double> b, double epsilon)
{
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (b.size() != m) throw InvalidInput(fmt::format("build_sketch: b has {} entries, A has {} rows", b.size(), m));
    if (m < n) throw InvalidInput(fmt::format("build_sketch: need m >= n, got {}x{}", m, n));

    const ReducedSet reduced = reduce_general_b(a);
    const SubsetResult sel = run(reduced.set, epsilon);

    Sketch sk;
    sk.reduction = reduced.kind;
    sk.iterations = sel.iterations;
    sk.indices = sel.lambda;
    sk.d = sel.coefficients;
    sk.a_tilde = Matrix(sk.indices.size(), n);
    sk.b_tilde.resize(sk.indices.size());
    for (std::size_t q = 0; q < sk.indices.size(); ++q) {
        const double s = std::sqrt(sk.d[q]);
        const auto row = a.row(sk.indices[q]);
        auto out = sk.a_tilde.row(q);
        for (std::size_t i = 0; i < n; ++i) out[i] = s * row[i];
        sk.b_tilde[q] = b[sk.indices[q]];
    }

    sk.identity_certificate = certify_identity(subset_matrix(reduced.set, sel.lambda, sel.coefficients), epsilon);
    sk.lo = sk.identity_certificate.lo;
    sk.hi = sk.identity_certificate.hi;
    sk.certified = sk.lo >= 1.0 - epsilon - 1e-9 && sk.hi <= 1.0 + epsilon + 1e-9;
    return sk;
}

std::vector<double> solve_sketch_ls(const Sketch& sk)
{
    if (sk.a_tilde.rows() < sk.a_tilde.cols())
        throw RankDeficient(fmt::format("solve_sketch_ls: {} rows cannot determine {} unknowns", sk.a_tilde.rows(),
                                        sk.a_tilde.cols()));
    return HouseholderQr(sk.a_tilde).solve_least_squares(sk.b_tilde);
}

std::vector<double> solve_new(const Sketch& sk, const Matrix& a, std::span<const double> b)
{
    return cholesky_solve(gram(sk.a_tilde), matvec_t(a, b));
}

std::optional<double> error_bound(const SymMatrix& b_mat, const SymMatrix& sketch_gram, std::span<const double> atb,
                                  std::span<const double> atb_tilde)
{
    if (sketch_gram.dim() != b_mat.dim() || atb.size() != b_mat.dim() || atb_tilde.size() != b_mat.dim())
        throw InvalidInput("error_bound: dimension mismatch");
    const auto eig = sym_eig(b_mat);
    const double lmin = eig.values.front();
    const double lmax = eig.values.back();
    if (!(lmin > 0.0)) return std::nullopt;
    const double kappa = lmax / lmin;
    const double r = spectral_norm(SymMatrix::from(subtract(b_mat.matrix(), sketch_gram.matrix()))) / lmax;
    const double gate = 1.0 - kappa * r;
    if (!(gate > 0.0)) return std::nullopt;

    std::vector<double> diff(atb.begin(), atb.end());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= atb_tilde[i];
    const double rhs = norm2(diff) / norm2(atb);
    return kappa / gate * (r + rhs);
}

double relative_error(std::span<const double> x_ref, std::span<const double> x)
{
    if (x_ref.size() != x.size()) throw InvalidInput("relative_error: length mismatch");
    const double ref = norm2(x_ref);
    if (ref == 0.0) throw InvalidInput("relative_error: zero reference vector");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - x_ref[i]) * (x[i] - x_ref[i]);
    return std::sqrt(s) / ref;
}

}  // namespace uga
