#include "uga/certify.hpp"

#include "uga/error.hpp"
#include "uga/graph_sparsify.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace uga {

namespace {

void check_epsilon(double eps)
{
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput(fmt::format("epsilon must lie in (0, 1), got {}", eps));
}

void finish(Certificate& c, double eps)
{
    c.target_lo = (1.0 - eps) * (1.0 - eps);
    c.target_hi = (1.0 + eps) * (1.0 + eps);
    if (c.lo > 0.0) c.kappa = c.hi / c.lo;
    const bool spectrum_ok = c.lo >= c.target_lo - 1e-9 && c.hi <= c.target_hi + 1e-9;
    if (c.reason == CertificateFailure::None && !spectrum_ok) c.reason = CertificateFailure::Spectrum;
    c.passed = c.reason == CertificateFailure::None;
}

std::size_t count_null(const std::vector<double>& values, std::size_t n)
{
    double amax = 0.0;
    for (double v : values) amax = std::max(amax, std::abs(v));
    const double thr = static_cast<double>(n) * 1e-12 * amax;
    return static_cast<std::size_t>(
        std::count_if(values.begin(), values.end(), [&](double v) { return std::abs(v) <= thr; }));
}

}  // namespace

std::string Certificate::csv_row() const
{
    return fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{}", passed ? 1 : 0, lo, hi, target_lo, target_hi,
                       kappa ? fmt::format("{:.17g}", *kappa) : std::string("nan"));
}

Certificate certify_identity(const SymMatrix& l, double epsilon)
{
    check_epsilon(epsilon);
    if (l.dim() == 0) throw InvalidInput("certify_identity: empty matrix");
    const auto eig = sym_eig(l);
    Certificate c;
    c.lo = eig.values.front();
    c.hi = eig.values.back();
    finish(c, epsilon);
    return c;
}

Certificate certify_graph(const SymMatrix& l_g, const SymMatrix& l_h, double epsilon)
{
    check_epsilon(epsilon);
    const std::size_t n = l_g.dim();
    if (l_h.dim() != n) throw InvalidInput("certify_graph: dimension mismatch");
    if (n == 0) throw InvalidInput("certify_graph: empty matrices");

    const auto eg = sym_eig(l_g);
    const double lmax = std::max(eg.values.back(), 0.0);
    const double thr = static_cast<double>(n) * 1e-12 * lmax;

    Certificate c;
    std::vector<std::size_t> range;
    const double lh_frob = frobenius_norm(l_h.matrix());
    for (std::size_t j = 0; j < n; ++j) {
        if (eg.values[j] > thr) {
            range.push_back(j);
            continue;
        }
        ++c.nullspace_dim_g;
        const auto z = eg.vectors.column(j);
        if (norm2(matvec(l_h.matrix(), z)) > 1e-8 * lh_frob) c.reason = CertificateFailure::NullspaceEscape;
    }
    c.nullspace_dim_h = count_null(sym_eig(l_h).values, n);

    const std::size_t r = range.size();
    if (r == 0) {
        // L_G = 0: the sandwich only constrains L_H through containment.
        c.lo = c.hi = 1.0;
        finish(c, epsilon);
        return c;
    }
    Matrix u(n, r);
    std::vector<double> inv_sqrt(r);
    for (std::size_t q = 0; q < r; ++q) {
        inv_sqrt[q] = 1.0 / std::sqrt(eg.values[range[q]]);
        for (std::size_t i = 0; i < n; ++i) u(i, q) = eg.vectors(i, range[q]);
    }
    Matrix mm = matmul_tn(u, matmul(l_h.matrix(), u));
    for (std::size_t a = 0; a < r; ++a)
        for (std::size_t b = 0; b < r; ++b) mm(a, b) *= inv_sqrt[a] * inv_sqrt[b];
    for (std::size_t a = 0; a < r; ++a)
        for (std::size_t b = 0; b < a; ++b) mm(a, b) = mm(b, a) = 0.5 * (mm(a, b) + mm(b, a));
    const auto em = sym_eig(SymMatrix::from(mm));
    c.lo = em.values.front();
    c.hi = em.values.back();
    finish(c, epsilon);
    return c;
}

double grammian_min_eig(const WeightedGraph& g)
{
    if (g.n() > 60) throw CapExceeded(fmt::format("grammian_min_eig: n = {} exceeds 60", g.n()));
    if (g.m() == 0) throw InvalidInput("grammian_min_eig: graph has no edges");
    const std::size_t m = g.m();
    Matrix a(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) a(i, j) = edge_atom_inner(g.edge(i), g.edge(j));
    return sym_eig(SymMatrix::from(a)).values.front();
}

ResidualReport residual_diagnostics(double trace_lg, double frob_lg_sq, const std::vector<double>& history,
                                    const SymMatrix* final_residual)
{
    ResidualReport rep;
    const double ratio = trace_lg > 0.0 ? frob_lg_sq / (trace_lg * trace_lg) : 0.0;
    rep.bound_holds.assign(history.size(), true);
    rep.bound.assign(history.size(), frob_lg_sq);
    for (std::size_t i = 1; i < history.size(); ++i) {
        const double b = frob_lg_sq / (1.0 + static_cast<double>(i - 1) * ratio);
        rep.bound[i] = b;
        rep.bound_holds[i] = history[i] <= b + 1e-8 * frob_lg_sq;
        rep.all_hold = rep.all_hold && rep.bound_holds[i];
    }
    if (final_residual != nullptr) {
        const double fro = frobenius_norm(final_residual->matrix());
        if (fro > 0.0) {
            const double s = spectral_norm(*final_residual);
            rep.spectral_ratio = s * s / (fro * fro);
        }
    }
    return rep;
}

}  // namespace uga
