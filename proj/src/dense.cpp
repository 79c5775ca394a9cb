#include "uga/dense.hpp"

#include "uga/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace uga {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw InvalidInput(fmt::format("{}: shape mismatch {}x{} vs {}x{}", what, a.rows(), a.cols(),
                                       b.rows(), b.cols()));
}

double sign_of(double x) { return x < 0 ? -1.0 : 1.0; }

}  // namespace

// --- Matrix ------------------------------------------------------------------

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill)
{
}

Matrix Matrix::identity(std::size_t n)
{
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

std::vector<double> Matrix::column(std::size_t j) const
{
    std::vector<double> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
}

Matrix Matrix::transpose() const
{
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

// --- SymMatrix ---------------------------------------------------------------

SymMatrix SymMatrix::from(const Matrix& a)
{
    if (a.rows() != a.cols())
        throw InvalidInput(fmt::format("SymMatrix: not square ({}x{})", a.rows(), a.cols()));
    const std::size_t n = a.rows();
    double amax = 0.0;
    for (double x : a.data()) {
        if (!std::isfinite(x)) throw InvalidInput("SymMatrix: non-finite entry");
        amax = std::max(amax, std::abs(x));
    }
    const double tol = 1e-12 * std::max(1.0, amax);
    SymMatrix s(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.a_(i, i) = a(i, i);
        for (std::size_t j = i + 1; j < n; ++j) {
            if (std::abs(a(i, j) - a(j, i)) > tol)
                throw InvalidInput(fmt::format("SymMatrix: asymmetric at ({}, {})", i, j));
            const double avg = 0.5 * (a(i, j) + a(j, i));
            s.a_(i, j) = avg;
            s.a_(j, i) = avg;
        }
    }
    return s;
}

SymMatrix SymMatrix::identity(std::size_t n)
{
    SymMatrix s(n);
    for (std::size_t i = 0; i < n; ++i) s.a_(i, i) = 1.0;
    return s;
}

void SymMatrix::add_sym(std::size_t i, std::size_t j, double v)
{
    a_(i, j) += v;
    if (i != j) a_(j, i) += v;
}

void SymMatrix::scale(double s)
{
    for (double& x : a_.data()) x *= s;
}

// --- products and norms ------------------------------------------------------

double frobenius_inner(const Matrix& a, const Matrix& b)
{
    require_same_shape(a, b, "frobenius_inner");
    return dot(a.data(), b.data());
}

double frobenius_inner(const SymMatrix& a, const SymMatrix& b)
{
    if (a.dim() != b.dim())
        throw InvalidInput(fmt::format("frobenius_inner: dimension mismatch {} vs {}", a.dim(), b.dim()));
    return frobenius_inner(a.matrix(), b.matrix());
}

double frobenius_norm(const Matrix& a) { return std::sqrt(dot(a.data(), a.data())); }

double trace(const SymMatrix& a)
{
    double t = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) t += a(i, i);
    return t;
}

double dot(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size()) throw InvalidInput("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

Matrix matmul(const Matrix& a, const Matrix& b)
{
    if (a.cols() != b.rows()) throw InvalidInput("matmul: inner dimension mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto ci = c.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            auto bk = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b)
{
    if (a.rows() != b.rows()) throw InvalidInput("matmul_tn: row count mismatch");
    Matrix c(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        auto ak = a.row(k);
        auto bk = b.row(k);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double aki = ak[i];
            if (aki == 0.0) continue;
            auto ci = c.row(i);
            for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aki * bk[j];
        }
    }
    return c;
}

std::vector<double> matvec(const Matrix& a, std::span<const double> x)
{
    if (a.cols() != x.size()) throw InvalidInput("matvec: dimension mismatch");
    std::vector<double> y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
    return y;
}

std::vector<double> matvec_t(const Matrix& a, std::span<const double> x)
{
    if (a.rows() != x.size()) throw InvalidInput("matvec_t: dimension mismatch");
    std::vector<double> y(a.cols(), 0.0);
    for (std::size_t k = 0; k < a.rows(); ++k) {
        auto ak = a.row(k);
        for (std::size_t j = 0; j < a.cols(); ++j) y[j] += ak[j] * x[k];
    }
    return y;
}

SymMatrix gram(const Matrix& a)
{
    const std::size_t n = a.cols();
    Matrix g(n, n);
    for (std::size_t k = 0; k < a.rows(); ++k) {
        auto ak = a.row(k);
        for (std::size_t i = 0; i < n; ++i) {
            const double aki = ak[i];
            if (aki == 0.0) continue;
            auto gi = g.row(i);
            for (std::size_t j = i; j < n; ++j) gi[j] += aki * ak[j];
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
    return SymMatrix::from(g);
}

Matrix subtract(const Matrix& a, const Matrix& b)
{
    require_same_shape(a, b, "subtract");
    Matrix c = a;
    auto cd = c.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < cd.size(); ++i) cd[i] -= bd[i];
    return c;
}

// --- symmetric eigensolver ---------------------------------------------------
//
// Householder reduction to tridiagonal form (accumulating the transform in v),
// then QL with implicit shifts on the tridiagonal. Row-major v; column j of the
// result is the eigenvector for d[j].

namespace {

void tridiagonalize(Matrix& v, std::vector<double>& d, std::vector<double>& e)
{
    const std::size_t n = v.rows();
    for (std::size_t j = 0; j < n; ++j) d[j] = v(n - 1, j);

    for (std::size_t i = n - 1; i > 0; --i) {
        double scale = 0.0;
        double h = 0.0;
        for (std::size_t k = 0; k < i; ++k) scale += std::abs(d[k]);
        if (scale == 0.0) {
            e[i] = d[i - 1];
            for (std::size_t j = 0; j < i; ++j) {
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
                v(j, i) = 0.0;
            }
        } else {
            for (std::size_t k = 0; k < i; ++k) {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            double f = d[i - 1];
            double g = std::sqrt(h);
            if (f > 0) g = -g;
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;

            for (std::size_t j = 0; j < i; ++j) {
                f = d[j];
                v(j, i) = f;
                g = e[j] + v(j, j) * f;
                for (std::size_t k = j + 1; k < i; ++k) {
                    g += v(k, j) * d[k];
                    e[k] += v(k, j) * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for (std::size_t j = 0; j < i; ++j) {
                e[j] /= h;
                f += e[j] * d[j];
            }
            const double hh = f / (h + h);
            for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
            for (std::size_t j = 0; j < i; ++j) {
                f = d[j];
                g = e[j];
                for (std::size_t k = j; k < i; ++k) v(k, j) -= (f * e[k] + g * d[k]);
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
            }
        }
        d[i] = h;
    }

    for (std::size_t i = 0; i + 1 < n; ++i) {
        v(n - 1, i) = v(i, i);
        v(i, i) = 1.0;
        const double h = d[i + 1];
        if (h != 0.0) {
            for (std::size_t k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
            for (std::size_t j = 0; j <= i; ++j) {
                double g = 0.0;
                for (std::size_t k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
                for (std::size_t k = 0; k <= i; ++k) v(k, j) -= g * d[k];
            }
        }
        for (std::size_t k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
    }
    for (std::size_t j = 0; j < n; ++j) {
        d[j] = v(n - 1, j);
        v(n - 1, j) = 0.0;
    }
    v(n - 1, n - 1) = 1.0;
    e[0] = 0.0;
}

void tridiagonal_ql(Matrix& v, std::vector<double>& d, std::vector<double>& e)
{
    const std::size_t n = v.rows();
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    const std::size_t cap = 30 * n;
    std::size_t sweeps = 0;
    double f = 0.0;
    double tst1 = 0.0;
    const double eps = std::ldexp(1.0, -52);

    for (std::size_t l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        std::size_t m = l;
        while (m < n) {
            if (std::abs(e[m]) <= eps * tst1) break;
            ++m;
        }
        if (m > l) {
            do {
                if (++sweeps > cap)
                    throw ConvergenceFailure(fmt::format(
                        "sym_eig: no convergence after {} QL sweeps (n = {}, stuck at index {}, "
                        "off-diagonal {:.3e})",
                        cap, n, l, e[l]));
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
                f += h;

                p = d[m];
                double c = 1.0, c2 = 1.0, c3 = 1.0;
                const double el1 = e[l + 1];
                double s = 0.0, s2 = 0.0;
                for (std::size_t ii = m; ii-- > l;) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[ii];
                    h = c * p;
                    r = std::hypot(p, e[ii]);
                    e[ii + 1] = s * r;
                    s = e[ii] / r;
                    c = p / r;
                    p = c * d[ii] - s * g;
                    d[ii + 1] = h + s * (c * g + s * d[ii]);
                    for (std::size_t k = 0; k < n; ++k) {
                        h = v(k, ii + 1);
                        v(k, ii + 1) = s * v(k, ii) + c * h;
                        v(k, ii) = c * v(k, ii) - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > eps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

}  // namespace

EigenDecomposition sym_eig(const SymMatrix& a)
{
    const std::size_t n = a.dim();
    if (n == 0) return {};
    Matrix v = a.matrix();
    std::vector<double> d(n), e(n);
    tridiagonalize(v, d, e);
    tridiagonal_ql(v, d, e);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });

    EigenDecomposition out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = d[order[j]];
        for (std::size_t k = 0; k < n; ++k) out.vectors(k, j) = v(k, order[j]);
    }
    return out;
}

double spectral_norm(const SymMatrix& a)
{
    if (a.dim() == 0) return 0.0;
    const auto eig = sym_eig(a);
    return std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
}

// --- Cholesky ----------------------------------------------------------------

Matrix cholesky(const SymMatrix& b)
{
    const std::size_t n = b.dim();
    double dmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) dmax = std::max(dmax, b(i, i));
    const double tol = 1e-12 * dmax;

    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double pivot = b(j, j);
        for (std::size_t k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
        if (!(pivot > tol) || dmax <= 0.0)
            throw NotPositiveDefinite(
                fmt::format("cholesky: pivot {:.3e} at column {} below tolerance {:.3e}", pivot, j, tol));
        const double ljj = std::sqrt(pivot);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = b(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    return l;
}

std::vector<double> forward_substitute(const Matrix& lower, std::span<const double> rhs)
{
    const std::size_t n = lower.rows();
    if (rhs.size() != n) throw InvalidInput("forward_substitute: dimension mismatch");
    std::vector<double> y(rhs.begin(), rhs.end());
    for (std::size_t i = 0; i < n; ++i) {
        double s = y[i];
        for (std::size_t k = 0; k < i; ++k) s -= lower(i, k) * y[k];
        y[i] = s / lower(i, i);
    }
    return y;
}

std::vector<double> backward_substitute_t(const Matrix& lower, std::span<const double> rhs)
{
    const std::size_t n = lower.rows();
    if (rhs.size() != n) throw InvalidInput("backward_substitute_t: dimension mismatch");
    std::vector<double> x(rhs.begin(), rhs.end());
    for (std::size_t i = n; i-- > 0;) {
        double s = x[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= lower(k, i) * x[k];
        x[i] = s / lower(i, i);
    }
    return x;
}

std::vector<double> cholesky_solve(const SymMatrix& b, std::span<const double> rhs)
{
    const Matrix l = cholesky(b);
    return backward_substitute_t(l, forward_substitute(l, rhs));
}

// --- Householder QR ----------------------------------------------------------

HouseholderQr::HouseholderQr(Matrix a) : qr_(std::move(a))
{
    const std::size_t m = qr_.rows();
    const std::size_t n = qr_.cols();
    if (m < n) throw InvalidInput(fmt::format("HouseholderQr: need rows >= cols, got {}x{}", m, n));
    beta_.assign(n, 0.0);
    diag_.assign(n, 0.0);

    for (std::size_t k = 0; k < n; ++k) {
        double norm_sq = 0.0;
        for (std::size_t i = k; i < m; ++i) norm_sq += qr_(i, k) * qr_(i, k);
        const double norm = std::sqrt(norm_sq);
        if (norm == 0.0) {
            diag_[k] = 0.0;
            beta_[k] = 0.0;
            continue;
        }
        const double alpha = -sign_of(qr_(k, k)) * norm;
        qr_(k, k) -= alpha;
        double vtv = 0.0;
        for (std::size_t i = k; i < m; ++i) vtv += qr_(i, k) * qr_(i, k);
        beta_[k] = 2.0 / vtv;
        diag_[k] = alpha;

        for (std::size_t j = k + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k; i < m; ++i) s += qr_(i, k) * qr_(i, j);
            s *= beta_[k];
            for (std::size_t i = k; i < m; ++i) qr_(i, j) -= s * qr_(i, k);
        }
    }
}

Matrix HouseholderQr::thin_q() const
{
    const std::size_t m = rows();
    const std::size_t n = cols();
    Matrix q(m, n);
    for (std::size_t j = 0; j < n; ++j) q(j, j) = 1.0;
    for (std::size_t k = n; k-- > 0;) {
        if (beta_[k] == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k; i < m; ++i) s += qr_(i, k) * q(i, j);
            s *= beta_[k];
            if (s == 0.0) continue;
            for (std::size_t i = k; i < m; ++i) q(i, j) -= s * qr_(i, k);
        }
    }
    return q;
}

Matrix HouseholderQr::r() const
{
    const std::size_t n = cols();
    Matrix r(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        r(i, i) = diag_[i];
        for (std::size_t j = i + 1; j < n; ++j) r(i, j) = qr_(i, j);
    }
    return r;
}

bool HouseholderQr::rank_deficient() const
{
    double dmax = 0.0;
    for (double x : diag_) dmax = std::max(dmax, std::abs(x));
    if (dmax == 0.0) return cols() > 0;
    return std::any_of(diag_.begin(), diag_.end(), [&](double x) { return std::abs(x) <= 1e-12 * dmax; });
}

std::vector<double> HouseholderQr::solve_least_squares(std::span<const double> b) const
{
    const std::size_t m = rows();
    const std::size_t n = cols();
    if (b.size() != m) throw InvalidInput("solve_least_squares: rhs length mismatch");
    if (rank_deficient()) throw RankDeficient("solve_least_squares: matrix is column rank deficient");

    std::vector<double> y(b.begin(), b.end());
    for (std::size_t k = 0; k < n; ++k) {
        double s = 0.0;
        for (std::size_t i = k; i < m; ++i) s += qr_(i, k) * y[i];
        s *= beta_[k];
        for (std::size_t i = k; i < m; ++i) y[i] -= s * qr_(i, k);
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = y[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= qr_(i, j) * x[j];
        x[i] = s / diag_[i];
    }
    return x;
}

Matrix qr_orthonormal_columns(const Matrix& g)
{
    HouseholderQr qr(g);
    if (qr.rank_deficient())
        throw RankDeficient(fmt::format("qr_orthonormal_columns: {}x{} input is rank deficient", g.rows(), g.cols()));
    return qr.thin_q();
}

// --- thin spectral factor ----------------------------------------------------

ThinFactor thin_spectral_factor(const Matrix& a)
{
    const std::size_t n = a.cols();
    for (double x : a.data())
        if (!std::isfinite(x)) throw InvalidInput("thin_spectral_factor: non-finite entry");

    // w holds the columns of the working matrix as rows, so a^T a = w w^T.
    Matrix w;
    if (a.rows() > n)
        w = HouseholderQr(a).r().transpose();
    else
        w = a.transpose();
    const std::size_t k = w.cols();

    Matrix v = Matrix::identity(n);  // rows of v are the accumulated right rotations, transposed
    const double eps = std::ldexp(1.0, -52);
    const double negligible = eps * eps * dot(w.data(), w.data());
    const int max_sweeps = 60;
    bool converged = false;
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        converged = true;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                auto wp = w.row(p);
                auto wq = w.row(q);
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t i = 0; i < k; ++i) {
                    alpha += wp[i] * wp[i];
                    beta += wq[i] * wq[i];
                    gamma += wp[i] * wq[i];
                }
                if (alpha <= negligible || beta <= negligible) continue;
                if (std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
                converged = false;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = sign_of(zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < k; ++i) {
                    const double x = wp[i];
                    const double y = wq[i];
                    wp[i] = c * x - s * y;
                    wq[i] = s * x + c * y;
                }
                auto vp = v.row(p);
                auto vq = v.row(q);
                for (std::size_t i = 0; i < n; ++i) {
                    const double x = vp[i];
                    const double y = vq[i];
                    vp[i] = c * x - s * y;
                    vq[i] = s * x + c * y;
                }
            }
        }
    }
    if (!converged)
        throw ConvergenceFailure(fmt::format("thin_spectral_factor: one-sided Jacobi did not converge in {} sweeps",
                                             max_sweeps));

    std::vector<double> sigma(n);
    for (std::size_t j = 0; j < n; ++j) sigma[j] = norm2(w.row(j));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

    ThinFactor out;
    if (n == 0 || sigma[order[0]] == 0.0) {
        out.v = Matrix(n, 0);
        return out;
    }
    const double cutoff = sigma[order[0]] * static_cast<double>(n) * 1e-12;
    std::size_t r = 0;
    while (r < n && sigma[order[r]] > cutoff) ++r;
    out.v = Matrix(n, r);
    out.s.resize(r);
    for (std::size_t j = 0; j < r; ++j) {
        out.s[j] = sigma[order[j]];
        for (std::size_t i = 0; i < n; ++i) out.v(i, j) = v(order[j], i);
    }
    return out;
}

// --- 2x2 solve ---------------------------------------------------------------

std::optional<std::array<double, 2>> solve_2x2(const std::array<std::array<double, 2>, 2>& m,
                                               const std::array<double, 2>& rhs, double tol)
{
    const double fro_sq = m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] + m[1][1] * m[1][1];
    const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if (!(std::abs(det) > tol * fro_sq)) return std::nullopt;
    return std::array<double, 2>{(rhs[0] * m[1][1] - m[0][1] * rhs[1]) / det,
                                 (m[0][0] * rhs[1] - m[1][0] * rhs[0]) / det};
}

// --- matrix files ------------------------------------------------------------

Matrix read_matrix(std::istream& in)
{
    std::string line;
    std::size_t lineno = 0;
    std::size_t rows = 0, cols = 0;
    bool have_header = false;
    Matrix a;
    std::size_t r = 0;

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;

        std::istringstream ss(line);
        if (!have_header) {
            long long rr = -1, cc = -1;
            if (!(ss >> rr >> cc) || rr < 0 || cc < 0)
                throw ParseError("expected header 'rows cols'", lineno);
            std::string extra;
            if (ss >> extra) throw ParseError("trailing tokens after header", lineno);
            rows = static_cast<std::size_t>(rr);
            cols = static_cast<std::size_t>(cc);
            a = Matrix(rows, cols);
            have_header = true;
            continue;
        }
        if (r >= rows) throw ParseError(fmt::format("more than {} data rows", rows), lineno);
        std::string tok;
        std::size_t c = 0;
        while (ss >> tok) {
            if (c >= cols) throw ParseError(fmt::format("row has more than {} entries", cols), lineno);
            double x = 0.0;
            const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
            if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(x))
                throw ParseError(fmt::format("bad number '{}'", tok), lineno);
            a(r, c++) = x;
        }
        if (c != cols) throw ParseError(fmt::format("row has {} entries, expected {}", c, cols), lineno);
        ++r;
    }
    if (!have_header) throw ParseError("missing header", lineno);
    if (r != rows) throw ParseError(fmt::format("expected {} data rows, found {}", rows, r), lineno);
    return a;
}

Matrix read_matrix_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path);
    return read_matrix(in);
}

void write_matrix(std::ostream& out, const Matrix& a, std::span<const std::string> comments)
{
    for (const auto& c : comments) out << "# " << c << '\n';
    out << a.rows() << ' ' << a.cols() << '\n';
    std::string buf;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        buf.clear();
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (j) buf.push_back(' ');
            fmt::format_to(std::back_inserter(buf), "{:.17g}", a(i, j));
        }
        buf.push_back('\n');
        out << buf;
    }
}

std::size_t dense_cap()
{
    const char* env = std::getenv("UGA_DENSE_CAP");
    if (env == nullptr || *env == '\0') return 4000;
    std::size_t cap = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), cap);
    if (ec != std::errc() || ptr != s.data() + s.size() || cap == 0)
        throw InvalidInput(fmt::format("UGA_DENSE_CAP must be a positive integer, got '{}'", s));
    return cap;
}

}  // namespace uga
