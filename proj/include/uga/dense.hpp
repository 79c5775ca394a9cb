#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace uga {

/// Row-major dense real matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    std::vector<double> column(std::size_t j) const;
    Matrix transpose() const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Square symmetric matrix. Symmetry and finiteness are checked on construction
/// from a general Matrix; mutation goes through add_sym so it is preserved.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(std::size_t n) : a_(n, n) {}

    /// Validates |A(i,j) - A(j,i)| <= 1e-12 * max(1, max|A|) and finiteness,
    /// then stores the exactly symmetrized average.
    static SymMatrix from(const Matrix& a);
    static SymMatrix identity(std::size_t n);

    std::size_t dim() const noexcept { return a_.rows(); }
    double operator()(std::size_t i, std::size_t j) const { return a_(i, j); }

    /// A(i,j) += v and A(j,i) += v (once when i == j).
    void add_sym(std::size_t i, std::size_t j, double v);
    void scale(double s);

    const Matrix& matrix() const noexcept { return a_; }

private:
    Matrix a_;
};

struct EigenDecomposition {
    std::vector<double> values;  ///< ascending
    Matrix vectors;              ///< column j pairs with values[j]
};

struct ThinFactor {
    Matrix v;               ///< n x r, orthonormal columns
    std::vector<double> s;  ///< r singular values, descending, all positive
    std::size_t rank() const noexcept { return s.size(); }
};

// --- products and norms ----------------------------------------------------

double frobenius_inner(const Matrix& a, const Matrix& b);
double frobenius_inner(const SymMatrix& a, const SymMatrix& b);
double frobenius_norm(const Matrix& a);
double trace(const SymMatrix& a);
double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);

Matrix matmul(const Matrix& a, const Matrix& b);
/// a^T b without forming the transpose.
Matrix matmul_tn(const Matrix& a, const Matrix& b);
std::vector<double> matvec(const Matrix& a, std::span<const double> x);
/// a^T x.
std::vector<double> matvec_t(const Matrix& a, std::span<const double> x);
/// a^T a as a symmetric matrix.
SymMatrix gram(const Matrix& a);
Matrix subtract(const Matrix& a, const Matrix& b);

// --- factorizations --------------------------------------------------------

/// Householder tridiagonalization followed by implicit QL. At most 30 * n
/// QL sweeps in total; exceeding that throws ConvergenceFailure.
EigenDecomposition sym_eig(const SymMatrix& a);

/// Largest |eigenvalue| of a symmetric matrix.
double spectral_norm(const SymMatrix& a);

/// Lower-triangular L with L L^T = b. Throws NotPositiveDefinite when a pivot
/// drops to <= 1e-12 * max diagonal.
Matrix cholesky(const SymMatrix& b);

/// Solves L y = rhs for lower-triangular L.
std::vector<double> forward_substitute(const Matrix& lower, std::span<const double> rhs);
/// Solves L^T x = rhs for lower-triangular L.
std::vector<double> backward_substitute_t(const Matrix& lower, std::span<const double> rhs);
/// Solves b x = rhs through its Cholesky factor.
std::vector<double> cholesky_solve(const SymMatrix& b, std::span<const double> rhs);

/// V, s with a^T a = V diag(s^2) V^T, dropping singular values below
/// s_max * n * 1e-12. Householder QR (when rows > cols) then one-sided Jacobi.
ThinFactor thin_spectral_factor(const Matrix& a);

/// Cramer solve of a 2x2 system, or nullopt when |det| <= tol * ||m||_F^2.
std::optional<std::array<double, 2>> solve_2x2(const std::array<std::array<double, 2>, 2>& m,
                                               const std::array<double, 2>& rhs,
                                               double tol = 1e-12);

/// Householder QR of an m x n matrix with m >= n.
class HouseholderQr {
public:
    explicit HouseholderQr(Matrix a);

    std::size_t rows() const noexcept { return qr_.rows(); }
    std::size_t cols() const noexcept { return qr_.cols(); }

    /// m x n factor with orthonormal columns.
    Matrix thin_q() const;
    /// n x n upper-triangular factor.
    Matrix r() const;
    /// True when some |R(j,j)| <= 1e-12 * max |R(i,i)|.
    bool rank_deficient() const;
    /// argmin ||a x - b||_2; throws RankDeficient.
    std::vector<double> solve_least_squares(std::span<const double> b) const;

private:
    Matrix qr_;                 // R above the diagonal, Householder vectors below
    std::vector<double> beta_;  // reflector scalings
    std::vector<double> diag_;  // diagonal of R
};

/// Orthonormal basis of the column span of g (m >= n). Throws RankDeficient.
Matrix qr_orthonormal_columns(const Matrix& g);

// --- dense matrix file format ----------------------------------------------
//
//   # comment lines anywhere
//   rows cols
//   a00 a01 ...
//   ...

Matrix read_matrix(std::istream& in);
Matrix read_matrix_file(const std::string& path);
void write_matrix(std::ostream& out, const Matrix& a, std::span<const std::string> comments = {});

/// Dense verification cap, overridable through UGA_DENSE_CAP (default 4000).
std::size_t dense_cap();

}  // namespace uga
