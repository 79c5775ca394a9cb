#pragma once

// Seeded instance generators shared by the unit and acceptance tests.

#include "uga/dense.hpp"
#include "uga/graph.hpp"
#include "uga/graph_sparsify.hpp"
#include "uga/subset_select.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include <cstdint>
#include <random>

namespace uga::testing {

inline Matrix gaussian_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng)
{
    std::normal_distribution<double> nd;
    Matrix a(rows, cols);
    for (double& x : a.data()) x = nd(rng);
    return a;
}

inline SymMatrix random_symmetric(std::size_t n, std::mt19937_64& rng, double scale = 1.0)
{
    std::uniform_real_distribution<double> ud(-scale, scale);
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = ud(rng);
    return SymMatrix::from(a);
}

inline SymMatrix reconstruct(const EigenDecomposition& e)
{
    const std::size_t n = e.values.size();
    Matrix vd = e.vectors;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) vd(i, j) *= e.values[j];
    Matrix r = matmul(vd, e.vectors.transpose());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) r(i, j) = r(j, i) = 0.5 * (r(i, j) + r(j, i));
    return SymMatrix::from(r);
}

inline double orthonormality_error(const Matrix& q)
{
    return frobenius_norm(subtract(matmul_tn(q, q), Matrix::identity(q.cols())));
}

/// G(n, p) with uniform weights in [0.5, 2]; at least one edge.
inline WeightedGraph random_graph(std::size_t n, double p, std::mt19937_64& rng)
{
    std::bernoulli_distribution coin(p);
    std::uniform_real_distribution<double> wd(0.5, 2.0);
    std::vector<Edge> edges;
    for (std::uint32_t u = 0; u < n; ++u)
        for (std::uint32_t v = u + 1; v < n; ++v)
            if (coin(rng)) edges.push_back({u, v, wd(rng)});
    if (edges.empty()) edges.push_back({0, 1, wd(rng)});
    return WeightedGraph::from_edges(n, edges);
}

/// Random recursive tree with uniform weights in [0.5, 2].
inline WeightedGraph random_tree(std::size_t n, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> wd(0.5, 2.0);
    std::vector<Edge> edges;
    for (std::uint32_t v = 1; v < n; ++v) {
        std::uniform_int_distribution<std::uint32_t> parent(0, v - 1);
        edges.push_back({parent(rng), v, wd(rng)});
    }
    return WeightedGraph::from_edges(n, edges);
}

/// sum_e w_e (e_u - e_v)(e_u - e_v)^T, built entry by entry.
inline Matrix oracle_laplacian(std::size_t n, const std::vector<Edge>& edges, const std::vector<double>& w)
{
    Matrix l(n, n);
    for (std::size_t q = 0; q < edges.size(); ++q) {
        const auto [u, v, unused] = edges[q];
        (void)unused;
        l(u, u) += w[q];
        l(v, v) += w[q];
        l(u, v) -= w[q];
        l(v, u) -= w[q];
    }
    return l;
}

inline Matrix oracle_laplacian(const WeightedGraph& g)
{
    std::vector<double> w;
    for (const Edge& e : g.edges()) w.push_back(e.w);
    return oracle_laplacian(g.n(), g.edges(), w);
}

inline double frob_sq(const Matrix& a)
{
    double s = 0.0;
    for (double x : a.data()) s += x * x;
    return s;
}

inline double inner(const Matrix& a, const Matrix& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) s += a.data()[i] * b.data()[i];
    return s;
}

/// |a - b| <= tol * max(|b|, floor).
inline bool close_rel(double a, double b, double tol, double floor = 1.0)
{
    return std::abs(a - b) <= tol * std::max(std::abs(b), floor);
}

// Dense L = sum c_k v_k v_k^T straight from the coefficient vector.
inline Matrix dense_l(const IsotropicSet& set, const std::vector<double>& c)
{
    Matrix l(set.n(), set.n());
    for (std::size_t k = 0; k < set.m(); ++k)
        for (std::size_t a = 0; a < set.n(); ++a)
            for (std::size_t b = 0; b < set.n(); ++b) l(a, b) += c[k] * set.vectors()(k, a) * set.vectors()(k, b);
    return l;
}

inline double dense_residual_sq(const IsotropicSet& set, const std::vector<double>& c)
{
    Matrix r = dense_l(set, c);
    for (std::size_t i = 0; i < set.n(); ++i) r(i, i) -= 1.0;
    return frob_sq(r);
}

// Dense L_H = sum_e C(e) phi_e read from a state's coefficients.
inline Matrix dense_lh(const SparsifyState& s)
{
    std::vector<double> w(s.graph().m());
    for (std::size_t e = 0; e < w.size(); ++e) w[e] = s.coefficient(e);
    return oracle_laplacian(s.graph().n(), s.graph().edges(), w);
}

inline double atom_inner(const Matrix& l, const Edge& e) { return l(e.u, e.u) + l(e.v, e.v) - 2.0 * l(e.u, e.v); }

}  // namespace uga::testing
