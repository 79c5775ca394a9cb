#include "uga/cluster_eval.hpp"

#include "uga/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace uga {

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

struct KmeansRun {
    std::vector<std::size_t> labels;
    double inertia = 0.0;
};

KmeansRun lloyd(const Matrix& x, std::size_t k, std::mt19937_64& rng, std::size_t max_iterations)
{
    const std::size_t n = x.rows();
    const std::size_t dim = x.cols();
    Matrix centers(k, dim);

    // k-means++ seeding
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t first = pick(rng);
    std::copy(x.row(first).begin(), x.row(first).end(), centers.row(0).begin());
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(x.row(i), centers.row(0));
    for (std::size_t c = 1; c < k; ++c) {
        const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
        std::size_t chosen = pick(rng);
        if (total > 0.0) {
            double r = unit(rng) * total;
            for (std::size_t i = 0; i < n; ++i) {
                r -= d2[i];
                if (r < 0.0 || i + 1 == n) {
                    chosen = i;
                    break;
                }
            }
        }
        std::copy(x.row(chosen).begin(), x.row(chosen).end(), centers.row(c).begin());
        for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], sq_dist(x.row(i), centers.row(c)));
    }

    KmeansRun run;
    run.labels.assign(n, 0);
    std::vector<std::size_t> counts(k);
    for (std::size_t it = 0; it < max_iterations; ++it) {
        bool changed = it == 0;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_d = sq_dist(x.row(i), centers.row(0));
            for (std::size_t c = 1; c < k; ++c) {
                const double d = sq_dist(x.row(i), centers.row(c));
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (run.labels[i] != best) {
                run.labels[i] = best;
                changed = true;
            }
            d2[i] = best_d;
        }
        if (!changed) break;

        centers = Matrix(k, dim);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++counts[run.labels[i]];
            auto ci = centers.row(run.labels[i]);
            const auto xi = x.row(i);
            for (std::size_t j = 0; j < dim; ++j) ci[j] += xi[j];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // Empty cluster: re-seed at the point farthest from its centroid.
                const std::size_t far = static_cast<std::size_t>(std::max_element(d2.begin(), d2.end()) - d2.begin());
                std::copy(x.row(far).begin(), x.row(far).end(), centers.row(c).begin());
                d2[far] = 0.0;
                continue;
            }
            for (double& v : centers.row(c)) v /= static_cast<double>(counts[c]);
        }
    }
    run.inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) run.inertia += sq_dist(x.row(i), centers.row(run.labels[i]));
    return run;
}

}  // namespace

ClusterAssignment kmeans(const Matrix& x, std::size_t k, std::uint64_t seed, std::size_t restarts,
                         std::size_t max_iterations)
{
    const std::size_t n = x.rows();
    if (k == 0 || k > n) throw InvalidInput(fmt::format("kmeans: need 1 <= k <= n, got k = {}, n = {}", k, n));
    if (k == 1) return {std::vector<std::size_t>(n, 0), 1};
    std::mt19937_64 rng(seed);
    KmeansRun best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < std::max<std::size_t>(restarts, 1); ++r) {
        KmeansRun run = lloyd(x, k, rng, max_iterations);
        if (run.inertia < best.inertia) best = std::move(run);
    }
    return {std::move(best.labels), k};
}

ClusterAssignment spectral_cluster(const SymMatrix& laplacian, std::size_t k, std::uint64_t seed)
{
    const std::size_t n = laplacian.dim();
    if (k == 0 || k > n) throw InvalidInput(fmt::format("spectral_cluster: need 1 <= k <= n, got k = {}, n = {}", k, n));
    if (k == 1) return {std::vector<std::size_t>(n, 0), 1};

    std::vector<double> scale(n, 1.0);
    for (std::size_t i = 0; i < n; ++i)
        if (laplacian(i, i) > 0.0) scale[i] = 1.0 / std::sqrt(laplacian(i, i));
    Matrix normalized(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) normalized(i, j) = scale[i] * laplacian(i, j) * scale[j];
    const auto eig = sym_eig(SymMatrix::from(normalized));

    Matrix emb(n, k);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < k; ++c) emb(i, c) = eig.vectors(i, c);
        const double len = norm2(emb.row(i));
        if (len > 0.0)
            for (double& v : emb.row(i)) v /= len;
    }
    return kmeans(emb, k, seed);
}

double cluster_accuracy(const ClusterAssignment& planted, const ClusterAssignment& found)
{
    const std::size_t n = planted.labels.size();
    const std::size_t k = planted.k;
    if (found.labels.size() != n) throw InvalidInput("cluster_accuracy: label vectors differ in length");
    if (found.k != k) throw InvalidInput("cluster_accuracy: cluster counts differ");
    if (k == 0 || n == 0) throw InvalidInput("cluster_accuracy: empty assignment");

    std::vector<double> overlap(k * k, 0.0);
    std::vector<double> size(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = planted.labels[i];
        const std::size_t b = found.labels[i];
        if (a >= k || b >= k) throw InvalidInput("cluster_accuracy: label out of range");
        overlap[a * k + b] += 1.0;
        size[a] += 1.0;
    }
    // ratio[i][j] = |C_i ∩ F_j| / |C_i|
    std::vector<double> ratio(k * k, 0.0);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b)
            if (size[a] > 0.0) ratio[a * k + b] = overlap[a * k + b] / size[a];

    double best = 0.0;
    if (k <= 8) {
        std::vector<std::size_t> sigma(k);
        std::iota(sigma.begin(), sigma.end(), 0);
        do {
            double s = 0.0;
            for (std::size_t a = 0; a < k; ++a) s += ratio[a * k + sigma[a]];
            best = std::max(best, s);
        } while (std::next_permutation(sigma.begin(), sigma.end()));
    } else {
        std::vector<char> row_used(k, 0), col_used(k, 0);
        for (std::size_t round = 0; round < k; ++round) {
            double top = -1.0;
            std::size_t ta = 0, tb = 0;
            for (std::size_t a = 0; a < k; ++a)
                for (std::size_t b = 0; b < k; ++b)
                    if (!row_used[a] && !col_used[b] && ratio[a * k + b] > top) {
                        top = ratio[a * k + b];
                        ta = a;
                        tb = b;
                    }
            row_used[ta] = col_used[tb] = 1;
            best += top;
        }
    }
    return best / static_cast<double>(k);
}

}  // namespace uga
