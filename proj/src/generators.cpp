#include "uga/generators.hpp"

#include "uga/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <random>

namespace uga {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t trial)
{
    return splitmix64(seed ^ splitmix64(trial + 0x9E3779B97F4A7C15ULL));
}

WeightedGraph gen_er_weighted(std::size_t n, double p, WeightDist dist, std::uint64_t seed)
{
    if (n < 2) throw InvalidInput(fmt::format("gen_er_weighted: n must be >= 2, got {}", n));
    if (!(p > 0.0 && p <= 1.0)) throw InvalidInput(fmt::format("gen_er_weighted: p must lie in (0, 1], got {}", p));
    if (!(dist.lambda > 0.0 && std::isfinite(dist.lambda)))
        throw InvalidInput(fmt::format("gen_er_weighted: lambda must be positive, got {}", dist.lambda));

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::poisson_distribution<long long> poisson(dist.lambda);
    std::exponential_distribution<double> expo(1.0 / dist.lambda);
    auto weight = [&] {
        double w = 0.0;
        do {
            w = dist.kind == WeightKind::Poisson ? static_cast<double>(poisson(rng)) : expo(rng);
        } while (!(w > 0.0));
        return w;
    };

    std::vector<Edge> edges;
    for (std::uint32_t u = 0; u < n; ++u)
        for (std::uint32_t v = u + 1; v < n; ++v)
            if (coin(rng) < p) edges.push_back({u, v, weight()});
    return WeightedGraph::from_edges(n, std::move(edges));
}

std::vector<std::size_t> balanced_sizes(std::size_t n, std::size_t k)
{
    if (k == 0 || k > n) throw InvalidInput(fmt::format("balanced_sizes: need 1 <= k <= n, got k = {}, n = {}", k, n));
    std::vector<std::size_t> sizes(k, n / k);
    for (std::size_t i = 0; i < n % k; ++i) ++sizes[i];
    return sizes;
}

PlantedGraph gen_sbm(const SbmSpec& spec, std::uint64_t seed)
{
    if (!(spec.q >= 0.0 && spec.q < spec.p && spec.p <= 1.0))
        throw InvalidInput(fmt::format("gen_sbm: need 0 <= q < p <= 1, got p = {}, q = {}", spec.p, spec.q));
    const auto sizes = spec.sizes.empty() ? balanced_sizes(spec.n, spec.k) : spec.sizes;
    if (sizes.size() != spec.k) throw InvalidInput("gen_sbm: sizes must have k entries");
    std::size_t total = 0;
    for (std::size_t s : sizes) {
        if (s == 0) throw InvalidInput("gen_sbm: empty cluster");
        total += s;
    }
    if (total != spec.n) throw InvalidInput(fmt::format("gen_sbm: sizes sum to {}, expected n = {}", total, spec.n));

    PlantedGraph out;
    out.k = spec.k;
    out.labels.reserve(spec.n);
    for (std::size_t c = 0; c < spec.k; ++c) out.labels.insert(out.labels.end(), sizes[c], c);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<Edge> edges;
    for (std::uint32_t u = 0; u < spec.n; ++u)
        for (std::uint32_t v = u + 1; v < spec.n; ++v) {
            const double prob = out.labels[u] == out.labels[v] ? spec.p : spec.q;
            if (coin(rng) < prob) edges.push_back({u, v, 1.0});
        }
    out.graph = WeightedGraph::from_edges(spec.n, std::move(edges));
    return out;
}

IsotropicSet gen_isotropic(std::size_t n, std::size_t m, std::uint64_t seed)
{
    if (n == 0 || m < n) throw InvalidInput(fmt::format("gen_isotropic: need m >= n >= 1, got m = {}, n = {}", m, n));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Matrix g(m, n);
    for (double& x : g.data()) x = nd(rng);
    return IsotropicSet::from_rows(qr_orthonormal_columns(g), true);
}

LsqInstance gen_lsq_instance(std::size_t m, std::size_t n, std::uint64_t seed, double noise)
{
    if (n == 0 || m <= n) throw InvalidInput(fmt::format("gen_lsq_instance: need m > n >= 1, got m = {}, n = {}", m, n));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    LsqInstance inst;
    inst.a = Matrix(m, n);
    for (double& x : inst.a.data()) x = nd(rng);
    inst.x_star.resize(n);
    for (double& x : inst.x_star) x = nd(rng);
    inst.b = matvec(inst.a, inst.x_star);
    for (double& x : inst.b) x += noise * nd(rng);
    return inst;
}

}  // namespace uga
