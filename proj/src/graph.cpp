#include "uga/graph.hpp"

#include "uga/error.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <unordered_set>

namespace uga {

WeightedGraph WeightedGraph::from_edges(std::size_t n, std::vector<Edge> edges)
{
    if (n > std::numeric_limits<std::uint32_t>::max()) throw InvalidInput("WeightedGraph: too many vertices");
    if (edges.size() > std::numeric_limits<std::uint32_t>::max()) throw InvalidInput("WeightedGraph: too many edges");

    WeightedGraph g;
    g.n_ = n;
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(edges.size() * 2);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        Edge& ed = edges[e];
        if (ed.u == ed.v) throw InvalidInput(fmt::format("edge {}: self-loop at vertex {}", e, ed.u));
        if (ed.u > ed.v) std::swap(ed.u, ed.v);
        if (ed.v >= n) throw InvalidInput(fmt::format("edge {}: vertex {} out of range (n = {})", e, ed.v, n));
        if (!(std::isfinite(ed.w) && ed.w > 0.0))
            throw InvalidInput(fmt::format("edge {} ({}, {}): weight {} is not strictly positive", e, ed.u, ed.v, ed.w));
        const std::uint64_t key = (std::uint64_t{ed.u} << 32) | ed.v;
        if (!seen.insert(key).second) throw InvalidInput(fmt::format("duplicate edge ({}, {})", ed.u, ed.v));
    }
    g.edges_ = std::move(edges);

    g.offsets_.assign(n + 1, 0);
    g.wdeg_.assign(n, 0.0);
    for (const Edge& ed : g.edges_) {
        ++g.offsets_[ed.u + 1];
        ++g.offsets_[ed.v + 1];
        g.wdeg_[ed.u] += ed.w;
        g.wdeg_[ed.v] += ed.w;
    }
    std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
    g.adj_.resize(2 * g.edges_.size());
    std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
    for (std::uint32_t e = 0; e < g.edges_.size(); ++e) {
        g.adj_[fill[g.edges_[e].u]++] = e;
        g.adj_[fill[g.edges_[e].v]++] = e;
    }
    return g;
}

double WeightedGraph::laplacian_frob_sq() const
{
    double s = 0.0;
    for (double d : wdeg_) s += d * d;
    for (const Edge& e : edges_) s += 2.0 * e.w * e.w;
    return s;
}

double WeightedGraph::laplacian_trace() const
{
    double s = 0.0;
    for (const Edge& e : edges_) s += e.w;
    return 2.0 * s;
}

std::size_t connected_components(const WeightedGraph& g)
{
    std::vector<std::size_t> parent(g.n());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::size_t comps = g.n();
    for (const Edge& e : g.edges()) {
        const auto a = find(e.u);
        const auto b = find(e.v);
        if (a != b) {
            parent[a] = b;
            --comps;
        }
    }
    return comps;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

template <class T>
T parse_number(std::string_view tok, std::size_t lineno, const char* what)
{
    T x{};
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw ParseError(fmt::format("bad {} '{}'", what, tok), lineno);
    return x;
}

}  // namespace

WeightedGraph read_edge_list(std::istream& in)
{
    std::string line;
    std::size_t lineno = 0;
    std::size_t declared_n = 0;
    bool have_n = false;
    std::size_t max_id = 0;
    std::vector<Edge> edges;

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string_view sv(line);
        const auto first = sv.find_first_not_of(" \t");
        if (first == std::string_view::npos) continue;
        if (sv[first] == '#') {
            for (auto tok : split_fields(sv.substr(first + 1))) {
                if (tok.substr(0, 2) == "n=") {
                    declared_n = parse_number<std::size_t>(tok.substr(2), lineno, "vertex count");
                    have_n = true;
                }
            }
            continue;
        }
        const auto f = split_fields(sv);
        if (f.size() != 3) throw ParseError(fmt::format("expected 'u v w', got {} fields", f.size()), lineno);
        Edge e;
        e.u = parse_number<std::uint32_t>(f[0], lineno, "vertex id");
        e.v = parse_number<std::uint32_t>(f[1], lineno, "vertex id");
        e.w = parse_number<double>(f[2], lineno, "weight");
        if (e.u == e.v) throw ParseError(fmt::format("self-loop at vertex {}", e.u), lineno);
        if (!(std::isfinite(e.w) && e.w > 0.0))
            throw ParseError(fmt::format("weight {} is not strictly positive", f[2]), lineno);
        max_id = std::max<std::size_t>(max_id, std::max(e.u, e.v));
        edges.push_back(e);
    }
    std::size_t n = edges.empty() ? 0 : max_id + 1;
    if (have_n) {
        if (!edges.empty() && declared_n <= max_id)
            throw ParseError(fmt::format("declared n={} but vertex {} appears", declared_n, max_id), lineno);
        n = declared_n;
    }
    try {
        return WeightedGraph::from_edges(n, std::move(edges));
    } catch (const InvalidInput& err) {
        throw ParseError(err.what(), lineno);
    }
}

WeightedGraph read_edge_list_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path);
    return read_edge_list(in);
}

void write_weighted_edges(std::ostream& out, std::span<const Edge> edges, std::span<const std::string> comments)
{
    for (const auto& c : comments) out << "# " << c << '\n';
    std::string buf;
    for (const Edge& e : edges) {
        buf.clear();
        fmt::format_to(std::back_inserter(buf), "{}\t{}\t{:.17g}\n", e.u, e.v, e.w);
        out << buf;
    }
}

void write_edge_list(std::ostream& out, const WeightedGraph& g, std::span<const std::string> comments)
{
    std::vector<std::string> all;
    all.push_back(fmt::format("n={}", g.n()));
    all.insert(all.end(), comments.begin(), comments.end());
    write_weighted_edges(out, g.edges(), all);
}

}  // namespace uga
