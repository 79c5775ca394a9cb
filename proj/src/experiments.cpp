#include "uga/experiments.hpp"

#include "uga/certify.hpp"
#include "uga/cluster_eval.hpp"
#include "uga/error.hpp"
#include "uga/graph_sparsify.hpp"
#include "uga/sketch_lsq.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace uga {

std::size_t ExperimentReport::column(const std::string& name) const
{
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw InvalidInput(fmt::format("report '{}' has no column '{}'", this->name, name));
    return static_cast<std::size_t>(it - columns.begin());
}

const std::string* ExperimentReport::parameter(const std::string& key) const
{
    for (const auto& [k, v] : parameters)
        if (k == key) return &v;
    return nullptr;
}

std::vector<std::pair<std::string, double>> compute_aggregate(const ExperimentReport& report)
{
    std::vector<std::size_t> mean_cols;
    for (const auto& c : report.mean_columns) mean_cols.push_back(report.column(c));

    std::vector<double> groups;  // distinct group values, first-appearance order
    std::vector<std::size_t> group_of(report.rows.size(), 0);
    if (!report.group_by.empty()) {
        const std::size_t gc = report.column(report.group_by);
        for (std::size_t r = 0; r < report.rows.size(); ++r) {
            const double v = report.rows[r].values[gc];
            auto it = std::find(groups.begin(), groups.end(), v);
            if (it == groups.end()) {
                groups.push_back(v);
                it = groups.end() - 1;
            }
            group_of[r] = static_cast<std::size_t>(it - groups.begin());
        }
    } else {
        groups.push_back(0.0);
    }

    std::vector<std::pair<std::string, double>> out;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        for (std::size_t q = 0; q < mean_cols.size(); ++q) {
            double sum = 0.0;
            std::size_t count = 0;
            for (std::size_t r = 0; r < report.rows.size(); ++r) {
                if (group_of[r] != gi) continue;
                const double v = report.rows[r].values[mean_cols[q]];
                if (std::isnan(v)) continue;
                sum += v;
                ++count;
            }
            std::string key = "mean_" + report.mean_columns[q];
            if (!report.group_by.empty()) key += fmt::format("[{}={}]", report.group_by, groups[gi]);
            out.emplace_back(std::move(key),
                             count ? sum / static_cast<double>(count) : std::numeric_limits<double>::quiet_NaN());
        }
    }
    return out;
}

void write_report(std::ostream& out, const ExperimentReport& report)
{
    out << "# experiment=" << report.name << '\n';
    for (const auto& [k, v] : report.parameters) out << "# " << k << '=' << v << '\n';
    if (!report.group_by.empty()) out << "# aggregate_group=" << report.group_by << '\n';
    if (!report.mean_columns.empty()) out << "# aggregate_means=" << fmt::format("{}", fmt::join(report.mean_columns, ";")) << '\n';
    for (const auto& c : report.columns) out << c << ',';
    out << "seed\n";
    for (const auto& row : report.rows) {
        for (double v : row.values) out << fmt::format("{:.17g},", v);
        out << row.seed << '\n';
    }
    for (const auto& [k, v] : report.aggregate) out << fmt::format("# aggregate {}={:.17g}\n", k, v);
}

namespace {

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) parts.push_back(cur);
    if (!s.empty() && s.back() == sep) parts.emplace_back();
    return parts;
}

double parse_double(const std::string& s, std::size_t line)
{
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw ParseError(fmt::format("bad number '{}'", s), line);
    return v;
}

}  // namespace

ExperimentReport parse_report(std::istream& in)
{
    ExperimentReport rep;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.rfind("# ", 0) == 0) {
            std::string body = line.substr(2);
            const bool is_aggregate = body.rfind("aggregate ", 0) == 0;
            if (is_aggregate) body = body.substr(10);
            const auto eq = is_aggregate ? body.rfind('=') : body.find('=');
            if (eq == std::string::npos) throw ParseError("metadata line without '='", lineno);
            std::string key = body.substr(0, eq);
            std::string value = body.substr(eq + 1);
            if (is_aggregate)
                rep.aggregate.emplace_back(std::move(key), parse_double(value, lineno));
            else if (key == "experiment")
                rep.name = value;
            else if (key == "aggregate_group")
                rep.group_by = value;
            else if (key == "aggregate_means")
                rep.mean_columns = split(value, ';');
            else
                rep.parameters.emplace_back(std::move(key), std::move(value));
            continue;
        }
        if (line[0] == '#') continue;
        auto cells = split(line, ',');
        if (!have_header) {
            if (cells.empty() || cells.back() != "seed") throw ParseError("header must end with 'seed'", lineno);
            cells.pop_back();
            rep.columns = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != rep.columns.size() + 1)
            throw ParseError(fmt::format("expected {} cells, found {}", rep.columns.size() + 1, cells.size()), lineno);
        ExperimentReport::Row row;
        for (std::size_t c = 0; c + 1 < cells.size(); ++c) row.values.push_back(parse_double(cells[c], lineno));
        const std::string& s = cells.back();
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), row.seed);
        if (ec != std::errc() || p != s.data() + s.size()) throw ParseError(fmt::format("bad seed '{}'", s), lineno);
        rep.rows.push_back(std::move(row));
    }
    if (!have_header) throw ParseError("missing header", lineno);
    return rep;
}

std::vector<double> parse_epsilon_grid(const std::string& text)
{
    std::vector<double> out;
    auto num = [&](const std::string& s) {
        double v = 0.0;
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc() || p != s.data() + s.size())
            throw InvalidInput(fmt::format("epsilon grid: bad number '{}'", s));
        return v;
    };
    for (const auto& item : split(text, ',')) {
        const auto parts = split(item, ':');
        if (parts.size() == 1) {
            out.push_back(num(parts[0]));
        } else if (parts.size() == 3) {
            const double a = num(parts[0]), step = num(parts[1]), b = num(parts[2]);
            if (!(step > 0.0) || b < a) throw InvalidInput(fmt::format("epsilon grid: bad range '{}'", item));
            // Grid points are a + i * step, rounded to 12 decimals so 0.2 + 3 * 0.05 prints as 0.35.
            for (std::size_t i = 0;; ++i) {
                const double v = std::round((a + static_cast<double>(i) * step) * 1e12) / 1e12;
                if (v > b + 1e-9) break;
                out.push_back(v);
            }
        } else {
            throw InvalidInput(fmt::format("epsilon grid: bad item '{}'", item));
        }
    }
    if (out.empty()) throw InvalidInput("epsilon grid is empty");
    for (double e : out)
        if (!(e > 0.0 && e < 1.0)) throw InvalidInput(fmt::format("epsilon grid: {} is outside (0, 1)", e));
    return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

template <class F>
double median_seconds(std::size_t reps, F&& f)
{
    std::vector<double> t(std::max<std::size_t>(reps, 1));
    for (double& x : t) {
        const auto t0 = Clock::now();
        f();
        x = seconds_since(t0);
    }
    std::sort(t.begin(), t.end());
    const std::size_t h = t.size() / 2;
    return t.size() % 2 ? t[h] : 0.5 * (t[h - 1] + t[h]);
}

std::string fmt_num(double v) { return fmt::format("{:.17g}", v); }

const char* dist_name(WeightKind k) { return k == WeightKind::Poisson ? "poisson" : "exponential"; }

std::vector<double> require_grid(const std::vector<double>& eps)
{
    if (eps.empty()) return parse_epsilon_grid(default_epsilon_grid);
    for (double e : eps)
        if (!(e > 0.0 && e < 1.0)) throw InvalidInput(fmt::format("epsilon {} is outside (0, 1)", e));
    return eps;
}

void require_trials(std::size_t trials)
{
    if (trials == 0) throw InvalidInput("trials must be positive");
}

void graph_success_rows(ExperimentReport& rep, const WeightedGraph& g, const std::vector<double>& eps,
                        std::size_t trial, std::uint64_t seed)
{
    const SymMatrix lg = laplacian_dense(g);
    for (double e : eps) {
        const Sparsifier sp = sparsify(g, e);
        const Certificate cert = certify_graph(lg, sparsifier_laplacian(sp, g.n()), e);
        rep.rows.push_back({{e, static_cast<double>(trial), cert.passed ? 1.0 : 0.0, cert.lo, cert.hi,
                             static_cast<double>(sp.edges.size()), static_cast<double>(sp.iterations),
                             static_cast<double>(sp.negative_weight_count), static_cast<double>(sp.fallback_count)},
                            seed});
    }
}

void set_graph_success_layout(ExperimentReport& rep)
{
    rep.columns = {"epsilon", "trial", "passed", "lo", "hi", "edges", "iterations", "negative_weights", "fallbacks"};
    rep.group_by = "epsilon";
    rep.mean_columns = {"passed", "lo", "hi", "edges"};
}

}  // namespace

ExperimentReport run_success_rate(const SuccessRateConfig& cfg)
{
    const auto eps = require_grid(cfg.epsilons);
    require_trials(cfg.trials);
    ExperimentReport rep;
    rep.name = "success-rate";
    rep.parameters = {{"n", std::to_string(cfg.n)},          {"p", fmt_num(cfg.p)},
                      {"dist", dist_name(cfg.dist.kind)},      {"lambda", fmt_num(cfg.dist.lambda)},
                      {"trials", std::to_string(cfg.trials)}, {"seed", std::to_string(cfg.seed)}};
    set_graph_success_layout(rep);
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        const std::uint64_t s = derive_seed(cfg.seed, t);
        graph_success_rows(rep, gen_er_weighted(cfg.n, cfg.p, cfg.dist, s), eps, t, s);
    }
    rep.aggregate = compute_aggregate(rep);
    return rep;
}

ExperimentReport run_sbm_success(const SbmSuccessConfig& cfg)
{
    const auto eps = require_grid(cfg.epsilons);
    require_trials(cfg.trials);
    ExperimentReport rep;
    rep.name = "sbm-success";
    rep.parameters = {{"n", std::to_string(cfg.spec.n)},   {"k", std::to_string(cfg.spec.k)},
                      {"p", fmt_num(cfg.spec.p)},          {"q", fmt_num(cfg.spec.q)},
                      {"trials", std::to_string(cfg.trials)}, {"seed", std::to_string(cfg.seed)}};
    set_graph_success_layout(rep);
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        const std::uint64_t s = derive_seed(cfg.seed, t);
        graph_success_rows(rep, gen_sbm(cfg.spec, s).graph, eps, t, s);
    }
    rep.aggregate = compute_aggregate(rep);
    return rep;
}

ExperimentReport run_isotropic_success(const IsotropicSuccessConfig& cfg)
{
    const auto eps = require_grid(cfg.epsilons);
    require_trials(cfg.trials);
    const std::size_t m = cfg.m ? cfg.m : cfg.n * cfg.n;
    ExperimentReport rep;
    rep.name = "isotropic-success";
    rep.parameters = {{"n", std::to_string(cfg.n)},
                      {"m", std::to_string(m)},
                      {"trials", std::to_string(cfg.trials)},
                      {"seed", std::to_string(cfg.seed)}};
    rep.columns = {"epsilon", "trial", "passed", "lo", "hi", "sparsity", "iterations"};
    rep.group_by = "epsilon";
    rep.mean_columns = {"passed", "lo", "hi", "sparsity"};
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        const std::uint64_t s = derive_seed(cfg.seed, t);
        const IsotropicSet set = gen_isotropic(cfg.n, m, s);
        for (double e : eps) {
            const SubsetResult res = run(set, e);
            const Certificate cert = certify_identity(subset_matrix(set, res.lambda, res.coefficients), e);
            rep.rows.push_back({{e, static_cast<double>(t), cert.passed ? 1.0 : 0.0, cert.lo, cert.hi,
                                 static_cast<double>(res.sparsity), static_cast<double>(res.iterations)},
                                s});
        }
    }
    rep.aggregate = compute_aggregate(rep);
    return rep;
}

ExperimentReport run_clustering(const ClusteringConfig& cfg)
{
    require_trials(cfg.trials);
    iteration_budget(cfg.spec.n, cfg.epsilon);  // validates epsilon
    ExperimentReport rep;
    rep.name = "clustering";
    rep.parameters = {{"n", std::to_string(cfg.spec.n)},   {"k", std::to_string(cfg.spec.k)},
                      {"p", fmt_num(cfg.spec.p)},          {"q", fmt_num(cfg.spec.q)},
                      {"epsilon", fmt_num(cfg.epsilon)},   {"trials", std::to_string(cfg.trials)},
                      {"seed", std::to_string(cfg.seed)}};
    rep.columns = {"trial", "accuracy_original", "accuracy_sparsified", "sparsifier_edges", "clamped_edges"};
    rep.mean_columns = {"accuracy_original", "accuracy_sparsified"};
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        const std::uint64_t s = derive_seed(cfg.seed, t);
        const PlantedGraph pg = gen_sbm(cfg.spec, s);
        const ClusterAssignment planted{pg.labels, pg.k};
        const Sparsifier sp = sparsify(pg.graph, cfg.epsilon);
        std::vector<Edge> kept;
        for (const Edge& e : sp.edges)
            if (e.w > 0.0) kept.push_back(e);
        const double acc_g = cluster_accuracy(planted, spectral_cluster(laplacian_dense(pg.graph), pg.k, s));
        const double acc_h = cluster_accuracy(planted, spectral_cluster(laplacian_of_edges(kept, pg.graph.n()), pg.k, s));
        rep.rows.push_back({{static_cast<double>(t), acc_g, acc_h, static_cast<double>(sp.edges.size()),
                             static_cast<double>(sp.edges.size() - kept.size())},
                            s});
    }
    rep.aggregate = compute_aggregate(rep);
    return rep;
}

ExperimentReport run_lsq(const LsqConfig& cfg)
{
    std::vector<double> eps = cfg.epsilons;
    if (eps.empty()) eps = parse_epsilon_grid("0.2:0.1:0.9");
    eps = require_grid(eps);
    require_trials(cfg.trials);
    ExperimentReport rep;
    rep.name = "lsq";
    rep.parameters = {{"n", std::to_string(cfg.n)},          {"m", std::to_string(cfg.m)},
                      {"noise", fmt_num(cfg.noise)},          {"trials", std::to_string(cfg.trials)},
                      {"repetitions", std::to_string(cfg.repetitions)}, {"seed", std::to_string(cfg.seed)}};
    rep.columns = {"epsilon",  "re_ls",    "re_new",    "time_full",   "time_ls", "time_new", "sketch_rows",
                   "certified", "bound_ls", "bound_new", "time_sketch", "break_even", "trial"};
    rep.group_by = "epsilon";
    rep.mean_columns = {"re_ls", "re_new", "time_full", "time_ls", "time_new", "sketch_rows", "certified", "break_even"};
    const double nan = std::numeric_limits<double>::quiet_NaN();

    for (std::size_t t = 0; t < cfg.trials; ++t) {
        const std::uint64_t s = derive_seed(cfg.seed, t);
        const LsqInstance inst = gen_lsq_instance(cfg.m, cfg.n, s, cfg.noise);
        std::vector<double> x_opt;
        const double time_full =
            median_seconds(cfg.repetitions, [&] { x_opt = HouseholderQr(inst.a).solve_least_squares(inst.b); });
        const SymMatrix b_mat = gram(inst.a);
        const std::vector<double> atb = matvec_t(inst.a, inst.b);

        for (double e : eps) {
            const auto t0 = Clock::now();
            const Sketch sk = build_sketch(inst.a, inst.b, e);
            const double time_sketch = seconds_since(t0);
            const SymMatrix g = gram(sk.a_tilde);

            double re_ls = nan, time_ls = nan, bound_ls = nan;
            try {
                std::vector<double> y;
                time_ls = median_seconds(cfg.repetitions, [&] { y = solve_sketch_ls(sk); });
                re_ls = relative_error(x_opt, y);
            } catch (const RankDeficient&) {
            }
            if (auto bd = error_bound(b_mat, g, atb, matvec_t(sk.a_tilde, sk.b_tilde))) bound_ls = *bd;

            double re_new = nan, time_new = nan, bound_new = nan;
            try {
                std::vector<double> z;
                time_new = median_seconds(cfg.repetitions, [&] { z = solve_new(sk, inst.a, inst.b); });
                re_new = relative_error(x_opt, z);
            } catch (const NotPositiveDefinite&) {
            }
            if (auto bd = error_bound(b_mat, g, atb, atb)) bound_new = *bd;

            // Right-hand sides needed before sketch + per-solve cost beats the full solve.
            double break_even = nan;
            if (std::isfinite(time_new) && time_full > time_new)
                break_even = std::max(1.0, std::ceil(time_sketch / (time_full - time_new)));

            rep.rows.push_back({{e, re_ls, re_new, time_full, time_ls, time_new,
                                 static_cast<double>(sk.indices.size()), sk.certified ? 1.0 : 0.0, bound_ls,
                                 bound_new, time_sketch, break_even, static_cast<double>(t)},
                                s});
        }
    }
    rep.aggregate = compute_aggregate(rep);
    return rep;
}

}  // namespace uga
