// uga: generate instances, run both greedy algorithms, certify, and emit
// experiment reports as CSV.
//
// Exit codes: 0 success, 1 invalid input or usage, 2 certificate failed (the
// outputs are still written), 3 numerical failure.

#include "uga/certify.hpp"
#include "uga/error.hpp"
#include "uga/experiments.hpp"
#include "uga/generators.hpp"
#include "uga/graph_sparsify.hpp"
#include "uga/subset_select.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_cert = 2;
constexpr int exit_numeric = 3;

const CLI::Validator open_unit(
    [](std::string& s) -> std::string {
        try {
            const double v = std::stod(s);
            if (v > 0.0 && v < 1.0) return {};
        } catch (const std::exception&) {
        }
        return "must lie strictly between 0 and 1, got " + s;
    },
    "(0,1)");

/// Writes to `path`, or stdout when path is empty or "-".
void with_output(const std::string& path, const std::function<void(std::ostream&)>& body)
{
    if (path.empty() || path == "-") {
        body(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream f(path);
    if (!f) throw uga::InvalidInput("cannot open " + path + " for writing");
    body(f);
    if (!f) throw uga::InvalidInput("write to " + path + " failed");
}

uga::WeightKind parse_dist(const std::string& s)
{
    return s == "exponential" ? uga::WeightKind::Exponential : uga::WeightKind::Poisson;
}

void print_certificate(const uga::Certificate& c, const std::string& path)
{
    auto body = [&](std::ostream& out) { out << uga::Certificate::csv_header() << '\n' << c.csv_row() << '\n'; };
    if (path.empty())
        body(std::cerr);
    else
        with_output(path, body);
}

struct Common {
    std::size_t trials = 20;
    std::string grid;
    std::uint64_t seed = 1;
    std::string scale = "desk";
    std::string out;
};

void add_common(CLI::App* sub, Common& c, bool with_grid)
{
    sub->add_option("--trials", c.trials, "Seeded trials");
    if (with_grid) sub->add_option("--epsilon-grid", c.grid, "Ranges a:step:b and comma lists");
    sub->add_option("--seed", c.seed, "Base seed; trial t uses derive_seed(seed, t)");
    sub->add_option("--scale", c.scale, "desk or full defaults")->check(CLI::IsMember({"desk", "full"}));
    sub->add_option("--out", c.out, "Report path (default stdout)");
}

/// Overrides `value` with the full-scale default unless the flag was given.
template <class T>
void full_default(const Common& c, CLI::App* sub, const char* flag, T& value, T full)
{
    if (c.scale == "full" && sub->get_option(flag)->count() == 0) value = full;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Greedy spectral sparsification and nonnegative subset selection"};
    app.require_subcommand(1);
    std::function<int()> action;

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "Generate instances");
    gen->require_subcommand(1);
    struct {
        std::size_t n = 200, m = 0, k = 2;
        double p = 0.3, q = 0.01, lambda = 1.0, noise = 0.1;
        std::string dist = "poisson";
        std::uint64_t seed = 1;
        std::string out, labels;
    } g;
    auto* gen_er = gen->add_subcommand("er", "Weighted Erdos-Renyi graph as an edge list");
    gen_er->add_option("--n", g.n, "Vertices");
    gen_er->add_option("--p", g.p, "Edge probability")->check(CLI::Range(0.0, 1.0));
    gen_er->add_option("--dist", g.dist, "Weight law")->check(CLI::IsMember({"poisson", "exponential"}));
    gen_er->add_option("--lambda", g.lambda, "Poisson rate or exponential mean");
    gen_er->add_option("--seed", g.seed);
    gen_er->add_option("--out", g.out);
    gen_er->callback([&] {
        action = [&] {
            const auto graph = uga::gen_er_weighted(g.n, g.p, {parse_dist(g.dist), g.lambda}, g.seed);
            const std::vector<std::string> meta{fmt::format("er p={} dist={} lambda={} seed={}", g.p, g.dist,
                                                            g.lambda, g.seed)};
            with_output(g.out, [&](std::ostream& o) { uga::write_edge_list(o, graph, meta); });
            return exit_ok;
        };
    });

    auto* gen_sbm = gen->add_subcommand("sbm", "Stochastic block model graph as an edge list");
    gen_sbm->add_option("--n", g.n, "Vertices");
    gen_sbm->add_option("--k", g.k, "Clusters");
    gen_sbm->add_option("--p", g.p, "Intra-cluster probability")->check(CLI::Range(0.0, 1.0));
    gen_sbm->add_option("--q", g.q, "Inter-cluster probability")->check(CLI::Range(0.0, 1.0));
    gen_sbm->add_option("--seed", g.seed);
    gen_sbm->add_option("--out", g.out);
    gen_sbm->add_option("--labels", g.labels, "Write planted labels, one per line");
    gen_sbm->callback([&] {
        action = [&] {
            const auto pg = uga::gen_sbm({g.n, g.k, g.p, g.q, {}}, g.seed);
            const std::vector<std::string> meta{
                fmt::format("sbm k={} p={} q={} seed={}", g.k, g.p, g.q, g.seed)};
            with_output(g.out, [&](std::ostream& o) { uga::write_edge_list(o, pg.graph, meta); });
            if (!g.labels.empty())
                with_output(g.labels, [&](std::ostream& o) {
                    for (std::size_t l : pg.labels) o << l << '\n';
                });
            return exit_ok;
        };
    });

    auto* gen_iso = gen->add_subcommand("isotropic", "Isotropic vector set (rows) as a matrix file");
    gen_iso->add_option("--n", g.n, "Dimension");
    gen_iso->add_option("--m", g.m, "Vectors (default n^2)");
    gen_iso->add_option("--seed", g.seed);
    gen_iso->add_option("--out", g.out);
    gen_iso->callback([&] {
        action = [&] {
            const std::size_t m = g.m ? g.m : g.n * g.n;
            const auto set = uga::gen_isotropic(g.n, m, g.seed);
            const std::vector<std::string> meta{fmt::format("isotropic n={} m={} seed={}", g.n, m, g.seed)};
            with_output(g.out, [&](std::ostream& o) { uga::write_matrix(o, set.vectors(), meta); });
            return exit_ok;
        };
    });

    auto* gen_lsq = gen->add_subcommand("lsq", "Least-squares instance as the matrix [A | b]");
    gen_lsq->add_option("--n", g.n, "Unknowns");
    gen_lsq->add_option("--m", g.m, "Rows (default n^2)");
    gen_lsq->add_option("--noise", g.noise, "Standard deviation of the noise in b");
    gen_lsq->add_option("--seed", g.seed);
    gen_lsq->add_option("--out", g.out);
    gen_lsq->callback([&] {
        action = [&] {
            const std::size_t m = g.m ? g.m : g.n * g.n;
            const auto inst = uga::gen_lsq_instance(m, g.n, g.seed, g.noise);
            uga::Matrix ab(m, g.n + 1);
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = 0; j < g.n; ++j) ab(i, j) = inst.a(i, j);
                ab(i, g.n) = inst.b[i];
            }
            const std::vector<std::string> meta{
                fmt::format("lsq m={} n={} noise={} seed={}; last column is b", m, g.n, g.noise, g.seed)};
            with_output(g.out, [&](std::ostream& o) { uga::write_matrix(o, ab, meta); });
            return exit_ok;
        };
    });

    // ---- sparsify ----
    struct {
        std::string input, out, cert_out;
        double epsilon = 0.5;
        bool certify = false, scan = false;
    } sp;
    auto* sparsify = app.add_subcommand("sparsify", "Greedy graph sparsification of an edge list");
    sparsify->add_option("--input", sp.input, "Edge list: u v w per line")->required();
    sparsify->add_option("--epsilon", sp.epsilon)->required()->check(open_unit);
    sparsify->add_option("--out", sp.out, "Sparsifier edge list (default stdout)");
    sparsify->add_flag("--certify", sp.certify, "Check (1-eps)^2 L_G <= L_H <= (1+eps)^2 L_G densely");
    sparsify->add_option("--certificate-out", sp.cert_out, "Certificate CSV (default stderr)");
    sparsify->add_flag("--scan-mode", sp.scan, "Exhaustive argmax instead of the bucketed queue");
    sparsify->callback([&] {
        action = [&] {
            const auto graph = uga::read_edge_list_file(sp.input);
            const auto res = uga::sparsify(graph, sp.epsilon, sp.scan ? uga::SelectMode::Scan : uga::SelectMode::Queue);
            const std::vector<std::string> meta{
                fmt::format("n={}", graph.n()),
                fmt::format("epsilon={} iterations={} budget={} edges={}", sp.epsilon, res.iterations, res.budget,
                            res.edges.size()),
                fmt::format("residual_frob={:.17g} negative_weights={} fallbacks={} early_exit={}", res.residual_frob,
                            res.negative_weight_count, res.fallback_count, res.early_exit)};
            with_output(sp.out, [&](std::ostream& o) { uga::write_weighted_edges(o, res.edges, meta); });
            if (!sp.certify) return exit_ok;
            const auto cert =
                uga::certify_graph(uga::laplacian_dense(graph), uga::sparsifier_laplacian(res, graph.n()), sp.epsilon);
            print_certificate(cert, sp.cert_out);
            return cert.passed ? exit_ok : exit_cert;
        };
    });

    // ---- subset ----
    struct {
        std::string matrix, out, cert_out;
        double epsilon = 0.5;
        bool general_b = false, certify = false;
    } ss;
    auto* subset = app.add_subcommand("subset", "Nonnegative greedy subset selection on vectors given as rows");
    subset->add_option("--matrix", ss.matrix, "Matrix file, one vector per row")->required();
    subset->add_option("--epsilon", ss.epsilon)->required()->check(open_unit);
    subset->add_option("--out", ss.out, "Selection CSV (default stdout)");
    subset->add_flag("--general-b", ss.general_b, "Vectors need not be isotropic; reduce sum v v^T to I first");
    subset->add_flag("--certify", ss.certify, "Check (1-eps)^2 I <= L <= (1+eps)^2 I on the (reduced) set");
    subset->add_option("--certificate-out", ss.cert_out, "Certificate CSV (default stderr)");
    subset->callback([&] {
        action = [&] {
            const uga::Matrix v = uga::read_matrix_file(ss.matrix);
            std::vector<std::string> meta;
            uga::IsotropicSet set;
            if (ss.general_b) {
                auto red = uga::reduce_general_b(v);
                meta.push_back(fmt::format("reduction={} rank={} isotropy_error={:.3e}",
                                           red.kind == uga::Reduction::Cholesky ? "cholesky" : "thin", red.rank,
                                           red.isotropy_error));
                set = std::move(red.set);
            } else {
                set = uga::IsotropicSet::from_rows(v, true);
            }
            const auto res = uga::run(set, ss.epsilon);
            meta.push_back(fmt::format("epsilon={} iterations={} budget={} sparsity={} residual_frob={:.17g}",
                                       ss.epsilon, res.iterations, res.budget, res.sparsity, res.residual_frob));
            with_output(ss.out, [&](std::ostream& o) {
                for (const auto& line : meta) o << "# " << line << '\n';
                o << "index,coefficient\n";
                for (std::size_t q = 0; q < res.lambda.size(); ++q)
                    o << fmt::format("{},{:.17g}\n", res.lambda[q], res.coefficients[q]);
            });
            if (!ss.certify) return exit_ok;
            const auto cert = uga::certify_identity(uga::subset_matrix(set, res.lambda, res.coefficients), ss.epsilon);
            print_certificate(cert, ss.cert_out);
            return cert.passed ? exit_ok : exit_cert;
        };
    });

    // ---- experiment ----
    auto* exp = app.add_subcommand("experiment", "Seeded experiment reports as CSV");
    exp->require_subcommand(1);
    auto emit = [](const Common& c, const uga::ExperimentReport& rep) {
        with_output(c.out, [&](std::ostream& o) { uga::write_report(o, rep); });
        return exit_ok;
    };
    auto grid_or_default = [](const std::string& grid) {
        return uga::parse_epsilon_grid(grid.empty() ? uga::default_epsilon_grid : grid);
    };

    Common c_sr;
    uga::SuccessRateConfig sr;
    std::string sr_dist = "poisson";
    auto* e_sr = exp->add_subcommand("success-rate", "Certified success rate on weighted random graphs");
    add_common(e_sr, c_sr, true);
    e_sr->add_option("--n", sr.n, "Vertices");
    e_sr->add_option("--p", sr.p, "Edge probability")->check(CLI::Range(0.0, 1.0));
    e_sr->add_option("--dist", sr_dist)->check(CLI::IsMember({"poisson", "exponential"}));
    e_sr->add_option("--lambda", sr.dist.lambda);
    e_sr->callback([&] {
        action = [&] {
            full_default(c_sr, e_sr, "--n", sr.n, std::size_t{1500});
            full_default(c_sr, e_sr, "--trials", c_sr.trials, std::size_t{100});
            sr.dist.kind = parse_dist(sr_dist);
            sr.trials = c_sr.trials;
            sr.seed = c_sr.seed;
            sr.epsilons = grid_or_default(c_sr.grid);
            return emit(c_sr, uga::run_success_rate(sr));
        };
    });

    Common c_sbm;
    uga::SbmSuccessConfig sbm;
    auto* e_sbm = exp->add_subcommand("sbm-success", "Certified success rate on SBM graphs");
    add_common(e_sbm, c_sbm, true);
    e_sbm->add_option("--n", sbm.spec.n);
    e_sbm->add_option("--k", sbm.spec.k);
    e_sbm->add_option("--p", sbm.spec.p)->check(CLI::Range(0.0, 1.0));
    e_sbm->add_option("--q", sbm.spec.q)->check(CLI::Range(0.0, 1.0));
    e_sbm->callback([&] {
        action = [&] {
            full_default(c_sbm, e_sbm, "--n", sbm.spec.n, std::size_t{1500});
            full_default(c_sbm, e_sbm, "--trials", c_sbm.trials, std::size_t{100});
            sbm.trials = c_sbm.trials;
            sbm.seed = c_sbm.seed;
            sbm.epsilons = grid_or_default(c_sbm.grid);
            return emit(c_sbm, uga::run_sbm_success(sbm));
        };
    });

    Common c_iso;
    uga::IsotropicSuccessConfig iso;
    auto* e_iso = exp->add_subcommand("isotropic-success", "Certified success rate of subset selection");
    add_common(e_iso, c_iso, true);
    e_iso->add_option("--n", iso.n);
    e_iso->add_option("--m", iso.m, "Vectors (default n^2)");
    e_iso->callback([&] {
        action = [&] {
            full_default(c_iso, e_iso, "--n", iso.n, std::size_t{100});
            full_default(c_iso, e_iso, "--trials", c_iso.trials, std::size_t{100});
            iso.trials = c_iso.trials;
            iso.seed = c_iso.seed;
            iso.epsilons = grid_or_default(c_iso.grid);
            return emit(c_iso, uga::run_isotropic_success(iso));
        };
    });

    Common c_cl;
    uga::ClusteringConfig cl;
    auto* e_cl = exp->add_subcommand("clustering", "Spectral clustering accuracy, original vs sparsified");
    add_common(e_cl, c_cl, false);
    e_cl->add_option("--n", cl.spec.n);
    e_cl->add_option("--k", cl.spec.k);
    e_cl->add_option("--p", cl.spec.p)->check(CLI::Range(0.0, 1.0));
    e_cl->add_option("--q", cl.spec.q)->check(CLI::Range(0.0, 1.0));
    e_cl->add_option("--epsilon", cl.epsilon)->check(open_unit);
    e_cl->callback([&] {
        action = [&] {
            full_default(c_cl, e_cl, "--n", cl.spec.n, std::size_t{800});
            full_default(c_cl, e_cl, "--trials", c_cl.trials, std::size_t{100});
            cl.trials = c_cl.trials;
            cl.seed = c_cl.seed;
            return emit(c_cl, uga::run_clustering(cl));
        };
    });

    Common c_lsq;
    uga::LsqConfig lsq;
    auto* e_lsq = exp->add_subcommand("lsq", "Sketched least squares vs the normal-equation solve");
    add_common(e_lsq, c_lsq, true);
    e_lsq->add_option("--n", lsq.n);
    e_lsq->add_option("--m", lsq.m);
    e_lsq->add_option("--noise", lsq.noise);
    e_lsq->add_option("--repetitions", lsq.repetitions, "Timing repetitions (median)");
    e_lsq->callback([&] {
        action = [&] {
            full_default(c_lsq, e_lsq, "--n", lsq.n, std::size_t{300});
            full_default(c_lsq, e_lsq, "--m", lsq.m, std::size_t{90000});
            full_default(c_lsq, e_lsq, "--trials", c_lsq.trials, std::size_t{100});
            lsq.trials = c_lsq.trials;
            lsq.seed = c_lsq.seed;
            if (!c_lsq.grid.empty()) lsq.epsilons = uga::parse_epsilon_grid(c_lsq.grid);
            return emit(c_lsq, uga::run_lsq(lsq));
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        return action ? action() : exit_usage;
    } catch (const uga::ParseError& e) {
        std::cerr << "uga: parse error: " << e.what() << '\n';
        return exit_usage;
    } catch (const uga::InvalidInput& e) {
        std::cerr << "uga: invalid input: " << e.what() << '\n';
        return exit_usage;
    } catch (const uga::CapExceeded& e) {
        std::cerr << "uga: " << e.what() << " (raise UGA_DENSE_CAP to allow)\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "uga: " << e.what() << '\n';
        return exit_numeric;
    }
}
