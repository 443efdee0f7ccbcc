#include "graphon/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <numeric>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "graphon/cut_metric.hpp"
#include "graphon/entropy.hpp"
#include "graphon/errors.hpp"
#include "graphon/events.hpp"
#include "graphon/minimizer.hpp"
#include "graphon/sampling.hpp"
#include "graphon/selftest.hpp"

namespace graphon::cli {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string canonical_line(const CLI::App& sub) {
    std::vector<std::string> kv;
    for (const CLI::Option* o : sub.get_options()) {
        if (o->count() == 0 || o->get_name().empty()) continue;
        std::string vals;
        for (const auto& r : o->results()) {
            if (!vals.empty()) vals += ",";
            vals += r;
        }
        kv.push_back(o->get_name() + "=" + (vals.empty() ? "set" : vals));
    }
    std::sort(kv.begin(), kv.end());
    std::string line = sub.get_name();
    for (const auto& x : kv) line += " " + x;
    return line;
}

RunConfig make_config(const CLI::App& sub, std::uint64_t seed) {
    RunConfig cfg;
    cfg.subcommand = sub.get_name();
    cfg.canonical = canonical_line(sub);
    cfg.seed = seed;
    cfg.manifest = io::Manifest{seed, io::fnv1a_hex(cfg.canonical), io::kArtifactVersion};
    return cfg;
}

// out.json -> out.2.json for multi-draw runs.
std::string indexed_path(const std::string& path, int index) {
    const auto dot = path.rfind('.');
    const auto slash = path.find_last_of("/\\");
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path + "." + std::to_string(index);
    return path.substr(0, dot) + "." + std::to_string(index) + path.substr(dot);
}

double graph_log_likelihood(const WeightedGraph& g, const StepGraphon& w) {
    double ll = 0.0;
    for (int i = 0; i < g.n(); ++i)
        for (int j = i + 1; j < g.n(); ++j) {
            const double p = w.cell(i, j)[g.weights()(i, j)];
            if (p <= 0.0) return -std::numeric_limits<double>::infinity();
            ll += std::log(p);
        }
    return ll;
}

const MeanEvent& require_mean_event(const EventSpec& ev, const std::string& path) {
    const auto* me = std::get_if<MeanEvent>(&ev);
    if (!me) fail_input(path + ": this subcommand needs a mean event");
    return *me;
}

double mean_event_rate(const FiniteMeasure& nu, const MeanEvent& ev) {
    ConstraintSet cs;
    cs.n = 1;
    cs.items.push_back({ev.f, ev.dir, ev.threshold, {}});
    return minimize_rate(nu, cs).value;
}

int run_sample(const CLI::App& sub, const std::string& nu_path, const std::string& w_path,
               int n, int count, std::uint64_t seed, const std::string& out,
               std::string csv_path) {
    if (nu_path.empty() == w_path.empty())
        fail_input("sample: give exactly one of --nu and --graphon");
    if (csv_path.empty()) csv_path = out + ".csv";
    const auto cfg = make_config(sub, seed);

    std::vector<LdpRow> rows;
    for (int k = 0; k < count; ++k) {
        const std::uint64_t draw_seed = seed + static_cast<std::uint64_t>(k);
        const std::string path = count == 1 ? out : indexed_path(out, k);
        LdpRow row{};
        if (!nu_path.empty()) {
            auto nu = io::load_measure(nu_path);
            auto g = sample_graph(n, nu, draw_seed);
            io::write_graph(path, g, cfg.manifest);
            row.n = n;
            row.method = "iid";
            row.log_prob = graph_log_likelihood(g, StepGraphon::constant(nu, n));
        } else {
            auto w = io::load_graphon(w_path);
            auto g = sample_from_graphon(w, draw_seed);
            io::write_graph(path, g, cfg.manifest);
            row.n = w.n();
            row.method = "graphon";
            row.log_prob = graph_log_likelihood(g, w);
        }
        row.scaled = 2.0 * row.log_prob / (static_cast<double>(row.n) * row.n);
        row.rate_target = kNan;
        row.gap = kNan;
        row.ess = kNan;
        rows.push_back(row);
    }
    io::write_ldp_csv(csv_path, rows, cfg.manifest);
    io::write_manifest(csv_path + ".manifest", cfg.manifest);
    std::cout << "sample: wrote " << count << " graph" << (count == 1 ? "" : "s") << " and "
              << csv_path << "\n";
    return 0;
}

int run_dist(const CLI::App& sub, const std::string& a_path, const std::string& b_path,
             const std::string& mode, int refine_blocks, std::uint64_t seed, bool witness,
             const std::string& out) {
    auto a = io::load_graphon(a_path);
    auto b = io::load_graphon(b_path);
    CutOptions opts;
    opts.refine = refine_blocks;
    opts.seed = seed;
    const int blocks = std::lcm(a.n(), b.n()) * refine_blocks;
    if (mode == "exact") {
        if (blocks > opts.exact_delta_blocks)
            fail_input("dist: exact mode handles at most " +
                       std::to_string(opts.exact_delta_blocks) +
                       " blocks after refinement; use --mode anneal");
    } else {
        opts.exact_delta_blocks = 0;
    }
    const auto cfg = make_config(sub, seed);
    auto r = delta_cut(a, b, opts);
    io::write_dist_report(out, r, witness, cfg.manifest);
    std::cout << "dist: " << io::format_number(r.value) << " (" << cut_mode_name(r.mode)
              << ") -> " << out << "\n";
    return 0;
}

int run_entropy(const CLI::App& sub, const std::string& w_path, const std::string& nu_path,
                bool dual, const std::string& out) {
    auto w = io::load_graphon(w_path);
    auto nu = io::load_measure(nu_path);
    const double h = graphon_entropy(w, nu);
    Eigen::MatrixXd per_cell(w.n(), w.n());
    for (int i = 0; i < w.n(); ++i)
        for (int j = 0; j < w.n(); ++j)
            per_cell(i, j) = kl_divergence(w.cell_measure(i, j), nu);
    const auto cfg = make_config(sub, 0);
    if (dual) {
        auto kernel = optimal_kernel(w, nu);
        io::write_entropy_report(out, h, per_cell, &kernel.values(), cfg.manifest);
    } else {
        io::write_entropy_report(out, h, per_cell, nullptr, cfg.manifest);
    }
    std::cout << "entropy: " << io::format_number(h) << " -> " << out << "\n";
    return 0;
}

int run_project(const CLI::App& sub, const std::string& density_path,
                const std::string& scheme_path, int level, const std::string& omega_path,
                int m_max, const std::string& out) {
    auto scheme = io::load_scheme(scheme_path);
    auto nu = io::load_density(density_path);
    const auto cfg = make_config(sub, 0);
    if ((level >= 0) == !omega_path.empty())
        fail_input("project: give either --level or --omega with --m-max");
    if (level >= 0) {
        io::write_measure(out, project_measure(nu, scheme, level), cfg.manifest);
        std::cout << "project: level " << level << " measure -> " << out << "\n";
        return 0;
    }
    auto omega = io::load_density(omega_path);
    auto rates =
        rate_by_projections(DensityGraphon::constant(omega, 1), nu, scheme, m_max);
    io::write_rates_report(out, rates, cfg.manifest);
    std::cout << "project: rate sequence up to level " << m_max << ", supremum "
              << io::format_number(rates.supremum) << " -> " << out << "\n";
    return 0;
}

int run_verify(const CLI::App& sub, const std::string& nu_path, const std::string& ev_path,
               const std::vector<int>& ns, const std::string& mode, std::uint64_t seed,
               long samples, const std::string& out) {
    auto nu = io::load_measure(nu_path);
    auto ev = io::load_event(ev_path);
    const auto cfg = make_config(sub, seed);
    auto rep = verify_ldp(nu, ev, ns, mode == "exact" ? VerifyMode::exact : VerifyMode::monte_carlo,
                          seed, samples);
    io::write_ldp_csv(out, rep.rows, cfg.manifest);
    io::write_manifest(out + ".manifest", cfg.manifest);
    const auto& last = rep.rows.back();
    std::cout << "verify: " << rep.rows.size() << " rows, final gap "
              << io::format_number(last.gap) << " -> " << out << "\n";
    return 0;
}

int run_condition(const CLI::App& sub, const std::string& nu_path, const std::string& ev_path,
                  int n, int count, std::uint64_t seed, const std::string& out,
                  std::string csv_path) {
    auto nu = io::load_measure(nu_path);
    auto ev = io::load_event(ev_path);
    const auto& me = require_mean_event(ev, ev_path);
    if (csv_path.empty()) csv_path = out + ".csv";
    const auto cfg = make_config(sub, seed);

    for (int k = 0; k < count; ++k) {
        auto g = conditional_sample(n, nu, me, seed + static_cast<std::uint64_t>(k));
        io::write_graph(count == 1 ? out : indexed_path(out, k), g, cfg.manifest);
    }
    LdpRow row{};
    row.n = n;
    row.method = "conditional";
    try {
        row.log_prob = event_log_prob_exact(n, nu, me);
    } catch (const Error&) {
        row.log_prob = kNan;  // off-lattice functional: no exact oracle
    }
    row.scaled = 2.0 * row.log_prob / (static_cast<double>(n) * n);
    row.rate_target = mean_event_rate(nu, me);
    row.gap = row.scaled + row.rate_target;
    row.ess = kNan;
    io::write_ldp_csv(csv_path, {row}, cfg.manifest);
    io::write_manifest(csv_path + ".manifest", cfg.manifest);
    std::cout << "condition: wrote " << count << " graph" << (count == 1 ? "" : "s") << " and "
              << csv_path << "\n";
    return 0;
}

int run_concentrate(const CLI::App& sub, const std::string& nu_path, const std::string& ev_path,
                    const std::vector<int>& ns, int reps, std::uint64_t seed,
                    const std::string& out, std::string quantiles_path) {
    auto nu = io::load_measure(nu_path);
    auto ev = io::load_event(ev_path);
    const auto& me = require_mean_event(ev, ev_path);
    if (quantiles_path.empty()) quantiles_path = out + ".quantiles.csv";
    const auto cfg = make_config(sub, seed);
    auto table = concentration_experiment(nu, me, ns, reps, seed);

    std::vector<LdpRow> rows;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        LdpRow row{};
        row.n = ns[i];
        row.method = "concentrate";
        try {
            row.log_prob = event_log_prob_exact(ns[i], nu, me);
        } catch (const Error&) {
            row.log_prob = kNan;
        }
        row.scaled = 2.0 * row.log_prob / (static_cast<double>(ns[i]) * ns[i]);
        row.rate_target = table.rate_value;
        row.gap = row.scaled + row.rate_target;
        row.ess = kNan;
        rows.push_back(row);
    }
    io::write_ldp_csv(out, rows, cfg.manifest);
    io::write_quantiles_csv(quantiles_path, table.rows, cfg.manifest);
    io::write_manifest(out + ".manifest", cfg.manifest);
    std::cout << "concentrate: " << ns.size() << " sizes, " << reps << " reps -> " << out
              << " and " << quantiles_path << "\n";
    return 0;
}

int run_minimize(const CLI::App& sub, const std::string& nu_path, const std::string& cs_path,
                 double tolerance, const std::string& out_graphon,
                 const std::string& out_report) {
    auto nu = io::load_measure(nu_path);
    auto cs = io::load_constraints(cs_path);
    if (tolerance > 0.0) cs.tolerance = tolerance;
    const auto cfg = make_config(sub, 0);
    auto r = minimize_rate(nu, cs);
    io::write_graphon(out_graphon, r.graphon, cfg.manifest);
    io::write_minimize_report(out_report, r, cfg.manifest);
    std::cout << "minimize: value " << io::format_number(r.value) << ", kkt residual "
              << io::format_number(r.kkt_residual) << " -> " << out_report << "\n";
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"probability-graphon large deviations toolkit"};
    app.require_subcommand(1);
    app.footer("Environment: GRAPHON_LDP_THREADS caps worker threads.");

    // sample
    auto* sample = app.add_subcommand("sample", "draw graphs from an edge law or a graphon");
    std::string sa_nu, sa_w, sa_out, sa_csv;
    int sa_n = 0, sa_count = 1;
    std::uint64_t sa_seed = 0;
    sample->add_option("--nu", sa_nu, "measure file (iid edges)")->check(CLI::ExistingFile);
    sample->add_option("--graphon", sa_w, "graphon file")->check(CLI::ExistingFile);
    sample->add_option("--n", sa_n, "vertex count (with --nu)");
    sample->add_option("--count", sa_count, "number of draws")->check(CLI::PositiveNumber);
    sample->add_option("--seed", sa_seed, "rng seed")->required();
    sample->add_option("--out", sa_out, "output graph file")->required();
    sample->add_option("--csv", sa_csv, "row report (default <out>.csv)");

    // dist
    auto* dist = app.add_subcommand("dist", "unlabeled cut distance between graphons");
    std::string di_a, di_b, di_mode = "exact", di_out;
    int di_refine = 1;
    std::uint64_t di_seed = 1;
    bool di_witness = false;
    dist->add_option("--a", di_a, "first graphon file")->required()->check(CLI::ExistingFile);
    dist->add_option("--b", di_b, "second graphon file")->required()->check(CLI::ExistingFile);
    dist->add_option("--mode", di_mode, "exact|anneal")
        ->check(CLI::IsMember({"exact", "anneal"}));
    dist->add_option("--refine", di_refine, "refinement factor")->check(CLI::PositiveNumber);
    dist->add_option("--seed", di_seed, "annealing seed");
    dist->add_flag("--emit-witness", di_witness, "include the optimizing cut and relabeling");
    dist->add_option("--out", di_out, "report file")->required();

    // entropy
    auto* entropy = app.add_subcommand("entropy", "rate functional of a graphon");
    std::string en_w, en_nu, en_out;
    bool en_dual = false;
    entropy->add_option("--graphon", en_w, "graphon file")->required()->check(CLI::ExistingFile);
    entropy->add_option("--nu", en_nu, "reference measure file")
        ->required()
        ->check(CLI::ExistingFile);
    entropy->add_flag("--dual", en_dual, "also emit the optimal test kernel");
    entropy->add_option("--out", en_out, "report file")->required();

    // project
    auto* project = app.add_subcommand("project", "dyadic projections of interval densities");
    std::string pr_density, pr_scheme, pr_omega, pr_out;
    int pr_level = -1, pr_mmax = 8;
    project->add_option("--density", pr_density, "reference density file")
        ->required()
        ->check(CLI::ExistingFile);
    project->add_option("--scheme", pr_scheme, "partition scheme file")
        ->required()
        ->check(CLI::ExistingFile);
    project->add_option("--level", pr_level, "project the density at this level");
    project->add_option("--omega", pr_omega, "numerator density for the rate sequence")
        ->check(CLI::ExistingFile);
    project->add_option("--m-max", pr_mmax, "deepest level of the rate sequence");
    project->add_option("--out", pr_out, "output file")->required();

    // verify
    auto* verify = app.add_subcommand("verify", "large-deviation decay check for an event");
    std::string ve_nu, ve_ev, ve_mode, ve_out;
    std::vector<int> ve_ns;
    std::uint64_t ve_seed = 1;
    long ve_samples = 2000;
    verify->add_option("--nu", ve_nu, "measure file")->required()->check(CLI::ExistingFile);
    verify->add_option("--event", ve_ev, "event file")->required()->check(CLI::ExistingFile);
    verify->add_option("--n", ve_ns, "graph sizes (comma separated)")
        ->required()
        ->delimiter(',');
    verify->add_option("--mode", ve_mode, "exact|mc")
        ->required()
        ->check(CLI::IsMember({"exact", "mc"}));
    verify->add_option("--seed", ve_seed, "rng seed (mc mode)");
    verify->add_option("--samples", ve_samples, "importance samples per size (mc mode)")
        ->check(CLI::PositiveNumber);
    verify->add_option("--out", ve_out, "CSV report")->required();

    // condition
    auto* condition = app.add_subcommand("condition", "sample graphs conditioned on an event");
    std::string co_nu, co_ev, co_out, co_csv;
    int co_n = 0, co_count = 1;
    std::uint64_t co_seed = 0;
    condition->add_option("--nu", co_nu, "measure file")->required()->check(CLI::ExistingFile);
    condition->add_option("--event", co_ev, "mean event file")
        ->required()
        ->check(CLI::ExistingFile);
    condition->add_option("--n", co_n, "vertex count")->required();
    condition->add_option("--count", co_count, "number of draws")->check(CLI::PositiveNumber);
    condition->add_option("--seed", co_seed, "rng seed")->required();
    condition->add_option("--out", co_out, "output graph file")->required();
    condition->add_option("--csv", co_csv, "row report (default <out>.csv)");

    // concentrate
    auto* concentrate =
        app.add_subcommand("concentrate", "distance of conditioned samples to the minimizer");
    std::string cc_nu, cc_ev, cc_out, cc_quant;
    std::vector<int> cc_ns;
    int cc_reps = 50;
    std::uint64_t cc_seed = 0;
    concentrate->add_option("--nu", cc_nu, "measure file")->required()->check(CLI::ExistingFile);
    concentrate->add_option("--event", cc_ev, "mean event file")
        ->required()
        ->check(CLI::ExistingFile);
    concentrate->add_option("--n", cc_ns, "graph sizes (comma separated)")
        ->required()
        ->delimiter(',');
    concentrate->add_option("--reps", cc_reps, "conditioned samples per size")
        ->check(CLI::PositiveNumber);
    concentrate->add_option("--seed", cc_seed, "rng seed")->required();
    concentrate->add_option("--out", cc_out, "CSV report")->required();
    concentrate->add_option("--quantiles", cc_quant,
                            "median/q90 table (default <out>.quantiles.csv)");

    // minimize
    auto* minimize = app.add_subcommand("minimize", "rate minimizer under mean constraints");
    std::string mi_nu, mi_cs, mi_out_w, mi_out_r;
    double mi_tol = 0.0;
    minimize->add_option("--nu", mi_nu, "measure file")->required()->check(CLI::ExistingFile);
    minimize->add_option("--constraints", mi_cs, "constraint set file")
        ->required()
        ->check(CLI::ExistingFile);
    minimize->add_option("--tolerance", mi_tol, "override the constraint tolerance");
    minimize->add_option("--out-graphon", mi_out_w, "minimizing graphon file")->required();
    minimize->add_option("--out-report", mi_out_r, "value/dual/kkt report")->required();

    auto* selftest = app.add_subcommand("selftest", "run the bundled invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sample->parsed())
            return run_sample(*sample, sa_nu, sa_w, sa_n, sa_count, sa_seed, sa_out, sa_csv);
        if (dist->parsed())
            return run_dist(*dist, di_a, di_b, di_mode, di_refine, di_seed, di_witness, di_out);
        if (entropy->parsed()) return run_entropy(*entropy, en_w, en_nu, en_dual, en_out);
        if (project->parsed())
            return run_project(*project, pr_density, pr_scheme, pr_level, pr_omega, pr_mmax,
                               pr_out);
        if (verify->parsed())
            return run_verify(*verify, ve_nu, ve_ev, ve_ns, ve_mode, ve_seed, ve_samples, ve_out);
        if (condition->parsed())
            return run_condition(*condition, co_nu, co_ev, co_n, co_count, co_seed, co_out,
                                 co_csv);
        if (concentrate->parsed())
            return run_concentrate(*concentrate, cc_nu, cc_ev, cc_ns, cc_reps, cc_seed, cc_out,
                                   cc_quant);
        if (minimize->parsed())
            return run_minimize(*minimize, mi_nu, mi_cs, mi_tol, mi_out_w, mi_out_r);
        if (selftest->parsed()) return run_selftest(std::cout);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}

}  // namespace graphon::cli
