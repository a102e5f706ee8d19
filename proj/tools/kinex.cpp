// kinex: command-line driver for the wealth-exchange operator and agent gas.

#include "kinex/agent_gas.hpp"
#include "kinex/errors.hpp"
#include "kinex/flow.hpp"
#include "kinex/io.hpp"
#include "kinex/reproduce.hpp"
#include "kinex/wealth_operator.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <set>
#include <sstream>

using namespace kinex;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

std::filesystem::path default_out_dir() {
    if (const char* env = std::getenv("KINEX_OUT_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return ".";
}

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::set<VerdictKind> parse_accept(const std::string& list) {
    std::set<VerdictKind> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "converged") {
            out.insert(VerdictKind::ConvergedToExponential);
        } else if (item == "pointwise") {
            out.insert(VerdictKind::PointwiseVanishing);
        } else if (item == "max-steps") {
            out.insert(VerdictKind::MaxStepsReached);
        } else if (item == "collapse") {
            out.insert(VerdictKind::CollapseToZero);
        } else if (item == "divergent") {
            out.insert(VerdictKind::DivergentNorm);
        } else if (item == "any") {
            out.insert({VerdictKind::ConvergedToExponential, VerdictKind::PointwiseVanishing,
                        VerdictKind::MaxStepsReached, VerdictKind::CollapseToZero,
                        VerdictKind::DivergentNorm});
        } else {
            throw UsageError("unknown verdict '" + item + "' in --accept");
        }
    }
    return out;
}

void add_grid_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--x-max", cfg.x_max, "Right end of the wealth grid")->capture_default_str();
    cmd->add_option("--points", cfg.n_points, "Grid points (odd)")->capture_default_str();
}

void add_out_option(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--out", cfg.out_dir, "Output directory (default: $KINEX_OUT_DIR or .)");
}

struct IterateArgs {
    std::string accept = "converged,pointwise,max-steps";
    unsigned threads = 0;
    bool quiet = false;
};

int cmd_iterate(const RunConfig& cfg, const IterateArgs& args) {
    cfg.validate();
    const auto accepted = parse_accept(args.accept);
    const GridDistribution y0 = initial_distribution(cfg);

    IterateOptions opts;
    opts.max_steps = cfg.max_steps;
    opts.stop_tol = cfg.stop_tol;
    opts.kernel.threads = args.threads;
    const Trajectory traj = iterate(y0, Effectiveness(cfg.lambda), opts);

    std::ostringstream csv;
    write_trajectory_csv(csv, traj);
    write_text_file(cfg.out_dir / "trajectory.csv", csv.str());
    write_text_file(cfg.out_dir / "summary.json", trajectory_summary(traj, cfg).dump(2) + "\n");

    if (!args.quiet) {
        std::printf("%5s %12s %12s %14s %12s %12s\n", "step", "norm", "mean", "dist", "leakage",
                    "sup");
        for (const auto& s : traj.steps) {
            std::printf("%5zu %12.7f %12.7f %14.7f %12.3e %12.7f\n", s.step, s.norm, s.mean,
                        s.dist_to_target, s.leakage, s.sup_value);
        }
    }
    std::printf("verdict: %s", to_string(traj.verdict.kind).c_str());
    if (traj.verdict.kind == VerdictKind::ConvergedToExponential) {
        std::printf(" (delta = %.6f)", traj.verdict.delta);
    }
    if (!traj.verdict.note.empty()) {
        std::printf(" - %s", traj.verdict.note.c_str());
    }
    std::printf("\n");
    return accepted.count(traj.verdict.kind) != 0 ? kOk : kFailed;
}

struct SimulateArgs {
    std::size_t agents = 100000;
    std::size_t sweeps = 2000;
    std::size_t bins = 100;
    double initial_money = 1.0;
    std::string pairing = "matching";
    std::string from_family;
    bool write_ensemble = false;
    double max_ks = -1.0;
};

int cmd_simulate(const RunConfig& cfg, const SimulateArgs& args) {
    const Effectiveness eff(cfg.lambda);
    PairingScheme scheme = PairingScheme::RandomMatching;
    if (args.pairing == "random-pairs") {
        scheme = PairingScheme::IndependentPairs;
    } else if (args.pairing != "matching") {
        throw UsageError("--pairing must be 'matching' or 'random-pairs'");
    }
    if (args.sweeps < 1) {
        throw ParameterError("sweeps must be at least 1");
    }
    if (eff.value() == 0.0) {
        std::fprintf(stderr, "warning: lambda = 0 freezes the market; the ensemble will not move\n");
    }

    Ensemble e = args.from_family.empty()
                     ? init_ensemble(args.agents, args.initial_money, cfg.seed)
                     : init_ensemble_from(
                           sample_family(parse_family(args.from_family), cfg.grid()),
                           args.agents, cfg.seed);
    const FitResult fit = run_and_fit(e, eff, args.sweeps, args.bins, scheme);

    std::ostringstream hist;
    write_histogram_csv(hist, fit.histogram);
    write_text_file(cfg.out_dir / "histogram.csv", hist.str());
    auto summary = simulation_summary(e, fit, cfg, args.sweeps, scheme);
    write_text_file(cfg.out_dir / "summary.json", summary.dump(2) + "\n");
    if (args.write_ensemble) {
        std::ostringstream ens;
        write_ensemble_csv(ens, e);
        write_text_file(cfg.out_dir / "ensemble.csv", ens.str());
    }

    std::printf("agents %zu  lambda %g  sweeps %zu  seed %llu\n", e.size(), cfg.lambda,
                args.sweeps, static_cast<unsigned long long>(cfg.seed));
    std::printf("fitted_beta %.6f  KS %.5f\n", fit.histogram.fitted_beta, fit.ks);
    if (args.max_ks >= 0.0 && fit.ks > args.max_ks) {
        std::printf("KS above limit %g\n", args.max_ks);
        return kFailed;
    }
    return kOk;
}

int cmd_reproduce(bool strict, const std::filesystem::path& out_dir, bool write_report) {
    const Grid grid = strict ? Grid(200.0, 20001) : Grid(50.0, 5001);
    const double tol = strict ? 2e-4 : 2e-3;
    std::printf("grid [0, %g] with %zu points, tolerance %g\n\n", grid.x_max(), grid.size(), tol);

    const auto rows = reproduce_examples(grid, tol);
    std::printf("%-36s %10s %10s %10s  %s\n", "quantity", "reference", "computed", "|diff|",
                "result");
    bool ok = true;
    std::ostringstream csv;
    csv << "quantity,reference,computed,abs_diff,pass\n";
    for (const auto& r : rows) {
        std::printf("%-36s %10.6f %10.6f %10.2e  %s\n", r.quantity.c_str(), r.reference,
                    r.computed, r.error(), r.pass() ? "pass" : "FAIL");
        csv << '"' << r.quantity << "\"," << format_double(r.reference) << ','
            << format_double(r.computed) << ',' << format_double(r.error()) << ','
            << (r.pass() ? "true" : "false") << '\n';
        ok = ok && r.pass();
    }

    const auto rect = rectangular_distances(grid, 2.0, 4.0, 4);
    bool decreasing = true;
    std::printf("\nrect:2:4 ||T^n y - mu||, n = 0..4:");
    for (std::size_t n = 0; n < rect.size(); ++n) {
        std::printf(" %.6f", rect[n]);
        if (n > 0 && !(rect[n] < rect[n - 1])) {
            decreasing = false;
        }
    }
    std::printf("  strictly decreasing: %s\n", decreasing ? "pass" : "FAIL");
    ok = ok && decreasing;

    if (!rows[0].pass() || !rows[1].pass()) {
        std::printf("\nnote: lomax2 keeps mass 1/(1 + x_max) beyond the grid; the two lomax2 rows\n"
                    "carry a truncation error of order 1/x_max at any finite window.\n");
    }
    if (write_report) {
        write_text_file(out_dir / "reproduce.csv", csv.str());
    }
    return ok ? kOk : kFailed;
}

int cmd_oracle_check(const RunConfig& cfg, const std::vector<std::string>& families,
                     std::size_t samples, double tol) {
    const Grid grid = cfg.grid();
    if (samples < 2) {
        throw ParameterError("need at least 2 sample points");
    }
    double worst = 0.0;
    for (const auto& spec : families) {
        const auto d = sample_family(parse_family(spec), grid);
        const auto image = apply_T(d);
        // Nodes spread over [0, x_max / 2], where every family still has visible mass.
        const std::size_t span = (grid.size() - 1) / 2;
        double max_diff = 0.0;
        double at = 0.0;
        for (std::size_t k = 0; k < samples; ++k) {
            const std::size_t i = k * span / (samples - 1);
            const double x = grid.node(i);
            const double diff = std::abs(image[i] - oracle_T_point(d, x));
            if (diff > max_diff) {
                max_diff = diff;
                at = x;
            }
        }
        std::printf("%-10s max |fast - oracle| = %.3e at x = %g  %s\n", spec.c_str(), max_diff,
                    at, max_diff <= tol ? "pass" : "FAIL");
        worst = std::max(worst, max_diff);
    }
    std::printf("worst discrepancy %.3e (tolerance %g)\n", worst, tol);
    return worst <= tol ? kOk : kFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wealth-exchange operator iteration and agent-gas simulation"};
    app.require_subcommand(1);

    RunConfig cfg;
    cfg.out_dir = default_out_dir();

    auto* it = app.add_subcommand("iterate", "Iterate T_lambda from an initial density");
    IterateArgs it_args;
    it->add_option("--family", cfg.family, "exp:<delta>, gamma21, rect:<a>:<b>, lomax2, csv:<path>")
        ->capture_default_str();
    it->add_option("--scale", cfg.scale, "Multiply the initial density (sets its norm)")
        ->capture_default_str();
    it->add_option("--lambda", cfg.lambda, "Effectiveness in [0, 1]")->capture_default_str();
    it->add_option("--steps", cfg.max_steps, "Maximum number of steps")->capture_default_str();
    it->add_option("--tol", cfg.stop_tol, "Stop when dist_to_target falls below this")
        ->capture_default_str();
    it->add_option("--threads", it_args.threads, "Kernel threads (0 = hardware)");
    it->add_option("--accept", it_args.accept,
                   "Verdicts that exit 0: converged,pointwise,max-steps,collapse,divergent,any")
        ->capture_default_str();
    it->add_flag("--quiet", it_args.quiet, "Print only the verdict");
    add_grid_options(it, cfg);
    add_out_option(it, cfg);

    auto* sim = app.add_subcommand("simulate", "Run the random-pair agent gas");
    SimulateArgs sim_args;
    sim->add_option("--agents", sim_args.agents, "Number of agents (even)")->capture_default_str();
    sim->add_option("--sweeps", sim_args.sweeps, "Sweeps of N/2 planned trades")
        ->capture_default_str();
    sim->add_option("--lambda", cfg.lambda, "Trade probability per pair")->capture_default_str();
    sim->add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
    sim->add_option("--bins", sim_args.bins, "Histogram bins")->capture_default_str();
    sim->add_option("--initial-money", sim_args.initial_money, "Money per agent at start")
        ->capture_default_str();
    sim->add_option("--pairing", sim_args.pairing, "matching or random-pairs")
        ->capture_default_str();
    sim->add_option("--from-family", sim_args.from_family,
                    "Draw initial money from a family instead (uses the grid options)");
    sim->add_option("--max-ks", sim_args.max_ks, "Exit 1 when the KS statistic exceeds this");
    sim->add_flag("--write-ensemble", sim_args.write_ensemble, "Also write ensemble.csv");
    add_grid_options(sim, cfg);
    add_out_option(sim, cfg);

    auto* rep = app.add_subcommand("reproduce", "Recompute the published example values");
    bool strict = false;
    bool rep_report = false;
    rep->add_flag("--strict", strict, "Use x_max = 200, 20001 points and tolerance 2e-4");
    rep->add_flag("--report", rep_report, "Write reproduce.csv to the output directory");
    add_out_option(rep, cfg);

    auto* orc = app.add_subcommand("oracle-check", "Compare the fast kernel with the 2D oracle");
    std::vector<std::string> families{"exp:1", "gamma21", "rect:2:4", "lomax2"};
    std::size_t samples = 20;
    double oracle_tol = 1e-4;
    orc->add_option("--family", families, "Families to check (repeatable)");
    orc->add_option("--samples", samples, "Sample points per family")->capture_default_str();
    orc->add_option("--tol", oracle_tol, "Allowed discrepancy")->capture_default_str();
    add_grid_options(orc, cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*it) {
            return cmd_iterate(cfg, it_args);
        }
        if (*sim) {
            return cmd_simulate(cfg, sim_args);
        }
        if (*rep) {
            return cmd_reproduce(strict, cfg.out_dir, rep_report);
        }
        if (*orc) {
            return cmd_oracle_check(cfg, families, samples, oracle_tol);
        }
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const ParameterError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kFailed;
    }
    return kUsage;
}
