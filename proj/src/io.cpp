#include "kinex/io.hpp"

#include "kinex/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace kinex {

namespace {

double parse_number(const std::string& text, const std::string& spec) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (text.empty() || ec != std::errc{} || ptr != last) {
        throw ParameterError("bad number '" + text + "' in family spec '" + spec + "'");
    }
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string::npos) {
            return out;
        }
        start = pos + 1;
    }
}

} // namespace

void RunConfig::validate() const {
    (void)grid();
    (void)Effectiveness(lambda);
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw ParameterError("scale must be positive and finite");
    }
    if (max_steps < 1) {
        throw ParameterError("steps must be at least 1");
    }
    if (!(stop_tol > 0.0)) {
        throw ParameterError("tolerance must be positive");
    }
    kinex::validate(parse_family(family));
}

DistributionFamily parse_family(const std::string& spec) {
    if (spec.rfind("csv:", 0) == 0) {
        return load_tabulated_csv(spec.substr(4));
    }
    const auto parts = split(spec, ':');
    const std::string& name = parts.front();
    if (name == "gamma21" && parts.size() == 1) {
        return family::Gamma21{};
    }
    if (name == "lomax2" && parts.size() == 1) {
        return family::Lomax2{};
    }
    if (name == "exp" && parts.size() <= 2) {
        family::Exponential e{parts.size() == 2 ? parse_number(parts[1], spec) : 1.0};
        validate(e);
        return e;
    }
    if (name == "rect" && parts.size() == 3) {
        family::Rectangular r{parse_number(parts[1], spec), parse_number(parts[2], spec)};
        validate(r);
        return r;
    }
    throw ParameterError("unknown family spec '" + spec +
                         "' (expected exp:<delta>, gamma21, rect:<a>:<b>, lomax2 or csv:<path>)");
}

GridDistribution initial_distribution(const RunConfig& cfg) {
    return sample_family(parse_family(cfg.family), cfg.grid()).scaled(cfg.scale);
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "step,norm,mean,dist_to_target,leakage,sup_value\n";
    for (const auto& s : traj.steps) {
        os << s.step << ',' << format_double(s.norm) << ',' << format_double(s.mean) << ','
           << format_double(s.dist_to_target) << ',' << format_double(s.leakage) << ','
           << format_double(s.sup_value) << '\n';
    }
}

void write_histogram_csv(std::ostream& os, const WealthHistogram& hist) {
    os << "bin_lower,bin_upper,count,density,exponential_density\n";
    std::size_t total = 0;
    for (auto c : hist.counts) {
        total += c;
    }
    for (std::size_t b = 0; b < hist.counts.size(); ++b) {
        const double lo = hist.bin_edges[b];
        const double hi = hist.bin_edges[b + 1];
        const double width = hi - lo;
        const double density =
            width > 0.0 ? static_cast<double>(hist.counts[b]) / (static_cast<double>(total) * width)
                        : 0.0;
        const double mid = 0.5 * (lo + hi);
        os << format_double(lo) << ',' << format_double(hi) << ',' << hist.counts[b] << ','
           << format_double(density) << ','
           << format_double(hist.fitted_beta * std::exp(-hist.fitted_beta * mid)) << '\n';
    }
}

void write_ensemble_csv(std::ostream& os, const Ensemble& e) {
    os << "agent,money\n";
    const auto money = e.money();
    for (std::size_t i = 0; i < money.size(); ++i) {
        os << i << ',' << format_double(money[i]) << '\n';
    }
}

void write_distribution_csv(std::ostream& os, const GridDistribution& d) {
    os << "x,density\n";
    for (std::size_t i = 0; i < d.size(); ++i) {
        os << format_double(d.grid().node(i)) << ',' << format_double(d[i]) << '\n';
    }
}

nlohmann::json to_json(const RunConfig& cfg) {
    return {
        {"x_max", cfg.x_max},   {"n_points", cfg.n_points}, {"family", cfg.family},
        {"scale", cfg.scale},   {"lambda", cfg.lambda},     {"max_steps", cfg.max_steps},
        {"stop_tol", cfg.stop_tol}, {"seed", cfg.seed},
    };
}

nlohmann::json trajectory_summary(const Trajectory& traj, const RunConfig& cfg) {
    nlohmann::json j;
    j["parameters"] = to_json(cfg);
    j["regime"] = to_string(regime_of(initial_distribution(cfg)));
    j["verdict"] = to_string(traj.verdict.kind);
    j["verdict_note"] = traj.verdict.note;
    if (traj.verdict.kind == VerdictKind::ConvergedToExponential) {
        j["delta"] = traj.verdict.delta;
    }
    j["steps_recorded"] = traj.steps.size();
    const auto& last = traj.steps.back();
    j["final"] = {{"step", last.step},
                  {"norm", last.norm},
                  {"mean", last.mean},
                  {"dist_to_target", last.dist_to_target},
                  {"sup_value", last.sup_value}};
    double leaked = 0.0;
    for (const auto& s : traj.steps) {
        leaked += s.leakage;
    }
    j["total_leakage"] = leaked;
    j["distance_ratios"] = traj.distance_ratios();
    return j;
}

nlohmann::json simulation_summary(const Ensemble& e, const FitResult& fit, const RunConfig& cfg,
                                  std::size_t sweeps, PairingScheme scheme) {
    nlohmann::json j;
    j["seed"] = cfg.seed;
    j["agents"] = e.size();
    j["lambda"] = cfg.lambda;
    j["sweeps"] = sweeps;
    j["pairing"] = scheme == PairingScheme::RandomMatching ? "matching" : "random-pairs";
    j["mean_money"] = e.mean();
    j["total_money"] = e.total();
    j["fitted_beta"] = fit.histogram.fitted_beta;
    j["ks"] = fit.ks;
    j["bins"] = fit.histogram.counts.size();
    return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
    out.flush();
    if (!out) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

} // namespace kinex
