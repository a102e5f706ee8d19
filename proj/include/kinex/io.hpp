#pragma once

#include "kinex/agent_gas.hpp"
#include "kinex/flow.hpp"
#include "kinex/grid_dist.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

namespace kinex {

/// Parameters shared by the command-line runs.
struct RunConfig {
    double x_max = 50.0;
    std::size_t n_points = 5001;
    std::string family = "gamma21";
    double scale = 1.0; // the initial density is scale * family
    double lambda = 1.0;
    std::size_t max_steps = 200;
    double stop_tol = 1e-4;
    std::uint64_t seed = 42;
    std::filesystem::path out_dir = ".";

    /// Range checks owned by the numerical modules; throws ParameterError.
    void validate() const;
    Grid grid() const { return Grid(x_max, n_points); }
};

/**
 * Family spec strings: "exp:<delta>", "gamma21", "rect:<a>:<b>", "lomax2",
 * "csv:<path>". Throws ParameterError on anything else.
 */
DistributionFamily parse_family(const std::string& spec);

/// scale * family sampled on the config's grid.
GridDistribution initial_distribution(const RunConfig& cfg);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
void write_histogram_csv(std::ostream& os, const WealthHistogram& hist);
void write_ensemble_csv(std::ostream& os, const Ensemble& e);
void write_distribution_csv(std::ostream& os, const GridDistribution& d);

nlohmann::json to_json(const RunConfig& cfg);
nlohmann::json trajectory_summary(const Trajectory& traj, const RunConfig& cfg);
nlohmann::json simulation_summary(const Ensemble& e, const FitResult& fit, const RunConfig& cfg,
                                  std::size_t sweeps, PairingScheme scheme);

/// Writes `text` to `path`, creating parent directories. Throws
/// std::runtime_error when the file cannot be written.
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace kinex
