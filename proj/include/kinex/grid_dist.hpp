#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace kinex {

/**
 * Uniform discretization of the wealth axis [0, x_max].
 *
 * The node count must be odd so that composite Simpson covers the grid
 * without a remainder interval.
 */
class Grid {
public:
    static constexpr double kDefaultXMax = 50.0;
    static constexpr std::size_t kDefaultPoints = 5001;
    static constexpr std::size_t kMinPoints = 17;

    Grid() : Grid(kDefaultXMax, kDefaultPoints) {}
    Grid(double x_max, std::size_t n_points);

    double x_max() const noexcept { return x_max_; }
    std::size_t size() const noexcept { return n_points_; }
    double spacing() const noexcept { return spacing_; }

    // Exact endpoints: node(0) == 0 and node(size()-1) == x_max.
    double node(std::size_t i) const noexcept {
        return x_max_ * static_cast<double>(i) / static_cast<double>(n_points_ - 1);
    }
    std::vector<double> nodes() const;

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    double x_max_;
    std::size_t n_points_;
    double spacing_;
};

/// Non-negative, finite density sampled at every node of a grid.
class GridDistribution {
public:
    GridDistribution(Grid grid, std::vector<double> values);

    static GridDistribution zeros(const Grid& grid);

    const Grid& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    GridDistribution scaled(double factor) const;
    double sup_value() const noexcept;

    friend bool operator==(const GridDistribution&, const GridDistribution&) = default;

private:
    Grid grid_;
    std::vector<double> values_;
};

namespace family {

/// delta * exp(-delta x); the fixed-point family of the exchange operator.
struct Exponential {
    double delta = 1.0;
};

/// x exp(-x), mean 2.
struct Gamma21 {};

/// Uniform density 1/(b-a) on (a, b).
struct Rectangular {
    double lower = 0.0;
    double upper = 1.0;
};

/// 1/(1+x)^2; unit mass with infinite mean.
struct Lomax2 {};

/// User-supplied (x, density) table, linearly interpolated, zero outside.
struct Tabulated {
    std::vector<double> x;
    std::vector<double> density;
};

} // namespace family

using DistributionFamily = std::variant<family::Exponential, family::Gamma21,
                                        family::Rectangular, family::Lomax2,
                                        family::Tabulated>;

// Throws ParameterError if the family's parameters are out of range.
void validate(const DistributionFamily& family);

std::string describe(const DistributionFamily& family);

/// Point evaluation of the family density (no jump-node averaging).
double density_at(const DistributionFamily& family, double x);

/**
 * Evaluates the family at every grid node.
 *
 * No renormalization is applied, so mass beyond x_max stays visible as a
 * norm deficit. Rectangular jumps that fall on a node get the average of
 * the one-sided limits.
 */
GridDistribution sample_family(const DistributionFamily& family, const Grid& grid);

/// Composite Simpson over a uniform grid with an odd number of samples.
double simpson(std::span<const double> values, double spacing);

double l1_norm(const GridDistribution& d);
double mean_wealth(const GridDistribution& d);
double l1_distance(const GridDistribution& a, const GridDistribution& b);

/// delta e^{-delta x} with delta = 1 / mean_wealth(d), sampled on d's grid.
GridDistribution target_equilibrium(const GridDistribution& d);

void require_same_grid(const GridDistribution& a, const GridDistribution& b);

/**
 * Loads a two-column CSV (x, density). Lines starting with '#' and a
 * non-numeric header line are skipped. x must be strictly increasing and
 * densities non-negative.
 */
family::Tabulated load_tabulated_csv(const std::filesystem::path& path);

} // namespace kinex
