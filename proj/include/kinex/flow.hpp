#pragma once

#include "kinex/grid_dist.hpp"
#include "kinex/wealth_operator.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kinex {

/// Observables recorded for one iterate y_n.
struct StepDiagnostics {
    std::size_t step = 0;
    double norm = 0.0;           // ||y_n|| on the grid window
    double mean = 0.0;           // <y_n> on the grid window
    double dist_to_target = 0.0; // ||y_n - mu||, see IterateOptions
    double leakage = 0.0;        // mass lost to truncation during this step
    double sup_value = 0.0;

    friend bool operator==(const StepDiagnostics&, const StepDiagnostics&) = default;
};

enum class VerdictKind {
    ConvergedToExponential,
    CollapseToZero,
    DivergentNorm,
    PointwiseVanishing,
    MaxStepsReached,
};

std::string to_string(VerdictKind kind);

struct Verdict {
    VerdictKind kind = VerdictKind::MaxStepsReached;
    double delta = 0.0; // rate of the limit exponential, ConvergedToExponential only
    std::string note;
};

/// Partition of the state space driven by the norm-square law.
enum class Regime {
    InteriorBall,
    UnitSphereFiniteMean,
    UnitSphereInfiniteMean,
    ExteriorBall,
};

std::string to_string(Regime regime);

struct RegimeOptions {
    // |norm - 1| within this band counts as the unit sphere. The band has to
    // absorb the mass a heavy-tailed density keeps beyond x_max.
    double norm_tol = 0.05;
    // Infinite-mean heuristic: the mean estimate grows by more than this
    // fraction between the half window [0, x_max/2] and the full window.
    double mean_growth = 0.25;
    // ...applied only when the half window already holds this share of the mass.
    double resolved_share = 0.9;
};

Regime regime_of(const GridDistribution& y0, const RegimeOptions& opts = {});

struct Trajectory {
    std::vector<StepDiagnostics> steps;
    Verdict verdict;
    GridDistribution final_distribution;

    /// dist_{n+1} / dist_n for consecutive steps (empty entries skipped when dist_n == 0).
    std::vector<double> distance_ratios() const;
};

struct IterateOptions {
    std::size_t max_steps = 200;
    double stop_tol = 1e-4;
    double collapse_norm = 1e-6;
    double divergence_norm = 1e6;
    // Pointwise-vanishing signature: dist within this fraction of ||y0|| ...
    double plateau_band = 0.05;
    // ... for this many consecutive steps with strictly decreasing sup value.
    std::size_t plateau_steps = 10;
    RegimeOptions regime;
    KernelOptions kernel;
    // Called with every recorded step and its iterate. Must not affect the run.
    std::function<void(const StepDiagnostics&, const GridDistribution&)> observer;
};

/**
 * Fixed-point iteration y_{n+1} = T_lambda y_n.
 *
 * The target is the exponential with the mean of y0, or the zero function
 * when y0 is classified as a unit-sphere density with infinite mean.
 *
 * For unit-sphere starts the continuum dynamics conserves mass, so every
 * loss of window mass is truncation: it is reported as leakage and the
 * escaped mass enters the distance in aggregate (compared against the
 * target's own mass beyond x_max). Off the sphere the norm is free to
 * shrink or grow and leakage is the image mass pushed past x_max.
 *
 * lambda = 0 is a frozen market: the trajectory holds only step 0 and ends
 * with MaxStepsReached unless y0 is already within tolerance of its target.
 */
Trajectory iterate(const GridDistribution& y0, Effectiveness eff, const IterateOptions& opts);
Trajectory iterate(const GridDistribution& y0, Effectiveness eff, std::size_t max_steps = 200,
                   double stop_tol = 1e-4);

/// (observed ||T^k y0||, predicted ||y0||^(2^k)) for k = 0..n, n <= 6.
std::vector<std::pair<double, double>> norm_power_check(const GridDistribution& y0, std::size_t n,
                                                        KernelOptions kernel = {});

} // namespace kinex
