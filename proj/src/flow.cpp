#include "kinex/flow.hpp"

#include "kinex/errors.hpp"

#include <cmath>

namespace kinex {

std::string to_string(VerdictKind kind) {
    switch (kind) {
    case VerdictKind::ConvergedToExponential:
        return "ConvergedToExponential";
    case VerdictKind::CollapseToZero:
        return "CollapseToZero";
    case VerdictKind::DivergentNorm:
        return "DivergentNorm";
    case VerdictKind::PointwiseVanishing:
        return "PointwiseVanishing";
    case VerdictKind::MaxStepsReached:
        return "MaxStepsReached";
    }
    return "Unknown";
}

std::string to_string(Regime regime) {
    switch (regime) {
    case Regime::InteriorBall:
        return "InteriorBall";
    case Regime::UnitSphereFiniteMean:
        return "UnitSphereFiniteMean";
    case Regime::UnitSphereInfiniteMean:
        return "UnitSphereInfiniteMean";
    case Regime::ExteriorBall:
        return "ExteriorBall";
    }
    return "Unknown";
}

namespace {

// Integral over the first `count` nodes; Simpson plus one trapezoid
// interval when the count is even.
double leading_integral(std::span<const double> f, double h, std::size_t count) {
    if (count % 2 == 1) {
        return simpson(f.first(count), h);
    }
    return simpson(f.first(count - 1), h) + 0.5 * h * (f[count - 2] + f[count - 1]);
}

} // namespace

Regime regime_of(const GridDistribution& y0, const RegimeOptions& opts) {
    const double norm = l1_norm(y0);
    if (norm < 1.0 - opts.norm_tol) {
        return Regime::InteriorBall;
    }
    if (norm > 1.0 + opts.norm_tol) {
        return Regime::ExteriorBall;
    }

    const Grid& g = y0.grid();
    const std::size_t half = (g.size() - 1) / 2 + 1;
    std::vector<double> moment(y0.size());
    for (std::size_t i = 0; i < y0.size(); ++i) {
        moment[i] = g.node(i) * y0[i];
    }
    const double h = g.spacing();
    const double half_mass = leading_integral(y0.values(), h, half);
    const double half_mean = leading_integral(moment, h, half);
    const double full_mean = simpson(moment, h);

    if (half_mass >= opts.resolved_share * norm && half_mean > 0.0 &&
        full_mean > (1.0 + opts.mean_growth) * half_mean) {
        return Regime::UnitSphereInfiniteMean;
    }
    return Regime::UnitSphereFiniteMean;
}

std::vector<double> Trajectory::distance_ratios() const {
    std::vector<double> out;
    for (std::size_t i = 1; i < steps.size(); ++i) {
        if (steps[i - 1].dist_to_target > 0.0) {
            out.push_back(steps[i].dist_to_target / steps[i - 1].dist_to_target);
        }
    }
    return out;
}

Trajectory iterate(const GridDistribution& y0, Effectiveness eff, const IterateOptions& opts) {
    if (opts.max_steps < 1) {
        throw ParameterError("max_steps must be at least 1");
    }
    if (!(opts.stop_tol > 0.0)) {
        throw ParameterError("stop_tol must be positive");
    }

    const Regime regime = regime_of(y0, opts.regime);
    // Sphere starts: the continuum dynamics keeps ||y_n|| = 1, while the
    // discrete sphere is unstable (a norm error doubles every step).
    // Finite mean: project each iterate back to ||y0||, reporting the removed
    // discrepancy as leakage. Infinite mean: mass really escapes past x_max,
    // so it is tracked as escaped rather than restored.
    const bool project = regime == Regime::UnitSphereFiniteMean;
    const bool track_escape = regime == Regime::UnitSphereInfiniteMean;
    const double initial_norm = l1_norm(y0);
    const double nominal_norm = track_escape ? 1.0 : initial_norm;

    // Exponential target unless the mean is infinite (or zero).
    std::optional<GridDistribution> target;
    double delta = 0.0;
    if (!track_escape) {
        const double m = mean_wealth(y0);
        if (m > 0.0 && std::isfinite(m)) {
            target = target_equilibrium(y0);
            delta = 1.0 / m;
        }
    }

    double escaped = 0.0;
    auto diagnose = [&](std::size_t step, const GridDistribution& y, double leakage) {
        StepDiagnostics s;
        s.step = step;
        s.norm = l1_norm(y);
        s.mean = mean_wealth(y);
        s.leakage = leakage;
        s.sup_value = y.sup_value();
        // Against the zero target, escaped mass still counts toward the distance.
        s.dist_to_target = target ? l1_distance(y, *target) : s.norm + escaped;
        return s;
    };

    Trajectory traj{{}, {}, y0};
    auto record = [&](const StepDiagnostics& s, const GridDistribution& y) {
        traj.steps.push_back(s);
        if (opts.observer) {
            opts.observer(s, y);
        }
    };

    // Step 0: for infinite-mean starts the mass missing from the window has
    // already escaped.
    if (track_escape) {
        escaped = nominal_norm - initial_norm;
    }
    record(diagnose(0, y0, escaped), y0);

    auto converged = [&](const StepDiagnostics& s) {
        return target && s.dist_to_target <= opts.stop_tol;
    };
    auto effective_norm = [&](const StepDiagnostics& s) {
        return s.norm + escaped;
    };

    auto finish = [&](VerdictKind kind, std::string note = {}) {
        traj.verdict.kind = kind;
        traj.verdict.delta = kind == VerdictKind::ConvergedToExponential ? delta : 0.0;
        traj.verdict.note = std::move(note);
        return traj;
    };

    if (converged(traj.steps.back())) {
        return finish(VerdictKind::ConvergedToExponential, "initial distribution is at its target");
    }
    if (eff.value() == 0.0) {
        return finish(VerdictKind::MaxStepsReached, "frozen market (lambda = 0): iteration is the identity");
    }
    if (effective_norm(traj.steps.back()) <= opts.collapse_norm) {
        return finish(VerdictKind::CollapseToZero);
    }

    std::size_t plateau_run = 0;
    GridDistribution current = y0;
    for (std::size_t n = 1; n <= opts.max_steps; ++n) {
        OperatorImage next = apply_T_lambda_with_leakage(current, eff, opts.kernel);
        const double prev_norm = traj.steps.back().norm;
        const double prev_sup = traj.steps.back().sup_value;
        current = std::move(next.image);

        double leakage = next.leakage;
        if (track_escape) {
            leakage = prev_norm - l1_norm(current);
            escaped += leakage;
        } else if (project) {
            const double raw = l1_norm(current);
            leakage = initial_norm - raw;
            if (raw > 0.0) {
                current = current.scaled(initial_norm / raw);
            }
        }
        const StepDiagnostics s = diagnose(n, current, leakage);
        record(s, current);
        traj.final_distribution = current;

        if (converged(s)) {
            return finish(VerdictKind::ConvergedToExponential);
        }
        const double norm = effective_norm(s);
        if (norm <= opts.collapse_norm) {
            return finish(VerdictKind::CollapseToZero);
        }
        if (norm >= opts.divergence_norm) {
            return finish(VerdictKind::DivergentNorm);
        }

        const bool stalled =
            std::abs(s.dist_to_target - nominal_norm) <= opts.plateau_band * nominal_norm;
        plateau_run = (stalled && s.sup_value < prev_sup) ? plateau_run + 1 : 0;
        if (plateau_run >= opts.plateau_steps) {
            return finish(VerdictKind::PointwiseVanishing,
                          "distance to target stalls near ||y0|| while the density flattens");
        }
    }
    return finish(VerdictKind::MaxStepsReached);
}

Trajectory iterate(const GridDistribution& y0, Effectiveness eff, std::size_t max_steps,
                   double stop_tol) {
    IterateOptions opts;
    opts.max_steps = max_steps;
    opts.stop_tol = stop_tol;
    return iterate(y0, eff, opts);
}

std::vector<std::pair<double, double>> norm_power_check(const GridDistribution& y0, std::size_t n,
                                                        KernelOptions kernel) {
    if (n > 6) {
        throw ParameterError("norm_power_check supports at most 6 steps");
    }
    const double base = l1_norm(y0);
    std::vector<std::pair<double, double>> out;
    GridDistribution y = y0;
    double predicted = base;
    for (std::size_t k = 0; k <= n; ++k) {
        out.emplace_back(l1_norm(y), predicted);
        if (k < n) {
            y = apply_T(y, kernel);
            predicted *= predicted;
        }
    }
    return out;
}

} // namespace kinex
