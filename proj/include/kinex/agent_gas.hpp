#pragma once

#include "kinex/grid_dist.hpp"
#include "kinex/wealth_operator.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace kinex {

/**
 * Seedable generator with a fixed, platform-independent draw sequence.
 *
 * Wraps std::mt19937_64 (whose output sequence the standard pins down) and
 * derives its own uniform and bounded-integer draws instead of relying on
 * the library's distribution classes. Independent streams are split off a
 * root seed with SplitMix64.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    /// Uniform in (0, 1); exact zeros are redrawn.
    double uniform_open();
    /// Uniform integer in [0, bound), bound > 0, by rejection.
    std::uint64_t below(std::uint64_t bound);
    bool bernoulli(double p) { return uniform() < p; }

    friend bool operator==(const Rng&, const Rng&) = default;

private:
    std::mt19937_64 engine_;
};

enum class PairingScheme {
    // Shuffle, then pair adjacent agents: every agent trades once per sweep.
    RandomMatching,
    // N/2 pairs drawn independently (an agent can appear in several).
    IndependentPairs,
};

/// State of the discrete money-exchange gas.
class Ensemble {
public:
    Ensemble(std::vector<double> money, std::uint64_t seed);

    std::span<const double> money() const noexcept { return money_; }
    std::size_t size() const noexcept { return money_.size(); }
    double total() const noexcept { return total_; }
    double mean() const noexcept { return total_ / static_cast<double>(money_.size()); }
    std::uint64_t seed() const noexcept { return seed_; }
    std::size_t sweep_count() const noexcept { return sweep_count_; }

    friend bool operator==(const Ensemble&, const Ensemble&) = default;

private:
    friend void sweep_in_place(Ensemble&, Effectiveness, PairingScheme);

    std::vector<double> money_;
    double total_;
    std::uint64_t seed_;
    std::size_t sweep_count_ = 0;
    Rng rng_;
};

/// N agents holding `initial_money` each. N must be even and at least 2.
Ensemble init_ensemble(std::size_t n_agents, double initial_money, std::uint64_t seed);

/// N agents with money drawn from a grid density by inverse-CDF sampling
/// (the density is normalized over the grid window for sampling).
Ensemble init_ensemble_from(const GridDistribution& density, std::size_t n_agents,
                            std::uint64_t seed);

/**
 * One macro-step: N/2 planned pair trades, each executed with probability
 * lambda. An executed trade draws eps in (0, 1) and sets
 * m_i' = eps (m_i + m_j), m_j' = (1 - eps)(m_i + m_j).
 *
 * Draw order per sweep: pairing draws, then one Bernoulli per pair, then
 * one eps per executed pair.
 */
void sweep_in_place(Ensemble& e, Effectiveness eff,
                    PairingScheme scheme = PairingScheme::RandomMatching);
Ensemble sweep(Ensemble e, Effectiveness eff, PairingScheme scheme = PairingScheme::RandomMatching);

/// Exchange rule applied to a single pair.
std::pair<double, double> trade(double m_i, double m_j, double eps);

struct WealthHistogram {
    std::vector<double> bin_edges;
    std::vector<std::size_t> counts;
    double fitted_beta = 0.0; // 1 / <m>_gas
};

/// Uniform bins on [0, max money]; the top edge is inclusive.
WealthHistogram histogram(const Ensemble& e, std::size_t n_bins);

/// sup |F_N(m) - (1 - exp(-beta m))|.
double ks_statistic_exponential(std::span<const double> samples, double beta);

struct FitResult {
    WealthHistogram histogram;
    double ks = 0.0;
};

/// Runs n_sweeps on `e` (in place) and fits the exponential law to the result.
FitResult run_and_fit(Ensemble& e, Effectiveness eff, std::size_t n_sweeps, std::size_t n_bins,
                      PairingScheme scheme = PairingScheme::RandomMatching);

/**
 * L1 distance between the ensemble's histogram density and a reference
 * density, compared bin by bin as masses. Bins span `nodes_per_bin` grid
 * intervals (even); agents beyond x_max are compared, as one overflow bin,
 * with the reference mass missing from the window.
 */
double histogram_l1_distance(const Ensemble& e, const GridDistribution& reference,
                             std::size_t nodes_per_bin = 10);

struct EquilibrationResult {
    bool equilibrated = false;
    std::size_t sweeps = 0;
    std::vector<double> ks_history;
};

/**
 * Sweeps in blocks of `checkpoint_sweeps` until the KS statistic settles:
 * `window` consecutive checkpoints whose change from the previous one is
 * below 10 percent, or below the sampling resolution 1/sqrt(N).
 */
EquilibrationResult equilibrate(Ensemble& e, Effectiveness eff, std::size_t checkpoint_sweeps,
                                std::size_t max_sweeps, std::size_t window = 10,
                                PairingScheme scheme = PairingScheme::RandomMatching);

} // namespace kinex
