#include "kinex/agent_gas.hpp"

#include "kinex/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace kinex {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t state = seed ^ (stream * 0xd1b54a32d192ed03ULL);
    splitmix64(state);
    return splitmix64(state);
}

// Stream ids split off an ensemble seed.
constexpr std::uint64_t kDynamicsStream = 0;
constexpr std::uint64_t kInitStream = 1;

} // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : engine_(derive_seed(seed, stream)) {}

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform_open() {
    double u = 0.0;
    while (u == 0.0) {
        u = uniform();
    }
    return u;
}

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound == 0) {
        throw ParameterError("Rng::below needs a positive bound");
    }
    // Reject the incomplete top block so every residue is equally likely.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound + 1) % bound;
    std::uint64_t r = engine_();
    while (r > limit) {
        r = engine_();
    }
    return r % bound;
}

Ensemble::Ensemble(std::vector<double> money, std::uint64_t seed)
    : money_(std::move(money)), total_(0.0), seed_(seed), rng_(seed, kDynamicsStream) {
    if (money_.size() < 2 || money_.size() % 2 != 0) {
        throw ParameterError("agent count must be even and at least 2");
    }
    for (double m : money_) {
        if (!(m >= 0.0) || !std::isfinite(m)) {
            throw ParameterError("agent money must be finite and non-negative");
        }
    }
    total_ = std::accumulate(money_.begin(), money_.end(), 0.0);
    if (!(total_ > 0.0)) {
        throw ParameterError("total money must be positive");
    }
}

Ensemble init_ensemble(std::size_t n_agents, double initial_money, std::uint64_t seed) {
    if (!(initial_money > 0.0) || !std::isfinite(initial_money)) {
        throw ParameterError("initial money must be positive and finite");
    }
    return Ensemble(std::vector<double>(n_agents, initial_money), seed);
}

Ensemble init_ensemble_from(const GridDistribution& density, std::size_t n_agents,
                            std::uint64_t seed) {
    const Grid& g = density.grid();
    const double h = g.spacing();
    std::vector<double> cdf(density.size(), 0.0);
    for (std::size_t i = 1; i < density.size(); ++i) {
        cdf[i] = cdf[i - 1] + 0.5 * h * (density[i - 1] + density[i]);
    }
    const double mass = cdf.back();
    if (!(mass > 0.0)) {
        throw DegenerateInputError("cannot sample agents from a zero density");
    }
    Rng rng(seed, kInitStream);
    std::vector<double> money(n_agents);
    for (double& m : money) {
        const double target = rng.uniform() * mass;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
        const std::size_t i = std::min<std::size_t>(
            static_cast<std::size_t>(std::distance(cdf.begin(), it)), cdf.size() - 1);
        const std::size_t lo = i - 1;
        const double span = cdf[i] - cdf[lo];
        const double frac = span > 0.0 ? (target - cdf[lo]) / span : 0.0;
        m = g.node(lo) + frac * h;
    }
    return Ensemble(std::move(money), seed);
}

std::pair<double, double> trade(double m_i, double m_j, double eps) {
    const double pool = m_i + m_j;
    const double a = eps * pool;
    return {a, pool - a};
}

void sweep_in_place(Ensemble& e, Effectiveness eff, PairingScheme scheme) {
    const std::size_t n = e.money_.size();
    const std::size_t pairs = n / 2;
    Rng& rng = e.rng_;

    std::vector<std::size_t> order(n);
    if (scheme == PairingScheme::RandomMatching) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t i = n - 1; i > 0; --i) {
            std::swap(order[i], order[rng.below(i + 1)]);
        }
    } else {
        for (std::size_t p = 0; p < pairs; ++p) {
            const std::size_t a = rng.below(n);
            std::size_t b = rng.below(n);
            while (b == a) {
                b = rng.below(n);
            }
            order[2 * p] = a;
            order[2 * p + 1] = b;
        }
    }

    std::vector<char> active(pairs);
    for (std::size_t p = 0; p < pairs; ++p) {
        active[p] = rng.bernoulli(eff.value()) ? 1 : 0;
    }
    for (std::size_t p = 0; p < pairs; ++p) {
        if (!active[p]) {
            continue;
        }
        double& mi = e.money_[order[2 * p]];
        double& mj = e.money_[order[2 * p + 1]];
        std::tie(mi, mj) = trade(mi, mj, rng.uniform_open());
    }
    ++e.sweep_count_;
}

Ensemble sweep(Ensemble e, Effectiveness eff, PairingScheme scheme) {
    sweep_in_place(e, eff, scheme);
    return e;
}

WealthHistogram histogram(const Ensemble& e, std::size_t n_bins) {
    if (n_bins == 0) {
        throw ParameterError("histogram needs at least one bin");
    }
    const auto money = e.money();
    const double top = *std::max_element(money.begin(), money.end());
    WealthHistogram hist;
    hist.bin_edges.resize(n_bins + 1);
    for (std::size_t b = 0; b <= n_bins; ++b) {
        hist.bin_edges[b] = top * static_cast<double>(b) / static_cast<double>(n_bins);
    }
    hist.counts.assign(n_bins, 0);
    const double width = top / static_cast<double>(n_bins);
    for (double m : money) {
        std::size_t b = width > 0.0 ? static_cast<std::size_t>(m / width) : 0;
        hist.counts[std::min(b, n_bins - 1)] += 1;
    }
    hist.fitted_beta = 1.0 / e.mean();
    return hist;
}

double ks_statistic_exponential(std::span<const double> samples, double beta) {
    if (samples.empty()) {
        throw DegenerateInputError("KS statistic of an empty sample");
    }
    if (!(beta > 0.0)) {
        throw ParameterError("exponential rate must be positive");
    }
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = -std::expm1(-beta * sorted[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

FitResult run_and_fit(Ensemble& e, Effectiveness eff, std::size_t n_sweeps, std::size_t n_bins,
                      PairingScheme scheme) {
    for (std::size_t s = 0; s < n_sweeps; ++s) {
        sweep_in_place(e, eff, scheme);
    }
    FitResult out;
    out.histogram = histogram(e, n_bins);
    out.ks = ks_statistic_exponential(e.money(), out.histogram.fitted_beta);
    return out;
}

double histogram_l1_distance(const Ensemble& e, const GridDistribution& reference,
                             std::size_t nodes_per_bin) {
    if (nodes_per_bin == 0 || nodes_per_bin % 2 != 0) {
        throw ParameterError("nodes_per_bin must be even and positive");
    }
    const Grid& g = reference.grid();
    const std::size_t intervals = g.size() - 1;
    if (intervals % nodes_per_bin != 0) {
        throw ParameterError("nodes_per_bin must divide the number of grid intervals");
    }
    const std::size_t n_bins = intervals / nodes_per_bin;
    const double width = g.spacing() * static_cast<double>(nodes_per_bin);

    std::vector<double> empirical(n_bins, 0.0);
    double overflow = 0.0;
    const double weight = 1.0 / static_cast<double>(e.size());
    for (double m : e.money()) {
        if (m > g.x_max()) {
            overflow += weight;
            continue;
        }
        const auto b = std::min(static_cast<std::size_t>(m / width), n_bins - 1);
        empirical[b] += weight;
    }

    double dist = 0.0;
    double inside = 0.0;
    const auto y = reference.values();
    for (std::size_t b = 0; b < n_bins; ++b) {
        const double ref = simpson(y.subspan(b * nodes_per_bin, nodes_per_bin + 1), g.spacing());
        inside += ref;
        dist += std::abs(empirical[b] - ref);
    }
    return dist + std::abs(overflow - std::max(0.0, 1.0 - inside));
}

EquilibrationResult equilibrate(Ensemble& e, Effectiveness eff, std::size_t checkpoint_sweeps,
                                std::size_t max_sweeps, std::size_t window, PairingScheme scheme) {
    if (checkpoint_sweeps == 0 || window == 0) {
        throw ParameterError("checkpoint interval and window must be positive");
    }
    const double resolution = 1.0 / std::sqrt(static_cast<double>(e.size()));
    EquilibrationResult out;
    std::size_t settled = 0;
    while (out.sweeps < max_sweeps) {
        const std::size_t block = std::min(checkpoint_sweeps, max_sweeps - out.sweeps);
        for (std::size_t s = 0; s < block; ++s) {
            sweep_in_place(e, eff, scheme);
        }
        out.sweeps += block;
        const double ks = ks_statistic_exponential(e.money(), 1.0 / e.mean());
        if (!out.ks_history.empty()) {
            const double prev = out.ks_history.back();
            const double change = std::abs(ks - prev);
            settled = (change < 0.1 * prev || change < resolution) ? settled + 1 : 0;
        }
        out.ks_history.push_back(ks);
        if (settled >= window) {
            out.equilibrated = true;
            break;
        }
    }
    return out;
}

} // namespace kinex
