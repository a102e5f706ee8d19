#include "kinex/grid_dist.hpp"

#include "kinex/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace kinex {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool parse_double(const std::string& text, double& out) {
    try {
        std::size_t used = 0;
        out = std::stod(text, &used);
        while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) {
            ++used;
        }
        return used == text.size();
    } catch (const std::exception&) {
        return false;
    }
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double interpolate(const family::Tabulated& t, double x) {
    if (x < t.x.front() || x > t.x.back()) {
        return 0.0;
    }
    const auto it = std::upper_bound(t.x.begin(), t.x.end(), x);
    if (it == t.x.end()) {
        return t.density.back();
    }
    const auto hi = static_cast<std::size_t>(it - t.x.begin());
    const auto lo = hi - 1;
    const double w = (x - t.x[lo]) / (t.x[hi] - t.x[lo]);
    return (1.0 - w) * t.density[lo] + w * t.density[hi];
}

} // namespace

Grid::Grid(double x_max, std::size_t n_points)
    : x_max_(x_max), n_points_(n_points), spacing_(0.0) {
    if (!(x_max > 0.0) || !std::isfinite(x_max)) {
        throw ParameterError("grid x_max must be positive and finite");
    }
    if (n_points < kMinPoints) {
        throw ParameterError("grid needs at least " + std::to_string(kMinPoints) + " points");
    }
    if (n_points % 2 == 0) {
        throw ParameterError("grid point count must be odd (composite Simpson)");
    }
    spacing_ = x_max / static_cast<double>(n_points - 1);
}

std::vector<double> Grid::nodes() const {
    std::vector<double> out(n_points_);
    for (std::size_t i = 0; i < n_points_; ++i) {
        out[i] = node(i);
    }
    return out;
}

GridDistribution::GridDistribution(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw GridMismatchError("distribution has " + std::to_string(values_.size()) +
                                " values for a grid of " + std::to_string(grid_.size()));
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i]) || values_[i] < 0.0) {
            throw ParameterError("density value at node " + std::to_string(i) +
                                 " is negative or not finite");
        }
    }
}

GridDistribution GridDistribution::zeros(const Grid& grid) {
    return {grid, std::vector<double>(grid.size(), 0.0)};
}

GridDistribution GridDistribution::scaled(double factor) const {
    if (!(factor >= 0.0) || !std::isfinite(factor)) {
        throw ParameterError("scale factor must be non-negative and finite");
    }
    std::vector<double> out(values_);
    for (auto& v : out) {
        v *= factor;
    }
    return {grid_, std::move(out)};
}

double GridDistribution::sup_value() const noexcept {
    return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

void validate(const DistributionFamily& family) {
    std::visit(overloaded{
                   [](const family::Exponential& e) {
                       if (!(e.delta > 0.0) || !std::isfinite(e.delta)) {
                           throw ParameterError("exponential rate must be positive");
                       }
                   },
                   [](const family::Gamma21&) {},
                   [](const family::Rectangular& r) {
                       if (!(r.lower >= 0.0) || !(r.upper > r.lower) || !std::isfinite(r.upper)) {
                           throw ParameterError("rectangular bounds need 0 <= a < b");
                       }
                   },
                   [](const family::Lomax2&) {},
                   [](const family::Tabulated& t) {
                       if (t.x.size() < 2 || t.x.size() != t.density.size()) {
                           throw ParameterError("tabulated density needs at least two (x, y) rows");
                       }
                       for (std::size_t i = 0; i < t.x.size(); ++i) {
                           if (!std::isfinite(t.x[i]) || !std::isfinite(t.density[i]) ||
                               t.density[i] < 0.0 || t.x[i] < 0.0) {
                               throw ParameterError("tabulated rows must be finite, x >= 0, density >= 0");
                           }
                           if (i > 0 && !(t.x[i] > t.x[i - 1])) {
                               throw ParameterError("tabulated x must be strictly increasing");
                           }
                       }
                   },
               },
               family);
}

std::string describe(const DistributionFamily& family) {
    return std::visit(
        overloaded{
            [](const family::Exponential& e) {
                std::ostringstream os;
                os << "exp:" << e.delta;
                return os.str();
            },
            [](const family::Gamma21&) { return std::string("gamma21"); },
            [](const family::Rectangular& r) {
                std::ostringstream os;
                os << "rect:" << r.lower << ":" << r.upper;
                return os.str();
            },
            [](const family::Lomax2&) { return std::string("lomax2"); },
            [](const family::Tabulated& t) {
                return "tabulated(" + std::to_string(t.x.size()) + " rows)";
            },
        },
        family);
}

double density_at(const DistributionFamily& family, double x) {
    if (x < 0.0) {
        return 0.0;
    }
    return std::visit(overloaded{
                          [x](const family::Exponential& e) { return e.delta * std::exp(-e.delta * x); },
                          [x](const family::Gamma21&) { return x * std::exp(-x); },
                          [x](const family::Rectangular& r) {
                              return (x > r.lower && x < r.upper) ? 1.0 / (r.upper - r.lower) : 0.0;
                          },
                          [x](const family::Lomax2&) { return 1.0 / ((1.0 + x) * (1.0 + x)); },
                          [x](const family::Tabulated& t) { return interpolate(t, x); },
                      },
                      family);
}

GridDistribution sample_family(const DistributionFamily& family, const Grid& grid) {
    validate(family);
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        values[i] = density_at(family, grid.node(i));
    }
    if (const auto* r = std::get_if<family::Rectangular>(&family)) {
        const double height = 1.0 / (r->upper - r->lower);
        const double snap = 1e-9 * grid.spacing();
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double x = grid.node(i);
            const bool at_lower = std::abs(x - r->lower) <= snap;
            const bool at_upper = std::abs(x - r->upper) <= snap;
            if (at_lower && i == 0) {
                // left edge of the domain, not an interior jump
                values[i] = height;
            } else if (at_lower || at_upper) {
                values[i] = 0.5 * height;
            }
        }
    }
    return {grid, std::move(values)};
}

double simpson(std::span<const double> values, double spacing) {
    const std::size_t n = values.size();
    if (n == 0) {
        return 0.0;
    }
    if (n % 2 == 0) {
        throw ParameterError("composite Simpson needs an odd sample count");
    }
    if (n == 1) {
        return 0.0;
    }
    double odd = 0.0;
    double even = 0.0;
    for (std::size_t i = 1; i + 1 < n; i += 2) {
        odd += values[i];
    }
    for (std::size_t i = 2; i + 1 < n; i += 2) {
        even += values[i];
    }
    return spacing / 3.0 * (values.front() + 4.0 * odd + 2.0 * even + values.back());
}

double l1_norm(const GridDistribution& d) {
    return simpson(d.values(), d.grid().spacing());
}

double mean_wealth(const GridDistribution& d) {
    const Grid& g = d.grid();
    std::vector<double> moment(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        moment[i] = g.node(i) * d[i];
    }
    return simpson(moment, g.spacing());
}

void require_same_grid(const GridDistribution& a, const GridDistribution& b) {
    if (!(a.grid() == b.grid())) {
        throw GridMismatchError("distributions live on different grids");
    }
}

double l1_distance(const GridDistribution& a, const GridDistribution& b) {
    require_same_grid(a, b);
    std::vector<double> diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff[i] = std::abs(a[i] - b[i]);
    }
    return simpson(diff, a.grid().spacing());
}

GridDistribution target_equilibrium(const GridDistribution& d) {
    const double mean = mean_wealth(d);
    if (!(mean > 0.0) || !std::isfinite(mean)) {
        throw DegenerateInputError("target equilibrium needs a positive finite mean wealth");
    }
    return sample_family(family::Exponential{1.0 / mean}, d.grid());
}

family::Tabulated load_tabulated_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParameterError("cannot open tabulated density file " + path.string());
    }
    family::Tabulated table;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string text = trim(line);
        if (text.empty() || text.front() == '#') {
            continue;
        }
        const auto comma = text.find(',');
        if (comma == std::string::npos) {
            throw ParameterError(path.string() + ":" + std::to_string(line_no) +
                                 ": expected two comma-separated columns");
        }
        double x = 0.0;
        double y = 0.0;
        const bool ok = parse_double(trim(text.substr(0, comma)), x) &&
                        parse_double(trim(text.substr(comma + 1)), y);
        if (!ok) {
            if (table.x.empty() && !header_seen) {
                header_seen = true;
                continue;
            }
            throw ParameterError(path.string() + ":" + std::to_string(line_no) +
                                 ": non-numeric row");
        }
        table.x.push_back(x);
        table.density.push_back(y);
    }
    validate(table);
    return table;
}

} // namespace kinex
