#include "kinex/reproduce.hpp"

#include "kinex/wealth_operator.hpp"

#include <cmath>

namespace kinex {

double ReferenceRow::error() const {
    return std::abs(computed - reference);
}

namespace {

std::vector<double> distances(const GridDistribution& y0, Effectiveness eff, std::size_t steps) {
    const GridDistribution mu = target_equilibrium(y0);
    std::vector<double> out{l1_distance(y0, mu)};
    GridDistribution y = y0;
    for (std::size_t n = 1; n <= steps; ++n) {
        y = apply_T_lambda(y, eff);
        out.push_back(l1_distance(y, mu));
    }
    return out;
}

} // namespace

std::vector<ReferenceRow> reproduce_examples(const Grid& grid, double tolerance) {
    std::vector<ReferenceRow> rows;
    const auto y = sample_family(family::Lomax2{}, grid);
    const auto w = sample_family(family::Exponential{1.0}, grid);
    rows.push_back({"lomax2 vs exp:1, ||y - w||", reference::lomax_exp_distance,
                    l1_distance(y, w), tolerance});
    rows.push_back({"lomax2 vs exp:1, ||Ty - Tw||", reference::lomax_exp_image_distance,
                    l1_distance(apply_T(y), apply_T(w)), tolerance});

    const auto gamma = sample_family(family::Gamma21{}, grid);
    const auto full = distances(gamma, Effectiveness::full(), 4);
    for (std::size_t n = 0; n < full.size(); ++n) {
        rows.push_back({"gamma21 lambda=1, ||T^" + std::to_string(n) + "y - mu||",
                        reference::gamma_full[n], full[n], tolerance});
    }
    const auto half = distances(gamma, Effectiveness(0.5), 3);
    for (std::size_t n = 0; n < half.size(); ++n) {
        rows.push_back({"gamma21 lambda=0.5, ||T^" + std::to_string(n) + "y - mu||",
                        reference::gamma_half[n], half[n], tolerance});
    }
    return rows;
}

std::vector<double> rectangular_distances(const Grid& grid, double lower, double upper,
                                          std::size_t steps) {
    return distances(sample_family(family::Rectangular{lower, upper}, grid),
                     Effectiveness::full(), steps);
}

} // namespace kinex
