#pragma once

#include "kinex/grid_dist.hpp"

#include <string>
#include <vector>

namespace kinex {

struct ReferenceRow {
    std::string quantity;
    double reference = 0.0;
    double computed = 0.0;
    double tolerance = 0.0;

    double error() const;
    bool pass() const { return error() <= tolerance; }
};

/// Published reference values for the worked examples.
namespace reference {
inline constexpr double lomax_exp_distance = 0.407264;
inline constexpr double lomax_exp_image_distance = 0.505669;
inline constexpr double gamma_full[5] = {0.368226, 0.185608, 0.103225, 0.061195, 0.037675};
inline constexpr double gamma_half[4] = {0.368226, 0.273011, 0.206554, 0.158701};
} // namespace reference

/**
 * Recomputes every published example value on `grid`:
 * Lomax2 vs Exponential(1) distance before and after T, the Gamma21
 * distances ||T^n y - mu|| for n = 0..4, and ||T_{1/2}^n y - mu|| for n = 0..3.
 */
std::vector<ReferenceRow> reproduce_examples(const Grid& grid, double tolerance);

/// ||T^n y - mu|| for n = 0..steps along the rectangular start rect:a:b.
std::vector<double> rectangular_distances(const Grid& grid, double lower, double upper,
                                          std::size_t steps);

} // namespace kinex
