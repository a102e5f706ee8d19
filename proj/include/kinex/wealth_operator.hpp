#pragma once

#include "kinex/grid_dist.hpp"

namespace kinex {

/// Market effectiveness: probability that a planned pairwise trade executes.
class Effectiveness {
public:
    explicit Effectiveness(double lambda);

    static Effectiveness full() { return Effectiveness(1.0); }
    static Effectiveness frozen() { return Effectiveness(0.0); }

    double value() const noexcept { return lambda_; }

    friend bool operator==(const Effectiveness&, const Effectiveness&) = default;

private:
    double lambda_;
};

struct KernelOptions {
    // 0 picks std::thread::hardware_concurrency(). Results do not depend on it.
    unsigned threads = 0;
};

/// Operator image plus the mass that fell beyond x_max.
struct OperatorImage {
    GridDistribution image;
    double leakage = 0.0;
};

/**
 * Self-convolution c(s) = int_0^s y(u) y(s-u) du on the extended nodes
 * s_k = k h, k = 0 .. 2(N-1), with y taken as zero beyond x_max.
 *
 * Each c_k is a composite Simpson sum over the overlap of the two supports
 * (3/8 rule on the last three intervals when the count is odd, trapezoid
 * for a single interval).
 */
std::vector<double> self_convolution(const GridDistribution& d, KernelOptions opts = {});

/**
 * Applies the random-exchange operator
 *
 *     (Ty)(x) = iint_{u+v>x} y(u) y(v) / (u+v) du dv
 *
 * through the substitution s = u + v, which turns it into the tail integral
 * (Ty)(x) = int_x^{2 x_max} c(s)/s ds of the self-convolution. The integrand
 * at s = 0 is its limit y(0)^2. The part of the image on (x_max, 2 x_max]
 * is dropped from the returned grid and reported as leakage.
 */
OperatorImage apply_T_with_leakage(const GridDistribution& d, KernelOptions opts = {});
GridDistribution apply_T(const GridDistribution& d, KernelOptions opts = {});

/// (1 - lambda) y + lambda T y. Bit-identical to y at lambda 0 and to T y at lambda 1.
OperatorImage apply_T_lambda_with_leakage(const GridDistribution& d, Effectiveness eff,
                                          KernelOptions opts = {});
GridDistribution apply_T_lambda(const GridDistribution& d, Effectiveness eff,
                                KernelOptions opts = {});

/**
 * Slow reference for (Ty)(x): direct double sum over the cells of the
 * (u, v) square [0, x_max]^2.
 *
 * Inside every cell y(u) y(v) is the product of the two linear
 * interpolants, and the products of its four monomials with the 1/(u+v)
 * kernel are integrated over the part of the cell lying in u + v > x with
 * Gauss-Legendre rules (collapsed near the origin, where the kernel is
 * singular). The result is exact for piecewise-linear densities.
 */
double oracle_T_point(const GridDistribution& d, double x);

/// ||T a - T b|| / ||a - b||; bounded by 2 on the unit sphere.
double lipschitz_ratio(const GridDistribution& a, const GridDistribution& b,
                       KernelOptions opts = {});

/// Same ratio for T_lambda; bounded by 1 + lambda on the unit sphere.
double lipschitz_ratio_lambda(const GridDistribution& a, const GridDistribution& b,
                              Effectiveness eff, KernelOptions opts = {});

} // namespace kinex
