#include "kinex/wealth_operator.hpp"

#include "kinex/errors.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace kinex {

Effectiveness::Effectiveness(double lambda) : lambda_(lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw ParameterError("effectiveness lambda must lie in [0, 1]");
    }
}

namespace {

// Quadrature of f_j = y[j] * y[k - j] over j in [lo, hi].
double overlap_integral(std::span<const double> y, std::size_t k, std::size_t lo, std::size_t hi,
                        double h) {
    const std::size_t m = hi - lo;
    auto f = [&](std::size_t j) { return y[j] * y[k - j]; };
    if (m == 0) {
        return 0.0;
    }
    if (m == 1) {
        return 0.5 * h * (f(lo) + f(hi));
    }
    // Simpson part covers an even number of intervals starting at lo.
    const std::size_t simpson_end = (m % 2 == 0) ? hi : hi - 3;
    double sum = 0.0;
    if (simpson_end > lo) {
        double odd = 0.0;
        double even = 0.0;
        for (std::size_t j = lo + 1; j < simpson_end; j += 2) {
            odd += f(j);
        }
        for (std::size_t j = lo + 2; j < simpson_end; j += 2) {
            even += f(j);
        }
        sum = h / 3.0 * (f(lo) + 4.0 * odd + 2.0 * even + f(simpson_end));
    }
    if (simpson_end != hi) {
        const std::size_t a = simpson_end;
        sum += 3.0 * h / 8.0 * (f(a) + 3.0 * f(a + 1) + 3.0 * f(a + 2) + f(a + 3));
    }
    return sum;
}

} // namespace

std::vector<double> self_convolution(const GridDistribution& d, KernelOptions opts) {
    const std::size_t n = d.size();
    const std::size_t last = n - 1;
    const double h = d.grid().spacing();
    const auto y = d.values();
    std::vector<double> c(2 * last + 1, 0.0);
    detail::parallel_for(c.size(), opts.threads, [&](std::size_t k) {
        const std::size_t lo = k > last ? k - last : 0;
        const std::size_t hi = std::min(k, last);
        c[k] = overlap_integral(y, k, lo, hi, h);
    });
    // A single trapezoid interval misses the O(h^3) growth of c near s = 0;
    // use the cubic through c(0) = 0, c(2h), c(3h), c(4h) instead.
    c[1] = std::max(0.0, 1.5 * c[2] - c[3] + 0.25 * c[4]);
    return c;
}

OperatorImage apply_T_with_leakage(const GridDistribution& d, KernelOptions opts) {
    const Grid& grid = d.grid();
    const std::size_t n = grid.size();
    const double h = grid.spacing();
    const std::vector<double> c = self_convolution(d, opts);
    const std::size_t top = c.size() - 1; // even, since n is odd

    std::vector<double> integrand(c.size());
    integrand[0] = d[0] * d[0]; // lim_{s->0} c(s)/s
    for (std::size_t k = 1; k <= top; ++k) {
        integrand[k] = c[k] / (static_cast<double>(k) * h);
    }

    // tail[k] = int_{s_k}^{s_top} integrand, accumulated from per-interval
    // integrals of the local cubic (one-sided at both ends). Intervals are
    // clamped at zero since the integrand is non-negative, which keeps the
    // image nonincreasing node by node.
    const auto& g = integrand;
    auto interval = [&](std::size_t k) {
        double v = 0.0;
        if (k == 0) {
            v = 9.0 * g[0] + 19.0 * g[1] - 5.0 * g[2] + g[3];
        } else if (k + 2 > top) {
            v = g[k - 2] - 5.0 * g[k - 1] + 19.0 * g[k] + 9.0 * g[k + 1];
        } else {
            v = -g[k - 1] + 13.0 * g[k] + 13.0 * g[k + 1] - g[k + 2];
        }
        return std::max(0.0, h / 24.0 * v);
    };
    std::vector<double> tail(c.size(), 0.0);
    for (std::size_t k = top; k-- > 0;) {
        tail[k] = tail[k + 1] + interval(k);
    }

    std::vector<double> image(tail.begin(), tail.begin() + static_cast<std::ptrdiff_t>(n));
    const std::span<const double> beyond(tail.data() + (n - 1), n);
    const double leakage = simpson(beyond, h);
    return {GridDistribution(grid, std::move(image)), leakage};
}

GridDistribution apply_T(const GridDistribution& d, KernelOptions opts) {
    return apply_T_with_leakage(d, opts).image;
}

OperatorImage apply_T_lambda_with_leakage(const GridDistribution& d, Effectiveness eff,
                                          KernelOptions opts) {
    const double lambda = eff.value();
    if (lambda == 0.0) {
        return {d, 0.0};
    }
    OperatorImage full = apply_T_with_leakage(d, opts);
    if (lambda == 1.0) {
        return full;
    }
    std::vector<double> mixed(d.size());
    const auto image = full.image.values();
    for (std::size_t i = 0; i < d.size(); ++i) {
        mixed[i] = (1.0 - lambda) * d[i] + lambda * image[i];
    }
    return {GridDistribution(d.grid(), std::move(mixed)), lambda * full.leakage};
}

GridDistribution apply_T_lambda(const GridDistribution& d, Effectiveness eff, KernelOptions opts) {
    return apply_T_lambda_with_leakage(d, eff, opts).image;
}

// ---------------------------------------------------------------------------
// 2D reference quadrature

namespace {

constexpr std::size_t kGaussOrder = 16;

struct GaussRule {
    std::array<double, kGaussOrder> node{};
    std::array<double, kGaussOrder> weight{};
};

// Gauss-Legendre on [0, 1] by Newton iteration on P_n.
const GaussRule& gauss_rule() {
    static const GaussRule rule = [] {
        GaussRule r;
        constexpr std::size_t n = kGaussOrder;
        for (std::size_t i = 0; i < n; ++i) {
            double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                                (static_cast<double>(n) + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0;
                double p1 = 0.0;
                for (std::size_t j = 1; j <= n; ++j) {
                    const double p2 = p1;
                    p1 = p0;
                    const double jd = static_cast<double>(j);
                    p0 = ((2.0 * jd - 1.0) * z * p1 - (jd - 1.0) * p2) / jd;
                }
                dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
                const double dz = p0 / dp;
                z -= dz;
                if (std::abs(dz) < 1e-15) {
                    break;
                }
            }
            r.node[i] = 0.5 * (1.0 - z);
            r.weight[i] = 1.0 / ((1.0 - z * z) * dp * dp);
        }
        return r;
    }();
    return rule;
}

// Integrals of 1, (p - h/2), (p - h/2)(q - h/2) against 1/(offset + p + q)
// over part of a cell, in cell-local coordinates p, q in [0, h].
struct CellMoments {
    double k0 = 0.0;
    double k1 = 0.0;
    double k2 = 0.0;

    CellMoments& operator+=(const CellMoments& o) {
        k0 += o.k0;
        k1 += o.k1;
        k2 += o.k2;
        return *this;
    }
};

// Region {a < p + q <= b} with b <= h, in collapsed coordinates
// p = s t, q = s (1 - t); the Jacobian s cancels the kernel singularity.
CellMoments strip_moments(double offset, double a, double b, double h) {
    const GaussRule& g = gauss_rule();
    CellMoments m;
    const double len = b - a;
    if (len <= 0.0) {
        return m;
    }
    for (std::size_t i = 0; i < kGaussOrder; ++i) {
        const double s = a + len * g.node[i];
        const double radial = len * g.weight[i] * s / (offset + s);
        for (std::size_t j = 0; j < kGaussOrder; ++j) {
            const double p = s * g.node[j] - 0.5 * h;
            const double q = s * (1.0 - g.node[j]) - 0.5 * h;
            const double w = radial * g.weight[j];
            m.k0 += w;
            m.k1 += w * p;
            m.k2 += w * p * q;
        }
    }
    return m;
}

// Upper-right triangle {p, q <= h, p + q > tau} for h <= tau < 2h, collapsed
// onto the corner (h, h).
CellMoments corner_moments(double offset, double tau, double h) {
    const GaussRule& g = gauss_rule();
    CellMoments m;
    const double leg = 2.0 * h - tau;
    if (leg <= 0.0) {
        return m;
    }
    const double area = leg * leg;
    for (std::size_t i = 0; i < kGaussOrder; ++i) {
        const double r = g.node[i];
        for (std::size_t j = 0; j < kGaussOrder; ++j) {
            const double t = g.node[j];
            const double p = h - r * t * leg;
            const double q = h - r * (1.0 - t) * leg;
            const double w = g.weight[i] * g.weight[j] * r * area / (offset + p + q);
            m.k0 += w;
            m.k1 += w * (p - 0.5 * h);
            m.k2 += w * (p - 0.5 * h) * (q - 0.5 * h);
        }
    }
    return m;
}

// Moments over the part of a cell with corner sum k h lying in u + v > x.
CellMoments region_moments(std::size_t k, double x, double h) {
    const double offset = static_cast<double>(k) * h;
    const double tau = x - offset;
    CellMoments m;
    if (tau >= 2.0 * h) {
        return m;
    }
    if (tau > h) {
        return corner_moments(offset, tau, h);
    }
    m += strip_moments(offset, std::max(tau, 0.0), h, h);
    m += corner_moments(offset, h, h);
    return m;
}

} // namespace

double oracle_T_point(const GridDistribution& d, double x) {
    const Grid& grid = d.grid();
    if (!(x >= 0.0 && x <= grid.x_max())) {
        throw ParameterError("oracle point must lie in [0, x_max]");
    }
    const double h = grid.spacing();
    const std::size_t cells = grid.size() - 1;

    std::vector<double> mid(cells);
    std::vector<double> slope(cells);
    for (std::size_t i = 0; i < cells; ++i) {
        mid[i] = 0.5 * (d[i] + d[i + 1]);
        slope[i] = (d[i + 1] - d[i]) / h;
    }

    const std::size_t max_k = 2 * (cells - 1);
    std::vector<CellMoments> moments(max_k + 1);
    std::size_t first_k = max_k + 1;
    for (std::size_t k = 0; k <= max_k; ++k) {
        moments[k] = region_moments(k, x, h);
        if (first_k > max_k && moments[k].k0 > 0.0) {
            first_k = k;
        }
    }

    double total = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
        const std::size_t j0 = first_k > i ? first_k - i : 0;
        double row = 0.0;
        for (std::size_t j = j0; j < cells; ++j) {
            const CellMoments& m = moments[i + j];
            row += mid[i] * mid[j] * m.k0 + (mid[j] * slope[i] + mid[i] * slope[j]) * m.k1 +
                   slope[i] * slope[j] * m.k2;
        }
        total += row;
    }
    return total;
}

double lipschitz_ratio(const GridDistribution& a, const GridDistribution& b, KernelOptions opts) {
    return lipschitz_ratio_lambda(a, b, Effectiveness::full(), opts);
}

double lipschitz_ratio_lambda(const GridDistribution& a, const GridDistribution& b,
                              Effectiveness eff, KernelOptions opts) {
    const double base = l1_distance(a, b);
    const double floor = 1e-12 * std::max({1.0, l1_norm(a), l1_norm(b)});
    if (!(base > floor)) {
        throw DegenerateInputError("Lipschitz ratio of (numerically) identical distributions");
    }
    const double image = l1_distance(apply_T_lambda(a, eff, opts), apply_T_lambda(b, eff, opts));
    return image / base;
}

} // namespace kinex
