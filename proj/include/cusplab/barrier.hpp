#pragma once

// The comparison-function machinery near the image cusp: the model profile
// h_B(u) = B u (log 1/u)^{-2}, its growth conditions, the subharmonic
// function phi built from it, and the Green-bound constant M.

#include <functional>
#include <string>
#include <vector>

#include "cusplab/common.hpp"

namespace cusplab {

// General radial profile handle. value(u) = h(u); shape_log(w) = h(e^-w) e^w,
// i.e. h(u)/u as a function of w = log(1/u). The log form keeps the integral
// path usable far below double underflow of u itself.
struct RadialProfile {
    std::function<double(double)> value;
    std::function<double(double)> shape_log;
};

struct HBProfile {
    double B = 1.0;
    double u0 = 0.1;

    void validate() const {
        require(finite(B) && B > 0.0, "HBProfile: B must be positive");
        require(finite(u0) && u0 > 0.0 && u0 < 1.0, "HBProfile: u0 must lie in (0,1)");
    }

    double value(double u) const {
        if (u == 0.0) return 0.0;  // continuous extension
        double L = -std::log(u);
        return B * u / (L * L);
    }

    RadialProfile profile() const {
        validate();
        double b = B;
        return {[b](double u) {
                    if (u == 0.0) return 0.0;
                    double L = -std::log(u);
                    return b * u / (L * L);
                },
                [b](double w) { return b / (w * w); }};
    }
};

// h_B(u) with the range checks of the operation contract.
inline double hb_eval(const HBProfile& p, double u) {
    p.validate();
    require(finite(u) && u >= 0.0, "hb_eval: u must be nonnegative");
    require(u < p.u0, "hb_eval: u must be below u0");
    return p.value(u);
}

// Closed form of int_0^x h_B(u)/u^2 du = B / log(1/x).
inline double hb_integral_to(const HBProfile& p, double x) {
    p.validate();
    require(finite(x) && x > 0.0 && x < p.u0, "hb_integral_to: x outside (0, u0)");
    return p.B / std::log(1.0 / x);
}

// Quadrature path for arbitrary profiles. Substituting v = 1/log(1/u) turns
// int_0^x h(u)/u^2 du into int_0^{1/W} shape_log(1/v) / v^2 dv with
// W = log(1/x); for h_B the transformed integrand is exactly constant.
// Returns NaN when the panel refinement does not settle (divergent profile).
inline double integral_to_quadrature(const RadialProfile& profile, double x) {
    require(finite(x) && x > 0.0 && x < 1.0, "integral_to_quadrature: x outside (0,1)");
    double W = std::log(1.0 / x);
    auto integrand = [&](double v) { return profile.shape_log(1.0 / v) / (v * v); };
    return integrate_gl(integrand, 0.0, 1.0 / W, 1e-13);
}

struct BarrierReport {
    bool c1_extension = false;     // C^1 at 0 with h'(0) = 0
    bool integral_finite = false;  // int_0^eps h/u^2 < infinity
    bool monotone = false;         // h' >= 0
    bool convexity_type = false;   // h'' + h'/u nonincreasing on the grid
    double M = 0.0;                // Green-bound constant when the scaffold ran
    std::string region;

    bool all_conditions() const {
        return c1_extension && integral_finite && monotone && convexity_type;
    }
};

// Verify the four growth conditions on a logarithmic grid in (0, u0).
// Derivatives come from central differences with a local step; comparisons
// carry a slack of 1e-9 times the magnitude scale of the compared quantity
// over the grid (the second-derivative combination blows up like 1/u near 0,
// which sets that scale).
inline BarrierReport check_ln_conditions(const RadialProfile& profile, double u0, int grid_n) {
    require(grid_n >= 100, "check_ln_conditions: grid_n >= 100 required");
    require(u0 > 0.0 && u0 < 1.0, "check_ln_conditions: u0 in (0,1) required");

    const int decades = 12;
    std::vector<double> u(grid_n), h(grid_n), quot(grid_n), g(grid_n);
    bool all_finite = true;
    for (int k = 0; k < grid_n; ++k) {
        // descending from just below u0 down to u0 * 10^-12
        u[k] = u0 * std::pow(10.0, -double(decades) * double(k + 1) / double(grid_n));
        h[k] = profile.value(u[k]);
        quot[k] = h[k] / u[k];
        double d = u[k] * 1e-5;
        double hp = (profile.value(u[k] + d) - profile.value(u[k] - d)) / (2.0 * d);
        double hpp = (profile.value(u[k] + d) - 2.0 * h[k] + profile.value(u[k] - d)) / (d * d);
        g[k] = hpp + hp / u[k];
        if (!finite(h[k]) || !finite(g[k])) all_finite = false;
    }

    BarrierReport rep;

    // (1) difference quotients h(u)/u must die out toward 0
    double qmax = 0.0;
    for (double x : quot) qmax = std::max(qmax, std::fabs(x));
    bool tail_decreasing = true;
    for (int k = grid_n / 2; k + 1 < grid_n; ++k)  // u[k+1] < u[k]
        if (std::fabs(quot[k + 1]) > std::fabs(quot[k]) * (1.0 + 1e-9)) tail_decreasing = false;
    rep.c1_extension =
        all_finite && tail_decreasing && (std::fabs(quot.back()) <= 0.2 * qmax);

    // (2) integral finite
    double I = integral_to_quadrature(profile, 0.9 * u0);
    rep.integral_finite = finite(I);

    // (3) h' >= 0 via adjacent secants (grid is descending in u)
    rep.monotone = true;
    for (int k = 0; k + 1 < grid_n; ++k) {
        double secant = (h[k] - h[k + 1]) / (u[k] - u[k + 1]);
        if (secant < -1e-12 * std::max(1.0, std::fabs(quot[k]))) rep.monotone = false;
    }

    // (4) g = h'' + h'/u nonincreasing in u
    double gscale = 1.0;
    for (double x : g) if (finite(x)) gscale = std::max(gscale, std::fabs(x));
    rep.convexity_type = all_finite;
    for (int k = 0; k + 1 < grid_n; ++k)
        if (g[k] > g[k + 1] + 1e-9 * gscale) rep.convexity_type = false;  // u[k] > u[k+1]

    return rep;
}

inline BarrierReport check_ln_conditions(const HBProfile& p, int grid_n) {
    p.validate();
    return check_ln_conditions(p.profile(), p.u0, grid_n);
}

// phi(z) = x + 2 h_B(x) + 2 x int_0^x h_B(u)/u^2 du - 2 h_B(|z|); subharmonic
// on D_B and positive on the positive real axis, <= 0 on the boundary graph.
inline double phi_eval(const HBProfile& p, complexd z) {
    p.validate();
    require(finite(z), "phi_eval: non-finite input");
    double x = z.real();
    double r = std::abs(z);
    require(x >= 0.0 && x < p.u0, "phi_eval: Re z outside [0, u0)");
    require(r < p.u0, "phi_eval: |z| outside [0, u0)");
    if (z == complexd(0.0, 0.0)) return 0.0;
    double integral_term = (x == 0.0) ? 0.0 : 2.0 * x * (p.B / std::log(1.0 / x));
    return x + 2.0 * p.value(x) + integral_term - 2.0 * p.value(r);
}

// Five-point Laplacian scan of phi over the interior grid points of
// D_B intersected with the disk of the given radius. Returns the most
// negative discrete Laplacian (subharmonicity predicts >= -O(h^2)).
struct SubharmonicityScan {
    double most_negative = 0.0;
    std::size_t interior_points = 0;
};

inline SubharmonicityScan phi_subharmonicity_scan(const HBProfile& p, double region_radius,
                                                  double grid_h) {
    p.validate();
    require(region_radius > 0.0 && region_radius < p.u0,
            "phi_subharmonicity_scan: region must sit inside (0, u0)");
    require(grid_h > 0.0 && grid_h < region_radius / 8.0,
            "phi_subharmonicity_scan: degenerate grid");

    auto inside = [&](complexd z) {
        return std::abs(z) < region_radius && z.real() > p.value(std::fabs(z.imag())) &&
               z.real() >= 0.0;
    };

    int nx = int(region_radius / grid_h) + 2;
    int ny = 2 * nx + 1;
    // cache phi on the grid; index (i, j) -> x = i h, y = (j - nx) h
    std::vector<double> vals(std::size_t(nx + 1) * ny,
                             std::numeric_limits<double>::quiet_NaN());
    std::vector<char> in(std::size_t(nx + 1) * ny, 0);
    auto idx = [&](int i, int j) { return std::size_t(i) * ny + j; };
    for (int i = 0; i <= nx; ++i)
        for (int j = 0; j < ny; ++j) {
            complexd z(i * grid_h, (j - nx) * grid_h);
            if (inside(z)) {
                in[idx(i, j)] = 1;
                vals[idx(i, j)] = phi_eval(p, z);
            }
        }

    SubharmonicityScan out;
    out.most_negative = std::numeric_limits<double>::infinity();
    for (int i = 1; i < nx; ++i)
        for (int j = 1; j + 1 < ny; ++j) {
            if (!in[idx(i, j)] || !in[idx(i - 1, j)] || !in[idx(i + 1, j)] ||
                !in[idx(i, j - 1)] || !in[idx(i, j + 1)])
                continue;
            double lap = (vals[idx(i - 1, j)] + vals[idx(i + 1, j)] + vals[idx(i, j - 1)] +
                          vals[idx(i, j + 1)] - 4.0 * vals[idx(i, j)]) /
                         (grid_h * grid_h);
            out.most_negative = std::min(out.most_negative, lap);
            ++out.interior_points;
        }
    require(out.interior_points >= 1000, "phi_subharmonicity_scan: too few interior points");
    return out;
}

// Generic scan used for the harmonic calibration case in tests.
template <class F>
SubharmonicityScan discrete_laplacian_scan(F&& f, std::function<bool(complexd)> inside,
                                           double extent, double grid_h) {
    int n = int(extent / grid_h) + 2;
    SubharmonicityScan out;
    out.most_negative = std::numeric_limits<double>::infinity();
    for (int i = -n; i <= n; ++i)
        for (int j = -n; j <= n; ++j) {
            complexd z(i * grid_h, j * grid_h);
            complexd e(grid_h, 0.0), nvec(0.0, grid_h);
            if (!inside(z) || !inside(z + e) || !inside(z - e) || !inside(z + nvec) ||
                !inside(z - nvec))
                continue;
            double lap =
                (f(z + e) + f(z - e) + f(z + nvec) + f(z - nvec) - 4.0 * f(z)) /
                (grid_h * grid_h);
            out.most_negative = std::min(out.most_negative, lap);
            ++out.interior_points;
        }
    return out;
}

// max of phi over samples of the boundary graph E2 = {x = h_B(|y|), |z| < r}.
inline double phi_max_on_e2(const HBProfile& p, double region_radius, int n_samples) {
    p.validate();
    require(n_samples >= 10, "phi_max_on_e2: too few samples");
    require(region_radius > 0.0 && region_radius < p.u0, "phi_max_on_e2: bad radius");
    double best = -std::numeric_limits<double>::infinity();
    for (int k = 1; k <= n_samples; ++k) {
        double y = region_radius * double(k) / double(n_samples + 1);
        double x = p.value(y);
        complexd z(x, y);
        if (std::abs(z) >= region_radius) continue;
        best = std::max(best, phi_eval(p, z));
    }
    return best;
}

// M = sup_{E1} phi / inf_{E1} (-g). All -g samples must be positive (E1 is a
// compact subset of the image domain).
inline double barrier_bound_constant(const std::vector<double>& phi_on_e1,
                                     const std::vector<double>& green_on_e1) {
    require(!phi_on_e1.empty() && phi_on_e1.size() == green_on_e1.size(),
            "barrier_bound_constant: mismatched or empty samples");
    double sup_phi = -std::numeric_limits<double>::infinity();
    double inf_neg_g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < phi_on_e1.size(); ++i) {
        sup_phi = std::max(sup_phi, phi_on_e1[i]);
        double neg_g = -green_on_e1[i];
        require(neg_g > 0.0, "barrier_bound_constant: -g must be positive on E1");
        inf_neg_g = std::min(inf_neg_g, neg_g);
    }
    return sup_phi / inf_neg_g;
}

}  // namespace cusplab
