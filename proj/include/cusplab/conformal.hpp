#pragma once

// The explicit conformal map F(z) = exp(-A / z^{1/alpha - 1}) on the planar
// cusp, its boundary parametrization in polar form, the injectivity radius,
// and the asymptotic profile of the image boundary near 0.

#include <algorithm>
#include <vector>

#include "cusplab/common.hpp"
#include "cusplab/geometry.hpp"

namespace cusplab {

// A = pi C^{1/alpha} / (2 (1/alpha - 1)); the constant of the Hopf bound and
// of the map F.
inline double hopf_constant(const CuspParams& params) {
    params.validate();
    return kPi * std::pow(params.C, 1.0 / params.alpha) / (2.0 * params.q());
}

// G(z) = -A / z^q with the principal branch of the power. F = exp(G). The cusp
// lies in the right half plane, so the branch cut on the negative real axis is
// never touched.
inline complexd log_f_map(const CuspParams& params, complexd z) {
    params.validate();
    require(finite(z), "log_f_map: non-finite input");
    require(z != complexd(0.0, 0.0), "log_f_map: z = 0 is the essential singularity");
    double A = hopf_constant(params);
    return -A * std::pow(z, -params.q());
}

inline complexd f_map(const CuspParams& params, complexd z) {
    return std::exp(log_f_map(params, z));
}

// Inverse on the image domain: z = (A / (-Log w))^{1/q}, principal branch.
// Valid because Im G lies in (-pi/2, pi/2) on the cusp, so Log recovers G.
inline complexd f_map_inverse(const CuspParams& params, complexd w) {
    params.validate();
    require(finite(w) && w != complexd(0.0, 0.0), "f_map_inverse: bad input");
    double A = hopf_constant(params);
    complexd g = std::log(w);
    return std::pow(-A / g, 1.0 / params.q());
}

// |F'(z)| = |F(z)| * A q / |z|^{q+1}; log form avoids underflow of |F|.
inline double log_abs_f_map_deriv(const CuspParams& params, complexd z) {
    double A = hopf_constant(params);
    double q = params.q();
    return log_f_map(params, z).real() + std::log(A * q) - (q + 1.0) * std::log(std::abs(z));
}

// ---------------------------------------------------------------------------
// Boundary parametrization gamma_c(s) = s + i c s^{1/alpha} in polar form,
// together with the image polar data under F.
// ---------------------------------------------------------------------------

struct BoundaryPolar {
    double s = 0.0;
    double c = 0.0;
    double r = 0.0;
    double theta = 0.0;
    double r_tilde = 0.0;      // exp(log_r_tilde); 0 when the exponent underflows
    double theta_tilde = 0.0;
    double log_r_tilde = 0.0;  // always meaningful
};

namespace detail {

// Stable pi/2 - theta_tilde for the extreme curve c = +C^{-1/alpha}. Writing
// w = c s^q, the defect equals A * [q w (1+w^2)^{q/2} - sin(q atan w)] / r^q;
// the bracket cancels to O(w^3) and is evaluated by series for small w.
inline double theta_tilde_defect_bracket(double q, double w) {
    if (w < 1e-2) {
        double c3 = q / 2.0 + 1.0 / 3.0 + q * q / 6.0;
        double c5 = q * (q - 2.0) / 8.0 - 1.0 / 5.0 - q * q / 6.0 -
                    q * q * q * q / 120.0;
        return q * w * w * w * (c3 + w * w * c5);
    }
    return q * w * std::pow(1.0 + w * w, q / 2.0) - std::sin(q * std::atan(w));
}

}  // namespace detail

inline BoundaryPolar boundary_polar(const CuspParams& params, double c, double s) {
    params.validate();
    require(finite(s) && s > 0.0, "boundary_polar: s must be positive");
    double c_max = std::pow(params.C, -1.0 / params.alpha);
    require(finite(c) && std::fabs(c) <= c_max * (1.0 + 1e-12),
            "boundary_polar: |c| exceeds C^{-1/alpha}");

    double q = params.q();
    double A = hopf_constant(params);
    BoundaryPolar bp;
    bp.s = s;
    bp.c = c;
    double w = c * std::pow(s, q);  // c s^{1/alpha - 1}
    bp.theta = std::atan(w);
    bp.r = s * std::sqrt(1.0 + w * w);
    // r^q in log form: q log r
    double log_rq = q * std::log(bp.r);
    double rq = std::exp(log_rq);
    bp.log_r_tilde = -A * std::cos(q * bp.theta) / rq;
    bp.r_tilde = std::exp(bp.log_r_tilde);
    bp.theta_tilde = A * std::sin(q * bp.theta) / rq;
    return bp;
}

// pi/2 - theta_tilde on the extreme curve c = C^{-1/alpha}, evaluated without
// cancellation. Positive and ~ A_1 s^{2q} as s -> 0.
inline double theta_tilde_defect(const CuspParams& params, double s) {
    params.validate();
    require(s > 0.0, "theta_tilde_defect: s must be positive");
    double q = params.q();
    double A = hopf_constant(params);
    double c = std::pow(params.C, -1.0 / params.alpha);
    double w = c * std::pow(s, q);
    double bracket = detail::theta_tilde_defect_bracket(q, w);
    double rq = std::pow(s, q) * std::pow(1.0 + w * w, q / 2.0);
    return A * bracket / rq;
}

// Lemma-grade conformality radius: the proof of injectivity needs
// C^{1/alpha} R^q < pi / q; we return the threshold shrunk by 0.9.
inline double injectivity_radius(const CuspParams& params) {
    params.validate();
    double q = params.q();
    double threshold = std::pow(kPi / (q * std::pow(params.C, 1.0 / params.alpha)), 1.0 / q);
    return 0.9 * threshold;
}

// ---------------------------------------------------------------------------
// Image boundary profile near 0 and the asymptotic fits: the boundary graph
// h(|y|) ~ A2 |y| (log 1/|y|)^{-2} and the angular defect ~ A1 s^{2q}, with
// the cross-check A2 = A1 A^2.
// ---------------------------------------------------------------------------

struct AsymptoticFit {
    double exponent_expected = 0.0;
    double coefficient = 0.0;
    double residual = 0.0;  // max relative deviation over the fit window
    double window_lo = 0.0;
    double window_hi = 0.0;

    void validate() const {
        require(residual >= 0.0 && window_lo < window_hi, "AsymptoticFit: bad window");
    }
};

struct ImageProfileSample {
    double s = 0.0;
    double log_r_tilde = 0.0;
    double theta_tilde = 0.0;
    double log_y_tilde = 0.0;  // log of the image boundary height
    double log_x_tilde = 0.0;  // log of h(y_tilde)
    double y_tilde = 0.0;      // exp of the above (0 on underflow)
    double x_tilde = 0.0;
};

struct ImageProfile {
    std::vector<ImageProfileSample> samples;
    AsymptoticFit a2_fit;      // h(|y|) against |y| (log 1/|y|)^{-2}
    AsymptoticFit a1_fit;      // pi/2 - theta_tilde against s^{2q}
    double a_constant = 0.0;   // A = A(C, alpha)
    double consistency = 0.0;  // A2_fit / (A1_fit * A^2)
};

inline ImageProfile image_profile(const CuspParams& params, const std::vector<double>& s_grid) {
    params.validate();
    require(s_grid.size() >= 2, "image_profile: need at least two grid points");
    double R = injectivity_radius(params);
    for (std::size_t i = 0; i < s_grid.size(); ++i) {
        require(s_grid[i] > 0.0 && s_grid[i] < R, "image_profile: grid outside (0, R)");
        if (i) require(s_grid[i] < s_grid[i - 1], "image_profile: grid must descend");
    }

    double q = params.q();
    double A = hopf_constant(params);
    double c = std::pow(params.C, -1.0 / params.alpha);

    ImageProfile out;
    out.a_constant = A;
    std::vector<double> log_eps, log_s2q, log_h, log_m;
    for (double s : s_grid) {
        BoundaryPolar bp = boundary_polar(params, c, s);
        double eps = theta_tilde_defect(params, s);
        ImageProfileSample row;
        row.s = s;
        row.log_r_tilde = bp.log_r_tilde;
        row.theta_tilde = kPi / 2.0 - eps;
        // y = r sin(theta~) = r cos(eps); x = r cos(theta~) = r sin(eps)
        row.log_y_tilde = bp.log_r_tilde + std::log(std::cos(eps));
        row.log_x_tilde = bp.log_r_tilde + std::log(std::sin(eps));
        row.y_tilde = std::exp(row.log_y_tilde);
        row.x_tilde = std::exp(row.log_x_tilde);
        out.samples.push_back(row);

        log_eps.push_back(std::log(eps));
        log_s2q.push_back(2.0 * q * std::log(s));
        // h = y tan(eps); model m = y (log 1/y)^{-2}
        double log_one_over_y = -row.log_y_tilde;
        log_h.push_back(row.log_y_tilde + std::log(std::tan(eps)));
        log_m.push_back(row.log_y_tilde - 2.0 * std::log(log_one_over_y));
    }

    auto a2 = fit_coefficient_log(log_h, log_m);
    out.a2_fit = {1.0, a2.coefficient, a2.max_rel_residual, s_grid.back(), s_grid.front()};
    auto a1 = fit_coefficient_log(log_eps, log_s2q);
    out.a1_fit = {2.0 * q, a1.coefficient, a1.max_rel_residual, s_grid.back(), s_grid.front()};
    out.consistency = out.a2_fit.coefficient / (out.a1_fit.coefficient * A * A);
    return out;
}

inline std::vector<double> log_spaced_descending(double lo, double hi, int n) {
    require(0.0 < lo && lo < hi && n >= 2, "log_spaced_descending: bad range");
    std::vector<double> g(n);
    double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n; ++i) g[i] = std::exp(lhi + (llo - lhi) * double(i) / double(n - 1));
    return g;
}

// ---------------------------------------------------------------------------
// Injectivity collision scan. F underflows near the vertex, so candidate
// collisions are detected in the log-image plane: F(z1) = F(z2) iff
// G(z1) - G(z2) in 2 pi i Z, and |Im G| < pi/2 rules out nonzero wraps.
// Points are quasi-random (Halton) in the truncated cusp; a sorted sweep
// compares each point against its neighbours in Re G order.
// ---------------------------------------------------------------------------

struct CollisionScan {
    std::size_t points = 0;
    std::size_t pairs = 0;
    std::size_t violations = 0;
    double max_abs_im_g = 0.0;
};

inline CollisionScan injectivity_collision_scan(const CuspParams& params, double R,
                                                std::size_t n_points, int window = 8) {
    params.validate();
    require(R > 0.0 && R <= injectivity_radius(params) * (1.0 + 1e-12),
            "injectivity_collision_scan: R exceeds the conformality radius");
    auto oracle = cusp_disk_oracle(params, R);

    struct Entry {
        complexd g;
        complexd z;
    };
    std::vector<Entry> entries;
    entries.reserve(n_points);
    std::uint64_t i = 0;
    while (entries.size() < n_points) {
        complexd u = halton2d(i++);
        complexd z(oracle.box.x0 + u.real() * oracle.box.width(),
                   oracle.box.y0 + u.imag() * oracle.box.height());
        if (!oracle.contains(z)) continue;
        entries.push_back({log_f_map(params, z), z});
    }
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.g.real() < b.g.real(); });

    CollisionScan out;
    out.points = entries.size();
    for (const auto& e : entries)
        out.max_abs_im_g = std::max(out.max_abs_im_g, std::fabs(e.g.imag()));
    for (std::size_t a = 0; a < entries.size(); ++a) {
        for (int k = 1; k <= window && a + k < entries.size(); ++k) {
            std::size_t b = a + k;
            ++out.pairs;
            double scale = 1.0 + std::max(std::abs(entries[a].g), std::abs(entries[b].g));
            if (std::abs(entries[a].g - entries[b].g) <= 1e-12 * scale &&
                std::abs(entries[a].z - entries[b].z) > 1e-9)
                ++out.violations;
        }
    }
    return out;
}

}  // namespace cusplab
