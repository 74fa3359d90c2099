#pragma once

// Cusp-domain geometry: membership, boundary distance, the two-sided axis
// distance bound, and cusp parameter extraction from Hölder data.

#include <algorithm>
#include <functional>
#include <vector>

#include "json.hpp"

#include "cusplab/common.hpp"

namespace cusplab {

struct CuspParams {
    double C = 1.0;
    double alpha = 0.5;

    void validate() const {
        require(finite(C) && C > 0.0, "CuspParams: C must be positive");
        require(finite(alpha) && alpha > 0.0 && alpha < 1.0,
                "CuspParams: alpha must lie in (0,1)");
    }
    // 1/alpha - 1, the exponent that controls every estimate downstream
    double q() const { return 1.0 / alpha - 1.0; }
};

inline void to_json(nlohmann::json& j, const CuspParams& p) {
    j = nlohmann::json{{"C", p.C}, {"alpha", p.alpha}};
}
inline void from_json(const nlohmann::json& j, CuspParams& p) {
    j.at("C").get_to(p.C);
    j.at("alpha").get_to(p.alpha);
    p.validate();
}

// A finite cusp in R^m (m = 2n): vertex, unit axis, aperture params, and the
// truncation radius of the ball around the vertex.
struct CuspFrame {
    std::vector<double> vertex;
    std::vector<double> axis;
    CuspParams params;
    double radius = 1.0;

    void validate() const {
        params.validate();
        require(!vertex.empty() && vertex.size() == axis.size(),
                "CuspFrame: vertex/axis dimension mismatch");
        require(finite(radius) && radius > 0.0, "CuspFrame: radius must be positive");
        double n2 = 0.0;
        for (double a : axis) {
            require(finite(a), "CuspFrame: non-finite axis");
            n2 += a * a;
        }
        require(std::fabs(std::sqrt(n2) - 1.0) <= 1e-12, "CuspFrame: axis must be unit");
        for (double v : vertex) require(finite(v), "CuspFrame: non-finite vertex");
    }
};

inline void to_json(nlohmann::json& j, const CuspFrame& f) {
    j = nlohmann::json{{"C", f.params.C},
                       {"alpha", f.params.alpha},
                       {"vertex", f.vertex},
                       {"axis", f.axis},
                       {"radius", f.radius}};
}
inline void from_json(const nlohmann::json& j, CuspFrame& f) {
    j.at("C").get_to(f.params.C);
    j.at("alpha").get_to(f.params.alpha);
    j.at("vertex").get_to(f.vertex);
    j.at("axis").get_to(f.axis);
    j.at("radius").get_to(f.radius);
    f.validate();
}

// Membership test for the finite cusp: <z-p, v> > C |pi_v(z-p)|^alpha and
// |z-p| < radius. The pairing is the Euclidean one on R^{2n} (the real part
// of the Hermitian pairing), so pi_v removes only the real axis direction.
inline bool cusp_contains(const CuspFrame& frame, const std::vector<double>& z) {
    frame.validate();
    require(z.size() == frame.vertex.size(), "cusp_contains: dimension mismatch");
    for (double x : z) require(finite(x), "cusp_contains: non-finite coordinate");

    double dot = 0.0, norm2 = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        double w = z[i] - frame.vertex[i];
        dot += w * frame.axis[i];
        norm2 += w * w;
    }
    if (!(norm2 < frame.radius * frame.radius)) return false;
    double proj2 = std::max(0.0, norm2 - dot * dot);
    return dot > frame.params.C * std::pow(proj2, frame.params.alpha / 2.0);
}

// Planar convenience overload: the cusp {x > C|y|^alpha} with vertex 0.
inline bool cusp_contains(const CuspParams& params, double radius, complexd z) {
    CuspFrame f{{0.0, 0.0}, {1.0, 0.0}, params, radius};
    return cusp_contains(f, {z.real(), z.imag()});
}

// Lemma-grade two-sided bound for the boundary distance of the axis point
// p + t v:  B t^{1/alpha} <= delta <= C^{-1/alpha} t^{1/alpha} with
// B = min{1/2, (2C)^{-1/alpha}}.
struct AxisDistanceBounds {
    double lower = 0.0;
    double upper = 0.0;
};

inline AxisDistanceBounds axis_distance_bounds(const CuspParams& params, double t) {
    params.validate();
    require(finite(t) && t > 0.0, "axis_distance_bounds: t must be positive");
    require(t <= 1.0, "axis_distance_bounds: bound stated for t <= 1");
    double inv_alpha = 1.0 / params.alpha;
    double b = std::min(0.5, std::pow(2.0 * params.C, -inv_alpha));
    double ta = std::pow(t, inv_alpha);
    return {b * ta, std::pow(params.C, -inv_alpha) * ta};
}

// Hölder boundary pieces -> single cusp parameter pair (C = max, alpha = min).
inline CuspParams holder_to_cusp(const std::vector<std::pair<double, double>>& pieces) {
    require(!pieces.empty(), "holder_to_cusp: empty piece list");
    CuspParams out{0.0, 1.0};
    for (const auto& [c, a] : pieces) {
        CuspParams piece{c, a};
        piece.validate();
        out.C = std::max(out.C, c);
        out.alpha = std::min(out.alpha, a);
    }
    // alpha stays strictly below 1 because each piece was validated
    return out;
}

// ---------------------------------------------------------------------------
// Planar domain oracle: membership + distance to the boundary + bounding box.
// Factories below cover the handful of domains the experiments need.
// ---------------------------------------------------------------------------

struct BoundingBox {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
};

struct PlanarDomainOracle {
    std::function<bool(complexd)> contains;
    std::function<double(complexd)> boundary_distance;  // >= 0; 0 outside
    BoundingBox box;
};

inline PlanarDomainOracle disk_oracle(double R, complexd center = {0.0, 0.0}) {
    require(R > 0.0, "disk_oracle: R must be positive");
    PlanarDomainOracle o;
    o.contains = [=](complexd z) { return std::abs(z - center) < R; };
    o.boundary_distance = [=](complexd z) { return std::max(0.0, R - std::abs(z - center)); };
    o.box = {center.real() - R, center.imag() - R, center.real() + R, center.imag() + R};
    return o;
}

inline PlanarDomainOracle annulus_oracle(double r_inner, double r_outer) {
    require(0.0 < r_inner && r_inner < r_outer, "annulus_oracle: need 0 < r1 < r2");
    PlanarDomainOracle o;
    o.contains = [=](complexd z) {
        double r = std::abs(z);
        return r > r_inner && r < r_outer;
    };
    o.boundary_distance = [=](complexd z) {
        double r = std::abs(z);
        return std::max(0.0, std::min(r - r_inner, r_outer - r));
    };
    o.box = {-r_outer, -r_outer, r_outer, r_outer};
    return o;
}

namespace detail {

// Distance from an interior point of {x > C y^alpha, y > 0}-type regions to
// the upper wall curve s -> (C s^alpha, s). The hypograph of the concave
// graph is convex, so the squared distance is unimodal in s; a safeguarded
// Newton iteration on its derivative converges in a few steps.
inline double wall_distance_upper(const CuspParams& p, double x, double y) {
    const double C = p.C, alpha = p.alpha;
    auto dist2_deriv = [&](double s, double& g, double& gp) {
        // g = d/ds [ (x - C s^a)^2 + (y - s)^2 ] / 2
        double sa1 = std::pow(s, alpha - 1.0);  // s^{alpha-1}
        double sa = sa1 * s;
        double dx = x - C * sa;
        g = -C * alpha * sa1 * dx + (s - y);
        // derivative of g (for Newton); the exact value only affects step size
        gp = -C * alpha * (alpha - 1.0) * sa1 / s * dx + C * C * alpha * alpha * sa1 * sa1 + 1.0;
    };
    // bracket the root of g: g < 0 near 0 (x > 0), g > 0 for large s
    double lo = 1e-30;
    double hi = std::max({std::fabs(y) * 2.0 + x, std::pow(x / C, 1.0 / alpha) * 2.0, 1e-12});
    double g, gp;
    dist2_deriv(hi, g, gp);
    int grow = 0;
    while (g < 0.0 && grow++ < 64) {
        hi *= 2.0;
        dist2_deriv(hi, g, gp);
    }
    double s = std::sqrt(lo * hi);
    for (int it = 0; it < 60; ++it) {
        dist2_deriv(s, g, gp);
        if (g < 0.0) lo = s; else hi = s;
        double step = (gp > 0.0) ? s - g / gp : 0.0;
        if (!(step > lo && step < hi)) step = 0.5 * (lo + hi);
        if (std::fabs(step - s) <= 1e-14 * s) { s = step; break; }
        s = step;
    }
    double dxv = x - C * std::pow(s, alpha), dyv = y - s;
    return std::sqrt(dxv * dxv + dyv * dyv);
}

}  // namespace detail

// Fast distance from an interior point of the truncated planar cusp to its
// boundary: exact wall projections (full curves) and the circular arc. For
// points of the domain this is a tight lower bound of the true distance
// (exact away from the wall/arc corners), which is what walk-on-spheres needs.
inline double cusp_boundary_distance_fast(const CuspParams& params, double R, complexd z) {
    double up = detail::wall_distance_upper(params, z.real(), z.imag());
    double dn = detail::wall_distance_upper(params, z.real(), -z.imag());
    double arc = R - std::abs(z);
    return std::max(0.0, std::min({up, dn, arc}));
}

inline PlanarDomainOracle cusp_disk_oracle(const CuspParams& params, double R) {
    params.validate();
    require(R > 0.0, "cusp_disk_oracle: R must be positive");
    PlanarDomainOracle o;
    CuspParams p = params;
    o.contains = [p, R](complexd z) {
        return std::abs(z) < R &&
               z.real() > p.C * std::pow(std::fabs(z.imag()), p.alpha);
    };
    o.boundary_distance = [p, R](complexd z) { return cusp_boundary_distance_fast(p, R, z); };
    // y-extent where the wall meets the arc: solve (C y^a)^2 + y^2 = R^2
    double ylo = 0.0, yhi = R;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (ylo + yhi);
        double xv = p.C * std::pow(mid, p.alpha);
        ((xv * xv + mid * mid < R * R) ? ylo : yhi) = mid;
    }
    o.box = {0.0, -yhi, R, yhi};
    return o;
}

// ---------------------------------------------------------------------------
// Brute-force boundary distance for the truncated planar cusp: dense sampling
// of both boundary pieces (walls and arc) plus golden-section refinement.
// This is the measurement-grade oracle used by tests and certificates.
// ---------------------------------------------------------------------------

inline double boundary_distance_planar(const CuspParams& params, double R, complexd z,
                                       int samples_per_curve = 4096) {
    params.validate();
    require(finite(R) && R > 0.0, "boundary_distance_planar: R must be positive");
    require(finite(z), "boundary_distance_planar: non-finite point");
    if (!(std::abs(z) < R && z.real() > params.C * std::pow(std::fabs(z.imag()), params.alpha)))
        throw std::domain_error("boundary_distance_planar: point outside the domain");

    // wall/arc junction
    double ylo = 0.0, yhi = R;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (ylo + yhi);
        double xv = params.C * std::pow(mid, params.alpha);
        ((xv * xv + mid * mid < R * R) ? ylo : yhi) = mid;
    }
    double s_max = ylo;
    double theta_max = std::atan2(s_max, params.C * std::pow(s_max, params.alpha));

    struct Curve {
        std::function<complexd(double)> point;
        double t0, t1;
    };
    std::vector<Curve> curves;
    // upper and lower wall, parameter cubically clustered toward the vertex
    curves.push_back({[&](double t) {
                          double s = s_max * t * t * t;
                          return complexd(params.C * std::pow(s, params.alpha), s);
                      },
                      0.0, 1.0});
    curves.push_back({[&](double t) {
                          double s = s_max * t * t * t;
                          return complexd(params.C * std::pow(s, params.alpha), -s);
                      },
                      0.0, 1.0});
    // truncation arc
    curves.push_back({[&](double t) { return R * std::exp(complexd(0.0, t)); },
                      -theta_max, theta_max});

    double best = std::numeric_limits<double>::infinity();
    for (const auto& curve : curves) {
        auto dist = [&](double t) { return std::abs(curve.point(t) - z); };
        int n = samples_per_curve;
        std::vector<double> vals(n + 1);
        double h = (curve.t1 - curve.t0) / n;
        int best_i = 0;
        for (int i = 0; i <= n; ++i) {
            vals[i] = dist(curve.t0 + i * h);
            if (vals[i] < vals[best_i]) best_i = i;
        }
        // refine the three best local brackets
        std::vector<int> order;
        for (int i = 0; i <= n; ++i) order.push_back(i);
        std::partial_sort(order.begin(), order.begin() + std::min<std::size_t>(3, order.size()),
                          order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
        for (int k = 0; k < 3 && k < (int)order.size(); ++k) {
            int i = order[k];
            double a = curve.t0 + std::max(0, i - 1) * h;
            double b = curve.t0 + std::min(n, i + 1) * h;
            auto m = golden_section_min(dist, a, b, (b - a) * 1e-13);
            best = std::min(best, m.value);
        }
        best = std::min(best, vals[best_i]);
    }
    return best;
}

}  // namespace cusplab
