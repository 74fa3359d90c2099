#pragma once

// The Hopf bound -exp(-A / delta^{1/alpha-1}) and empirical certification of
// candidate negative subharmonic functions against it on planar cusp slices.

#include <functional>
#include <vector>

#include "json.hpp"

#include "cusplab/common.hpp"
#include "cusplab/conformal.hpp"
#include "cusplab/geometry.hpp"

namespace cusplab {

// log(-bound) = -A / delta^q; finite for any positive delta.
inline double hopf_bound_log(const CuspParams& params, double delta) {
    params.validate();
    require(finite(delta) && delta > 0.0, "hopf_bound_log: delta must be positive");
    return -hopf_constant(params) / std::pow(delta, params.q());
}

// The bound itself. Underflows to -0 for very small delta; callers needing
// the deep regime use the log form.
inline double hopf_bound(const CuspParams& params, double delta) {
    return -std::exp(hopf_bound_log(params, delta));
}

struct HopfCertificate {
    CuspParams params;
    std::int64_t sample_count = 0;
    double best_constant = 0.0;          // min over samples of u / hopf_bound
    double best_constant_doubled = 0.0;  // same with twice the samples
    complexd witness{0.0, 0.0};
    bool stable = false;                 // doubling moved the constant <= 10%
    double min_ratio_near_tip = 0.0;     // min ratio over samples with |z| < 0.1 R
};

inline nlohmann::json certificate_json(const HopfCertificate& c) {
    return nlohmann::json{{"C", c.params.C},
                          {"alpha", c.params.alpha},
                          {"A", hopf_constant(c.params)},
                          {"best_constant", c.best_constant},
                          {"witness", {c.witness.real(), c.witness.imag()}},
                          {"samples", c.sample_count}};
}

namespace detail {

struct RatioScan {
    double best = std::numeric_limits<double>::infinity();
    complexd witness{0.0, 0.0};
    double best_near_tip = std::numeric_limits<double>::infinity();
};

// min over samples of u(z) / hopf_bound(delta(z)), evaluated in log space.
template <class U>
RatioScan ratio_scan(const CuspParams& params, double R, U&& u,
                     const std::vector<complexd>& points) {
    RatioScan rs;
    double A = hopf_constant(params);
    double q = params.q();
    for (complexd z : points) {
        double uv = u(z);
        require(finite(uv), "hopf_certify: candidate returned a non-finite value");
        require(uv < 0.0, "hopf_certify: candidate must be negative on samples");
        double delta = boundary_distance_planar(params, R, z);
        double log_ratio = std::log(-uv) + A / std::pow(delta, q);
        double ratio = std::exp(log_ratio);  // may overflow to +inf; harmless for min
        if (ratio < rs.best) {
            rs.best = ratio;
            rs.witness = z;
        }
        if (std::abs(z) < 0.1 * R) rs.best_near_tip = std::min(rs.best_near_tip, ratio);
    }
    return rs;
}

inline std::vector<complexd> certify_samples(const CuspParams& params, double R,
                                             std::int64_t n, std::uint64_t seed,
                                             double min_boundary_distance, double t_lo) {
    auto oracle = cusp_disk_oracle(params, R);
    std::vector<complexd> pts;
    // axis points, log spaced in [t_lo, 0.9 R/2]
    std::int64_t n_axis = std::max<std::int64_t>(8, n / 4);
    double t_hi = 0.45 * R;
    for (std::int64_t i = 0; i < n_axis; ++i) {
        double f = double(i) / double(std::max<std::int64_t>(1, n_axis - 1));
        pts.emplace_back(t_lo * std::pow(t_hi / t_lo, f), 0.0);
    }
    // quasi-random interior points; seed offsets the Halton stream
    std::uint64_t offset = splitmix64(seed) % 100000;
    std::uint64_t i = offset;
    while ((std::int64_t)pts.size() < n) {
        complexd uh = halton2d(i++);
        complexd z(oracle.box.x0 + uh.real() * oracle.box.width(),
                   oracle.box.y0 + uh.imag() * oracle.box.height());
        if (!oracle.contains(z)) continue;
        if (oracle.boundary_distance(z) < min_boundary_distance) continue;
        if (std::abs(z) >= 0.9 * t_hi * 2.0) continue;  // keep clear of the source region
        pts.push_back(z);
    }
    return pts;
}

}  // namespace detail

// Certify u <= -c * exp(-A/delta^q) empirically. The candidate is sampled on
// axis points and quasi-random interior points, delta comes from the brute
// boundary-distance oracle, and stability is checked under sample doubling.
// min_boundary_distance lets grid-backed candidates keep clear of their own
// resolution limit; t_lo is the shallowest axis point.
template <class U>
HopfCertificate hopf_certify(const CuspParams& params, double R, U&& u, std::int64_t samples,
                             std::uint64_t seed, double min_boundary_distance = 0.0,
                             double t_lo = 0.0) {
    params.validate();
    require(R > 0.0, "hopf_certify: R must be positive");
    require(samples >= 32, "hopf_certify: need at least 32 samples");
    if (t_lo <= 0.0) t_lo = 0.08 * R;

    auto base = detail::certify_samples(params, R, samples, seed, min_boundary_distance, t_lo);
    auto doubled =
        detail::certify_samples(params, R, 2 * samples, seed, min_boundary_distance, t_lo);

    auto rs = detail::ratio_scan(params, R, u, base);
    auto rs2 = detail::ratio_scan(params, R, u, doubled);

    HopfCertificate cert;
    cert.params = params;
    cert.sample_count = samples;
    cert.best_constant = rs.best;
    cert.best_constant_doubled = rs2.best;
    cert.witness = rs.witness;
    cert.min_ratio_near_tip = rs.best_near_tip;
    cert.stable = finite(rs.best) && finite(rs2.best) && rs.best > 0.0 &&
                  std::fabs(rs2.best / rs.best - 1.0) <= 0.10;
    return cert;
}

}  // namespace cusplab
