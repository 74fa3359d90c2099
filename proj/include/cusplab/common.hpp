#pragma once

// Shared numerics: deterministic RNG streams, low-discrepancy sequences,
// 1-D minimization, quadrature and least-squares helpers.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace cusplab {

using complexd = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

inline bool finite(double x) { return std::isfinite(x); }
inline bool finite(complexd z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// ---------------------------------------------------------------------------
// Deterministic RNG. Results must not depend on std library internals or on
// execution order, so everything is built on SplitMix64. A trial stream is a
// pure function of (seed, index).
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {
        // warm up so that small seeds decorrelate
        splitmix64(state_);
        splitmix64(state_);
    }
    // stream keyed by (seed, index); independent of call order
    static Rng stream(std::uint64_t seed, std::uint64_t index) {
        return Rng(seed ^ (0x9e3779b97f4a7c15ULL * (index + 0x632be59bd9b4e019ULL)));
    }
    std::uint64_t next_u64() { return splitmix64(state_); }
    // uniform in [0,1)
    double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }
    // uniform in (0,1] (never 0, safe for logs)
    double next_double_pos() { return ((next_u64() >> 11) + 1) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * next_double(); }
    double normal() {
        // Box-Muller; consumes two uniforms
        double u1 = next_double_pos(), u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }
    complexd unit_circle() {
        double t = 2.0 * kPi * next_double();
        return {std::cos(t), std::sin(t)};
    }

  private:
    std::uint64_t state_;
};

// Halton sequence (bases 2 and 3) for quasi-random planar sampling.
inline double halton(std::uint64_t i, std::uint32_t base) {
    double f = 1.0, r = 0.0;
    for (std::uint64_t n = i + 1; n > 0; n /= base) {
        f /= base;
        r += f * double(n % base);
    }
    return r;
}

inline complexd halton2d(std::uint64_t i) { return {halton(i, 2), halton(i, 3)}; }

// ---------------------------------------------------------------------------
// Golden-section minimization of a unimodal function on [a, b].
// ---------------------------------------------------------------------------

struct MinResult {
    double x = 0.0;
    double value = std::numeric_limits<double>::infinity();
};

template <class F>
MinResult golden_section_min(F&& f, double a, double b, double tol) {
    static const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    // hard cap keeps degenerate tolerances from spinning
    for (int it = 0; it < 300 && (b - a) > tol; ++it) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    MinResult r;
    if (fc < fd) { r.x = c; r.value = fc; } else { r.x = d; r.value = fd; }
    return r;
}

// ---------------------------------------------------------------------------
// Composite Gauss-Legendre quadrature with panel doubling. Nodes are interior,
// so integrable endpoint behaviour is tolerated. Returns NaN when the panel
// refinement fails to settle (divergent integrand).
// ---------------------------------------------------------------------------

namespace detail {
// 16-point Gauss-Legendre nodes/weights on [-1, 1]
inline const std::array<double, 8> kGlNodes = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
inline const std::array<double, 8> kGlWeights = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

template <class F>
double gl16(F&& f, double a, double b) {
    double mid = 0.5 * (a + b), half = 0.5 * (b - a), sum = 0.0;
    for (int i = 0; i < 8; ++i) {
        double dx = half * kGlNodes[i];
        sum += kGlWeights[i] * (f(mid - dx) + f(mid + dx));
    }
    return sum * half;
}
}  // namespace detail

template <class F>
double integrate_gl(F&& f, double a, double b, double rel_tol = 1e-12, int max_doublings = 18) {
    if (a == b) return 0.0;
    int panels = 1;
    double prev = detail::gl16(f, a, b);
    for (int k = 0; k < max_doublings; ++k) {
        panels *= 2;
        double h = (b - a) / panels, sum = 0.0;
        for (int p = 0; p < panels; ++p) sum += detail::gl16(f, a + p * h, a + (p + 1) * h);
        double scale = std::max({std::fabs(sum), std::fabs(prev), 1e-300});
        if (std::fabs(sum - prev) <= rel_tol * scale) return sum;
        prev = sum;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

// ---------------------------------------------------------------------------
// Least squares y ~ intercept + slope*x, plus a one-parameter log-space fit.
// ---------------------------------------------------------------------------

struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double max_rel_residual = 0.0;  // max |y - fit| / |fit| over samples
};

inline LinearFit fit_linear(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 2, "fit_linear: need >= 2 samples");
    double n = double(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
    }
    double det = n * sxx - sx * sx;
    require(std::fabs(det) > 0, "fit_linear: degenerate abscissae");
    LinearFit f;
    f.slope = (n * sxy - sx * sy) / det;
    f.intercept = (sy - f.slope * sx) / n;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double pred = f.intercept + f.slope * x[i];
        double denom = std::max(std::fabs(pred), 1e-300);
        f.max_rel_residual = std::max(f.max_rel_residual, std::fabs(y[i] - pred) / denom);
    }
    return f;
}

// Fit y = coeff * m(x) from log-space data: log_y[i] - log_m[i] should be a
// constant; coeff = exp(mean), residual = max |y/(coeff*m) - 1|.
struct CoefficientFit {
    double coefficient = 0.0;
    double max_rel_residual = 0.0;
};

inline CoefficientFit fit_coefficient_log(const std::vector<double>& log_y,
                                          const std::vector<double>& log_m) {
    require(log_y.size() == log_m.size() && !log_y.empty(), "fit_coefficient_log: empty");
    double mean = 0.0;
    for (std::size_t i = 0; i < log_y.size(); ++i) mean += log_y[i] - log_m[i];
    mean /= double(log_y.size());
    CoefficientFit f;
    f.coefficient = std::exp(mean);
    for (std::size_t i = 0; i < log_y.size(); ++i)
        f.max_rel_residual = std::max(f.max_rel_residual,
                                      std::fabs(std::expm1(log_y[i] - log_m[i] - mean)));
    return f;
}

// Mean and standard error of a sample, accumulated in index order.
struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
};

inline MeanStderr mean_stderr(const std::vector<double>& v) {
    MeanStderr r;
    r.n = v.size();
    if (v.empty()) return r;
    double s = 0.0;
    for (double x : v) s += x;
    r.mean = s / double(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - r.mean) * (x - r.mean);
    if (v.size() > 1) r.stderr_ = std::sqrt(ss / (double(v.size() - 1) * double(v.size())));
    return r;
}

}  // namespace cusplab
