#pragma once

// Green-function numerics: the disk closed form, a five-point finite
// difference solver with a discrete point source, a deterministic
// walk-on-spheres estimator, and the axis profile of the truncated cusp
// together with its conformal image.

#include <cstdint>
#include <thread>
#include <vector>

#include "cusplab/common.hpp"
#include "cusplab/conformal.hpp"
#include "cusplab/geometry.hpp"

namespace cusplab {

enum class GreenMethod { disk_closed_form, finite_difference, walk_on_spheres };

struct GreenEstimate {
    double value = 0.0;  // negative convention
    double error = 0.0;  // stderr (MC) or Richardson estimate (FD)
    GreenMethod method = GreenMethod::disk_closed_form;
};

// Closed form on the disk of radius R centered at 0:
// g(z,a) = log( R |z-a| / |R^2 - conj(a) z| ).
inline GreenEstimate green_disk(double R, complexd z, complexd a) {
    require(R > 0.0, "green_disk: R must be positive");
    require(finite(z) && finite(a), "green_disk: non-finite input");
    require(std::abs(z) < R && std::abs(a) < R, "green_disk: points must be interior");
    require(z != a, "green_disk: z = a is the logarithmic pole");
    double val = std::log(R * std::abs(z - a) / std::abs(R * R - std::conj(a) * z));
    return {val, 0.0, GreenMethod::disk_closed_form};
}

// ---------------------------------------------------------------------------
// Finite differences. Five-point Laplacian on the membership-masked grid,
// Dirichlet 0 on outside nodes, discrete delta of strength 2 pi / h^2 at the
// node nearest the source (the lattice constant cancels against the harmonic
// boundary correction, so the solution converges to the Green function).
// Solved by plain conjugate gradient with fixed tolerance and sweep order.
// ---------------------------------------------------------------------------

struct FdField {
    double x0 = 0.0, y0 = 0.0, h = 0.0;
    int nx = 0, ny = 0;
    std::vector<std::int32_t> id;  // node -> unknown index or -1
    std::vector<double> u;         // unknown values

    double value_at_node(int i, int j) const {
        if (i < 0 || j < 0 || i >= nx || j >= ny) return 0.0;
        std::int32_t k = id[std::size_t(j) * nx + i];
        return k >= 0 ? u[k] : 0.0;
    }
    // bilinear interpolation; outside nodes contribute the boundary value 0
    double value_at(complexd z) const {
        double fx = (z.real() - x0) / h, fy = (z.imag() - y0) / h;
        int i = int(std::floor(fx)), j = int(std::floor(fy));
        double tx = fx - i, ty = fy - j;
        return (1 - tx) * (1 - ty) * value_at_node(i, j) + tx * (1 - ty) * value_at_node(i + 1, j) +
               (1 - tx) * ty * value_at_node(i, j + 1) + tx * ty * value_at_node(i + 1, j + 1);
    }
};

namespace detail {

inline FdField fd_green_solve(const PlanarDomainOracle& domain, complexd a, double h,
                              int max_iters = 200000, double tol = 1e-10) {
    FdField f;
    f.h = h;
    f.x0 = domain.box.x0 - h;
    f.y0 = domain.box.y0 - h;
    f.nx = int(std::ceil((domain.box.x1 - f.x0) / h)) + 2;
    f.ny = int(std::ceil((domain.box.y1 - f.y0) / h)) + 2;
    f.id.assign(std::size_t(f.nx) * f.ny, -1);

    std::int32_t count = 0;
    for (int j = 0; j < f.ny; ++j)
        for (int i = 0; i < f.nx; ++i) {
            complexd z(f.x0 + i * h, f.y0 + j * h);
            if (domain.contains(z)) f.id[std::size_t(j) * f.nx + i] = count++;
        }
    require(count > 0, "fd_green_solve: empty discrete domain");

    // source node: nearest grid node to a (must be an interior node)
    int si = int(std::lround((a.real() - f.x0) / h));
    int sj = int(std::lround((a.imag() - f.y0) / h));
    require(si >= 0 && sj >= 0 && si < f.nx && sj < f.ny &&
                f.id[std::size_t(sj) * f.nx + si] >= 0,
            "fd_green_solve: source node not interior");
    std::int32_t source = f.id[std::size_t(sj) * f.nx + si];

    // neighbour table in unknown numbering (-1 = Dirichlet zero)
    std::vector<std::array<std::int32_t, 4>> nbr(count);
    {
        std::int32_t k = 0;
        for (int j = 0; j < f.ny; ++j)
            for (int i = 0; i < f.nx; ++i) {
                if (f.id[std::size_t(j) * f.nx + i] < 0) continue;
                auto at = [&](int ii, int jj) -> std::int32_t {
                    if (ii < 0 || jj < 0 || ii >= f.nx || jj >= f.ny) return -1;
                    return f.id[std::size_t(jj) * f.nx + ii];
                };
                nbr[k] = {at(i - 1, j), at(i + 1, j), at(i, j - 1), at(i, j + 1)};
                ++k;
            }
    }

    // A u = b with A = -Laplacian (SPD); b has -2 pi / h^2 at the source so
    // that u is the negative Green function.
    std::vector<double> b(count, 0.0), x(count, 0.0), r(count), p(count), Ap(count);
    b[source] = -2.0 * kPi / (h * h);

    auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
        double inv_h2 = 1.0 / (h * h);
        for (std::int32_t k = 0; k < count; ++k) {
            double s = 4.0 * v[k];
            for (int d = 0; d < 4; ++d) {
                std::int32_t n = nbr[k][d];
                if (n >= 0) s -= v[n];
            }
            out[k] = s * inv_h2;
        }
    };

    r = b;
    p = r;
    double rr = 0.0, bb = 0.0;
    for (std::int32_t k = 0; k < count; ++k) {
        rr += r[k] * r[k];
        bb += b[k] * b[k];
    }
    double stop = tol * tol * bb;
    for (int it = 0; it < max_iters && rr > stop; ++it) {
        apply(p, Ap);
        double pAp = 0.0;
        for (std::int32_t k = 0; k < count; ++k) pAp += p[k] * Ap[k];
        double alpha = rr / pAp;
        for (std::int32_t k = 0; k < count; ++k) {
            x[k] += alpha * p[k];
            r[k] -= alpha * Ap[k];
        }
        double rr_new = 0.0;
        for (std::int32_t k = 0; k < count; ++k) rr_new += r[k] * r[k];
        double beta = rr_new / rr;
        rr = rr_new;
        for (std::int32_t k = 0; k < count; ++k) p[k] = r[k] + beta * p[k];
    }
    require(rr <= stop, "fd_green_solve: conjugate gradient did not converge");
    f.u = std::move(x);
    return f;
}

}  // namespace detail

// Richardson pair: solve at h and h/2; values come from the fine grid with an
// error bar of 1.5 de + floor where de is the coarse/fine disagreement.
struct FdGreenSolution {
    FdField coarse, fine;

    GreenEstimate value_at(complexd z) const {
        double vc = coarse.value_at(z), vf = fine.value_at(z);
        double err = 1.5 * std::fabs(vc - vf) + 1e-6;
        return {vf, err, GreenMethod::finite_difference};
    }
};

inline FdGreenSolution green_fd(const PlanarDomainOracle& domain, complexd a, double grid_h) {
    require(grid_h > 0.0, "green_fd: grid_h must be positive");
    require(domain.contains(a), "green_fd: source must be interior");
    require(domain.boundary_distance(a) >= 10.0 * grid_h,
            "green_fd: source too close to the boundary for this grid");
    FdGreenSolution s;
    s.coarse = detail::fd_green_solve(domain, a, grid_h);
    s.fine = detail::fd_green_solve(domain, a, grid_h / 2.0);
    return s;
}

// ---------------------------------------------------------------------------
// Walk on spheres. Per-trial randomness is a pure function of (seed, trial),
// and accumulation is chunked in fixed order, so the estimate is bit-identical
// for any thread count.
// ---------------------------------------------------------------------------

struct WosConfig {
    double epsilon_shell = 1e-5;
    int max_steps = 20000;
    std::int64_t trials = 100000;
    std::uint64_t seed = 42;
    int threads = 1;

    void validate(double domain_diameter) const {
        require(epsilon_shell > 0.0 && epsilon_shell < domain_diameter / 100.0,
                "WosConfig: epsilon_shell must be below diameter/100");
        require(trials >= 1000, "WosConfig: at least 1e3 trials");
        require(max_steps > 10, "WosConfig: max_steps too small");
        require(threads >= 1, "WosConfig: threads >= 1");
    }
};

inline GreenEstimate green_wos(const PlanarDomainOracle& domain, complexd z, complexd a,
                               const WosConfig& config) {
    double diameter = std::hypot(domain.box.width(), domain.box.height());
    config.validate(diameter);
    require(domain.contains(z) && domain.contains(a), "green_wos: points must be interior");
    require(z != a, "green_wos: z = a is the pole");

    const std::int64_t chunk = 4096;
    const std::int64_t nchunks = (config.trials + chunk - 1) / chunk;
    struct Acc {
        double sum = 0.0, sumsq = 0.0;
        std::int64_t maxed = 0;
    };
    std::vector<Acc> acc(std::size_t(nchunks));

    auto run_chunk = [&](std::int64_t ci) {
        Acc local;
        std::int64_t lo = ci * chunk, hi = std::min<std::int64_t>(config.trials, lo + chunk);
        for (std::int64_t t = lo; t < hi; ++t) {
            Rng rng = Rng::stream(config.seed, std::uint64_t(t));
            complexd x = z;
            int step = 0;
            for (; step < config.max_steps; ++step) {
                double d = domain.boundary_distance(x);
                if (d < config.epsilon_shell) break;
                x += d * rng.unit_circle();
            }
            if (step == config.max_steps) ++local.maxed;
            double v = std::log(std::abs(z - a)) - std::log(std::abs(x - a));
            local.sum += v;
            local.sumsq += v * v;
        }
        acc[std::size_t(ci)] = local;
    };

    if (config.threads == 1) {
        for (std::int64_t ci = 0; ci < nchunks; ++ci) run_chunk(ci);
    } else {
        std::vector<std::thread> pool;
        std::int64_t next = 0;
        int nt = config.threads;
        for (int w = 0; w < nt; ++w) {
            pool.emplace_back([&, w]() {
                for (std::int64_t ci = w; ci < nchunks; ci += nt) run_chunk(ci);
            });
        }
        (void)next;
        for (auto& th : pool) th.join();
    }

    double sum = 0.0, sumsq = 0.0;
    std::int64_t maxed = 0;
    for (const auto& c : acc) {  // fixed order: independent of thread count
        sum += c.sum;
        sumsq += c.sumsq;
        maxed += c.maxed;
    }
    if (double(maxed) > 0.01 * double(config.trials))
        throw std::runtime_error(
            "green_wos: >1% of trials exhausted max_steps; adjust epsilon_shell/max_steps");

    double n = double(config.trials);
    double mean = sum / n;
    double var = std::max(0.0, (sumsq - n * mean * mean) / (n - 1.0));
    return {mean, std::sqrt(var / n), GreenMethod::walk_on_spheres};
}

// ---------------------------------------------------------------------------
// Image-domain oracle D = F(cusp ∩ disk): membership through the inverse map,
// boundary distance through the Koebe quarter bound (valid lower bound under
// conformality), which is all walk-on-spheres needs.
// ---------------------------------------------------------------------------

inline PlanarDomainOracle image_domain_oracle(const CuspParams& params, double R) {
    params.validate();
    require(R > 0.0 && R <= injectivity_radius(params) * (1.0 + 1e-12),
            "image_domain_oracle: R exceeds the conformality radius");
    auto base = cusp_disk_oracle(params, R);
    CuspParams p = params;

    PlanarDomainOracle o;
    o.contains = [p, base](complexd w) {
        if (!(std::abs(w) < 1.0) || w == complexd(0.0, 0.0)) return false;
        complexd z = f_map_inverse(p, w);
        if (!finite(z)) return false;
        return base.contains(z);
    };
    o.boundary_distance = [p, R, base](complexd w) {
        if (!(std::abs(w) < 1.0) || w == complexd(0.0, 0.0)) return 0.0;
        complexd z = f_map_inverse(p, w);
        if (!finite(z) || !base.contains(z)) return 0.0;
        double d = base.boundary_distance(z);
        double log_deriv = log_abs_f_map_deriv(p, z);
        return 0.25 * std::exp(log_deriv) * d;
    };
    // the image sits inside the unit disk; the axis image of R bounds |w|
    double wmax = std::exp(log_f_map(params, complexd(R, 0.0)).real());
    o.box = {-wmax, -wmax, wmax, wmax};
    return o;
}

// ---------------------------------------------------------------------------
// Axis profile of Theorem-1.2 type: g(t, R/2) in the truncated cusp versus
// g_D(F(t), F(R/2)) in the image, against the explicit bound -exp(-A/t^q).
// ---------------------------------------------------------------------------

struct AxisProfileRow {
    double t = 0.0;
    GreenEstimate g_direct;
    GreenEstimate g_via_image;
    double bound_value = 0.0;  // -exp(-A/t^q), 0 on underflow
    double log_neg_bound = 0.0;
    double ratio = 0.0;         // g_direct.value / bound_value
    double image_x = 0.0;       // F(t), real
    double mapped_ratio = 0.0;  // g_via_image / (-F(t))
};

struct AxisProfileOptions {
    double fd_grid_h = 2e-3;
    int fd_min_cells_across = 8;
    WosConfig wos;  // used for image-domain rows (and cusp rows FD cannot resolve)
};

struct AxisProfile {
    std::vector<AxisProfileRow> rows;
    double fitted_decay = 0.0;  // slope of log(-g_direct) against -1/t^q
    double hopf_a = 0.0;
    double mapped_ratio_min = 0.0;
    double mapped_ratio_max = 0.0;
};

inline AxisProfile axis_green_profile(const CuspParams& params, double R,
                                      const std::vector<double>& t_grid,
                                      const AxisProfileOptions& opt) {
    params.validate();
    require(R > 0.0 && R <= injectivity_radius(params) * (1.0 + 1e-12),
            "axis_green_profile: R exceeds the conformality radius");
    double a_pos = R / 2.0;
    for (double t : t_grid)
        require(t > 0.0 && t < a_pos, "axis_green_profile: t must lie in (0, R/2)");

    double q = params.q();
    double A = hopf_constant(params);
    auto cusp = cusp_disk_oracle(params, R);
    auto image = image_domain_oracle(params, R);
    complexd a(a_pos, 0.0);
    complexd fa = f_map(params, a);

    FdGreenSolution fd = green_fd(cusp, a, opt.fd_grid_h);

    AxisProfile out;
    out.hopf_a = A;
    std::vector<double> fit_x, fit_y;
    for (double t : t_grid) {
        AxisProfileRow row;
        row.t = t;
        complexd zt(t, 0.0);

        double half_width = std::pow(t / params.C, 1.0 / params.alpha);
        bool fd_ok = 2.0 * half_width >= opt.fd_min_cells_across * opt.fd_grid_h;
        if (fd_ok) {
            row.g_direct = fd.value_at(zt);
        } else {
            WosConfig wc = opt.wos;
            wc.epsilon_shell = std::min(wc.epsilon_shell, half_width * 1e-2);
            row.g_direct = green_wos(cusp, zt, a, wc);
        }

        complexd wt = f_map(params, zt);
        row.image_x = wt.real();
        {
            WosConfig wc = opt.wos;
            wc.epsilon_shell = std::min(wc.epsilon_shell, std::abs(wt) * 1e-2);
            row.g_via_image = green_wos(image, wt, fa, wc);
        }

        row.log_neg_bound = -A / std::pow(t, q);
        row.bound_value = -std::exp(row.log_neg_bound);
        row.ratio = (row.bound_value != 0.0) ? row.g_direct.value / row.bound_value : 0.0;
        row.mapped_ratio = row.g_via_image.value / (-row.image_x);
        out.rows.push_back(row);

        if (row.g_direct.value < 0.0 &&
            row.g_direct.error < 0.3 * std::fabs(row.g_direct.value)) {
            fit_x.push_back(-std::pow(t, -q));
            fit_y.push_back(std::log(-row.g_direct.value));
        }
    }
    if (fit_x.size() >= 3) out.fitted_decay = fit_linear(fit_x, fit_y).slope;

    out.mapped_ratio_min = std::numeric_limits<double>::infinity();
    out.mapped_ratio_max = -std::numeric_limits<double>::infinity();
    for (const auto& r : out.rows) {
        out.mapped_ratio_min = std::min(out.mapped_ratio_min, r.mapped_ratio);
        out.mapped_ratio_max = std::max(out.mapped_ratio_max, r.mapped_ratio);
    }
    return out;
}

// Lemma-grade comparison bound: rho(z) <= inf_{|w-a|=R1}(-rho)/log(R2/R1) * g(z,a)
// for negative subharmonic rho when Delta_{R1}(a) ⊂⊂ Omega ⊂⊂ Delta_{R2}(a).
inline double comparison_lemma_bound(const std::vector<double>& rho_on_circle, double R1,
                                     double R2, const GreenEstimate& g_at) {
    require(!rho_on_circle.empty(), "comparison_lemma_bound: empty samples");
    require(R2 > R1 && R1 > 0.0, "comparison_lemma_bound: need 0 < R1 < R2");
    double inf_neg = std::numeric_limits<double>::infinity();
    for (double r : rho_on_circle) {
        require(r < 0.0, "comparison_lemma_bound: rho must be negative on the circle");
        inf_neg = std::min(inf_neg, -r);
    }
    return inf_neg / std::log(R2 / R1) * g_at.value;
}

}  // namespace cusplab
