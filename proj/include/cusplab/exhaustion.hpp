#pragma once

// The exhaustion machinery: envelope functions psi/phi, the alpha recursion,
// the a-ladder with its halving identities, the convex counter tau, the index
// function lambda, and the patch-and-decay simulation on a planar grid model.
//
// The recursion composes exponentials, so alpha_nu leaves plain double range
// after a couple of steps for steep parameters. All sequence arithmetic is
// therefore carried in log form: alpha_nu is represented by
// ell_nu = -log(-alpha_nu) and a_nu by log|a_nu|. Plain values are exposed
// alongside and simply underflow when out of range.

#include <algorithm>
#include <functional>
#include <vector>

#include "cusplab/common.hpp"

namespace cusplab {

struct ExhaustionParams {
    double ln_c1 = 0.0;  // log C1
    double beta = 1.0;
    double ln_c2 = 0.0;  // log C2
    double A = kPi / 2.0;
    double alpha = 0.5;
    double alpha1 = -0.01;
    // working range for the psi <= phi scan (both endpoints negative)
    double scan_lo = -0.1;
    double scan_hi = -1e-6;

    static ExhaustionParams plain(double C1, double beta_, double C2, double A_, double alpha_,
                                  double alpha1_) {
        ExhaustionParams p;
        require(C1 > 0.0 && C2 > 0.0, "ExhaustionParams: C1, C2 must be positive");
        p.ln_c1 = std::log(C1);
        p.beta = beta_;
        p.ln_c2 = std::log(C2);
        p.A = A_;
        p.alpha = alpha_;
        p.alpha1 = alpha1_;
        return p;
    }

    double q() const { return 1.0 / alpha - 1.0; }

    // log|psi(t)| and log|phi(t)| at t = -exp(-ell), ell = log(1/|t|) > 0
    double log_neg_psi(double ell) const {
        require(ell > 0.0, "envelope: need |t| < 1");
        return ln_c1 - beta * std::log(ell);
    }
    double log_neg_phi(double ell) const {
        require(ell > 0.0, "envelope: need |t| < 1");
        double e = q() * ell;
        if (e > 690.0) return -std::numeric_limits<double>::infinity();  // phi underflows
        return ln_c2 - A * std::exp(e);
    }

    void validate() const {
        require(finite(beta) && beta > 0.0, "ExhaustionParams: beta must be positive");
        require(finite(A) && A > 0.0, "ExhaustionParams: A must be positive");
        require(finite(alpha) && alpha > 0.0 && alpha < 1.0,
                "ExhaustionParams: alpha must lie in (0,1)");
        require(finite(ln_c1) && finite(ln_c2), "ExhaustionParams: bad C1/C2");
        require(scan_lo < scan_hi && scan_hi < 0.0 && scan_lo > -1.0,
                "ExhaustionParams: bad working range");
        require(alpha1 < 0.0 && alpha1 >= scan_lo && alpha1 <= scan_hi,
                "ExhaustionParams: alpha1 must lie in the working range");
        // psi <= phi scanned over the working range (equivalently
        // log|psi| >= log|phi| pointwise)
        double ell_lo = std::log(1.0 / (-scan_hi));
        double ell_hi = std::log(1.0 / (-scan_lo));
        for (int k = 0; k <= 1000; ++k) {
            double ell = ell_hi + (ell_lo - ell_hi) * double(k) / 1000.0;
            if (log_neg_psi(ell) < log_neg_phi(ell))
                throw std::invalid_argument(
                    "ExhaustionParams: psi > phi at t = -" + std::to_string(std::exp(-ell)));
        }
    }
};

// Plain-value envelope evaluation (underflows for extreme configurations).
struct EnvelopePair {
    double psi = 0.0;
    double phi = 0.0;
};

inline EnvelopePair envelope_eval(const ExhaustionParams& p, double t) {
    require(finite(t) && t < 0.0 && t > -1.0, "envelope_eval: t must lie in (-1, 0)");
    double ell = std::log(1.0 / (-t));
    require(ell > 0.0, "envelope_eval: -log(-t) must be positive");
    return {-std::exp(p.log_neg_psi(ell)), -std::exp(p.log_neg_phi(ell))};
}

inline double psi_inverse(const ExhaustionParams& p, double y) {
    require(finite(y) && y < 0.0, "psi_inverse: y must be negative");
    double log_ell = (p.ln_c1 - std::log(-y)) / p.beta;
    require(log_ell < 690.0, "psi_inverse: result leaves double range");
    return -std::exp(-std::exp(log_ell));
}

// ---------------------------------------------------------------------------
// The sequence table: alpha_nu (log form), a_nu (log form), tau breakpoints.
// ---------------------------------------------------------------------------

struct SequenceTable {
    ExhaustionParams params;
    std::vector<double> ell;        // -log(-alpha_nu), strictly increasing
    std::vector<double> alphas;     // plain values (may underflow to -0)
    std::vector<double> log_neg_a;  // log|a_nu|, strictly decreasing
    std::vector<double> a;          // plain values
    std::vector<double> tau_at_a;   // tau(a_nu)

    std::size_t size() const { return ell.size(); }
};

// alpha_{nu+1} = psi^{-1}(phi(alpha_nu)/2), run in log form; a_nu = phi(alpha)
// on odd indices and psi(alpha) on even ones. Throws with the offending index
// when the recursion leaves the representable range.
inline SequenceTable build_sequence_table(const ExhaustionParams& params, int N) {
    params.validate();
    require(N >= 2, "build_sequence_table: N >= 2");
    SequenceTable t;
    t.params = params;
    double q = params.q();

    double ell = std::log(1.0 / (-params.alpha1));
    t.ell.push_back(ell);
    t.log_neg_a.push_back(params.log_neg_phi(ell));  // nu = 1 is odd
    require(finite(t.log_neg_a[0]),
            "build_sequence_table: phi(alpha_1) underflows; alpha_1 too close to 0");

    for (int nu = 2; nu <= N; ++nu) {
        double prev = t.ell.back();
        if (q * prev > 690.0)
            throw std::runtime_error("build_sequence_table: recursion left range at index " +
                                     std::to_string(nu));
        double u = params.A * std::exp(q * prev);
        double log_ell_next = (params.ln_c1 - (params.ln_c2 - u) + std::log(2.0)) / params.beta;
        if (log_ell_next > 690.0)
            throw std::runtime_error("build_sequence_table: recursion left range at index " +
                                     std::to_string(nu));
        double en = std::exp(log_ell_next);
        if (!(en > prev))
            throw std::runtime_error("build_sequence_table: alpha not increasing at index " +
                                     std::to_string(nu));
        double la = (nu % 2 == 1) ? params.log_neg_phi(en) : params.ln_c1 - params.beta * log_ell_next;
        if (!finite(la) || !(la < t.log_neg_a.back()))
            throw std::runtime_error("build_sequence_table: a-ladder left range at index " +
                                     std::to_string(nu));
        t.ell.push_back(en);
        t.log_neg_a.push_back(la);
    }

    t.alphas.resize(t.size());
    t.a.resize(t.size());
    t.tau_at_a.resize(t.size());
    double tau = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        t.alphas[k] = -std::exp(-t.ell[k]);
        t.a[k] = -std::exp(t.log_neg_a[k]);
        if (k > 0) tau += 1.0 - std::exp(t.log_neg_a[k] - t.log_neg_a[k - 1]);
        t.tau_at_a[k] = tau;
    }
    return t;
}

// Spec-level convenience: the alpha list alone.
inline std::vector<double> alpha_sequence(const ExhaustionParams& params, int N) {
    return build_sequence_table(params, N).alphas;
}

struct SequenceChecks {
    double max_halving_rel_err = 0.0;  // |a_{2v}/a_{2v-1} - 1/2| relative
    bool odd_ge_half = true;           // a_{2v+1} >= a_{2v}/2
    bool increasing = true;
    int first_bad_index = -1;
};

inline SequenceChecks sequence_checks(const SequenceTable& t) {
    SequenceChecks c;
    for (std::size_t k = 1; k < t.size(); ++k) {
        double ratio = std::exp(t.log_neg_a[k] - t.log_neg_a[k - 1]);  // a_{k+1}/a_k
        if (!(ratio < 1.0)) {
            c.increasing = false;
            if (c.first_bad_index < 0) c.first_bad_index = int(k + 1);
        }
        if ((k + 1) % 2 == 0) {  // even 1-based index: exact halving
            double err = std::fabs(ratio - 0.5) / 0.5;
            c.max_halving_rel_err = std::max(c.max_halving_rel_err, err);
        } else {  // odd: ratio <= 1/2 (i.e. a_{2v+1} >= a_{2v}/2)
            if (ratio > 0.5 + 1e-15) {
                c.odd_ge_half = false;
                if (c.first_bad_index < 0) c.first_bad_index = int(k + 1);
            }
        }
    }
    return c;
}

// Synthetic ladder with prescribed ratios; satisfies every SequenceTable
// invariant and lets model tests span value ranges no parameter set reaches.
inline SequenceTable make_geometric_table(double a1, double odd_ratio, int length) {
    require(a1 < 0.0 && odd_ratio > 0.0 && odd_ratio <= 0.5 && length >= 4,
            "make_geometric_table: bad arguments");
    SequenceTable t;
    t.params = ExhaustionParams{};  // placeholder parameters; envelopes unused
    double la = std::log(-a1);
    double ell = 1.0;
    double tau = 0.0;
    for (int k = 1; k <= length; ++k) {
        t.ell.push_back(ell);
        t.log_neg_a.push_back(la);
        t.alphas.push_back(-std::exp(-ell));
        t.a.push_back(-std::exp(la));
        if (k > 1) tau += 1.0 - std::exp(t.log_neg_a[k - 1] - t.log_neg_a[k - 2]);
        t.tau_at_a.push_back(tau);
        ell += 1.0;
        la += ((k % 2 == 1) ? std::log(0.5) : std::log(odd_ratio));
    }
    return t;
}

// ---------------------------------------------------------------------------
// tau: piecewise linear, 0 left of a_1, slope -1/a_nu on [a_nu, a_{nu+1}].
// ---------------------------------------------------------------------------

// log form: the argument is log|x| for x < 0.
inline double tau_eval_log(const SequenceTable& t, double log_neg_x) {
    require(finite(log_neg_x), "tau_eval_log: bad argument");
    if (log_neg_x >= t.log_neg_a.front()) return 0.0;  // x <= a_1
    if (log_neg_x < t.log_neg_a.back())
        throw std::runtime_error("tau_eval: x beyond the table; extend the sequence");
    // largest nu with a_nu <= x, i.e. log|a_nu| >= log|x|
    auto it = std::lower_bound(t.log_neg_a.begin(), t.log_neg_a.end(), log_neg_x,
                               [](double la, double v) { return la > v; });
    std::size_t nu = std::size_t(it - t.log_neg_a.begin());
    if (nu == t.size() || t.log_neg_a[nu] < log_neg_x) --nu;
    return t.tau_at_a[nu] + 1.0 - std::exp(log_neg_x - t.log_neg_a[nu]);
}

inline double tau_eval(const SequenceTable& t, double x) {
    require(finite(x) && x < 0.0, "tau_eval: x must be negative");
    return tau_eval_log(t, std::log(-x));
}

// lambda(t) = max{nu : alpha_nu <= -t}; computed from ell so the deep part of
// the table stays reachable.
inline int lambda_of(const SequenceTable& t, double tt) {
    require(finite(tt) && tt > 0.0, "lambda_of: t must be positive");
    double target = std::log(1.0 / tt);
    require(t.ell.front() <= target * (1.0 + 1e-15) + 1e-15,
            "lambda_of: t exceeds -alpha_1; lambda undefined");
    auto it = std::upper_bound(t.ell.begin(), t.ell.end(), target * (1.0 + 1e-15));
    return int(it - t.ell.begin());
}

// Relative extremal function of the disk of radius R2 with respect to the
// closed disk of radius R1 (planar case, closed form).
inline double relative_extremal_annulus(double R1, double R2, complexd z) {
    require(0.0 < R1 && R1 < R2, "relative_extremal_annulus: need 0 < R1 < R2");
    require(finite(z) && std::abs(z) < R2, "relative_extremal_annulus: |z| must be below R2");
    double r = std::abs(z);
    if (r <= R1) return -1.0;
    return std::max(-1.0, std::log(r / R2) / std::log(R2 / R1));
}

// ---------------------------------------------------------------------------
// Patch-and-decay simulation on a planar grid model.
//
// The model prescribes a rectangular grid, a synthetic depth field
// ell(x, y) = log(1/delta), and overlapping bump patches with mix weights.
// Each patch carries rho_j = theta_j psi(-delta) + (1-theta_j) phi(-delta),
// which sits in the envelope sandwich by construction. The simulation builds
// u_eps = max_j [tau(rho_j - eps) + 3 chi_j - 3 + N(|z|^2 - M)] against the
// floor tau(a) + N(|z|^2 - M), measures the sandwich constants, selects l,
// forms the shell contraction kappa_nu, and iterates the decay.
// ---------------------------------------------------------------------------

struct PatchSpec {
    std::function<double(double, double)> chi;  // in [0, 1]
    double theta = 1.0;                         // mix weight toward psi
};

struct PatchModel {
    int nx = 193, ny = 193;
    double x0 = 0.0, x1 = 0.4, y0 = -1.5, y1 = 1.5;
    std::function<double(double, double)> ell_of;  // log(1/delta) field
    std::vector<PatchSpec> patches;
    double u0_strip_frac = 0.10;  // shallow strip used for the a-selection
};

// Default model: depth linear in x across the usable part of the table's
// ell-range; two y-patches with cosine fades overlapping across the middle.
inline PatchModel make_default_patch_model(const SequenceTable& table) {
    require(table.size() >= 12, "make_default_patch_model: table too short");
    PatchModel m;
    double ell_lo = table.ell[3];                  // leave the first windows as headroom
    double ell_hi = table.ell[table.size() - 2];   // and one entry at the deep end
    m.ell_of = [=, x0 = m.x0, x1 = m.x1](double x, double) {
        return ell_lo + (ell_hi - ell_lo) * (x - x0) / (x1 - x0);
    };
    auto smooth = [](double t) {  // cosine smoothstep on [0,1]
        if (t <= 0.0) return 0.0;
        if (t >= 1.0) return 1.0;
        return 0.5 * (1.0 - std::cos(kPi * t));
    };
    double yb = m.y1;
    // chi_1 = 1 on y <= 0, fading out toward +yb; chi_2 mirrored
    m.patches.push_back({[=](double, double y) { return 1.0 - smooth(y / (0.93 * yb)); }, 0.85});
    m.patches.push_back({[=](double, double y) { return 1.0 - smooth(-y / (0.93 * yb)); }, 0.35});
    return m;
}

struct PatchDecayReport {
    double c0 = 0.0;       // tau(a_nu) >= nu/2 - c0
    double c1 = 0.0, c2 = 0.0;
    int l = 0;
    double c3 = 0.0;
    double epsilon0 = 0.0;
    double N = 0.0, M = 0.0;
    int a_index = 0;           // 1-based index of the chosen a
    std::vector<int> tabulated_nu;
    std::vector<double> kappa;
    std::vector<double> M_series;  // M_nu for nu = 1..max shell
    double overlap_max = 0.0;
    double min_single_branch_laplacian = 0.0;
    double final_bound_K = 0.0;
    bool sup_w_below_one = true;
    bool kappa_ok = true;          // kappa_nu >= c3 for all tabulated nu
    bool m_contraction_ok = true;  // M_{nu+l} <= (1-c3) M_nu
    bool overlap_ok = true;        // overlap_max < 3
};

inline PatchDecayReport patch_decay_sim(const SequenceTable& table, const PatchModel& model,
                                        int l_request = 0) {
    require(!model.patches.empty(), "patch_decay_sim: no patches");
    require(model.nx >= 32 && model.ny >= 32, "patch_decay_sim: grid too coarse");
    const int nx = model.nx, ny = model.ny;
    const double hx = (model.x1 - model.x0) / (nx - 1);
    const double hy = (model.y1 - model.y0) / (ny - 1);
    const std::size_t nn = std::size_t(nx) * ny;
    const auto& par = table.params;
    const int len = int(table.size());

    // per-node fields
    std::vector<double> ell(nn), lpsi(nn), lphi(nn), z2(nn);
    std::vector<std::vector<double>> chi(model.patches.size(), std::vector<double>(nn));
    std::vector<std::vector<double>> lrho(model.patches.size(), std::vector<double>(nn));
    auto at = [&](int i, int j) { return std::size_t(j) * nx + i; };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            double x = model.x0 + i * hx, y = model.y0 + j * hy;
            std::size_t k = at(i, j);
            ell[k] = model.ell_of(x, y);
            require(ell[k] >= table.ell.front() - 1e-9 && ell[k] <= table.ell.back() + 1e-9,
                    "patch_decay_sim: depth field leaves the table's alpha range");
            lpsi[k] = par.log_neg_psi(ell[k]);
            lphi[k] = par.log_neg_phi(ell[k]);
            if (lpsi[k] < lphi[k])
                throw std::runtime_error("patch_decay_sim: envelope sandwich violated on grid");
            z2[k] = x * x + y * y;
            for (std::size_t p = 0; p < model.patches.size(); ++p) {
                double theta = model.patches[p].theta;
                require(theta >= 0.0 && theta <= 1.0, "patch_decay_sim: theta outside [0,1]");
                chi[p][k] = model.patches[p].chi(x, y);
                require(chi[p][k] >= -1e-12 && chi[p][k] <= 1.0 + 1e-12,
                        "patch_decay_sim: chi outside [0,1]");
                // log|rho| = logsumexp(log theta + log|psi|, log(1-theta) + log|phi|)
                double ta = (theta > 0.0) ? std::log(theta) + lpsi[k]
                                          : -std::numeric_limits<double>::infinity();
                double tb = (theta < 1.0) ? std::log(1.0 - theta) + lphi[k]
                                          : -std::numeric_limits<double>::infinity();
                double m = std::max(ta, tb);
                lrho[p][k] = m + std::log(std::exp(ta - m) + std::exp(tb - m));
            }
        }

    // N from the bump Laplacians, then the floor constraint
    double min_lap_chi = 0.0;
    for (std::size_t p = 0; p < model.patches.size(); ++p)
        for (int j = 1; j + 1 < ny; ++j)
            for (int i = 1; i + 1 < nx; ++i) {
                double lap = 3.0 * ((chi[p][at(i - 1, j)] - 2 * chi[p][at(i, j)] +
                                     chi[p][at(i + 1, j)]) / (hx * hx) +
                                    (chi[p][at(i, j - 1)] - 2 * chi[p][at(i, j)] +
                                     chi[p][at(i, j + 1)]) / (hy * hy));
                min_lap_chi = std::min(min_lap_chi, lap);
            }
    double N_chi = 1.1 * std::max(0.0, -min_lap_chi) / 4.0;

    PatchDecayReport rep;

    // a-selection: smallest tabulated a above the shallow-strip rho values
    double strip_edge = table.ell.front() +
                        (1.0 + 1e-9) * (ell[at(0, 0)] - table.ell.front()) +
                        model.u0_strip_frac * (ell[at(nx - 1, 0)] - ell[at(0, 0)]);
    double strip_min_lrho = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < nn; ++k)
        if (ell[k] <= strip_edge)
            for (std::size_t p = 0; p < model.patches.size(); ++p)
                strip_min_lrho = std::min(strip_min_lrho, lrho[p][k]);
    int a_idx = -1;
    for (int k = 0; k < len; ++k)
        if (table.log_neg_a[k] < strip_min_lrho - std::log(1.05)) { a_idx = k; break; }
    require(a_idx >= 0, "patch_decay_sim: no tabulated a above the interior rho values");
    double tau_a = table.tau_at_a[a_idx];
    rep.a_index = a_idx + 1;

    double M = 0.0;
    for (std::size_t k = 0; k < nn; ++k) M = std::max(M, z2[k]);
    M += 1.0;
    double N = std::max(N_chi, 1.05 * tau_a);  // keeps the floor negative
    rep.N = N;
    rep.M = M;

    double log_eps_probe = table.log_neg_a[len - 1];

    // u_eps builder; also records sandwich defects and overlap for this eps
    std::vector<double> u(nn), tpsi(nn);
    auto build_u = [&](double log_eps, double& c1_out, double& c2_out, double& overlap_out) {
        double c1v = 0.0, c2v = 0.0, ov = 0.0;
        std::vector<double> trho(model.patches.size());
        for (std::size_t k = 0; k < nn; ++k) {
            // tau(psi(-delta) - eps)
            double m0 = std::max(lpsi[k], log_eps);
            double lsum = m0 + std::log(std::exp(lpsi[k] - m0) + std::exp(log_eps - m0));
            tpsi[k] = tau_eval_log(table, lsum);
            double floor_branch = tau_a + N * (z2[k] - M);
            double best = floor_branch;
            for (std::size_t p = 0; p < model.patches.size(); ++p) {
                double mp = std::max(lrho[p][k], log_eps);
                double ls = mp + std::log(std::exp(lrho[p][k] - mp) + std::exp(log_eps - mp));
                trho[p] = tau_eval_log(table, ls);
                double branch = trho[p] + 3.0 * chi[p][k] - 3.0 + N * (z2[k] - M);
                best = std::max(best, branch);
            }
            u[k] = best;
            c1v = std::max(c1v, tpsi[k] - best);
            c2v = std::max(c2v, best - tpsi[k]);
            for (std::size_t p = 0; p < model.patches.size(); ++p)
                for (std::size_t r = p + 1; r < model.patches.size(); ++r)
                    if (chi[p][k] > 0.0 && chi[r][k] > 0.0)
                        ov = std::max(ov, std::fabs(trho[p] - trho[r]));
        }
        c1_out = c1v;
        c2_out = c2v;
        overlap_out = ov;
    };

    double c1p, c2p, ovp;
    build_u(log_eps_probe, c1p, c2p, ovp);

    int l = l_request;
    if (l == 0) l = int(std::floor(c1p + c2p + 0.5)) + 1;
    require(double(2 * l - 1) / 2.0 > c1p + c2p,
            "patch_decay_sim: requested l violates the (2l-1)/2 > c1+c2 precondition");
    if (2 + 2 * l > len)
        throw std::runtime_error(
            "patch_decay_sim: no admissible l within the table length; extend the sequence");

    // tabulated nu: shells and the eps index must stay inside grid and table
    double ell_grid_max = ell[at(nx - 1, 0)];
    double dcell = (ell[at(nx - 1, 0)] - ell[at(0, 0)]) / double(nx - 1);
    std::vector<int> tab;
    for (int nu = 1; 2 * nu + 2 * l <= len; ++nu) {
        double shell = table.ell[2 * nu - 1];             // ell_{2 nu}
        double deep = table.ell[2 * (nu + l) - 1];        // ell_{2(nu+l)}
        if (shell < ell[at(0, 0)] + dcell) continue;
        if (deep > ell_grid_max - 2.0 * dcell) break;
        tab.push_back(nu);
    }
    require(!tab.empty(), "patch_decay_sim: no resolvable shells for this l and grid");
    rep.l = l;
    rep.tabulated_nu = tab;

    double c1 = c1p, c2 = c2p, overlap = ovp;
    double min_lap = std::numeric_limits<double>::infinity();
    std::vector<double> kappa;
    bool sup_below_one = true;

    for (int nu : tab) {
        double log_eps = table.log_neg_a[2 * (nu + l) - 1];  // eps = -a_{2nu+2l}
        double c1e, c2e, ove;
        build_u(log_eps, c1e, c2e, ove);
        c1 = std::max(c1, c1e);
        c2 = std::max(c2, c2e);
        overlap = std::max(overlap, ove);

        // single-branch discrete Laplacian of u (junction points excluded)
        for (int j = 1; j + 1 < ny; ++j)
            for (int i = 1; i + 1 < nx; ++i) {
                std::size_t k = at(i, j);
                // margin of the winning branch over the runner-up
                double best = tau_a + N * (z2[k] - M), second = -1e300;
                for (std::size_t p = 0; p < model.patches.size(); ++p) {
                    double mp = std::max(lrho[p][k], log_eps);
                    double ls = mp + std::log(std::exp(lrho[p][k] - mp) + std::exp(log_eps - mp));
                    double branch = tau_eval_log(table, ls) + 3.0 * chi[p][k] - 3.0 +
                                    N * (z2[k] - M);
                    if (branch > best) { second = best; best = branch; }
                    else second = std::max(second, branch);
                }
                if (best - second < 1e-6 * (1.0 + std::fabs(best))) continue;
                double lap = (u[at(i - 1, j)] - 2 * u[k] + u[at(i + 1, j)]) / (hx * hx) +
                             (u[at(i, j - 1)] - 2 * u[k] + u[at(i, j + 1)]) / (hy * hy);
                min_lap = std::min(min_lap, lap);
            }

        // kappa_nu from w = u / tau(a_{2nu+2l})
        double denom_tau = table.tau_at_a[2 * (nu + l) - 1];
        double shell = table.ell[2 * nu - 1];
        double deep = table.ell[2 * (nu + l) - 1];
        double sup_shell = -std::numeric_limits<double>::infinity();
        double inf_deep = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < nn; ++k) {
            double w = u[k] / denom_tau;
            if (std::fabs(ell[k] - shell) <= 0.75 * dcell) sup_shell = std::max(sup_shell, w);
            if (ell[k] >= deep) inf_deep = std::min(inf_deep, w);
        }
        require(finite(sup_shell) && finite(inf_deep),
                "patch_decay_sim: empty shell or deep set");
        if (!(sup_shell < 1.0)) sup_below_one = false;
        kappa.push_back((inf_deep - sup_shell) / (1.0 - sup_shell));
    }

    rep.c1 = c1;
    rep.c2 = c2;
    rep.overlap_max = overlap;
    rep.overlap_ok = overlap < 3.0;
    rep.min_single_branch_laplacian = min_lap;
    rep.kappa = kappa;
    rep.sup_w_below_one = sup_below_one;
    require(double(2 * l - 1) / 2.0 > c1 + c2,
            "patch_decay_sim: schedule-wide c1 + c2 broke the l precondition");
    rep.c3 = (double(2 * l - 1) / 2.0 - c1 - c2) / (double(2 * l + 1) + c1);
    rep.epsilon0 = std::log(1.0 / (1.0 - rep.c3)) / double(l);
    for (double kap : kappa)
        if (!(kap >= rep.c3)) rep.kappa_ok = false;

    // model extremal stand-in: -rho(z) = delta(z)/max delta; M_nu over shells
    double ell_min_grid = ell[at(0, 0)];
    int max_shell = 0;
    for (int nu = 1; 2 * nu <= len; ++nu)
        if (table.ell[2 * nu - 1] <= ell_grid_max - dcell) max_shell = nu;
    for (int nu = 1; nu <= max_shell; ++nu) {
        double shell = table.ell[2 * nu - 1];
        double sup = 0.0;
        for (std::size_t k = 0; k < nn; ++k)
            if (ell[k] >= shell) sup = std::max(sup, std::exp(-(ell[k] - ell_min_grid)));
        rep.M_series.push_back(sup);
    }
    for (int nu : tab) {
        if (nu + l > max_shell) continue;
        if (!(rep.M_series[std::size_t(nu + l - 1)] <=
              (1.0 - rep.c3) * rep.M_series[std::size_t(nu - 1)]))
            rep.m_contraction_ok = false;
    }

    // final bound shape: -rho <= K exp(-eps0 lambda(delta)) with the run's K
    double K = 0.0;
    for (std::size_t k = 0; k < nn; ++k) {
        double neg_rho = std::exp(-(ell[k] - ell_min_grid));
        int lam = lambda_of(table, std::exp(-ell[k]));
        K = std::max(K, neg_rho * std::exp(rep.epsilon0 * lam));
    }
    rep.final_bound_K = K;

    // c0 over the first half of the table; the tau growth keeps it valid
    double c0 = 0.0;
    for (int nu = 1; nu <= len / 2; ++nu)
        c0 = std::max(c0, double(nu) / 2.0 - table.tau_at_a[nu - 1]);
    rep.c0 = c0;
    return rep;
}

}  // namespace cusplab
