#include <catch2/catch_amalgamated.hpp>

#include "cusplab/conformal.hpp"

using namespace cusplab;

TEST_CASE("hopf constant, worked values") {
    REQUIRE(hopf_constant(CuspParams{1.0, 0.5}) == Catch::Approx(kPi / 2.0).epsilon(1e-14));
    REQUIRE(hopf_constant(CuspParams{2.0, 0.5}) == Catch::Approx(2.0 * kPi).epsilon(1e-14));
    REQUIRE(hopf_constant(CuspParams{1.0, 2.0 / 3.0}) == Catch::Approx(kPi).epsilon(1e-14));
}

TEST_CASE("f_map normalization F(1) = e^{-A} holds exactly") {
    for (auto [c, a] : std::vector<std::pair<double, double>>{{1.0, 0.5}, {0.5, 0.7}, {2.0, 0.25}}) {
        CuspParams p{c, a};
        double A = hopf_constant(p);
        complexd f1 = f_map(p, complexd(1.0, 0.0));
        REQUIRE(f1.imag() == 0.0);
        REQUIRE(f1.real() == std::exp(-A));
    }
}

TEST_CASE("f_map at a real point and the conjugation symmetry") {
    CuspParams p{1.0, 0.5};
    complexd v = f_map(p, complexd(0.5, 0.0));
    REQUIRE(v.real() == Catch::Approx(std::exp(-kPi)).epsilon(1e-12));
    REQUIRE(std::fabs(v.imag()) < 1e-18);

    Rng rng(99);
    auto oracle = cusp_disk_oracle(p, injectivity_radius(p));
    int n = 0;
    while (n < 300) {
        complexd z(rng.uniform(0.0, 2.5), rng.uniform(0.0, 1.5));
        if (!oracle.contains(z) || z.imag() == 0.0) continue;
        ++n;
        complexd a = f_map(p, std::conj(z));
        complexd b = std::conj(f_map(p, z));
        REQUIRE(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)));
    }

    REQUIRE_THROWS_AS(f_map(p, complexd(0.0, 0.0)), std::invalid_argument);
    REQUIRE_THROWS_AS(f_map(p, complexd(std::nan(""), 0.0)), std::invalid_argument);
}

TEST_CASE("f_map is real, positive, strictly increasing on the positive axis") {
    CuspParams p{0.5, 0.7};
    double R = injectivity_radius(p);
    double upto = std::min(R, 5.0);
    double prev = 0.0;
    for (int i = 1; i <= 1000; ++i) {
        double x = upto * double(i) / 1000.0;
        complexd v = f_map(p, complexd(x, 0.0));
        REQUIRE(v.imag() == 0.0);
        REQUIRE(v.real() > prev);
        prev = v.real();
    }
}

TEST_CASE("f_map inverse undoes the map on the cusp") {
    CuspParams p{1.0, 0.5};
    Rng rng(3);
    auto oracle = cusp_disk_oracle(p, injectivity_radius(p));
    int n = 0;
    while (n < 200) {
        complexd z(rng.uniform(0.01, 2.5), rng.uniform(-1.5, 1.5));
        if (!oracle.contains(z)) continue;
        if (log_f_map(p, z).real() < -600.0) continue;  // image representable
        ++n;
        complexd back = f_map_inverse(p, f_map(p, z));
        REQUIRE(std::abs(back - z) <= 1e-9 * std::max(1.0, std::abs(z)));
    }
}

TEST_CASE("boundary polar quantities: axis curve and extreme curves") {
    CuspParams p{1.0, 0.5};
    double A = hopf_constant(p);

    auto bp = boundary_polar(p, 0.0, 0.37);
    REQUIRE(bp.theta == 0.0);
    REQUIRE(bp.theta_tilde == 0.0);
    REQUIRE(bp.r == Catch::Approx(0.37).epsilon(1e-15));
    REQUIRE(bp.log_r_tilde == Catch::Approx(-A / 0.37).epsilon(1e-14));

    double c_max = std::pow(p.C, -1.0 / p.alpha);
    auto hi = boundary_polar(p, c_max, 1e-6);
    auto lo = boundary_polar(p, -c_max, 1e-6);
    REQUIRE(std::fabs(hi.theta_tilde - kPi / 2.0) < 1e-2);
    REQUIRE(std::fabs(lo.theta_tilde + kPi / 2.0) < 1e-2);

    REQUIRE_THROWS_AS(boundary_polar(p, c_max * 1.01, 0.1), std::invalid_argument);
}

TEST_CASE("theta_tilde never exceeds pi/2 in absolute value") {
    for (auto pr : std::vector<CuspParams>{{1.0, 0.5}, {0.5, 0.7}, {2.0, 0.3}}) {
        double c_max = std::pow(pr.C, -1.0 / pr.alpha);
        Rng rng(5);
        double worst = 0.0;
        for (int i = 0; i < 10000; ++i) {
            double c = rng.uniform(-c_max, c_max);
            double s = std::exp(rng.uniform(std::log(1e-8), std::log(1.0)));
            worst = std::max(worst, std::fabs(boundary_polar(pr, c, s).theta_tilde));
        }
        REQUIRE(worst <= kPi / 2.0 + 1e-9);
    }
}

TEST_CASE("polar data is consistent with the map where representable") {
    CuspParams p{0.5, 0.7};
    Rng rng(17);
    double c_max = std::pow(p.C, -1.0 / p.alpha);
    int n = 0;
    while (n < 1000) {
        double c = rng.uniform(-c_max, c_max);
        double s = std::exp(rng.uniform(std::log(0.05), std::log(2.0)));
        auto bp = boundary_polar(p, c, s);
        if (bp.log_r_tilde < -600.0) continue;
        ++n;
        complexd gamma(s, c * std::pow(s, 1.0 / p.alpha));
        complexd f = f_map(p, gamma);
        REQUIRE(std::abs(f) == Catch::Approx(bp.r_tilde).epsilon(1e-10));
        REQUIRE(std::arg(f) == Catch::Approx(bp.theta_tilde).margin(1e-10));
    }
}

TEST_CASE("injectivity radius: worked value and monotonicity in C") {
    REQUIRE(injectivity_radius(CuspParams{1.0, 0.5}) == Catch::Approx(0.9 * kPi).epsilon(1e-14));
    double prev = std::numeric_limits<double>::infinity();
    for (double C : {0.5, 1.0, 2.0, 4.0}) {
        double r = injectivity_radius(CuspParams{C, 0.5});
        REQUIRE(r < prev);
        prev = r;
    }
}

TEST_CASE("collision scan finds no injectivity violations") {
    CuspParams p{1.0, 0.5};
    auto scan = injectivity_collision_scan(p, injectivity_radius(p), 20000);
    REQUIRE(scan.points == 20000);
    REQUIRE(scan.violations == 0);
    REQUIRE(scan.max_abs_im_g <= kPi / 2.0 + 1e-9);
}

TEST_CASE("image profile: asymptotics of the boundary graph") {
    CuspParams p{1.0, 0.5};
    double A = hopf_constant(p);
    auto grid = log_spaced_descending(1e-6, 1e-4, 40);
    auto prof = image_profile(p, grid);

    // log(1/y) ~ A / s^q near the vertex
    const auto& deep = prof.samples.front();  // s = 1e-4 (descending grid starts high)
    double ratio = (-deep.log_y_tilde) / (A / std::pow(deep.s, p.q()));
    REQUIRE(std::fabs(ratio - 1.0) <= 0.05);

    // h against |y| (log 1/|y|)^{-2} is captured with small residual
    REQUIRE(prof.a2_fit.residual <= 0.10);
    REQUIRE(prof.a2_fit.coefficient > 0.0);

    // A2 = A1 A^2 cross-check
    REQUIRE(prof.consistency >= 0.95);
    REQUIRE(prof.consistency <= 1.05);

    // A1 stable across disjoint windows
    auto w1 = image_profile(p, log_spaced_descending(1e-5, 1e-4, 30));
    auto w2 = image_profile(p, log_spaced_descending(1e-6, 1e-5, 30));
    REQUIRE(std::fabs(w1.a1_fit.coefficient / w2.a1_fit.coefficient - 1.0) <= 0.02);

    // grid outside the conformality radius is rejected
    REQUIRE_THROWS_AS(image_profile(p, std::vector<double>{4.0, 1.0}), std::invalid_argument);
}

TEST_CASE("image profile covers other apertures") {
    CuspParams p{0.5, 0.7};
    auto prof = image_profile(p, log_spaced_descending(1e-6, 1e-4, 30));
    REQUIRE(prof.consistency >= 0.95);
    REQUIRE(prof.consistency <= 1.05);
    REQUIRE(prof.a1_fit.coefficient > 0.0);
    REQUIRE(std::isfinite(prof.a1_fit.coefficient));
}
