#include <catch2/catch_amalgamated.hpp>

#include "cusplab/common.hpp"

using namespace cusplab;

TEST_CASE("rng streams are pure functions of (seed, index)") {
    Rng a = Rng::stream(42, 7);
    Rng b = Rng::stream(42, 7);
    for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());

    Rng c = Rng::stream(42, 8);
    Rng d = Rng::stream(43, 7);
    REQUIRE(Rng::stream(42, 7).next_u64() != c.next_u64());
    REQUIRE(Rng::stream(42, 7).next_u64() != d.next_u64());
}

TEST_CASE("rng uniforms live in [0,1) and normals have sane moments") {
    Rng r(123);
    double sum = 0.0, sumsq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        double u = r.next_double();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        double g = r.normal();
        sum += g;
        sumsq += g * g;
    }
    REQUIRE(std::fabs(sum / n) < 0.01);
    REQUIRE(std::fabs(sumsq / n - 1.0) < 0.02);
}

TEST_CASE("halton fills the unit square") {
    double minx = 1, maxx = 0;
    for (int i = 0; i < 1000; ++i) {
        complexd p = halton2d(i);
        minx = std::min(minx, p.real());
        maxx = std::max(maxx, p.real());
        REQUIRE(p.real() >= 0.0);
        REQUIRE(p.imag() < 1.0);
    }
    REQUIRE(minx < 0.01);
    REQUIRE(maxx > 0.99);
}

TEST_CASE("golden section finds quadratic minima") {
    auto m = golden_section_min([](double x) { return (x - 1.7) * (x - 1.7) + 3.0; }, 0.0, 5.0,
                                1e-12);
    REQUIRE(std::fabs(m.x - 1.7) < 1e-7);
    REQUIRE(std::fabs(m.value - 3.0) < 1e-13);
}

TEST_CASE("gauss-legendre panels integrate smooth functions to machine accuracy") {
    double v = integrate_gl([](double x) { return std::sin(x); }, 0.0, kPi);
    REQUIRE(std::fabs(v - 2.0) < 1e-13);
    double w = integrate_gl([](double x) { return std::exp(-x * x); }, -8.0, 8.0);
    REQUIRE(std::fabs(w - std::sqrt(kPi)) < 1e-12);
}

TEST_CASE("gauss-legendre flags divergent integrands") {
    double v = integrate_gl([](double x) { return 1.0 / (x * x); }, 0.0, 1.0, 1e-12, 12);
    REQUIRE(!std::isfinite(v));
}

TEST_CASE("linear fit recovers slope and intercept") {
    std::vector<double> x, y;
    for (int i = 0; i < 50; ++i) {
        x.push_back(0.1 * i);
        y.push_back(2.5 - 0.7 * 0.1 * i);
    }
    auto f = fit_linear(x, y);
    REQUIRE(std::fabs(f.slope + 0.7) < 1e-12);
    REQUIRE(std::fabs(f.intercept - 2.5) < 1e-12);
    REQUIRE(f.max_rel_residual < 1e-12);
}

TEST_CASE("coefficient fit in log space") {
    std::vector<double> ly, lm;
    for (int i = 1; i <= 20; ++i) {
        double m = 0.01 * i;
        lm.push_back(std::log(m));
        ly.push_back(std::log(3.25 * m));
    }
    auto f = fit_coefficient_log(ly, lm);
    REQUIRE(std::fabs(f.coefficient - 3.25) < 1e-12);
    REQUIRE(f.max_rel_residual < 1e-12);
}
