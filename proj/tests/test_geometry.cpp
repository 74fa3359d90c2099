#include <catch2/catch_amalgamated.hpp>

#include "cusplab/geometry.hpp"

using namespace cusplab;

namespace {
CuspFrame planar_frame(double C, double alpha, double radius) {
    return CuspFrame{{0.0, 0.0}, {1.0, 0.0}, CuspParams{C, alpha}, radius};
}
}  // namespace

TEST_CASE("cusp_contains rejects the vertex (strict inequality)") {
    auto f = planar_frame(1.0, 0.5, 1.0);
    REQUIRE_FALSE(cusp_contains(f, {0.0, 0.0}));
}

TEST_CASE("cusp_contains accepts axis points below the truncation radius") {
    auto f = planar_frame(1.0, 0.5, 1.0);
    for (double t : {1e-6, 1e-3, 0.5, 0.999}) REQUIRE(cusp_contains(f, {t, 0.0}));
    REQUIRE_FALSE(cusp_contains(f, {1.0, 0.0}));  // |z - p| < radius is strict
    REQUIRE_FALSE(cusp_contains(f, {1.5, 0.0}));
}

TEST_CASE("planar cusp membership is the inequality x > C|y|^alpha") {
    // x = 0.04, y = 0.0016: |y|^{1/2} = 0.04 exactly, boundary point
    REQUIRE_FALSE(cusp_contains(CuspParams{1.0, 0.5}, 1.0, complexd(0.04, 0.0016)));
    REQUIRE(cusp_contains(CuspParams{1.0, 0.5}, 1.0, complexd(0.0401, 0.0016)));
    REQUIRE_FALSE(cusp_contains(CuspParams{1.0, 0.5}, 1.0, complexd(0.0399, 0.0016)));
}

TEST_CASE("cusp_contains rejects non-finite coordinates") {
    auto f = planar_frame(1.0, 0.5, 1.0);
    REQUIRE_THROWS_AS(cusp_contains(f, {std::nan(""), 0.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(
        cusp_contains(f, {std::numeric_limits<double>::infinity(), 0.0}),
        std::invalid_argument);
}

TEST_CASE("cusp_contains is invariant under rigid rotations") {
    // 2D rotation applied to frame and query simultaneously
    CuspParams p{0.7, 0.6};
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        double ang = rng.uniform(0.0, 2.0 * kPi);
        double ca = std::cos(ang), sa = std::sin(ang);
        complexd z(rng.uniform(0.0, 1.0), rng.uniform(-0.5, 0.5));
        CuspFrame base = planar_frame(p.C, p.alpha, 1.0);
        CuspFrame rot{{0.0, 0.0}, {ca, sa}, p, 1.0};
        std::vector<double> zr{ca * z.real() - sa * z.imag(), sa * z.real() + ca * z.imag()};
        REQUIRE(cusp_contains(base, {z.real(), z.imag()}) == cusp_contains(rot, zr));
    }

    // 4D: rotate in the (0,1) and (2,3) planes
    for (int trial = 0; trial < 100; ++trial) {
        double a1 = rng.uniform(0.0, 2 * kPi), a2 = rng.uniform(0.0, 2 * kPi);
        auto rot4 = [&](const std::vector<double>& v) {
            std::vector<double> w(4);
            w[0] = std::cos(a1) * v[0] - std::sin(a1) * v[1];
            w[1] = std::sin(a1) * v[0] + std::cos(a1) * v[1];
            w[2] = std::cos(a2) * v[2] - std::sin(a2) * v[3];
            w[3] = std::sin(a2) * v[2] + std::cos(a2) * v[3];
            return w;
        };
        std::vector<double> axis{0.0, 0.0, 0.0, 1.0};
        std::vector<double> z{rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3),
                              rng.uniform(-0.3, 0.3), rng.uniform(0.0, 0.9)};
        CuspFrame base{{0, 0, 0, 0}, axis, p, 1.0};
        CuspFrame rot{{0, 0, 0, 0}, rot4(axis), p, 1.0};
        REQUIRE(cusp_contains(base, z) == cusp_contains(rot, rot4(z)));
    }
}

TEST_CASE("axis distance bounds, worked values") {
    auto b = axis_distance_bounds(CuspParams{1.0, 0.5}, 0.01);
    REQUIRE(b.lower == Catch::Approx(2.5e-5).epsilon(1e-12));
    REQUIRE(b.upper == Catch::Approx(1e-4).epsilon(1e-12));

    // (2C)^{-1/alpha} = 1 when C = 1/2, so the min picks the 1/2 branch
    auto b2 = axis_distance_bounds(CuspParams{0.5, 0.5}, 0.01);
    REQUIRE(b2.lower == Catch::Approx(0.5 * 1e-4).epsilon(1e-12));

    REQUIRE_THROWS_AS(axis_distance_bounds(CuspParams{1.0, 0.5}, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(axis_distance_bounds(CuspParams{1.0, 0.5}, -1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(axis_distance_bounds(CuspParams{1.0, 0.5}, 1.5), std::invalid_argument);
}

TEST_CASE("axis distance bounds scale exactly as t^{1/alpha}") {
    for (double alpha : {0.3, 0.5, 0.7}) {
        CuspParams p{1.3, alpha};
        double factor = std::pow(2.0, 1.0 / alpha);
        for (double t : {1e-3, 1e-2, 0.2}) {
            auto b1 = axis_distance_bounds(p, t);
            auto b2 = axis_distance_bounds(p, 2.0 * t);
            REQUIRE(b1.lower <= b1.upper);
            REQUIRE(b2.lower == Catch::Approx(factor * b1.lower).epsilon(1e-12));
            REQUIRE(b2.upper == Catch::Approx(factor * b1.upper).epsilon(1e-12));
        }
    }
}

TEST_CASE("brute-force axis distances sit inside the lemma bounds") {
    CuspParams p{1.0, 0.5};
    for (int i = 0; i < 20; ++i) {
        double t = 1e-3 * std::pow(100.0, double(i) / 19.0);  // [1e-3, 1e-1]
        double d = boundary_distance_planar(p, 1.0, complexd(t, 0.0));
        auto b = axis_distance_bounds(p, t);
        REQUIRE(d >= b.lower * (1.0 - 1e-6));
        REQUIRE(d <= b.upper * (1.0 + 1e-6));
    }
}

TEST_CASE("boundary distance: worked values and error paths") {
    CuspParams p{1.0, 0.5};
    double d = boundary_distance_planar(p, 1.0, complexd(0.01, 0.0));
    REQUIRE(d >= 2.5e-5);
    REQUIRE(d <= 1e-4);

    // far from the walls the truncation arc is nearest
    double d2 = boundary_distance_planar(p, 0.6, complexd(0.5, 0.0));
    REQUIRE(d2 == Catch::Approx(0.1).epsilon(1e-6));

    REQUIRE_THROWS_AS(boundary_distance_planar(p, 1.0, complexd(-0.1, 0.0)), std::domain_error);
    REQUIRE_THROWS_AS(boundary_distance_planar(p, 1.0, complexd(0.01, 0.5)), std::domain_error);
}

TEST_CASE("boundary distance decays monotonically toward the wall") {
    CuspParams p{1.0, 0.5};
    // approach the upper wall point (s0^2... ) along the inward normal
    double s0 = 0.3;
    complexd wall(p.C * std::pow(s0, p.alpha), s0);
    // inward normal of {x - C|y|^a = 0}: direction (1, -C a s^{a-1}) normalized
    complexd nrm(1.0, -p.C * p.alpha * std::pow(s0, p.alpha - 1.0));
    nrm /= std::abs(nrm);
    double prev = std::numeric_limits<double>::infinity();
    for (double step : {0.04, 0.02, 0.01, 0.005, 0.0025}) {
        double d = boundary_distance_planar(p, 1.0, wall + step * nrm);
        REQUIRE(d < prev);
        REQUIRE(d <= step * (1.0 + 1e-6));
        prev = d;
    }
}

TEST_CASE("fast cusp distance is a tight lower bound of the brute oracle") {
    CuspParams p{0.5, 0.7};
    Rng rng(11);
    auto oracle = cusp_disk_oracle(p, 1.0);
    int tested = 0;
    while (tested < 300) {
        complexd z(rng.uniform(0.0, 1.0), rng.uniform(-0.9, 0.9));
        if (!oracle.contains(z)) continue;
        ++tested;
        double fast = cusp_boundary_distance_fast(p, 1.0, z);
        double brute = boundary_distance_planar(p, 1.0, z, 2048);
        REQUIRE(fast <= brute * (1.0 + 1e-9) + 1e-15);
        REQUIRE(fast >= brute * (1.0 - 1e-6) - 1e-12);
    }
}

TEST_CASE("holder pieces reduce to (max C, min alpha)") {
    auto p = holder_to_cusp({{1.0, 0.5}, {2.0, 0.7}});
    REQUIRE(p.C == 2.0);
    REQUIRE(p.alpha == 0.5);

    auto q = holder_to_cusp({{1.0, 0.5}});
    REQUIRE(q.C == 1.0);
    REQUIRE(q.alpha == 0.5);

    auto r = holder_to_cusp({{3.0, 0.9}, {0.5, 0.3}, {1.0, 0.6}});
    REQUIRE(r.C == 3.0);
    REQUIRE(r.alpha == 0.3);

    REQUIRE_THROWS_AS(holder_to_cusp({}), std::invalid_argument);
    REQUIRE_THROWS_AS(holder_to_cusp({{1.0, 1.0}}), std::invalid_argument);
}

TEST_CASE("params and frames round-trip through json") {
    CuspParams p{2.5, 0.4};
    nlohmann::json j = p;
    REQUIRE(j.at("C") == 2.5);
    REQUIRE(j.at("alpha") == 0.4);
    CuspParams p2 = j.get<CuspParams>();
    REQUIRE(p2.C == p.C);
    REQUIRE(p2.alpha == p.alpha);

    CuspFrame f{{0.0, 1.0, 0.0, 0.0}, {0.0, 0.0, 0.0, 1.0}, p, 0.75};
    nlohmann::json jf = f;
    CuspFrame f2 = jf.get<CuspFrame>();
    REQUIRE(f2.radius == f.radius);
    REQUIRE(f2.vertex == f.vertex);
    REQUIRE(f2.axis == f.axis);

    jf["alpha"] = 1.5;  // invalid on parse
    REQUIRE_THROWS_AS(jf.get<CuspFrame>(), std::invalid_argument);
}

TEST_CASE("frame validation") {
    REQUIRE_THROWS_AS(
        (CuspFrame{{0.0, 0.0}, {0.5, 0.0}, CuspParams{1.0, 0.5}, 1.0}).validate(),
        std::invalid_argument);
    REQUIRE_THROWS_AS(
        (CuspFrame{{0.0, 0.0}, {1.0, 0.0}, CuspParams{1.0, 0.5}, -1.0}).validate(),
        std::invalid_argument);
}
