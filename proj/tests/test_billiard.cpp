#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ovb/billiard.hpp"
#include "ovb/numerics.hpp"
#include "ovb/oval.hpp"
#include "ovb/verify.hpp"

using namespace ovb;

namespace {

const double kPi = std::acos(-1.0);

Oval unit_circle() { return build_oval({SurfaceKind::Euclidean, CircleFamily{1.0}, std::nullopt}); }

Oval ellipse() { return build_oval({SurfaceKind::Euclidean, EllipseFamily{1.2, 1.0}, std::nullopt}); }

Oval test_oval(SurfaceKind k) {
    PolarFamily fam;
    fam.c0 = k == SurfaceKind::Sphere ? 0.8 : 1.0;
    fam.coeffs = {{0.0, 0.0}, {0.05, 0.0}, {0.0, 0.02}};
    return build_oval({k, fam, std::nullopt});
}

// Brute-force impact oracle: the chord angle psi0(u) at the launch point grows
// monotonically from 0 to pi as the far endpoint sweeps the curve once, so the
// impact is the unique root of psi0(u) - psi; plain bisection, no chord-plane
// machinery involved.
PhasePoint oracle_next_impact(const Oval& oval, const PhasePoint& x) {
    const double l = oval.length();
    auto f = [&](double off) { return chord(oval, x.s, x.s + off).psi0 - x.psi; };
    double lo = 1e-9 * l, hi = l - 1e-9 * l;
    for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    const double off = 0.5 * (lo + hi);
    return {wrap_periodic(x.s + off, l), chord(oval, x.s, x.s + off).psi1};
}

const SurfaceKind kAll[] = {SurfaceKind::Euclidean, SurfaceKind::Sphere, SurfaceKind::Hyperbolic};

}  // namespace

TEST_CASE("chord data on the unit circle") {
    const Oval c = unit_circle();
    const ChordData diam = chord(c, 0.0, kPi);
    CHECK(diam.d == Catch::Approx(2.0).margin(1e-12));
    CHECK(diam.psi0 == Catch::Approx(kPi / 2).margin(1e-12));
    CHECK(diam.psi1 == Catch::Approx(kPi / 2).margin(1e-12));

    // chord over arc advance 2*pi/3: d = 2 sin(pi/3), psi = pi/3 at both ends
    const ChordData ch = chord(c, 0.0, 2 * kPi / 3);
    CHECK(ch.d == Catch::Approx(std::sqrt(3.0)).margin(1e-12));
    CHECK(ch.psi0 == Catch::Approx(kPi / 3).margin(1e-12));
    CHECK(ch.psi1 == Catch::Approx(kPi / 3).margin(1e-12));

    CHECK_THROWS_AS(chord(c, 1.0, 1.0), degenerate_chord_error);
}

TEST_CASE("chord across a spherical circle is perpendicular at both ends") {
    const Oval c = build_oval({SurfaceKind::Sphere, CircleFamily{kPi / 4}, std::nullopt});
    const ChordData ch = chord(c, 0.0, c.length() / 2);
    CHECK(ch.psi0 == Catch::Approx(kPi / 2).margin(1e-9));
    CHECK(ch.psi1 == Catch::Approx(kPi / 2).margin(1e-9));
}

TEST_CASE("next_impact on the circle: arc advance 2*psi") {
    const Oval c = unit_circle();
    const PhasePoint d = next_impact(c, {0.0, kPi / 2});
    CHECK(d.s == Catch::Approx(kPi).margin(1e-10));
    CHECK(d.psi == Catch::Approx(kPi / 2).margin(1e-10));

    const PhasePoint t = next_impact(c, {0.0, kPi / 3});
    CHECK(t.s == Catch::Approx(2 * kPi / 3).margin(1e-10));
    CHECK(t.psi == Catch::Approx(kPi / 3).margin(1e-10));
}

TEST_CASE("next_impact matches the brute-force oracle") {
    std::mt19937_64 eng(43);
    for (SurfaceKind k : kAll) {
        const Oval oval = k == SurfaceKind::Euclidean ? ellipse() : test_oval(k);
        for (int i = 0; i < 25; ++i) {
            const PhasePoint x{oval.length() * uniform01(eng), 0.2 + (kPi - 0.4) * uniform01(eng)};
            const PhasePoint got = next_impact(oval, x);
            const PhasePoint want = oracle_next_impact(oval, x);
            REQUIRE(wrap_distance(got.s, want.s, oval.length()) < 1e-9);
            REQUIRE(std::fabs(got.psi - want.psi) < 1e-9);
        }
    }
}

TEST_CASE("inverse map undoes the map") {
    const Oval c = unit_circle();
    const PhasePoint back = inverse_map(c, {kPi, kPi / 2});
    CHECK(back.s == Catch::Approx(0.0).margin(1e-9));

    const Oval e = ellipse();
    std::mt19937_64 eng(47);
    for (int i = 0; i < 50; ++i) {
        const PhasePoint x{e.length() * uniform01(eng), 0.1 + (kPi - 0.2) * uniform01(eng)};
        const PhasePoint y = next_impact(e, x);
        const PhasePoint z = inverse_map(e, y);
        REQUIRE(wrap_distance(z.s, x.s, e.length()) < 1e-9);
        REQUIRE(std::fabs(z.psi - x.psi) < 1e-9);
    }
}

TEST_CASE("generating derivatives of h = +d") {
    const Oval c = unit_circle();
    const auto [d0, d1] = gen_derivs(c, 0.0, kPi);
    CHECK(d0 == Catch::Approx(0.0).margin(1e-12));
    CHECK(d1 == Catch::Approx(0.0).margin(1e-12));

    const auto [e0, e1] = gen_derivs(c, 0.0, 2 * kPi / 3);
    CHECK(e0 == Catch::Approx(-0.5).margin(1e-12));
    CHECK(e1 == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("generating derivatives match finite differences on all surfaces") {
    std::mt19937_64 eng(53);
    for (SurfaceKind k : kAll) {
        const Oval oval = test_oval(k);
        const double l = oval.length();
        for (int i = 0; i < 100; ++i) {
            const double s0 = l * uniform01(eng);
            const double s1 = s0 + l * (0.05 + 0.9 * uniform01(eng));
            const auto [a0, a1] = gen_derivs(oval, s0, s1);
            const auto [f0, f1] = fd_gen_derivs(oval, s0, s1);
            REQUIRE(std::fabs(a0 - f0) < 1e-6);
            REQUIRE(std::fabs(a1 - f1) < 1e-6);
        }
    }
}

TEST_CASE("generating Hessian on the unit circle") {
    const Oval c = unit_circle();
    const GenFunHessian hd = gen_hessian(c, 0.0, kPi);
    CHECK(hd.h01 == Catch::Approx(0.5).margin(1e-10));
    CHECK(hd.h00 == Catch::Approx(-0.5).margin(1e-10));
    CHECK(hd.h11 == Catch::Approx(-0.5).margin(1e-10));

    const GenFunHessian ht = gen_hessian(c, 0.0, 2 * kPi / 3);
    CHECK(ht.h01 == Catch::Approx(std::sqrt(3.0) / 4).margin(1e-10));
}

TEST_CASE("generating Hessian matches finite differences on all surfaces") {
    std::mt19937_64 eng(59);
    for (SurfaceKind k : kAll) {
        const Oval oval = test_oval(k);
        const double l = oval.length();
        for (int i = 0; i < 60; ++i) {
            const double s0 = l * uniform01(eng);
            const double s1 = s0 + l * (0.05 + 0.9 * uniform01(eng));
            const GenFunHessian a = gen_hessian(oval, s0, s1);
            const GenFunHessian f = fd_gen_hessian(oval, s0, s1);
            REQUIRE(std::fabs(a.h00 - f.h00) < 1e-5);
            REQUIRE(std::fabs(a.h01 - f.h01) < 1e-5);
            REQUIRE(std::fabs(a.h11 - f.h11) < 1e-5);
        }
    }
}

TEST_CASE("the circle billiard Jacobian is the unit shear") {
    const Oval c = unit_circle();
    std::mt19937_64 eng(61);
    for (int i = 0; i < 20; ++i) {
        const PhasePoint x{2 * kPi * uniform01(eng), 0.2 + (kPi - 0.4) * uniform01(eng)};
        const JacobianMatrix J = dt_matrix(c, x);
        CHECK(J.a == Catch::Approx(1.0).margin(1e-9));
        CHECK(J.b == Catch::Approx(2.0).margin(1e-9));
        CHECK(J.c == Catch::Approx(0.0).margin(1e-9));
        CHECK(J.e == Catch::Approx(1.0).margin(1e-9));
    }
}

TEST_CASE("closed-form Jacobian matches the finite-difference Jacobian") {
    std::mt19937_64 eng(67);
    for (SurfaceKind k : kAll) {
        const Oval oval = test_oval(k);
        for (int i = 0; i < 40; ++i) {
            const PhasePoint x{oval.length() * uniform01(eng), 0.15 + (kPi - 0.3) * uniform01(eng)};
            const JacobianMatrix J = dt_matrix(oval, x);
            const JacobianMatrix F = fd_jacobian(oval, x);
            auto rel = [](double got, double ref) {
                return std::fabs(got - ref) / std::max(1.0, std::fabs(ref));
            };
            REQUIRE(rel(F.a, J.a) < 1e-5);
            REQUIRE(rel(F.b, J.b) < 1e-5);
            REQUIRE(rel(F.c, J.c) < 1e-5);
            REQUIRE(rel(F.e, J.e) < 1e-5);
        }
    }
}

TEST_CASE("measure preservation, reversibility and twist at random points") {
    std::mt19937_64 eng(71);
    for (SurfaceKind k : kAll) {
        const Oval oval = test_oval(k);
        const double l = oval.length();
        for (int i = 0; i < 1000; ++i) {
            const PhasePoint x{l * uniform01(eng), 0.02 + (kPi - 0.04) * uniform01(eng)};
            const auto [y, J] = map_with_jacobian(oval, x);
            REQUIRE(std::fabs(J.det() - std::sin(x.psi) / std::sin(y.psi)) < 1e-8);
            REQUIRE(J.b > 0.0);

            const PhasePoint t2 = next_impact(oval, {y.s, kPi - y.psi});
            REQUIRE(wrap_distance(t2.s, x.s, l) < 1e-8);
            REQUIRE(std::fabs((kPi - t2.psi) - x.psi) < 1e-8);
        }
    }
}

TEST_CASE("the generating relation characterizes the map") {
    std::mt19937_64 eng(73);
    const Oval oval = test_oval(SurfaceKind::Hyperbolic);
    for (int i = 0; i < 50; ++i) {
        const PhasePoint x{oval.length() * uniform01(eng), 0.2 + (kPi - 0.4) * uniform01(eng)};
        const PhasePoint y = next_impact(oval, x);
        const auto [d0, d1] = gen_derivs(oval, x.s, y.s);
        REQUIRE(std::fabs(d0 + std::cos(x.psi)) < 1e-8);
        REQUIRE(std::fabs(d1 - std::cos(y.psi)) < 1e-8);
    }
}

TEST_CASE("iterate") {
    const Oval c = unit_circle();
    const auto diam = iterate(c, {0.0, kPi / 2}, 4);
    REQUIRE(diam.size() == 5);
    for (std::size_t i = 0; i < diam.size(); ++i)
        CHECK(wrap_distance(diam[i].s, (i % 2) * kPi, 2 * kPi) < 1e-9);

    const auto tri = iterate(c, {0.0, kPi / 3}, 3);
    CHECK(wrap_distance(tri[1].s, 2 * kPi / 3, 2 * kPi) < 1e-9);
    CHECK(wrap_distance(tri[2].s, 4 * kPi / 3, 2 * kPi) < 1e-9);
    CHECK(wrap_distance(tri[3].s, 0.0, 2 * kPi) < 1e-9);

    // long run on the ellipse stays strictly inside the cylinder
    const Oval e = ellipse();
    const auto run = iterate(e, {0.3, 1.1}, 1000);
    for (const PhasePoint& p : run) REQUIRE((p.psi > 0.0 && p.psi < kPi));
}

TEST_CASE("momentum coordinates") {
    CHECK(to_momentum({0.0, kPi / 2}).p == Catch::Approx(0.0).margin(1e-15));
    CHECK(to_momentum({0.0, kPi / 3}).p == Catch::Approx(-0.5).margin(1e-15));
    const PhasePoint x{1.0, 0.9};
    CHECK(from_momentum(to_momentum(x)).psi == Catch::Approx(x.psi).margin(1e-15));
    CHECK_THROWS_AS(from_momentum({0.0, 1.0}), numeric_domain_error);
}

TEST_CASE("whisper band is rejected") {
    const Oval c = unit_circle();
    CHECK_THROWS_AS(next_impact(c, {0.0, 1e-9}), whisper_orbit_error);
    CHECK_THROWS_AS(next_impact(c, {0.0, kPi - 1e-9}), whisper_orbit_error);
}
