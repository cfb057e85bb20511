#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ovb/numerics.hpp"
#include "ovb/oval.hpp"
#include "ovb/perturb.hpp"

using namespace ovb;

namespace {

const double kPi = std::acos(-1.0);

Oval circle(SurfaceKind k, double rho, int res = 1024) {
    return build_oval({k, CircleFamily{rho}, std::nullopt}, res);
}

}  // namespace

TEST_CASE("bump profile values at the center and outside the support") {
    const Oval c = circle(SurfaceKind::Euclidean, 1.0);
    const double s0 = 1.3, width = 0.5, amp = 0.05;
    const PerturbationProfile bump = bump_profile(c, s0, width, amp);

    const auto at_center = bump(s0);
    CHECK(at_center[0] == 0.0);
    CHECK(at_center[1] == 0.0);
    CHECK(at_center[2] == Catch::Approx(2 * amp).margin(1e-14));

    for (double off : {0.26, 0.4, 1.0, -0.26, -2.0}) {
        const auto v = bump(s0 + off);
        CHECK(v[0] == 0.0);
        CHECK(v[1] == 0.0);
        CHECK(v[2] == 0.0);
    }

    // profile derivatives agree with finite differences of the value
    std::mt19937_64 eng(5);
    for (int i = 0; i < 200; ++i) {
        const double s = s0 + (uniform01(eng) - 0.5) * width;
        const double h = 1e-6;
        const auto v = bump(s);
        const double d1 = (bump(s + h)[0] - bump(s - h)[0]) / (2 * h);
        const double d2 = (bump(s + h)[1] - bump(s - h)[1]) / (2 * h);
        CHECK(v[1] == Catch::Approx(d1).margin(1e-7));
        CHECK(v[2] == Catch::Approx(d2).margin(1e-6));
    }
}

TEST_CASE("bump C2 norm scales linearly in the amplitude") {
    const Oval c = circle(SurfaceKind::Euclidean, 1.0);
    const double n1 = bump_profile(c, 0.0, 0.5, 0.02).c2_norm();
    const double n2 = bump_profile(c, 0.0, 0.5, 0.04).c2_norm();
    CHECK(n2 == Catch::Approx(2.0 * n1).epsilon(1e-9));
}

TEST_CASE("zero perturbation is the identity") {
    const Oval c = circle(SurfaceKind::Sphere, kPi / 4);
    const Oval b = normal_perturbation(c, PerturbationProfile::constant(0.0, c.length()));
    CHECK(b.length() == Catch::Approx(c.length()).margin(1e-12));
    for (double s : {0.0, 1.0, 2.5})
        CHECK(norm(b.position(s).r - c.position(s).r) < 1e-12);
}

TEST_CASE("constant offsets move circles along the inward normal") {
    // eta points inward, so positive lambda shrinks the circle
    const Oval c = circle(SurfaceKind::Euclidean, 1.0);
    const Oval shrunk = normal_perturbation(c, PerturbationProfile::constant(0.1, c.length()));
    CHECK(shrunk.length() == Catch::Approx(2 * kPi * 0.9).epsilon(1e-10));
    const Oval grown = normal_perturbation(c, PerturbationProfile::constant(-0.1, c.length()));
    CHECK(grown.length() == Catch::Approx(2 * kPi * 1.1).epsilon(1e-10));

    const SurfacePoint north = SurfacePoint::basepoint(SurfaceKind::Sphere);
    const Oval sc = circle(SurfaceKind::Sphere, kPi / 4);
    const double cval = 0.08;
    const Oval sb = normal_perturbation(sc, PerturbationProfile::constant(cval, sc.length()));
    for (double s : {0.0, 0.9})
        CHECK(geodesic_distance(sb.position(s), north) ==
              Catch::Approx(kPi / 4 - std::atan(cval)).margin(1e-9));

    const SurfacePoint origin = SurfacePoint::basepoint(SurfaceKind::Hyperbolic);
    const Oval hc = circle(SurfaceKind::Hyperbolic, 1.0);
    const Oval hb = normal_perturbation(hc, PerturbationProfile::constant(cval, hc.length()));
    for (double s : {0.0, 0.9})
        CHECK(geodesic_distance(hb.position(s), origin) ==
              Catch::Approx(1.0 - std::atanh(cval)).margin(1e-9));
}

TEST_CASE("hyperbolic perturbations require |lambda| < 1") {
    const Oval hc = circle(SurfaceKind::Hyperbolic, 1.0);
    CHECK_THROWS_AS(normal_perturbation(hc, PerturbationProfile::constant(1.0, hc.length())),
                    numeric_domain_error);
}

TEST_CASE("small perturbations stay close to the base oval") {
    const Oval c = circle(SurfaceKind::Sphere, 0.8, 2048);
    for (double amp : {0.002, 0.0005}) {
        const PerturbationProfile bump = bump_profile(c, 2.0, 1.0, amp);
        const Oval b = normal_perturbation(c, bump);
        double worst = 0.0;
        for (int i = 0; i < 256; ++i) {
            const double t = c.length() * i / 256;  // same source parameter on both curves
            Vec3 xb;
            b.source()->eval(t, &xb, nullptr, nullptr, nullptr);
            worst = std::max(worst, geodesic_distance(SurfacePoint(c.kind(), xb), c.position(t)));
        }
        CHECK(worst <= 2.0 * bump.c2_norm());
    }
}

TEST_CASE("perturbed curvature picks up lambda'' at the bump center") {
    for (SurfaceKind k : {SurfaceKind::Euclidean, SurfaceKind::Sphere, SurfaceKind::Hyperbolic}) {
        const Oval c = circle(k, k == SurfaceKind::Sphere ? 0.7 : 1.0);
        const double s0 = 0.4, amp = 0.03;
        const Oval b = normal_perturbation(c, bump_profile(c, s0, 0.8, amp));
        const double snew = b.arclength_of_param(s0);
        CHECK(b.curvature(snew) == Catch::Approx(c.curvature(s0) + 2 * amp).margin(1e-8));
        // the bump center itself does not move
        CHECK(norm(b.position(snew).r - c.position(s0).r) < 1e-10);
    }
}

TEST_CASE("oversized perturbations fail the certificate") {
    const Oval c = circle(SurfaceKind::Euclidean, 1.0);
    CHECK_THROWS_AS(normal_perturbation(c, bump_profile(c, 0.0, 1.0, 1.5)), invalid_oval_error);
}
