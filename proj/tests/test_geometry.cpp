#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ovb/geometry.hpp"
#include "ovb/numerics.hpp"

using namespace ovb;

namespace {

const double kPi = std::acos(-1.0);

SurfacePoint chart_point(SurfaceKind k, double rho, double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    switch (k) {
        case SurfaceKind::Euclidean: return SurfacePoint(k, {rho * c, rho * s, 1.0});
        case SurfaceKind::Sphere:
            return SurfacePoint(k, {std::sin(rho) * c, std::sin(rho) * s, std::cos(rho)});
        default:
            return SurfacePoint(k, {std::sinh(rho) * c, std::sinh(rho) * s, std::cosh(rho)});
    }
}

SurfacePoint random_point(SurfaceKind k, std::mt19937_64& eng) {
    return chart_point(k, 0.1 + 1.2 * uniform01(eng), 2.0 * kPi * uniform01(eng));
}

TangentVector random_unit_tangent(const SurfacePoint& X, std::mt19937_64& eng) {
    for (;;) {
        Vec3 raw{uniform01(eng) - 0.5, uniform01(eng) - 0.5, 0.0};
        if (X.kind != SurfaceKind::Euclidean) raw.z = uniform01(eng) - 0.5;
        // project onto the tangent plane by hand, then normalize in the metric
        switch (X.kind) {
            case SurfaceKind::Euclidean: raw.z = 0.0; break;
            case SurfaceKind::Sphere: raw -= dot(raw, X.r) * X.r; break;
            default: raw += metric_inner(X.kind, raw, X.r) * X.r; break;
        }
        const double n2 = metric_inner(X.kind, raw, raw);
        if (n2 < 1e-6) continue;
        return TangentVector(X, raw / std::sqrt(n2));
    }
}

const SurfaceKind kAll[] = {SurfaceKind::Euclidean, SurfaceKind::Sphere, SurfaceKind::Hyperbolic};

}  // namespace

TEST_CASE("metric_inner matches each model's pairing") {
    CHECK(metric_inner(SurfaceKind::Euclidean, {1, 0, 0}, {1, 0, 0}) == 1.0);
    CHECK(metric_inner(SurfaceKind::Hyperbolic, {0, 0, 1}, {0, 0, 1}) == -1.0);
    CHECK(metric_inner(SurfaceKind::Sphere, {1, 2, 3}, {4, 5, 6}) == 32.0);
}

TEST_CASE("geodesic_distance closed forms") {
    const SurfacePoint e0(SurfaceKind::Euclidean, {0, 0, 1});
    const SurfacePoint e1(SurfaceKind::Euclidean, {3, 4, 1});
    CHECK(geodesic_distance(e0, e1) == Catch::Approx(5.0).margin(1e-14));

    const SurfacePoint s0 = SurfacePoint::basepoint(SurfaceKind::Sphere);
    const SurfacePoint s1(SurfaceKind::Sphere, {std::sin(1.0), 0, std::cos(1.0)});
    CHECK(geodesic_distance(s0, s1) == Catch::Approx(1.0).margin(1e-14));

    const SurfacePoint h0 = SurfacePoint::basepoint(SurfaceKind::Hyperbolic);
    const SurfacePoint h1(SurfaceKind::Hyperbolic, {std::sinh(2.0), 0, std::cosh(2.0)});
    CHECK(geodesic_distance(h0, h1) == Catch::Approx(2.0).margin(1e-12));

    CHECK_THROWS_AS(geodesic_distance(e0, s0), usage_error);
}

TEST_CASE("geodesic_distance is symmetric") {
    std::mt19937_64 eng(7);
    for (SurfaceKind k : kAll)
        for (int i = 0; i < 200; ++i) {
            const SurfacePoint a = random_point(k, eng), b = random_point(k, eng);
            CHECK(std::fabs(geodesic_distance(a, b) - geodesic_distance(b, a)) <= 1e-12);
        }
}

TEST_CASE("geodesic_point closed forms and unit speed") {
    const SurfacePoint sN = SurfacePoint::basepoint(SurfaceKind::Sphere);
    const TangentVector u(sN, {1, 0, 0});
    const SurfacePoint q = geodesic_point(sN, u, kPi / 2.0);
    CHECK(norm(q.r - Vec3{1, 0, 0}) < 1e-12);

    const SurfacePoint hN = SurfacePoint::basepoint(SurfaceKind::Hyperbolic);
    const TangentVector v(hN, {1, 0, 0});
    const SurfacePoint p = geodesic_point(hN, v, 2.0);
    CHECK(norm(p.r - Vec3{std::sinh(2.0), 0, std::cosh(2.0)}) < 1e-9);

    std::mt19937_64 eng(11);
    for (SurfaceKind k : kAll)
        for (int i = 0; i < 100; ++i) {
            const SurfacePoint X = random_point(k, eng);
            const TangentVector w = random_unit_tangent(X, eng);
            const double t = 1.5 * uniform01(eng);
            // identity at t=0
            CHECK(norm(geodesic_point(X, w, 0.0).r - X.r) < 1e-12);
            // unit speed via centered difference of the flow
            const double h = 1e-6;
            const SurfacePoint a = geodesic_point(X, w, t - h), b = geodesic_point(X, w, t + h);
            const Vec3 vel = (b.r - a.r) / (2 * h);
            CHECK(std::fabs(metric_inner(k, vel, vel) - 1.0) < 1e-6);
            // distance along the flow equals the parameter
            if (k != SurfaceKind::Sphere || t < kPi - 0.1)
                CHECK(std::fabs(geodesic_distance(X, geodesic_point(X, w, t)) - t) < 1e-9);
        }
}

TEST_CASE("unit_tangent_toward reproduces the target") {
    const SurfacePoint e0(SurfaceKind::Euclidean, {0, 0, 1});
    const SurfacePoint e1(SurfaceKind::Euclidean, {3, 4, 1});
    const TangentVector tau = unit_tangent_toward(e0, e1);
    CHECK(norm(tau.u - Vec3{0.6, 0.8, 0.0}) < 1e-14);

    const SurfacePoint s0 = SurfacePoint::basepoint(SurfaceKind::Sphere);
    const SurfacePoint s1(SurfaceKind::Sphere, {std::sin(1.0), 0, std::cos(1.0)});
    CHECK(norm(unit_tangent_toward(s0, s1).u - Vec3{1, 0, 0}) < 1e-12);

    const SurfacePoint h0 = SurfacePoint::basepoint(SurfaceKind::Hyperbolic);
    const SurfacePoint h1(SurfaceKind::Hyperbolic, {std::sinh(2.0), 0, std::cosh(2.0)});
    CHECK(norm(unit_tangent_toward(h0, h1).u - Vec3{1, 0, 0}) < 1e-9);

    CHECK_THROWS_AS(unit_tangent_toward(e0, e0), degenerate_chord_error);

    std::mt19937_64 eng(13);
    for (SurfaceKind k : kAll)
        for (int i = 0; i < 200; ++i) {
            const SurfacePoint X = random_point(k, eng), Y = random_point(k, eng);
            const double d = geodesic_distance(X, Y);
            if (d < 1e-6) continue;
            const SurfacePoint back = geodesic_point(X, unit_tangent_toward(X, Y), d);
            CHECK(norm(back.r - Y.r) < 1e-9);
        }
}

TEST_CASE("angle_between") {
    const SurfacePoint X = SurfacePoint::basepoint(SurfaceKind::Euclidean);
    const TangentVector u(X, {1, 0, 0}), v(X, {0, 1, 0});
    CHECK(angle_between(u, u) == 0.0);
    CHECK(angle_between(u, TangentVector(X, {-1, 0, 0})) == Catch::Approx(kPi));
    CHECK(angle_between(u, v) == Catch::Approx(kPi / 2.0));

    const SurfacePoint Y(SurfaceKind::Euclidean, {1, 0, 1});
    CHECK_THROWS_AS(angle_between(u, TangentVector(Y, {1, 0, 0})), usage_error);
}

TEST_CASE("project_radial") {
    CHECK(norm(project_radial(SurfaceKind::Sphere, {0, 0, 2}).r - Vec3{0, 0, 1}) < 1e-15);
    CHECK(norm(project_radial(SurfaceKind::Euclidean, {6, 8, 2}).r - Vec3{3, 4, 1}) < 1e-15);
    CHECK(norm(project_radial(SurfaceKind::Hyperbolic, {0, 0, 3}).r - Vec3{0, 0, 1}) < 1e-15);
    CHECK_THROWS_AS(project_radial(SurfaceKind::Euclidean, {1, 0, -1}), numeric_domain_error);
    CHECK_THROWS_AS(project_radial(SurfaceKind::Hyperbolic, {2, 0, 1}), numeric_domain_error);
}

TEST_CASE("SurfacePoint constructor renormalizes within tolerance, rejects beyond") {
    // residual 1e-10: accepted and projected back onto the sphere
    const SurfacePoint p(SurfaceKind::Sphere, {0, 0, 1.0 + 5e-11});
    CHECK(std::fabs(dot(p.r, p.r) - 1.0) < 1e-15);
    CHECK_THROWS_AS(SurfacePoint(SurfaceKind::Sphere, Vec3{0, 0, 1.1}), numeric_domain_error);
    CHECK_THROWS_AS(SurfacePoint(SurfaceKind::Euclidean, Vec3{0, 0, 0.9}), numeric_domain_error);
}

TEST_CASE("oriented normal completes a positively oriented frame") {
    std::mt19937_64 eng(17);
    for (SurfaceKind k : kAll)
        for (int i = 0; i < 100; ++i) {
            const SurfacePoint X = random_point(k, eng);
            const TangentVector T = random_unit_tangent(X, eng);
            const TangentVector N = oriented_normal(X, T);
            CHECK(std::fabs(metric_inner(k, N.u, N.u) - 1.0) < 1e-12);
            CHECK(std::fabs(metric_inner(k, N.u, T.u)) < 1e-12);
            // rotating the normal once more gives -T
            CHECK(norm(oriented_normal(X, N).u + T.u) < 1e-12);
        }
}

TEST_CASE("basepoint_to maps the basepoint and preserves the metric") {
    std::mt19937_64 eng(19);
    for (SurfaceKind k : kAll)
        for (int i = 0; i < 50; ++i) {
            const SurfacePoint c = random_point(k, eng);
            const Mat3 M = basepoint_to(c);
            CHECK(norm(M.apply({0, 0, 1}) - c.r) < 1e-12);
            const SurfacePoint a = random_point(k, eng), b = random_point(k, eng);
            const SurfacePoint ma(k, M.apply(a.r)), mb(k, M.apply(b.r));
            CHECK(std::fabs(geodesic_distance(ma, mb) - geodesic_distance(a, b)) < 1e-9);
        }
}
