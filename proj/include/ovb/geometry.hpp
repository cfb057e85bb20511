#pragma once

// Ambient-model geometry of the three unit-curvature surfaces:
//   Euclidean   E^2 : the plane {z = 1} in R^3
//   Sphere      S^2+: the unit sphere, restricted downstream to z > 0
//   Hyperbolic  H^2+: the upper sheet {x^2+y^2-z^2 = -1, z >= 1} in R^{2,1}
// Geodesics are the intersections of the surface with planes through the
// origin, which is what the impact solver exploits.

#include <cmath>
#include <string>

#include "ovb/errors.hpp"
#include "ovb/vec3.hpp"

namespace ovb {

enum class SurfaceKind { Euclidean, Sphere, Hyperbolic };

inline const char* to_string(SurfaceKind k) {
    switch (k) {
        case SurfaceKind::Euclidean: return "euclidean";
        case SurfaceKind::Sphere: return "sphere";
        default: return "hyperbolic";
    }
}

// Ambient pairing: R^3 dot product on E^2 and S^2+, the R^{2,1} form with
// signature (+,+,-) on H^2+.
inline double metric_inner(SurfaceKind kind, const Vec3& u, const Vec3& v) {
    const double planar = u.x * v.x + u.y * v.y;
    return kind == SurfaceKind::Hyperbolic ? planar - u.z * v.z : planar + u.z * v.z;
}

namespace detail {

// Residual of the defining constraint of each model surface.
inline double surface_residual(SurfaceKind kind, const Vec3& r) {
    switch (kind) {
        case SurfaceKind::Euclidean: return std::fabs(r.z - 1.0);
        case SurfaceKind::Sphere: return std::fabs(dot(r, r) - 1.0);
        default: return std::fabs(r.x * r.x + r.y * r.y - r.z * r.z + 1.0);
    }
}

constexpr double kConstraintSlack = 1e-9;

}  // namespace detail

struct SurfacePoint {
    SurfaceKind kind = SurfaceKind::Euclidean;
    Vec3 r{0.0, 0.0, 1.0};

    SurfacePoint() = default;

    // Renormalizes onto the model when the constraint residual is within
    // 1e-9, rejects otherwise.  On the sphere the full sphere is accepted
    // here; the open-hemisphere restriction is enforced by the oval layer.
    SurfacePoint(SurfaceKind k, const Vec3& v) : kind(k), r(v) {
        if (detail::surface_residual(k, v) > detail::kConstraintSlack)
            throw numeric_domain_error("SurfacePoint: constraint residual exceeds 1e-9");
        switch (k) {
            case SurfaceKind::Euclidean:
                r.z = 1.0;
                break;
            case SurfaceKind::Sphere:
                r = r / norm(r);
                break;
            case SurfaceKind::Hyperbolic: {
                if (r.z <= 0.0)
                    throw numeric_domain_error("SurfacePoint: hyperbolic point not on the upper sheet");
                const double q = r.z * r.z - r.x * r.x - r.y * r.y;
                r = r / std::sqrt(q);
                break;
            }
        }
    }

    static SurfacePoint basepoint(SurfaceKind k) { return SurfacePoint(k, Vec3{0.0, 0.0, 1.0}); }
};

struct TangentVector {
    SurfacePoint base;
    Vec3 u;

    TangentVector() = default;

    // Projects away a tangency defect of at most 1e-9; larger defects are
    // contract violations.
    TangentVector(const SurfacePoint& at, const Vec3& v) : base(at), u(v) {
        switch (at.kind) {
            case SurfaceKind::Euclidean:
                if (std::fabs(v.z) > detail::kConstraintSlack)
                    throw usage_error("TangentVector: euclidean tangent must have zero z component");
                u.z = 0.0;
                break;
            case SurfaceKind::Sphere: {
                const double c = dot(v, at.r);
                if (std::fabs(c) > detail::kConstraintSlack)
                    throw usage_error("TangentVector: not tangent to the sphere at base");
                u -= c * at.r;
                break;
            }
            case SurfaceKind::Hyperbolic: {
                const double c = metric_inner(at.kind, v, at.r);
                if (std::fabs(c) > detail::kConstraintSlack)
                    throw usage_error("TangentVector: not tangent to the hyperboloid at base");
                u += c * at.r;  // <<X,X>> = -1
                break;
            }
        }
    }

    double length() const { return std::sqrt(metric_inner(base.kind, u, u)); }
};

namespace detail {

inline double clamp_acos_arg(double c, const char* what) {
    if (c > 1.0) {
        if (c > 1.0 + 1e-9) throw numeric_domain_error(std::string(what) + ": argument above 1 beyond tolerance");
        return 1.0;
    }
    if (c < -1.0) {
        if (c < -1.0 - 1e-9) throw numeric_domain_error(std::string(what) + ": argument below -1 beyond tolerance");
        return -1.0;
    }
    return c;
}

inline double clamp_acosh_arg(double c, const char* what) {
    if (c < 1.0) {
        if (c < 1.0 - 1e-9) throw numeric_domain_error(std::string(what) + ": argument below 1 beyond tolerance");
        return 1.0;
    }
    return c;
}

}  // namespace detail

// Geodesic distance d_S(X,Y).
inline double geodesic_distance(const SurfacePoint& X, const SurfacePoint& Y) {
    if (X.kind != Y.kind) throw usage_error("geodesic_distance: points on different surfaces");
    switch (X.kind) {
        case SurfaceKind::Euclidean:
            return norm(X.r - Y.r);
        case SurfaceKind::Sphere:
            return std::acos(detail::clamp_acos_arg(dot(X.r, Y.r), "geodesic_distance"));
        default:
            return std::acosh(detail::clamp_acosh_arg(-metric_inner(X.kind, X.r, Y.r), "geodesic_distance"));
    }
}

// Point at arclength t along the unit-speed geodesic from X with velocity u.
inline SurfacePoint geodesic_point(const SurfacePoint& X, const TangentVector& u, double t) {
    switch (X.kind) {
        case SurfaceKind::Euclidean:
            return SurfacePoint(X.kind, X.r + t * u.u);
        case SurfaceKind::Sphere:
            return SurfacePoint(X.kind, std::cos(t) * X.r + std::sin(t) * u.u);
        default:
            return SurfacePoint(X.kind, std::cosh(t) * X.r + std::sinh(t) * u.u);
    }
}

// Unit tangent tau at X of the oriented geodesic from X to Y, so that
// geodesic_point(X, tau, d_S(X,Y)) = Y.
inline TangentVector unit_tangent_toward(const SurfacePoint& X, const SurfacePoint& Y) {
    const double d = geodesic_distance(X, Y);
    if (d <= 1e-12) throw degenerate_chord_error("unit_tangent_toward: coincident points");
    Vec3 u;
    switch (X.kind) {
        case SurfaceKind::Euclidean:
            u = (Y.r - X.r) / d;
            break;
        case SurfaceKind::Sphere:
            u = (Y.r - std::cos(d) * X.r) / std::sin(d);
            break;
        default:
            u = (Y.r - std::cosh(d) * X.r) / std::sinh(d);
            break;
    }
    TangentVector tau(X, u);
    tau.u = tau.u / tau.length();
    return tau;
}

// Angle in [0,pi] between two unit tangent vectors at the same base point.
inline double angle_between(const TangentVector& u, const TangentVector& v) {
    if (u.base.kind != v.base.kind || norm(u.base.r - v.base.r) > 1e-9)
        throw usage_error("angle_between: vectors based at different points");
    if (std::fabs(u.length() - 1.0) > 1e-6 || std::fabs(v.length() - 1.0) > 1e-6)
        throw usage_error("angle_between: vectors must be unit");
    return std::acos(detail::clamp_acos_arg(metric_inner(u.base.kind, u.u, v.u), "angle_between"));
}

// Unique positive multiple of w on the model surface.
inline SurfacePoint project_radial(SurfaceKind kind, const Vec3& w) {
    switch (kind) {
        case SurfaceKind::Euclidean:
            if (w.z <= 0.0) throw numeric_domain_error("project_radial: euclidean input needs w.z > 0");
            return SurfacePoint(kind, Vec3{w.x / w.z, w.y / w.z, 1.0});
        case SurfaceKind::Sphere: {
            const double n = norm(w);
            if (n == 0.0) throw numeric_domain_error("project_radial: zero vector");
            return SurfacePoint(kind, w / n);
        }
        default: {
            const double q = w.z * w.z - w.x * w.x - w.y * w.y;
            if (q <= 0.0 || w.z <= 0.0)
                throw numeric_domain_error("project_radial: input not inside the forward light cone");
            return SurfacePoint(kind, w / std::sqrt(q));
        }
    }
}

// Rotation of a unit tangent T at X by +90 degrees in the surface
// orientation, i.e. the unique unit normal N with {T, N} positively
// oriented.  For a counterclockwise boundary curve this normal points
// inward.
inline Vec3 oriented_normal_vector(const SurfacePoint& X, const Vec3& T) {
    switch (X.kind) {
        case SurfaceKind::Euclidean:
            return {-T.y, T.x, 0.0};
        case SurfaceKind::Sphere:
            return cross(X.r, T);
        default: {
            const Vec3 c = cross(X.r, T);
            return {c.x, c.y, -c.z};  // index lowered by the (+,+,-) form
        }
    }
}

inline TangentVector oriented_normal(const SurfacePoint& X, const TangentVector& T) {
    return TangentVector(X, oriented_normal_vector(X, T.u));
}

// Ambient isometry taking the model basepoint (0,0,1) to `center`:
// a translation shear on E^2, a rotation on S^2+, a boost on H^2+.
inline Mat3 basepoint_to(const SurfacePoint& center) {
    Mat3 M;
    const Vec3 c = center.r;
    switch (center.kind) {
        case SurfaceKind::Euclidean:
            M.m = {1, 0, c.x, 0, 1, c.y, 0, 0, 1};
            return M;
        case SurfaceKind::Sphere: {
            const Vec3 n{0.0, 0.0, 1.0};
            const Vec3 axis = cross(n, c);
            const double s = norm(axis), cang = dot(n, c);
            if (s < 1e-15) {
                if (cang < 0.0) throw usage_error("basepoint_to: antipodal center is outside the hemisphere");
                return M;
            }
            const Vec3 a = axis / s;
            const double C = cang, S = s, V = 1.0 - C;
            M.m = {C + a.x * a.x * V, a.x * a.y * V - a.z * S, a.x * a.z * V + a.y * S,
                   a.y * a.x * V + a.z * S, C + a.y * a.y * V, a.y * a.z * V - a.x * S,
                   a.z * a.x * V - a.y * S, a.z * a.y * V + a.x * S, C + a.z * a.z * V};
            return M;
        }
        default: {
            const double r = std::acosh(detail::clamp_acosh_arg(c.z, "basepoint_to"));
            if (r < 1e-15) return M;
            const double phi = std::atan2(c.y, c.x);
            const double cp = std::cos(phi), sp = std::sin(phi);
            const double ch = std::cosh(r), sh = std::sinh(r);
            const Mat3 rot{{cp, -sp, 0, sp, cp, 0, 0, 0, 1}};
            const Mat3 roti{{cp, sp, 0, -sp, cp, 0, 0, 0, 1}};
            const Mat3 boost{{ch, 0, sh, 0, 1, 0, sh, 0, ch}};
            return mat_mul(rot, mat_mul(boost, roti));
        }
    }
}

}  // namespace ovb
