#pragma once

// The billiard map T on the open cylinder (s, psi) in R/lZ x (0, pi) and its
// generating-function machinery.  The working generating function is
// h(s0, s1) = +d_S(Gamma(s0), Gamma(s1)), for which
//   dh/ds0 = -cos psi0,   dh/ds1 = +cos psi1,
// with cos psi_i = <Gamma'(s_i), tau_i> and tau_i the forward unit tangent of
// the oriented chord geodesic.  The closed-form Jacobian below follows from
// implicit differentiation of these relations and is pinned by the circle,
// whose map is the unit shear [[1,2],[0,1]].

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "ovb/errors.hpp"
#include "ovb/oval.hpp"

namespace ovb {

struct PhasePoint {
    double s = 0.0;
    double psi = 0.0;
};

struct MomentumPoint {
    double s = 0.0;
    double p = 0.0;  // p = -cos psi
};

inline MomentumPoint to_momentum(const PhasePoint& x) { return {x.s, -std::cos(x.psi)}; }

inline PhasePoint from_momentum(const MomentumPoint& m) {
    if (!(std::fabs(m.p) < 1.0)) throw numeric_domain_error("from_momentum: |p| must be below 1");
    return {m.s, std::acos(-m.p)};
}

// Tangential shots are ill-posed; the map accepts psi in [1e-6, pi - 1e-6].
constexpr double kPsiBand = 1e-6;

inline void require_in_band(const PhasePoint& x) {
    const double pi = std::acos(-1.0);
    if (!(x.psi >= kPsiBand && x.psi <= pi - kPsiBand))
        throw whisper_orbit_error("phase point too close to psi = 0 or pi");
}

// ---------------------------------------------------------------------------
// Chord quantities

struct ChordData {
    double d = 0.0;          // geodesic chord length
    double psi0 = 0.0, psi1 = 0.0;
    TangentVector tau0, tau1;  // forward chord tangents at the two endpoints
};

inline ChordData chord_from_frames(const FramedPoint& A, const FramedPoint& B) {
    ChordData c;
    c.d = geodesic_distance(A.point, B.point);
    if (c.d <= 1e-12) throw degenerate_chord_error("chord: coincident endpoints");
    c.tau0 = unit_tangent_toward(A.point, B.point);
    TangentVector back = unit_tangent_toward(B.point, A.point);
    c.tau1 = TangentVector(B.point, -back.u);
    const SurfaceKind K = A.point.kind;
    c.psi0 = std::acos(detail::clamp_acos_arg(metric_inner(K, A.tangent.u, c.tau0.u), "chord psi0"));
    c.psi1 = std::acos(detail::clamp_acos_arg(metric_inner(K, B.tangent.u, c.tau1.u), "chord psi1"));
    return c;
}

inline ChordData chord(const Oval& oval, double s0, double s1) {
    return chord_from_frames(oval.frame_at(s0), oval.frame_at(s1));
}

// First derivatives of h = +d_S along the boundary: (dh/ds0, dh/ds1).
inline std::pair<double, double> gen_derivs(const Oval& oval, double s0, double s1) {
    const ChordData c = chord(oval, s0, s1);
    return {-std::cos(c.psi0), std::cos(c.psi1)};
}

struct GenFunHessian {
    double h00 = 0.0, h01 = 0.0, h11 = 0.0;
};

inline GenFunHessian hessian_from_chord(SurfaceKind kind, const ChordData& c, double k0, double k1) {
    double cot_d, inv_d;  // cos/sin ratio and 1/sin-like factor per model
    switch (kind) {
        case SurfaceKind::Euclidean:
            cot_d = 1.0 / c.d;
            inv_d = 1.0 / c.d;
            break;
        case SurfaceKind::Sphere:
            cot_d = std::cos(c.d) / std::sin(c.d);
            inv_d = 1.0 / std::sin(c.d);
            break;
        default:
            cot_d = std::cosh(c.d) / std::sinh(c.d);
            inv_d = 1.0 / std::sinh(c.d);
            break;
    }
    const double s0 = std::sin(c.psi0), s1 = std::sin(c.psi1);
    GenFunHessian h;
    h.h00 = s0 * s0 * cot_d - k0 * s0;
    h.h11 = s1 * s1 * cot_d - k1 * s1;
    h.h01 = s0 * s1 * inv_d;
    return h;
}

inline GenFunHessian gen_hessian(const Oval& oval, double s0, double s1) {
    const FramedPoint A = oval.frame_at(s0), B = oval.frame_at(s1);
    return hessian_from_chord(oval.kind(), chord_from_frames(A, B), A.curvature, B.curvature);
}

// ---------------------------------------------------------------------------
// The map itself

struct JacobianMatrix {
    double a = 0.0;  // ds1/ds0
    double b = 0.0;  // ds1/dpsi0
    double c = 0.0;  // dpsi1/ds0
    double e = 0.0;  // dpsi1/dpsi0

    double det() const { return a * e - b * c; }
    double trace() const { return a + e; }
};

inline JacobianMatrix jacobian_from_hessian(const GenFunHessian& h, double psi0, double psi1) {
    const double s0 = std::sin(psi0), s1 = std::sin(psi1);
    JacobianMatrix J;
    J.a = -h.h00 / h.h01;
    J.b = s0 / h.h01;
    J.c = (h.h00 * h.h11 - h.h01 * h.h01) / (h.h01 * s1);
    J.e = -h.h11 * s0 / (h.h01 * s1);
    return J;
}

namespace detail {

struct ImpactResult {
    FramedPoint from, to;
    ChordData chord;
};

// Launch the geodesic from Gamma(s0) at angle psi0 toward the inward normal
// and find the next boundary intersection.  The shot geodesic is represented
// by its plane through the origin; the residual along the boundary is the
// ambient dot product with the plane normal, which vanishes exactly at s0 and
// at the sought impact (strict convexity allows no third crossing).
inline ImpactResult solve_impact(const Oval& oval, const PhasePoint& x) {
    require_in_band(x);
    const double l = oval.length();
    const double s0 = wrap_periodic(x.s, l);
    const FramedPoint F0 = oval.frame_at(s0);
    const Vec3 w = std::cos(x.psi) * F0.tangent.u + std::sin(x.psi) * F0.normal.u;
    const Vec3 n = normalized(cross(F0.point.r, w));

    auto residual = [&](double s) { return dot(oval.position(s).r, n); };

    const double window = 1e-7;
    double a = s0 + window;
    double fa = residual(a);
    double b = 0.0, fb = 0.0;
    bool bracketed = false;

    const int M = oval.scan_size();
    const double step = l / M;
    int j = static_cast<int>(std::floor(a / step)) + 1;
    const double send = s0 + l - window;
    for (; j * step < send; ++j) {
        const double u = j * step;
        const double fu = dot(oval.scan_position(j % M), n);
        if (fa * fu <= 0.0) {
            b = u;
            fb = fu;
            bracketed = true;
            break;
        }
        a = u;
        fa = fu;
    }
    if (!bracketed) {
        b = send;
        fb = residual(b);
        if (fa * fb > 0.0)
            throw solver_error("next_impact: no sign change of the chord-plane residual");
    }

    double s1 = brent_root(residual, a, b, fa, fb, 1e-12, 1e-14);
    // Newton polish against the analytic tangent; keeps long iterated runs
    // free of one-sided rounding bias.
    for (int it = 0; it < 2; ++it) {
        const FramedPoint F = oval.frame_at(s1);
        const double fv = dot(F.point.r, n);
        const double fp = dot(F.tangent.u, n);
        if (std::fabs(fp) < 1e-18) break;
        const double news = s1 - fv / fp;
        if (news > a - step && news < b + step) s1 = news;
    }

    ImpactResult r;
    r.from = F0;
    r.from.s = s0;
    r.to = oval.frame_at(s1);
    r.to.s = wrap_periodic(s1, l);
    r.chord = chord_from_frames(r.from, r.to);
    return r;
}

}  // namespace detail

inline PhasePoint next_impact(const Oval& oval, const PhasePoint& x) {
    const auto r = detail::solve_impact(oval, x);
    return {r.to.s, r.chord.psi1};
}

// T and DT at x in one solve.
inline std::pair<PhasePoint, JacobianMatrix> map_with_jacobian(const Oval& oval, const PhasePoint& x) {
    const auto r = detail::solve_impact(oval, x);
    const GenFunHessian h =
        hessian_from_chord(oval.kind(), r.chord, r.from.curvature, r.to.curvature);
    return {{r.to.s, r.chord.psi1}, jacobian_from_hessian(h, r.chord.psi0, r.chord.psi1)};
}

inline JacobianMatrix dt_matrix(const Oval& oval, const PhasePoint& x) {
    return map_with_jacobian(oval, x).second;
}

// T^{-1} = I o T o I with the reversal I(s, psi) = (s, pi - psi).
inline PhasePoint inverse_map(const Oval& oval, const PhasePoint& x) {
    const double pi = std::acos(-1.0);
    const PhasePoint y = next_impact(oval, {x.s, pi - x.psi});
    return {y.s, pi - y.psi};
}

// [x, T(x), ..., T^n(x)]
inline std::vector<PhasePoint> iterate(const Oval& oval, const PhasePoint& x, int n) {
    if (n < 0) throw usage_error("iterate: n must be nonnegative");
    std::vector<PhasePoint> orbit;
    orbit.reserve(static_cast<std::size_t>(n) + 1);
    orbit.push_back({wrap_periodic(x.s, oval.length()), x.psi});
    for (int i = 0; i < n; ++i) {
        try {
            orbit.push_back(next_impact(oval, orbit.back()));
        } catch (const std::exception& ex) {
            throw solver_error("iterate: step " + std::to_string(i + 1) + " failed: " + ex.what());
        }
    }
    return orbit;
}

}  // namespace ovb
