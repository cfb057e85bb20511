#pragma once

// Finite-difference oracles and the invariant check suite.  The oracles
// differentiate the geodesic distance composed with the boundary curve
// directly, independent of the analytic chord/Hessian path they are used to
// check.

#include <cmath>
#include <cstdint>
#include <random>

#include "ovb/billiard.hpp"
#include "ovb/numerics.hpp"
#include "ovb/oval.hpp"

namespace ovb {

inline double chord_length(const Oval& oval, double s0, double s1) {
    return geodesic_distance(oval.position(s0), oval.position(s1));
}

// Central finite differences of h(s0, s1) = d_S(Gamma(s0), Gamma(s1)).
inline std::pair<double, double> fd_gen_derivs(const Oval& oval, double s0, double s1) {
    const double h = 1e-6 * std::max(1.0, oval.length());
    return {(chord_length(oval, s0 + h, s1) - chord_length(oval, s0 - h, s1)) / (2 * h),
            (chord_length(oval, s0, s1 + h) - chord_length(oval, s0, s1 - h)) / (2 * h)};
}

inline GenFunHessian fd_gen_hessian(const Oval& oval, double s0, double s1) {
    const double h = 1e-4 * std::max(1.0, oval.length());
    GenFunHessian out;
    const double c = chord_length(oval, s0, s1);
    out.h00 = (chord_length(oval, s0 + h, s1) - 2 * c + chord_length(oval, s0 - h, s1)) / (h * h);
    out.h11 = (chord_length(oval, s0, s1 + h) - 2 * c + chord_length(oval, s0, s1 - h)) / (h * h);
    out.h01 = (chord_length(oval, s0 + h, s1 + h) - chord_length(oval, s0 + h, s1 - h) -
               chord_length(oval, s0 - h, s1 + h) + chord_length(oval, s0 - h, s1 - h)) /
              (4 * h * h);
    return out;
}

// Central finite-difference Jacobian of the billiard map.
inline JacobianMatrix fd_jacobian(const Oval& oval, const PhasePoint& x) {
    const double l = oval.length();
    const double hs = 1e-6 * std::max(1.0, l);
    const double hp = 1e-6;
    const PhasePoint sp = next_impact(oval, {x.s + hs, x.psi});
    const PhasePoint sm = next_impact(oval, {x.s - hs, x.psi});
    const PhasePoint pp = next_impact(oval, {x.s, x.psi + hp});
    const PhasePoint pm = next_impact(oval, {x.s, x.psi - hp});
    JacobianMatrix J;
    J.a = wrap_signed(sp.s, sm.s, l) / (2 * hs);
    J.c = (sp.psi - sm.psi) / (2 * hs);
    J.b = wrap_signed(pp.s, pm.s, l) / (2 * hp);
    J.e = (pp.psi - pm.psi) / (2 * hp);
    return J;
}

struct Tolerances {
    double gen_first = 1e-6;
    double gen_second = 1e-5;
    double jacobian_rel = 1e-5;
    double det_measure = 1e-8;
    double reversibility = 1e-8;
    double newton = 1e-11;
    double closure = 1e-9;
};

struct CheckResult {
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool pass = true;
};

struct VerifyReport {
    CheckResult gen_first, gen_second, jacobian, det_measure, reversibility;
    double twist_min = 0.0;
    bool twist_pass = true;
    bool all_pass() const {
        return gen_first.pass && gen_second.pass && jacobian.pass && det_measure.pass &&
               reversibility.pass && twist_pass;
    }
};

// Runs the full invariant suite on `samples` random chords / phase points.
inline VerifyReport run_verify_suite(const Oval& oval, int samples, std::uint64_t seed,
                                     const Tolerances& tol = {}) {
    const double pi = std::acos(-1.0);
    const double l = oval.length();
    std::mt19937_64 eng(seed ^ 0x9e3779b97f4a7c15ull);
    VerifyReport rep;
    rep.gen_first.tolerance = tol.gen_first;
    rep.gen_second.tolerance = tol.gen_second;
    rep.jacobian.tolerance = tol.jacobian_rel;
    rep.det_measure.tolerance = tol.det_measure;
    rep.reversibility.tolerance = tol.reversibility;
    rep.twist_min = std::numeric_limits<double>::infinity();

    for (int i = 0; i < samples; ++i) {
        // well-separated random chord
        const double s0 = l * uniform01(eng);
        const double s1 = s0 + l * (0.05 + 0.90 * uniform01(eng));
        const auto [a0, a1] = gen_derivs(oval, s0, s1);
        const auto [f0, f1] = fd_gen_derivs(oval, s0, s1);
        rep.gen_first.max_residual = std::max({rep.gen_first.max_residual,
                                               std::fabs(a0 - f0), std::fabs(a1 - f1)});

        const GenFunHessian ha = gen_hessian(oval, s0, s1);
        const GenFunHessian hf = fd_gen_hessian(oval, s0, s1);
        rep.gen_second.max_residual = std::max({rep.gen_second.max_residual,
                                                std::fabs(ha.h00 - hf.h00),
                                                std::fabs(ha.h01 - hf.h01),
                                                std::fabs(ha.h11 - hf.h11)});

        // phase point kept away from the tangential edges for the FD stencil
        const PhasePoint x{l * uniform01(eng), 0.1 + (pi - 0.2) * uniform01(eng)};
        const auto [y, J] = map_with_jacobian(oval, x);
        const JacobianMatrix Jf = fd_jacobian(oval, x);
        auto rel = [](double num, double ref) { return std::fabs(num - ref) / std::max(1.0, std::fabs(ref)); };
        rep.jacobian.max_residual = std::max({rep.jacobian.max_residual, rel(Jf.a, J.a),
                                              rel(Jf.b, J.b), rel(Jf.c, J.c), rel(Jf.e, J.e)});

        rep.det_measure.max_residual = std::max(
            rep.det_measure.max_residual, std::fabs(J.det() - std::sin(x.psi) / std::sin(y.psi)));
        rep.twist_min = std::min(rep.twist_min, J.b);

        // I o T o I o T = identity
        const PhasePoint t1 = next_impact(oval, x);
        const PhasePoint t2 = next_impact(oval, {t1.s, pi - t1.psi});
        rep.reversibility.max_residual =
            std::max({rep.reversibility.max_residual, wrap_distance(t2.s, x.s, l),
                      std::fabs((pi - t2.psi) - x.psi)});
    }

    rep.gen_first.pass = rep.gen_first.max_residual < tol.gen_first;
    rep.gen_second.pass = rep.gen_second.max_residual < tol.gen_second;
    rep.jacobian.pass = rep.jacobian.max_residual < tol.jacobian_rel;
    rep.det_measure.pass = rep.det_measure.max_residual < tol.det_measure;
    rep.reversibility.pass = rep.reversibility.max_residual < tol.reversibility;
    rep.twist_pass = rep.twist_min > 0.0;
    return rep;
}

}  // namespace ovb
