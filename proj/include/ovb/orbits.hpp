#pragma once

// Periodic orbits through the variational route: the action
//   W(s_0, ..., s_{n-1}) = sum_i g(s_i, s_{i+1}),   g = -d_S,  s_n = s_0
// on ordered winding-m configurations.  Critical points of W are the
// (m, n) orbits; the cyclic tridiagonal Hessian of W feeds both the Newton
// refinement and the MacKay-Meiss residue identity
//   2 - tr DT^n = (-1)^{n+1} det H / (b_0 b_1 ... b_{n-1}),
// which cross-checks the DT product against the generating-function path.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ovb/billiard.hpp"
#include "ovb/errors.hpp"
#include "ovb/numerics.hpp"
#include "ovb/oval.hpp"
#include "ovb/perturb.hpp"

namespace ovb {

enum class StabilityClass { Hyperbolic, Elliptic, Parabolic };

inline const char* to_string(StabilityClass c) {
    switch (c) {
        case StabilityClass::Hyperbolic: return "hyperbolic";
        case StabilityClass::Elliptic: return "elliptic";
        default: return "parabolic";
    }
}

// Minimal arclength separation of consecutive vertices (the excluded
// collision set).
constexpr double kMinVertexGap = 1e-7;

// An ordered lift of an n-point configuration winding m times around the
// oval: s[0] <= s[i] increasing, s[n-1] < s[0] + m*l.
struct Configuration {
    int n = 0;
    int m = 1;
    std::vector<double> s;
};

inline void validate_configuration(const Oval& oval, const Configuration& c) {
    const double l = oval.length();
    if (c.n < 2 || static_cast<int>(c.s.size()) != c.n)
        throw usage_error("configuration: need n >= 2 lifted vertices");
    if (c.m < 1 || c.m >= c.n) throw usage_error("configuration: winding must satisfy 0 < m < n");
    for (int i = 0; i < c.n; ++i) {
        const double gap = (i + 1 < c.n ? c.s[i + 1] : c.s[0] + c.m * l) - c.s[i];
        if (!(gap >= kMinVertexGap && gap <= l - kMinVertexGap))
            throw numeric_domain_error("configuration: consecutive vertices inside the collision set");
    }
}

namespace detail {

inline std::vector<FramedPoint> config_frames(const Oval& oval, const Configuration& c) {
    std::vector<FramedPoint> f;
    f.reserve(static_cast<std::size_t>(c.n));
    for (int i = 0; i < c.n; ++i) f.push_back(oval.frame_at(c.s[static_cast<std::size_t>(i)]));
    return f;
}

inline std::vector<ChordData> config_chords(const std::vector<FramedPoint>& f) {
    const int n = static_cast<int>(f.size());
    std::vector<ChordData> ch;
    ch.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ch.push_back(chord_from_frames(f[i], f[(i + 1) % n]));
    return ch;
}

}  // namespace detail

inline double action(const Oval& oval, const Configuration& c) {
    validate_configuration(oval, c);
    const auto frames = detail::config_frames(oval, c);
    double W = 0.0;
    for (int i = 0; i < c.n; ++i)
        W -= geodesic_distance(frames[i].point, frames[(i + 1) % c.n].point);
    return W;
}

// dW/ds_i = cos(psi_i out) - cos(psi_i in); zero exactly at billiard orbits.
inline std::vector<double> action_gradient(const Oval& oval, const Configuration& c) {
    validate_configuration(oval, c);
    const auto frames = detail::config_frames(oval, c);
    const auto chords = detail::config_chords(frames);
    std::vector<double> g(static_cast<std::size_t>(c.n));
    for (int i = 0; i < c.n; ++i) {
        const int prev = (i + c.n - 1) % c.n;
        g[static_cast<std::size_t>(i)] =
            std::cos(chords[static_cast<std::size_t>(i)].psi0) -
            std::cos(chords[static_cast<std::size_t>(prev)].psi1);
    }
    return g;
}

struct CyclicHessian {
    int n = 0;
    std::vector<double> diag;   // H_ii
    std::vector<double> b;      // b_i = d^2 g / ds_i ds_{i+1}, one per chord
    std::vector<double> dense;  // n x n row major (off-diagonals accumulate for n = 2)
    double det = 0.0;
};

inline CyclicHessian action_hessian(const Oval& oval, const Configuration& c) {
    validate_configuration(oval, c);
    const auto frames = detail::config_frames(oval, c);
    const auto chords = detail::config_chords(frames);
    const int n = c.n;
    CyclicHessian H;
    H.n = n;
    H.b.resize(static_cast<std::size_t>(n));
    H.dense.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        const int i1 = (i + 1) % n;
        const GenFunHessian h = hessian_from_chord(oval.kind(), chords[static_cast<std::size_t>(i)],
                                                   frames[static_cast<std::size_t>(i)].curvature,
                                                   frames[static_cast<std::size_t>(i1)].curvature);
        // g = -h
        H.dense[static_cast<std::size_t>(i) * n + i] -= h.h00;
        H.dense[static_cast<std::size_t>(i1) * n + i1] -= h.h11;
        H.dense[static_cast<std::size_t>(i) * n + i1] -= h.h01;
        H.dense[static_cast<std::size_t>(i1) * n + i] -= h.h01;
        H.b[static_cast<std::size_t>(i)] = -h.h01;
    }
    H.diag.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) H.diag[static_cast<std::size_t>(i)] = H.dense[static_cast<std::size_t>(i) * n + i];
    H.det = DenseLU(H.dense, n).det();
    return H;
}

namespace detail {

inline double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

inline bool config_feasible(const Configuration& c, double l) {
    for (int i = 0; i < c.n; ++i) {
        const double gap = (i + 1 < c.n ? c.s[static_cast<std::size_t>(i) + 1]
                                        : c.s[0] + c.m * l) -
                           c.s[static_cast<std::size_t>(i)];
        if (!(gap >= kMinVertexGap && gap <= l - kMinVertexGap)) return false;
    }
    return true;
}

}  // namespace detail

// Newton iteration on grad W = 0 with step damping that preserves the
// ordering/winding constraints.  Near-singular Hessians (degenerate orbit
// families) fall back to a ridge-regularized solve and, failing that, to
// plain gradient steps.
inline Configuration newton_refine(const Oval& oval, Configuration c, double tol = 1e-11) {
    validate_configuration(oval, c);
    const double l = oval.length();
    std::vector<double> g = action_gradient(oval, c);
    double gn = detail::inf_norm(g);

    for (int iter = 0; iter < 100; ++iter) {
        if (gn < tol) return c;

        const CyclicHessian H = action_hessian(oval, c);
        std::vector<double> delta;
        bool have_newton = false;
        {
            DenseLU lu(H.dense, H.n);
            double scale = 0.0;
            for (double d : H.diag) scale = std::max(scale, std::fabs(d));
            if (!lu.singular() && lu.min_pivot() > 1e-10 * std::max(1.0, scale)) {
                std::vector<double> rhs(g);
                for (double& v : rhs) v = -v;
                delta = lu.solve(rhs);
                have_newton = true;
            } else {
                // ridge regularization against the flat family direction
                std::vector<double> A = H.dense;
                const double mu = 1e-8 * std::max(1.0, scale);
                for (int i = 0; i < H.n; ++i) A[static_cast<std::size_t>(i) * H.n + i] += mu;
                DenseLU lur(A, H.n);
                if (!lur.singular()) {
                    std::vector<double> rhs(g);
                    for (double& v : rhs) v = -v;
                    delta = lur.solve(rhs);
                    have_newton = true;
                }
            }
        }
        if (!have_newton) {
            delta.assign(g.begin(), g.end());
            const double sc = std::min(0.05 * l, 1.0) / std::max(1.0, detail::inf_norm(g));
            for (double& v : delta) v = -v * sc;
        }

        bool accepted = false;
        double sigma = 1.0;
        for (int halving = 0; halving < 45 && !accepted; ++halving, sigma *= 0.5) {
            Configuration trial = c;
            for (int i = 0; i < c.n; ++i)
                trial.s[static_cast<std::size_t>(i)] += sigma * delta[static_cast<std::size_t>(i)];
            if (!detail::config_feasible(trial, l)) continue;
            std::vector<double> gt;
            try {
                gt = action_gradient(oval, trial);
            } catch (const std::exception&) {
                continue;
            }
            const double gtn = detail::inf_norm(gt);
            if (gtn < gn * (1.0 - 1e-4 * sigma) || gtn < tol) {
                c = std::move(trial);
                g = std::move(gt);
                gn = gtn;
                accepted = true;
            }
        }
        if (!accepted) throw convergence_error("newton_refine: no descent step found");
    }
    if (gn < tol) return c;
    throw convergence_error("newton_refine: did not reach tolerance in 100 iterations");
}

// ---------------------------------------------------------------------------

struct PeriodicOrbit {
    Configuration config;
    std::vector<PhasePoint> points;
    double action = 0.0;
    double grad_norm = 0.0;
    double closure_residual = 0.0;  // next_impact closure over the cycle
    double trace = 0.0;             // tr of the ordered DT product
    double monodromy_det = 0.0;     // must be 1 (sin psi ratios telescope)
    double hessian_det = 0.0;
    StabilityClass cls = StabilityClass::Parabolic;
    bool degenerate_family = false;
    double residue_lhs = 0.0, residue_rhs = 0.0;
};

inline StabilityClass classify(double trace, double band = 1e-8) {
    const double t = std::fabs(trace);
    if (t > 2.0 + band) return StabilityClass::Hyperbolic;
    if (t < 2.0 - band) return StabilityClass::Elliptic;
    return StabilityClass::Parabolic;
}

inline bool nondegenerate(StabilityClass c) { return c != StabilityClass::Parabolic; }

struct ResiduePair {
    double lhs = 0.0;  // 2 - tr DT^n
    double rhs = 0.0;  // (-1)^{n+1} det H / prod b_i
    double rel_discrepancy() const { return std::fabs(lhs - rhs) / std::max(1.0, std::fabs(lhs)); }
};

// Trace of DT(x_{n-1}) ... DT(x_0) and the product determinant.
inline std::pair<double, double> monodromy_trace_det(const Oval& oval,
                                                     const std::vector<PhasePoint>& pts) {
    double m[4] = {1, 0, 0, 1};
    for (const PhasePoint& x : pts) {
        const JacobianMatrix J = dt_matrix(oval, x);
        const double a = J.a * m[0] + J.b * m[2];
        const double b = J.b * m[3] + J.a * m[1];
        const double c = J.c * m[0] + J.e * m[2];
        const double e = J.c * m[1] + J.e * m[3];
        m[0] = a; m[1] = b; m[2] = c; m[3] = e;
    }
    return {m[0] + m[3], m[0] * m[3] - m[1] * m[2]};
}

inline double orbit_trace(const Oval& oval, const PeriodicOrbit& orbit) {
    return monodromy_trace_det(oval, orbit.points).first;
}

inline ResiduePair mackay_meiss_residue(const Oval& oval, const PeriodicOrbit& orbit) {
    const CyclicHessian H = action_hessian(oval, orbit.config);
    double prod = 1.0;
    for (double bi : H.b) {
        if (std::fabs(bi) < 1e-12)
            throw twist_degeneracy_error("mackay_meiss_residue: vanishing twist coupling b_i");
        prod *= bi;
    }
    ResiduePair r;
    r.lhs = 2.0 - orbit.trace;
    r.rhs = ((orbit.config.n % 2 == 0) ? -1.0 : 1.0) * H.det / prod;
    return r;
}

// Builds the full orbit record from a refined configuration.
inline PeriodicOrbit make_orbit(const Oval& oval, const Configuration& c) {
    PeriodicOrbit o;
    o.config = c;
    const double l = oval.length();
    const auto frames = detail::config_frames(oval, c);
    const auto chords = detail::config_chords(frames);
    o.points.resize(static_cast<std::size_t>(c.n));
    for (int i = 0; i < c.n; ++i)
        o.points[static_cast<std::size_t>(i)] = {wrap_periodic(c.s[static_cast<std::size_t>(i)], l),
                                                 chords[static_cast<std::size_t>(i)].psi0};
    o.action = action(oval, c);
    o.grad_norm = detail::inf_norm(action_gradient(oval, c));

    double closure = 0.0;
    for (int i = 0; i < c.n; ++i) {
        const PhasePoint y = next_impact(oval, o.points[static_cast<std::size_t>(i)]);
        const PhasePoint& z = o.points[static_cast<std::size_t>((i + 1) % c.n)];
        closure = std::max(closure, wrap_distance(y.s, z.s, l));
        closure = std::max(closure, std::fabs(y.psi - z.psi));
    }
    o.closure_residual = closure;

    const auto [tr, det] = monodromy_trace_det(oval, o.points);
    o.trace = tr;
    o.monodromy_det = det;
    o.cls = classify(tr);
    o.degenerate_family = (o.cls == StabilityClass::Parabolic);
    const CyclicHessian H = action_hessian(oval, c);
    o.hessian_det = H.det;
    try {
        const ResiduePair r = mackay_meiss_residue(oval, o);
        o.residue_lhs = r.lhs;
        o.residue_rhs = r.rhs;
    } catch (const twist_degeneracy_error&) {
        o.residue_lhs = 2.0 - tr;
        o.residue_rhs = std::numeric_limits<double>::quiet_NaN();
    }
    return o;
}

namespace detail {

// Same geometric polygon up to a cyclic relabeling of the vertices.
inline bool same_orbit(const Configuration& a, const Configuration& b, double l, double tol = 1e-6) {
    if (a.n != b.n || a.m != b.m) return false;
    for (int r = 0; r < a.n; ++r) {
        double worst = 0.0;
        for (int i = 0; i < a.n; ++i) {
            worst = std::max(worst, wrap_distance(a.s[static_cast<std::size_t>(i)],
                                                  b.s[static_cast<std::size_t>((i + r) % a.n)], l));
            if (worst >= tol) break;
        }
        if (worst < tol) return true;
    }
    return false;
}

// Rotate the lift so it starts at the vertex with the smallest reduced
// arclength; keeps deduplication and reports deterministic.
inline Configuration canonical_config(const Configuration& c, double l) {
    const int n = c.n;
    std::vector<double> gaps(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        gaps[static_cast<std::size_t>(i)] =
            (i + 1 < n ? c.s[static_cast<std::size_t>(i) + 1] : c.s[0] + c.m * l) -
            c.s[static_cast<std::size_t>(i)];
    std::vector<double> red(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) red[static_cast<std::size_t>(i)] = wrap_periodic(c.s[static_cast<std::size_t>(i)], l);
    const int start = static_cast<int>(std::min_element(red.begin(), red.end()) - red.begin());
    Configuration out;
    out.n = n;
    out.m = c.m;
    out.s.resize(static_cast<std::size_t>(n));
    out.s[0] = red[static_cast<std::size_t>(start)];
    for (int i = 1; i < n; ++i)
        out.s[static_cast<std::size_t>(i)] =
            out.s[static_cast<std::size_t>(i) - 1] + gaps[static_cast<std::size_t>((start + i - 1) % n)];
    return out;
}

}  // namespace detail

// Multi-start search for Birkhoff orbits of type (m, n): uniform seeds plus
// jitter, Newton refinement, canonicalization and deduplication.  Orbits of a
// degenerate family (the circle) collapse to one representative, matched by
// their common action value.  Failed seeds are skipped, never fatal.
inline std::vector<PeriodicOrbit> find_birkhoff(const Oval& oval, int m, int n, int seeds,
                                                std::uint64_t rng_seed = 0) {
    if (n < 2 || m < 1 || m >= n || std::gcd(m, n) != 1)
        throw usage_error("find_birkhoff: need coprime 0 < m < n");
    if (seeds < 1) throw usage_error("find_birkhoff: seeds must be positive");

    const double l = oval.length();
    std::mt19937_64 eng(rng_seed);
    std::vector<PeriodicOrbit> found;

    for (int j = 0; j < seeds; ++j) {
        Configuration c;
        c.n = n;
        c.m = m;
        c.s.resize(static_cast<std::size_t>(n));
        const double base = (j + 0.5 * uniform01(eng)) * l / seeds;
        for (int i = 0; i < n; ++i)
            c.s[static_cast<std::size_t>(i)] =
                base + i * m * l / n + (uniform01(eng) - 0.5) * 0.1 * l / n;

        Configuration refined;
        try {
            refined = newton_refine(oval, c);
        } catch (const std::exception&) {
            continue;
        }
        refined = detail::canonical_config(refined, l);

        bool duplicate = false;
        for (const PeriodicOrbit& o : found)
            if (detail::same_orbit(o.config, refined, l)) {
                duplicate = true;
                break;
            }
        if (duplicate) continue;

        PeriodicOrbit orbit;
        try {
            orbit = make_orbit(oval, refined);
        } catch (const std::exception&) {
            continue;
        }
        if (orbit.closure_residual > 1e-9) continue;

        if (orbit.cls == StabilityClass::Parabolic) {
            // member of a degenerate family already represented?
            bool merged = false;
            for (PeriodicOrbit& o : found)
                if (o.cls == StabilityClass::Parabolic &&
                    std::fabs(o.action - orbit.action) < 1e-7 * std::max(1.0, std::fabs(o.action))) {
                    o.degenerate_family = true;
                    merged = true;
                    break;
                }
            if (merged) continue;
        }
        found.push_back(std::move(orbit));
    }

    std::sort(found.begin(), found.end(), [](const PeriodicOrbit& a, const PeriodicOrbit& b) {
        if (a.action != b.action) return a.action < b.action;
        return a.config.s[0] < b.config.s[0];
    });
    return found;
}

// ---------------------------------------------------------------------------
// Compact strip bound

struct StripBound {
    int n = 0;
    double delta = 0.0;
    int m0 = 0;       // sphere only
    double area = 0.0;  // sphere only
};

inline StripBound strip_bound(const Oval& oval, int n) {
    if (n < 2) throw usage_error("strip_bound: n must be at least 2");
    const double pi = std::acos(-1.0);
    StripBound b;
    b.n = n;
    if (oval.kind() != SurfaceKind::Sphere) {
        b.delta = pi / n;
        return b;
    }
    b.area = oval.enclosed_area();
    if (!(b.area < 2.0 * pi))
        throw numeric_domain_error("strip_bound: enclosed area reaches the hemisphere bound");
    // smallest integer with m0 > n and m0 > pi*n / (2*pi - area), strictly
    const double v = pi * n / (2.0 * pi - b.area);
    int m0 = static_cast<int>(std::floor(v)) + 1;
    m0 = std::max(m0, n + 1);
    b.m0 = m0;
    b.delta = pi / m0;
    return b;
}

inline bool strip_check(const PeriodicOrbit& orbit, const StripBound& bound) {
    const double pi = std::acos(-1.0);
    double maxpsi = 0.0;
    for (const PhasePoint& x : orbit.points) maxpsi = std::max(maxpsi, x.psi);
    return maxpsi >= bound.delta - 1e-9 && maxpsi <= pi - bound.delta + 1e-9;
}

// ---------------------------------------------------------------------------
// Degeneracy-breaking experiment: a bump at one vertex keeps the polygon an
// orbit (lambda and lambda' vanish there) but changes the curvature, moving
// the trace.

struct BreakDegeneracyResult {
    Oval new_oval;
    double old_trace = 0.0;
    double new_trace = 0.0;
    double orbit_residual = 0.0;
    double lambda_c2_norm = 0.0;
    bool moved_off_two = false;
    PeriodicOrbit new_orbit;
};

inline BreakDegeneracyResult break_degeneracy(const Oval& oval, const PeriodicOrbit& orbit,
                                              double width, double amplitude) {
    const double l = oval.length();
    const double s0 = orbit.points.at(0).s;
    for (std::size_t i = 1; i < orbit.points.size(); ++i)
        if (wrap_distance(orbit.points[i].s, s0, l) <= width / 2.0)
            throw usage_error("break_degeneracy: bump support overlaps another orbit vertex");

    const PerturbationProfile profile = bump_profile(oval, s0, width, amplitude);
    Oval beta = normal_perturbation(oval, profile);

    // Re-identify the vertices: the perturbed source is parameterized by the
    // base arclength, so the new arclength of vertex i is the cumulative
    // length at parameter s_i.  The forward gaps rebuild the lift because the
    // arclength map is an orientation-preserving circle diffeomorphism.
    Configuration nc;
    nc.n = orbit.config.n;
    nc.m = orbit.config.m;
    nc.s.resize(orbit.points.size());
    std::vector<double> v(orbit.points.size());
    for (std::size_t i = 0; i < orbit.points.size(); ++i)
        v[i] = beta.arclength_of_param(orbit.points[i].s);
    nc.s[0] = v[0];
    for (std::size_t i = 1; i < v.size(); ++i)
        nc.s[i] = nc.s[i - 1] + wrap_periodic(v[i] - v[i - 1], beta.length());

    BreakDegeneracyResult r{.new_oval = beta};
    r.old_trace = orbit.trace;
    r.lambda_c2_norm = profile.c2_norm();
    r.new_orbit = make_orbit(beta, nc);
    r.new_trace = r.new_orbit.trace;
    r.orbit_residual = r.new_orbit.closure_residual;
    r.moved_off_two = std::fabs(std::fabs(r.new_trace) - 2.0) > 1e-4;
    return r;
}

}  // namespace ovb
