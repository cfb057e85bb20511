#pragma once

// Boundary ovals: closed, simple, strictly convex curves on one of the three
// model surfaces, reparameterized by arclength.
//
// Curves are specified by a radial graph rho(theta) in geodesic polar
// coordinates about a center, evaluated through the charts
//   E^2: (rho cos t, rho sin t, 1)
//   S^2: (sin rho cos t, sin rho sin t, cos rho)
//   H^2: (sinh rho cos t, sinh rho sin t, cosh rho)
// composed with the ambient isometry that moves the basepoint to the center.
// The arclength map is a cumulative Simpson table over a fine parameter grid;
// point queries invert it with a guarded Newton iteration so that positions
// and frames are accurate to machine precision (a plain interpolated table
// is not accurate enough to survive the finite-difference oracles downstream).

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ovb/errors.hpp"
#include "ovb/geometry.hpp"
#include "ovb/numerics.hpp"

namespace ovb {

// ---------------------------------------------------------------------------
// Curve families

struct CircleFamily {
    double radius = 1.0;  // geodesic radius
};

// Euclidean ellipse with semi-axes a, b, encoded as the radial graph
// rho(theta) = ab / sqrt(b^2 cos^2 + a^2 sin^2).  Euclidean surface only.
struct EllipseFamily {
    double a = 1.0, b = 1.0;
};

// rho(theta) = c0 + sum_j (a_j cos(j theta) + b_j sin(j theta)), j = 1,2,...
struct PolarFamily {
    double c0 = 1.0;
    std::vector<std::pair<double, double>> coeffs;
};

using CurveFamily = std::variant<CircleFamily, EllipseFamily, PolarFamily>;

struct OvalSpec {
    SurfaceKind kind = SurfaceKind::Euclidean;
    CurveFamily family = CircleFamily{};
    std::optional<SurfacePoint> center;  // defaults to the model basepoint
};

namespace detail {

// rho(theta) and three derivatives.
inline void radial_eval(const CurveFamily& fam, double theta, double out[4]) {
    if (const auto* c = std::get_if<CircleFamily>(&fam)) {
        out[0] = c->radius;
        out[1] = out[2] = out[3] = 0.0;
        return;
    }
    if (const auto* e = std::get_if<EllipseFamily>(&fam)) {
        const double a2 = e->a * e->a, b2 = e->b * e->b;
        const double st = std::sin(theta), s2t = std::sin(2 * theta), c2t = std::cos(2 * theta);
        const double w = b2 + (a2 - b2) * st * st;
        const double w1 = (a2 - b2) * s2t;
        const double w2 = 2.0 * (a2 - b2) * c2t;
        const double w3 = -4.0 * (a2 - b2) * s2t;
        const double u = 1.0 / std::sqrt(w);
        const double u3 = u * u * u, u5 = u3 * u * u, u7 = u5 * u * u;
        const double ab = e->a * e->b;
        out[0] = ab * u;
        out[1] = ab * (-0.5 * u3 * w1);
        out[2] = ab * (0.75 * u5 * w1 * w1 - 0.5 * u3 * w2);
        out[3] = ab * (-1.875 * u7 * w1 * w1 * w1 + 2.25 * u5 * w1 * w2 - 0.5 * u3 * w3);
        return;
    }
    const auto& p = std::get<PolarFamily>(fam);
    double r = p.c0, r1 = 0.0, r2 = 0.0, r3 = 0.0;
    for (std::size_t j = 1; j <= p.coeffs.size(); ++j) {
        const double a = p.coeffs[j - 1].first, b = p.coeffs[j - 1].second;
        const double jj = static_cast<double>(j);
        const double c = std::cos(jj * theta), s = std::sin(jj * theta);
        r += a * c + b * s;
        r1 += jj * (-a * s + b * c);
        r2 += jj * jj * (-a * c - b * s);
        r3 += jj * jj * jj * (a * s - b * c);
    }
    out[0] = r; out[1] = r1; out[2] = r2; out[3] = r3;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Parameterized curve sources

// A closed curve t -> x(t) with ambient derivatives, t in [0, period).
class CurveSource {
public:
    virtual ~CurveSource() = default;
    virtual double period() const = 0;
    virtual bool has_third_derivative() const = 0;
    // Any output pointer may be null; d3 may be requested only when
    // has_third_derivative() is true.
    virtual void eval(double t, Vec3* x, Vec3* d1, Vec3* d2, Vec3* d3) const = 0;
};

namespace detail {

class RadialChartSource final : public CurveSource {
public:
    RadialChartSource(SurfaceKind kind, CurveFamily fam, const Mat3& M)
        : kind_(kind), fam_(std::move(fam)), M_(M) {}

    double period() const override { return 2.0 * std::acos(-1.0); }
    bool has_third_derivative() const override { return true; }

    void eval(double t, Vec3* x, Vec3* d1, Vec3* d2, Vec3* d3) const override {
        double r[4];
        radial_eval(fam_, t, r);

        // Radial pair: the chart point is (f(rho) cos t, f(rho) sin t, g(rho)).
        // df[i] holds the i-th derivative of f at rho(t), likewise dg.
        double df[4], dg[4];
        switch (kind_) {
            case SurfaceKind::Euclidean:
                df[0] = r[0]; df[1] = 1.0; df[2] = 0.0; df[3] = 0.0;
                dg[0] = 1.0; dg[1] = 0.0; dg[2] = 0.0; dg[3] = 0.0;
                break;
            case SurfaceKind::Sphere: {
                const double s = std::sin(r[0]), c = std::cos(r[0]);
                df[0] = s; df[1] = c; df[2] = -s; df[3] = -c;
                dg[0] = c; dg[1] = -s; dg[2] = -c; dg[3] = s;
                break;
            }
            default: {
                const double s = std::sinh(r[0]), c = std::cosh(r[0]);
                df[0] = s; df[1] = c; df[2] = s; df[3] = c;
                dg[0] = c; dg[1] = s; dg[2] = c; dg[3] = s;
                break;
            }
        }
        // Total theta-derivatives via the chain rule along rho(theta).
        double f[4], g[4];
        chain(df, r, f);
        chain(dg, r, g);

        const double ct = std::cos(t), st = std::sin(t);
        if (x) *x = M_.apply({f[0] * ct, f[0] * st, g[0]});
        if (d1)
            *d1 = M_.apply({f[1] * ct - f[0] * st, f[1] * st + f[0] * ct, g[1]});
        if (d2)
            *d2 = M_.apply({f[2] * ct - 2 * f[1] * st - f[0] * ct,
                            f[2] * st + 2 * f[1] * ct - f[0] * st, g[2]});
        if (d3)
            *d3 = M_.apply({f[3] * ct - 3 * f[2] * st - 3 * f[1] * ct + f[0] * st,
                            f[3] * st + 3 * f[2] * ct - 3 * f[1] * st - f[0] * ct, g[3]});
    }

private:
    static void chain(const double dF[4], const double r[4], double F[4]) {
        F[0] = dF[0];
        F[1] = dF[1] * r[1];
        F[2] = dF[2] * r[1] * r[1] + dF[1] * r[2];
        F[3] = dF[3] * r[1] * r[1] * r[1] + 3.0 * dF[2] * r[1] * r[2] + dF[1] * r[3];
    }

    SurfaceKind kind_;
    CurveFamily fam_;
    Mat3 M_;
};

}  // namespace detail

// ---------------------------------------------------------------------------

struct FramedPoint {
    double s = 0.0;
    SurfacePoint point;
    TangentVector tangent;  // unit
    TangentVector normal;   // inward for the counterclockwise curve
    double curvature = 0.0;
};

struct OvalCertificate {
    double min_curvature = 0.0;
    bool is_simple = false;
    bool is_closed = false;
    bool hemisphere_ok = true;           // trivially true off the sphere
    double max_center_distance = 0.0;    // sphere only

    bool ok() const { return min_curvature > 0.0 && is_simple && is_closed && hemisphere_ok; }
    std::string failure() const {
        if (!is_closed) return "closed";
        if (!(min_curvature > 0.0)) return "strictly positive curvature";
        if (!is_simple) return "simple";
        if (!hemisphere_ok) return "open hemisphere";
        return {};
    }
};

class Oval {
public:
    static Oval build(const OvalSpec& spec, int resolution = 2048);
    static Oval from_source(std::shared_ptr<const CurveSource> source, SurfaceKind kind,
                            const SurfacePoint& center, int resolution,
                            std::optional<OvalSpec> spec = std::nullopt);

    SurfaceKind kind() const { return d_->kind; }
    double length() const { return d_->length; }
    int resolution() const { return d_->resolution; }
    const SurfacePoint& center() const { return d_->center; }
    const OvalCertificate& certificate() const { return d_->cert; }
    double enclosed_area() const { return d_->area; }
    const std::optional<OvalSpec>& spec() const { return d_->spec; }
    const std::shared_ptr<const CurveSource>& source() const { return d_->source; }
    double source_period() const { return d_->period; }

    SurfacePoint position(double s) const {
        Vec3 x;
        d_->source->eval(param_of_arclength(s), &x, nullptr, nullptr, nullptr);
        return SurfacePoint(d_->kind, x);
    }

    TangentVector tangent(double s) const { return frame_at(s).tangent; }
    TangentVector normal(double s) const { return frame_at(s).normal; }
    double curvature(double s) const { return curvature_at_param(param_of_arclength(s)); }

    FramedPoint frame_at(double s) const {
        FramedPoint f = frame_at_param(param_of_arclength(s));
        f.s = wrap_periodic(s, d_->length);
        return f;
    }

    double curvature_derivative(double s) const {
        return curvature_derivative_at_param(param_of_arclength(s));
    }

    // Inverse pair between the source parameter and arclength.
    double param_of_arclength(double s) const;
    double arclength_of_param(double t) const;

    // Precomputed positions on the uniform arclength grid used by the impact
    // solver: u_j = j * length / scan_size().
    int scan_size() const { return d_->scan_n; }
    double scan_arclength(int j) const { return d_->length * j / d_->scan_n; }
    const Vec3& scan_position(int j) const { return d_->scan_pos[static_cast<std::size_t>(j)]; }

    // Frame computed directly at a source parameter (no arclength inversion);
    // the s field of the result is left at zero.
    FramedPoint frame_at_param(double t) const;
    double curvature_at_param(double t) const;
    double curvature_derivative_at_param(double t) const;

private:
    struct Data {
        SurfaceKind kind;
        SurfacePoint center;
        std::shared_ptr<const CurveSource> source;
        int resolution = 0;
        double period = 0.0;
        double length = 0.0;
        int table_n = 0;
        std::vector<double> cumlen;  // size table_n + 1
        int scan_n = 0;
        std::vector<Vec3> scan_pos;
        OvalCertificate cert;
        double area = 0.0;
        std::optional<OvalSpec> spec;
    };

    explicit Oval(std::shared_ptr<const Data> d) : d_(std::move(d)) {}

    double speed_at(double t) const {
        Vec3 d1;
        d_->source->eval(t, nullptr, &d1, nullptr, nullptr);
        return std::sqrt(metric_inner(d_->kind, d1, d1));
    }

    // Arclength accumulated over [a, b] within one table interval.
    double partial_len(double a, double b) const {
        return integrate_simpson([this](double t) { return speed_at(t); }, a, b, 2);
    }

    std::shared_ptr<const Data> d_;

    static OvalCertificate compute_certificate(const Data& d);
    static double compute_area(const Data& d, const Oval& view);
};

// ---------------------------------------------------------------------------
// Implementation

inline FramedPoint Oval::frame_at_param(double t) const {
    Vec3 x, d1, d2;
    d_->source->eval(t, &x, &d1, &d2, nullptr);
    const SurfaceKind K = d_->kind;
    const double v = std::sqrt(metric_inner(K, d1, d1));
    const Vec3 T = d1 / v;
    const double vt = metric_inner(K, d2, d1) / v;
    const Vec3 pss = d2 / (v * v) - d1 * (vt / (v * v * v));
    FramedPoint f;
    f.point = SurfacePoint(K, x);
    f.tangent = TangentVector(f.point, T);
    const Vec3 N = oriented_normal_vector(f.point, f.tangent.u);
    f.normal = TangentVector(f.point, N);
    f.curvature = metric_inner(K, pss, f.normal.u);
    return f;
}

inline double Oval::curvature_at_param(double t) const { return frame_at_param(t).curvature; }

inline double Oval::curvature_derivative_at_param(double t) const {
    const SurfaceKind K = d_->kind;
    if (d_->source->has_third_derivative()) {
        Vec3 x, d1, d2, d3;
        d_->source->eval(t, &x, &d1, &d2, &d3);
        const double v = std::sqrt(metric_inner(K, d1, d1));
        const double vt = metric_inner(K, d2, d1) / v;
        const double vtt = (metric_inner(K, d3, d1) + metric_inner(K, d2, d2)) / v - vt * vt / v;
        const double v3 = v * v * v, v4 = v3 * v, v5 = v4 * v;
        const Vec3 psss = d3 / v3 - d2 * (3.0 * vt / v4) - d1 * (vtt / v4 - 3.0 * vt * vt / v5);
        const SurfacePoint X(K, x);
        const Vec3 T = d1 / v;
        const Vec3 N = oriented_normal_vector(X, T);
        return metric_inner(K, psss, N);  // dk/ds = <P''', eta>
    }
    // Sources without a third derivative (normal perturbations): central
    // difference of k along the parameter, converted by ds = v dt.
    const double dt = 1e-5 * d_->period;
    const double kp = curvature_at_param(t + dt), km = curvature_at_param(t - dt);
    const double ds = partial_len(t - dt, t + dt);
    return (kp - km) / ds;
}

inline double Oval::param_of_arclength(double s) const {
    const Data& d = *d_;
    s = wrap_periodic(s, d.length);
    const auto it = std::upper_bound(d.cumlen.begin(), d.cumlen.end(), s);
    int k = static_cast<int>(it - d.cumlen.begin()) - 1;
    k = std::clamp(k, 0, d.table_n - 1);
    const double h = d.period / d.table_n;
    const double t0 = k * h;
    const double seg = d.cumlen[k + 1] - d.cumlen[k];
    double t = t0 + (s - d.cumlen[k]) / seg * h;
    for (int iter = 0; iter < 6; ++iter) {
        const double A = d.cumlen[k] + partial_len(t0, t);
        const double step = (A - s) / speed_at(t);
        t -= step;
        t = std::clamp(t, t0 - 0.5 * h, t0 + 1.5 * h);
        if (std::fabs(step) < 1e-15 * std::max(1.0, d.period)) break;
    }
    return t;
}

inline double Oval::arclength_of_param(double t) const {
    const Data& d = *d_;
    t = wrap_periodic(t, d.period);
    const double h = d.period / d.table_n;
    int k = std::clamp(static_cast<int>(t / h), 0, d.table_n - 1);
    return wrap_periodic(d.cumlen[k] + partial_len(k * h, t), d.length);
}

inline OvalCertificate Oval::compute_certificate(const Data& d) {
    OvalCertificate cert;
    const Oval view{std::shared_ptr<const Data>(&d, [](const Data*) {})};
    const int n = d.resolution;

    // closed: the source must return to its starting point after one period
    {
        Vec3 x0, x1;
        d.source->eval(0.0, &x0, nullptr, nullptr, nullptr);
        d.source->eval(d.period, &x1, nullptr, nullptr, nullptr);
        cert.is_closed = norm(x1 - x0) <= 1e-9;
    }

    std::vector<Vec3> pts(static_cast<std::size_t>(n));
    double kmin = std::numeric_limits<double>::infinity();
    double dmax = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = d.period * i / n;
        const FramedPoint f = view.frame_at_param(t);
        pts[static_cast<std::size_t>(i)] = f.point.r;
        kmin = std::min(kmin, f.curvature);
        if (d.kind == SurfaceKind::Sphere)
            dmax = std::max(dmax, geodesic_distance(f.point, d.center));
    }
    cert.min_curvature = kmin;
    cert.max_center_distance = dmax;
    if (d.kind == SurfaceKind::Sphere) {
        const double pi = std::acos(-1.0);
        cert.hemisphere_ok = dmax < pi / 2.0 - 1e-6;
    }

    // Simplicity: segment sweep over the construction polyline, in planar
    // coordinates (gnomonic about the center on the sphere, Beltrami-Klein
    // on the hyperboloid) so that each segment is a straight chord.
    std::vector<double> px(pts.size()), py(pts.size());
    {
        const Mat3 M = basepoint_to(d.center);
        const Vec3 e1 = M.apply({1, 0, 0}), e2 = M.apply({0, 1, 0}), c = d.center.r;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const Vec3& p = pts[i];
            switch (d.kind) {
                case SurfaceKind::Euclidean:
                    px[i] = p.x; py[i] = p.y;
                    break;
                case SurfaceKind::Sphere: {
                    const double w = dot(p, c);
                    px[i] = dot(p, e1) / w; py[i] = dot(p, e2) / w;
                    break;
                }
                default: {
                    const double w = -metric_inner(d.kind, p, c);
                    px[i] = metric_inner(d.kind, p, e1) / w;
                    py[i] = metric_inner(d.kind, p, e2) / w;
                    break;
                }
            }
        }
    }
    auto orient = [&](int a, int b, int cix) {
        return (px[b] - px[a]) * (py[cix] - py[a]) - (py[b] - py[a]) * (px[cix] - px[a]);
    };
    cert.is_simple = true;
    for (int i = 0; i < n && cert.is_simple; ++i) {
        const int i1 = (i + 1) % n;
        const double xlo = std::min(px[i], px[i1]), xhi = std::max(px[i], px[i1]);
        const double ylo = std::min(py[i], py[i1]), yhi = std::max(py[i], py[i1]);
        for (int j = i + 2; j < n; ++j) {
            const int j1 = (j + 1) % n;
            if (j1 == i) continue;  // adjacent around the wrap
            if (std::max(px[j], px[j1]) < xlo || std::min(px[j], px[j1]) > xhi ||
                std::max(py[j], py[j1]) < ylo || std::min(py[j], py[j1]) > yhi)
                continue;
            const double o1 = orient(i, i1, j), o2 = orient(i, i1, j1);
            const double o3 = orient(j, j1, i), o4 = orient(j, j1, i1);
            if (((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) &&
                o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) {
                cert.is_simple = false;
                break;
            }
        }
    }
    return cert;
}

inline double Oval::compute_area(const Data& d, const Oval& view) {
    const int panels = 2 * d.resolution;
    if (d.kind == SurfaceKind::Euclidean) {
        auto f = [&](double t) {
            Vec3 x, d1;
            d.source->eval(t, &x, &d1, nullptr, nullptr);
            return 0.5 * (x.x * d1.y - x.y * d1.x);
        };
        return integrate_simpson(f, 0.0, d.period, panels);
    }
    // Gauss-Bonnet: integral of k ds around the curve.
    auto f = [&](double t) {
        Vec3 d1;
        d.source->eval(t, nullptr, &d1, nullptr, nullptr);
        const double v = std::sqrt(metric_inner(d.kind, d1, d1));
        return view.curvature_at_param(t) * v;
    };
    const double total_k = integrate_simpson(f, 0.0, d.period, panels);
    const double twopi = 2.0 * std::acos(-1.0);
    return d.kind == SurfaceKind::Sphere ? twopi - total_k : total_k - twopi;
}

inline Oval Oval::from_source(std::shared_ptr<const CurveSource> source, SurfaceKind kind,
                              const SurfacePoint& center, int resolution,
                              std::optional<OvalSpec> spec) {
    if (resolution < 64) throw usage_error("Oval: resolution must be at least 64");
    auto d = std::make_shared<Data>();
    d->kind = kind;
    d->center = center;
    d->source = std::move(source);
    d->resolution = resolution;
    d->period = d->source->period();
    d->spec = std::move(spec);

    const Oval view{std::shared_ptr<const Data>(d.get(), [](const Data*) {})};

    d->table_n = 8 * resolution;
    d->cumlen.resize(static_cast<std::size_t>(d->table_n) + 1);
    d->cumlen[0] = 0.0;
    const double h = d->period / d->table_n;
    for (int k = 0; k < d->table_n; ++k) {
        double vmin = std::numeric_limits<double>::infinity();
        const double seg = integrate_simpson(
            [&](double t) {
                const double v = view.speed_at(t);
                vmin = std::min(vmin, v);
                return v;
            },
            k * h, (k + 1) * h, 4);
        if (!(vmin > 1e-12)) throw invalid_oval_error("regular", "curve speed vanishes");
        d->cumlen[static_cast<std::size_t>(k) + 1] = d->cumlen[static_cast<std::size_t>(k)] + seg;
    }
    d->length = d->cumlen.back();

    d->cert = compute_certificate(*d);
    if (!d->cert.ok()) throw invalid_oval_error(d->cert.failure());

    d->area = compute_area(*d, view);

    // Impact scan grid on the uniform arclength grid.
    d->scan_n = 4 * resolution;
    d->scan_pos.resize(static_cast<std::size_t>(d->scan_n));
    for (int j = 0; j < d->scan_n; ++j) {
        const double t = view.param_of_arclength(d->length * j / d->scan_n);
        Vec3 x;
        d->source->eval(t, &x, nullptr, nullptr, nullptr);
        d->scan_pos[static_cast<std::size_t>(j)] = x;
    }
    return Oval{std::move(d)};
}

inline Oval Oval::build(const OvalSpec& spec, int resolution) {
    const double pi = std::acos(-1.0);
    if (const auto* c = std::get_if<CircleFamily>(&spec.family)) {
        if (!(c->radius > 0.0)) throw usage_error("build_oval: circle radius must be positive");
        if (spec.kind == SurfaceKind::Sphere && !(c->radius < pi / 2.0))
            throw invalid_oval_error("open hemisphere", "circle radius must be below pi/2");
    } else if (const auto* e = std::get_if<EllipseFamily>(&spec.family)) {
        if (spec.kind != SurfaceKind::Euclidean)
            throw usage_error("build_oval: the ellipse family is Euclidean-only");
        if (!(e->a > 0.0 && e->b > 0.0)) throw usage_error("build_oval: ellipse semi-axes must be positive");
    } else {
        double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
        const int samples = 4 * std::max(resolution, 64);
        for (int i = 0; i < samples; ++i) {
            double out[4];
            detail::radial_eval(spec.family, 2.0 * pi * i / samples, out);
            rmin = std::min(rmin, out[0]);
            rmax = std::max(rmax, out[0]);
        }
        if (!(rmin > 0.0)) throw invalid_oval_error("positive radial function");
        if (spec.kind == SurfaceKind::Sphere && !(rmax < pi / 2.0))
            throw invalid_oval_error("open hemisphere", "radial function reaches pi/2");
    }

    const SurfacePoint center = spec.center.value_or(SurfacePoint::basepoint(spec.kind));
    if (center.kind != spec.kind) throw usage_error("build_oval: center is on a different surface");
    auto src = std::make_shared<detail::RadialChartSource>(spec.kind, spec.family, basepoint_to(center));
    return from_source(std::move(src), spec.kind, center, resolution, spec);
}

// Free-function spellings for the module operations.
inline Oval build_oval(const OvalSpec& spec, int resolution = 2048) { return Oval::build(spec, resolution); }
inline FramedPoint frame_at(const Oval& oval, double s) { return oval.frame_at(s); }
inline double geodesic_curvature(const Oval& oval, double s) { return oval.curvature(s); }
inline const OvalCertificate& oval_certificate(const Oval& oval) { return oval.certificate(); }
inline double enclosed_area(const Oval& oval) { return oval.enclosed_area(); }

}  // namespace ovb
