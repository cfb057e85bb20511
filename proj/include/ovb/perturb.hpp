#pragma once

// Normal perturbations of an oval: beta = Gamma + lambda*eta on the plane,
// (Gamma + lambda*eta)/sqrt(1 + lambda^2) on the sphere and
// (Gamma + lambda*eta)/sqrt(1 - lambda^2) on the hyperboloid, with lambda a
// smooth periodic profile of the base arclength.  The perturbed curve is
// rebuilt as an Oval in its own arclength and revalidated.

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <utility>

#include "ovb/errors.hpp"
#include "ovb/oval.hpp"

namespace ovb {

class PerturbationProfile {
public:
    // eval(s) -> {lambda, lambda', lambda''}; s is taken mod period.
    using Eval = std::function<std::array<double, 3>(double)>;

    PerturbationProfile(Eval eval, double period, double support_center,
                        double support_halfwidth, bool full_support)
        : eval_(std::move(eval)),
          period_(period),
          center_(support_center),
          halfwidth_(support_halfwidth),
          full_(full_support) {
        // C2 norm and max |lambda| by dense sampling of the support
        const int samples = 4096;
        const double lo = full_ ? 0.0 : center_ - halfwidth_;
        const double hi = full_ ? period_ : center_ + halfwidth_;
        for (int i = 0; i <= samples; ++i) {
            const auto v = (*this)(lo + (hi - lo) * i / samples);
            max_abs_ = std::max(max_abs_, std::fabs(v[0]));
            c2_norm_ = std::max({c2_norm_, std::fabs(v[0]), std::fabs(v[1]), std::fabs(v[2])});
        }
    }

    std::array<double, 3> operator()(double s) const { return eval_(wrap_periodic(s, period_)); }

    double period() const { return period_; }
    double c2_norm() const { return c2_norm_; }
    double max_abs() const { return max_abs_; }
    bool full_support() const { return full_; }
    double support_center() const { return center_; }
    double support_halfwidth() const { return halfwidth_; }

    static PerturbationProfile constant(double c, double period) {
        return PerturbationProfile([c](double) { return std::array<double, 3>{c, 0.0, 0.0}; },
                                   period, 0.0, period / 2.0, true);
    }

private:
    Eval eval_;
    double period_;
    double center_, halfwidth_;
    bool full_;
    double c2_norm_ = 0.0, max_abs_ = 0.0;
};

namespace detail {

// C-infinity step: 0 for x<=0, 1 for x>=1, built from exp(-1/x).
// Returns {value, first, second} derivatives.
inline std::array<double, 3> smooth_step(double x) {
    if (x <= 1e-3) return {0.0, 0.0, 0.0};   // exp(-1/x) underflows below this
    if (x >= 1.0 - 1e-3) return {1.0, 0.0, 0.0};
    const double A = std::exp(-1.0 / x);
    const double y = 1.0 - x;
    const double B = std::exp(-1.0 / y);
    const double Ap = A / (x * x);
    const double Bp = -B / (y * y);
    const double App = A * (1.0 / (x * x * x * x) - 2.0 / (x * x * x));
    const double Bpp = B * (1.0 / (y * y * y * y) - 2.0 / (y * y * y));
    const double S = A + B, Sp = Ap + Bp, Spp = App + Bpp;
    const double N = Ap * B - A * Bp;
    const double Np = App * B - A * Bpp;
    const double g = A / S;
    const double gp = N / (S * S);
    const double gpp = Np / (S * S) - 2.0 * N * Sp / (S * S * S);
    return {g, gp, gpp};
}

// Plateau in the distance u >= 0 from the bump center: 1 for u <= w/4,
// 0 for u >= w/2, smooth in between.
inline std::array<double, 3> plateau(double u, double width) {
    const double q = width / 4.0;
    if (u <= q) return {1.0, 0.0, 0.0};
    if (u >= 2.0 * q) return {0.0, 0.0, 0.0};
    const auto g = smooth_step((2.0 * q - u) / q);
    return {g[0], -g[1] / q, g[2] / (q * q)};
}

}  // namespace detail

// Smooth bump with lambda(s0) = 0, lambda'(s0) = 0, lambda''(s0) = 2*amplitude
// and support inside (s0 - width/2, s0 + width/2):
// lambda(s) = amplitude * (s - s0)^2 * plateau(|s - s0|).
inline PerturbationProfile bump_profile(const Oval& oval, double s0, double width, double amplitude) {
    const double l = oval.length();
    if (!(width > 0.0 && width < l)) throw usage_error("bump_profile: width must be in (0, length)");
    const double sc = wrap_periodic(s0, l);
    auto eval = [sc, width, amplitude, l](double s) -> std::array<double, 3> {
        const double d = wrap_signed(s, sc, l);
        const auto p = detail::plateau(std::fabs(d), width);
        const double pd = (d < 0.0 ? -p[1] : p[1]);  // dP/dd, even plateau
        return {amplitude * d * d * p[0],
                amplitude * (2.0 * d * p[0] + d * d * pd),
                amplitude * (2.0 * p[0] + 4.0 * d * pd + d * d * p[2])};
    };
    return PerturbationProfile(std::move(eval), l, sc, width / 2.0, false);
}

namespace detail {

class PerturbedSource final : public CurveSource {
public:
    PerturbedSource(Oval base, PerturbationProfile profile)
        : base_(std::move(base)), profile_(std::move(profile)) {}

    double period() const override { return base_.length(); }
    bool has_third_derivative() const override { return false; }

    void eval(double t, Vec3* x, Vec3* d1, Vec3* d2, Vec3*) const override {
        const FramedPoint f = base_.frame_at(t);
        const auto lam = profile_(t);
        const double L = lam[0], Lp = lam[1], Lpp = lam[2];
        const double k = f.curvature;
        const Vec3& G = f.point.r;
        const Vec3& T = f.tangent.u;
        const Vec3& E = f.normal.u;

        // u = Gamma + lambda*eta and its first two arclength derivatives,
        // using Gamma'' = k*eta (plane), -Gamma + k*eta (sphere),
        // Gamma + k*eta (hyperboloid) and eta' = -k*T.
        const double kp = (d2 != nullptr) ? base_.curvature_derivative(t) : 0.0;
        const Vec3 u = G + L * E;
        const Vec3 u1 = (1.0 - L * k) * T + Lp * E;
        Vec3 u2;
        switch (base_.kind()) {
            case SurfaceKind::Euclidean:
                u2 = -(2.0 * Lp * k + L * kp) * T + (k - L * k * k + Lpp) * E;
                break;
            case SurfaceKind::Sphere:
                u2 = -(1.0 - L * k) * G - (2.0 * Lp * k + L * kp) * T +
                     ((1.0 - L * k) * k + Lpp) * E;
                break;
            default:
                u2 = (1.0 - L * k) * G - (2.0 * Lp * k + L * kp) * T +
                     ((1.0 - L * k) * k + Lpp) * E;
                break;
        }

        if (base_.kind() == SurfaceKind::Euclidean) {
            if (x) *x = u;
            if (d1) *d1 = u1;
            if (d2) *d2 = u2;
            return;
        }
        // Radial normalization back onto the curved model.
        const double sgn = base_.kind() == SurfaceKind::Sphere ? 1.0 : -1.0;
        const double N = std::sqrt(1.0 + sgn * L * L);
        const double Np = sgn * L * Lp / N;
        const double Npp = sgn * (Lp * Lp + L * Lpp) / N - Np * Np / N;
        if (x) *x = u / N;
        if (d1) *d1 = u1 / N - u * (Np / (N * N));
        if (d2)
            *d2 = u2 / N - u1 * (2.0 * Np / (N * N)) +
                  u * (2.0 * Np * Np / (N * N * N) - Npp / (N * N));
    }

private:
    Oval base_;
    PerturbationProfile profile_;
};

}  // namespace detail

inline Oval normal_perturbation(const Oval& oval, const PerturbationProfile& profile) {
    if (std::fabs(profile.period() - oval.length()) > 1e-9 * std::max(1.0, oval.length()))
        throw usage_error("normal_perturbation: profile period does not match the oval length");
    if (oval.kind() == SurfaceKind::Hyperbolic && profile.max_abs() >= 1.0)
        throw numeric_domain_error("normal_perturbation: |lambda| must stay below 1 on the hyperboloid");
    auto src = std::make_shared<detail::PerturbedSource>(oval, profile);
    return Oval::from_source(std::move(src), oval.kind(), oval.center(), oval.resolution());
}

}  // namespace ovb
