#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "ovb/errors.hpp"

namespace ovb {

// Deterministic uniform double in [0,1).  Avoids std::uniform_real_distribution
// so streams are identical across standard library implementations.
inline double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline double wrap_periodic(double s, double period) {
    double r = s - period * std::floor(s / period);
    if (r >= period) r -= period;
    if (r < 0.0) r += period;
    return r;
}

// Signed distance from b to a on the circle R/period, in (-period/2, period/2].
inline double wrap_signed(double a, double b, double period) {
    double d = wrap_periodic(a - b, period);
    if (d > 0.5 * period) d -= period;
    return d;
}

inline double wrap_distance(double a, double b, double period) {
    return std::fabs(wrap_signed(a, b, period));
}

// Composite Simpson rule with `panels` panels (panels >= 1).
template <class F>
double integrate_simpson(F&& f, double a, double b, int panels) {
    if (b == a) return 0.0;
    const double h = (b - a) / (2 * panels);
    double sum = f(a) + f(b);
    for (int i = 1; i < 2 * panels; ++i) sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

// Brent's method on a bracketing interval.  Requires fa*fb <= 0.  Stops when
// |f| < f_tol or the bracket shrinks below x_tol.
template <class F>
double brent_root(F&& f, double a, double b, double fa, double fb,
                  double f_tol = 1e-12, double x_tol = 1e-14, int max_iter = 200) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw solver_error("brent_root: interval does not bracket a root");

    double c = a, fc = fa, d = b - a, e = d;
    for (int iter = 0; iter < max_iter; ++iter) {
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::fabs(b) + 0.5 * x_tol;
        const double xm = 0.5 * (c - b);
        if (std::fabs(fb) < f_tol || std::fabs(xm) <= tol1 || fb == 0.0) return b;

        if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
            // inverse quadratic / secant step
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc, r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::fabs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::fabs(tol1 * q), std::fabs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::fabs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
        fb = f(b);
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a; fc = fa; d = b - a; e = d;
        }
    }
    return b;
}

// Dense LU factorization with partial pivoting for the small systems that
// appear in the orbit search (n is the orbit period).
class DenseLU {
public:
    // A is n x n row major; consumed by the factorization.
    DenseLU(std::vector<double> A, int n) : a_(std::move(A)), n_(n), piv_(n), singular_(false) {
        double sign = 1.0;
        for (int col = 0; col < n_; ++col) {
            int p = col;
            double best = std::fabs(a_[col * n_ + col]);
            for (int r = col + 1; r < n_; ++r) {
                const double v = std::fabs(a_[r * n_ + col]);
                if (v > best) { best = v; p = r; }
            }
            piv_[col] = p;
            if (p != col) {
                for (int j = 0; j < n_; ++j) std::swap(a_[col * n_ + j], a_[p * n_ + j]);
                sign = -sign;
            }
            const double d = a_[col * n_ + col];
            if (std::fabs(d) < 1e-300) { singular_ = true; det_ = 0.0; return; }
            for (int r = col + 1; r < n_; ++r) {
                const double f = a_[r * n_ + col] / d;
                a_[r * n_ + col] = f;
                for (int j = col + 1; j < n_; ++j) a_[r * n_ + j] -= f * a_[col * n_ + j];
            }
        }
        det_ = sign;
        for (int i = 0; i < n_; ++i) det_ *= a_[i * n_ + i];
    }

    bool singular() const { return singular_; }
    double det() const { return det_; }

    // Smallest absolute pivot, as a cheap conditioning probe.
    double min_pivot() const {
        double m = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n_; ++i) m = std::min(m, std::fabs(a_[i * n_ + i]));
        return m;
    }

    std::vector<double> solve(std::vector<double> b) const {
        if (singular_) throw solver_error("DenseLU::solve: singular matrix");
        for (int i = 0; i < n_; ++i) {
            if (piv_[i] != i) std::swap(b[i], b[piv_[i]]);
            for (int j = 0; j < i; ++j) b[i] -= a_[i * n_ + j] * b[j];
        }
        for (int i = n_ - 1; i >= 0; --i) {
            for (int j = i + 1; j < n_; ++j) b[i] -= a_[i * n_ + j] * b[j];
            b[i] /= a_[i * n_ + i];
        }
        return b;
    }

private:
    std::vector<double> a_;
    int n_;
    std::vector<int> piv_;
    bool singular_;
    double det_ = 0.0;
};

}  // namespace ovb
