#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "errors.hpp"

namespace kinkforge {

using cplx = std::complex<double>;

/// Composite Simpson on a uniform grid (node count must be odd, i.e. an
/// even number of intervals). Summation in fixed grid order.
inline double simpson(const std::vector<double>& v, double dx) {
    const std::size_t n = v.size();
    if (n < 3 || n % 2 == 0) throw InvalidGrid("simpson: need an even interval count");
    double s = v[0] + v[n - 1];
    for (std::size_t i = 1; i < n - 1; ++i) s += (i % 2 ? 4.0 : 2.0) * v[i];
    return s * dx / 3.0;
}

/// 4th-order first derivative on a uniform grid: five-point central
/// stencil inside, one-sided 4th-order stencils at the two ends.
template <class T>
std::vector<T> derivative4(const std::vector<T>& h, double dx) {
    const std::size_t n = h.size();
    if (n < 5) throw InvalidGrid("derivative4: need at least 5 nodes");
    std::vector<T> d(n);
    const double inv12 = 1.0 / (12.0 * dx);
    for (std::size_t i = 2; i + 2 < n; ++i)
        d[i] = (h[i - 2] - 8.0 * h[i - 1] + 8.0 * h[i + 1] - h[i + 2]) * inv12;
    d[0] = (-25.0 * h[0] + 48.0 * h[1] - 36.0 * h[2] + 16.0 * h[3] - 3.0 * h[4]) * inv12;
    d[1] = (-3.0 * h[0] - 10.0 * h[1] + 18.0 * h[2] - 6.0 * h[3] + h[4]) * inv12;
    d[n - 2] = (3.0 * h[n - 1] + 10.0 * h[n - 2] - 18.0 * h[n - 3] + 6.0 * h[n - 4] - h[n - 5]) * inv12;
    d[n - 1] = (25.0 * h[n - 1] - 48.0 * h[n - 2] + 36.0 * h[n - 3] - 16.0 * h[n - 4] + 3.0 * h[n - 5]) * inv12;
    return d;
}

/// Dormand-Prince 5(4) step for a complex scalar ODE y' = rhs(y)
/// (autonomous). Returns the 5th-order value and an embedded error
/// estimate; k1 in/out enables FSAL reuse.
struct Dopri5 {
    std::function<cplx(cplx)> rhs;
    double atol = 1e-12, rtol = 1e-12;
    // Optional error-norm scale; when set it replaces atol + rtol*|y|.
    // Needed where the solution approaches a fixed point and only the
    // separation from it carries phase information.
    std::function<double(const cplx&)> scale;

    struct StepOut {
        cplx y;
        double err; // scaled error norm
    };

    StepOut step(cplx y, double h, cplx& k1) const {
        const cplx k2 = rhs(y + h * (1.0 / 5.0) * k1);
        const cplx k3 = rhs(y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2));
        const cplx k4 = rhs(y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3));
        const cplx k5 = rhs(y + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 +
                                     64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4));
        const cplx k6 = rhs(y + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 +
                                     46732.0 / 5247.0 * k3 + 49.0 / 176.0 * k4 -
                                     5103.0 / 18656.0 * k5));
        const cplx y5 = y + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4 -
                                 2187.0 / 6784.0 * k5 + 11.0 / 84.0 * k6);
        const cplx k7 = rhs(y5);
        const cplx y4 = y + h * (5179.0 / 57600.0 * k1 + 7571.0 / 16695.0 * k3 +
                                 393.0 / 640.0 * k4 - 92097.0 / 339200.0 * k5 +
                                 187.0 / 2100.0 * k6 + 1.0 / 40.0 * k7);
        const double sc = scale ? scale(y5) : atol + rtol * std::max(std::abs(y), std::abs(y5));
        StepOut out;
        out.y = y5;
        out.err = std::abs(y5 - y4) / sc;
        k1 = k7; // FSAL
        return out;
    }

    // Advance from (x, y) to exactly x_end with adaptive step control.
    cplx integrate_to(double x, cplx y, double x_end, double& h_hint) const {
        if (x_end == x) return y;
        double dir = x_end > x ? 1.0 : -1.0;
        double h = std::min(std::abs(h_hint), std::abs(x_end - x)) * dir;
        if (h == 0.0) h = (x_end - x);
        cplx k1 = rhs(y);
        int guard = 0;
        while (dir * (x_end - x) > 0.0) {
            if (dir * (x + h - x_end) > 0.0) h = x_end - x;
            cplx k1_try = k1;
            StepOut s = step(y, h, k1_try);
            if (s.err <= 1.0) {
                y = s.y;
                x += h;
                k1 = k1_try;
                double f = std::clamp(0.9 * std::pow(std::max(s.err, 1e-10), -0.2), 0.2, 5.0);
                h *= f;
                h_hint = std::abs(h);
            } else {
                h *= std::clamp(0.9 * std::pow(s.err, -0.2), 0.1, 0.9);
                k1 = rhs(y); // discard FSAL update
            }
            if (++guard > 1000000) throw NonConvergence("dopri5: step cap");
        }
        return y;
    }
};

/// Classic RK4 with a fixed number of substeps (used for short refinement
/// advances where the step is already tiny).
inline cplx rk4_advance(const std::function<cplx(cplx)>& rhs, cplx y, double h, int substeps) {
    double hs = h / substeps;
    for (int i = 0; i < substeps; ++i) {
        cplx k1 = rhs(y);
        cplx k2 = rhs(y + 0.5 * hs * k1);
        cplx k3 = rhs(y + 0.5 * hs * k2);
        cplx k4 = rhs(y + hs * k3);
        y += hs / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return y;
}

/// Deterministic 64-bit generator (splitmix64); enough for test-field
/// sampling and inverse-iteration starts, with no libc variation.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform() { return (next() >> 11) * 0x1.0p-53; } // [0,1)
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
};

} // namespace kinkforge
