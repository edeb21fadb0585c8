#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "numerics.hpp"
#include "orbit.hpp"
#include "potential.hpp"

namespace kinkforge {

/// Complex-valued field on the profile grid (h = h1 + i h2).
struct GridField {
    std::vector<cplx> h;
};

/// Second-variation quadratic form int |h'|^2 + h^T D^2W(e) h,
/// with h' by the 4th-order stencil and Simpson quadrature.
inline double quad_form_direct(const ComplexPoly& f, const OrbitProfile& prof,
                               const GridField& field) {
    Potential P(f);
    std::vector<cplx> hp = derivative4(field.h, prof.dx());
    std::vector<double> integrand(field.h.size());
    for (std::size_t i = 0; i < field.h.size(); ++i)
        integrand[i] = std::norm(hp[i]) + P.hess_form(prof.e[i], field.h[i]);
    return simpson(integrand, prof.dx());
}

/// Factored form int |h' - sqrt(2) m conj(f'(e) h)|^2.
inline double quad_form_factored(const ComplexPoly& f, const OrbitProfile& prof,
                                 const GridField& field) {
    Potential P(f);
    std::vector<cplx> hp = derivative4(field.h, prof.dx());
    std::vector<double> integrand(field.h.size());
    const double s2 = std::sqrt(2.0);
    for (std::size_t i = 0; i < field.h.size(); ++i) {
        cplx r = hp[i] - s2 * prof.m * std::conj(P.fp(prof.e[i]) * field.h[i]);
        integrand[i] = std::norm(r);
    }
    return simpson(integrand, prof.dx());
}

struct FactorizationReport {
    double max_gap = 0.0;
    bool pass = false;
};

/// Agreement of the two quadratic-form routes over a family of test
/// fields; the identity is analytic, so the gap is quadrature-limited.
inline FactorizationReport factorization_gap(const ComplexPoly& f, const OrbitProfile& prof,
                                             const std::vector<GridField>& hs,
                                             double tol = 1e-7) {
    FactorizationReport rep;
    for (const auto& field : hs) {
        double d = quad_form_direct(f, prof, field);
        double q = quad_form_factored(f, prof, field);
        rep.max_gap = std::max(rep.max_gap, std::abs(d - q) / (1.0 + std::abs(d)));
    }
    rep.pass = rep.max_gap <= tol;
    return rep;
}

/// Gaussian bumps with widths in [0.5, 2], unit-modulus complex
/// amplitudes and centers in [-6, 6]; fixed seed for reproducibility.
inline std::vector<GridField> random_bumps(const OrbitProfile& prof, int count,
                                           std::uint64_t seed = 0x5EED) {
    SplitMix64 rng(seed);
    std::vector<GridField> out(count);
    for (int k = 0; k < count; ++k) {
        double ctr = rng.uniform(-6.0, 6.0);
        double width = rng.uniform(0.5, 2.0);
        double phase = rng.uniform(0.0, 2.0 * M_PI);
        cplx amp(std::cos(phase), std::sin(phase));
        out[k].h.resize(prof.N + 1);
        for (int i = 0; i <= prof.N; ++i) {
            double t = (prof.x[i] - ctr) / width;
            out[k].h[i] = amp * std::exp(-t * t);
        }
    }
    return out;
}

namespace detail {

// e at the midpoint of cell [i, i+1] by cubic Hermite, using the stored
// derivative values.
inline cplx hermite_mid(const OrbitProfile& prof, int i) {
    return 0.5 * (prof.e[i] + prof.e[i + 1]) +
           0.125 * prof.dx() * (prof.eprime[i] - prof.eprime[i + 1]);
}

} // namespace detail

/// RK4 integration of the kernel ODE h' = sqrt(2) m conj(f'(e) h) along
/// the grid from node i0, both directions by default. Sets *overflow and
/// stops a sweep when |h| passes 1e150.
inline GridField kernel_ode(const ComplexPoly& f, const OrbitProfile& prof, cplx h0,
                            int i0, int direction = 0, bool* overflow = nullptr) {
    Potential P(f);
    const double s2 = std::sqrt(2.0);
    const cplx m = prof.m;
    auto coeff = [&](cplx e) { return s2 * m * std::conj(P.fp(e)); };
    auto rhs = [&](cplx e, cplx h) { return coeff(e) * std::conj(h); };

    GridField out;
    out.h.assign(prof.N + 1, cplx(0.0));
    out.h[i0] = h0;
    if (overflow) *overflow = false;
    const double dx = prof.dx();

    auto sweep = [&](int dir) {
        cplx h = h0;
        for (int i = i0; dir > 0 ? i < prof.N : i > 0; i += dir) {
            int cell = dir > 0 ? i : i - 1;
            cplx e_a = prof.e[i];
            cplx e_m = detail::hermite_mid(prof, cell);
            cplx e_b = prof.e[i + dir];
            double hstep = dir * dx;
            cplx k1 = rhs(e_a, h);
            cplx k2 = rhs(e_m, h + 0.5 * hstep * k1);
            cplx k3 = rhs(e_m, h + 0.5 * hstep * k2);
            cplx k4 = rhs(e_b, h + hstep * k3);
            h += hstep / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (std::abs(h) > 1e150) {
                if (overflow) *overflow = true;
                break;
            }
            out.h[i + dir] = h;
        }
    };
    if (direction >= 0) sweep(+1);
    if (direction <= 0) sweep(-1);
    return out;
}

struct WronskianResult {
    std::vector<double> w; // h1 e2' - h2 e1' per node
    double mid_value = 0.0;
    double max_deviation = 0.0; // max |w_i - w_mid|
};

inline WronskianResult wronskian(const OrbitProfile& prof, const GridField& field) {
    WronskianResult res;
    res.w.resize(prof.N + 1);
    for (int i = 0; i <= prof.N; ++i)
        res.w[i] = std::imag(std::conj(field.h[i]) * prof.eprime[i]);
    res.mid_value = res.w[prof.N / 2];
    for (double wi : res.w)
        res.max_deviation = std::max(res.max_deviation, std::abs(wi - res.mid_value));
    return res;
}

namespace detail {

// Decaying asymptotic directions of h' = c conj(h) with c = sqrt(2) m conj(f'(a)):
// as x -> -inf the decaying solution grows forward along (c/|c|)^{1/2};
// as x -> +inf it decays forward along i (c/|c|)^{1/2}.
inline cplx asym_direction(cplx c, bool plus_side) {
    cplx u = std::sqrt(c / std::abs(c));
    return plus_side ? cplx(0.0, 1.0) * u : u;
}

// Sweep of the kernel ODE with renormalization; returns the direction of
// the transported decaying solution at the matching node.
inline cplx transported_direction(const Potential& P, const OrbitProfile& prof, cplx h_start,
                                  int i_from, int i_to) {
    const double s2 = std::sqrt(2.0);
    const cplx m = prof.m;
    auto rhs = [&](cplx e, cplx h) { return s2 * m * std::conj(P.fp(e) * h); };
    const double dx = prof.dx();
    int dir = i_to > i_from ? 1 : -1;
    cplx h = h_start;
    for (int i = i_from; i != i_to; i += dir) {
        int cell = dir > 0 ? i : i - 1;
        cplx e_a = prof.e[i];
        cplx e_m = hermite_mid(prof, cell);
        cplx e_b = prof.e[i + dir];
        double hstep = dir * dx;
        cplx k1 = rhs(e_a, h);
        cplx k2 = rhs(e_m, h + 0.5 * hstep * k1);
        cplx k3 = rhs(e_m, h + 0.5 * hstep * k2);
        cplx k4 = rhs(e_b, h + hstep * k3);
        h += hstep / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (std::abs(h) > 1e6) h /= std::abs(h);
    }
    return h / std::abs(h);
}

} // namespace detail

/// Counts decaying kernel solutions by transporting the decaying
/// direction from each end to x = 0 and testing the 2x2 real matching
/// determinant. Theorem outcome for these potentials: 1.
inline int kernel_dimension(const ComplexPoly& f, const OrbitProfile& prof,
                            double rank_tol = 1e-8) {
    Potential P(f);
    const double s2 = std::sqrt(2.0);
    cplx c_minus = s2 * prof.m * std::conj(P.fp(prof.a_minus));
    cplx c_plus = s2 * prof.m * std::conj(P.fp(prof.a_plus));
    const int mid = prof.N / 2;
    cplx vL = detail::transported_direction(P, prof, detail::asym_direction(c_minus, false), 0, mid);
    cplx vR = detail::transported_direction(P, prof, detail::asym_direction(c_plus, true), prof.N, mid);
    if (std::abs(vL) < 1e-10 || std::abs(vR) < 1e-10)
        throw IllConditioned("kernel_dimension: matching columns near rank 0");
    // det [vL vR] for normalized columns.
    double det = std::imag(std::conj(vL) * vR);
    return std::abs(det) <= rank_tol ? 1 : 0;
}

/// The matched decaying kernel solution as a grid field (scaled so its
/// largest entry is comparable to e'); used to check it is parallel to e'.
inline GridField decaying_kernel_solution(const ComplexPoly& f, const OrbitProfile& prof) {
    Potential P(f);
    const double s2 = std::sqrt(2.0);
    const cplx m = prof.m;
    auto rhs = [&](cplx e, cplx h) { return s2 * m * std::conj(P.fp(e) * h); };
    const double dx = prof.dx();
    const int mid = prof.N / 2;

    GridField out;
    out.h.assign(prof.N + 1, cplx(0.0));
    auto fill = [&](int i_from, int i_to, cplx h_start) {
        int dir = i_to > i_from ? 1 : -1;
        cplx h = h_start;
        double logscale = 0.0;
        std::vector<std::pair<int, cplx>> raw{{i_from, h}};
        std::vector<double> rawlog{0.0};
        for (int i = i_from; i != i_to; i += dir) {
            int cell = dir > 0 ? i : i - 1;
            cplx e_m = detail::hermite_mid(prof, cell);
            double hstep = dir * dx;
            cplx k1 = rhs(prof.e[i], h);
            cplx k2 = rhs(e_m, h + 0.5 * hstep * k1);
            cplx k3 = rhs(e_m, h + 0.5 * hstep * k2);
            cplx k4 = rhs(prof.e[i + dir], h + hstep * k3);
            h += hstep / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (std::abs(h) > 1e6) { logscale += std::log(std::abs(h)); h /= std::abs(h); }
            raw.emplace_back(i + dir, h);
            rawlog.push_back(logscale);
        }
        // Rescale so the value at the matching node carries logscale 0.
        double log_at_end = rawlog.back();
        for (std::size_t k = 0; k < raw.size(); ++k) {
            double lg = rawlog[k] - log_at_end;
            out.h[raw[k].first] = raw[k].second * std::exp(lg);
        }
    };
    cplx c_minus = s2 * m * std::conj(P.fp(prof.a_minus));
    cplx c_plus = s2 * m * std::conj(P.fp(prof.a_plus));
    fill(0, mid, detail::asym_direction(c_minus, false));
    GridField left = out;
    out.h.assign(prof.N + 1, cplx(0.0));
    fill(prof.N, mid, detail::asym_direction(c_plus, true));
    // Align the right sweep to the left one at the matching node.
    cplx ratio = left.h[mid] / out.h[mid];
    for (int i = mid; i <= prof.N; ++i) left.h[i] = out.h[i] * ratio;
    // Scale to match |e'(0)|.
    cplx scale = prof.eprime[mid] / left.h[mid];
    for (auto& v : left.h) v *= scale;
    return left;
}

} // namespace kinkforge
