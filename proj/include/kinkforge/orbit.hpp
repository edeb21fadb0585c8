#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "complex_poly.hpp"
#include "numerics.hpp"
#include "potential.hpp"

namespace kinkforge {

struct OrbitOptions {
    double X = 12.0;
    int N = 4096;
    double eps_seed = 1e-8;
    double tol_stop = 1e-9;
    double x_budget = 200.0;
    double atol = 1e-12;
    double rtol = 1e-12;
    double tol_segment = 1e-6; // LeftSegment threshold
};

/// Heteroclinic orbit sampled on the uniform grid x_i = -X + i*2X/N,
/// normalized so the segment midpoint sits at x = 0.
struct OrbitProfile {
    cplx a_minus, a_plus;
    cplx m;       // unit transport constant
    double X = 0.0;
    int N = 0;
    std::vector<double> x;
    std::vector<cplx> e;
    std::vector<cplx> eprime; // sqrt(2) m conj(f(e))
    double energy = 0.0;      // quadrature energy with tail corrections
    double k_minus = 0.0, k_plus = 0.0;

    double dx() const { return 2.0 * X / N; }
};

/// m = (g(a+) - g(a-)) / |g(a+) - g(a-)|.
inline cplx transport_constant(const ComplexPoly& g, cplx a_minus, cplx a_plus) {
    cplx dg = g(a_plus) - g(a_minus);
    if (std::abs(dg) < 1e-12)
        throw DegenerateSegment("degenerate segment: g(a+) = g(a-)");
    return dg / std::abs(dg);
}

/// E(e) = sqrt(2) |g(a+) - g(a-)| for the segment-type heteroclinic.
inline double closed_form_energy(const ComplexPoly& g, cplx a_minus, cplx a_plus) {
    cplx dg = g(a_plus) - g(a_minus);
    if (std::abs(dg) < 1e-12)
        throw DegenerateSegment("degenerate segment: g(a+) = g(a-)");
    return std::sqrt(2.0) * std::abs(dg);
}

/// Energy by composite Simpson on the grid plus the analytic tail
/// correction k/2 |e_bdry - a|^2 on each side.
inline double quadrature_energy(const ComplexPoly& f, const OrbitProfile& prof) {
    if (prof.N < 8) throw InvalidGrid("quadrature_energy: N < 8");
    if (prof.N % 2 != 0) throw InvalidGrid("quadrature_energy: N must be even");
    std::vector<double> integrand(prof.N + 1);
    for (int i = 0; i <= prof.N; ++i)
        integrand[i] = 0.5 * std::norm(prof.eprime[i]) + std::norm(f(prof.e[i]));
    double E = simpson(integrand, prof.dx());
    E += 0.5 * prof.k_minus * std::norm(prof.e.front() - prof.a_minus);
    E += 0.5 * prof.k_plus * std::norm(prof.e.back() - prof.a_plus);
    return E;
}

namespace detail {

// Segment coordinate s = Re(conj(m) (g(z) - g(a-))) and its off-segment
// deviation Im(conj(m) (g(z) - g(a-))).
struct SegmentFrame {
    const Potential& P;
    cplx m, g_aminus;
    double s(cplx z) const { return std::real(std::conj(m) * (P.g(z) - g_aminus)); }
    double dev(cplx z) const { return std::imag(std::conj(m) * (P.g(z) - g_aminus)); }
};

// Deflated Taylor frame of f at a well a: f(a + xi) = xi * sum_j c_j xi^j
// with c_j = f^(j+1)(a)/(j+1)!. Evaluating f this way keeps full relative
// accuracy near the root, where direct Horner evaluation loses the whole
// value to cancellation and blinds the step-size control.
struct LocalWell {
    cplx a;
    std::vector<cplx> c; // c[j] = f^(j+1)(a)/(j+1)!
    cplx f(cplx xi) const {
        cplx acc(0.0);
        for (int j = static_cast<int>(c.size()) - 1; j >= 0; --j) acc = acc * xi + c[j];
        return acc * xi;
    }
    // g(a + xi) - g(a) = sum_j c_j xi^{j+2} / (j+2)
    cplx g(cplx xi) const {
        cplx acc(0.0);
        for (int j = static_cast<int>(c.size()) - 1; j >= 0; --j)
            acc = acc * xi + c[j] / double(j + 2);
        return acc * xi * xi;
    }
};

inline LocalWell local_well(const ComplexPoly& f, cplx a) {
    LocalWell w{a, {}};
    ComplexPoly d = f.derivative();
    double fact = 1.0;
    for (int j = 1; j <= f.degree(); ++j) {
        fact *= j;
        w.c.push_back(d(a) / fact);
        d = d.derivative();
    }
    return w;
}

} // namespace detail

/// Shooting solve of the first-order reduction e' = sqrt(2) m conj(f(e))
/// from a^- to a^+, recentred at the segment midpoint and resampled onto
/// the uniform grid with analytic exponential tails beyond the integrated
/// range.
inline OrbitProfile connect(const ComplexPoly& f, cplx a_minus, cplx a_plus,
                            OrbitOptions opts = {}) {
    if (opts.N < 8 || opts.N % 2 != 0) throw InvalidGrid("connect: N must be even and >= 8");
    Potential P(f);
    if (std::abs(P.fp(a_minus)) < 1e-12 || std::abs(P.fp(a_plus)) < 1e-12)
        throw ConfigError("connect: endpoint is not a simple root of f");

    OrbitProfile prof;
    prof.a_minus = a_minus;
    prof.a_plus = a_plus;
    prof.m = transport_constant(P.g, a_minus, a_plus);
    prof.X = opts.X;
    prof.N = opts.N;
    prof.k_minus = std::sqrt(2.0) * std::abs(P.fp(a_minus));
    prof.k_plus = std::sqrt(2.0) * std::abs(P.fp(a_plus));

    const cplx m = prof.m;
    auto rhs = [&P, m](cplx e) { return std::sqrt(2.0) * m * std::conj(P.f(e)); };

    // Unstable direction of xi' = c conj(xi) at a^-: u = +-(c/|c|)^{1/2}.
    const cplx c0 = std::sqrt(2.0) * m * std::conj(P.fp(a_minus));
    const cplx u = std::sqrt(c0 / std::abs(c0));
    const cplx g_target = P.g(a_plus);
    // The seed separation xi0 is kept exact; forming a- + xi0 and
    // subtracting back would contaminate it with rounding at the scale
    // of |a-|, i.e. a relative phase error of eps/|a-|.
    cplx xi0 = opts.eps_seed * u;

    detail::SegmentFrame seg{P, m, P.g(a_minus)};
    const double dg_len = std::abs(P.g(a_plus) - P.g(a_minus));
    const double s_target = 0.5 * dg_len;

    std::vector<cplx> all_roots = roots(f);
    std::vector<cplx> other_roots;
    for (cplx r : all_roots)
        if (std::abs(r - a_plus) > 1e-6 * (1.0 + std::abs(r))) other_roots.push_back(r);

    // Well-local Taylor frames and the radii where integration switches
    // between the local and global representations.
    const detail::LocalWell Lm = detail::local_well(f, a_minus);
    const detail::LocalWell Lp = detail::local_well(f, a_plus);
    auto nearest_other = [&all_roots](cplx a) {
        double d = std::numeric_limits<double>::infinity();
        for (cplx r : all_roots)
            if (std::abs(r - a) > 1e-9) d = std::min(d, std::abs(r - a));
        return std::isfinite(d) ? d : 1.0;
    };
    const double delta_m = 0.25 * std::min(nearest_other(a_minus), std::abs(a_plus - a_minus));
    const double delta_p = 0.25 * std::min(nearest_other(a_plus), std::abs(a_plus - a_minus));


    const double s2 = std::sqrt(2.0);
    auto rhs_m = [&Lm, m, s2](cplx xi) { return s2 * m * std::conj(Lm.f(xi)); };
    auto rhs_p = [&Lp, m, s2](cplx eta) { return s2 * m * std::conj(Lp.f(eta)); };

    Dopri5 odeA{rhs_m, opts.atol, opts.rtol};
    Dopri5 odeC{rhs_p, opts.atol, opts.rtol};
    // In local coordinates the error is controlled relative to the
    // separation itself; in absolute terms truncation near a well is
    // below the resolution of e = a + xi and the controller goes blind.
    auto rel_scale = [&opts](const cplx& y) {
        return (opts.atol + opts.rtol) * std::max(std::abs(y), 1e-300);
    };
    odeA.scale = rel_scale;
    odeC.scale = rel_scale;
    Dopri5 odeB{rhs, opts.atol, opts.rtol};
    odeB.scale = [a_minus, a_plus, &opts](const cplx& y) {
        double sep = std::min({std::abs(y - a_minus), std::abs(y - a_plus), 1.0});
        return (opts.atol + opts.rtol) * std::max(sep, 1e-9);
    };

    // ---- Pass 1: phased shoot a- -> a+, locating the segment-midpoint
    // time x_mid on the way.
    //
    // Both branches of the unstable manifold at a^- track the same ray in
    // g-space (g - g(a^-) is even in xi to leading order), so no local test
    // can tell them apart; the connecting branch is identified by trial
    // integration, retrying with the opposite seed sign if the first
    // attempt overruns the segment or gets blocked.
    double t = 0.0, h = 1e-4;
    double x_mid = std::numeric_limits<double>::quiet_NaN();
    double t_A = 0.0, t_C = 0.0, t_stop = 0.0;
    cplx eta_end;
    struct WrongBranch {};

    auto budget_check = [&t, &opts]() {
        if (t > opts.x_budget)
            throw BudgetExceeded("connect: x budget exceeded before reaching a+");
    };
    auto finite_check = [](cplx y, double hh) {
        if (!std::isfinite(y.real()) || !std::isfinite(y.imag()) || !std::isfinite(hh) ||
            hh == 0.0)
            throw NonConvergence("connect: integration step collapsed");
    };

    auto run_pass1 = [&]() {
    t = 0.0;
    h = 1e-4;
    x_mid = std::numeric_limits<double>::quiet_NaN();

    // Phase A: local coordinates xi = e - a- until |xi| reaches delta_m.
    cplx xi = xi0;
    {
        cplx k1 = rhs_m(xi);
        while (std::abs(xi) < delta_m) {
            budget_check();
            cplx k1_try = k1;
            Dopri5::StepOut st = odeA.step(xi, h, k1_try);
            if (st.err <= 1.0) {
                xi = st.y;
                t += h;
                k1 = k1_try;
                h *= std::clamp(0.9 * std::pow(std::max(st.err, 1e-10), -0.2), 0.2, 5.0);
            } else {
                h *= std::clamp(0.9 * std::pow(st.err, -0.2), 0.1, 0.9);
                k1 = rhs_m(xi);
            }
            h = std::min(h, 1.0);
            finite_check(xi, h);
        }
    }
    t_A = t;

    // Phase B: global coordinates until within delta_p of a+. Segment
    // deviation, intermediate wells and the midpoint crossing are all
    // monitored here, away from the endpoint wells.
    cplx e = a_minus + xi;
    {
        cplx k1 = rhs(e);
        double s_prev = seg.s(e);
        double t_prev = t;
        cplx e_prev = e;
        while (std::abs(e - a_plus) > delta_p) {
            budget_check();
            cplx k1_try = k1;
            Dopri5::StepOut st = odeB.step(e, h, k1_try);
            if (st.err <= 1.0) {
                t_prev = t; e_prev = e; s_prev = seg.s(e);
                e = st.y;
                t += h;
                k1 = k1_try;
                h *= std::clamp(0.9 * std::pow(std::max(st.err, 1e-10), -0.2), 0.2, 5.0);

                if (std::abs(seg.dev(e)) > opts.tol_segment * (1.0 + dg_len))
                    throw LeftSegment("connect: trajectory left the g-image segment");
                // Overran the far end of the segment in g-space without
                // entering the a+ neighbourhood: this is the other branch.
                if (seg.s(e) > dg_len * (1.0 + 1e-9)) throw WrongBranch{};
                for (cplx r : other_roots)
                    if (std::abs(e - r) <= std::max(opts.tol_stop, 1e-4))
                        throw BlockedByWell("connect: trajectory blocked by intermediate well");

                if (std::isnan(x_mid) && s_prev < s_target && seg.s(e) >= s_target) {
                    // Newton refinement on x from the pre-crossing state;
                    // ds/dx = sqrt(2) |f(e)|^2 > 0 on the open segment.
                    double xl = t_prev;
                    cplx el = e_prev;
                    double h_ref = 1e-4;
                    for (int it = 0; it < 60; ++it) {
                        double ds = s_target - seg.s(el);
                        if (std::abs(ds) <= 1e-14 * std::max(1.0, dg_len)) break;
                        double delta = ds / (s2 * std::norm(P.f(el)));
                        el = odeB.integrate_to(xl, el, xl + delta, h_ref);
                        xl += delta;
                    }
                    x_mid = xl;
                }
            } else {
                h *= std::clamp(0.9 * std::pow(st.err, -0.2), 0.1, 0.9);
                k1 = rhs(e);
            }
            h = std::min(h, 1.0);
            finite_check(e, h);
        }
    }
    t_C = t;

    // Phase C: local coordinates eta = e - a+. a+ is a saddle of the
    // reduction, so any transverse numerical noise eventually ejects the
    // trajectory along the unstable direction; track the closest approach
    // and, if ejected before |eta| <= tol_stop, restart the landing from
    // the closest-approach state projected onto the stable direction.
    cplx eta = e - a_plus;
    {
        cplx k1 = rhs_p(eta);
        double min_abs = std::abs(eta);
        cplx eta_min = eta;
        double t_min = t;
        bool captured = false;
        while (true) {
            if (std::abs(eta) <= opts.tol_stop) { captured = true; break; }
            if (std::abs(eta) > 4.0 * min_abs) break; // past closest approach
            budget_check();
            cplx k1_try = k1;
            Dopri5::StepOut st = odeC.step(eta, h, k1_try);
            if (st.err <= 1.0) {
                eta = st.y;
                t += h;
                k1 = k1_try;
                h *= std::clamp(0.9 * std::pow(std::max(st.err, 1e-10), -0.2), 0.2, 5.0);
                if (std::abs(eta) < min_abs) {
                    min_abs = std::abs(eta);
                    eta_min = eta;
                    t_min = t;
                }
                if (std::isnan(x_mid)) {
                    // Midpoint may fall inside the a+ neighbourhood for
                    // strongly asymmetric segments; s via the local frame.
                    double s_here = dg_len + std::real(std::conj(m) * Lp.g(eta));
                    if (s_here >= s_target) x_mid = t; // refined below via eta scaling
                }
            } else {
                h *= std::clamp(0.9 * std::pow(st.err, -0.2), 0.1, 0.9);
                k1 = rhs_p(eta);
            }
            h = std::min(h, 1.0);
            finite_check(eta, h);
        }
        if (captured) {
            eta_end = eta;
            t_stop = t;
        } else {
            if (min_abs > 1e-3)
                throw LeftSegment("connect: trajectory missed a+ (no direct connection)");
            // Project the closest-approach state onto the stable
            // direction w = i (c/|c|)^{1/2}, c = sqrt(2) m conj(f'(a+)).
            cplx cp = s2 * m * std::conj(Lp.c[0]);
            cplx w = cplx(0.0, 1.0) * std::sqrt(cp / std::abs(cp));
            double rho = std::real(std::conj(w) * eta_min);
            eta_end = rho * w;
            t_stop = t_min;
        }
    }
    if (std::isnan(x_mid))
        throw NonConvergence("connect: segment midpoint not reached");
    };  // run_pass1

    auto retry_other_branch = [&]() {
        xi0 = -xi0;
        try {
            run_pass1();
        } catch (const WrongBranch&) {
            throw LeftSegment("connect: no branch of the unstable manifold reaches a+");
        }
    };
    try {
        run_pass1();
    } catch (const WrongBranch&) {
        retry_other_branch();
    } catch (const LeftSegment&) {
        retry_other_branch();
    } catch (const BlockedByWell&) {
        retry_other_branch();
    }

    // ---- Pass 2: land exactly on every grid node inside the integrated
    // range [x0_grid, x1_grid] (grid coordinate = integration coordinate
    // - x_mid), re-running the same phased integration as a cursor.
    const int N = opts.N;
    const double X = opts.X;
    const double dx = 2.0 * X / N;
    const double x0_grid = -x_mid;
    const double x1_grid = t_stop - x_mid;
    prof.x.resize(N + 1);
    prof.e.resize(N + 1);
    prof.eprime.resize(N + 1);
    for (int i = 0; i <= N; ++i) prof.x[i] = -X + i * dx;

    int phase = 0;        // 0: local at a-, 1: global, 2: local at a+
    double tau = 0.0;     // cursor position in integration time
    cplx y = xi0;
    double h_hint = 1e-4;
    auto advance_to = [&](double tau_target) {
        while (true) {
            double bound = phase == 0 ? t_A : phase == 1 ? t_C : t_stop;
            if (tau_target <= bound || phase == 2) {
                Dopri5& ode = phase == 0 ? odeA : phase == 1 ? odeB : odeC;
                y = ode.integrate_to(tau, y, tau_target, h_hint);
                tau = tau_target;
                return;
            }
            Dopri5& ode = phase == 0 ? odeA : odeB;
            y = ode.integrate_to(tau, y, bound, h_hint);
            tau = bound;
            // exact change of representation
            if (phase == 0) y = a_minus + y;
            else y = y - a_plus;
            ++phase;
        }
    };

    // Nodes inside the a+ neighbourhood are filled by integrating backward
    // from the projected landing state: a+ is a saddle of the reduction,
    // so forward integration there amplifies roundoff exponentially along
    // the unstable direction, while backward integration damps it.
    {
        double taub = t_stop;
        cplx yb = eta_end;
        double hb = 1e-4;
        for (int i = N; i >= 0; --i) {
            double xg = prof.x[i];
            if (xg > x1_grid || xg < x0_grid || xg + x_mid <= t_C) continue;
            yb = odeC.integrate_to(taub, yb, xg + x_mid, hb);
            taub = xg + x_mid;
            prof.e[i] = a_plus + yb;
            prof.eprime[i] = rhs_p(yb);
        }
    }

    for (int i = 0; i <= N; ++i) {
        double xg = prof.x[i];
        if (xg < x0_grid) {
            // Tail separation kept unrounded: evaluating f(e) at the
            // rounded node would lose the whole value to cancellation,
            // so e' comes from the linearized tail e' = k (e - a).
            cplx tl = xi0 * std::exp(prof.k_minus * (xg - x0_grid));
            prof.e[i] = a_minus + tl;
            prof.eprime[i] = prof.k_minus * tl;
        } else if (xg + x_mid > t_C && xg <= x1_grid) {
            continue; // filled by the backward pass above
        } else if (xg > x1_grid) {
            cplx tl = eta_end * std::exp(-prof.k_plus * (xg - x1_grid));
            prof.e[i] = a_plus + tl;
            prof.eprime[i] = -prof.k_plus * tl;
        } else {
            advance_to(xg + x_mid);
            if (phase == 0) {
                prof.e[i] = a_minus + y;
                prof.eprime[i] = rhs_m(y);
            } else if (phase == 1) {
                prof.e[i] = y;
                prof.eprime[i] = rhs(y);
            } else {
                prof.e[i] = a_plus + y;
                prof.eprime[i] = rhs_p(y);
            }
        }
    }
    prof.energy = quadrature_energy(f, prof);
    return prof;
}

struct Diagnostics {
    double max_equipartition = 0.0;      // | 1/2 |e'|^2 - |f(e)|^2 |
    double max_second_order = 0.0;       // | D2 e / dx^2 - 2 f(e) conj(f'(e)) |
    double max_segment_deviation = 0.0;  // | Im(conj(m)(g(e)-g(a-))) |
    double decay_fit_minus = 0.0;        // fitted exponent on outer 20% at -inf
    double decay_fit_plus = 0.0;         // fitted exponent on outer 20% at +inf
};

/// Residual and tail diagnostics for a computed (or synthetic) profile.
inline Diagnostics verify_orbit(const ComplexPoly& f, const OrbitProfile& prof) {
    Potential P(f);
    Diagnostics d;
    const int N = prof.N;
    const double dx = prof.dx();
    for (int i = 0; i <= N; ++i) {
        double eq = std::abs(0.5 * std::norm(prof.eprime[i]) - std::norm(P.f(prof.e[i])));
        d.max_equipartition = std::max(d.max_equipartition, eq);
    }
    for (int i = 1; i < N; ++i) {
        cplx second = (prof.e[i - 1] - 2.0 * prof.e[i] + prof.e[i + 1]) / (dx * dx);
        cplx res = second - 2.0 * P.f(prof.e[i]) * std::conj(P.fp(prof.e[i]));
        d.max_second_order = std::max(d.max_second_order, std::abs(res));
    }
    const cplx g_aminus = P.g(prof.a_minus);
    for (int i = 0; i <= N; ++i) {
        double dev = std::abs(std::imag(std::conj(prof.m) * (P.g(prof.e[i]) - g_aminus)));
        d.max_segment_deviation = std::max(d.max_segment_deviation, dev);
    }

    // Least-squares slope of log|e - a| on the outer 20% of nodes.
    auto fit_decay = [&](bool plus_side) {
        int count = (N + 1) / 5;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int used = 0;
        for (int j = 0; j < count; ++j) {
            int i = plus_side ? N - count + 1 + j : j;
            cplx a = plus_side ? prof.a_plus : prof.a_minus;
            double r = std::abs(prof.e[i] - a);
            if (r <= 0.0) continue;
            double xi = prof.x[i], yi = std::log(r);
            sx += xi; sy += yi; sxx += xi * xi; sxy += xi * yi;
            ++used;
        }
        if (used < 2) return 0.0;
        double slope = (used * sxy - sx * sy) / (used * sxx - sx * sx);
        return plus_side ? -slope : slope;
    };
    d.decay_fit_minus = fit_decay(false);
    d.decay_fit_plus = fit_decay(true);
    return d;
}

} // namespace kinkforge
