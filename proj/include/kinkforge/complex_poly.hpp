#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "errors.hpp"

namespace kinkforge {

using cplx = std::complex<double>;

/// Polynomial over C stored by ascending coefficients c0..cd.
/// The zero polynomial has degree 0 and a single zero coefficient;
/// otherwise the leading coefficient is nonzero (trailing near-zero
/// coefficients are trimmed at construction).
class ComplexPoly {
public:
    ComplexPoly() : coeffs_{cplx(0.0)} {}

    explicit ComplexPoly(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) coeffs_.push_back(cplx(0.0));
        while (coeffs_.size() > 1 && coeffs_.back() == cplx(0.0)) coeffs_.pop_back();
    }

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<cplx>& coeffs() const { return coeffs_; }
    bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == cplx(0.0); }

    // Horner evaluation.
    cplx operator()(cplx z) const {
        cplx v(0.0);
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) v = v * z + *it;
        return v;
    }

    ComplexPoly derivative() const {
        if (degree() == 0) return ComplexPoly{};
        std::vector<cplx> d(coeffs_.size() - 1);
        for (std::size_t i = 1; i < coeffs_.size(); ++i)
            d[i - 1] = coeffs_[i] * static_cast<double>(i);
        return ComplexPoly(std::move(d));
    }

    // Primitive with the constant fixed to 0; only differences of the
    // primitive are ever used, so the constant is immaterial.
    ComplexPoly antiderivative() const {
        std::vector<cplx> a(coeffs_.size() + 1, cplx(0.0));
        for (std::size_t i = 0; i < coeffs_.size(); ++i)
            a[i + 1] = coeffs_[i] / static_cast<double>(i + 1);
        return ComplexPoly(std::move(a));
    }

    ComplexPoly scaled(cplx c) const {
        std::vector<cplx> s(coeffs_);
        for (auto& ci : s) ci *= c;
        return ComplexPoly(std::move(s));
    }

    // p(s*z + t), by Horner on the coefficient list.
    ComplexPoly compose_linear(cplx s, cplx t) const {
        std::vector<cplx> acc{cplx(0.0)};
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
            // acc <- acc*(s z + t) + c
            std::vector<cplx> next(acc.size() + 1, cplx(0.0));
            for (std::size_t i = 0; i < acc.size(); ++i) {
                next[i] += acc[i] * t;
                next[i + 1] += acc[i] * s;
            }
            next[0] += *it;
            acc = std::move(next);
        }
        return ComplexPoly(std::move(acc));
    }

    static ComplexPoly from_roots(const std::vector<cplx>& rs, cplx lead = cplx(1.0)) {
        std::vector<cplx> c{lead};
        for (cplx r : rs) {
            std::vector<cplx> next(c.size() + 1, cplx(0.0));
            for (std::size_t i = 0; i < c.size(); ++i) {
                next[i] -= c[i] * r;
                next[i + 1] += c[i];
            }
            c = std::move(next);
        }
        return ComplexPoly(std::move(c));
    }

private:
    std::vector<cplx> coeffs_;
};

namespace detail {

inline double coeff_scale(const ComplexPoly& p, double absz) {
    double s = 0.0, zp = 1.0;
    for (const auto& c : p.coeffs()) { s += std::abs(c) * zp; zp *= absz; }
    return s;
}

} // namespace detail

/// All d roots of p (with multiplicity), by Aberth-Ehrlich simultaneous
/// iteration followed by Newton polishing of well-separated roots.
/// Initial guesses sit on a circle of radius 1 + max|c_i/c_d|.
inline std::vector<cplx> roots(const ComplexPoly& p, double tol_root = 1e-10) {
    const int d = p.degree();
    if (d < 1) throw InvalidGrid("roots: degree must be >= 1");
    const auto& c = p.coeffs();
    const ComplexPoly dp = p.derivative();

    double radius = 0.0;
    for (int i = 0; i < d; ++i) radius = std::max(radius, std::abs(c[i] / c[d]));
    radius += 1.0;

    std::vector<cplx> z(d);
    for (int k = 0; k < d; ++k) {
        double ang = 2.0 * M_PI * k / d + 0.4; // offset breaks symmetry locks
        z[k] = radius * cplx(std::cos(ang), std::sin(ang));
    }

    const int max_iter = 200;
    std::vector<bool> done(d, false);
    for (int iter = 0; iter < max_iter; ++iter) {
        bool all_done = true;
        for (int k = 0; k < d; ++k) {
            if (done[k]) continue;
            cplx pv = p(z[k]);
            // Backward-error stop: |p(z)| at rounding level for this z.
            if (std::abs(pv) <= 16.0 * 2.2e-16 * detail::coeff_scale(p, std::abs(z[k]))) {
                done[k] = true;
                continue;
            }
            all_done = false;
            cplx dv = dp(z[k]);
            if (dv == cplx(0.0)) { z[k] += cplx(1e-8, 1e-8); continue; }
            cplx w = pv / dv;
            cplx sum(0.0);
            for (int j = 0; j < d; ++j) {
                if (j == k) continue;
                cplx diff = z[k] - z[j];
                if (std::abs(diff) < 1e-300) diff = cplx(1e-300);
                sum += 1.0 / diff;
            }
            cplx corr = w / (1.0 - w * sum);
            z[k] -= corr;
            if (std::abs(corr) <= 1e-15 * (1.0 + std::abs(z[k]))) done[k] = true;
        }
        if (all_done) break;
        if (iter == max_iter - 1) throw NonConvergence("roots: Aberth iteration cap reached");
    }

    // Newton polish (helps simple roots; harmless stagnation elsewhere).
    for (int k = 0; k < d; ++k) {
        for (int it = 0; it < 3; ++it) {
            cplx dv = dp(z[k]);
            if (std::abs(dv) < 1e-280) break;
            cplx step = p(z[k]) / dv;
            if (!std::isfinite(std::abs(step))) break;
            if (std::abs(step) > 0.5 * (1.0 + std::abs(z[k]))) break;
            z[k] -= step;
        }
    }

    for (int k = 0; k < d; ++k) {
        double scale = detail::coeff_scale(p, std::abs(z[k]));
        if (std::abs(p(z[k])) > tol_root * std::max(1.0, scale))
            throw NonConvergence("roots: residual above tol_root");
    }
    std::sort(z.begin(), z.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return z;
}

/// Nondegenerate zero of W = |f|^2: a simple root of f.
struct Well {
    cplx location;
    cplx fprime;          // f'(a)
    double decay_rate;    // k = sqrt(2) |f'(a)|
    double hessian_scale; // 2 |f'(a)|^2, so D^2W(a) = hessian_scale * I
};

struct WellSet {
    std::vector<Well> wells;            // sorted by (Re, Im)
    std::vector<cplx> degenerate_zeros; // cluster centroids of multiple roots
};

/// Classifies the zeros of f into simple roots (wells) and multiple-root
/// clusters (degenerate zeros). Roots closer than the cluster radius are
/// treated as one multiple root.
inline WellSet find_wells(const ComplexPoly& p, double tol_root = 1e-10,
                          double tol_simple = 1e-8) {
    WellSet out;
    if (p.degree() < 1) return out;
    std::vector<cplx> rs = roots(p, tol_root);
    const ComplexPoly dp = p.derivative();

    std::vector<bool> used(rs.size(), false);
    for (std::size_t i = 0; i < rs.size(); ++i) {
        if (used[i]) continue;
        std::vector<std::size_t> cluster{i};
        double rad = 1e-6 * (1.0 + std::abs(rs[i]));
        for (std::size_t j = i + 1; j < rs.size(); ++j)
            if (!used[j] && std::abs(rs[j] - rs[i]) <= rad) cluster.push_back(j);
        cplx centroid(0.0);
        for (auto idx : cluster) { centroid += rs[idx]; used[idx] = true; }
        centroid /= static_cast<double>(cluster.size());
        cplx fpa = dp(centroid);
        if (cluster.size() > 1 || std::abs(fpa) <= tol_simple) {
            out.degenerate_zeros.push_back(centroid);
        } else {
            Well w;
            w.location = centroid;
            w.fprime = fpa;
            w.decay_rate = std::sqrt(2.0) * std::abs(fpa);
            w.hessian_scale = 2.0 * std::norm(fpa);
            out.wells.push_back(w);
        }
    }
    auto lex = [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    };
    std::sort(out.wells.begin(), out.wells.end(),
              [&](const Well& a, const Well& b) { return lex(a.location, b.location); });
    std::sort(out.degenerate_zeros.begin(), out.degenerate_zeros.end(), lex);
    return out;
}

} // namespace kinkforge
