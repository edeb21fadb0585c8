#pragma once

#include <cmath>
#include <complex>

#include "complex_poly.hpp"

namespace kinkforge {

/// Symmetric 2x2 matrix acting on R^2 ~ C.
struct Sym2x2 {
    double m11 = 0.0, m12 = 0.0, m22 = 0.0;

    double quad(cplx h) const {
        double h1 = h.real(), h2 = h.imag();
        return m11 * h1 * h1 + 2.0 * m12 * h1 * h2 + m22 * h2 * h2;
    }
    cplx apply(cplx h) const {
        return cplx(m11 * h.real() + m12 * h.imag(), m12 * h.real() + m22 * h.imag());
    }
    double spectral_norm() const {
        double half_tr = 0.5 * (m11 + m22);
        double r = std::hypot(0.5 * (m11 - m22), m12);
        return std::max(std::abs(half_tr + r), std::abs(half_tr - r));
    }
};

inline double potential_W(const ComplexPoly& f, cplx z) { return std::norm(f(z)); }

/// grad W identified with a complex number: 2 f(z) conj(f'(z)).
inline cplx grad_W(const ComplexPoly& f, cplx z) {
    return 2.0 * f(z) * std::conj(f.derivative()(z));
}

/// h^T D^2W(z) h = 2|f'(z)|^2 |h|^2 + 2 Re(f''(z) conj(f(z)) h^2).
inline double hessian_form(const ComplexPoly& f, cplx z, cplx h) {
    const ComplexPoly fp = f.derivative();
    const ComplexPoly fpp = fp.derivative();
    return 2.0 * std::norm(fp(z)) * std::norm(h) +
           2.0 * std::real(fpp(z) * std::conj(f(z)) * h * h);
}

/// D^2W(z) recovered from the quadratic form by polarization.
inline Sym2x2 hessian_matrix(const ComplexPoly& f, cplx z) {
    Sym2x2 H;
    double q1 = hessian_form(f, z, cplx(1.0, 0.0));
    double qi = hessian_form(f, z, cplx(0.0, 1.0));
    double q1i = hessian_form(f, z, cplx(1.0, 1.0));
    H.m11 = q1;
    H.m22 = qi;
    H.m12 = 0.5 * (q1i - q1 - qi);
    return H;
}

/// Caches f and its derivatives plus the primitive g for hot loops.
struct Potential {
    ComplexPoly f, fp, fpp, g;

    explicit Potential(ComplexPoly f_)
        : f(std::move(f_)), fp(f.derivative()), fpp(fp.derivative()), g(f.antiderivative()) {}

    double W(cplx z) const { return std::norm(f(z)); }
    cplx grad(cplx z) const { return 2.0 * f(z) * std::conj(fp(z)); }
    double hess_form(cplx z, cplx h) const {
        return 2.0 * std::norm(fp(z)) * std::norm(h) +
               2.0 * std::real(fpp(z) * std::conj(f(z)) * h * h);
    }
    Sym2x2 hess(cplx z) const {
        Sym2x2 H;
        double q1 = hess_form(z, cplx(1.0, 0.0));
        double qi = hess_form(z, cplx(0.0, 1.0));
        H.m11 = q1;
        H.m22 = qi;
        H.m12 = 0.5 * (hess_form(z, cplx(1.0, 1.0)) - q1 - qi);
        return H;
    }
};

} // namespace kinkforge
