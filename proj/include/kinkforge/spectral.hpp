#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "complex_poly.hpp"
#include "numerics.hpp"
#include "orbit.hpp"
#include "potential.hpp"

namespace kinkforge {

/// L = -h'' + D^2W(e) h on the Dirichlet-truncated interval, 3-point
/// Laplacian, interleaved components (h1_i, h2_i) at interior nodes.
/// Symmetric banded matrix of bandwidth 2.
struct DiscretizedOperator {
    int n_int = 0;   // interior node count
    double dx = 0.0;
    std::vector<Sym2x2> diag; // 2/dx^2 I + D^2W(e_i), i = 1..n_int
    double off = 0.0;         // -1/dx^2 neighbor coupling, per component

    int size() const { return 2 * n_int; }

    double potential_norm_max() const {
        double m = 0.0;
        const double shift = 2.0 / (dx * dx);
        for (const auto& D : diag) {
            Sym2x2 V{D.m11 - shift, D.m12, D.m22 - shift};
            m = std::max(m, V.spectral_norm());
        }
        return m;
    }

    void apply(const std::vector<double>& v, std::vector<double>& out) const {
        const int n = size();
        out.assign(n, 0.0);
        for (int i = 0; i < n_int; ++i) {
            const Sym2x2& D = diag[i];
            double h1 = v[2 * i], h2 = v[2 * i + 1];
            out[2 * i] += D.m11 * h1 + D.m12 * h2;
            out[2 * i + 1] += D.m12 * h1 + D.m22 * h2;
            if (i > 0) {
                out[2 * i] += off * v[2 * (i - 1)];
                out[2 * i + 1] += off * v[2 * (i - 1) + 1];
            }
            if (i + 1 < n_int) {
                out[2 * i] += off * v[2 * (i + 1)];
                out[2 * i + 1] += off * v[2 * (i + 1) + 1];
            }
        }
    }
};

inline DiscretizedOperator assemble(const ComplexPoly& f, const OrbitProfile& prof) {
    if (prof.N < 2) throw InvalidGrid("assemble: no interior nodes");
    Potential P(f);
    DiscretizedOperator op;
    op.n_int = prof.N - 1;
    op.dx = prof.dx();
    op.off = -1.0 / (op.dx * op.dx);
    op.diag.resize(op.n_int);
    const double lap = 2.0 / (op.dx * op.dx);
    for (int i = 1; i < prof.N; ++i) {
        Sym2x2 H = P.hess(prof.e[i]);
        op.diag[i - 1] = Sym2x2{H.m11 + lap, H.m12, H.m22 + lap};
    }
    return op;
}

namespace detail {

// Banded LDL^T, bandwidth 2, no pivoting. Throws Breakdown on a near-zero
// pivot; inertia callers jitter the shift and retry.
struct BandLdlt {
    std::vector<double> d, l1, l2; // D diagonal, first/second subdiagonal of unit L
    int negatives = 0;

    void factor(const DiscretizedOperator& op, double sigma) {
        const int n = op.size();
        std::vector<double> a0(n), a1(n, 0.0), a2(n, 0.0);
        double scale = 0.0;
        for (int i = 0; i < op.n_int; ++i) {
            a0[2 * i] = op.diag[i].m11 - sigma;
            a0[2 * i + 1] = op.diag[i].m22 - sigma;
            a1[2 * i] = op.diag[i].m12;
            if (i + 1 < op.n_int) {
                a2[2 * i] = op.off;
                a2[2 * i + 1] = op.off;
            }
            scale = std::max({scale, std::abs(a0[2 * i]), std::abs(a0[2 * i + 1]),
                              std::abs(op.diag[i].m12), std::abs(op.off)});
        }
        d.assign(n, 0.0);
        l1.assign(n, 0.0);
        l2.assign(n, 0.0);
        negatives = 0;
        const double tiny = 1e-14 * std::max(scale, 1.0);
        for (int j = 0; j < n; ++j) {
            double dj = a0[j];
            if (j >= 1) dj -= l1[j - 1] * l1[j - 1] * d[j - 1];
            if (j >= 2) dj -= l2[j - 2] * l2[j - 2] * d[j - 2];
            if (std::abs(dj) < tiny) throw Breakdown("ldlt: near-singular pivot");
            d[j] = dj;
            if (dj < 0.0) ++negatives;
            if (j + 1 < n) {
                double a = a1[j];
                if (j >= 1) a -= l2[j - 1] * l1[j - 1] * d[j - 1];
                l1[j] = a / dj;
            }
            if (j + 2 < n) l2[j] = a2[j] / dj;
        }
    }

    void solve(std::vector<double>& b) const {
        const int n = static_cast<int>(d.size());
        for (int j = 0; j < n; ++j) {
            if (j >= 1) b[j] -= l1[j - 1] * b[j - 1];
            if (j >= 2) b[j] -= l2[j - 2] * b[j - 2];
        }
        for (int j = 0; j < n; ++j) b[j] /= d[j];
        for (int j = n - 1; j >= 0; --j) {
            if (j + 1 < n) b[j] -= l1[j] * b[j + 1];
            if (j + 2 < n) b[j] -= l2[j] * b[j + 2];
        }
    }
};

} // namespace detail

/// Number of eigenvalues below sigma (Sylvester inertia of the shifted
/// LDL^T). Retries with a jittered shift on factorization breakdown.
inline int inertia(const DiscretizedOperator& op, double sigma) {
    detail::BandLdlt f;
    double s = sigma;
    for (int attempt = 0; attempt < 8; ++attempt) {
        try {
            f.factor(op, s);
            return f.negatives;
        } catch (const Breakdown&) {
            s += 1e-9 * std::max(1.0, std::abs(s)) * (attempt + 1);
        }
    }
    throw NonConvergence("inertia: persistent factorization breakdown");
}

struct EigenPairs {
    std::vector<double> theta;
    std::vector<std::vector<double>> vectors; // unit l2 norm
    std::vector<double> residuals;            // ||Kv - theta v|| / ||v||
};

/// k smallest eigenpairs: inertia-guided bisection isolates each
/// eigenvalue, inverse iteration with the banded factorization recovers
/// the vectors; clusters get block iteration with orthogonalization.
inline EigenPairs lowest_eigenpairs(const DiscretizedOperator& op, int k, double tol = 1e-8,
                                    std::uint64_t seed = 0x5EED) {
    if (k < 1) throw ConfigError("lowest_eigenpairs: k must be >= 1");
    const int n = op.size();
    if (k > n) throw ConfigError("lowest_eigenpairs: k exceeds matrix size");

    // Gershgorin bounds.
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i < op.n_int; ++i) {
        double r1 = std::abs(op.diag[i].m12) + 2.0 * std::abs(op.off);
        lo = std::min({lo, op.diag[i].m11 - r1, op.diag[i].m22 - r1});
        hi = std::max({hi, op.diag[i].m11 + r1, op.diag[i].m22 + r1});
    }
    const double scale = std::max(std::abs(lo), std::abs(hi));

    auto count = [&](double s) { return inertia(op, s); };

    EigenPairs out;
    SplitMix64 rng(seed);

    auto dot = [n](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += a[i] * b[i];
        return s;
    };
    auto norm = [&](const std::vector<double>& a) { return std::sqrt(dot(a, a)); };

    std::vector<double> Kv(n);

    int j = 0;
    while (j < k) {
        // Bisect for the j-th eigenvalue.
        double a = lo, b = hi;
        const double width_tol = std::max(1e-12 * scale, 1e-13);
        while (b - a > width_tol) {
            double midpt = 0.5 * (a + b);
            if (count(midpt) >= j + 1) b = midpt; else a = midpt;
        }
        int mult = std::min(count(b) - count(a), k - j);
        if (mult < 1) mult = 1;

        // Block inverse iteration at the interval midpoint.
        double sigma = 0.5 * (a + b);
        detail::BandLdlt fac;
        for (int attempt = 0;; ++attempt) {
            try {
                fac.factor(op, sigma);
                break;
            } catch (const Breakdown&) {
                if (attempt >= 8) throw NonConvergence("lowest_eigenpairs: shift breakdown");
                sigma += 1e-9 * std::max(1.0, std::abs(sigma)) * (attempt + 1);
            }
        }
        std::vector<std::vector<double>> block(mult, std::vector<double>(n));
        for (auto& v : block)
            for (auto& vi : v) vi = rng.uniform(-1.0, 1.0);

        std::vector<double> thetas(mult, sigma);
        std::vector<double> resids(mult, 1e300);
        bool converged = false;
        for (int it = 0; it < 200 && !converged; ++it) {
            for (int b2 = 0; b2 < mult; ++b2) {
                fac.solve(block[b2]);
                // Orthogonalize against earlier eigenvectors that are
                // spectrally close, and against the current block.
                for (std::size_t p = 0; p < out.vectors.size(); ++p)
                    if (std::abs(out.theta[p] - sigma) < 1e-6 * std::max(1.0, scale)) {
                        double c = dot(block[b2], out.vectors[p]);
                        for (int i = 0; i < n; ++i) block[b2][i] -= c * out.vectors[p][i];
                    }
                for (int p = 0; p < b2; ++p) {
                    double c = dot(block[b2], block[p]);
                    for (int i = 0; i < n; ++i) block[b2][i] -= c * block[p][i];
                }
                double nv = norm(block[b2]);
                if (nv == 0.0) throw NonConvergence("lowest_eigenpairs: null iterate");
                for (auto& vi : block[b2]) vi /= nv;
            }
            converged = true;
            for (int b2 = 0; b2 < mult; ++b2) {
                op.apply(block[b2], Kv);
                thetas[b2] = dot(block[b2], Kv);
                double r2 = 0.0;
                for (int i = 0; i < n; ++i) {
                    double ri = Kv[i] - thetas[b2] * block[b2][i];
                    r2 += ri * ri;
                }
                resids[b2] = std::sqrt(r2);
                if (resids[b2] > tol) converged = false;
            }
        }
        if (!converged) throw NonConvergence("lowest_eigenpairs: inverse iteration cap");

        // Keep block sorted by theta.
        std::vector<int> order(mult);
        for (int p = 0; p < mult; ++p) order[p] = p;
        std::sort(order.begin(), order.end(),
                  [&](int x, int y) { return thetas[x] < thetas[y]; });
        for (int p : order) {
            out.theta.push_back(thetas[p]);
            out.vectors.push_back(std::move(block[p]));
            out.residuals.push_back(resids[p]);
        }
        j += mult;
        lo = b; // next eigenvalues lie above this interval
    }
    return out;
}

/// Volpert essential-spectrum edge M = 2 min(|f'(a-)|^2, |f'(a+)|^2).
inline double essential_edge(const ComplexPoly& f, cplx a_minus, cplx a_plus) {
    const ComplexPoly fp = f.derivative();
    return 2.0 * std::min(std::norm(fp(a_minus)), std::norm(fp(a_plus)));
}

struct SpectralReport {
    std::vector<double> theta;
    std::vector<double> residuals;
    double alignment = 0.0; // |<v0, e'>| / (||v0|| ||e'||), discrete l2
    double M = 0.0;
    bool verdict = false;
    double X = 0.0;
    int N = 0;
    double theta_zero_tol = 0.0;
    double gap_threshold = 0.0;
};

inline bool nondegeneracy_verdict(const SpectralReport& rep, double gap_threshold) {
    if (rep.theta.size() < 2) return false;
    return std::abs(rep.theta[0]) <= rep.theta_zero_tol &&
           rep.theta[0] > -rep.theta_zero_tol &&
           rep.alignment >= 0.9999 &&
           rep.theta[1] >= gap_threshold;
}

/// Full spectral pipeline: assemble, k lowest eigenpairs, alignment of
/// the ground vector with e', essential edge, verdict.
inline SpectralReport spectral_report(const ComplexPoly& f, const OrbitProfile& prof,
                                      int k = 3, double tol = 1e-8,
                                      std::uint64_t seed = 0x5EED,
                                      double gap_threshold_factor = 0.25) {
    DiscretizedOperator op = assemble(f, prof);
    EigenPairs pairs = lowest_eigenpairs(op, k, tol, seed);

    SpectralReport rep;
    rep.theta = pairs.theta;
    rep.residuals = pairs.residuals;
    rep.X = prof.X;
    rep.N = prof.N;
    rep.M = essential_edge(f, prof.a_minus, prof.a_plus);
    rep.gap_threshold = gap_threshold_factor * rep.M;
    rep.theta_zero_tol = std::max(1e-3, 10.0 * op.dx * op.dx * op.potential_norm_max());

    // Alignment of v0 with e' restricted to interior nodes.
    std::vector<double> ep(op.size());
    for (int i = 1; i < prof.N; ++i) {
        ep[2 * (i - 1)] = prof.eprime[i].real();
        ep[2 * (i - 1) + 1] = prof.eprime[i].imag();
    }
    double n_ep = 0.0, n_v = 0.0, dot = 0.0;
    for (int i = 0; i < op.size(); ++i) {
        n_ep += ep[i] * ep[i];
        n_v += pairs.vectors[0][i] * pairs.vectors[0][i];
        dot += ep[i] * pairs.vectors[0][i];
    }
    rep.alignment = std::abs(dot) / std::sqrt(n_ep * n_v);
    rep.verdict = nondegeneracy_verdict(rep, rep.gap_threshold);
    return rep;
}

} // namespace kinkforge
