#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <kinkforge/orbit.hpp>
#include <kinkforge/presets.hpp>

using namespace kinkforge;

namespace {
const ComplexPoly phi4 = preset("phi4");
const ComplexPoly iphi4 = preset("iphi4");
const ComplexPoly triple = preset("triple");

double sup_error(const OrbitProfile& prof, cplx (*exact)(double)) {
    double m = 0.0;
    for (int i = 0; i <= prof.N; ++i)
        m = std::max(m, std::abs(prof.e[i] - exact(prof.x[i])));
    return m;
}

cplx tanh_kink(double x) { return cplx(std::tanh(std::sqrt(2.0) * x), 0.0); }
cplx rotated_kink(double x) { return cplx(0.0, std::tanh(std::sqrt(2.0) * x)); }
// -(1 + exp(2 sqrt2 x))^{-1/2} shifted so the g-segment midpoint sits at
// x = 0: s(t) = (t^2-1)^2/4 equals |dg|/2 = 1/8 at t^2 = 1 - 1/sqrt(2),
// which that representative reaches at x = ln(1+sqrt2)/(2 sqrt2).
cplx triple_kink(double x) {
    const double shift = std::log(1.0 + std::sqrt(2.0)) / (2.0 * std::sqrt(2.0));
    return cplx(-1.0 / std::sqrt(1.0 + std::exp(2.0 * std::sqrt(2.0) * (x + shift))), 0.0);
}
} // namespace

TEST_CASE("transport constant examples") {
    CHECK(std::abs(transport_constant(phi4.antiderivative(), cplx(-1, 0), cplx(1, 0)) -
                   cplx(-1, 0)) < 1e-15);
    CHECK(std::abs(transport_constant(iphi4.antiderivative(), cplx(0, -1), cplx(0, 1)) -
                   cplx(0, 1)) < 1e-15);
    CHECK_THROWS_AS(transport_constant(triple.antiderivative(), cplx(-1, 0), cplx(1, 0)),
                    DegenerateSegment);
}

TEST_CASE("phi4 orbit matches tanh(sqrt2 x)") {
    OrbitProfile prof = connect(phi4, cplx(-1, 0), cplx(1, 0));
    CHECK(sup_error(prof, tanh_kink) <= 1e-6);
    CHECK(std::abs(prof.m - cplx(-1, 0)) < 1e-14);
    CHECK(prof.k_minus == doctest::Approx(2 * std::sqrt(2.0)));
    CHECK(prof.k_plus == doctest::Approx(2 * std::sqrt(2.0)));
}

TEST_CASE("triple-well orbit -1 -> 0 matches the closed form") {
    OrbitProfile prof = connect(triple, cplx(-1, 0), cplx(0, 0));
    CHECK(sup_error(prof, triple_kink) <= 1e-6);
    CHECK(prof.k_minus == doctest::Approx(2 * std::sqrt(2.0)));
    CHECK(prof.k_plus == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("iphi4 orbit is the rotated kink") {
    OrbitProfile prof = connect(iphi4, cplx(0, -1), cplx(0, 1));
    CHECK(sup_error(prof, rotated_kink) <= 1e-6);
}

TEST_CASE("degenerate segment between the outer triple wells") {
    CHECK_THROWS_AS(connect(triple, cplx(-1, 0), cplx(1, 0)), DegenerateSegment);
}

TEST_CASE("closed-form energy") {
    CHECK(closed_form_energy(phi4.antiderivative(), cplx(-1, 0), cplx(1, 0)) ==
          doctest::Approx(std::sqrt(2.0) * 4.0 / 3.0).epsilon(1e-14));
    CHECK(closed_form_energy(triple.antiderivative(), cplx(-1, 0), cplx(0, 0)) ==
          doctest::Approx(std::sqrt(2.0) / 4.0).epsilon(1e-14));
    CHECK_THROWS_AS(closed_form_energy(phi4.antiderivative(), cplx(1, 0), cplx(1, 0)),
                    DegenerateSegment);
}

TEST_CASE("quadrature energy matches the closed form") {
    OrbitProfile p1 = connect(phi4, cplx(-1, 0), cplx(1, 0));
    double E1 = quadrature_energy(phi4, p1);
    CHECK(std::abs(E1 - std::sqrt(2.0) * 4.0 / 3.0) <= 1e-7 * E1);

    OrbitProfile p2 = connect(triple, cplx(-1, 0), cplx(0, 0));
    double E2 = quadrature_energy(triple, p2);
    CHECK(std::abs(E2 - std::sqrt(2.0) / 4.0) <= 1e-7 * E2);
}

TEST_CASE("quadrature energy rejects a degenerate grid") {
    OrbitProfile junk;
    junk.N = 4;
    CHECK_THROWS_AS(quadrature_energy(phi4, junk), InvalidGrid);
}

TEST_CASE("orbit diagnostics on the tanh profile") {
    OrbitProfile prof = connect(phi4, cplx(-1, 0), cplx(1, 0));
    Diagnostics d = verify_orbit(phi4, prof);
    CHECK(d.max_equipartition <= 1e-9);
    CHECK(d.max_segment_deviation <= 1e-9);
    CHECK(d.decay_fit_minus == doctest::Approx(2 * std::sqrt(2.0)).epsilon(0.01));
    CHECK(d.decay_fit_plus == doctest::Approx(2 * std::sqrt(2.0)).epsilon(0.01));
}

TEST_CASE("triple-well decay rates differ per side") {
    OrbitProfile prof = connect(triple, cplx(-1, 0), cplx(0, 0));
    Diagnostics d = verify_orbit(triple, prof);
    CHECK(d.decay_fit_minus == doctest::Approx(2 * std::sqrt(2.0)).epsilon(0.01));
    CHECK(d.decay_fit_plus == doctest::Approx(std::sqrt(2.0)).epsilon(0.01));
}

TEST_CASE("constant profile at a well has zero residuals") {
    OrbitProfile prof;
    prof.a_minus = prof.a_plus = cplx(1, 0);
    prof.m = cplx(1, 0);
    prof.X = 4.0;
    prof.N = 64;
    prof.k_minus = prof.k_plus = 2 * std::sqrt(2.0);
    prof.x.resize(prof.N + 1);
    prof.e.assign(prof.N + 1, cplx(1, 0));
    prof.eprime.assign(prof.N + 1, cplx(0, 0));
    for (int i = 0; i <= prof.N; ++i) prof.x[i] = -prof.X + i * prof.dx();
    Diagnostics d = verify_orbit(phi4, prof);
    CHECK(d.max_equipartition == 0.0);
    CHECK(d.max_second_order == 0.0);
}

TEST_CASE("determinism: identical options give bit-identical profiles") {
    OrbitProfile a = connect(phi4, cplx(-1, 0), cplx(1, 0));
    OrbitProfile b = connect(phi4, cplx(-1, 0), cplx(1, 0));
    REQUIRE(a.e.size() == b.e.size());
    for (std::size_t i = 0; i < a.e.size(); ++i) {
        CHECK(a.e[i] == b.e[i]);
        CHECK(a.eprime[i] == b.eprime[i]);
    }
    CHECK(a.energy == b.energy);
}

TEST_CASE("equivariance under rotation and translation") {
    const double phi = 0.7;
    const cplx b(0.3, 0.2);
    const cplx rot(std::cos(phi), std::sin(phi));
    // f~(z) = f(exp(-i phi)(z - b)) has wells at b + rot*(+-1).
    ComplexPoly ft = phi4.compose_linear(std::conj(rot), -std::conj(rot) * b);
    OrbitProfile base = connect(phi4, cplx(-1, 0), cplx(1, 0));
    OrbitProfile moved = connect(ft, b - rot, b + rot);
    double worst = 0.0;
    for (int i = 0; i <= base.N; ++i)
        worst = std::max(worst, std::abs(moved.e[i] - (b + rot * base.e[i])));
    CHECK(worst <= 1e-9);
}

TEST_CASE("scaling f -> c f compresses the orbit and scales the energy") {
    const double c = 2.0;
    OrbitProfile base = connect(phi4, cplx(-1, 0), cplx(1, 0));
    OrbitOptions opts;
    opts.X = base.X / c; // so scaled node j sits at x_j / c
    OrbitProfile scaled = connect(phi4.scaled(cplx(c, 0)), cplx(-1, 0), cplx(1, 0), opts);
    double worst = 0.0;
    for (int i = 0; i <= base.N; ++i)
        worst = std::max(worst, std::abs(scaled.e[i] - base.e[i]));
    CHECK(worst <= 1e-7);
    CHECK(std::abs(scaled.energy - c * base.energy) <= 1e-7 * scaled.energy);
}

TEST_CASE("segment coordinate is monotone") {
    OrbitProfile prof = connect(phi4, cplx(-1, 0), cplx(1, 0));
    Potential P(phi4);
    const cplx g0 = P.g(prof.a_minus);
    std::vector<double> s(prof.N + 1);
    for (int i = 0; i <= prof.N; ++i)
        s[i] = std::real(std::conj(prof.m) * (P.g(prof.e[i]) - g0));
    const double dg = std::abs(P.g(prof.a_plus) - g0);
    // Nondecreasing up to the roundoff noise of evaluating g(e) - g(a-)
    // in the far tails, where the true increment is below double eps.
    for (int i = 0; i < prof.N; ++i) CHECK(s[i + 1] >= s[i] - 1e-14 * (1.0 + dg));
    // Strict increase where the increment is resolvable in doubles.
    for (int i = 3 * prof.N / 10; i < 7 * prof.N / 10; ++i) CHECK(s[i + 1] > s[i]);
    CHECK(s[0] >= -1e-12);
    CHECK(s[prof.N] <= dg + 1e-12);
    CHECK(std::abs(s[prof.N / 2] - dg / 2) <= 1e-9);
}
