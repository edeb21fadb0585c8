#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <kinkforge/presets.hpp>
#include <kinkforge/spectral.hpp>

using namespace kinkforge;

namespace {
const ComplexPoly phi4 = preset("phi4");
const ComplexPoly iphi4 = preset("iphi4");
const ComplexPoly triple = preset("triple");

const OrbitProfile& tanh_profile() {
    static OrbitProfile prof = connect(phi4, cplx(-1, 0), cplx(1, 0));
    return prof;
}

OrbitProfile constant_profile(cplx a, double X, int N) {
    OrbitProfile prof;
    prof.a_minus = prof.a_plus = a;
    prof.m = cplx(1, 0);
    prof.X = X;
    prof.N = N;
    prof.k_minus = prof.k_plus = 2 * std::sqrt(2.0);
    prof.x.resize(N + 1);
    prof.e.assign(N + 1, a);
    prof.eprime.assign(N + 1, cplx(0, 0));
    for (int i = 0; i <= N; ++i) prof.x[i] = -X + i * prof.dx();
    return prof;
}
} // namespace

TEST_CASE("constant-well operator has the closed-form Dirichlet spectrum") {
    // e == 1 for f = z^2 - 1: potential 8 I, Laplacian eigenvalues known.
    OrbitProfile prof = constant_profile(cplx(1, 0), 2.0, 4); // N_int = 3
    DiscretizedOperator op = assemble(phi4, prof);
    REQUIRE(op.n_int == 3);
    EigenPairs pairs = lowest_eigenpairs(op, 6, 1e-8);
    const double dx = prof.dx();
    std::vector<double> expect;
    for (int j = 1; j <= 3; ++j) {
        double v = 8.0 + (2.0 / (dx * dx)) * (1.0 - std::cos(M_PI * j / 4.0));
        expect.push_back(v);
        expect.push_back(v); // two components, each eigenvalue doubled
    }
    std::sort(expect.begin(), expect.end());
    for (int j = 0; j < 6; ++j)
        CHECK(pairs.theta[j] == doctest::Approx(expect[j]).epsilon(1e-10));
}

TEST_CASE("assembled potential blocks on the tanh profile") {
    const auto& prof = tanh_profile();
    DiscretizedOperator op = assemble(phi4, prof);
    const double lap = 2.0 / (op.dx * op.dx);
    for (int i : {1, prof.N / 2, prof.N - 1}) {
        double t = prof.e[i].real();
        CHECK(op.diag[i - 1].m11 - lap == doctest::Approx(12 * t * t - 4).epsilon(1e-10));
        CHECK(op.diag[i - 1].m22 - lap == doctest::Approx(4 * t * t + 4).epsilon(1e-10));
        CHECK(std::abs(op.diag[i - 1].m12) < 1e-10);
    }
}

TEST_CASE("assemble rejects an empty interior") {
    OrbitProfile junk;
    junk.N = 1;
    CHECK_THROWS_AS(assemble(phi4, junk), InvalidGrid);
}

TEST_CASE("inertia counts at the phi4 shifts") {
    DiscretizedOperator op = assemble(phi4, tanh_profile());
    CHECK(inertia(op, -0.5) == 0);
    CHECK(inertia(op, 3.0) == 1);
    CHECK(inertia(op, 7.0) == 3);
}

TEST_CASE("inertia is nondecreasing and consistent with the eigenvalue multiset") {
    DiscretizedOperator op = assemble(phi4, tanh_profile());
    EigenPairs pairs = lowest_eigenpairs(op, 3, 1e-8);
    double prev = -1.0;
    int last = -1;
    for (double s : {-1.0, 0.5, 3.0, 5.0, 6.5, 7.9}) {
        int c = inertia(op, s);
        CHECK(c >= last);
        last = c;
        int expected = 0;
        for (double th : pairs.theta)
            if (th < s) ++expected;
        if (c <= 3) CHECK(c == expected);
        prev = s;
    }
    (void)prev;
}

TEST_CASE("phi4 eigenvalues reproduce the Poschl-Teller levels {0, 6, 6}") {
    SpectralReport rep = spectral_report(phi4, tanh_profile());
    REQUIRE(rep.theta.size() == 3);
    CHECK(std::abs(rep.theta[0]) <= 1e-3);
    CHECK(rep.theta[1] == doctest::Approx(6.0).epsilon(0.01));
    CHECK(rep.theta[2] == doctest::Approx(6.0).epsilon(0.01));
    for (double r : rep.residuals) CHECK(r <= 1e-8);
    CHECK(rep.alignment >= 0.9999);
    CHECK(rep.M == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(rep.verdict);
    // theta_0 sits at the O(dx^2) discretization floor, slightly negative.
    for (double th : rep.theta) CHECK(th >= -1e-3);
}

TEST_CASE("triple-well report: zero mode, positive gap, M = 2") {
    OrbitProfile prof = connect(triple, cplx(-1, 0), cplx(0, 0));
    SpectralReport rep = spectral_report(triple, prof);
    CHECK(std::abs(rep.theta[0]) <= 1e-3);
    CHECK(rep.theta[1] > 0.0);
    CHECK(rep.M == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(rep.verdict);
}

TEST_CASE("essential edge examples") {
    CHECK(essential_edge(phi4, cplx(-1, 0), cplx(1, 0)) == doctest::Approx(8.0));
    CHECK(essential_edge(triple, cplx(-1, 0), cplx(0, 0)) == doctest::Approx(2.0));
    CHECK(essential_edge(iphi4, cplx(0, -1), cplx(0, 1)) == doctest::Approx(8.0));
}

TEST_CASE("verdict threshold logic on a synthetic report") {
    SpectralReport rep;
    rep.theta = {0.0, 0.0, 1.0};
    rep.alignment = 1.0;
    rep.theta_zero_tol = 1e-3;
    CHECK_FALSE(nondegeneracy_verdict(rep, 2.0)); // theta_1 = 0 below threshold
    rep.theta = {0.0, 6.0, 6.0};
    CHECK(nondegeneracy_verdict(rep, 2.0));
    rep.alignment = 0.5;
    CHECK_FALSE(nondegeneracy_verdict(rep, 2.0));
}

TEST_CASE("grid refinement drives theta_0 to zero at second order") {
    // At fixed X, |theta_0| should drop by about 4x when N doubles.
    OrbitOptions o1;
    o1.N = 1024;
    OrbitOptions o2;
    o2.N = 2048;
    OrbitProfile p1 = connect(phi4, cplx(-1, 0), cplx(1, 0), o1);
    OrbitProfile p2 = connect(phi4, cplx(-1, 0), cplx(1, 0), o2);
    double t1 = std::abs(lowest_eigenpairs(assemble(phi4, p1), 1).theta[0]);
    double t2 = std::abs(lowest_eigenpairs(assemble(phi4, p2), 1).theta[0]);
    CHECK(t2 < t1);
    CHECK(t1 / t2 == doctest::Approx(4.0).epsilon(0.35));
}
