#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <kinkforge/linearization.hpp>
#include <kinkforge/presets.hpp>

using namespace kinkforge;

namespace {
const ComplexPoly phi4 = preset("phi4");
const ComplexPoly iphi4 = preset("iphi4");
const ComplexPoly triple = preset("triple");

const OrbitProfile& tanh_profile() {
    static OrbitProfile prof = connect(phi4, cplx(-1, 0), cplx(1, 0));
    return prof;
}
const OrbitProfile& triple_profile() {
    static OrbitProfile prof = connect(triple, cplx(-1, 0), cplx(0, 0));
    return prof;
}

GridField eprime_field(const OrbitProfile& prof) {
    GridField g;
    g.h = prof.eprime;
    return g;
}

double sup_abs(const std::vector<cplx>& v) {
    double m = 0.0;
    for (const auto& x : v) m = std::max(m, std::abs(x));
    return m;
}
} // namespace

TEST_CASE("both quadratic forms vanish on e'") {
    const auto& prof = tanh_profile();
    GridField ep = eprime_field(prof);
    CHECK(std::abs(quad_form_direct(phi4, prof, ep)) <= 5e-6);
    CHECK(std::abs(quad_form_factored(phi4, prof, ep)) <= 5e-6);
}

TEST_CASE("factored form is nonnegative, zero field gives zero") {
    const auto& prof = tanh_profile();
    for (const auto& field : random_bumps(prof, 10))
        CHECK(quad_form_factored(phi4, prof, field) >= 0.0);
    GridField zero;
    zero.h.assign(prof.N + 1, cplx(0.0));
    CHECK(quad_form_direct(phi4, prof, zero) == 0.0);
    CHECK(quad_form_factored(phi4, prof, zero) == 0.0);
}

TEST_CASE("factorization identity over random bumps") {
    auto check = [](const ComplexPoly& f, const OrbitProfile& prof) {
        auto rep = factorization_gap(f, prof, random_bumps(prof, 50));
        CHECK(rep.pass);
        CHECK(rep.max_gap <= 1e-7);
    };
    check(phi4, tanh_profile());
    check(triple, triple_profile());
}

TEST_CASE("Gaussian bump: direct equals factored tightly") {
    const auto& prof = tanh_profile();
    GridField g;
    g.h.resize(prof.N + 1);
    for (int i = 0; i <= prof.N; ++i) g.h[i] = std::exp(-prof.x[i] * prof.x[i]);
    double d = quad_form_direct(phi4, prof, g);
    double q = quad_form_factored(phi4, prof, g);
    CHECK(std::abs(d - q) <= 1e-8 * (1.0 + std::abs(d)));
}

TEST_CASE("nonnegativity of the direct form") {
    const auto& prof = tanh_profile();
    const double dx = prof.dx();
    for (const auto& field : random_bumps(prof, 30)) {
        std::vector<double> n2(field.h.size());
        for (std::size_t i = 0; i < field.h.size(); ++i) n2[i] = std::norm(field.h[i]);
        double l2 = simpson(n2, dx);
        CHECK(quad_form_direct(phi4, prof, field) >= -1e-7 * (1.0 + l2));
    }
}

TEST_CASE("kernel ODE reproduces e' from its midpoint value") {
    auto check = [](const ComplexPoly& f, const OrbitProfile& prof) {
        int mid = prof.N / 2;
        GridField h = kernel_ode(f, prof, prof.eprime[mid], mid);
        double worst = 0.0;
        for (int i = 0; i <= prof.N; ++i)
            worst = std::max(worst, std::abs(h.h[i] - prof.eprime[i]));
        CHECK(worst / sup_abs(prof.eprime) <= 1e-7);
    };
    check(phi4, tanh_profile());
    check(triple, triple_profile());
}

TEST_CASE("kernel ODE is exactly linear in its data") {
    const auto& prof = tanh_profile();
    int mid = prof.N / 2;
    GridField a = kernel_ode(phi4, prof, cplx(0.3, 0.4), mid);
    GridField b = kernel_ode(phi4, prof, 2.0 * cplx(0.3, 0.4), mid);
    for (int i = 0; i <= prof.N; i += 97)
        CHECK(std::abs(b.h[i] - 2.0 * a.h[i]) <= 1e-12 * (1.0 + std::abs(b.h[i])));
    GridField z = kernel_ode(phi4, prof, cplx(0, 0), mid);
    CHECK(sup_abs(z.h) == 0.0);
}

TEST_CASE("second fundamental solution grows both ways") {
    const auto& prof = tanh_profile();
    int mid = prof.N / 2;
    GridField h = kernel_ode(phi4, prof, cplx(0, 1) * prof.eprime[mid], mid);
    CHECK(std::abs(h.h[prof.N]) > 1e6 * std::abs(h.h[mid]));
    CHECK(std::abs(h.h[0]) > 1e6 * std::abs(h.h[mid]));
}

TEST_CASE("Wronskian of e' with itself vanishes") {
    const auto& prof = tanh_profile();
    auto res = wronskian(prof, eprime_field(prof));
    for (double w : res.w) CHECK(std::abs(w) <= 1e-12);
}

TEST_CASE("Wronskian constancy for the growing solution") {
    auto check = [](const ComplexPoly& f, const OrbitProfile& prof) {
        int mid = prof.N / 2;
        GridField h = kernel_ode(f, prof, cplx(0, 1) * prof.eprime[mid], mid);
        auto res = wronskian(prof, h);
        REQUIRE(std::abs(res.mid_value) > 0.0);
        CHECK(res.max_deviation / std::abs(res.mid_value) <= 1e-6);
    };
    check(phi4, tanh_profile());
    check(triple, triple_profile());
    check(iphi4, connect(iphi4, cplx(0, -1), cplx(0, 1)));
}

TEST_CASE("random non-solution field has a wandering Wronskian") {
    const auto& prof = tanh_profile();
    GridField g = random_bumps(prof, 1, 777)[0];
    auto res = wronskian(prof, g);
    CHECK(res.max_deviation > 1e-3 * sup_abs(prof.eprime));
}

TEST_CASE("kernel dimension is one on all presets") {
    CHECK(kernel_dimension(phi4, tanh_profile()) == 1);
    CHECK(kernel_dimension(triple, triple_profile()) == 1);
    CHECK(kernel_dimension(iphi4, connect(iphi4, cplx(0, -1), cplx(0, 1))) == 1);
}

TEST_CASE("matched decaying solution is parallel to e'") {
    const auto& prof = tanh_profile();
    GridField h = decaying_kernel_solution(phi4, prof);
    const double dx = prof.dx();
    auto h1 = [&](const std::vector<cplx>& a, const std::vector<cplx>& b) {
        auto ap = derivative4(a, dx), bp = derivative4(b, dx);
        std::vector<double> v(a.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            v[i] = std::real(std::conj(a[i]) * b[i]) + std::real(std::conj(ap[i]) * bp[i]);
        return simpson(v, dx);
    };
    double cosang = std::abs(h1(h.h, prof.eprime)) /
                    std::sqrt(h1(h.h, h.h) * h1(prof.eprime, prof.eprime));
    CHECK(cosang >= 0.9999);
}
