#pragma once

#include <cstdio>
#include <ostream>
#include <string>

#include <json.hpp>

#include "coercivity.hpp"
#include "complex_poly.hpp"
#include "linearization.hpp"
#include "orbit.hpp"
#include "spectral.hpp"

namespace kinkforge {

using json = nlohmann::ordered_json;

/// Polynomial JSON: {"coeffs": [[re,im],...]} ascending degree.
inline ComplexPoly poly_from_json(const json& j) {
    if (!j.is_object() || !j.contains("coeffs") || !j["coeffs"].is_array())
        throw ConfigError("polynomial JSON must be {\"coeffs\": [[re,im],...]}");
    std::vector<cplx> coeffs;
    for (const auto& c : j["coeffs"]) {
        if (!c.is_array() || c.size() != 2)
            throw ConfigError("polynomial coefficient must be [re, im]");
        coeffs.emplace_back(c[0].get<double>(), c[1].get<double>());
    }
    return ComplexPoly(std::move(coeffs));
}

inline ComplexPoly poly_from_json_string(const std::string& s) {
    return poly_from_json(json::parse(s));
}

inline json poly_to_json(const ComplexPoly& p) {
    json arr = json::array();
    for (const auto& c : p.coeffs()) arr.push_back({c.real(), c.imag()});
    return json{{"coeffs", arr}};
}

inline json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

/// Orbit CSV: header "x,e1,e2,de1,de2", 17 significant digits, LF endings.
inline void write_orbit_csv(std::ostream& os, const OrbitProfile& prof) {
    os << "x,e1,e2,de1,de2\n";
    char buf[160];
    for (int i = 0; i <= prof.N; ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n", prof.x[i],
                      prof.e[i].real(), prof.e[i].imag(), prof.eprime[i].real(),
                      prof.eprime[i].imag());
        os << buf;
    }
}

inline json diagnostics_json(const Diagnostics& d) {
    return json{
        {"max_equipartition", d.max_equipartition},
        {"max_second_order", d.max_second_order},
        {"max_segment_deviation", d.max_segment_deviation},
        {"decay_fit_minus", d.decay_fit_minus},
        {"decay_fit_plus", d.decay_fit_plus},
    };
}

inline json orbit_metadata_json(const OrbitProfile& prof, const Diagnostics& diag) {
    return json{
        {"a_minus", complex_to_json(prof.a_minus)},
        {"a_plus", complex_to_json(prof.a_plus)},
        {"m", complex_to_json(prof.m)},
        {"X", prof.X},
        {"N", prof.N},
        {"energy", prof.energy},
        {"k_minus", prof.k_minus},
        {"k_plus", prof.k_plus},
        {"diagnostics", diagnostics_json(diag)},
    };
}

inline json spectral_json(const SpectralReport& rep) {
    return json{
        {"theta", rep.theta},
        {"residuals", rep.residuals},
        {"alignment", rep.alignment},
        {"M", rep.M},
        {"verdict", rep.verdict},
        {"X", rep.X},
        {"N", rep.N},
    };
}

inline json linearization_json(const FactorizationReport& fac, int kernel_dim,
                               double wronskian_dev) {
    return json{
        {"factorization_gap", fac.max_gap},
        {"kernel_dim", kernel_dim},
        {"wronskian_dev", wronskian_dev},
        {"pass", fac.pass && kernel_dim == 1 && wronskian_dev <= 1e-6},
    };
}

inline json coercivity_json(const CoercivityReport& rep) {
    return json{
        {"lambda", rep.lambda},
        {"mu", rep.mu},
        {"alpha", rep.alpha},
        {"beta", rep.beta},
        {"delta_fit", rep.delta_fit},
        {"gamma", rep.gamma_used},
        {"form2_pass", rep.form2_pass},
        {"form1_pass", rep.form1_pass},
    };
}

} // namespace kinkforge
