#pragma once

#include <string>
#include <vector>

#include "complex_poly.hpp"

namespace kinkforge {

/// Named polynomials used throughout the test and acceptance suites.
///   phi4   f = z^2 - 1     (wells at -1, +1)
///   iphi4  f = z^2 + 1     (wells at -i, +i)
///   triple f = z^3 - z     (wells at -1, 0, +1)
inline ComplexPoly preset(const std::string& name) {
    if (name == "phi4") return ComplexPoly({{-1.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}});
    if (name == "iphi4") return ComplexPoly({{1.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}});
    if (name == "triple") return ComplexPoly({{0.0, 0.0}, {-1.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}});
    throw ConfigError("unknown preset: " + name);
}

/// Product of distance factors: f = prod (z - a_i).
inline ComplexPoly product_preset(const std::vector<cplx>& points) {
    if (points.empty()) throw ConfigError("product preset: need at least one point");
    return ComplexPoly::from_roots(points);
}

} // namespace kinkforge
