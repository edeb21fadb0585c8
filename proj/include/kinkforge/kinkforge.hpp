#pragma once

#include "coercivity.hpp"
#include "complex_poly.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "linearization.hpp"
#include "numerics.hpp"
#include "orbit.hpp"
#include "potential.hpp"
#include "presets.hpp"
#include "spectral.hpp"
