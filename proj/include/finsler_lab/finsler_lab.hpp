#pragma once

#include "finsler_lab/error.hpp"
#include "finsler_lab/types.hpp"
#include "finsler_lab/core_geometry.hpp"
#include "finsler_lab/quadrature.hpp"
#include "finsler_lab/indicatrix_volume.hpp"
#include "finsler_lab/field_theory.hpp"
#include "finsler_lab/series.hpp"
#include "finsler_lab/ode.hpp"
#include "finsler_lab/cosmology.hpp"
#include "finsler_lab/curvature.hpp"
#include "finsler_lab/geodesics.hpp"

namespace finsler {
inline constexpr const char* kVersion = "0.1.0";
}
