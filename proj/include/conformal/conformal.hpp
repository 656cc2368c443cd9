#pragma once

#include "conformal/critical_curves.hpp"
#include "conformal/errors.hpp"
#include "conformal/geometry_analysis.hpp"
#include "conformal/io.hpp"
#include "conformal/mobius.hpp"
#include "conformal/moduli.hpp"
#include "conformal/period_map.hpp"
#include "conformal/quadrature.hpp"
#include "conformal/special_functions.hpp"
#include "conformal/string_synthesis.hpp"
