#pragma once

#include "opa/coeff_series.hpp"
#include "opa/boundary.hpp"
#include "opa/spaces.hpp"
#include "opa/solver.hpp"
#include "opa/blaschke.hpp"
#include "opa/rudin.hpp"
#include "opa/zerofree.hpp"
#include "opa/steer.hpp"
#include "opa/io.hpp"
