#pragma once

// Umbrella header.

#include "nubound/asymptotic.hpp"
#include "nubound/axioms.hpp"
#include "nubound/errors.hpp"
#include "nubound/format.hpp"
#include "nubound/log.hpp"
#include "nubound/mapping.hpp"
#include "nubound/norm.hpp"
#include "nubound/num.hpp"
#include "nubound/random.hpp"
#include "nubound/scenario.hpp"
#include "nubound/scenario_io.hpp"
#include "nubound/solver.hpp"
#include "nubound/vector.hpp"
