#pragma once

// Umbrella header.

#include "annpair/numeric.hpp"
#include "annpair/interval_set.hpp"
#include "annpair/set_predicates.hpp"
#include "annpair/trig_poly.hpp"
#include "annpair/bump.hpp"
#include "annpair/counterexample.hpp"
#include "annpair/concentration.hpp"
#include "annpair/scale_search.hpp"
#include "annpair/global_assembly.hpp"
#include "annpair/lattice_counting.hpp"
#include "annpair/json_io.hpp"
#include "annpair/cli_harness.hpp"
