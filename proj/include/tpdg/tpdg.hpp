#pragma once

// Umbrella header for the two-phase ADER-DG solver library.

#include "tpdg/cases.hpp"
#include "tpdg/config.hpp"
#include "tpdg/dg.hpp"
#include "tpdg/eos.hpp"
#include "tpdg/grid.hpp"
#include "tpdg/hyperbolicity.hpp"
#include "tpdg/io.hpp"
#include "tpdg/limiter.hpp"
#include "tpdg/model.hpp"
#include "tpdg/norms.hpp"
#include "tpdg/refsol.hpp"
#include "tpdg/runner.hpp"
#include "tpdg/state.hpp"
#include "tpdg/stepper.hpp"
