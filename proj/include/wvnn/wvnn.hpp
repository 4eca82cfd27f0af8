#pragma once

// Umbrella header: weak values, non-normal operators and the Henrici
// departure toolkit.

#include "wvnn/complexmat.hpp"
#include "wvnn/eig.hpp"
#include "wvnn/error.hpp"
#include "wvnn/meter.hpp"
#include "wvnn/observables.hpp"
#include "wvnn/oracles.hpp"
#include "wvnn/rng.hpp"
#include "wvnn/selftest.hpp"
#include "wvnn/states.hpp"
#include "wvnn/sweep.hpp"
#include "wvnn/weak.hpp"
