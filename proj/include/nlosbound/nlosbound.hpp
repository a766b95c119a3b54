#pragma once

#include "nlosbound/bounds.hpp"
#include "nlosbound/geometry.hpp"
#include "nlosbound/io.hpp"
#include "nlosbound/linalg.hpp"
#include "nlosbound/oracle.hpp"
#include "nlosbound/pocs.hpp"
#include "nlosbound/rng.hpp"
#include "nlosbound/scenario.hpp"
#include "nlosbound/sdp.hpp"
#include "nlosbound/sim.hpp"
#include "nlosbound/solver_types.hpp"
#include "nlosbound/solvers.hpp"
