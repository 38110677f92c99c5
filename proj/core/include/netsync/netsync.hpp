#pragma once

#include "netsync/csv.hpp"
#include "netsync/dynamics.hpp"
#include "netsync/error.hpp"
#include "netsync/lqr.hpp"
#include "netsync/matrix.hpp"
#include "netsync/netmodel.hpp"
#include "netsync/norms.hpp"
#include "netsync/sim.hpp"
#include "netsync/topology.hpp"
