#pragma once

// Umbrella header: metric measured graphs, eps-net discretization, volume
// growth fitting, Poincare-type ball inequalities, and the experiment runner.

#include "mmpoincare/cloud.hpp"
#include "mmpoincare/experiment.hpp"
#include "mmpoincare/graph.hpp"
#include "mmpoincare/growth.hpp"
#include "mmpoincare/io.hpp"
#include "mmpoincare/ledger.hpp"
#include "mmpoincare/net.hpp"
#include "mmpoincare/poincare.hpp"
#include "mmpoincare/rng.hpp"
#include "mmpoincare/spaces.hpp"
#include "mmpoincare/verify.hpp"
