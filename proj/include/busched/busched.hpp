#pragma once

// Umbrella header.

#include "busched/errors.hpp"
#include "busched/time.hpp"
#include "busched/model.hpp"
#include "busched/maxflow.hpp"
#include "busched/feasibility.hpp"
#include "busched/flow.hpp"
#include "busched/flatten.hpp"
#include "busched/weighted.hpp"
#include "busched/baseline.hpp"
#include "busched/metrics.hpp"
#include "busched/matching.hpp"
#include "busched/data.hpp"
#include "busched/week.hpp"
#include "busched/synth.hpp"
#include "busched/scenario.hpp"
#include "busched/config.hpp"
