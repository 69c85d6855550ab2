#pragma once

#include "fairdiv/audit.hpp"
#include "fairdiv/continuous.hpp"
#include "fairdiv/discrete.hpp"
#include "fairdiv/interval_set.hpp"
#include "fairdiv/partition.hpp"
#include "fairdiv/rational.hpp"
#include "fairdiv/realize.hpp"
#include "fairdiv/rng.hpp"
#include "fairdiv/step_measure.hpp"
