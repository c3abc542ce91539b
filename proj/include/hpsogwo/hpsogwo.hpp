#pragma once

// Umbrella header.

#include "hpsogwo/baselines.hpp"
#include "hpsogwo/domain.hpp"
#include "hpsogwo/encoding.hpp"
#include "hpsogwo/error.hpp"
#include "hpsogwo/harness.hpp"
#include "hpsogwo/metrics.hpp"
#include "hpsogwo/optimizer.hpp"
#include "hpsogwo/rng.hpp"
#include "hpsogwo/stats.hpp"
#include "hpsogwo/workload.hpp"
