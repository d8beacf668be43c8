#pragma once

// Umbrella header for the full library surface.

#include "gpbandit/adversaries.hpp"
#include "gpbandit/algorithms.hpp"
#include "gpbandit/bounds.hpp"
#include "gpbandit/common.hpp"
#include "gpbandit/hard_instances.hpp"
#include "gpbandit/harness.hpp"
#include "gpbandit/kernels.hpp"
#include "gpbandit/rkhs.hpp"
