#pragma once

#include "conbandit/env.hpp"
#include "conbandit/harness.hpp"
#include "conbandit/lp.hpp"
#include "conbandit/metrics.hpp"
#include "conbandit/policies.hpp"
#include "conbandit/rng.hpp"
#include "conbandit/rounding.hpp"
#include "conbandit/types.hpp"
