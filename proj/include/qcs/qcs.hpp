#pragma once

#include "qcs/error_budget.hpp"
#include "qcs/exceptions.hpp"
#include "qcs/format.hpp"
#include "qcs/noise.hpp"
#include "qcs/optimize.hpp"
#include "qcs/pipeline.hpp"
#include "qcs/protocol.hpp"
#include "qcs/purify.hpp"
#include "qcs/qstate.hpp"
#include "qcs/rng.hpp"
#include "qcs/spin.hpp"
