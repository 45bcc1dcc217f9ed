#pragma once

#include "mpsbell/correlations.hpp"
#include "mpsbell/errors.hpp"
#include "mpsbell/expr.hpp"
#include "mpsbell/model_config.hpp"
#include "mpsbell/model_family.hpp"
#include "mpsbell/models.hpp"
#include "mpsbell/mps.hpp"
#include "mpsbell/numerics.hpp"
#include "mpsbell/sweep.hpp"
