#pragma once

#include "stacey/config.hpp"
#include "stacey/dataset.hpp"
#include "stacey/geometry.hpp"
#include "stacey/harness.hpp"
#include "stacey/optimizers.hpp"
#include "stacey/oracle.hpp"
#include "stacey/pnorm.hpp"
#include "stacey/problems.hpp"
#include "stacey/record.hpp"
#include "stacey/rng.hpp"
#include "stacey/schedule.hpp"
#include "stacey/theory.hpp"
#include "stacey/verify.hpp"
