#pragma once

#include "survboost/errors.hpp"
#include "survboost/survdata.hpp"
#include "survboost/losses.hpp"
#include "survboost/km.hpp"
#include "survboost/learners.hpp"
#include "survboost/engine.hpp"
#include "survboost/ensemble_io.hpp"
#include "survboost/simlab.hpp"
#include "survboost/metrics.hpp"
#include "survboost/report.hpp"
#include "survboost/experiment.hpp"
#include "survboost/commands.hpp"
