#pragma once

#include "vrpweave/aspect.hpp"
#include "vrpweave/diff.hpp"
#include "vrpweave/error.hpp"
#include "vrpweave/metrics.hpp"
#include "vrpweave/model.hpp"
#include "vrpweave/model_io.hpp"
#include "vrpweave/pattern.hpp"
#include "vrpweave/planner.hpp"
#include "vrpweave/pointcut.hpp"
#include "vrpweave/variability.hpp"
#include "vrpweave/weaver.hpp"
