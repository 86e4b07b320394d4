#pragma once

#include "speedprof/drive_cycle.hpp"
#include "speedprof/error.hpp"
#include "speedprof/experiments.hpp"
#include "speedprof/features.hpp"
#include "speedprof/geo.hpp"
#include "speedprof/neuralnet.hpp"
#include "speedprof/route.hpp"
#include "speedprof/run_config.hpp"
#include "speedprof/synth.hpp"
#include "speedprof/time.hpp"
#include "speedprof/tmc.hpp"
