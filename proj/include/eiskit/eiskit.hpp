#pragma once

#include "eiskit/circuit.hpp"
#include "eiskit/csv.hpp"
#include "eiskit/dft.hpp"
#include "eiskit/dose.hpp"
#include "eiskit/error.hpp"
#include "eiskit/figure_data.hpp"
#include "eiskit/kv_config.hpp"
#include "eiskit/metrology.hpp"
#include "eiskit/model_json.hpp"
#include "eiskit/noise.hpp"
#include "eiskit/optimize.hpp"
#include "eiskit/regarima.hpp"
#include "eiskit/state_space.hpp"
#include "eiskit/subject.hpp"
#include "eiskit/synth.hpp"
#include "eiskit/timeseries.hpp"
