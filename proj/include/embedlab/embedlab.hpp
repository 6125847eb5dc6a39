#pragma once

#include "embedlab/embeddings.hpp"
#include "embedlab/error.hpp"
#include "embedlab/free_space.hpp"
#include "embedlab/metric_space.hpp"
#include "embedlab/min_cost_flow.hpp"
#include "embedlab/point.hpp"
#include "embedlab/rational.hpp"
#include "embedlab/roundness.hpp"
#include "embedlab/search.hpp"
