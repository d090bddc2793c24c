#pragma once

// Umbrella header for the NIDF feature-selection toolkit.

#include "nidf/csv.hpp"
#include "nidf/eval.hpp"
#include "nidf/fusion.hpp"
#include "nidf/interval.hpp"
#include "nidf/kmeans.hpp"
#include "nidf/metrics.hpp"
#include "nidf/neighborhood.hpp"
#include "nidf/normalize.hpp"
#include "nidf/pipeline.hpp"
#include "nidf/redundancy.hpp"
#include "nidf/selectors.hpp"
#include "nidf/simplex.hpp"
#include "nidf/types.hpp"
