#pragma once

#include "finfo/arborescence.hpp"
#include "finfo/auc.hpp"
#include "finfo/baselines.hpp"
#include "finfo/csv.hpp"
#include "finfo/data.hpp"
#include "finfo/edge_weights.hpp"
#include "finfo/error.hpp"
#include "finfo/estimation.hpp"
#include "finfo/families.hpp"
#include "finfo/synth.hpp"
