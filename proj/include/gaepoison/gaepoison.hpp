#pragma once

#include "gaepoison/analysis/bound.hpp"
#include "gaepoison/analysis/metrics.hpp"
#include "gaepoison/attack/attackers.hpp"
#include "gaepoison/attack/gae.hpp"
#include "gaepoison/attack/mp.hpp"
#include "gaepoison/attack/objective.hpp"
#include "gaepoison/attack/trainer.hpp"
#include "gaepoison/cli/config.hpp"
#include "gaepoison/cli/scenario.hpp"
#include "gaepoison/core/error.hpp"
#include "gaepoison/core/model_vector.hpp"
#include "gaepoison/core/rng.hpp"
#include "gaepoison/defense/detection.hpp"
#include "gaepoison/fl/aggregate.hpp"
#include "gaepoison/fl/dataset.hpp"
#include "gaepoison/fl/federation.hpp"
#include "gaepoison/fl/idx.hpp"
#include "gaepoison/fl/partition.hpp"
#include "gaepoison/fl/svm.hpp"
#include "gaepoison/graph/signal.hpp"
