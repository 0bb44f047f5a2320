#pragma once

#include "curvelrr/error.hpp"
#include "curvelrr/curve.hpp"
#include "curvelrr/manifold.hpp"
#include "curvelrr/solver.hpp"
#include "curvelrr/kmeans.hpp"
#include "curvelrr/clustering.hpp"
#include "curvelrr/dtw.hpp"
#include "curvelrr/lrr.hpp"
#include "curvelrr/baselines.hpp"
#include "curvelrr/dataset.hpp"
#include "curvelrr/datagen.hpp"
#include "curvelrr/pipeline.hpp"
