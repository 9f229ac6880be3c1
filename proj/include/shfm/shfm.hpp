#pragma once

#include "shfm/anova.hpp"
#include "shfm/batches.hpp"
#include "shfm/dataset.hpp"
#include "shfm/errors.hpp"
#include "shfm/evaluation.hpp"
#include "shfm/field_schema.hpp"
#include "shfm/ftrl.hpp"
#include "shfm/grid_search.hpp"
#include "shfm/libsvm.hpp"
#include "shfm/losses.hpp"
#include "shfm/metrics.hpp"
#include "shfm/model.hpp"
#include "shfm/model_io.hpp"
#include "shfm/sparse_vector.hpp"
#include "shfm/synthetic.hpp"
#include "shfm/trainer.hpp"
