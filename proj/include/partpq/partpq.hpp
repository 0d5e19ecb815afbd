#pragma once

// Part-aware panoptic segmentation label model, PartPQ metric family,
// panoptic/part merging strategies, SIG analysis metric, and a synthetic
// scene harness with a brute-force reference evaluator.

#include "partpq/codec.hpp"
#include "partpq/colorize.hpp"
#include "partpq/core.hpp"
#include "partpq/dataset_spec.hpp"
#include "partpq/harness.hpp"
#include "partpq/merging.hpp"
#include "partpq/metrics.hpp"
#include "partpq/parallel.hpp"
#include "partpq/part_prediction.hpp"
#include "partpq/png_io.hpp"
#include "partpq/prediction_io.hpp"
#include "partpq/reference.hpp"
#include "partpq/report_io.hpp"
