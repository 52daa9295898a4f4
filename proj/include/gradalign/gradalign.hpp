#pragma once

// Gradual network alignment: shared-weight GNN embeddings fused with an
// iteratively updated Tversky set similarity, plus the edge-augmented
// variant and a synthetic benchmark harness.

#include "gradalign/augment.hpp"
#include "gradalign/bench.hpp"
#include "gradalign/config.hpp"
#include "gradalign/encoder.hpp"
#include "gradalign/error.hpp"
#include "gradalign/graph.hpp"
#include "gradalign/graph_io.hpp"
#include "gradalign/matcher.hpp"
#include "gradalign/metrics.hpp"
#include "gradalign/rng.hpp"
#include "gradalign/similarity.hpp"
#include "gradalign/synthetic.hpp"
