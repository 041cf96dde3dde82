#pragma once

#include <cstdint>

#include "bufalloc/graph.hpp"
#include "bufalloc/trace.hpp"

namespace bufalloc {

/// Minimal graph that is exactly one t-ring: each component holds a
/// start, one send, one receive and an end; component k's receive is fed
/// by component (k+1 mod t)'s send. Errors: BadArity when t < 2.
CommGraph gen_tring(int t);

/// Pipe-and-roll matrix multiply trace on a p x p worker mesh plus one
/// control process: the control scatters one block per worker, workers
/// run p rounds of row broadcast and column roll, send results back, and
/// the control closes with a shutdown message to the first worker.
CommGraph gen_fox_mesh(int p);

struct RandomTraceParams {
  int processes = 3;
  int events_per_process = 3;  // upper bound per process
  uint64_t seed = 0;
};

/// Seeded random trace: event slots are laid out along a random linear
/// extension of the process chains and matched respecting it, so the
/// result is always causally acyclic. Deterministic per (params, seed).
CommGraph gen_random(const RandomTraceParams& params);

}  // namespace bufalloc
