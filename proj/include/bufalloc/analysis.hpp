#pragma once

#include <vector>

#include "bufalloc/coloring.hpp"
#include "bufalloc/graph.hpp"

namespace bufalloc {

/// Half-open buffer demand interval (open, close] in event-position
/// coordinates of the receiving process: the token is demanded the
/// instant the anchor vertex turns green and released when the receive
/// turns green. Back-to-back intervals (c,t] and (t,t'] do not overlap.
struct Interval {
  int open = 0;
  int close = 0;
  VertexId receive;
};

/// Demand intervals grouped per pool, with per-interval overlap counts
/// (number of the pool's intervals active at this interval's close,
/// itself included) and the pool's maximum overlap.
struct IntervalSet {
  struct Pool {
    std::vector<Interval> intervals;
    std::vector<int> overlap_at_close;
    int max_overlap = 0;
  };
  std::vector<Pool> pools;
};

/// Minimum per-process assignment under which no colouring sequence
/// blocks, by maximum interval overlap per receiving process.
BufferAssignment nbap_receive(const CommGraph& g);
BufferAssignment nbap_receive(const CommGraph& g, IntervalSet& out_intervals);

/// Send-side variant: the interval computation runs on the graph with
/// all arcs reversed and start/end swapped; pool ownership maps back to
/// the original sending processes.
BufferAssignment nbap_send(const CommGraph& g);
BufferAssignment nbap_send(const CommGraph& g, IntervalSet& out_intervals);

/// Per-channel variant: intervals grouped by the receive's channel.
BufferAssignment nbap_channel(const CommGraph& g);
BufferAssignment nbap_channel(const CommGraph& g, IntervalSet& out_intervals);

/// Per-event interval table rows: one row per process, one entry per
/// event position (padded to the longest process), holding the overlap
/// at close for receives and 0 for sends and padding.
std::vector<std::vector<int>> interval_table(const CommGraph& g, Scheme scheme);

struct MixedMinResult {
  int total = 0;
  BufferAssignment assignment;
};

/// Smallest total k such that some per-process assignment of k tokens
/// yields no blocking under the mixed scheme; assignments enumerated in
/// nondecreasing total, lexicographic within a total.
/// Errors: StateLimitExceeded.
MixedMinResult nbap_mixed_min(const CommGraph& g, long long state_limit = 5'000'000);

/// Sufficiency of an assignment. Channel scheme: decided by the greedy
/// colouring (sound and complete there). Other schemes: exhaustive
/// search with a deadlock witness on insufficiency.
/// Errors: StateLimitExceeded (exhaustive schemes only).
Verdict bsp(const CommGraph& g, const BufferAssignment& b, long long state_limit = 5'000'000);

struct MinimalityCertificate {
  BufferAssignment assignment;
  /// Pool index and the failing verdict for the assignment with that
  /// pool decremented.
  std::vector<std::pair<int, Verdict>> decrement_failures;
};

struct BapResult {
  int total = 0;
  BufferAssignment assignment;
  MinimalityCertificate certificate;
};

/// Minimum total token count with a safe assignment, searched from a
/// ring-packing lower bound up to the nonblocking upper bound;
/// assignments enumerated lexicographically within each total.
/// Errors: StateLimitExceeded.
BapResult bap_min(const CommGraph& g, Scheme scheme, long long state_limit = 5'000'000);

}  // namespace bufalloc
