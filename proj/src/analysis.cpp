#include "bufalloc/analysis.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "bufalloc/errors.hpp"

namespace bufalloc {

namespace {

// Per-interval overlap at close: the number of the pool's intervals
// containing the closing coordinate. With half-open (open, close]
// intervals the pool's maximum concurrent demand equals the maximum of
// these counts.
void finish_pool(IntervalSet::Pool& pool) {
  std::vector<int> opens, closes;
  opens.reserve(pool.intervals.size());
  closes.reserve(pool.intervals.size());
  for (const Interval& iv : pool.intervals) {
    opens.push_back(iv.open);
    closes.push_back(iv.close);
  }
  std::sort(opens.begin(), opens.end());
  std::sort(closes.begin(), closes.end());
  pool.overlap_at_close.clear();
  pool.max_overlap = 0;
  for (const Interval& iv : pool.intervals) {
    auto started = std::lower_bound(opens.begin(), opens.end(), iv.close) - opens.begin();
    auto ended = std::lower_bound(closes.begin(), closes.end(), iv.close) - closes.begin();
    int overlap = static_cast<int>(started - ended);
    pool.overlap_at_close.push_back(overlap);
    pool.max_overlap = std::max(pool.max_overlap, overlap);
  }
}

// Demand intervals keyed by an arbitrary pool-of-receive function.
IntervalSet demand_intervals(const CommGraph& g, int pools,
                             const std::function<int(int /*arc*/)>& pool_of) {
  IntervalSet set;
  set.pools.resize(pools);
  std::vector<int32_t> reach = reach_vectors(g);
  std::vector<int> dep = terminal_dependencies(g, reach);
  for (int a = 0; a < static_cast<int>(g.arcs().size()); ++a) {
    const CommArc& arc = g.arc(a);
    Interval iv;
    iv.open = dep[g.flat(arc.recv)];
    iv.close = arc.recv.position;
    iv.receive = arc.recv;
    set.pools[pool_of(a)].intervals.push_back(iv);
  }
  for (auto& pool : set.pools) finish_pool(pool);
  return set;
}

BufferAssignment assignment_from_set(const IntervalSet& set, Scheme scheme) {
  BufferAssignment b;
  b.scheme = scheme;
  b.per_pool.reserve(set.pools.size());
  for (const auto& pool : set.pools) b.per_pool.push_back(pool.max_overlap);
  return b;
}

CommGraph reversed_graph(const CommGraph& g) {
  TraceDocument doc = to_trace(g);
  for (auto& p : doc.processes) {
    std::reverse(p.events.begin(), p.events.end());
    for (auto& e : p.events)
      e.kind = e.kind == EventKind::Send ? EventKind::Recv : EventKind::Send;
  }
  return build_graph(doc);
}

}  // namespace

BufferAssignment nbap_receive(const CommGraph& g, IntervalSet& out) {
  out = demand_intervals(g, g.process_count(), [&](int a) { return g.arc(a).recv.process; });
  return assignment_from_set(out, Scheme::ReceiveSide);
}

BufferAssignment nbap_receive(const CommGraph& g) {
  IntervalSet set;
  return nbap_receive(g, set);
}

BufferAssignment nbap_send(const CommGraph& g, IntervalSet& out) {
  CommGraph rev = reversed_graph(g);
  out = demand_intervals(rev, rev.process_count(),
                         [&](int a) { return rev.arc(a).recv.process; });
  BufferAssignment b = assignment_from_set(out, Scheme::SendSide);
  return b;
}

BufferAssignment nbap_send(const CommGraph& g) {
  IntervalSet set;
  return nbap_send(g, set);
}

BufferAssignment nbap_channel(const CommGraph& g, IntervalSet& out) {
  out = demand_intervals(g, g.channel_count(), [&](int a) { return g.channel_of_arc(a); });
  return assignment_from_set(out, Scheme::Channel);
}

BufferAssignment nbap_channel(const CommGraph& g) {
  IntervalSet set;
  return nbap_channel(g, set);
}

std::vector<std::vector<int>> interval_table(const CommGraph& g, Scheme scheme) {
  int max_events = 0;
  for (int p = 0; p < g.process_count(); ++p) max_events = std::max(max_events, g.event_count(p));
  std::vector<std::vector<int>> rows(g.process_count(), std::vector<int>(max_events, 0));

  IntervalSet set;
  switch (scheme) {
    case Scheme::ReceiveSide: {
      nbap_receive(g, set);
      for (const auto& pool : set.pools)
        for (size_t k = 0; k < pool.intervals.size(); ++k) {
          const Interval& iv = pool.intervals[k];
          rows[iv.receive.process][iv.receive.position - 1] = pool.overlap_at_close[k];
        }
      break;
    }
    case Scheme::SendSide: {
      nbap_send(g, set);
      // reversed coordinates map back to the original send events
      for (const auto& pool : set.pools)
        for (size_t k = 0; k < pool.intervals.size(); ++k) {
          const Interval& iv = pool.intervals[k];
          int p = iv.receive.process;
          int original_pos = g.event_count(p) + 1 - iv.receive.position;
          rows[p][original_pos - 1] = pool.overlap_at_close[k];
        }
      break;
    }
    case Scheme::Channel: {
      nbap_channel(g, set);
      for (const auto& pool : set.pools)
        for (size_t k = 0; k < pool.intervals.size(); ++k) {
          const Interval& iv = pool.intervals[k];
          rows[iv.receive.process][iv.receive.position - 1] = pool.overlap_at_close[k];
        }
      break;
    }
    case Scheme::Mixed:
      raise(Errc::BadArity, "no interval table for the mixed scheme");
  }
  return rows;
}

namespace {

// Lexicographically ascending enumeration of all length-q nonnegative
// vectors with the given sum. fn returns false to stop; the return value
// reports whether enumeration ran to completion.
bool for_each_composition(int total, int q, const std::function<bool(const std::vector<int>&)>& fn) {
  if (q == 0) return total == 0 ? fn(std::vector<int>{}) : true;
  std::vector<int> v(q, 0);
  std::function<bool(int, int)> rec = [&](int idx, int remaining) -> bool {
    if (idx == q - 1) {
      v[idx] = remaining;
      bool keep = fn(v);
      v[idx] = 0;
      return keep;
    }
    for (int x = 0; x <= remaining; ++x) {
      v[idx] = x;
      if (!rec(idx + 1, remaining - x)) {
        v[idx] = 0;
        return false;
      }
    }
    v[idx] = 0;
    return true;
  };
  return rec(0, total);
}

}  // namespace

MixedMinResult nbap_mixed_min(const CommGraph& g, long long state_limit) {
  // Giving every process one token per event is always block-free, so
  // the search space is bounded.
  int upper = 0;
  for (int p = 0; p < g.process_count(); ++p) upper += g.event_count(p);
  ExploreOptions opts{state_limit};
  for (int k = 0; k <= upper; ++k) {
    MixedMinResult result;
    bool found = false;
    for_each_composition(k, g.process_count(), [&](const std::vector<int>& v) {
      BufferAssignment b{Scheme::Mixed, v};
      Verdict verdict = explore(g, b, Target::Block, opts);
      if (verdict.outcome == Outcome::AllComplete) {
        result = MixedMinResult{k, b};
        found = true;
        return false;
      }
      return true;
    });
    if (found) return result;
  }
  raise(Errc::StateLimitExceeded, "no block-free assignment found below the bound");
}

Verdict bsp(const CommGraph& g, const BufferAssignment& b, long long state_limit) {
  if (b.scheme == Scheme::Channel) return run_greedy(g, b);
  return explore(g, b, Target::Deadlock, ExploreOptions{state_limit});
}

namespace {

std::vector<int> ring_pools(const CommGraph& g, const Ring& ring, Scheme scheme) {
  std::vector<int> pools;
  const size_t t = ring.members.size();
  for (size_t k = 0; k < t; ++k) {
    if (scheme == Scheme::Channel) {
      ChannelId ch{ring.members[k].process, ring.members[(k + 1) % t].process};
      pools.push_back(g.channel_index(ch));
    } else {
      pools.push_back(ring.members[k].process);
    }
  }
  std::sort(pools.begin(), pools.end());
  pools.erase(std::unique(pools.begin(), pools.end()), pools.end());
  return pools;
}

// Any completing sequence must buffer at least one receive of every
// ring, so pool-disjoint rings give a lower bound on the safe total.
int ring_lower_bound(const CommGraph& g, Scheme scheme) {
  const int t_max = std::min(g.process_count(), 5);
  if (t_max < 2) return 0;
  std::vector<Ring> rings = find_rings(g, t_max);
  std::vector<char> used(pool_count(g, scheme), 0);
  int bound = 0;
  for (const Ring& ring : rings) {
    std::vector<int> pools = ring_pools(g, ring, scheme);
    bool disjoint = true;
    for (int p : pools)
      if (p < 0 || used[p]) { disjoint = false; break; }
    if (!disjoint) continue;
    for (int p : pools) used[p] = 1;
    bound++;
  }
  return bound;
}

BufferAssignment nbap_upper(const CommGraph& g, Scheme scheme) {
  switch (scheme) {
    case Scheme::ReceiveSide: return nbap_receive(g);
    case Scheme::SendSide: return nbap_send(g);
    case Scheme::Channel: return nbap_channel(g);
    case Scheme::Mixed: {
      BufferAssignment b{Scheme::Mixed, std::vector<int>(g.process_count(), 0)};
      for (int p = 0; p < g.process_count(); ++p) b.per_pool[p] = g.event_count(p);
      return b;
    }
  }
  return {};
}

}  // namespace

BapResult bap_min(const CommGraph& g, Scheme scheme, long long state_limit) {
  const int q = pool_count(g, scheme);
  const int lower = ring_lower_bound(g, scheme);
  const int upper = nbap_upper(g, scheme).total();

  for (int k = lower; k <= upper; ++k) {
    BapResult result;
    bool found = false;
    for_each_composition(k, q, [&](const std::vector<int>& v) {
      BufferAssignment b{scheme, v};
      Verdict verdict = bsp(g, b, state_limit);
      if (verdict.outcome == Outcome::AllComplete) {
        result.total = k;
        result.assignment = b;
        found = true;
        return false;
      }
      return true;
    });
    if (found) {
      result.certificate.assignment = result.assignment;
      for (int p = 0; p < q; ++p) {
        if (result.assignment.per_pool[p] == 0) continue;
        BufferAssignment dec = result.assignment;
        dec.per_pool[p]--;
        result.certificate.decrement_failures.push_back({p, bsp(g, dec, state_limit)});
      }
      return result;
    }
  }
  raise(Errc::StateLimitExceeded, "no safe assignment found below the nonblocking bound");
}

}  // namespace bufalloc
