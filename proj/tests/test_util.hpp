#pragma once

#include <array>
#include <set>
#include <vector>

#include "bufalloc/coloring.hpp"
#include "bufalloc/graph.hpp"
#include "bufalloc/trace.hpp"

namespace testutil {

using namespace bufalloc;

/// Trace shorthand: {{"P0", {"s m1", "r m2"}}, ...}
inline TraceDocument make_trace(
    std::vector<std::pair<std::string, std::vector<std::string>>> spec) {
  TraceDocument doc;
  for (auto& [name, events] : spec) {
    TraceProcess p;
    p.name = name;
    for (const std::string& e : events) {
      TraceEvent ev;
      ev.kind = e[0] == 's' ? EventKind::Send : EventKind::Recv;
      ev.msg = e.substr(2);
      p.events.push_back(ev);
    }
    doc.processes.push_back(std::move(p));
  }
  return doc;
}

inline CommGraph make_graph(std::vector<std::pair<std::string, std::vector<std::string>>> spec) {
  return build_graph(make_trace(std::move(spec)));
}

/// Independent all-pairs reachability: plain DFS over process and
/// communication arcs, no dynamic programming.
inline std::vector<std::set<int>> brute_reachable(const CommGraph& g) {
  const int v_count = g.vertex_count();
  std::vector<std::vector<int>> succ(v_count);
  for (int p = 0; p < g.process_count(); ++p)
    for (int pos = 0; pos <= g.event_count(p); ++pos)
      succ[g.flat(VertexId{p, pos})].push_back(g.flat(VertexId{p, pos + 1}));
  for (const auto& arc : g.arcs())
    succ[g.flat(arc.send)].push_back(g.flat(arc.recv));

  std::vector<std::set<int>> reach(v_count);
  for (int start = 0; start < v_count; ++start) {
    std::vector<int> stack{start};
    std::set<int>& r = reach[start];
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int w : succ[u])
        if (r.insert(w).second) stack.push_back(w);
    }
    r.insert(start);
  }
  return reach;
}

/// Truth-table satisfiability for small formulas.
inline bool clause_true(const std::array<int, 3>& lits, unsigned assignment) {
  for (int lit : lits) {
    bool value = (assignment >> (std::abs(lit) - 1)) & 1;
    if (lit < 0) value = !value;
    if (value) return true;
  }
  return false;
}

inline bool term_true(const std::array<int, 3>& lits, unsigned assignment) {
  for (int lit : lits) {
    bool value = (assignment >> (std::abs(lit) - 1)) & 1;
    if (lit < 0) value = !value;
    if (!value) return false;
  }
  return true;
}

inline bool satisfiable(int var_count, const std::vector<std::array<int, 3>>& clauses) {
  for (unsigned a = 0; a < (1u << var_count); ++a) {
    bool ok = true;
    for (const auto& cl : clauses)
      if (!clause_true(cl, a)) { ok = false; break; }
    if (ok) return true;
  }
  return false;
}

inline bool tautology(int var_count, const std::vector<std::array<int, 3>>& terms) {
  for (unsigned a = 0; a < (1u << var_count); ++a) {
    bool some = false;
    for (const auto& t : terms)
      if (term_true(t, a)) { some = true; break; }
    if (!some) return false;
  }
  return true;
}

/// All single-token assignments for a scheme.
inline std::vector<BufferAssignment> single_token_assignments(const CommGraph& g, Scheme scheme) {
  std::vector<BufferAssignment> out;
  int q = pool_count(g, scheme);
  for (int p = 0; p < q; ++p) {
    BufferAssignment b = zero_assignment(g, scheme);
    b.per_pool[p] = 1;
    out.push_back(b);
  }
  return out;
}

/// All assignments of `total` tokens over the scheme's pools.
inline std::vector<BufferAssignment> assignments_of_total(const CommGraph& g, Scheme scheme,
                                                          int total) {
  std::vector<BufferAssignment> out;
  int q = pool_count(g, scheme);
  std::vector<int> v(q, 0);
  auto rec = [&](auto&& self, int idx, int remaining) -> void {
    if (idx == q - 1 || q == 0) {
      if (q == 0) return;
      v[idx] = remaining;
      out.push_back(BufferAssignment{scheme, v});
      v[idx] = 0;
      return;
    }
    for (int x = 0; x <= remaining; ++x) {
      v[idx] = x;
      self(self, idx + 1, remaining - x);
    }
    v[idx] = 0;
  };
  if (q > 0) rec(rec, 0, total);
  return out;
}

/// Walks every reachable colouring; returns false as soon as `check`
/// fails on any state.
template <typename Fn>
inline bool for_all_reachable(const CommGraph& g, const BufferAssignment& b, Fn&& check) {
  std::vector<ColoringState> stack{initial_state(g, b)};
  std::set<std::vector<uint8_t>> seen;
  seen.insert(stack.back().canonical_bytes());
  while (!stack.empty()) {
    ColoringState s = std::move(stack.back());
    stack.pop_back();
    if (!check(s)) return false;
    for (const Move& m : enabled_moves(s, g, b)) {
      ColoringState next = apply_move(s, m, g, b);
      if (seen.insert(next.canonical_bytes()).second) stack.push_back(std::move(next));
    }
  }
  return true;
}

/// Canonical 3-literal clauses over n variables: non-decreasing literal
/// triples drawn from {1,-1,...,n,-n} (covers every clause up to
/// reordering).
inline std::vector<std::array<int, 3>> all_canonical_clauses(int n) {
  std::vector<int> lits;
  for (int i = 1; i <= n; ++i) {
    lits.push_back(i);
    lits.push_back(-i);
  }
  std::vector<std::array<int, 3>> out;
  for (size_t a = 0; a < lits.size(); ++a)
    for (size_t b = a; b < lits.size(); ++b)
      for (size_t c = b; c < lits.size(); ++c)
        out.push_back({lits[a], lits[b], lits[c]});
  return out;
}

/// Canonical formulas: non-decreasing sequences of canonical clauses.
inline std::vector<std::vector<std::array<int, 3>>> all_canonical_formulas(int n, int clause_count) {
  auto clauses = all_canonical_clauses(n);
  std::vector<std::vector<std::array<int, 3>>> out;
  std::vector<int> pick(clause_count, 0);
  auto rec = [&](auto&& self, int idx, int from) -> void {
    if (idx == clause_count) {
      std::vector<std::array<int, 3>> f;
      for (int p : pick) f.push_back(clauses[p]);
      out.push_back(std::move(f));
      return;
    }
    for (int k = from; k < static_cast<int>(clauses.size()); ++k) {
      pick[idx] = k;
      self(self, idx + 1, k);
    }
  };
  rec(rec, 0, 0);
  return out;
}

}  // namespace testutil
