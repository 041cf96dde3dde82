#include "bufalloc/graph.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "bufalloc/errors.hpp"

namespace bufalloc {

int CommGraph::process_index(const std::string& name) const {
  for (int i = 0; i < process_count(); ++i)
    if (names_[i] == name) return i;
  return -1;
}

int CommGraph::event_vertex_count() const {
  int n = 0;
  for (int e : event_counts_) n += e;
  return n;
}

VertexId CommGraph::unflat(int id) const {
  int p = static_cast<int>(std::upper_bound(offsets_.begin(), offsets_.end(), id) -
                           offsets_.begin()) - 1;
  return VertexId{p, id - offsets_[p]};
}

VertexKind CommGraph::kind(VertexId v) const {
  if (v.position == 0) return VertexKind::Start;
  if (v.position == event_counts_[v.process] + 1) return VertexKind::End;
  const CommArc& a = arcs_[arc_at_[flat(v)]];
  return a.send == v ? VertexKind::Send : VertexKind::Recv;
}

int CommGraph::channel_index(ChannelId ch) const {
  auto it = std::lower_bound(channels_.begin(), channels_.end(), ch);
  if (it == channels_.end() || !(*it == ch)) return -1;
  return static_cast<int>(it - channels_.begin());
}

CommGraph build_graph(const TraceDocument& doc) {
  CommGraph g;
  std::set<std::string> seen_names;
  for (const auto& p : doc.processes) {
    if (!seen_names.insert(p.name).second)
      raise(Errc::ParseError, "duplicate process name \"" + p.name + "\"");
    g.names_.push_back(p.name);
    g.event_counts_.push_back(static_cast<int>(p.events.size()));
  }
  const int n = g.process_count();
  g.offsets_.resize(n);
  int off = 0;
  for (int i = 0; i < n; ++i) {
    g.offsets_[i] = off;
    off += g.event_counts_[i] + 2;
  }
  g.total_vertices_ = off;
  g.arc_at_.assign(off, -1);

  // Match message ids: exactly one send and one recv, in distinct processes.
  struct End { int process = -1; int position = 0; };
  std::map<std::string, std::pair<End, End>> by_msg;  // send, recv
  for (int i = 0; i < n; ++i) {
    const auto& events = doc.processes[i].events;
    for (int c = 0; c < static_cast<int>(events.size()); ++c) {
      auto& slot = by_msg[events[c].msg];
      End& side = events[c].kind == EventKind::Send ? slot.first : slot.second;
      if (side.process != -1)
        raise(Errc::UnmatchedMessage, "message \"" + events[c].msg + "\" has a duplicate " +
                                          (events[c].kind == EventKind::Send ? "send" : "recv"));
      side.process = i;
      side.position = c + 1;
    }
  }
  for (const auto& [msg, slot] : by_msg) {
    if (slot.first.process == -1 || slot.second.process == -1)
      raise(Errc::UnmatchedMessage, "message \"" + msg + "\" lacks a " +
                                        (slot.first.process == -1 ? "send" : "recv"));
    if (slot.first.process == slot.second.process)
      raise(Errc::SelfMessage, "message \"" + msg + "\" sent and received by \"" +
                                   g.names_[slot.first.process] + "\"");
  }
  // Arcs in deterministic order: by send vertex.
  for (int i = 0; i < n; ++i) {
    const auto& events = doc.processes[i].events;
    for (int c = 0; c < static_cast<int>(events.size()); ++c) {
      if (events[c].kind != EventKind::Send) continue;
      const auto& slot = by_msg[events[c].msg];
      CommArc arc;
      arc.send = VertexId{i, c + 1};
      arc.recv = VertexId{slot.second.process, slot.second.position};
      arc.msg = events[c].msg;
      int id = static_cast<int>(g.arcs_.size());
      g.arcs_.push_back(arc);
      g.arc_at_[g.flat(arc.send)] = id;
      g.arc_at_[g.flat(arc.recv)] = id;
    }
  }

  // Channels: distinct ordered process pairs actually used.
  std::set<ChannelId> chans;
  for (const auto& a : g.arcs_) chans.insert(ChannelId{a.send.process, a.recv.process});
  g.channels_.assign(chans.begin(), chans.end());
  g.arc_channel_.reserve(g.arcs_.size());
  for (const auto& a : g.arcs_)
    g.arc_channel_.push_back(g.channel_index(ChannelId{a.send.process, a.recv.process}));

  // Kahn's algorithm over process plus communication arcs; a leftover
  // vertex means a causality cycle.
  std::vector<int> indeg(off, 0);
  for (int i = 0; i < n; ++i)
    for (int c = 1; c <= g.event_counts_[i] + 1; ++c) indeg[g.offsets_[i] + c]++;
  for (const auto& a : g.arcs_) indeg[g.flat(a.recv)]++;
  std::vector<int> queue;
  queue.reserve(off);
  for (int i = 0; i < n; ++i)
    if (indeg[g.offsets_[i]] == 0) queue.push_back(g.offsets_[i]);
  size_t head = 0;
  g.topo_.reserve(off);
  while (head < queue.size()) {
    int u = queue[head++];
    VertexId v = g.unflat(u);
    g.topo_.push_back(v);
    if (v.position <= g.event_counts_[v.process]) {
      int next = u + 1;
      if (--indeg[next] == 0) queue.push_back(next);
    }
    if (g.is_event(v)) {
      const CommArc& a = g.arcs_[g.arc_at_[u]];
      if (a.send == v) {
        int r = g.flat(a.recv);
        if (--indeg[r] == 0) queue.push_back(r);
      }
    }
  }
  if (static_cast<int>(g.topo_.size()) != off)
    raise(Errc::CausalityCycle, "process and communication arcs form a directed cycle");
  return g;
}

TraceDocument to_trace(const CommGraph& g) {
  TraceDocument doc;
  for (int i = 0; i < g.process_count(); ++i) {
    TraceProcess p;
    p.name = g.process_name(i);
    for (int c = 1; c <= g.event_count(i); ++c) {
      VertexId v{i, c};
      const CommArc& a = g.arc(g.arc_at(v));
      p.events.push_back(TraceEvent{a.send == v ? EventKind::Send : EventKind::Recv, a.msg});
    }
    doc.processes.push_back(std::move(p));
  }
  return doc;
}

std::string to_dot(const CommGraph& g) {
  std::ostringstream os;
  os << "digraph comm {\n  rankdir=TB;\n  node [shape=box, fontsize=10];\n";
  for (int i = 0; i < g.process_count(); ++i) {
    os << "  subgraph cluster_p" << i << " {\n    label=\"" << g.process_name(i) << "\";\n";
    for (int c = 0; c <= g.event_count(i) + 1; ++c) {
      VertexId v{i, c};
      os << "    v" << i << "_" << c << " [label=\"";
      switch (g.kind(v)) {
        case VertexKind::Start: os << "start"; break;
        case VertexKind::End: os << "end"; break;
        case VertexKind::Send: os << "s " << g.arc(g.arc_at(v)).msg; break;
        case VertexKind::Recv: os << "r " << g.arc(g.arc_at(v)).msg; break;
      }
      os << "\"];\n";
      if (c > 0) os << "    v" << i << "_" << c - 1 << " -> v" << i << "_" << c << ";\n";
    }
    os << "  }\n";
  }
  for (const auto& a : g.arcs())
    os << "  v" << a.send.process << "_" << a.send.position << " -> v" << a.recv.process << "_"
       << a.recv.position << " [constraint=false, color=blue];\n";
  os << "}\n";
  return os.str();
}

int32_t reach_sentinel(const CommGraph& g) { return g.vertex_count() + 1; }

std::vector<int32_t> reach_vectors(const CommGraph& g) {
  const int n = g.process_count();
  const int32_t inf = reach_sentinel(g);
  std::vector<int32_t> a(static_cast<size_t>(g.vertex_count()) * n, inf);
  const auto& topo = g.topo_order();
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    VertexId v = *it;
    int32_t* row = a.data() + static_cast<size_t>(g.flat(v)) * n;
    if (v.position <= g.event_count(v.process)) {
      const int32_t* succ = a.data() + static_cast<size_t>(g.flat(v) + 1) * n;
      for (int j = 0; j < n; ++j) row[j] = std::min(row[j], succ[j]);
    }
    if (g.is_event(v)) {
      const CommArc& arc = g.arc(g.arc_at(v));
      if (arc.send == v) {
        const int32_t* succ = a.data() + static_cast<size_t>(g.flat(arc.recv)) * n;
        for (int j = 0; j < n; ++j) row[j] = std::min(row[j], succ[j]);
      }
    }
    row[v.process] = v.position;
  }
  return a;
}

std::vector<int> terminal_dependencies(const CommGraph& g, const std::vector<int32_t>& reach) {
  const int n = g.process_count();
  std::vector<int> dep(g.vertex_count(), -1);
  for (const auto& arc : g.arcs()) {
    const int i = arc.recv.process;
    const int t = arc.recv.position;
    const int j = arc.send.process;
    const int d = arc.send.position;
    // reach[(i,c)][j] is non-decreasing in c, so the qualifying anchors
    // form a prefix; take the largest.
    int lo = 0, hi = t - 1, best = 0;
    while (lo <= hi) {
      int mid = (lo + hi) / 2;
      if (reach[static_cast<size_t>(g.flat(VertexId{i, mid})) * n + j] <= d) {
        best = mid;
        lo = mid + 1;
      } else {
        hi = mid - 1;
      }
    }
    dep[g.flat(arc.recv)] = best;
  }
  return dep;
}

DepGraph dependency_graph(const CommGraph& g) { return DepGraph{&g}; }

namespace {

// Dependency-graph walks carry one bit of history: whether the previous
// step used the vertex's communication twin (which may not be undone
// immediately). State id = flat vertex * 2 + that bit.
struct DepWalk {
  const CommGraph& g;
  explicit DepWalk(const CommGraph& graph) : g(graph) {}

  template <typename Fn>
  void each_successor(int state, Fn&& fn) const {
    int u = state / 2;
    bool via_comm = state % 2;
    VertexId v = g.unflat(u);
    if (v.position > 0) fn((u - 1) * 2);  // reversed process arc
    if (!via_comm && g.is_event(v)) {
      const CommArc& a = g.arc(g.arc_at(v));
      VertexId w = a.send == v ? a.recv : a.send;
      fn(g.flat(w) * 2 + 1);
    }
  }
};

// Memoized longest-walk with cycle detection. mark: 0 unvisited,
// 1 on stack, 2 done. Returns false on a cycle.
bool dep_longest(const DepWalk& walk, int state, std::vector<int8_t>& mark,
                 std::vector<int>& len) {
  struct Frame { int state; bool expanded; };
  std::vector<Frame> stack{{state, false}};
  bool ok = true;
  while (!stack.empty() && ok) {
    auto [s, expanded] = stack.back();
    if (!expanded) {
      if (mark[s] == 2) {
        stack.pop_back();
        continue;
      }
      if (mark[s] == 1) {
        ok = false;
        break;
      }
      mark[s] = 1;
      stack.back().expanded = true;
      walk.each_successor(s, [&](int t) {
        if (mark[t] == 0)
          stack.push_back({t, false});
        else if (mark[t] == 1)
          ok = false;
      });
    } else {
      int best = 0;
      walk.each_successor(s, [&](int t) { best = std::max(best, 1 + len[t]); });
      len[s] = best;
      mark[s] = 2;
      stack.pop_back();
    }
  }
  return ok;
}

bool dep_compute(const CommGraph& g, std::vector<int>* out_depths) {
  DepWalk walk(g);
  std::vector<int8_t> mark(static_cast<size_t>(g.vertex_count()) * 2, 0);
  std::vector<int> len(static_cast<size_t>(g.vertex_count()) * 2, 0);
  for (int u = 0; u < g.vertex_count(); ++u) {
    if (mark[u * 2] == 0 && !dep_longest(walk, u * 2, mark, len)) return false;
  }
  if (out_depths) {
    out_depths->resize(g.vertex_count());
    for (int u = 0; u < g.vertex_count(); ++u) (*out_depths)[u] = len[u * 2];
  }
  return true;
}

}  // namespace

bool is_dep_acyclic(const DepGraph& h) { return dep_compute(*h.graph, nullptr); }

std::vector<int> depths(const DepGraph& h) {
  std::vector<int> d;
  if (!dep_compute(*h.graph, &d))
    raise(Errc::DepthUndefined, "dependency graph is cyclic; depths are undefined");
  return d;
}

namespace {

// A ring is a simple directed cycle over processes (arcs stepping from
// sender to receiver) where every member's outgoing send precedes its
// incoming receive in its own chain. Rotations are deduplicated by
// rooting each cycle at its smallest process index.
struct RingSearch {
  const CommGraph& g;
  const std::vector<std::vector<int>>& arcs_from;
  int t_max;
  int root;
  std::vector<int> path;  // arcs of the cycle so far
  std::vector<int8_t> used;
  std::vector<Ring>& out;

  void assemble() {
    Ring r;
    const size_t t = path.size();
    for (size_t k = 0; k < t; ++k) {
      const CommArc& out_arc = g.arc(path[k]);
      const CommArc& in_arc = g.arc(path[(k + t - 1) % t]);
      r.members.push_back(Ring::Member{out_arc.send.process, out_arc.send.position,
                                       in_arc.recv.position});
    }
    out.push_back(std::move(r));
  }

  // `proc` is the process the last arc landed on; `recv_pos` is where it
  // landed. Its outgoing arc must start before that position.
  void extend(int proc, int recv_pos) {
    for (int a : arcs_from[proc]) {
      const CommArc& arc = g.arc(a);
      if (arc.send.position >= recv_pos) continue;
      int q = arc.recv.process;
      if (q == root) {
        const CommArc& root_out = g.arc(path[0]);
        if (root_out.send.position < arc.recv.position) {
          path.push_back(a);
          assemble();
          path.pop_back();
        }
        continue;
      }
      if (q < root || used[q]) continue;
      if (static_cast<int>(path.size()) + 1 >= t_max) continue;
      used[q] = 1;
      path.push_back(a);
      extend(q, arc.recv.position);
      path.pop_back();
      used[q] = 0;
    }
  }
};

}  // namespace

std::vector<Ring> find_rings(const CommGraph& g, int t_max) {
  if (t_max < 2) raise(Errc::BadArity, "t_max must be at least 2");
  std::vector<Ring> rings;
  const int n = g.process_count();
  std::vector<std::vector<int>> arcs_from(n);
  for (int a = 0; a < static_cast<int>(g.arcs().size()); ++a)
    arcs_from[g.arc(a).send.process].push_back(a);

  for (int root = 0; root < n; ++root) {
    for (int a : arcs_from[root]) {
      const CommArc& arc = g.arc(a);
      int q = arc.recv.process;
      if (q <= root) continue;
      RingSearch search{g, arcs_from, t_max, root, {a}, std::vector<int8_t>(n, 0), rings};
      search.used[root] = 1;
      search.used[q] = 1;
      search.extend(q, arc.recv.position);
    }
  }
  return rings;
}

}  // namespace bufalloc
