#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bufalloc/trace.hpp"

namespace bufalloc {

enum class VertexKind { Start, Send, Recv, End };

/// Event coordinates: position 0 is the start vertex, positions
/// 1..event_count are communication events, event_count+1 is the end.
struct VertexId {
  int process = 0;
  int position = 0;
  bool operator==(const VertexId&) const = default;
  auto operator<=>(const VertexId&) const = default;
};

/// Ordered, unidirectional process pair.
struct ChannelId {
  int from = 0;
  int to = 0;
  bool operator==(const ChannelId&) const = default;
  auto operator<=>(const ChannelId&) const = default;
};

struct CommArc {
  VertexId send;
  VertexId recv;
  std::string msg;
};

/// A cycle of alternating send/receive events across t >= 2 processes:
/// member j's receive is fed by member (j+1 mod t)'s send, and each
/// member's send precedes its receive in its own component.
struct Ring {
  struct Member {
    int process = 0;
    int send_pos = 0;
    int recv_pos = 0;
  };
  std::vector<Member> members;
};

/// Validated communication graph: per-process event chains plus matched
/// communication arcs; acyclic over process and communication arcs.
class CommGraph {
public:
  int process_count() const { return static_cast<int>(names_.size()); }
  int event_count(int process) const { return event_counts_[process]; }
  const std::string& process_name(int process) const { return names_[process]; }
  int process_index(const std::string& name) const;  // -1 when unknown

  /// Total vertex count including start and end vertices.
  int vertex_count() const { return total_vertices_; }
  int event_vertex_count() const;

  int flat(VertexId v) const { return offsets_[v.process] + v.position; }
  VertexId unflat(int id) const;

  VertexKind kind(VertexId v) const;
  bool is_event(VertexId v) const {
    return v.position >= 1 && v.position <= event_counts_[v.process];
  }

  /// Arc index of a send/recv event, -1 for start/end vertices.
  int arc_at(VertexId v) const { return arc_at_[flat(v)]; }
  const std::vector<CommArc>& arcs() const { return arcs_; }
  const CommArc& arc(int a) const { return arcs_[a]; }

  int channel_count() const { return static_cast<int>(channels_.size()); }
  ChannelId channel(int id) const { return channels_[id]; }
  int channel_of_arc(int a) const { return arc_channel_[a]; }
  int channel_index(ChannelId ch) const;  // -1 when absent

  /// Vertices in an order where every arc (process or communication)
  /// goes forward.
  const std::vector<VertexId>& topo_order() const { return topo_; }

  friend CommGraph build_graph(const TraceDocument& doc);

private:
  std::vector<std::string> names_;
  std::vector<int> event_counts_;
  std::vector<int> offsets_;
  int total_vertices_ = 0;
  std::vector<int> arc_at_;
  std::vector<CommArc> arcs_;
  std::vector<ChannelId> channels_;
  std::vector<int> arc_channel_;
  std::vector<VertexId> topo_;
};

/// Validates the trace and constructs the graph.
/// Errors: UnmatchedMessage, SelfMessage, CausalityCycle.
CommGraph build_graph(const TraceDocument& doc);

/// Inverse of build_graph; round-trips exactly.
TraceDocument to_trace(const CommGraph& g);

std::string to_dot(const CommGraph& g);

/// Reachability vectors: result[flat(v)*n + j] is the smallest position d
/// such that a directed path runs from v to vertex (j, d), or the
/// sentinel (vertex_count()+1) when process j is unreachable from v.
/// For v's own process the entry is v's position.
std::vector<int32_t> reach_vectors(const CommGraph& g);

int32_t reach_sentinel(const CommGraph& g);

/// For each receive vertex, the anchor position that opens its buffer
/// demand interval: the largest c below the receive's position from
/// which a path reaches the matching send (the start vertex qualifies
/// unconditionally). Indexed by flat vertex id; -1 for non-receives.
std::vector<int> terminal_dependencies(const CommGraph& g, const std::vector<int32_t>& reach);

/// Dependency graph: process arcs reversed, every communication arc
/// doubled into a pair of opposite arcs. Walks may not immediately
/// retraverse the opposite twin of the communication arc just used;
/// cycles and depths are judged over such walks.
struct DepGraph {
  const CommGraph* graph = nullptr;
};

DepGraph dependency_graph(const CommGraph& g);
bool is_dep_acyclic(const DepGraph& h);

/// Longest walk length from each vertex to a start vertex.
/// Errors: DepthUndefined when the dependency graph is cyclic.
std::vector<int> depths(const DepGraph& h);

/// All t-rings with 2 <= t <= t_max, deduplicated up to rotation.
std::vector<Ring> find_rings(const CommGraph& g, int t_max);

}  // namespace bufalloc
