#include "bufalloc/coloring.hpp"

#include <algorithm>
#include <cassert>
#include <cstring>
#include <deque>
#include <sstream>
#include <unordered_set>

#include "bufalloc/errors.hpp"

namespace bufalloc {

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::ReceiveSide: return "receive";
    case Scheme::SendSide: return "send";
    case Scheme::Mixed: return "mixed";
    case Scheme::Channel: return "channel";
  }
  return "?";
}

bool parse_scheme(const std::string& text, Scheme& out) {
  if (text == "receive") out = Scheme::ReceiveSide;
  else if (text == "send") out = Scheme::SendSide;
  else if (text == "mixed") out = Scheme::Mixed;
  else if (text == "channel") out = Scheme::Channel;
  else return false;
  return true;
}

int BufferAssignment::total() const {
  int k = 0;
  for (int v : per_pool) k += v;
  return k;
}

int pool_count(const CommGraph& g, Scheme scheme) {
  return scheme == Scheme::Channel ? g.channel_count() : g.process_count();
}

std::string pool_name(const CommGraph& g, Scheme scheme, int pool) {
  if (scheme != Scheme::Channel) return g.process_name(pool);
  ChannelId ch = g.channel(pool);
  return g.process_name(ch.from) + "->" + g.process_name(ch.to);
}

BufferAssignment zero_assignment(const CommGraph& g, Scheme scheme) {
  return BufferAssignment{scheme, std::vector<int>(pool_count(g, scheme), 0)};
}

BufferAssignment assignment_from_document(const CommGraph& g, const AssignmentDocument& doc) {
  Scheme scheme;
  if (!parse_scheme(doc.scheme, scheme))
    raise(Errc::AssignmentShapeMismatch, "unknown scheme \"" + doc.scheme + "\"");
  BufferAssignment b = zero_assignment(g, scheme);
  if (scheme == Scheme::Channel) {
    for (const auto& ct : doc.per_channel) {
      int from = g.process_index(ct.from);
      int to = g.process_index(ct.to);
      if (from < 0 || to < 0)
        raise(Errc::AssignmentShapeMismatch,
              "assignment names unknown process in channel " + ct.from + "->" + ct.to);
      int ch = g.channel_index(ChannelId{from, to});
      if (ch < 0) {
        if (ct.tokens == 0) continue;  // unused channels may be listed with zero tokens
        raise(Errc::AssignmentShapeMismatch,
              "assignment puts tokens on absent channel " + ct.from + "->" + ct.to);
      }
      b.per_pool[ch] += ct.tokens;
    }
  } else {
    for (const auto& [name, v] : doc.per_process) {
      int p = g.process_index(name);
      if (p < 0) raise(Errc::AssignmentShapeMismatch, "assignment names unknown process \"" + name + "\"");
      b.per_pool[p] = v;
    }
    // every process must be covered (explicitly or by the zero default)
    if (static_cast<int>(doc.per_process.size()) > g.process_count())
      raise(Errc::AssignmentShapeMismatch, "assignment lists more processes than the trace");
  }
  return b;
}

AssignmentDocument document_from_assignment(const CommGraph& g, const BufferAssignment& b) {
  AssignmentDocument doc;
  doc.scheme = scheme_name(b.scheme);
  if (b.scheme == Scheme::Channel) {
    for (int ch = 0; ch < g.channel_count(); ++ch) {
      ChannelId c = g.channel(ch);
      doc.per_channel.push_back(
          ChannelTokens{g.process_name(c.from), g.process_name(c.to), b.per_pool[ch]});
    }
  } else {
    for (int p = 0; p < g.process_count(); ++p) doc.per_process[g.process_name(p)] = b.per_pool[p];
  }
  return doc;
}

bool ColoringState::all_green() const {
  for (uint8_t c : colour)
    if (c != static_cast<uint8_t>(Colour::Green)) return false;
  return true;
}

std::vector<uint8_t> ColoringState::canonical_bytes() const {
  std::vector<uint8_t> bytes;
  bytes.reserve(colour.size() + pool_free.size() * 4 + arc_token.size() * 2);
  bytes.insert(bytes.end(), colour.begin(), colour.end());
  for (int32_t v : pool_free)
    for (int k = 0; k < 4; ++k) bytes.push_back(static_cast<uint8_t>(v >> (8 * k)));
  for (int16_t v : arc_token)
    for (int k = 0; k < 2; ++k) bytes.push_back(static_cast<uint8_t>(v >> (8 * k)));
  return bytes;
}

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::SendYel: return "SendYel";
    case Rule::RecvYel: return "RecvYel";
    case Rule::RecvBufYel: return "RecvBufYel";
    case Rule::SendGrn: return "SendGrn";
    case Rule::RecvGrn: return "RecvGrn";
    case Rule::EndYel: return "EndYel";
    case Rule::EndGrn: return "EndGrn";
  }
  return "?";
}

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::AllComplete: return "AllComplete";
    case Outcome::DeadlockFound: return "DeadlockFound";
    case Outcome::BlockFound: return "BlockFound";
  }
  return "?";
}

ColoringState initial_state(const CommGraph& g, const BufferAssignment& b) {
  if (static_cast<int>(b.per_pool.size()) != pool_count(g, b.scheme))
    raise(Errc::AssignmentShapeMismatch,
          "assignment has " + std::to_string(b.per_pool.size()) + " pools, graph needs " +
              std::to_string(pool_count(g, b.scheme)));
  for (int v : b.per_pool)
    if (v < 0) raise(Errc::AssignmentShapeMismatch, "negative token count");
  ColoringState s;
  s.colour.assign(g.vertex_count(), static_cast<uint8_t>(Colour::Red));
  for (int p = 0; p < g.process_count(); ++p)
    s.colour[g.flat(VertexId{p, 0})] = static_cast<uint8_t>(Colour::Green);
  s.pool_free.assign(b.per_pool.begin(), b.per_pool.end());
  s.arc_token.assign(g.arcs().size(), -1);
  return s;
}

namespace {

inline Colour col(const ColoringState& s, const CommGraph& g, VertexId v) {
  return static_cast<Colour>(s.colour[g.flat(v)]);
}

inline bool pred_green(const ColoringState& s, const CommGraph& g, VertexId v) {
  return col(s, g, VertexId{v.process, v.position - 1}) == Colour::Green;
}

// Enumerates the ways a token could be drawn to buffer arc `a`, as
// (take_pool, swap_arc) pairs. Under the mixed scheme the lazy order
// applies: the sender's pool, else the receiver's, else swaps that free
// a sender-owned token already sitting on an outgoing arc.
void token_choices(const ColoringState& s, const CommGraph& g, const BufferAssignment& b, int a,
                   std::vector<std::pair<int, int>>& out) {
  out.clear();
  const CommArc& arc = g.arc(a);
  switch (b.scheme) {
    case Scheme::ReceiveSide:
      if (s.pool_free[arc.recv.process] > 0) out.push_back({arc.recv.process, -1});
      break;
    case Scheme::SendSide:
      if (s.pool_free[arc.send.process] > 0) out.push_back({arc.send.process, -1});
      break;
    case Scheme::Channel: {
      int ch = g.channel_of_arc(a);
      if (s.pool_free[ch] > 0) out.push_back({ch, -1});
      break;
    }
    case Scheme::Mixed: {
      const int sender = arc.send.process;
      const int receiver = arc.recv.process;
      if (s.pool_free[sender] > 0) {
        out.push_back({sender, -1});
      } else if (s.pool_free[receiver] > 0) {
        out.push_back({receiver, -1});
      } else {
        for (int e = 0; e < static_cast<int>(g.arcs().size()); ++e) {
          if (e == a || s.arc_token[e] != sender) continue;
          const CommArc& earc = g.arc(e);
          if (earc.send.process != sender) continue;  // only sender-placed tokens swap
          int k = earc.recv.process;
          if (s.pool_free[k] > 0) out.push_back({k, e});
        }
      }
      break;
    }
  }
}

}  // namespace

std::vector<Move> enabled_moves(const ColoringState& s, const CommGraph& g,
                                const BufferAssignment& b) {
  std::vector<Move> moves;
  std::vector<std::pair<int, int>> choices;
  for (int p = 0; p < g.process_count(); ++p) {
    const int e_count = g.event_count(p);
    for (int pos = 1; pos <= e_count + 1; ++pos) {
      VertexId v{p, pos};
      Colour c = col(s, g, v);
      if (c == Colour::Green) continue;
      if (pos == e_count + 1) {
        if (c == Colour::Red && pred_green(s, g, v))
          moves.push_back(Move{Rule::EndYel, v});
        else if (c == Colour::Yellow)
          moves.push_back(Move{Rule::EndGrn, v});
        continue;
      }
      int a = g.arc_at(v);
      const CommArc& arc = g.arc(a);
      if (arc.send == v) {
        if (c == Colour::Red) {
          if (pred_green(s, g, v)) moves.push_back(Move{Rule::SendYel, v});
        } else if (col(s, g, arc.recv) == Colour::Yellow) {
          moves.push_back(Move{Rule::SendGrn, v});
        }
      } else {
        if (c == Colour::Red) {
          if (col(s, g, arc.send) == Colour::Yellow) {
            if (pred_green(s, g, v)) moves.push_back(Move{Rule::RecvYel, v});
            token_choices(s, g, b, a, choices);
            for (auto [pool, swap] : choices)
              moves.push_back(Move{Rule::RecvBufYel, v, pool, swap});
          }
        } else if (pred_green(s, g, v) && col(s, g, arc.send) == Colour::Green) {
          moves.push_back(Move{Rule::RecvGrn, v});
        }
      }
    }
  }
  return moves;
}

ColoringState apply_move(const ColoringState& state, const Move& m, const CommGraph& g,
                         const BufferAssignment& b) {
  auto fail = [&](const char* why) {
    raise(Errc::IllegalMove, std::string(rule_name(m.rule)) + " on " +
                                 g.process_name(m.vertex.process) + ":" +
                                 std::to_string(m.vertex.position) + ": " + why);
  };
  ColoringState s = state;
  VertexId v = m.vertex;
  if (v.process < 0 || v.process >= g.process_count() || v.position < 1 ||
      v.position > g.event_count(v.process) + 1)
    fail("no such vertex");
  Colour c = col(s, g, v);
  VertexKind kind = g.kind(v);
  switch (m.rule) {
    case Rule::SendYel:
      if (kind != VertexKind::Send || c != Colour::Red || !pred_green(s, g, v))
        fail("send not ready");
      s.colour[g.flat(v)] = static_cast<uint8_t>(Colour::Yellow);
      break;
    case Rule::EndYel:
      if (kind != VertexKind::End || c != Colour::Red || !pred_green(s, g, v))
        fail("end not ready");
      s.colour[g.flat(v)] = static_cast<uint8_t>(Colour::Yellow);
      break;
    case Rule::EndGrn:
      if (kind != VertexKind::End || c != Colour::Yellow) fail("end not yellow");
      s.colour[g.flat(v)] = static_cast<uint8_t>(Colour::Green);
      break;
    case Rule::SendGrn: {
      if (kind != VertexKind::Send || c != Colour::Yellow) fail("send not yellow");
      const CommArc& arc = g.arc(g.arc_at(v));
      if (col(s, g, arc.recv) != Colour::Yellow) fail("matching receive not yellow");
      s.colour[g.flat(v)] = static_cast<uint8_t>(Colour::Green);
      break;
    }
    case Rule::RecvYel: {
      if (kind != VertexKind::Recv || c != Colour::Red) fail("receive not red");
      const CommArc& arc = g.arc(g.arc_at(v));
      if (col(s, g, arc.send) != Colour::Yellow) fail("matching send not yellow");
      if (!pred_green(s, g, v)) fail("predecessor not green");
      s.colour[g.flat(v)] = static_cast<uint8_t>(Colour::Yellow);
      break;
    }
    case Rule::RecvBufYel: {
      if (kind != VertexKind::Recv || c != Colour::Red) fail("receive not red");
      int a = g.arc_at(v);
      const CommArc& arc = g.arc(a);
      if (col(s, g, arc.send) != Colour::Yellow) fail("matching send not yellow");
      std::vector<std::pair<int, int>> choices;
      token_choices(s, g, b, a, choices);
      if (std::find(choices.begin(), choices.end(), std::make_pair(m.take_pool, m.swap_arc)) ==
          choices.end())
        fail("token not obtainable that way");
      if (m.swap_arc >= 0) {
        // the sender-owned token moves here; the swapped arc now holds
        // one from take_pool
        int sender = arc.send.process;
        s.arc_token[m.swap_arc] = static_cast<int16_t>(m.take_pool);
        s.pool_free[m.take_pool]--;
        s.arc_token[a] = static_cast<int16_t>(sender);
      } else {
        s.pool_free[m.take_pool]--;
        s.arc_token[a] = static_cast<int16_t>(m.take_pool);
      }
      s.colour[g.flat(v)] = static_cast<uint8_t>(Colour::Yellow);
      break;
    }
    case Rule::RecvGrn: {
      if (kind != VertexKind::Recv || c != Colour::Yellow) fail("receive not yellow");
      int a = g.arc_at(v);
      const CommArc& arc = g.arc(a);
      if (!pred_green(s, g, v) || col(s, g, arc.send) != Colour::Green)
        fail("predecessors not green");
      if (s.arc_token[a] >= 0) {
        s.pool_free[s.arc_token[a]]++;
        s.arc_token[a] = -1;
      }
      s.colour[g.flat(v)] = static_cast<uint8_t>(Colour::Green);
      break;
    }
  }
  assert(check_token_conservation(s, g, b));
  return s;
}

bool check_token_conservation(const ColoringState& s, const CommGraph& g,
                              const BufferAssignment& b) {
  std::vector<int> on_arcs(b.per_pool.size(), 0);
  for (int a = 0; a < static_cast<int>(g.arcs().size()); ++a) {
    int owner = s.arc_token[a];
    if (owner < 0) continue;
    if (owner >= static_cast<int>(b.per_pool.size())) return false;
    on_arcs[owner]++;
    // a token sits on an arc only while the receive is yellow
    if (col(s, g, g.arc(a).recv) != Colour::Yellow) return false;
  }
  for (size_t p = 0; p < b.per_pool.size(); ++p)
    if (s.pool_free[p] + on_arcs[p] != b.per_pool[p]) return false;
  return true;
}

bool has_blocked_send(const ColoringState& s, const CommGraph& g, const BufferAssignment& b) {
  std::vector<std::pair<int, int>> choices;
  for (int a = 0; a < static_cast<int>(g.arcs().size()); ++a) {
    const CommArc& arc = g.arc(a);
    if (col(s, g, arc.send) != Colour::Yellow) continue;
    if (col(s, g, arc.recv) != Colour::Red) continue;
    token_choices(s, g, b, a, choices);
    if (choices.empty()) return true;
  }
  return false;
}

namespace {

inline uint64_t mix64(uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

struct Digest {
  uint64_t a, b;
  bool operator==(const Digest&) const = default;
};

struct DigestHash {
  size_t operator()(const Digest& d) const { return static_cast<size_t>(d.a); }
};

Digest digest_state(const ColoringState& s) {
  uint64_t h1 = 0x9e3779b97f4a7c15ULL, h2 = 0xc2b2ae3d27d4eb4fULL;
  auto feed = [&](uint64_t word) {
    h1 = mix64(h1 ^ word);
    h2 = mix64(h2 + word * 0x165667b19e3779f9ULL);
  };
  uint64_t acc = 0;
  int nacc = 0;
  for (uint8_t c : s.colour) {
    acc = acc << 2 | c;
    if (++nacc == 32) {
      feed(acc);
      acc = 0;
      nacc = 0;
    }
  }
  feed(acc ^ (uint64_t(0xa5) << 56));
  for (int32_t v : s.pool_free) feed(static_cast<uint64_t>(static_cast<uint32_t>(v)) | (1ULL << 40));
  for (int16_t v : s.arc_token) feed(static_cast<uint64_t>(static_cast<uint16_t>(v)) | (1ULL << 41));
  feed(s.colour.size());
  return Digest{h1, h2};
}

}  // namespace

namespace {

// Confluent moves: once enabled they stay enabled until applied, they
// are the only rule for their vertex, and applying them never disables
// any other enabled move. Collapsing them deterministically preserves
// deadlock and block reachability exactly; only receive-yellowing
// choices branch. Under the mixed scheme a token return can flip the
// lazy draw order, so a token-carrying RecvGrn is a real choice there.
bool find_eager_move(const ColoringState& s, const CommGraph& g, const BufferAssignment& b,
                     Move& out) {
  for (int p = 0; p < g.process_count(); ++p) {
    const int e_count = g.event_count(p);
    for (int pos = 1; pos <= e_count + 1; ++pos) {
      VertexId v{p, pos};
      Colour c = col(s, g, v);
      if (c == Colour::Green) continue;
      if (pos == e_count + 1) {
        if (c == Colour::Red) {
          if (pred_green(s, g, v)) {
            out = Move{Rule::EndYel, v};
            return true;
          }
        } else {
          out = Move{Rule::EndGrn, v};
          return true;
        }
        continue;
      }
      int a = g.arc_at(v);
      const CommArc& arc = g.arc(a);
      if (arc.send == v) {
        if (c == Colour::Red) {
          if (pred_green(s, g, v)) {
            out = Move{Rule::SendYel, v};
            return true;
          }
        } else if (col(s, g, arc.recv) == Colour::Yellow) {
          out = Move{Rule::SendGrn, v};
          return true;
        }
      } else if (c == Colour::Yellow && pred_green(s, g, v) &&
                 col(s, g, arc.send) == Colour::Green) {
        if (b.scheme != Scheme::Mixed || s.arc_token[a] < 0) {
          out = Move{Rule::RecvGrn, v};
          return true;
        }
      }
    }
  }
  return false;
}

}  // namespace

Verdict explore(const CommGraph& g, const BufferAssignment& b, Target target,
                const ExploreOptions& opts) {
  Verdict verdict;
  std::unordered_set<Digest, DigestHash> visited;
  std::vector<Move> path;
  bool hit = false;

  auto blocked = [&](const ColoringState& s) {
    return target == Target::Block && has_blocked_send(s, g, b);
  };

  // applies confluent moves until none is left, checking the block
  // predicate after every step
  auto close = [&](ColoringState s) {
    if (blocked(s)) {
      hit = true;
      return s;
    }
    Move m;
    while (find_eager_move(s, g, b, m)) {
      s = apply_move(s, m, g, b);
      path.push_back(m);
      if (blocked(s)) {
        hit = true;
        break;
      }
    }
    return s;
  };

  auto count_state = [&]() {
    if (++verdict.states_explored > opts.state_limit)
      raise(Errc::StateLimitExceeded,
            "exploration exceeded " + std::to_string(opts.state_limit) + " states");
  };

  struct Frame {
    ColoringState state;
    std::vector<Move> moves;
    size_t next = 0;
    size_t path_mark = 0;
  };
  std::vector<Frame> stack;

  ColoringState root = close(initial_state(g, b));
  count_state();
  if (!hit) {
    visited.insert(digest_state(root));
    std::vector<Move> moves = enabled_moves(root, g, b);
    if (target == Target::Deadlock && moves.empty() && !root.all_green()) hit = true;
    if (!hit) stack.push_back(Frame{std::move(root), std::move(moves), 0, 0});
  }
  if (hit) {
    verdict.outcome = target == Target::Block ? Outcome::BlockFound : Outcome::DeadlockFound;
    verdict.witness = path;
    return verdict;
  }

  while (!stack.empty()) {
    Frame& top = stack.back();
    if (top.next >= top.moves.size()) {
      path.resize(top.path_mark);
      stack.pop_back();
      continue;
    }
    const Move m = top.moves[top.next++];
    size_t mark = path.size();
    path.push_back(m);
    ColoringState child = close(apply_move(top.state, m, g, b));
    if (!hit) {
      Digest d = digest_state(child);
      if (!visited.insert(d).second) {
        path.resize(mark);
        continue;
      }
      count_state();
      std::vector<Move> moves = enabled_moves(child, g, b);
      if (target == Target::Deadlock && moves.empty() && !child.all_green()) hit = true;
      if (!hit) {
        stack.push_back(Frame{std::move(child), std::move(moves), 0, mark});
        continue;
      }
    }
    verdict.outcome = target == Target::Block ? Outcome::BlockFound : Outcome::DeadlockFound;
    verdict.witness = path;
    return verdict;
  }
  verdict.outcome = Outcome::AllComplete;
  return verdict;
}

namespace {

int rule_priority(Rule r) {
  switch (r) {
    case Rule::RecvGrn: return 0;
    case Rule::SendGrn: return 1;
    case Rule::RecvYel: return 2;
    case Rule::RecvBufYel: return 3;
    case Rule::SendYel: return 4;
    case Rule::EndYel: return 5;
    case Rule::EndGrn: return 6;
  }
  return 7;
}

}  // namespace

Verdict run_greedy(const CommGraph& g, const BufferAssignment& b) {
  Verdict verdict;
  ColoringState s = initial_state(g, b);
  verdict.states_explored = 1;

  // FIFO queue of candidate vertices; each pop applies at most one move,
  // chosen by rule priority for that vertex. Colour changes re-enqueue
  // the neighbours they may have enabled; freed tokens re-enqueue the
  // pool's stalled receives.
  std::deque<int> queue;
  std::vector<uint8_t> queued(g.vertex_count(), 0);
  std::vector<std::vector<int>> stalled;  // per pool: flat receive ids waiting for a token
  stalled.resize(b.per_pool.size());

  auto enqueue = [&](VertexId v) {
    if (v.position < 1 || v.position > g.event_count(v.process) + 1) return;
    int id = g.flat(v);
    if (queued[id]) return;
    queued[id] = 1;
    queue.push_back(id);
  };
  for (int p = 0; p < g.process_count(); ++p)
    for (int pos = 1; pos <= g.event_count(p) + 1; ++pos) enqueue(VertexId{p, pos});

  auto wake_pool = [&](size_t pool) {
    for (int id : stalled[pool]) {
      if (!queued[id]) {
        queued[id] = 1;
        queue.push_back(id);
      }
    }
    stalled[pool].clear();
  };

  std::vector<std::pair<int, int>> choices;
  while (!queue.empty()) {
    int id = queue.front();
    queue.pop_front();
    queued[id] = 0;
    VertexId v = g.unflat(id);
    Colour c = static_cast<Colour>(s.colour[id]);
    if (c == Colour::Green) continue;

    Move chosen;
    bool have = false;
    VertexKind kind = g.kind(v);
    if (kind == VertexKind::End) {
      if (c == Colour::Yellow) {
        chosen = Move{Rule::EndGrn, v};
        have = true;
      } else if (pred_green(s, g, v)) {
        chosen = Move{Rule::EndYel, v};
        have = true;
      }
    } else if (kind == VertexKind::Send) {
      const CommArc& arc = g.arc(g.arc_at(v));
      if (c == Colour::Yellow) {
        if (col(s, g, arc.recv) == Colour::Yellow) {
          chosen = Move{Rule::SendGrn, v};
          have = true;
        }
      } else if (pred_green(s, g, v)) {
        chosen = Move{Rule::SendYel, v};
        have = true;
      }
    } else {
      int a = g.arc_at(v);
      const CommArc& arc = g.arc(a);
      if (c == Colour::Yellow) {
        if (pred_green(s, g, v) && col(s, g, arc.send) == Colour::Green) {
          chosen = Move{Rule::RecvGrn, v};
          have = true;
        }
      } else if (col(s, g, arc.send) == Colour::Yellow) {
        if (pred_green(s, g, v)) {
          chosen = Move{Rule::RecvYel, v};
          have = true;
        } else {
          token_choices(s, g, b, a, choices);
          if (!choices.empty()) {
            chosen = Move{Rule::RecvBufYel, v, choices.front().first, choices.front().second};
            have = true;
          } else {
            // remember which pools could unblock this receive
            switch (b.scheme) {
              case Scheme::ReceiveSide: stalled[arc.recv.process].push_back(id); break;
              case Scheme::SendSide: stalled[arc.send.process].push_back(id); break;
              case Scheme::Channel: stalled[g.channel_of_arc(a)].push_back(id); break;
              case Scheme::Mixed:
                stalled[arc.recv.process].push_back(id);
                stalled[arc.send.process].push_back(id);
                break;
            }
          }
        }
      }
    }
    if (!have) continue;

    int freed_pool = -1;
    if (chosen.rule == Rule::RecvGrn) {
      int a = g.arc_at(v);
      if (s.arc_token[a] >= 0) freed_pool = s.arc_token[a];
    }
    s = apply_move(s, chosen, g, b);
    verdict.states_explored++;
    verdict.witness.push_back(chosen);

    // progress may enable: this vertex again, its chain successor, and
    // its communication partner
    enqueue(v);
    enqueue(VertexId{v.process, v.position + 1});
    if (kind == VertexKind::Send || kind == VertexKind::Recv) {
      const CommArc& arc = g.arc(g.arc_at(v));
      enqueue(arc.send == v ? arc.recv : arc.send);
    }
    if (freed_pool >= 0) wake_pool(freed_pool);
    if (chosen.rule == Rule::SendYel || chosen.rule == Rule::SendGrn ||
        chosen.rule == Rule::RecvGrn) {
      // sends turning yellow make buffering possible; greens may unblock
      // synchronous receives downstream of the partner as well
      if (kind == VertexKind::Send || kind == VertexKind::Recv) {
        const CommArc& arc = g.arc(g.arc_at(v));
        VertexId partner = arc.send == v ? arc.recv : arc.send;
        enqueue(VertexId{partner.process, partner.position + 1});
      }
    }
  }

  verdict.outcome = s.all_green() ? Outcome::AllComplete : Outcome::DeadlockFound;
  return verdict;
}

ColoringState replay_witness(const CommGraph& g, const BufferAssignment& b,
                             const std::vector<Move>& witness) {
  ColoringState s = initial_state(g, b);
  for (const Move& m : witness) s = apply_move(s, m, g, b);
  return s;
}

std::string dump_witness(const CommGraph& g, const BufferAssignment& b,
                         const std::vector<Move>& witness) {
  std::ostringstream os;
  for (const Move& m : witness) {
    os << rule_name(m.rule) << ' ' << g.process_name(m.vertex.process) << ':'
       << m.vertex.position;
    if (m.rule == Rule::RecvBufYel) {
      os << " token " << pool_name(g, b.scheme, m.take_pool);
      if (m.swap_arc >= 0) {
        const CommArc& e = g.arc(m.swap_arc);
        os << " swap " << g.process_name(e.recv.process) << ':' << e.recv.position;
      }
    }
    os << '\n';
  }
  return os.str();
}

namespace {

VertexId parse_vertex_ref(const CommGraph& g, const std::string& token) {
  auto colon = token.rfind(':');
  if (colon == std::string::npos) raise(Errc::ParseError, "witness: expected proc:pos, got \"" + token + "\"");
  int p = g.process_index(token.substr(0, colon));
  if (p < 0) raise(Errc::ParseError, "witness: unknown process in \"" + token + "\"");
  int pos = 0;
  try {
    pos = std::stoi(token.substr(colon + 1));
  } catch (...) {
    raise(Errc::ParseError, "witness: bad position in \"" + token + "\"");
  }
  return VertexId{p, pos};
}

int parse_pool_ref(const CommGraph& g, Scheme scheme, const std::string& token) {
  if (scheme == Scheme::Channel) {
    auto sep = token.find("->");
    if (sep == std::string::npos) raise(Errc::ParseError, "witness: expected channel pool from->to");
    int from = g.process_index(token.substr(0, sep));
    int to = g.process_index(token.substr(sep + 2));
    if (from < 0 || to < 0) raise(Errc::ParseError, "witness: unknown process in channel \"" + token + "\"");
    int ch = g.channel_index(ChannelId{from, to});
    if (ch < 0) raise(Errc::ParseError, "witness: no such channel \"" + token + "\"");
    return ch;
  }
  int p = g.process_index(token);
  if (p < 0) raise(Errc::ParseError, "witness: unknown pool \"" + token + "\"");
  return p;
}

}  // namespace

std::vector<Move> parse_witness(const CommGraph& g, const BufferAssignment& b,
                                const std::string& text) {
  std::vector<Move> moves;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string rule_text, vertex_text;
    ls >> rule_text >> vertex_text;
    if (rule_text.empty()) continue;
    Move m;
    bool found = false;
    for (Rule r : {Rule::SendYel, Rule::RecvYel, Rule::RecvBufYel, Rule::SendGrn, Rule::RecvGrn,
                   Rule::EndYel, Rule::EndGrn}) {
      if (rule_text == rule_name(r)) {
        m.rule = r;
        found = true;
        break;
      }
    }
    if (!found) raise(Errc::ParseError, "witness: unknown rule \"" + rule_text + "\"");
    m.vertex = parse_vertex_ref(g, vertex_text);
    std::string word;
    while (ls >> word) {
      if (word == "token") {
        std::string pool_text;
        ls >> pool_text;
        m.take_pool = parse_pool_ref(g, b.scheme, pool_text);
      } else if (word == "swap") {
        std::string ref;
        ls >> ref;
        VertexId rv = parse_vertex_ref(g, ref);
        if (g.kind(rv) != VertexKind::Recv) raise(Errc::ParseError, "witness: swap target is not a receive");
        m.swap_arc = g.arc_at(rv);
      } else {
        raise(Errc::ParseError, "witness: unexpected token \"" + word + "\"");
      }
    }
    moves.push_back(m);
  }
  return moves;
}

}  // namespace bufalloc
