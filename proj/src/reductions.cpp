#include "bufalloc/reductions.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "bufalloc/errors.hpp"

namespace bufalloc {

namespace {

std::vector<std::array<int, 3>> parse_formula(const std::string& text, const char* want_kind,
                                              int& var_count) {
  std::istringstream is(text);
  std::string line;
  bool have_header = false;
  int declared = 0;
  std::vector<std::array<int, 3>> rows;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "c") continue;
    if (first == "p") {
      std::string kind;
      if (!(ls >> kind >> var_count >> declared))
        raise(Errc::ParseError, "formula: malformed header");
      if (kind != want_kind)
        raise(Errc::ParseError, std::string("formula: expected 'p ") + want_kind + "', got 'p " +
                                    kind + "'");
      if (var_count < 1) raise(Errc::ParseError, "formula: variable count must be positive");
      have_header = true;
      continue;
    }
    if (!have_header) raise(Errc::ParseError, "formula: clause line before header");
    std::array<int, 3> lits{};
    int lit = 0;
    try {
      lits[0] = std::stoi(first);
    } catch (...) {
      raise(Errc::ParseError, "formula: bad literal \"" + first + "\"");
    }
    if (!(ls >> lits[1] >> lits[2] >> lit) || lit != 0)
      raise(Errc::ParseError, "formula: each line needs three literals and a closing 0");
    for (int l : lits)
      if (l == 0 || std::abs(l) > var_count)
        raise(Errc::ParseError, "formula: literal " + std::to_string(l) + " out of range");
    rows.push_back(lits);
  }
  if (!have_header) raise(Errc::ParseError, "formula: missing header");
  if (static_cast<int>(rows.size()) != declared)
    raise(Errc::ParseError, "formula: header declares " + std::to_string(declared) +
                                " lines, found " + std::to_string(rows.size()));
  return rows;
}

std::string dump_formula(const char* kind, int var_count,
                         const std::vector<std::array<int, 3>>& rows) {
  std::ostringstream os;
  os << "p " << kind << ' ' << var_count << ' ' << rows.size() << '\n';
  for (const auto& r : rows) os << r[0] << ' ' << r[1] << ' ' << r[2] << " 0\n";
  return os.str();
}

/// literal -> dense index: x_i -> 2(i-1), negated x_i -> 2(i-1)+1
int lit_index(int lit) { return 2 * (std::abs(lit) - 1) + (lit < 0 ? 1 : 0); }

std::string lit_name(int lit) {
  return (lit < 0 ? "nx" : "x") + std::to_string(std::abs(lit));
}

int complement_index(int idx) { return idx ^ 1; }

}  // namespace

Cnf3 parse_cnf(const std::string& text) {
  Cnf3 f;
  f.clauses = parse_formula(text, "cnf", f.var_count);
  return f;
}

Dnf3 parse_dnf(const std::string& text) {
  Dnf3 f;
  f.terms = parse_formula(text, "dnf", f.var_count);
  return f;
}

std::string dump_cnf(const Cnf3& f) { return dump_formula("cnf", f.var_count, f.clauses); }
std::string dump_dnf(const Dnf3& f) { return dump_formula("dnf", f.var_count, f.terms); }

ReductionFixture sat_to_bap_receive(const Cnf3& f) {
  const int n = f.var_count;
  TraceBuilder tb;
  for (int i = 1; i <= n; ++i) {
    tb.add_process(lit_name(i));
    tb.add_process(lit_name(-i));
  }
  const int barrier = tb.add_process("barrier");

  auto barrier_exchange = [&](int epoch, const std::vector<int>& pre_ring_barrier) {
    // optional ring vertices come first in the barrier's epoch segment
    (void)pre_ring_barrier;
    std::string e = std::to_string(epoch);
    for (int l = 0; l < 2 * n; ++l) tb.send(l, "sb" + std::to_string(l) + "_" + e);
    for (int l = 0; l < 2 * n; ++l) tb.recv(barrier, "sb" + std::to_string(l) + "_" + e);
    for (int l = 0; l < 2 * n; ++l) tb.send(barrier, "rb" + std::to_string(l) + "_" + e);
    for (int l = 0; l < 2 * n; ++l) tb.recv(l, "rb" + std::to_string(l) + "_" + e);
  };

  // epoch 0: one 2-ring per variable pair, forcing the n tokens onto the
  // literal components
  for (int i = 1; i <= n; ++i) {
    std::string t_msg = "v" + std::to_string(i) + "t";
    std::string f_msg = "v" + std::to_string(i) + "f";
    tb.send(lit_index(i), t_msg);
    tb.recv(lit_index(i), f_msg);
    tb.send(lit_index(-i), f_msg);
    tb.recv(lit_index(-i), t_msg);
  }
  barrier_exchange(0, {});

  // clause epochs: ring the clause's distinct literal components; a
  // single-literal clause rings with the barrier instead (the barrier
  // provably holds no tokens in any candidate assignment of size n)
  for (size_t j = 0; j < f.clauses.size(); ++j) {
    std::vector<int> members;
    for (int lit : f.clauses[j]) {
      int idx = lit_index(lit);
      if (std::find(members.begin(), members.end(), idx) == members.end())
        members.push_back(idx);
    }
    std::string e = std::to_string(j + 1);
    if (members.size() == 1) {
      tb.send(members[0], "ce" + e + "a");
      tb.recv(members[0], "ce" + e + "b");
      tb.send(barrier, "ce" + e + "b");
      tb.recv(barrier, "ce" + e + "a");
    } else {
      const size_t t = members.size();
      for (size_t k = 0; k < t; ++k) {
        tb.send(members[k], "ce" + e + "_" + std::to_string(k));
        tb.recv(members[k], "ce" + e + "_" + std::to_string((k + 1) % t));
      }
    }
    barrier_exchange(static_cast<int>(j + 1), {});
  }

  ReductionFixture fx;
  fx.graph = build_graph(tb.doc());
  fx.scheme = Scheme::ReceiveSide;
  fx.budget = n;
  return fx;
}

ReductionFixture dnf_to_bsp_receive(const Dnf3& f) {
  const int n = f.var_count;
  const int t = static_cast<int>(f.terms.size());
  TraceBuilder tb;

  // variable widgets: two variable components plus an arbitrator
  std::vector<int> var_comp(2 * n);
  std::vector<int> arb_comp(n);
  for (int i = 1; i <= n; ++i) {
    var_comp[lit_index(i)] = tb.add_process(lit_name(i));
    var_comp[lit_index(-i)] = tb.add_process(lit_name(-i));
    arb_comp[i - 1] = tb.add_process("arb" + std::to_string(i));
  }
  std::vector<int> term_comp(t);
  for (int j = 1; j <= t; ++j) term_comp[j - 1] = tb.add_process("term" + std::to_string(j));
  int ringmate = -1;
  if (t == 1) ringmate = tb.add_process("ringmate");

  // disperser targets per literal, in term order
  std::vector<std::vector<std::pair<int, int>>> targets(2 * n);  // (term j, slot)
  for (int j = 0; j < t; ++j)
    for (int s = 0; s < 3; ++s) targets[lit_index(f.terms[j][s])].push_back({j, s});

  // variable components: the arbitrated send, then the disperser feed
  for (int l = 0; l < 2 * n; ++l) {
    tb.send(var_comp[l], "a" + std::to_string(l));
    tb.send(var_comp[l], "t" + std::to_string(l));
  }
  // arbitrators: the done-disperser receive comes first
  for (int i = 0; i < n; ++i) {
    tb.recv(arb_comp[i], "dn" + std::to_string(i));
    tb.recv(arb_comp[i], "a" + std::to_string(lit_index(i + 1)));
    tb.recv(arb_comp[i], "a" + std::to_string(lit_index(-(i + 1))));
  }
  // term components: the ring pair, s_done on the first, then the
  // occurrence receives fed by dispersers
  for (int j = 0; j < t; ++j) {
    tb.send(term_comp[j], "tr" + std::to_string(j + 1));
    if (t == 1) {
      tb.recv(term_comp[j], "trh");
    } else {
      tb.recv(term_comp[j], "tr" + std::to_string(j == 0 ? t : j));
    }
    if (j == 0) tb.send(term_comp[j], "sdone");
    for (int s = 0; s < 3; ++s)
      tb.recv(term_comp[j], "occ" + std::to_string(j) + "_" + std::to_string(s));
  }
  if (t == 1) {
    tb.send(ringmate, "trh");
    tb.recv(ringmate, "tr1");
  }

  // one disperser per literal: master fans the literal's signal out to
  // zero-token slaves, one per occurrence receive
  for (int l = 0; l < 2 * n; ++l) {
    int master = tb.add_process("dm_" + std::to_string(l));
    tb.recv(master, "t" + std::to_string(l));
    for (size_t k = 0; k < targets[l].size(); ++k) {
      std::string wire = "dw" + std::to_string(l) + "_" + std::to_string(k);
      tb.send(master, wire);
      int slave = tb.add_process("ds_" + std::to_string(l) + "_" + std::to_string(k));
      tb.recv(slave, wire);
      auto [j, s] = targets[l][k];
      tb.send(slave, "occ" + std::to_string(j) + "_" + std::to_string(s));
    }
  }
  // the done disperser wakes every arbitrator
  {
    int master = tb.add_process("dm_done");
    tb.recv(master, "sdone");
    for (int i = 0; i < n; ++i) {
      std::string wire = "dd" + std::to_string(i);
      tb.send(master, wire);
      int slave = tb.add_process("ds_done_" + std::to_string(i));
      tb.recv(slave, wire);
      tb.send(slave, "dn" + std::to_string(i));
    }
  }

  ReductionFixture fx;
  fx.graph = build_graph(tb.doc());
  fx.scheme = Scheme::ReceiveSide;
  fx.budget = n + t;
  fx.has_assignment = true;
  fx.assignment = zero_assignment(fx.graph, Scheme::ReceiveSide);
  for (int i = 0; i < n; ++i)
    fx.assignment.per_pool[fx.graph.process_index("arb" + std::to_string(i + 1))] = 1;
  for (int j = 1; j <= t; ++j)
    fx.assignment.per_pool[fx.graph.process_index("term" + std::to_string(j))] = 1;
  return fx;
}

ReductionFixture sat_to_nbap_mixed(const Cnf3& f) {
  const int n = f.var_count;
  TraceBuilder tb;
  for (int i = 1; i <= n; ++i) {
    tb.add_process(lit_name(i));
    tb.add_process(lit_name(-i));
  }
  const int comp_p = tb.add_process("p");
  const int q0 = tb.add_process("q0");
  const int q1 = tb.add_process("q1");

  // epoch 0: a single arc per variable pair plus the double handshakes
  // that pin two tokens on component p
  for (int i = 1; i <= n; ++i) {
    tb.send(lit_index(i), "w" + std::to_string(i));
    tb.recv(lit_index(-i), "w" + std::to_string(i));
  }
  for (int side = 0; side < 2; ++side) {
    int q = side == 0 ? q0 : q1;
    std::string tag = std::to_string(side);
    tb.send(comp_p, "pq" + tag + "_1");
    tb.send(comp_p, "pq" + tag + "_2");
    tb.recv(comp_p, "qp" + tag + "_1");
    tb.recv(comp_p, "qp" + tag + "_2");
    tb.recv(q, "pq" + tag + "_1");
    tb.recv(q, "pq" + tag + "_2");
    tb.send(q, "qp" + tag + "_1");
    tb.send(q, "qp" + tag + "_2");
  }

  // clause epochs: a synchronization part (p alternates send/receive
  // with each occurrence) and an evaluation part (three sends, then
  // three receives, demanding three concurrent buffers)
  const char* slot_name[3] = {"a", "b", "c"};
  for (size_t j = 0; j < f.clauses.size(); ++j) {
    std::string e = std::to_string(j + 1);
    for (int s = 0; s < 3; ++s) {
      std::string base = e + slot_name[s];
      tb.send(comp_p, "s" + base);
      tb.recv(comp_p, "q" + base);
    }
    for (int s = 0; s < 3; ++s) tb.send(comp_p, "sp" + e + slot_name[s]);
    for (int s = 0; s < 3; ++s) tb.recv(comp_p, "qp" + e + slot_name[s]);
    // literal components: all sync pairs first, then all eval pairs
    for (int s = 0; s < 3; ++s) {
      int comp = lit_index(f.clauses[j][s]);
      std::string base = e + slot_name[s];
      tb.recv(comp, "s" + base);
      tb.send(comp, "q" + base);
    }
    for (int s = 0; s < 3; ++s) {
      int comp = lit_index(f.clauses[j][s]);
      std::string base = e + slot_name[s];
      tb.recv(comp, "sp" + base);
      tb.send(comp, "qp" + base);
    }
  }

  ReductionFixture fx;
  fx.graph = build_graph(tb.doc());
  fx.scheme = Scheme::Mixed;
  fx.budget = n + 2;
  return fx;
}

ReductionFixture sat_to_bap_channel(const Cnf3& f) {
  const int n = f.var_count;
  TraceBuilder tb;
  for (int i = 1; i <= n; ++i) {
    tb.add_process(lit_name(i));
    tb.add_process(lit_name(-i));
  }

  // epoch 0: variable 2-rings; only pair channels can carry the n tokens
  for (int i = 1; i <= n; ++i) {
    std::string t_msg = "v" + std::to_string(i) + "t";
    std::string f_msg = "v" + std::to_string(i) + "f";
    tb.send(lit_index(i), t_msg);
    tb.recv(lit_index(i), f_msg);
    tb.send(lit_index(-i), f_msg);
    tb.recv(lit_index(-i), t_msg);
  }

  for (size_t j = 0; j < f.clauses.size(); ++j) {
    std::string e = std::to_string(j + 1);
    // distinct literals; a clause holding a complementary pair is always
    // satisfied, and its epoch-0 channel always holds a token, so it
    // contributes no widget
    std::vector<int> lits;
    bool tautological = false;
    for (int lit : f.clauses[j]) {
      int idx = lit_index(lit);
      if (std::find(lits.begin(), lits.end(), idx) != lits.end()) continue;
      if (std::find(lits.begin(), lits.end(), complement_index(idx)) != lits.end()) {
        tautological = true;
        break;
      }
      lits.push_back(idx);
    }
    if (tautological) continue;
    if (lits.size() >= 2) {
      // ring through each literal's forward pair channel, linked by
      // never-tokened cross channels
      std::vector<int> members;
      for (int idx : lits) {
        members.push_back(idx);
        members.push_back(complement_index(idx));
      }
      const size_t t = members.size();
      for (size_t k = 0; k < t; ++k) {
        tb.send(members[k], "e" + e + "_" + std::to_string(k));
        tb.recv(members[k], "e" + e + "_" + std::to_string((k + t - 1) % t));
      }
    } else {
      // single-literal clause: a 2-ring over the pair would be broken by
      // the reverse-channel token as well, so add a decoy receive that a
      // deadlocking schedule can park the reverse token on
      int l = lits[0];
      int lb = complement_index(l);
      tb.send(l, "e" + e + "m1");
      tb.recv(l, "e" + e + "m3");
      tb.recv(l, "e" + e + "m0");
      tb.send(lb, "e" + e + "m3");
      tb.send(lb, "e" + e + "m0");
      tb.recv(lb, "e" + e + "m1");
    }
  }

  ReductionFixture fx;
  fx.graph = build_graph(tb.doc());
  fx.scheme = Scheme::Channel;
  fx.budget = n;
  return fx;
}

CommGraph expand_channel_tokens(const CommGraph& g, const BufferAssignment& b) {
  if (b.scheme != Scheme::Channel)
    raise(Errc::AssignmentShapeMismatch, "channel expansion needs a channel assignment");
  if (static_cast<int>(b.per_pool.size()) != g.channel_count())
    raise(Errc::AssignmentShapeMismatch, "assignment does not match the graph's channels");

  // arcs of each expanded channel, in queue (send position) order
  std::vector<std::vector<int>> chan_arcs(g.channel_count());
  for (int a = 0; a < static_cast<int>(g.arcs().size()); ++a)
    chan_arcs[g.channel_of_arc(a)].push_back(a);
  for (auto& arcs : chan_arcs)
    std::sort(arcs.begin(), arcs.end(), [&](int x, int y) {
      return g.arc(x).send.position < g.arc(y).send.position;
    });

  // per arc, the message name each side uses after expansion
  std::vector<std::string> send_msg(g.arcs().size()), recv_msg(g.arcs().size());
  for (int a = 0; a < static_cast<int>(g.arcs().size()); ++a)
    send_msg[a] = recv_msg[a] = g.arc(a).msg;

  TraceBuilder tb;
  TraceDocument original = to_trace(g);
  for (const auto& p : original.processes) tb.add_process(p.name);

  struct Relay {
    std::string name;
    std::vector<std::pair<std::string, std::string>> hops;  // recv msg, send msg
  };
  std::vector<Relay> relays;
  for (int ch = 0; ch < g.channel_count(); ++ch) {
    int m = b.per_pool[ch];
    if (m == 0) continue;
    ChannelId c = g.channel(ch);
    std::string base = g.process_name(c.from) + ">" + g.process_name(c.to) + "#";
    for (int k = 1; k <= m; ++k) {
      Relay relay;
      relay.name = base + std::to_string(k);
      for (int a : chan_arcs[ch]) {
        std::string in = k == 1 ? g.arc(a).msg : g.arc(a).msg + "#" + std::to_string(k - 1);
        std::string out = g.arc(a).msg + "#" + std::to_string(k);
        relay.hops.push_back({in, out});
        if (k == m) recv_msg[a] = out;
      }
      relays.push_back(std::move(relay));
    }
  }

  for (int p = 0; p < g.process_count(); ++p) {
    for (int pos = 1; pos <= g.event_count(p); ++pos) {
      VertexId v{p, pos};
      int a = g.arc_at(v);
      if (g.arc(a).send == v)
        tb.send(p, send_msg[a]);
      else
        tb.recv(p, recv_msg[a]);
    }
  }
  for (const Relay& relay : relays) {
    int comp = tb.add_process(relay.name);
    for (const auto& [in, out] : relay.hops) {
      tb.recv(comp, in);
      tb.send(comp, out);
    }
  }
  return build_graph(tb.doc());
}

CommGraph receive_to_mixed(const CommGraph& g) {
  TraceBuilder tb;
  TraceDocument original = to_trace(g);
  for (const auto& p : original.processes) tb.add_process(p.name);

  // original senders keep their messages, now landing on the widget; the
  // widget's own send (placed before its receive) feeds the original
  // receiver, so buffering it can only draw from the receiver's pool
  for (int p = 0; p < g.process_count(); ++p) {
    for (int pos = 1; pos <= g.event_count(p); ++pos) {
      VertexId v{p, pos};
      const CommArc& arc = g.arc(g.arc_at(v));
      if (arc.send == v)
        tb.send(p, arc.msg);
      else
        tb.recv(p, arc.msg + "!r");
    }
  }
  for (const auto& arc : g.arcs()) {
    int widget = tb.add_process("w_" + arc.msg);
    tb.send(widget, arc.msg + "!r");
    tb.recv(widget, arc.msg);
  }
  return build_graph(tb.doc());
}

}  // namespace bufalloc
