#pragma once

#include <array>
#include <string>
#include <vector>

#include "bufalloc/coloring.hpp"
#include "bufalloc/graph.hpp"

namespace bufalloc {

/// Literals are signed variable indices: +i for x_i, -i for its
/// negation, 1 <= i <= var_count.
struct Cnf3 {
  int var_count = 0;
  std::vector<std::array<int, 3>> clauses;
};

struct Dnf3 {
  int var_count = 0;
  std::vector<std::array<int, 3>> terms;
};

/// DIMACS-like text: header "p cnf <n> <c>" or "p dnf <n> <t>",
/// 'c'-prefixed comment lines, and three signed literals terminated by 0
/// per clause line. Errors: ParseError.
Cnf3 parse_cnf(const std::string& text);
Dnf3 parse_dnf(const std::string& text);
std::string dump_cnf(const Cnf3& f);
std::string dump_dnf(const Dnf3& f);

struct ReductionFixture {
  CommGraph graph;
  Scheme scheme = Scheme::ReceiveSide;
  /// Token budget for allocation-style fixtures.
  int budget = 0;
  /// Fixed assignment for sufficiency-style fixtures (empty per_pool
  /// when the fixture only carries a budget).
  BufferAssignment assignment;
  bool has_assignment = false;
};

/// Satisfiability fixture for the receive scheme: 2n literal components
/// plus a barrier component; epoch 0 holds one 2-ring per variable and
/// every later epoch rings the clause's distinct literal components
/// (falling back to a ring with the barrier when a clause names a single
/// literal). Safe with n tokens iff the formula is satisfiable.
ReductionFixture sat_to_bap_receive(const Cnf3& f);

/// Tautology fixture for the receive scheme: variable widgets with an
/// arbitrator component holding one token, term components holding one
/// token each in a ring, and zero-token disperser widgets wiring them
/// together. Some colouring sequence deadlocks iff the formula is not a
/// tautology.
ReductionFixture dnf_to_bsp_receive(const Dnf3& f);

/// Nonblocking fixture for the mixed scheme: 2n literal components plus
/// components P, Q0, Q1; some (n+2)-token assignment is block-free iff
/// the formula is satisfiable.
ReductionFixture sat_to_nbap_mixed(const Cnf3& f);

/// Satisfiability fixture for the channel scheme: 2n literal components;
/// epoch 0 holds the variable 2-rings and each clause epoch rings the
/// clause literals' component pairs. Safe with n channel tokens iff the
/// formula is satisfiable.
ReductionFixture sat_to_bap_channel(const Cnf3& f);

/// Replaces every m-token channel by m chained relay components so the
/// expanded graph carries an all-zero assignment; complete/deadlock
/// verdicts are preserved. Requires a channel-scheme assignment.
CommGraph expand_channel_tokens(const CommGraph& g, const BufferAssignment& b);

/// Replaces every communication arc by a widget with a zero-token
/// intermediary component so that, under the mixed scheme, buffering the
/// original message always draws from the receiver's pool.
CommGraph receive_to_mixed(const CommGraph& g);

}  // namespace bufalloc
