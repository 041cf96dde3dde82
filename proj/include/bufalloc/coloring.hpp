#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bufalloc/graph.hpp"

namespace bufalloc {

/// Where buffer tokens are pooled: the receiving process, the sending
/// process, either side with lazy draw rules, or the individual channel.
enum class Scheme { ReceiveSide, SendSide, Mixed, Channel };

const char* scheme_name(Scheme s);
bool parse_scheme(const std::string& text, Scheme& out);

/// Token counts per pool. Pools are processes for the per-process
/// schemes and channels for the channel scheme, indexed accordingly.
struct BufferAssignment {
  Scheme scheme = Scheme::ReceiveSide;
  std::vector<int> per_pool;

  int total() const;
};

int pool_count(const CommGraph& g, Scheme scheme);
std::string pool_name(const CommGraph& g, Scheme scheme, int pool);

BufferAssignment zero_assignment(const CommGraph& g, Scheme scheme);

/// Errors: AssignmentShapeMismatch when the document names processes or
/// channels that do not match the graph. Channels absent from the
/// document default to zero tokens.
BufferAssignment assignment_from_document(const CommGraph& g, const AssignmentDocument& doc);
AssignmentDocument document_from_assignment(const CommGraph& g, const BufferAssignment& b);

enum class Colour : uint8_t { Red = 0, Yellow = 1, Green = 2 };

/// Colouring game state: vertex colours, free tokens per pool, and the
/// owning pool of every token currently sitting on an arc.
struct ColoringState {
  std::vector<uint8_t> colour;    // per flat vertex
  std::vector<int32_t> pool_free; // per pool
  std::vector<int16_t> arc_token; // per arc: owning pool, -1 when empty

  bool all_green() const;
  std::vector<uint8_t> canonical_bytes() const;
};

enum class Rule : uint8_t { SendYel, RecvYel, RecvBufYel, SendGrn, RecvGrn, EndYel, EndGrn };

const char* rule_name(Rule r);

/// One colouring step. RecvBufYel under the mixed scheme may carry a
/// swap: the token on swap_arc (owned by the sending process) is
/// replaced by one from take_pool, and the freed token lands on the
/// move's own arc.
struct Move {
  Rule rule = Rule::SendYel;
  VertexId vertex;
  int take_pool = -1;
  int swap_arc = -1;

  bool operator==(const Move&) const = default;
};

enum class Outcome { AllComplete, DeadlockFound, BlockFound };

const char* outcome_name(Outcome o);

struct Verdict {
  Outcome outcome = Outcome::AllComplete;
  std::vector<Move> witness;
  long long states_explored = 0;
};

/// Start vertices green, everything else red, pools full, no arc tokens.
/// Errors: AssignmentShapeMismatch.
ColoringState initial_state(const CommGraph& g, const BufferAssignment& b);

/// Exactly the applicable rule instances in the given state. Under the
/// mixed scheme the token source follows the lazy order: sender pool,
/// then receiver pool, then a swap (one move per candidate arc).
std::vector<Move> enabled_moves(const ColoringState& state, const CommGraph& g,
                                const BufferAssignment& b);

/// Errors: IllegalMove when the move is not applicable.
ColoringState apply_move(const ColoringState& state, const Move& move, const CommGraph& g,
                         const BufferAssignment& b);

bool check_token_conservation(const ColoringState& state, const CommGraph& g,
                              const BufferAssignment& b);

/// True when some arc has a yellow send, a red receive, and no way to
/// draw a token for it under the scheme. This is the strict blocking
/// reading: an applicable synchronous RecvYel does not excuse it.
bool has_blocked_send(const ColoringState& state, const CommGraph& g, const BufferAssignment& b);

enum class Target { Deadlock, Block };

struct ExploreOptions {
  long long state_limit = 5'000'000;
};

/// Exhaustive DFS over reachable colourings with a hashed visited set.
/// Deadlock target: DeadlockFound iff some maximal sequence ends with a
/// non-green vertex. Block target: BlockFound iff some reachable
/// colouring has a blocked send. Witnesses replay from the initial
/// colouring. Errors: StateLimitExceeded.
Verdict explore(const CommGraph& g, const BufferAssignment& b, Target target,
                const ExploreOptions& opts = {});

/// One deterministic maximal colouring sequence driven by a FIFO queue
/// of candidate vertices with fixed per-vertex rule priority
/// RecvGrn > SendGrn > RecvYel > RecvBufYel > SendYel > end rules.
/// Complete as a sufficiency decision for the channel scheme only.
Verdict run_greedy(const CommGraph& g, const BufferAssignment& b);

/// Replays a witness, validating each move. Errors: IllegalMove.
ColoringState replay_witness(const CommGraph& g, const BufferAssignment& b,
                             const std::vector<Move>& witness);

/// Line-oriented witness text: one move per line,
///   <rule> <process>:<position> [token <pool>] [swap <process>:<position>]
std::string dump_witness(const CommGraph& g, const BufferAssignment& b,
                         const std::vector<Move>& witness);
std::vector<Move> parse_witness(const CommGraph& g, const BufferAssignment& b,
                                const std::string& text);

}  // namespace bufalloc
