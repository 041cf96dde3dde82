#include <doctest.h>

#include <numeric>

#include "bufalloc/analysis.hpp"
#include "bufalloc/generators.hpp"
#include "bufalloc/graph.hpp"
#include "test_util.hpp"

using namespace bufalloc;
using namespace testutil;

namespace {

CommGraph single_arc() { return make_graph({{"P0", {"s m1"}}, {"P1", {"r m1"}}}); }

CommGraph fan(int n) {
  std::vector<std::string> sends, recvs;
  for (int k = 0; k < n; ++k) {
    sends.push_back("s f" + std::to_string(k));
    recvs.push_back("r f" + std::to_string(k));
  }
  return make_graph({{"P0", sends}, {"P1", recvs}});
}

bool decrements_all_fail(const CommGraph& g, const BufferAssignment& b) {
  for (size_t p = 0; p < b.per_pool.size(); ++p) {
    if (b.per_pool[p] == 0) continue;
    BufferAssignment dec = b;
    dec.per_pool[p]--;
    if (explore(g, dec, Target::Block).outcome != Outcome::BlockFound) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("nbap receive: single arc gives the receiver one buffer") {
  CommGraph g = single_arc();
  BufferAssignment b = nbap_receive(g);
  CHECK(b.per_pool == std::vector<int>{0, 1});
  CHECK(explore(g, b, Target::Block).outcome == Outcome::AllComplete);
  CHECK(decrements_all_fail(g, b));
}

TEST_CASE("nbap receive: 2-ring needs one per process") {
  CommGraph g = gen_tring(2);
  BufferAssignment b = nbap_receive(g);
  CHECK(b.per_pool == std::vector<int>{1, 1});
  CHECK(explore(g, b, Target::Block).outcome == Outcome::AllComplete);
  CHECK(decrements_all_fail(g, b));
}

TEST_CASE("nbap send: single arc gives the sender one buffer") {
  CommGraph g = single_arc();
  BufferAssignment b = nbap_send(g);
  CHECK(b.scheme == Scheme::SendSide);
  CHECK(b.per_pool == std::vector<int>{1, 0});
  CHECK(explore(g, b, Target::Block).outcome == Outcome::AllComplete);
}

TEST_CASE("nbap send: n parallel arcs need n sender buffers") {
  CommGraph g = fan(5);
  BufferAssignment b = nbap_send(g);
  CHECK(b.per_pool == std::vector<int>{5, 0});
  // while the receive side needs the same count on the receiver
  CHECK(nbap_receive(g).per_pool == std::vector<int>{0, 5});
}

TEST_CASE("nbap send: 2-ring matches the receive case by symmetry") {
  CHECK(nbap_send(gen_tring(2)).per_pool == std::vector<int>{1, 1});
}

TEST_CASE("nbap channel: single arc and 2-ring") {
  CommGraph g1 = single_arc();
  CHECK(nbap_channel(g1).per_pool == std::vector<int>{1});
  CommGraph g2 = gen_tring(2);
  CHECK(nbap_channel(g2).per_pool == std::vector<int>{1, 1});
}

TEST_CASE("nbap channel: interleaved messages on one channel overlap") {
  CommGraph g = make_graph({{"P0", {"s m1", "s m2"}}, {"P1", {"r m1", "r m2"}}});
  BufferAssignment b = nbap_channel(g);
  CHECK(b.per_pool == std::vector<int>{2});
  CHECK(explore(g, b, Target::Block).outcome == Outcome::AllComplete);
  CHECK(decrements_all_fail(g, b));
}

TEST_CASE("back-to-back demand intervals do not overlap") {
  // the second receive's anchor is the send between them, so the
  // intervals are (0,1] and (2,3]
  CommGraph g = make_graph({{"P0", {"r m1", "s m2", "r m3"}}, {"P1", {"s m1", "r m2", "s m3"}}});
  IntervalSet set;
  BufferAssignment b = nbap_receive(g, set);
  const auto& pool = set.pools[0];
  REQUIRE(pool.intervals.size() == 2);
  CHECK(pool.intervals[0].open == 0);
  CHECK(pool.intervals[0].close == 1);
  CHECK(pool.intervals[1].open == 2);
  CHECK(pool.intervals[1].close == 3);
  CHECK(pool.max_overlap == 1);
  CHECK(b.per_pool[0] == 1);
}

TEST_CASE("nbap optimality on random graphs, all three schemes") {
  int tested = 0;
  for (uint64_t seed = 500; seed < 540; ++seed) {
    CommGraph g = gen_random(RandomTraceParams{3, 3, seed});
    if (g.arcs().empty()) continue;
    tested++;
    for (int which = 0; which < 3; ++which) {
      BufferAssignment b = which == 0   ? nbap_receive(g)
                           : which == 1 ? nbap_send(g)
                                        : nbap_channel(g);
      CHECK(explore(g, b, Target::Block).outcome == Outcome::AllComplete);
      CHECK(decrements_all_fail(g, b));
    }
  }
  CHECK(tested >= 10);
}

TEST_CASE("bsp: t-ring sufficiency") {
  CommGraph g = gen_tring(2);
  BufferAssignment one{Scheme::ReceiveSide, {1, 0}};
  CHECK(bsp(g, one).outcome == Outcome::AllComplete);
  for (Scheme scheme : {Scheme::ReceiveSide, Scheme::SendSide, Scheme::Mixed, Scheme::Channel}) {
    Verdict v = bsp(g, zero_assignment(g, scheme));
    CHECK(v.outcome == Outcome::DeadlockFound);
    CHECK(!v.witness.empty());
  }
}

TEST_CASE("bsp channel equals exhaustive verdicts on random instances") {
  for (uint64_t seed = 600; seed < 700; ++seed) {
    CommGraph g = gen_random(RandomTraceParams{3, 3, seed});
    if (g.channel_count() == 0) continue;
    BufferAssignment b = zero_assignment(g, Scheme::Channel);
    for (size_t p = 0; p < b.per_pool.size(); ++p)
      b.per_pool[p] = static_cast<int>((seed + p) % 3);
    CHECK(bsp(g, b).outcome == explore(g, b, Target::Deadlock).outcome);
  }
}

TEST_CASE("bap_min: acyclic dependency needs nothing") {
  CommGraph g = make_graph({{"A", {"s a1", "r b1"}},
                            {"B", {"s a2", "r b2"}},
                            {"hub", {"r a1", "r a2", "s b1", "s b2"}}});
  REQUIRE(is_dep_acyclic(dependency_graph(g)));
  BapResult r = bap_min(g, Scheme::ReceiveSide);
  CHECK(r.total == 0);
}

TEST_CASE("bap_min: single t-ring needs exactly one token") {
  for (int t = 2; t <= 4; ++t) {
    BapResult r = bap_min(gen_tring(t), Scheme::ReceiveSide);
    CHECK(r.total == 1);
    CHECK(r.assignment.total() == 1);
    for (const auto& [pool, verdict] : r.certificate.decrement_failures)
      CHECK(verdict.outcome == Outcome::DeadlockFound);
  }
}

TEST_CASE("bap_min: the fan needs zero tokens though blocking needs n") {
  CommGraph g = fan(5);
  CHECK(bap_min(g, Scheme::SendSide).total == 0);
  CHECK(bap_min(g, Scheme::ReceiveSide).total == 0);
  CHECK(nbap_send(g).total() == 5);
}

TEST_CASE("bap_min is safe and one less is exhausted") {
  for (uint64_t seed = 700; seed < 715; ++seed) {
    CommGraph g = gen_random(RandomTraceParams{3, 3, seed});
    BapResult r = bap_min(g, Scheme::ReceiveSide);
    CHECK(bsp(g, r.assignment).outcome == Outcome::AllComplete);
    CHECK(nbap_receive(g).total() >= r.total);
    for (const auto& [pool, verdict] : r.certificate.decrement_failures) {
      CHECK(verdict.outcome == Outcome::DeadlockFound);
      // the witness replays and genuinely dead-ends
      BufferAssignment dec = r.assignment;
      dec.per_pool[pool]--;
      ColoringState s = replay_witness(g, dec, verdict.witness);
      CHECK(enabled_moves(s, g, dec).empty());
      CHECK_FALSE(s.all_green());
    }
  }
}

TEST_CASE("nbap_mixed_min: small fixtures") {
  CommGraph arc = single_arc();
  MixedMinResult r1 = nbap_mixed_min(arc);
  CHECK(r1.total == 1);
  MixedMinResult r2 = nbap_mixed_min(gen_tring(2));
  CHECK(r2.total == 2);
}

TEST_CASE("interval table marks receives only") {
  CommGraph g = make_graph({{"P0", {"s m1", "s m2"}}, {"P1", {"r m1", "r m2"}}});
  auto rows = interval_table(g, Scheme::ReceiveSide);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<int>{0, 0});
  CHECK(rows[1] == std::vector<int>{2, 1});
  // reversed coordinates: the later send's demand closes first
  auto send_rows = interval_table(g, Scheme::SendSide);
  CHECK(send_rows[0] == std::vector<int>{1, 2});
  CHECK(send_rows[1] == std::vector<int>{0, 0});
}
