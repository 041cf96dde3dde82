#include <doctest.h>

#include <algorithm>

#include "bufalloc/errors.hpp"
#include "bufalloc/generators.hpp"
#include "bufalloc/graph.hpp"
#include "test_util.hpp"

using namespace bufalloc;
using namespace testutil;

TEST_CASE("smallest nonempty system builds") {
  CommGraph g = make_graph({{"P0", {"s m1"}}, {"P1", {"r m1"}}});
  CHECK(g.process_count() == 2);
  CHECK(g.vertex_count() == 6);
  CHECK(g.arcs().size() == 1);
  CHECK(g.kind(VertexId{0, 1}) == VertexKind::Send);
  CHECK(g.kind(VertexId{1, 1}) == VertexKind::Recv);
  CHECK(g.kind(VertexId{0, 0}) == VertexKind::Start);
  CHECK(g.kind(VertexId{1, 2}) == VertexKind::End);
}

TEST_CASE("2-ring trace builds the ring graph") {
  CommGraph g = make_graph({{"P0", {"s m1", "r m2"}}, {"P1", {"s m2", "r m1"}}});
  CHECK(g.vertex_count() == 8);
  CHECK(g.arcs().size() == 2);
  CHECK(g.channel_count() == 2);
  auto rings = find_rings(g, 4);
  REQUIRE(rings.size() == 1);
  CHECK(rings[0].members.size() == 2);
}

TEST_CASE("validation errors") {
  CHECK_THROWS_AS(make_graph({{"P0", {"s m1"}}, {"P1", {}}}), Error);
  CHECK_THROWS_AS(make_graph({{"P0", {"s m1", "r m1"}}}), Error);
  try {
    make_graph({{"P0", {"s m1", "r m1"}}});
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SelfMessage);
  }
  try {
    make_graph({{"P0", {"s m1", "s m1"}}, {"P1", {"r m1"}}});
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnmatchedMessage);
  }
}

TEST_CASE("cyclic causality is rejected") {
  // each receive precedes the send that would causally justify it
  TraceDocument doc =
      make_trace({{"P0", {"r m1", "s m2"}}, {"P1", {"r m2", "s m1"}}});
  // topological-sort oracle: count of orderable events must fall short
  // (both first events wait on the other's second)
  CHECK_THROWS_AS(build_graph(doc), Error);
  try {
    build_graph(doc);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::CausalityCycle);
  }
}

TEST_CASE("trace round-trips through the graph bit-exactly") {
  TraceDocument doc = make_trace({{"P0", {"s m1", "r m2"}}, {"P1", {"s m2", "r m1"}}});
  CommGraph g = build_graph(doc);
  CHECK(to_trace(g) == doc);
  CHECK(parse_trace(dump_trace(doc)) == doc);
  CHECK(dump_trace(parse_trace(dump_trace(doc))) == dump_trace(doc));
}

TEST_CASE("reach vectors: single arc and ends") {
  CommGraph g = make_graph({{"P0", {"s m1"}}, {"P1", {"r m1"}}});
  auto a = reach_vectors(g);
  const int n = g.process_count();
  // start of P0 reaches P1 at the receive position
  CHECK(a[g.flat(VertexId{0, 0}) * n + 1] == 1);
  // end vertices reach no other process
  CHECK(a[g.flat(VertexId{0, 2}) * n + 1] == reach_sentinel(g));
  CHECK(a[g.flat(VertexId{1, 2}) * n + 0] == reach_sentinel(g));
}

TEST_CASE("reach vectors: 2-ring send reaches only the far receive") {
  CommGraph g = make_graph({{"P0", {"s m1", "r m2"}}, {"P1", {"s m2", "r m1"}}});
  auto a = reach_vectors(g);
  const int n = g.process_count();
  CHECK(a[g.flat(VertexId{0, 1}) * n + 1] == 2);
}

TEST_CASE("reach vectors agree with brute force on random small graphs") {
  for (uint64_t seed = 0; seed < 60; ++seed) {
    CommGraph g = gen_random(RandomTraceParams{3, 3, seed});
    if (g.vertex_count() > 12) continue;
    auto a = reach_vectors(g);
    auto brute = brute_reachable(g);
    const int n = g.process_count();
    for (int u = 0; u < g.vertex_count(); ++u) {
      std::vector<int32_t> expect(n, reach_sentinel(g));
      for (int w : brute[u]) {
        VertexId wv = g.unflat(w);
        expect[wv.process] = std::min(expect[wv.process], static_cast<int32_t>(wv.position));
      }
      for (int j = 0; j < n; ++j) CHECK(a[u * n + j] == expect[j]);
    }
  }
}

TEST_CASE("terminal dependency: single arc anchors at the start") {
  CommGraph g = make_graph({{"P0", {"s m1"}}, {"P1", {"r m1"}}});
  auto dep = terminal_dependencies(g, reach_vectors(g));
  CHECK(dep[g.flat(VertexId{1, 1})] == 0);
}

TEST_CASE("terminal dependency: chain through the peer process") {
  // P0 sends m1 then receives m2; the receive depends on the send
  CommGraph g = make_graph({{"P0", {"s m1", "r m2"}}, {"P1", {"r m1", "s m2"}}});
  auto dep = terminal_dependencies(g, reach_vectors(g));
  CHECK(dep[g.flat(VertexId{0, 2})] == 1);
}

TEST_CASE("terminal dependency is the latest anchor, verified by brute force") {
  for (uint64_t seed = 100; seed < 160; ++seed) {
    CommGraph g = gen_random(RandomTraceParams{4, 4, seed});
    auto reach = reach_vectors(g);
    auto dep = terminal_dependencies(g, reach);
    auto brute = brute_reachable(g);
    for (const auto& arc : g.arcs()) {
      int send_flat = g.flat(arc.send);
      int t = arc.recv.position;
      int expected = 0;
      for (int c = t - 1; c >= 1; --c) {
        if (brute[g.flat(VertexId{arc.recv.process, c})].count(send_flat)) {
          expected = c;
          break;
        }
      }
      CHECK(dep[g.flat(arc.recv)] == expected);
    }
  }
}

TEST_CASE("dependency graph: single arc is acyclic with documented depths") {
  CommGraph g = make_graph({{"P0", {"s m1"}}, {"P1", {"r m1"}}});
  DepGraph h = dependency_graph(g);
  CHECK(is_dep_acyclic(h));
  auto d = depths(h);
  CHECK(d[g.flat(VertexId{0, 0})] == 0);
  CHECK(d[g.flat(VertexId{1, 0})] == 0);
  // receive -> send -> start of the sender
  CHECK(d[g.flat(VertexId{1, 1})] == 2);
}

TEST_CASE("dependency graph: 2-ring is cyclic") {
  CommGraph g = make_graph({{"P0", {"s m1", "r m2"}}, {"P1", {"s m2", "r m1"}}});
  DepGraph h = dependency_graph(g);
  CHECK_FALSE(is_dep_acyclic(h));
  CHECK_THROWS_AS(depths(h), Error);
}

TEST_CASE("dependency graph: barrier-style fan-in fan-out is acyclic") {
  CommGraph g = make_graph({{"A", {"s a1", "r b1"}},
                            {"B", {"s a2", "r b2"}},
                            {"hub", {"r a1", "r a2", "s b1", "s b2"}}});
  CHECK(is_dep_acyclic(dependency_graph(g)));
}

TEST_CASE("find_rings on generated rings") {
  for (int t = 2; t <= 5; ++t) {
    CommGraph g = gen_tring(t);
    auto rings = find_rings(g, t);
    REQUIRE(rings.size() == 1);
    CHECK(static_cast<int>(rings[0].members.size()) == t);
    for (const auto& m : rings[0].members) CHECK(m.send_pos < m.recv_pos);
  }
}

TEST_CASE("find_rings sees two disjoint 2-rings") {
  CommGraph g = make_graph({{"P0", {"s m1", "r m2"}},
                            {"P1", {"s m2", "r m1"}},
                            {"P2", {"s m3", "r m4"}},
                            {"P3", {"s m4", "r m3"}}});
  auto rings = find_rings(g, 4);
  CHECK(rings.size() == 2);
}

TEST_CASE("find_rings: exhaustive cycle check on random graphs") {
  // a graph without rings completes with zero tokens; one with a ring
  // must not (checked in the coloring tests); here just check send<recv
  for (uint64_t seed = 0; seed < 40; ++seed) {
    CommGraph g = gen_random(RandomTraceParams{4, 4, seed});
    for (const auto& ring : find_rings(g, 4)) {
      CHECK(ring.members.size() >= 2);
      std::set<int> procs;
      for (const auto& m : ring.members) {
        CHECK(m.send_pos < m.recv_pos);
        CHECK(procs.insert(m.process).second);
      }
    }
  }
}

TEST_CASE("dot export names every process") {
  CommGraph g = gen_tring(2);
  std::string dot = to_dot(g);
  CHECK(dot.find("P0") != std::string::npos);
  CHECK(dot.find("P1") != std::string::npos);
  CHECK(dot.find("digraph") != std::string::npos);
}
