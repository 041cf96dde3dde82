// scratch debugging tool, not part of the build by default
#include <iostream>

#include "bufalloc/analysis.hpp"
#include "bufalloc/coloring.hpp"
#include "bufalloc/generators.hpp"
#include "bufalloc/graph.hpp"
#include "bufalloc/reductions.hpp"
#include "bufalloc/trace.hpp"

using namespace bufalloc;

int main(int argc, char** argv) {
  std::string mode = argc > 1 ? argv[1] : "mixed";

  if (mode == "mixed") {
    Cnf3 f{1, {{{1, 1, 1}}}};
    ReductionFixture fx = sat_to_nbap_mixed(f);
    std::cout << dump_trace(to_trace(fx.graph));
    BufferAssignment b = zero_assignment(fx.graph, Scheme::Mixed);
    b.per_pool[fx.graph.process_index("x1")] = 1;
    b.per_pool[fx.graph.process_index("p")] = 2;
    Verdict v = explore(fx.graph, b, Target::Block);
    std::cout << "outcome " << outcome_name(v.outcome) << " states " << v.states_explored
              << "\n";
    if (v.outcome == Outcome::BlockFound) {
      std::cout << dump_witness(fx.graph, b, v.witness);
      ColoringState s = replay_witness(fx.graph, b, v.witness);
      for (int a = 0; a < static_cast<int>(fx.graph.arcs().size()); ++a) {
        const CommArc& arc = fx.graph.arc(a);
        if (s.colour[fx.graph.flat(arc.send)] == 1 && s.colour[fx.graph.flat(arc.recv)] == 0) {
          std::cout << "yellow send " << arc.msg << " from "
                    << fx.graph.process_name(arc.send.process) << ":" << arc.send.position
                    << " recv red at " << fx.graph.process_name(arc.recv.process) << ":"
                    << arc.recv.position << "\n";
        }
      }
      std::cout << "pool_free:";
      for (size_t p = 0; p < s.pool_free.size(); ++p)
        std::cout << " " << fx.graph.process_name(static_cast<int>(p)) << "=" << s.pool_free[p];
      std::cout << "\narc tokens:";
      for (int a = 0; a < static_cast<int>(fx.graph.arcs().size()); ++a)
        if (s.arc_token[a] >= 0)
          std::cout << " " << fx.graph.arc(a).msg << "->"
                    << fx.graph.process_name(s.arc_token[a]);
      std::cout << "\n";
    }
  }

  if (mode == "nbap") {
    for (uint64_t seed = 500; seed < 540; ++seed) {
      CommGraph g = gen_random(RandomTraceParams{3, 3, seed});
      if (g.arcs().empty()) continue;
      for (int which = 0; which < 3; ++which) {
        BufferAssignment b = which == 0   ? nbap_receive(g)
                             : which == 1 ? nbap_send(g)
                                          : nbap_channel(g);
        if (explore(g, b, Target::Block).outcome != Outcome::AllComplete) {
          std::cout << "seed " << seed << " which " << which << " NOT block free\n";
          continue;
        }
        for (size_t p = 0; p < b.per_pool.size(); ++p) {
          if (b.per_pool[p] == 0) continue;
          BufferAssignment dec = b;
          dec.per_pool[p]--;
          if (explore(g, dec, Target::Block).outcome != Outcome::BlockFound) {
            std::cout << "seed " << seed << " which " << which << " pool " << p
                      << " decrement still block-free\n";
            std::cout << dump_trace(to_trace(g));
          }
        }
      }
    }
  }
  return 0;
}
