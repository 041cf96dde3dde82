#include "bufalloc/generators.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "bufalloc/errors.hpp"

namespace bufalloc {

CommGraph gen_tring(int t) {
  if (t < 2) raise(Errc::BadArity, "a ring needs at least two processes, got " + std::to_string(t));
  TraceBuilder tb;
  for (int k = 0; k < t; ++k) tb.add_process("P" + std::to_string(k));
  // component k sends m{k} and receives m{(k+1) % t}: every member's send
  // precedes its receive and the arcs close a cycle
  for (int k = 0; k < t; ++k) {
    tb.send(k, "m" + std::to_string(k));
    tb.recv(k, "m" + std::to_string((k + 1) % t));
  }
  return build_graph(tb.doc());
}

CommGraph gen_fox_mesh(int p) {
  if (p < 2) raise(Errc::BadArity, "mesh side must be at least 2, got " + std::to_string(p));
  TraceBuilder tb;
  int ctl = tb.add_process("ctl");
  auto widx = [&](int r, int c) { return 1 + r * p + c; };
  for (int r = 0; r < p; ++r)
    for (int c = 0; c < p; ++c) tb.add_process("w" + std::to_string(widx(r, c)));

  // scatter: one block per worker
  for (int w = 1; w <= p * p; ++w) tb.send(ctl, "blk" + std::to_string(w));

  // workers: p rounds of row broadcast (round k's broadcaster in row r is
  // column (r+k) mod p) and column roll (send B up, receive from below)
  for (int r = 0; r < p; ++r) {
    for (int c = 0; c < p; ++c) {
      int self = widx(r, c);
      tb.recv(self, "blk" + std::to_string(self));
      for (int k = 0; k < p; ++k) {
        int bcaster = (r + k) % p;
        std::string tag = std::to_string(k) + "_" + std::to_string(r);
        if (c == bcaster) {
          for (int cc = 0; cc < p; ++cc)
            if (cc != c) tb.send(self, "bc" + tag + "_" + std::to_string(cc));
        } else {
          tb.recv(self, "bc" + tag + "_" + std::to_string(c));
        }
        std::string own = "roll" + std::to_string(k) + "_" + std::to_string(r) + "_" +
                          std::to_string(c);
        std::string from_below = "roll" + std::to_string(k) + "_" +
                                 std::to_string((r + 1) % p) + "_" + std::to_string(c);
        tb.send(self, own);        // to ((r-1+p) % p, c)
        tb.recv(self, from_below);
      }
      tb.send(self, "C" + std::to_string(self));
    }
  }

  // gather, then shut the first worker down
  for (int w = 1; w <= p * p; ++w) tb.recv(ctl, "C" + std::to_string(w));
  tb.send(ctl, "done");
  tb.recv(widx(0, 0), "done");
  return build_graph(tb.doc());
}

namespace {

uint64_t bounded(std::mt19937_64& rng, uint64_t n) { return n == 0 ? 0 : rng() % n; }

}  // namespace

CommGraph gen_random(const RandomTraceParams& params) {
  std::mt19937_64 rng(params.seed);
  const int n = params.processes;
  std::vector<int> remaining(n);
  for (int i = 0; i < n; ++i)
    remaining[i] = static_cast<int>(bounded(rng, params.events_per_process + 1));

  // random linear extension of the chains
  struct Slot { int process; };
  std::vector<Slot> extension;
  std::vector<int> live;
  for (int i = 0; i < n; ++i)
    if (remaining[i] > 0) live.push_back(i);
  while (!live.empty()) {
    size_t pick = bounded(rng, live.size());
    int proc = live[pick];
    extension.push_back(Slot{proc});
    if (--remaining[proc] == 0) live.erase(live.begin() + pick);
  }

  // match slots respecting the extension: a later slot may receive from
  // any earlier still-unmatched slot of another process
  struct Matched { int send_slot; int recv_slot; };
  std::vector<Matched> messages;
  std::vector<int> matched(extension.size(), -1);  // message id or -1
  std::vector<int> pending;
  for (size_t s = 0; s < extension.size(); ++s) {
    bool try_match = !pending.empty() && (rng() & 1);
    if (try_match) {
      std::vector<int> candidates;
      for (int ps : pending)
        if (extension[ps].process != extension[s].process) candidates.push_back(ps);
      if (!candidates.empty()) {
        int sender = candidates[bounded(rng, candidates.size())];
        int id = static_cast<int>(messages.size());
        messages.push_back(Matched{sender, static_cast<int>(s)});
        matched[sender] = id;
        matched[s] = id;
        pending.erase(std::find(pending.begin(), pending.end(), sender));
        continue;
      }
    }
    pending.push_back(static_cast<int>(s));
  }

  TraceBuilder tb;
  for (int i = 0; i < n; ++i) tb.add_process("P" + std::to_string(i));
  for (size_t s = 0; s < extension.size(); ++s) {
    if (matched[s] < 0) continue;  // unmatched slots are dropped
    const Matched& m = messages[matched[s]];
    std::string msg = "m" + std::to_string(matched[s]);
    if (m.send_slot == static_cast<int>(s))
      tb.send(extension[s].process, msg);
    else
      tb.recv(extension[s].process, msg);
  }
  return build_graph(tb.doc());
}

}  // namespace bufalloc
