#include "bufalloc/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bufalloc/analysis.hpp"
#include "bufalloc/coloring.hpp"
#include "bufalloc/errors.hpp"
#include "bufalloc/generators.hpp"
#include "bufalloc/graph.hpp"
#include "bufalloc/reductions.hpp"
#include "bufalloc/trace.hpp"

namespace bufalloc {

using nlohmann::json;

namespace {

std::string read_input(const std::string& path, std::istream& in) {
  if (path == "-") {
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  }
  std::ifstream f(path, std::ios::binary);
  if (!f) raise(Errc::ParseError, "cannot open \"" + path + "\"");
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

Scheme parse_scheme_or_throw(const std::string& text) {
  Scheme s;
  if (!parse_scheme(text, s))
    raise(Errc::ParseError, "unknown scheme \"" + text + "\" (receive|send|mixed|channel)");
  return s;
}

/// Pulls an assignment out of a combined reduce document when no
/// separate assignment file was given.
bool embedded_assignment(const std::string& raw, AssignmentDocument& out) {
  json j = json::parse(raw, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("assignment") ||
      !j["assignment"].is_object())
    return false;
  out = parse_assignment(j["assignment"].dump());
  return true;
}

json witness_json(const CommGraph& g, const BufferAssignment& b, const std::vector<Move>& moves) {
  json lines = json::array();
  std::istringstream is(dump_witness(g, b, moves));
  std::string line;
  while (std::getline(is, line)) lines.push_back(line);
  return lines;
}

void write_witness_file(const std::string& path, const CommGraph& g, const BufferAssignment& b,
                        const Verdict& v) {
  std::ofstream f(path, std::ios::binary);
  if (!f) raise(Errc::ParseError, "cannot write \"" + path + "\"");
  f << "# format 1\n";
  f << "# scheme " << scheme_name(b.scheme) << "\n";
  std::string assignment = dump_assignment(document_from_assignment(g, b));
  assignment.erase(std::remove(assignment.begin(), assignment.end(), '\n'), assignment.end());
  f << "# assignment " << assignment << "\n";
  f << "# outcome " << outcome_name(v.outcome) << "\n";
  f << dump_witness(g, b, v.witness);
}

struct WitnessFile {
  std::string scheme;
  std::string assignment_json;
  std::string outcome;
  std::string body;
};

WitnessFile parse_witness_file(const std::string& raw) {
  WitnessFile wf;
  std::istringstream is(raw);
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind("# scheme ", 0) == 0)
      wf.scheme = line.substr(9);
    else if (line.rfind("# assignment ", 0) == 0)
      wf.assignment_json = line.substr(13);
    else if (line.rfind("# outcome ", 0) == 0)
      wf.outcome = line.substr(10);
    else if (!line.empty() && line[0] != '#')
      wf.body += line + "\n";
  }
  return wf;
}

long long now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

int verdict_exit(const Verdict& v) {
  return v.outcome == Outcome::AllComplete ? 0 : 1;
}

json assignment_json_doc(const CommGraph& g, const BufferAssignment& b) {
  return json::parse(dump_assignment(document_from_assignment(g, b)));
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"communication graph buffer analysis"};
  app.require_subcommand(1);

  std::string trace_path, assign_path, formula_path, witness_path, witness_out;
  std::string scheme_text = "receive", target_text = "deadlock", kind_text;
  long long limit = 5'000'000;
  bool json_mode = false, want_table = false;
  int arg_n = 0;
  int rnd_processes = 3, rnd_events = 3;
  uint64_t rnd_seed = 0;

  auto* validate_cmd = app.add_subcommand("validate", "check a trace against the graph invariants");
  validate_cmd->add_option("trace", trace_path)->required();
  validate_cmd->add_flag("--json", json_mode);

  auto* nbap_cmd = app.add_subcommand("nbap", "minimum assignment with nonblocking sends");
  nbap_cmd->add_option("--scheme", scheme_text);
  nbap_cmd->add_flag("--table", want_table);
  nbap_cmd->add_flag("--json", json_mode);
  nbap_cmd->add_option("--limit", limit);
  nbap_cmd->add_option("trace", trace_path)->required();

  auto* bsp_cmd = app.add_subcommand("bsp", "is the given assignment sufficient?");
  bsp_cmd->add_option("--scheme", scheme_text);
  bsp_cmd->add_option("--limit", limit);
  bsp_cmd->add_flag("--json", json_mode);
  bsp_cmd->add_option("--witness-out", witness_out);
  bsp_cmd->add_option("trace", trace_path)->required();
  bsp_cmd->add_option("assignment", assign_path);

  auto* bap_cmd = app.add_subcommand("bap", "minimum safe total and assignment");
  bap_cmd->add_option("--scheme", scheme_text);
  bap_cmd->add_option("--limit", limit);
  bap_cmd->add_flag("--json", json_mode);
  bap_cmd->add_option("trace", trace_path)->required();

  auto* explore_cmd = app.add_subcommand("explore", "raw oracle access");
  explore_cmd->add_option("--scheme", scheme_text);
  explore_cmd->add_option("--target", target_text);
  explore_cmd->add_option("--limit", limit);
  explore_cmd->add_flag("--json", json_mode);
  explore_cmd->add_option("--witness-out", witness_out);
  explore_cmd->add_option("trace", trace_path)->required();
  explore_cmd->add_option("assignment", assign_path);

  auto* replay_cmd = app.add_subcommand("replay", "re-validate a witness");
  replay_cmd->add_option("--scheme", scheme_text)->default_val("");
  replay_cmd->add_option("--assignment", assign_path);
  replay_cmd->add_flag("--json", json_mode);
  replay_cmd->add_option("trace", trace_path)->required();
  replay_cmd->add_option("witness", witness_path)->required();

  auto* reduce_cmd = app.add_subcommand("reduce", "emit a hardness fixture for a formula");
  reduce_cmd->add_option("kind", kind_text)->required();
  reduce_cmd->add_option("formula", formula_path)->required();
  reduce_cmd->add_flag("--json", json_mode);

  auto* transform_cmd = app.add_subcommand("transform", "graph transforms");
  transform_cmd->add_option("kind", kind_text)->required();
  transform_cmd->add_option("trace", trace_path)->required();
  transform_cmd->add_option("assignment", assign_path);

  auto* gen_cmd = app.add_subcommand("gen", "fixture generators");
  auto* gen_tring_cmd = gen_cmd->add_subcommand("tring", "single t-ring");
  gen_tring_cmd->add_option("t", arg_n)->required();
  auto* gen_fox_cmd = gen_cmd->add_subcommand("fox", "pipe-and-roll mesh");
  gen_fox_cmd->add_option("p", arg_n)->required();
  auto* gen_random_cmd = gen_cmd->add_subcommand("random", "seeded random trace");
  gen_random_cmd->add_option("--processes", rnd_processes);
  gen_random_cmd->add_option("--events", rnd_events);
  gen_random_cmd->add_option("--seed", rnd_seed);
  gen_cmd->require_subcommand(1);

  auto* dot_cmd = app.add_subcommand("export-dot", "emit DOT text for rendering");
  dot_cmd->add_option("trace", trace_path)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*validate_cmd) {
      std::string raw = read_input(trace_path, in);
      TraceDocument doc;
      try {
        doc = parse_trace(raw);
      } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
      }
      try {
        CommGraph g = build_graph(doc);
        if (json_mode) {
          json report{{"format", 1}, {"command", "validate"}, {"valid", true},
                      {"processes", g.process_count()}, {"vertices", g.vertex_count()},
                      {"messages", g.arcs().size()}, {"channels", g.channel_count()}};
          out << report.dump(2) << "\n";
        } else {
          out << "valid: " << g.process_count() << " processes, " << g.arcs().size()
              << " messages, " << g.vertex_count() << " vertices\n";
        }
        return 0;
      } catch (const Error& e) {
        if (json_mode) {
          json report{{"format", 1}, {"command", "validate"}, {"valid", false},
                      {"error", errc_name(e.code())}, {"detail", e.what()}};
          out << report.dump(2) << "\n";
        } else {
          err << "invalid: " << e.what() << "\n";
        }
        return 1;
      }
    }

    if (*nbap_cmd) {
      Scheme scheme = parse_scheme_or_throw(scheme_text);
      CommGraph g = build_graph(parse_trace(read_input(trace_path, in)));
      BufferAssignment b;
      IntervalSet set;
      json extra;
      if (scheme == Scheme::ReceiveSide) b = nbap_receive(g, set);
      else if (scheme == Scheme::SendSide) b = nbap_send(g, set);
      else if (scheme == Scheme::Channel) b = nbap_channel(g, set);
      else {
        MixedMinResult r = nbap_mixed_min(g, limit);
        b = r.assignment;
      }
      json assignment = assignment_json_doc(g, b);
      if (json_mode) {
        json report{{"format", 1}, {"command", "nbap"}, {"scheme", scheme_name(scheme)},
                    {"assignment", assignment}, {"total", b.total()}};
        if (want_table && scheme != Scheme::Mixed) report["table"] = interval_table(g, scheme);
        if (scheme != Scheme::Mixed) {
          json pools = json::object();
          for (size_t p = 0; p < set.pools.size(); ++p) {
            json iv = json::array();
            for (size_t k = 0; k < set.pools[p].intervals.size(); ++k) {
              const Interval& i = set.pools[p].intervals[k];
              iv.push_back({{"open", i.open}, {"close", i.close},
                            {"overlap", set.pools[p].overlap_at_close[k]}});
            }
            pools[pool_name(g, scheme, static_cast<int>(p))] = iv;
          }
          report["intervals"] = pools;
        }
        out << report.dump(2) << "\n";
      } else {
        out << assignment.dump(2) << "\n";
        if (want_table && scheme != Scheme::Mixed) {
          auto rows = interval_table(g, scheme);
          for (int p = 0; p < g.process_count(); ++p) {
            out << g.process_name(p) << ":";
            for (int v : rows[p]) out << " " << v;
            out << "\n";
          }
        }
      }
      return 0;
    }

    if (*bsp_cmd || *explore_cmd) {
      Scheme scheme = parse_scheme_or_throw(scheme_text);
      std::string raw = read_input(trace_path, in);
      CommGraph g = build_graph(parse_trace(raw));
      BufferAssignment b;
      if (!assign_path.empty()) {
        b = assignment_from_document(g, parse_assignment(read_input(assign_path, in)));
      } else {
        AssignmentDocument doc;
        if (embedded_assignment(raw, doc))
          b = assignment_from_document(g, doc);
        else
          b = zero_assignment(g, scheme);
      }
      if (b.scheme != scheme)
        raise(Errc::AssignmentShapeMismatch, "assignment scheme differs from --scheme");

      long long t0 = now_ms();
      Verdict v;
      const char* command;
      if (*bsp_cmd) {
        command = "bsp";
        v = bsp(g, b, limit);
      } else {
        command = "explore";
        Target target;
        if (target_text == "deadlock") target = Target::Deadlock;
        else if (target_text == "block") target = Target::Block;
        else raise(Errc::ParseError, "unknown target \"" + target_text + "\" (deadlock|block)");
        v = explore(g, b, target, ExploreOptions{limit});
      }
      long long wall = now_ms() - t0;
      if (!witness_out.empty()) write_witness_file(witness_out, g, b, v);
      if (json_mode) {
        json report{{"format", 1}, {"command", command}, {"scheme", scheme_name(scheme)},
                    {"outcome", outcome_name(v.outcome)},
                    {"states_explored", v.states_explored}, {"wall_ms", wall}};
        if (*bsp_cmd)
          report["sufficient"] = v.outcome == Outcome::AllComplete;
        if (!v.witness.empty()) report["witness"] = witness_json(g, b, v.witness);
        out << report.dump(2) << "\n";
      } else {
        if (*bsp_cmd)
          out << (v.outcome == Outcome::AllComplete ? "sufficient" : "insufficient") << "\n";
        else
          out << outcome_name(v.outcome) << "\n";
        if (!v.witness.empty()) out << dump_witness(g, b, v.witness);
      }
      return verdict_exit(v);
    }

    if (*bap_cmd) {
      Scheme scheme = parse_scheme_or_throw(scheme_text);
      CommGraph g = build_graph(parse_trace(read_input(trace_path, in)));
      long long t0 = now_ms();
      BapResult r = bap_min(g, scheme, limit);
      long long wall = now_ms() - t0;
      if (json_mode) {
        json decs = json::array();
        for (const auto& [pool, verdict] : r.certificate.decrement_failures)
          decs.push_back({{"pool", pool_name(g, scheme, pool)},
                          {"outcome", outcome_name(verdict.outcome)},
                          {"witness", witness_json(g, r.assignment, verdict.witness)}});
        json report{{"format", 1}, {"command", "bap"}, {"scheme", scheme_name(scheme)},
                    {"k", r.total}, {"assignment", assignment_json_doc(g, r.assignment)},
                    {"certificate", {{"decrement_failures", decs}}}, {"wall_ms", wall}};
        out << report.dump(2) << "\n";
      } else {
        out << "k=" << r.total << "\n" << assignment_json_doc(g, r.assignment).dump(2) << "\n";
        for (const auto& [pool, verdict] : r.certificate.decrement_failures)
          out << "decrement " << pool_name(g, scheme, pool) << ": " << outcome_name(verdict.outcome)
              << "\n";
      }
      return 0;
    }

    if (*replay_cmd) {
      std::string trace_raw = read_input(trace_path, in);
      CommGraph g = build_graph(parse_trace(trace_raw));
      WitnessFile wf = parse_witness_file(read_input(witness_path, in));
      std::string scheme_choice = !scheme_text.empty() ? scheme_text
                                  : !wf.scheme.empty() ? wf.scheme
                                                       : "receive";
      Scheme scheme = parse_scheme_or_throw(scheme_choice);
      BufferAssignment b;
      if (!assign_path.empty())
        b = assignment_from_document(g, parse_assignment(read_input(assign_path, in)));
      else if (!wf.assignment_json.empty())
        b = assignment_from_document(g, parse_assignment(wf.assignment_json));
      else
        b = zero_assignment(g, scheme);
      if (b.scheme != scheme)
        raise(Errc::AssignmentShapeMismatch, "witness scheme differs from assignment");

      bool ok = true;
      std::string detail;
      try {
        std::vector<Move> moves = parse_witness(g, b, wf.body);
        ColoringState final_state = replay_witness(g, b, moves);
        if (wf.outcome == "DeadlockFound")
          ok = !final_state.all_green() && enabled_moves(final_state, g, b).empty();
        else if (wf.outcome == "BlockFound")
          ok = has_blocked_send(final_state, g, b);
        else if (wf.outcome == "AllComplete")
          ok = final_state.all_green();
        if (!ok) detail = "witness replays but does not exhibit " + wf.outcome;
      } catch (const Error& e) {
        ok = false;
        detail = e.what();
      }
      if (json_mode) {
        json report{{"format", 1}, {"command", "replay"}, {"valid", ok}};
        if (!detail.empty()) report["detail"] = detail;
        out << report.dump(2) << "\n";
      } else {
        out << (ok ? "witness valid" : "witness invalid: " + detail) << "\n";
      }
      return ok ? 0 : 1;
    }

    if (*reduce_cmd) {
      std::string raw = read_input(formula_path, in);
      ReductionFixture fx;
      if (kind_text == "sat-bap-r") fx = sat_to_bap_receive(parse_cnf(raw));
      else if (kind_text == "dnf-bsp-r") fx = dnf_to_bsp_receive(parse_dnf(raw));
      else if (kind_text == "sat-nbap-sr") fx = sat_to_nbap_mixed(parse_cnf(raw));
      else if (kind_text == "sat-bap-ch") fx = sat_to_bap_channel(parse_cnf(raw));
      else raise(Errc::ParseError, "unknown reduction \"" + kind_text +
                                       "\" (sat-bap-r|dnf-bsp-r|sat-nbap-sr|sat-bap-ch)");
      json combined{{"format", 1}, {"kind", kind_text}, {"k", fx.budget},
                    {"scheme", scheme_name(fx.scheme)},
                    {"trace", json::parse(dump_trace(to_trace(fx.graph)))}};
      if (fx.has_assignment)
        combined["assignment"] = assignment_json_doc(fx.graph, fx.assignment);
      out << combined.dump(2) << "\n";
      return 0;
    }

    if (*transform_cmd) {
      std::string raw = read_input(trace_path, in);
      CommGraph g = build_graph(parse_trace(raw));
      CommGraph result;
      if (kind_text == "expand-channel") {
        BufferAssignment b;
        if (!assign_path.empty()) {
          b = assignment_from_document(g, parse_assignment(read_input(assign_path, in)));
        } else {
          AssignmentDocument doc;
          if (!embedded_assignment(raw, doc))
            raise(Errc::ParseError, "expand-channel needs an assignment");
          b = assignment_from_document(g, doc);
        }
        result = expand_channel_tokens(g, b);
      } else if (kind_text == "recv-to-mixed") {
        result = receive_to_mixed(g);
      } else {
        raise(Errc::ParseError, "unknown transform \"" + kind_text +
                                    "\" (expand-channel|recv-to-mixed)");
      }
      out << dump_trace(to_trace(result));
      return 0;
    }

    if (*gen_cmd) {
      CommGraph g;
      if (*gen_tring_cmd) g = gen_tring(arg_n);
      else if (*gen_fox_cmd) g = gen_fox_mesh(arg_n);
      else g = gen_random(RandomTraceParams{rnd_processes, rnd_events, rnd_seed});
      out << dump_trace(to_trace(g));
      return 0;
    }

    if (*dot_cmd) {
      CommGraph g = build_graph(parse_trace(read_input(trace_path, in)));
      out << to_dot(g);
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == Errc::StateLimitExceeded ? 3 : 2;
  }
  err << "error: no subcommand\n";
  return 2;
}

}  // namespace bufalloc
