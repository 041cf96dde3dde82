#include "bufalloc/trace.hpp"

#include <json.hpp>

#include "bufalloc/errors.hpp"

namespace bufalloc {

using nlohmann::json;

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::UnmatchedMessage: return "UnmatchedMessage";
    case Errc::SelfMessage: return "SelfMessage";
    case Errc::CausalityCycle: return "CausalityCycle";
    case Errc::AssignmentShapeMismatch: return "AssignmentShapeMismatch";
    case Errc::IllegalMove: return "IllegalMove";
    case Errc::StateLimitExceeded: return "StateLimitExceeded";
    case Errc::DepthUndefined: return "DepthUndefined";
    case Errc::BadArity: return "BadArity";
    case Errc::ParseError: return "ParseError";
  }
  return "Error";
}

namespace {

json parse_json(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) raise(Errc::ParseError, std::string(what) + ": invalid JSON");
  return j;
}

void require_format(const json& j, const char* what) {
  if (!j.is_object()) raise(Errc::ParseError, std::string(what) + ": expected an object");
  if (!j.contains("format") || !j["format"].is_number_integer() || j["format"].get<int>() != 1)
    raise(Errc::ParseError, std::string(what) + ": missing or unsupported \"format\"");
}

}  // namespace

TraceDocument parse_trace(const std::string& json_text) {
  json j = parse_json(json_text, "trace");
  // Combined documents produced by `reduce` carry the trace under "trace".
  if (j.is_object() && j.contains("trace")) j = j["trace"];
  require_format(j, "trace");
  if (!j.contains("processes") || !j["processes"].is_array())
    raise(Errc::ParseError, "trace: missing \"processes\" array");
  TraceDocument doc;
  for (const auto& jp : j["processes"]) {
    if (!jp.is_object() || !jp.contains("name") || !jp["name"].is_string())
      raise(Errc::ParseError, "trace: process entries need a string \"name\"");
    TraceProcess p;
    p.name = jp["name"].get<std::string>();
    if (jp.contains("events")) {
      if (!jp["events"].is_array()) raise(Errc::ParseError, "trace: \"events\" must be an array");
      for (const auto& je : jp["events"]) {
        if (!je.is_object() || !je.contains("kind") || !je.contains("msg") ||
            !je["kind"].is_string() || !je["msg"].is_string())
          raise(Errc::ParseError, "trace: events need string \"kind\" and \"msg\"");
        TraceEvent e;
        std::string kind = je["kind"].get<std::string>();
        if (kind == "send")
          e.kind = EventKind::Send;
        else if (kind == "recv")
          e.kind = EventKind::Recv;
        else
          raise(Errc::ParseError, "trace: event kind must be \"send\" or \"recv\", got \"" + kind + "\"");
        e.msg = je["msg"].get<std::string>();
        p.events.push_back(std::move(e));
      }
    }
    doc.processes.push_back(std::move(p));
  }
  return doc;
}

std::string dump_trace(const TraceDocument& doc) {
  json j;
  j["format"] = 1;
  j["processes"] = json::array();
  for (const auto& p : doc.processes) {
    json jp;
    jp["name"] = p.name;
    jp["events"] = json::array();
    for (const auto& e : p.events) {
      jp["events"].push_back(
          {{"kind", e.kind == EventKind::Send ? "send" : "recv"}, {"msg", e.msg}});
    }
    j["processes"].push_back(std::move(jp));
  }
  return j.dump(2) + "\n";
}

AssignmentDocument parse_assignment(const std::string& json_text) {
  json j = parse_json(json_text, "assignment");
  if (j.is_object() && j.contains("assignment")) j = j["assignment"];
  require_format(j, "assignment");
  if (!j.contains("scheme") || !j["scheme"].is_string())
    raise(Errc::ParseError, "assignment: missing string \"scheme\"");
  AssignmentDocument doc;
  doc.scheme = j["scheme"].get<std::string>();
  if (doc.scheme != "receive" && doc.scheme != "send" && doc.scheme != "mixed" &&
      doc.scheme != "channel")
    raise(Errc::ParseError, "assignment: unknown scheme \"" + doc.scheme + "\"");
  if (doc.scheme == "channel") {
    if (!j.contains("per_channel") || !j["per_channel"].is_array())
      raise(Errc::ParseError, "assignment: channel scheme needs \"per_channel\"");
    for (const auto& jc : j["per_channel"]) {
      if (!jc.is_object() || !jc.contains("from") || !jc.contains("to") || !jc.contains("tokens"))
        raise(Errc::ParseError, "assignment: per_channel entries need from/to/tokens");
      ChannelTokens ct;
      ct.from = jc["from"].get<std::string>();
      ct.to = jc["to"].get<std::string>();
      ct.tokens = jc["tokens"].get<int>();
      if (ct.tokens < 0) raise(Errc::ParseError, "assignment: negative token count");
      doc.per_channel.push_back(std::move(ct));
    }
  } else {
    if (!j.contains("per_process") || !j["per_process"].is_object())
      raise(Errc::ParseError, "assignment: needs \"per_process\"");
    for (auto it = j["per_process"].begin(); it != j["per_process"].end(); ++it) {
      int v = it.value().get<int>();
      if (v < 0) raise(Errc::ParseError, "assignment: negative token count");
      doc.per_process[it.key()] = v;
    }
  }
  return doc;
}

std::string dump_assignment(const AssignmentDocument& doc) {
  json j;
  j["format"] = 1;
  j["scheme"] = doc.scheme;
  if (doc.scheme == "channel") {
    j["per_channel"] = json::array();
    for (const auto& ct : doc.per_channel)
      j["per_channel"].push_back({{"from", ct.from}, {"to", ct.to}, {"tokens", ct.tokens}});
  } else {
    j["per_process"] = json::object();
    for (const auto& [name, v] : doc.per_process) j["per_process"][name] = v;
  }
  return j.dump(2) + "\n";
}

int TraceBuilder::add_process(const std::string& name) {
  doc_.processes.push_back(TraceProcess{name, {}});
  return static_cast<int>(doc_.processes.size()) - 1;
}

void TraceBuilder::send(int process, const std::string& msg) {
  doc_.processes[process].events.push_back(TraceEvent{EventKind::Send, msg});
}

void TraceBuilder::recv(int process, const std::string& msg) {
  doc_.processes[process].events.push_back(TraceEvent{EventKind::Recv, msg});
}

}  // namespace bufalloc
