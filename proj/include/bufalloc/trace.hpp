#pragma once

#include <map>
#include <string>
#include <vector>

namespace bufalloc {

enum class EventKind { Send, Recv };

struct TraceEvent {
  EventKind kind;
  std::string msg;
  bool operator==(const TraceEvent&) const = default;
};

struct TraceProcess {
  std::string name;
  std::vector<TraceEvent> events;
  bool operator==(const TraceProcess&) const = default;
};

/// Wire form of a program trace: one ordered event list per process,
/// with explicit message-id matching between sends and receives.
struct TraceDocument {
  std::vector<TraceProcess> processes;
  bool operator==(const TraceDocument&) const = default;
};

TraceDocument parse_trace(const std::string& json_text);
std::string dump_trace(const TraceDocument& doc);

/// Wire form of a buffer assignment. Exactly one of per_process /
/// per_channel is populated, depending on the scheme.
struct ChannelTokens {
  std::string from, to;
  int tokens = 0;
  bool operator==(const ChannelTokens&) const = default;
};

struct AssignmentDocument {
  std::string scheme;  // "receive" | "send" | "mixed" | "channel"
  std::map<std::string, int> per_process;
  std::vector<ChannelTokens> per_channel;
  bool operator==(const AssignmentDocument&) const = default;
};

AssignmentDocument parse_assignment(const std::string& json_text);
std::string dump_assignment(const AssignmentDocument& doc);

/// Incremental builder used by generators and reduction constructors.
class TraceBuilder {
public:
  int add_process(const std::string& name);
  void send(int process, const std::string& msg);
  void recv(int process, const std::string& msg);
  const TraceDocument& doc() const { return doc_; }
  TraceDocument take() { return std::move(doc_); }

private:
  TraceDocument doc_;
};

}  // namespace bufalloc
