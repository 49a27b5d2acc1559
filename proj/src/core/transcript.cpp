#include "vclemma/core/transcript.hpp"

#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "vclemma/core/manifest.hpp"

namespace vclemma {

using nlohmann::json;

namespace {

TranscriptEventKind event_kind_from_string(const std::string& s) {
  for (auto k : {TranscriptEventKind::tactic_attempt, TranscriptEventKind::prover_reply,
                 TranscriptEventKind::tool_call, TranscriptEventKind::tool_reply,
                 TranscriptEventKind::lemma_added, TranscriptEventKind::budget_tick,
                 TranscriptEventKind::note}) {
    if (s == to_string(k)) return k;
  }
  throw std::runtime_error("unknown transcript event kind: " + s);
}

json event_to_json(const TranscriptEvent& e) {
  json j;
  j["kind"] = to_string(e.kind);
  j["step"] = e.step;
  j["text"] = e.text;
  if (!e.detail.empty()) j["detail"] = e.detail;
  if (e.kind == TranscriptEventKind::prover_reply) {
    j["accepted"] = e.accepted;
    j["goals_after"] = e.goals_after;
  }
  if (e.kind == TranscriptEventKind::budget_tick) j["elapsed_ms"] = e.elapsed_ms;
  return j;
}

TranscriptEvent event_from_json(const json& j) {
  TranscriptEvent e;
  e.kind = event_kind_from_string(j.at("kind").get<std::string>());
  e.step = j.at("step").get<int>();
  e.text = j.at("text").get<std::string>();
  e.detail = j.value("detail", "");
  e.accepted = j.value("accepted", false);
  if (j.contains("goals_after"))
    e.goals_after = j.at("goals_after").get<std::vector<std::string>>();
  e.elapsed_ms = j.value("elapsed_ms", std::int64_t{0});
  return e;
}

}  // namespace

std::string transcript_to_jsonl(const ProofTranscript& t) {
  std::ostringstream out;
  json header;
  header["schema"] = "vclemma.transcript";
  header["version"] = 1;
  header["task_id"] = t.task_id;
  out << header.dump() << "\n";
  for (const auto& e : t.events) out << event_to_json(e).dump() << "\n";
  json trailer;
  trailer["outcome"] = to_string(t.outcome);
  if (t.final_script) trailer["final_script"] = *t.final_script;
  out << trailer.dump() << "\n";
  return out.str();
}

ProofTranscript transcript_from_jsonl(const std::string& jsonl) {
  std::istringstream in(jsonl);
  std::string line;
  std::vector<json> lines;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    lines.push_back(json::parse(line));
  }
  if (lines.size() < 2)
    throw std::runtime_error("transcript truncated: missing header or trailer");

  const json& header = lines.front();
  if (header.value("schema", "") != "vclemma.transcript" ||
      header.value("version", 0) != 1)
    throw std::runtime_error("not a vclemma.transcript stream");

  const json& trailer = lines.back();
  if (!trailer.contains("outcome"))
    throw std::runtime_error("transcript truncated: no outcome trailer");

  ProofTranscript t;
  t.task_id = header.at("task_id").get<std::string>();
  for (std::size_t i = 1; i + 1 < lines.size(); ++i)
    t.events.push_back(event_from_json(lines[i]));
  auto outcome = outcome_from_string(trailer.at("outcome").get<std::string>());
  if (!outcome) throw std::runtime_error("bad transcript outcome value");
  t.outcome = *outcome;
  if (trailer.contains("final_script"))
    t.final_script = trailer.at("final_script").get<std::string>();
  return t;
}

void save_transcript(const ProofTranscript& t, const std::filesystem::path& path) {
  write_file(path, transcript_to_jsonl(t));
}

ProofTranscript load_transcript(const std::filesystem::path& path) {
  return transcript_from_jsonl(read_file(path));
}

}  // namespace vclemma
