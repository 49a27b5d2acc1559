#include "vclemma/offline/bundle.hpp"

#include <fstream>
#include <set>
#include <stdexcept>
#include <utility>

#include "json.hpp"
#include "vclemma/core/manifest.hpp"
#include "vclemma/core/text.hpp"

namespace vclemma {

namespace {

constexpr const char* kSchema = "vclemma.bundle";
constexpr int kVersion = 1;

nlohmann::json lemma_to_json(const HelperLemma& lemma) {
  return nlohmann::json{{"name", lemma.name},
                        {"statement", lemma.statement},
                        {"proof", lemma.proof},
                        {"provenance", to_string(lemma.provenance)},
                        {"status", to_string(lemma.status)},
                        {"depends_on", lemma.depends_on}};
}

HelperLemma lemma_from_json(const nlohmann::json& j) {
  HelperLemma lemma;
  lemma.name = j.at("name").get<std::string>();
  lemma.statement = j.at("statement").get<std::string>();
  lemma.proof = j.at("proof").get<std::string>();
  auto prov = provenance_from_string(j.at("provenance").get<std::string>());
  auto status = status_from_string(j.at("status").get<std::string>());
  if (!prov || !status)
    throw std::runtime_error("bundle lemma has unknown provenance or status");
  lemma.provenance = *prov;
  lemma.status = *status;
  lemma.depends_on = j.at("depends_on").get<std::vector<std::string>>();
  return lemma;
}

}  // namespace

OfflineBundle assemble_bundle(std::optional<SemanticsAwareVC> phi_a,
                              std::vector<HelperLemma> lemmas,
                              ProofPlan plan) {
  OfflineBundle bundle;
  bundle.phi_a = std::move(phi_a);
  bundle.lemmas = std::move(lemmas);
  std::set<std::string> checked;
  for (const auto& lemma : bundle.lemmas)
    if (lemma.status == LemmaStatus::checked) checked.insert(lemma.name);
  for (auto& step : plan.steps)
    if (checked.count(step.lemma_name)) bundle.plan.steps.push_back(std::move(step));
  return bundle;
}

void save_bundle(const OfflineBundle& bundle,
                 const std::filesystem::path& path) {
  for (const auto& lemma : bundle.lemmas) {
    if (lemma.status != LemmaStatus::checked &&
        lemma.status != LemmaStatus::discarded)
      throw std::invalid_argument("bundle lemma '" + lemma.name +
                                  "' is neither checked nor discarded");
  }
  nlohmann::json j;
  j["schema"] = kSchema;
  j["version"] = kVersion;
  if (bundle.phi_a) {
    j["phi_a"] = {{"file_text", bundle.phi_a->file_text},
                  {"main_lemma_name", bundle.phi_a->main_lemma_name},
                  {"checked", bundle.phi_a->checked}};
  } else {
    j["phi_a"] = nullptr;
  }
  j["lemmas"] = nlohmann::json::array();
  for (const auto& lemma : bundle.lemmas) j["lemmas"].push_back(lemma_to_json(lemma));
  j["plan"] = nlohmann::json::array();
  for (const auto& step : bundle.plan.steps)
    j["plan"].push_back({{"lemma_name", step.lemma_name}, {"guidance", step.guidance}});
  j["psa_attempts"] = bundle.psa_attempts;
  j["degraded_no_psa"] = bundle.degraded_no_psa;
  j["offline_usage"] = {{"prompt_tokens", bundle.offline_usage.prompt_tokens},
                        {"completion_tokens", bundle.offline_usage.completion_tokens}};
  j["notes"] = bundle.notes;
  write_file(path, j.dump(2) + "\n");
}

OfflineBundle load_bundle(const std::filesystem::path& path) {
  nlohmann::json j = nlohmann::json::parse(read_file(path));
  if (j.value("schema", "") != kSchema)
    throw std::runtime_error("not a lemma bundle: " + path.string());
  if (j.value("version", 0) != kVersion)
    throw std::runtime_error("unsupported bundle version in " + path.string());
  OfflineBundle bundle;
  if (!j.at("phi_a").is_null()) {
    SemanticsAwareVC vc;
    vc.file_text = j["phi_a"].at("file_text").get<std::string>();
    vc.main_lemma_name = j["phi_a"].at("main_lemma_name").get<std::string>();
    vc.checked = j["phi_a"].at("checked").get<bool>();
    bundle.phi_a = std::move(vc);
  }
  for (const auto& item : j.at("lemmas")) bundle.lemmas.push_back(lemma_from_json(item));
  for (const auto& item : j.at("plan")) {
    ProofPlanStep step;
    step.lemma_name = item.at("lemma_name").get<std::string>();
    step.guidance = item.at("guidance").get<std::string>();
    bundle.plan.steps.push_back(std::move(step));
  }
  bundle.psa_attempts = j.at("psa_attempts").get<int>();
  bundle.degraded_no_psa = j.at("degraded_no_psa").get<bool>();
  bundle.offline_usage.prompt_tokens =
      j.at("offline_usage").at("prompt_tokens").get<std::int64_t>();
  bundle.offline_usage.completion_tokens =
      j.at("offline_usage").at("completion_tokens").get<std::int64_t>();
  bundle.notes = j.at("notes").get<std::vector<std::string>>();
  return bundle;
}

OfflineBundle run_offline_pipeline(const VerificationTask& task, LlmClient& llm,
                                   const BackendFactory& prover_factory,
                                   const OfflinePipelineOptions& options) {
  SliceResult slice = slice_program(task.annotated_source, task.property_location);
  ProofTargetedVC phi_c = parse_goal_file(task.goal_file);

  std::vector<std::string> notes;
  if (slice.whole_file_fallback)
    notes.push_back("slice: property location outside any function, kept whole file");

  std::optional<SemanticsAwareVC> phi_a;
  int psa_attempts = 0;
  if (options.no_psa) {
    notes.push_back("semantic analysis disabled by option");
  } else {
    PsaOutcome psa = run_psa(task, slice, llm, prover_factory,
                             options.psa_max_attempts, options.sentence_timeout);
    psa_attempts = psa.attempts;
    phi_a = psa.vc;
    for (auto& note : psa.notes) notes.push_back(std::move(note));
    if (!phi_a)
      notes.push_back("semantic analysis exhausted its attempts, continuing without it");
  }

  SynthesisResult synth = synthesize_helper_lemmas(phi_a, phi_c, llm);
  for (auto& warning : synth.warnings) notes.push_back(std::move(warning));
  if (!synth.raw_reply.empty())
    notes.push_back("unparsed synthesis reply:\n" + synth.raw_reply);

  PruneResult pruned = prune_failed_lemmas(synth.drafts, phi_c.preamble_text,
                                           prover_factory, options.sentence_timeout);
  for (auto& diag : pruned.diagnostics) notes.push_back(std::move(diag));

  OfflineBundle bundle =
      assemble_bundle(std::move(phi_a), std::move(pruned.lemmas), std::move(synth.plan));
  bundle.psa_attempts = psa_attempts;
  bundle.degraded_no_psa = !bundle.phi_a.has_value();
  bundle.offline_usage = llm.usage(LlmClient::Phase::offline);
  bundle.notes = std::move(notes);
  return bundle;
}

}  // namespace vclemma
