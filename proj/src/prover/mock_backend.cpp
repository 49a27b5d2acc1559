#include "vclemma/prover/mock_backend.hpp"

#include <algorithm>
#include <cctype>
#include <thread>

#include "json.hpp"
#include "vclemma/core/manifest.hpp"
#include "vclemma/core/text.hpp"

namespace vclemma {

using nlohmann::json;

namespace {

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

// Depth over (), [] and {} at each position of a normalized goal string.
int bracket_delta(char c) {
  if (c == '(' || c == '[' || c == '{') return 1;
  if (c == ')' || c == ']' || c == '}') return -1;
  return 0;
}

// Position just past the first depth-0 occurrence of a word token, or npos.
std::size_t find_top_level_word(const std::string& s, const std::string& word,
                                std::size_t from = 0) {
  int depth = 0;
  for (std::size_t i = from; i + word.size() <= s.size(); ++i) {
    depth += bracket_delta(s[i]);
    if (depth != 0 || s.compare(i, word.size(), word) != 0) continue;
    bool left_ok = (i == 0) || !is_word_char(s[i - 1]);
    bool right_ok =
        (i + word.size() == s.size()) || !is_word_char(s[i + word.size()]);
    if (left_ok && right_ok) return i + word.size();
  }
  return std::string::npos;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// Splits the statement sentence of a goal opener into the stated goal body.
// "Lemma n : B."        -> B
// "Lemma n (x : T) : B." -> forall (x : T), B
std::string statement_body(const std::string& sentence) {
  std::string s = normalize_ws(strip_comments(sentence));
  if (!s.empty() && s.back() == '.') s.pop_back();
  // skip keyword and name
  std::size_t i = 0;
  auto skip_word = [&] {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    while (i < s.size() && is_word_char(s[i])) ++i;
  };
  skip_word();  // Lemma
  skip_word();  // name
  // find the separating depth-0 ':' (not ':=' or '::')
  int depth = 0;
  std::size_t colon = std::string::npos;
  for (std::size_t j = i; j < s.size(); ++j) {
    depth += bracket_delta(s[j]);
    if (depth == 0 && s[j] == ':') {
      char prev = (j > 0) ? s[j - 1] : '\0';
      char next = (j + 1 < s.size()) ? s[j + 1] : '\0';
      if (next == '=' || next == ':' || prev == ':') continue;
      colon = j;
      break;
    }
  }
  if (colon == std::string::npos) return trim(s.substr(i));
  std::string binders = trim(s.substr(i, colon - i));
  std::string body = trim(s.substr(colon + 1));
  if (binders.empty()) return body;
  return "forall " + binders + ", " + body;
}

// Applies the intros transformation: strip leading foralls, let-ins and
// top-level implication antecedents ("->" but never "<->").
std::string strip_intro_prefix(std::string goal) {
  for (;;) {
    goal = trim(goal);
    if (goal.rfind("forall", 0) == 0 &&
        (goal.size() == 6 || !is_word_char(goal[6]))) {
      // strip through the first depth-0 comma
      int depth = 0;
      std::size_t cut = std::string::npos;
      for (std::size_t i = 6; i < goal.size(); ++i) {
        depth += bracket_delta(goal[i]);
        if (depth == 0 && goal[i] == ',') {
          cut = i;
          break;
        }
      }
      if (cut == std::string::npos) break;
      goal = goal.substr(cut + 1);
      continue;
    }
    if (goal.rfind("let", 0) == 0 &&
        (goal.size() == 3 || !is_word_char(goal[3]))) {
      std::size_t past = find_top_level_word(goal, "in", 3);
      if (past == std::string::npos) break;
      goal = goal.substr(past);
      continue;
    }
    // first top-level "->" that is not the tail of "<->"
    int depth = 0;
    std::size_t arrow = std::string::npos;
    for (std::size_t i = 0; i + 1 < goal.size(); ++i) {
      depth += bracket_delta(goal[i]);
      if (depth == 0 && goal[i] == '-' && goal[i + 1] == '>' &&
          (i == 0 || goal[i - 1] != '<')) {
        arrow = i;
        break;
      }
    }
    if (arrow == std::string::npos) break;
    goal = goal.substr(arrow + 2);
  }
  return trim(goal);
}

// First depth-0 "/\" conjunction, or npos.
std::size_t find_top_level_conj(const std::string& goal) {
  int depth = 0;
  for (std::size_t i = 0; i + 1 < goal.size(); ++i) {
    depth += bracket_delta(goal[i]);
    if (depth == 0 && goal[i] == '/' && goal[i + 1] == '\\') return i;
  }
  return std::string::npos;
}

// First identifier token after the leading keyword, skipping symbol tokens
// such as "<-" or "!". Empty when the sentence has no identifier argument.
std::string first_ident_argument(const std::string& sentence) {
  auto tokens = tokenize(sentence);
  bool keyword_seen = false;
  for (const auto& t : tokens) {
    if (t.kind == TokenKind::ident || t.kind == TokenKind::binder) {
      if (!keyword_seen) {
        keyword_seen = true;
        continue;
      }
      if (t.text == "in") continue;
      return t.text;
    }
  }
  return "";
}

const std::set<std::string>& automation_tactics() {
  static const std::set<std::string> kSet = {
      "auto",       "eauto",      "trivial",     "easy",     "lia",
      "nia",        "ring",       "field",       "tauto",    "intuition",
      "firstorder", "assumption", "reflexivity", "congruence"};
  return kSet;
}

const std::set<std::string>& noop_tactics() {
  static const std::set<std::string> kSet = {"unfold", "simpl", "cbn", "cbv",
                                             "fold",   "subst", "clear"};
  return kSet;
}

const std::set<std::string>& vernacular_noops() {
  static const std::set<std::string> kSet = {
      "Require", "From",     "Import",    "Export",  "Open",    "Close",
      "Set",     "Unset",    "Notation",  "Infix",   "Reserved", "Arguments",
      "Hint",    "Create",   "Local",     "Global",  "Section", "End",
      "Check",   "Print",    "Eval",      "Search",  "Declare", "Ltac",
      "Opaque",  "Transparent"};
  return kSet;
}

const std::set<std::string>& declaration_keywords() {
  static const std::set<std::string> kSet = {
      "Definition", "Fixpoint", "CoFixpoint", "Function", "Inductive",
      "CoInductive", "Record",  "Structure",  "Variant",  "Class",
      "Instance",   "Let"};
  return kSet;
}

}  // namespace

MockScript MockScript::parse(const std::string& json_text) {
  json j = json::parse(json_text);
  if (j.value("schema", "") != "vclemma.mockscript" || j.value("version", 0) != 1)
    throw std::runtime_error("not a vclemma.mockscript document");
  MockScript s;
  s.sentence_delay_ms = j.value("sentence_delay_ms", 0);
  for (const auto& r : j.value("rules", json::array())) {
    MockRule rule;
    rule.sentence = r.at("sentence").get<std::string>();
    if (r.contains("goal")) rule.goal = r.at("goal").get<std::string>();
    rule.action = r.at("action").get<std::string>();
    if (rule.action != "reject" && rule.action != "close_goal" &&
        rule.action != "replace_goals" && rule.action != "accept")
      throw std::runtime_error("unknown mock rule action: " + rule.action);
    rule.message = r.value("message", "");
    if (r.contains("goals"))
      rule.goals = r.at("goals").get<std::vector<std::string>>();
    rule.delay_ms = r.value("delay_ms", 0);
    s.rules.push_back(std::move(rule));
  }
  return s;
}

MockScript MockScript::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

MockBackend::MockBackend(MockScript script, bool allow_native_rollback)
    : script_(std::move(script)), allow_native_rollback_(allow_native_rollback) {
  // Pervasive names every development can reference.
  state_.known = {"I",    "eq_refl", "conj", "or_introl", "or_intror",
                  "fst",  "snd",     "Z",    "nat",       "True",
                  "False"};
  snapshots_[0] = state_;
}

ExecResult MockBackend::accept(std::string message) {
  settle_pending_asserts();
  ++state_id_;
  snapshots_[state_id_] = state_;
  return ExecResult{true, std::move(message), state_.goals, state_id_};
}

ExecResult MockBackend::reject(std::string message) {
  return ExecResult{false, std::move(message), state_.goals, state_id_};
}

void MockBackend::settle_pending_asserts() {
  while (!state_.pending_asserts.empty() &&
         state_.goals.size() <= state_.pending_asserts.back().resume_goal_count) {
    state_.known.insert(state_.pending_asserts.back().name);
    state_.pending_asserts.pop_back();
  }
}

ExecResult MockBackend::apply_rule(const MockRule& rule) {
  if (rule.action == "reject") return reject(rule.message);
  if (rule.action == "accept") return accept(rule.message);
  if (rule.action == "close_goal") {
    if (state_.goals.empty()) return reject("No such goal.");
    state_.goals.erase(state_.goals.begin());
    return accept(rule.message);
  }
  // replace_goals: splice payload in place of the first goal
  if (state_.goals.empty()) return reject("No such goal.");
  state_.goals.erase(state_.goals.begin());
  state_.goals.insert(state_.goals.begin(), rule.goals.begin(), rule.goals.end());
  return accept(rule.message);
}

std::optional<ExecResult> MockBackend::try_structural(const std::string& sentence) {
  const std::string tok = first_token(sentence);
  if (tok.empty()) return reject("Syntax error: empty command.");

  if (vernacular_noops().count(tok)) return accept();

  if (declaration_keywords().count(tok)) {
    std::string name = declared_name(sentence);
    if (!name.empty()) state_.known.insert(name);
    return accept();
  }

  if (is_assumption_decl(sentence)) {
    std::string name = declared_name(sentence);
    if (!name.empty()) state_.known.insert(name);
    return accept();
  }

  if (is_goal_opener(sentence)) {
    if (state_.proof_open)
      return reject("Nested proofs are not supported here.");
    state_.proof_open = true;
    state_.proof_name = declared_name(sentence);
    state_.goals = {statement_body(sentence)};
    state_.pending_asserts.clear();
    return accept();
  }

  if (tok == "Proof") {
    if (!state_.proof_open) return reject("Error: No focused proof.");
    return accept();
  }

  if (tok == "Qed" || tok == "Defined") {
    if (!state_.proof_open) return reject("Error: No focused proof.");
    if (!state_.goals.empty())
      return reject("Error: Attempt to save an incomplete proof.");
    if (!state_.proof_name.empty()) state_.known.insert(state_.proof_name);
    state_.proof_open = false;
    state_.proof_name.clear();
    return accept();
  }

  if (tok == "Admitted") {
    if (!state_.proof_open) return reject("Error: No focused proof.");
    if (!state_.proof_name.empty()) state_.known.insert(state_.proof_name);
    state_.proof_open = false;
    state_.proof_name.clear();
    state_.goals.clear();
    return accept();
  }

  if (tok == "Abort") {
    if (!state_.proof_open) return reject("Error: No focused proof.");
    state_.proof_open = false;
    state_.proof_name.clear();
    state_.goals.clear();
    return accept();
  }

  return std::nullopt;
}

std::optional<ExecResult> MockBackend::try_tactic(const std::string& sentence) {
  const std::string tok = first_token(sentence);
  if (!state_.proof_open) return std::nullopt;

  if (tok == "intro" || tok == "intros") {
    if (state_.goals.empty()) return reject("No such goal.");
    auto tokens = tokenize(sentence);
    for (std::size_t i = 1; i < tokens.size(); ++i)
      if (tokens[i].kind == TokenKind::ident) state_.known.insert(tokens[i].text);
    state_.goals[0] = strip_intro_prefix(state_.goals[0]);
    return accept();
  }

  if (tok == "split") {
    if (state_.goals.empty()) return reject("No such goal.");
    std::size_t at = find_top_level_conj(state_.goals[0]);
    if (at == std::string::npos)
      return reject("Error: In tactic split: no applicable constructor.");
    std::string left = trim(state_.goals[0].substr(0, at));
    std::string right = trim(state_.goals[0].substr(at + 2));
    state_.goals[0] = left;
    state_.goals.insert(state_.goals.begin() + 1, right);
    return accept();
  }

  if (automation_tactics().count(tok)) {
    if (state_.goals.empty()) return reject("No such goal.");
    state_.goals.erase(state_.goals.begin());
    return accept();
  }

  if (noop_tactics().count(tok)) {
    if (state_.goals.empty()) return reject("No such goal.");
    return accept();
  }

  if (tok == "apply" || tok == "eapply" || tok == "exact" || tok == "refine") {
    if (state_.goals.empty()) return reject("No such goal.");
    std::string name = first_ident_argument(sentence);
    if (name.empty())
      return reject("Syntax error: a term is expected after " + tok + ".");
    if (!state_.known.count(name))
      return reject("The reference " + name +
                    " was not found in the current environment.");
    state_.goals.erase(state_.goals.begin());
    return accept();
  }

  if (tok == "rewrite" || tok == "erewrite") {
    if (state_.goals.empty()) return reject("No such goal.");
    std::string name = first_ident_argument(sentence);
    if (name.empty())
      return reject("Syntax error: a term is expected after " + tok + ".");
    if (!state_.known.count(name))
      return reject("The reference " + name +
                    " was not found in the current environment.");
    return accept();
  }

  if (tok == "destruct") {
    if (state_.goals.empty()) return reject("No such goal.");
    std::string name = first_ident_argument(sentence);
    if (name.empty() || !state_.known.count(name))
      return reject("The reference " + name +
                    " was not found in the current environment.");
    auto tokens = tokenize(sentence);
    bool after_as = false;
    for (const auto& t : tokens) {
      if (t.kind == TokenKind::ident && t.text == "as") {
        after_as = true;
        continue;
      }
      if (after_as && t.kind == TokenKind::ident) state_.known.insert(t.text);
    }
    return accept();
  }

  if (tok == "assert") {
    if (state_.goals.empty()) return reject("No such goal.");
    std::string s = normalize_ws(strip_comments(sentence));
    std::size_t open = s.find('(');
    if (open == std::string::npos)
      return reject("Syntax error in assert.");
    int depth = 0;
    std::size_t close = std::string::npos;
    for (std::size_t i = open; i < s.size(); ++i) {
      depth += bracket_delta(s[i]);
      if (depth == 0) {
        close = i;
        break;
      }
    }
    if (close == std::string::npos) return reject("Syntax error in assert.");
    std::string inner = s.substr(open + 1, close - open - 1);
    std::size_t colon = std::string::npos;
    int d2 = 0;
    for (std::size_t i = 0; i < inner.size(); ++i) {
      d2 += bracket_delta(inner[i]);
      if (d2 == 0 && inner[i] == ':' &&
          (i + 1 >= inner.size() || (inner[i + 1] != '=' && inner[i + 1] != ':'))) {
        colon = i;
        break;
      }
    }
    if (colon == std::string::npos)
      return reject("Syntax error in assert: missing statement.");
    std::string name = trim(inner.substr(0, colon));
    std::string stmt = trim(inner.substr(colon + 1));
    if (name.empty() || stmt.empty())
      return reject("Syntax error in assert: missing statement.");
    std::string rest = trim(s.substr(close + 1));
    bool immediate = rest.rfind("by", 0) == 0 &&
                     (rest.size() == 2 || !is_word_char(rest[2]));
    if (immediate) {
      state_.known.insert(name);
      return accept();
    }
    state_.pending_asserts.push_back({name, state_.goals.size()});
    state_.goals.insert(state_.goals.begin(), stmt);
    return accept();
  }

  return std::nullopt;
}

ExecResult MockBackend::execute(const std::string& sentence,
                                std::chrono::milliseconds timeout) {
  ++executed_count_;
  const std::string norm = normalize_ws(strip_comments(sentence));
  const std::string first_goal =
      state_.goals.empty() ? "" : normalize_ws(state_.goals.front());

  const MockRule* matched = nullptr;
  for (const auto& rule : script_.rules) {
    if (normalize_ws(rule.sentence) != norm) continue;
    if (rule.goal && normalize_ws(*rule.goal) != first_goal) continue;
    matched = &rule;
    break;
  }

  int delay = matched && matched->delay_ms > 0 ? matched->delay_ms
                                               : script_.sentence_delay_ms;
  if (delay > 0) {
    if (timeout.count() > 0 && delay >= timeout.count()) {
      std::this_thread::sleep_for(timeout);
      return reject("Timeout!");
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(delay));
  }

  if (matched && matched->action == "reject") return apply_rule(*matched);

  if (auto structural = try_structural(sentence)) return *structural;

  if (matched) return apply_rule(*matched);

  if (auto tactic = try_tactic(sentence)) return *tactic;

  if (!state_.proof_open)
    return reject("Syntax error: illegal begin of vernac.");
  return reject("The tactic " + first_token(sentence) +
                " was not recognized.");
}

bool MockBackend::rollback_to(std::uint64_t state_id) {
  if (!allow_native_rollback_) return false;
  auto it = snapshots_.find(state_id);
  if (it == snapshots_.end()) return false;
  state_ = it->second;
  state_id_ = state_id;
  snapshots_.erase(snapshots_.upper_bound(state_id), snapshots_.end());
  return true;
}

}  // namespace vclemma
