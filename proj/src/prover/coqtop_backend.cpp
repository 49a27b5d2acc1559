#include "vclemma/prover/coqtop_backend.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <regex>
#include <sstream>

#include "vclemma/core/text.hpp"

namespace vclemma {

namespace {

// "<prompt>Coq < 4 |lemma_name| 2 < </prompt>" -> state 4
const std::regex kPromptRe("<prompt>[^<>]*?<\\s*(\\d+)\\s*\\|[^|]*\\|[^<>]*</prompt>");

// Goals are printed before the prompt:
//   2 subgoals
//   ...hypotheses...
//   ============================
//   first goal text
//   subgoal 2 is:
//    second goal text
std::vector<std::string> parse_goals(const std::string& text) {
  std::vector<std::string> goals;
  std::istringstream in(text);
  std::string line;
  std::string current;
  bool collecting = false;
  auto flush = [&] {
    if (!collecting) return;
    std::string g = normalize_ws(current);
    if (!g.empty()) goals.push_back(g);
    current.clear();
    collecting = false;
  };
  static const std::regex kNextGoal("^\\s*subgoal\\s+\\d+");
  while (std::getline(in, line)) {
    if (line.find("====") != std::string::npos) {
      flush();
      collecting = true;
      continue;
    }
    if (std::regex_search(line, kNextGoal)) {
      flush();
      collecting = true;
      continue;
    }
    if (collecting) {
      if (line.find("<prompt>") != std::string::npos) break;
      current += line + "\n";
    }
  }
  flush();
  return goals;
}

bool looks_like_error(const std::string& text) {
  return text.find("Error") != std::string::npos ||
         text.find("User interrupt") != std::string::npos ||
         text.find("Syntax error") != std::string::npos;
}

}  // namespace

bool prover_binary_available(const std::string& command) {
  const char* path = std::getenv("PATH");
  if (!path) return false;
  std::string dirs(path);
  std::size_t start = 0;
  while (start <= dirs.size()) {
    std::size_t end = dirs.find(':', start);
    std::string dir =
        dirs.substr(start, end == std::string::npos ? end : end - start);
    if (!dir.empty()) {
      std::string full = dir + "/" + command;
      if (::access(full.c_str(), X_OK) == 0) return true;
    }
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return false;
}

CoqtopBackend::CoqtopBackend(std::vector<std::string> argv) {
  if (argv.empty()) throw SessionDead("empty prover command line");

  int in_pipe[2];   // parent -> child
  int out_pipe[2];  // child -> parent
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
    throw SessionDead("cannot create prover pipes");

  pid_ = fork();
  if (pid_ < 0) throw SessionDead("cannot fork prover process");
  if (pid_ == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(out_pipe[1], STDERR_FILENO);  // prompts and errors on one stream
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    std::vector<char*> cargv;
    for (auto& a : argv) cargv.push_back(a.data());
    cargv.push_back(nullptr);
    execvp(cargv[0], cargv.data());
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];

  Reply hello = read_until_prompt(std::chrono::milliseconds(15000));
  if (!hello.prompt_seen) {
    shutdown();
    throw SessionDead("prover did not produce an initial prompt");
  }
  state_id_ = hello.state_id;
}

CoqtopBackend::~CoqtopBackend() { shutdown(); }

void CoqtopBackend::shutdown() {
  if (pid_ < 0) return;
  if (to_child_ >= 0) {
    const char* quit = "Quit.\n";
    ssize_t ignored = write(to_child_, quit, strlen(quit));
    (void)ignored;
    close(to_child_);
    to_child_ = -1;
  }
  if (from_child_ >= 0) {
    close(from_child_);
    from_child_ = -1;
  }
  int status = 0;
  for (int i = 0; i < 20; ++i) {
    if (waitpid(pid_, &status, WNOHANG) == pid_) {
      pid_ = -1;
      return;
    }
    usleep(50 * 1000);
  }
  kill(pid_, SIGKILL);
  waitpid(pid_, &status, 0);
  pid_ = -1;
}

void CoqtopBackend::send_line(const std::string& line) {
  std::string payload = line;
  if (payload.empty() || payload.back() != '\n') payload += '\n';
  const char* p = payload.data();
  std::size_t left = payload.size();
  while (left > 0) {
    ssize_t n = write(to_child_, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw SessionDead("prover stdin closed");
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
}

CoqtopBackend::Reply CoqtopBackend::read_until_prompt(
    std::chrono::milliseconds timeout) {
  auto deadline = std::chrono::steady_clock::now() + timeout;
  bool interrupted = false;
  std::string buf = std::move(pending_);
  pending_.clear();

  for (;;) {
    std::smatch m;
    if (std::regex_search(buf, m, kPromptRe)) {
      Reply r;
      r.text = buf.substr(0, static_cast<std::size_t>(m.position(0)));
      r.state_id = std::stoull(m[1].str());
      r.prompt_seen = true;
      pending_ = buf.substr(static_cast<std::size_t>(m.position(0)) +
                            static_cast<std::size_t>(m.length(0)));
      if (interrupted && r.text.find("interrupt") == std::string::npos)
        r.text += "\nUser interrupt.";
      return r;
    }

    auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      if (!interrupted) {
        // overran the sentence budget: interrupt the tactic and keep
        // reading until coqtop reprompts
        kill(pid_, SIGINT);
        interrupted = true;
        deadline = now + std::chrono::milliseconds(5000);
      } else {
        throw SessionDead("prover unresponsive after interrupt");
      }
    }

    struct pollfd pfd {
      from_child_, POLLIN, 0
    };
    auto wait_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       deadline - std::chrono::steady_clock::now())
                       .count();
    if (wait_ms < 0) wait_ms = 0;
    int rc = poll(&pfd, 1, static_cast<int>(wait_ms) + 1);
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw SessionDead("poll on prover pipe failed");
    }
    if (rc == 0) continue;
    char chunk[4096];
    ssize_t n = read(from_child_, chunk, sizeof chunk);
    if (n == 0) throw SessionDead("prover closed its output");
    if (n < 0) {
      if (errno == EINTR) continue;
      throw SessionDead("read from prover failed");
    }
    buf.append(chunk, static_cast<std::size_t>(n));
  }
}

ExecResult CoqtopBackend::execute(const std::string& sentence,
                                  std::chrono::milliseconds timeout) {
  std::string payload = normalize_ws(strip_comments(sentence));
  if (payload.empty()) {
    return ExecResult{true, "", goals_, state_id_};
  }
  send_line(payload);
  Reply r = read_until_prompt(timeout);

  ExecResult result;
  result.message = normalize_ws(r.text);
  bool advanced = r.state_id != state_id_;
  bool errored = looks_like_error(r.text);
  result.accepted = advanced && !errored;

  if (result.accepted) {
    state_id_ = r.state_id;
    goals_ = parse_goals(r.text);
  } else if (advanced) {
    // error text but the state moved: force it back to stay pure
    send_line("BackTo " + std::to_string(state_id_) + ".");
    read_until_prompt(std::chrono::milliseconds(10000));
  }
  result.goals = goals_;
  result.state_id = state_id_;
  return result;
}

bool CoqtopBackend::rollback_to(std::uint64_t state_id) {
  send_line("BackTo " + std::to_string(state_id) + ".");
  Reply r = read_until_prompt(std::chrono::milliseconds(10000));
  if (!r.prompt_seen || looks_like_error(r.text)) return false;
  state_id_ = r.state_id;
  goals_ = parse_goals(r.text);
  return true;
}

}  // namespace vclemma
