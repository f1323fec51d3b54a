#include "proofsmith/subprocess_verifier.hpp"

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <future>
#include <iostream>
#include <map>
#include <set>
#include <thread>

#include "proofsmith/errors.hpp"

extern char** environ;

namespace proofsmith {

class SubprocessVerifier::Child {
 public:
  Child(const std::string& command, std::shared_ptr<std::atomic<std::size_t>> protocol_errors)
      : protocol_errors_(std::move(protocol_errors)) {
    int in_pipe[2];
    int out_pipe[2];
    if (pipe2(in_pipe, O_CLOEXEC) != 0) throw BackendUnavailable(std::string("pipe: ") + std::strerror(errno));
    if (pipe2(out_pipe, O_CLOEXEC) != 0) {
      ::close(in_pipe[0]);
      ::close(in_pipe[1]);
      throw BackendUnavailable(std::string("pipe: ") + std::strerror(errno));
    }

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
    posix_spawnattr_t attr;
    posix_spawnattr_init(&attr);
    posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
    posix_spawnattr_setpgroup(&attr, 0);

    std::string sh = "/bin/sh", dash_c = "-c", cmd = command;
    char* argv[] = {sh.data(), dash_c.data(), cmd.data(), nullptr};
    const int rc = posix_spawn(&pid_, "/bin/sh", &actions, &attr, argv, environ);
    posix_spawn_file_actions_destroy(&actions);
    posix_spawnattr_destroy(&attr);
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    if (rc != 0) {
      ::close(in_pipe[1]);
      ::close(out_pipe[0]);
      throw BackendUnavailable(std::string("spawn: ") + std::strerror(rc));
    }
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
    reader_ = std::thread([this] { read_loop(); });
  }

  ~Child() {
    {
      std::lock_guard lock(write_mu_);
      if (to_child_ >= 0) ::close(to_child_);
      to_child_ = -1;
    }
    // Give the child a moment to exit on EOF, then take down its group.
    for (int i = 0; i < 50; ++i) {
      if (waitpid(pid_, nullptr, WNOHANG) == pid_) {
        reaped_ = true;
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    if (!reaped_) {
      ::kill(-pid_, SIGKILL);
      waitpid(pid_, nullptr, 0);
    }
    if (reader_.joinable()) reader_.join();
    ::close(from_child_);
  }

  bool alive() const { return alive_.load(); }

  std::future<Json> submit(const std::string& id, const std::string& line) {
    std::future<Json> fut;
    {
      std::lock_guard lock(pending_mu_);
      if (!alive_) throw BackendUnavailable("verifier process exited");
      fut = pending_[id].get_future();
    }
    std::lock_guard lock(write_mu_);
    std::size_t written = 0;
    while (written < line.size()) {
      const ssize_t n = ::write(to_child_, line.data() + written, line.size() - written);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) {
        fail_all("verifier process closed its input");
        break;
      }
      written += static_cast<std::size_t>(n);
    }
    return fut;
  }

  void abandon(const std::string& id) {
    std::lock_guard lock(pending_mu_);
    if (pending_.erase(id) != 0) abandoned_.insert(id);
  }

 private:
  void read_loop() {
    std::string buffer;
    char chunk[4096];
    for (;;) {
      const ssize_t n = ::read(from_child_, chunk, sizeof chunk);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) break;
      buffer.append(chunk, static_cast<std::size_t>(n));
      std::size_t nl;
      while ((nl = buffer.find('\n')) != std::string::npos) {
        dispatch(buffer.substr(0, nl));
        buffer.erase(0, nl + 1);
      }
    }
    fail_all("verifier process exited");
  }

  void dispatch(const std::string& line) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) return;
    Json msg;
    try {
      msg = Json::parse(line);
    } catch (const Json::parse_error&) {
      ++*protocol_errors_;
      std::cerr << "verifier: unparseable response line\n";
      return;
    }
    const std::string id = msg.is_object() && msg.contains("id") && msg["id"].is_string()
                               ? msg["id"].get<std::string>()
                               : std::string();
    std::lock_guard lock(pending_mu_);
    if (auto it = pending_.find(id); it != pending_.end()) {
      it->second.set_value(std::move(msg));
      pending_.erase(it);
      return;
    }
    if (abandoned_.erase(id) != 0) return;
    ++*protocol_errors_;
    std::cerr << "verifier: response for unknown id '" << id << "'\n";
  }

  void fail_all(const std::string& why) {
    std::lock_guard lock(pending_mu_);
    alive_ = false;
    for (auto& [id, promise] : pending_) {
      promise.set_exception(std::make_exception_ptr(BackendUnavailable(why)));
    }
    pending_.clear();
  }

  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  bool reaped_ = false;
  std::atomic<bool> alive_{true};
  std::shared_ptr<std::atomic<std::size_t>> protocol_errors_;
  std::mutex write_mu_;
  std::mutex pending_mu_;
  std::map<std::string, std::promise<Json>> pending_;
  std::set<std::string> abandoned_;
  std::thread reader_;
};

SubprocessVerifier::SubprocessVerifier(SubprocessOptions options)
    : options_(std::move(options)), protocol_errors_(std::make_shared<std::atomic<std::size_t>>(0)) {
  if (options_.command.empty()) throw ConfigError("subprocess verifier needs a command (VERIFIER_CMD)");
  if (options_.pool_size < 1) options_.pool_size = 1;
  // Writes to a dead child must surface as EPIPE, not kill the process.
  static std::once_flag sigpipe_once;
  std::call_once(sigpipe_once, [] { ::signal(SIGPIPE, SIG_IGN); });
  children_.resize(static_cast<std::size_t>(options_.pool_size));
}

SubprocessVerifier::~SubprocessVerifier() = default;

std::size_t SubprocessVerifier::protocol_errors() const { return protocol_errors_->load(); }

std::shared_ptr<SubprocessVerifier::Child> SubprocessVerifier::child_for_call() {
  std::lock_guard lock(mu_);
  auto& slot = children_[next_slot_++ % children_.size()];
  if (!slot || !slot->alive()) {
    slot.reset();
    slot = std::make_shared<Child>(options_.command, protocol_errors_);
    ++spawns_;
  }
  return slot;
}

Verdict SubprocessVerifier::verify(const FormalStatement& stmt, const std::string& proof,
                                   const VerifyOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  auto child = child_for_call();
  const std::string id = std::to_string(next_id_++);

  Json request;
  request["id"] = id;
  request["statement"] = source_text(stmt);
  request["proof"] = proof;
  request["timeout_ms"] = options.timeout.count();
  request["extract_goals"] = options.extract_goals;
  auto fut = child->submit(id, request.dump() + "\n");

  auto elapsed = [&] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  };
  if (fut.wait_for(options.timeout + options_.grace) != std::future_status::ready) {
    child->abandon(id);
    return timeout_verdict(this->id(), elapsed());
  }
  Json response = fut.get();
  Verdict v;
  try {
    v = verdict_from_json(response);
  } catch (const Json::exception& e) {
    ++*protocol_errors_;
    throw ProtocolError(std::string("malformed verifier response: ") + e.what());
  }
  v.backend = this->id();
  v.wall_time = elapsed();
  if (v.pass && (v.has_errors() || !v.goals.empty())) {
    throw ProtocolError("verifier reported pass with errors or open goals");
  }
  if (!options.extract_goals) v.goals.clear();
  return v;
}

}  // namespace proofsmith
