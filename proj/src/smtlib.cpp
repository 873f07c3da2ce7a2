#include "slp/smtlib.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstring>
#include <vector>

namespace slp {

SmtAnswer SmtLibClient::check(const std::string& script) const {
  char tmpl[] = "/tmp/slpv_smt_XXXXXX";
  int tfd = mkstemp(tmpl);
  if (tfd < 0) return SmtAnswer::Unknown;
  std::string tmp_path = tmpl;
  if (write(tfd, script.data(), script.size()) != static_cast<ssize_t>(script.size())) {
    close(tfd);
    unlink(tmp_path.c_str());
    return SmtAnswer::Unknown;
  }
  close(tfd);

  int out_pipe[2];
  if (pipe(out_pipe) != 0) {
    unlink(tmp_path.c_str());
    return SmtAnswer::Unknown;
  }

  pid_t pid = fork();
  if (pid < 0) {
    close(out_pipe[0]);
    close(out_pipe[1]);
    unlink(tmp_path.c_str());
    return SmtAnswer::Unknown;
  }
  if (pid == 0) {
    dup2(out_pipe[1], STDOUT_FILENO);
    close(out_pipe[0]);
    close(out_pipe[1]);
    execlp(path_.c_str(), path_.c_str(), tmp_path.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(out_pipe[1]);

  std::string out;
  auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms_);
  bool timed_out = false;
  for (;;) {
    auto now = std::chrono::steady_clock::now();
    int wait_ms = static_cast<int>(
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count());
    if (wait_ms <= 0) {
      timed_out = true;
      break;
    }
    struct pollfd pfd {
      out_pipe[0], POLLIN, 0
    };
    int r = poll(&pfd, 1, wait_ms);
    if (r <= 0) {
      timed_out = r == 0;
      break;
    }
    char buf[4096];
    ssize_t n = read(out_pipe[0], buf, sizeof(buf));
    if (n <= 0) break;  // EOF
    out.append(buf, static_cast<size_t>(n));
  }
  close(out_pipe[0]);
  if (timed_out) kill(pid, SIGKILL);
  int status = 0;
  waitpid(pid, &status, 0);
  unlink(tmp_path.c_str());
  if (timed_out) return SmtAnswer::Unknown;

  // First token on the first non-empty line decides.
  size_t i = out.find_first_not_of(" \t\r\n");
  if (i == std::string::npos) return SmtAnswer::Unknown;
  if (out.compare(i, 5, "unsat") == 0) return SmtAnswer::Unsat;
  if (out.compare(i, 3, "sat") == 0) return SmtAnswer::Sat;
  return SmtAnswer::Unknown;
}

}  // namespace slp
