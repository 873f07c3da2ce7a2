#pragma once

#include <optional>
#include <string>

namespace slp {

enum class SmtAnswer { Sat, Unsat, Unknown };

// Runs `<path> <script-file>` with the script on a temp file, reads the first
// answer line from stdout, and kills the process on timeout. The solver is
// expected to speak the standard SMT-LIB text format.
class SmtLibClient {
 public:
  SmtLibClient(std::string path, int timeout_ms) : path_(std::move(path)), timeout_ms_(timeout_ms) {}

  SmtAnswer check(const std::string& script) const;

 private:
  std::string path_;
  int timeout_ms_;
};

}  // namespace slp
