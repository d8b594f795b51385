#pragma once

#include <stdexcept>
#include <string>

namespace slqg {

// Failure classes surfaced by the solvers and the CLI. The CLI maps these to
// process exit codes (validation 2, singularity 3, monitor/simulation breach 4,
// io 5), so keep categories stable.
enum class ErrorCategory {
  validation,   // spec invariant violated, bad shapes, bad data
  singularity,  // an SPD factorization hit the eigenvalue floor
  monitor,      // a solution left the monitored positive-semidefinite region
  simulation,   // non-finite state during forward simulation
  io,           // file missing/unreadable/unwritable
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, std::string message, int node_index = -1)
      : std::runtime_error(std::move(message)),
        category_(category),
        node_index_(node_index) {}

  ErrorCategory category() const { return category_; }

  // Grid node (or path step) at which the failure occurred; -1 if not tied to
  // a node.
  int node_index() const { return node_index_; }

 private:
  ErrorCategory category_;
  int node_index_;
};

inline int exit_code_for(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::validation: return 2;
    case ErrorCategory::singularity: return 3;
    case ErrorCategory::monitor: return 4;
    case ErrorCategory::simulation: return 4;
    case ErrorCategory::io: return 5;
  }
  return 1;
}

}  // namespace slqg
