#pragma once

#include <stdexcept>
#include <string>

namespace ideagen {

// Process exit codes used by the CLI. Each error class maps onto one.
enum class ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kData = 2,
  kBackend = 3,
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (corpus lines, dataset lines, vector
// files, unknown ids).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failures raised by a model or embedding backend, including non-finite
// training loss.
class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ideagen
