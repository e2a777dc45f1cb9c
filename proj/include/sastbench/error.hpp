#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sastbench {

enum class ErrorKind {
  io,
  malformed_manifest,
  invariant_violation,
  missing_files,
  empty_corpus,
  malformed_report,
  malformed_config,
  analyzer_failed,
  analyzer_timeout,
  target_mismatch,
  manifest_mismatch,
  missing_member,
  too_many_tools,
  rejected_input,
  too_large,
  invalid_transition,
  already_decided,
  invalid_decision,
  not_found,
  not_ready,
};

std::string_view to_string(ErrorKind kind);

// Every domain failure in the library is reported through this type; the
// kind is what callers (CLI exit codes, HTTP status mapping) dispatch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace sastbench
