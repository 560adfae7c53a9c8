#pragma once

#include <stdexcept>
#include <string>

namespace qvdp {

enum class Errc {
  invalid_dimension,
  invalid_parameter,
  dimension_mismatch,
  sector_unavailable,
  budget_exceeded,
  no_convergence,
  ambiguous_steady_state,
  insufficient_data,
  step_underflow,
  trace_drift,
  no_bifurcation,
  not_in_limit_cycle,
  config,
  io,
};

const char* to_string(Errc code);

/// Single exception type for the library; `code()` tells callers which
/// contract was violated.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace qvdp
