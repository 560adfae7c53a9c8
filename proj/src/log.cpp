#include "qvdp/log.hpp"

#include <iostream>
#include <mutex>

#include "qvdp/error.hpp"

namespace qvdp {

namespace {
std::mutex g_sink_mutex;
WarningSink g_sink;
}  // namespace

const char* to_string(Errc code) {
  switch (code) {
    case Errc::invalid_dimension: return "invalid dimension";
    case Errc::invalid_parameter: return "invalid parameter";
    case Errc::dimension_mismatch: return "dimension mismatch";
    case Errc::sector_unavailable: return "sector decomposition unavailable";
    case Errc::budget_exceeded: return "size budget exceeded";
    case Errc::no_convergence: return "no convergence";
    case Errc::ambiguous_steady_state: return "ambiguous steady state";
    case Errc::insufficient_data: return "insufficient data";
    case Errc::step_underflow: return "step size underflow";
    case Errc::trace_drift: return "trace drift";
    case Errc::no_bifurcation: return "no bifurcation";
    case Errc::not_in_limit_cycle: return "not in limit-cycle phase";
    case Errc::config: return "config error";
    case Errc::io: return "i/o error";
  }
  return "unknown error";
}

void warn(std::string_view message) {
  std::lock_guard lock(g_sink_mutex);
  if (g_sink) {
    g_sink(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

WarningSink set_warning_sink(WarningSink sink) {
  std::lock_guard lock(g_sink_mutex);
  auto previous = std::move(g_sink);
  g_sink = std::move(sink);
  return previous;
}

}  // namespace qvdp
