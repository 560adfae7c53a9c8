#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace qvdp {

using WarningSink = std::function<void(std::string_view)>;

// Warnings go to stderr unless a sink is installed. Thread-safe.
void warn(std::string_view message);

// Returns the previous sink. Passing an empty function restores stderr.
WarningSink set_warning_sink(WarningSink sink);

}  // namespace qvdp
