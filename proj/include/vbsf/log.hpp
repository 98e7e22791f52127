#pragma once

#include <spdlog/spdlog.h>

namespace vbsf {

/// Applies VBSF_LOG (error, warn, info, debug) to the default logger; messages go to stderr.
void init_logging();

}  // namespace vbsf
