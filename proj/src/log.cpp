#include "vbsf/log.hpp"

#include <cstdlib>
#include <string>

#include <spdlog/sinks/stdout_sinks.h>

namespace vbsf {

void init_logging() {
  static bool initialized = false;
  if (!initialized) {
    auto logger = spdlog::stderr_logger_mt("vbsf");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    initialized = true;
  }
  const char* env = std::getenv("VBSF_LOG");
  const std::string level = env ? env : "warn";
  if (level == "error") spdlog::set_level(spdlog::level::err);
  else if (level == "info") spdlog::set_level(spdlog::level::info);
  else if (level == "debug") spdlog::set_level(spdlog::level::debug);
  else spdlog::set_level(spdlog::level::warn);
}

}  // namespace vbsf
