#include "ldfm/log.hpp"

#include <cstdlib>
#include <string>

namespace ldfm {

LogLevel log_level_from_env() {
  const char* raw = std::getenv("LDFM_LOG");
  if (raw == nullptr) return LogLevel::kInfo;
  const std::string value(raw);
  if (value == "error") return LogLevel::kError;
  if (value == "debug") return LogLevel::kDebug;
  return LogLevel::kInfo;
}

}  // namespace ldfm
