#pragma once

#include <sstream>
#include <string>

namespace mor {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

// Level comes from the MOR_LOG environment variable (error|info|debug),
// default error. Messages go to stderr.
LogLevel log_level();
void set_log_level(LogLevel level);
void log_message(LogLevel level, const std::string& msg);

#define MOR_LOG(level, expr)                                      \
  do {                                                            \
    if (static_cast<int>(level) <= static_cast<int>(::mor::log_level())) { \
      std::ostringstream oss__;                                   \
      oss__ << expr;                                              \
      ::mor::log_message(level, oss__.str());                     \
    }                                                             \
  } while (0)

#define MOR_INFO(expr) MOR_LOG(::mor::LogLevel::Info, expr)
#define MOR_DEBUG(expr) MOR_LOG(::mor::LogLevel::Debug, expr)
#define MOR_WARN(expr) MOR_LOG(::mor::LogLevel::Error, "warning: " << expr)

}  // namespace mor
