#include "mor/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <mutex>

namespace mor {

namespace {

LogLevel g_level = [] {
  const char* env = std::getenv("MOR_LOG");
  if (!env) return LogLevel::Error;
  if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
  if (std::strcmp(env, "info") == 0) return LogLevel::Info;
  return LogLevel::Error;
}();

std::mutex g_mutex;

}  // namespace

LogLevel log_level() { return g_level; }

void set_log_level(LogLevel level) { g_level = level; }

void log_message(LogLevel level, const std::string& msg) {
  const char* tag = level == LogLevel::Error ? "error" : level == LogLevel::Info ? "info" : "debug";
  std::lock_guard<std::mutex> lock(g_mutex);
  std::fprintf(stderr, "[mor:%s] %s\n", tag, msg.c_str());
}

}  // namespace mor
