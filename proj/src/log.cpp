// SPDX-FileCopyrightText: Copyright (c) 2026 AIM contributors
// SPDX-License-Identifier: Apache-2.0

#include "aim/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace aim::log {

namespace {

Level g_level = [] {
  const char* env = std::getenv("AIM_LOG");
  if (env == nullptr) return Level::kInfo;
  if (std::strcmp(env, "debug") == 0) return Level::kDebug;
  if (std::strcmp(env, "warn") == 0) return Level::kWarn;
  if (std::strcmp(env, "quiet") == 0) return Level::kQuiet;
  return Level::kInfo;
}();

void emit(const char* tag, const std::string& msg) {
  std::fprintf(stderr, "[%s] %s\n", tag, msg.c_str());
}

}  // namespace

Level level() { return g_level; }
void set_level(Level l) { g_level = l; }

void debug(const std::string& msg) {
  if (g_level <= Level::kDebug) emit("debug", msg);
}
void info(const std::string& msg) {
  if (g_level <= Level::kInfo) emit("info", msg);
}
void warn(const std::string& msg) {
  if (g_level <= Level::kWarn) emit("warn", msg);
}

}  // namespace aim::log
