// SPDX-FileCopyrightText: Copyright (c) 2026 AIM contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

namespace aim::log {

enum class Level { kDebug = 0, kInfo = 1, kWarn = 2, kQuiet = 3 };

// Reads AIM_LOG (debug|info|warn|quiet) once; default info.
Level level();
void set_level(Level l);

void debug(const std::string& msg);
void info(const std::string& msg);
void warn(const std::string& msg);

}  // namespace aim::log
