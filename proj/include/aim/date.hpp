// SPDX-FileCopyrightText: Copyright (c) 2026 AIM contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace aim {

// Calendar date stored as days since 1970-01-01. Day resolution is all the
// event logs carry, so arithmetic is plain integer math.
struct Date {
  int32_t days = 0;

  auto operator<=>(const Date&) const = default;

  Date operator+(int d) const { return Date{days + d}; }
  Date operator-(int d) const { return Date{days - d}; }
  int operator-(Date other) const { return days - other.days; }
  Date& operator++() {
    ++days;
    return *this;
  }
};

// 0 = Sunday ... 6 = Saturday.
inline int weekday(Date d) { return ((d.days + 4) % 7 + 7) % 7; }

int32_t days_from_civil(int y, unsigned m, unsigned day);
void civil_from_days(int32_t z, int& y, unsigned& m, unsigned& d);

// Strict ISO-8601 (YYYY-MM-DD). Throws ParseError on anything else.
Date parse_date(std::string_view text);
std::string format_date(Date d);

}  // namespace aim
