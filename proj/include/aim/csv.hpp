// SPDX-FileCopyrightText: Copyright (c) 2026 AIM contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace aim::csv {

// Minimal RFC-4180 style CSV. Fields containing commas, quotes or newlines
// are quoted on write; quoted fields are unescaped on read.

std::string escape_field(std::string_view field);

// Splits one line into fields. `file` and `line_no` feed error messages.
std::vector<std::string> split_line(std::string_view line,
                                    const std::string& file, size_t line_no);

struct Reader {
  Reader(std::string path, std::vector<std::string> expected_header);

  // Returns false at EOF; otherwise fills `fields` (validated column count).
  bool next_row(std::vector<std::string>& fields);

  size_t line_no() const { return line_no_; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::string content_;
  size_t pos_ = 0;
  size_t line_no_ = 0;
  size_t n_cols_ = 0;
};

struct Writer {
  explicit Writer(std::string path);
  void write_row(const std::vector<std::string>& fields);
  void close();
  ~Writer();

 private:
  std::string path_;
  std::string buf_;
  bool closed_ = false;
};

// Shortest round-trip decimal text for a double (std::to_chars).
std::string format_double(double v);
double parse_double(std::string_view text, const std::string& file,
                    size_t line_no);

}  // namespace aim::csv
