// SPDX-FileCopyrightText: Copyright (c) 2026 AIM contributors
// SPDX-License-Identifier: Apache-2.0

#include "aim/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "aim/error.hpp"

namespace aim::csv {

std::string escape_field(std::string_view field) {
  bool needs_quote = field.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!needs_quote) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<std::string> split_line(std::string_view line,
                                    const std::string& file, size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool in_quotes = false;
  size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      if (!cur.empty()) {
        throw ParseError(file + ":" + std::to_string(line_no) +
                         ": stray quote inside unquoted field");
      }
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
    ++i;
  }
  if (in_quotes) {
    throw ParseError(file + ":" + std::to_string(line_no) +
                     ": unterminated quoted field");
  }
  fields.push_back(std::move(cur));
  return fields;
}

Reader::Reader(std::string path, std::vector<std::string> expected_header)
    : path_(std::move(path)) {
  std::ifstream in(path_, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path_);
  std::ostringstream ss;
  ss << in.rdbuf();
  content_ = ss.str();

  std::vector<std::string> header_fields;
  if (!next_row(header_fields)) {
    throw ParseError(path_ + ": missing header row");
  }
  if (header_fields != expected_header) {
    std::string want;
    for (size_t i = 0; i < expected_header.size(); ++i) {
      if (i) want += ",";
      want += expected_header[i];
    }
    throw ParseError(path_ + ":1: unexpected header, want '" + want + "'");
  }
  n_cols_ = expected_header.size();
}

bool Reader::next_row(std::vector<std::string>& fields) {
  while (pos_ < content_.size()) {
    size_t end = content_.find('\n', pos_);
    std::string_view line;
    if (end == std::string::npos) {
      line = std::string_view(content_).substr(pos_);
      pos_ = content_.size();
    } else {
      line = std::string_view(content_).substr(pos_, end - pos_);
      pos_ = end + 1;
    }
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    fields = split_line(line, path_, line_no_);
    if (n_cols_ != 0 && fields.size() != n_cols_) {
      throw ParseError(path_ + ":" + std::to_string(line_no_) + ": expected " +
                       std::to_string(n_cols_) + " fields, got " +
                       std::to_string(fields.size()));
    }
    return true;
  }
  return false;
}

Writer::Writer(std::string path) : path_(std::move(path)) {}

void Writer::write_row(const std::vector<std::string>& fields) {
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) buf_.push_back(',');
    buf_ += escape_field(fields[i]);
  }
  buf_.push_back('\n');
}

void Writer::close() {
  if (closed_) return;
  closed_ = true;
  std::ofstream out(path_, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path_);
  out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
  if (!out) throw Error("short write to " + path_);
}

Writer::~Writer() {
  try {
    close();
  } catch (...) {
    // destructor must not throw; callers that care call close() themselves
  }
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

double parse_double(std::string_view text, const std::string& file,
                    size_t line_no) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError(file + ":" + std::to_string(line_no) +
                     ": invalid number '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace aim::csv
