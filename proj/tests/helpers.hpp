// SPDX-FileCopyrightText: Copyright (c) 2026 AIM contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "aim/records.hpp"

namespace aim::test {

// Scratch directory wiped per construction; unique per tag.
inline std::string scratch_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() / ("aim_test_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::string s((std::istreambuf_iterator<char>(in)),
                std::istreambuf_iterator<char>());
  return s;
}

struct DatasetBuilder {
  Dataset ds;

  DatasetBuilder& signup(const std::string& id, Date date,
                         const std::string& group = "",
                         double activity = 1.0) {
    ds.signups.push_back({id, date, group, activity});
    return *this;
  }
  DatasetBuilder& consume(const std::string& id, const std::string& content,
                          Date date, double completion) {
    ds.consumption.push_back({id, content, date, completion});
    return *this;
  }
  DatasetBuilder& promote(const std::string& id, const std::string& content,
                          double intensity) {
    ds.promotions.push_back({id, content, intensity});
    return *this;
  }
  Dataset build() {
    ds.finalize("test");
    return std::move(ds);
  }
};

inline ContentLaunch basic_launch(const std::string& content, Date date,
                                  int pre = 7, int gap = 2, int post = 14,
                                  double threshold = 0.7, int label = 7) {
  ContentLaunch l;
  l.content_id = content;
  l.launch_date = date;
  l.pre_window_days = pre;
  l.pre_gap_days = gap;
  l.post_window_days = post;
  l.completion_threshold = threshold;
  l.label_window_days = label;
  return l;
}

}  // namespace aim::test
