// SPDX-FileCopyrightText: Copyright (c) 2026 AIM contributors
// SPDX-License-Identifier: Apache-2.0

#include "aim/dataset_io.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "aim/csv.hpp"
#include "aim/error.hpp"

namespace aim {

namespace {

double parse_unit_interval(const std::string& text, const char* what,
                           const std::string& file, size_t line) {
  double v = csv::parse_double(text, file, line);
  if (v < 0.0 || v > 1.0) {
    throw ParseError(file + ":" + std::to_string(line) + ": " + what + " " +
                     text + " outside [0,1]");
  }
  return v;
}

Date parse_date_at(const std::string& text, const std::string& file,
                   size_t line) {
  try {
    return parse_date(text);
  } catch (const ParseError& e) {
    throw ParseError(file + ":" + std::to_string(line) + ": " + e.what());
  }
}

}  // namespace

Dataset load_dataset(const std::string& signup_path,
                     const std::string& consumption_path,
                     const std::string& promotion_path) {
  Dataset ds;

  {
    csv::Reader in(signup_path,
                   {"subscriber_id", "signup_date", "group", "activity"});
    std::vector<std::string> f;
    while (in.next_row(f)) {
      SignupRecord rec;
      rec.subscriber_id = f[0];
      if (rec.subscriber_id.empty()) {
        throw ParseError(signup_path + ":" + std::to_string(in.line_no()) +
                         ": empty subscriber_id");
      }
      rec.signup_date = parse_date_at(f[1], signup_path, in.line_no());
      rec.group = f[2];
      rec.activity = csv::parse_double(f[3], signup_path, in.line_no());
      if (rec.activity < 0) {
        throw ParseError(signup_path + ":" + std::to_string(in.line_no()) +
                         ": negative activity");
      }
      ds.signups.push_back(std::move(rec));
    }
  }

  {
    csv::Reader in(consumption_path, {"subscriber_id", "content_id",
                                      "event_date", "completion_fraction"});
    std::vector<std::string> f;
    while (in.next_row(f)) {
      ConsumptionRecord rec;
      rec.subscriber_id = f[0];
      rec.content_id = f[1];
      rec.event_date = parse_date_at(f[2], consumption_path, in.line_no());
      rec.completion_fraction = parse_unit_interval(
          f[3], "completion_fraction", consumption_path, in.line_no());
      ds.consumption.push_back(std::move(rec));
    }
  }

  if (!promotion_path.empty()) {
    csv::Reader in(promotion_path,
                   {"subscriber_id", "content_id", "promo_intensity"});
    std::vector<std::string> f;
    while (in.next_row(f)) {
      PromotionRecord rec;
      rec.subscriber_id = f[0];
      rec.content_id = f[1];
      rec.promo_intensity = parse_unit_interval(
          f[2], "promo_intensity", promotion_path, in.line_no());
      ds.promotions.push_back(std::move(rec));
    }
  }

  ds.finalize(signup_path);
  return ds;
}

void write_signups(const Dataset& ds, const std::string& path) {
  csv::Writer out(path);
  out.write_row({"subscriber_id", "signup_date", "group", "activity"});
  for (const auto& s : ds.signups) {
    out.write_row({s.subscriber_id, format_date(s.signup_date), s.group,
                   csv::format_double(s.activity)});
  }
  out.close();
}

void write_consumption(const Dataset& ds, const std::string& path) {
  csv::Writer out(path);
  out.write_row(
      {"subscriber_id", "content_id", "event_date", "completion_fraction"});
  for (const auto& c : ds.consumption) {
    out.write_row({c.subscriber_id, c.content_id, format_date(c.event_date),
                   csv::format_double(c.completion_fraction)});
  }
  out.close();
}

void write_promotions(const Dataset& ds, const std::string& path) {
  csv::Writer out(path);
  out.write_row({"subscriber_id", "content_id", "promo_intensity"});
  for (const auto& p : ds.promotions) {
    out.write_row(
        {p.subscriber_id, p.content_id, csv::format_double(p.promo_intensity)});
  }
  out.close();
}

void write_dataset(const Dataset& ds, const std::string& dir) {
  std::filesystem::create_directories(dir);
  auto join = [&dir](const char* name) {
    return (std::filesystem::path(dir) / name).string();
  };
  write_signups(ds, join("signups.csv"));
  write_consumption(ds, join("consumption.csv"));
  write_promotions(ds, join("promotion.csv"));
}

namespace {

using nlohmann::json;

json launch_to_json(const ContentLaunch& l) {
  return json{{"content_id", l.content_id},
              {"launch_date", format_date(l.launch_date)},
              {"pre_window_days", l.pre_window_days},
              {"pre_gap_days", l.pre_gap_days},
              {"post_window_days", l.post_window_days},
              {"completion_threshold", l.completion_threshold},
              {"label_window_days", l.label_window_days}};
}

ContentLaunch launch_from_json(const json& j) {
  ContentLaunch l;
  l.content_id = j.at("content_id").get<std::string>();
  l.launch_date = parse_date(j.at("launch_date").get<std::string>());
  l.pre_window_days = j.value("pre_window_days", l.pre_window_days);
  l.pre_gap_days = j.value("pre_gap_days", l.pre_gap_days);
  l.post_window_days = j.value("post_window_days", l.post_window_days);
  l.completion_threshold =
      j.value("completion_threshold", l.completion_threshold);
  l.label_window_days = j.value("label_window_days", l.label_window_days);
  l.validate();
  return l;
}

}  // namespace

std::vector<ContentLaunch> load_launches(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (!j.is_array()) throw ParseError(path + ": expected a JSON array");
  std::vector<ContentLaunch> launches;
  try {
    for (const auto& item : j) launches.push_back(launch_from_json(item));
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return launches;
}

void write_launches(const std::vector<ContentLaunch>& launches,
                    const std::string& path) {
  json arr = json::array();
  for (const auto& l : launches) arr.push_back(launch_to_json(l));
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << arr.dump(2) << "\n";
}

}  // namespace aim
