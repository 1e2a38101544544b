// SPDX-FileCopyrightText: Copyright (c) 2026 AIM contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "aim/records.hpp"

namespace aim {

// Event-log file formats. All CSVs carry a header row; dates are ISO-8601;
// numeric fields round-trip bit-exactly.
//
//   signups.csv:     subscriber_id,signup_date,group,activity
//   consumption.csv: subscriber_id,content_id,event_date,completion_fraction
//   promotion.csv:   subscriber_id,content_id,promo_intensity
//   launches.json:   array of launch objects with all window fields

// Empty promotion_path loads a dataset with no promotion records.
Dataset load_dataset(const std::string& signup_path,
                     const std::string& consumption_path,
                     const std::string& promotion_path);

void write_signups(const Dataset& ds, const std::string& path);
void write_consumption(const Dataset& ds, const std::string& path);
void write_promotions(const Dataset& ds, const std::string& path);

// Writes signups.csv, consumption.csv and promotion.csv under `dir`.
void write_dataset(const Dataset& ds, const std::string& dir);

std::vector<ContentLaunch> load_launches(const std::string& path);
void write_launches(const std::vector<ContentLaunch>& launches,
                    const std::string& path);

}  // namespace aim
