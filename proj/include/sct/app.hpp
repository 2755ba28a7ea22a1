/*
 * Copyright 2026 The SCT Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sct/classifiers.hpp"
#include "sct/dataset.hpp"
#include "sct/filtering.hpp"
#include "sct/risk_eval.hpp"
#include "sct/timing.hpp"
#include "sct/tracing.hpp"

// Command implementations behind the `sct` tool. Each writes its files,
// prints a short report to `out`, and throws sct::Error on failure.
namespace sct::app {

struct RunConfig {
  std::filesystem::path data;
  std::optional<std::filesystem::path> mapping;
  BodyCase body_case = BodyCase::HH;
  Method method = Method::DT;
  std::size_t window = kSaturationWindow;
  double threshold_m = kDefaultThresholdM;
  std::uint64_t seed = 1;
  std::size_t repeats = kDefaultRepeats;
  std::filesystem::path out;
  std::int64_t adv_interval_ms = 100;
};

ColumnMapping mapping_for(const RunConfig& cfg);

// Fits the path loss model to per-distance means of a data file, or to the
// built-in hand-to-hand table when no data path is given.
PathLossFit cmd_fit(const RunConfig& cfg, std::ostream& out);

struct SimulateOptions {
  std::filesystem::path scenario;
  std::optional<std::filesystem::path> model;  // default: reference_model()
  std::filesystem::path out;
  bool noiseless = false;
};

std::vector<RssSample> cmd_simulate(const SimulateOptions& opts, std::ostream& out);

AccuracyReport cmd_evaluate(const RunConfig& cfg, std::ostream& out);

// Trains on the whole case file and writes the classifier dump to cfg.out.
TrainedClassifier cmd_train(const RunConfig& cfg, std::ostream& out);

DemoResult cmd_trace_demo(const DemoConfig& demo, const std::optional<std::filesystem::path>& report,
                          std::ostream& out);

struct ReportOptions {
  RunConfig run;                // data = directory with <CASE>.csv files
  std::size_t sweep_repeats = 5;
  std::vector<std::size_t> windows = {1, 10, 20, 50, 100, 150, 200};
  std::vector<double> thresholds = {0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0, 3.0, 4.0};
  std::vector<double> durations_s = {1, 2, 5, 10, 20, 30, 60};
};

struct ReportRow {
  BodyCase body_case;
  Method method;
  bool filtered;
  AccuracyReport report;
  std::size_t window = 1;
};

struct ReportResult {
  std::vector<ReportRow> rows;
  std::vector<BodyCase> missing;
};

// Table of every case x method x {raw, filtered} plus per-figure data
// files under opts.run.out.
ReportResult cmd_report(const ReportOptions& opts, std::ostream& out, std::ostream& warn);

void write_report_table(std::ostream& out, const std::vector<ReportRow>& rows);

}  // namespace sct::app
