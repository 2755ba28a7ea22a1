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

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "sct/app.hpp"
#include "sct/errors.hpp"

namespace {

using namespace sct;

struct Common {
  std::string data;
  std::string mapping;
  std::string body_case = "HH";
  std::string method = "DT";
  std::string out;
  app::RunConfig run;
};

void add_common(CLI::App* cmd, Common& c, bool with_method) {
  cmd->add_option("--data", c.data, "data file (or directory for report)");
  cmd->add_option("--mapping", c.mapping, "column mapping file");
  cmd->add_option("--case", c.body_case, "body case: HH, HP, HB, PB, PP, BB");
  if (with_method) {
    cmd->add_option("--method", c.method, "DT, LDA, NB, kNN, SVM or PL");
    cmd->add_option("--window", c.run.window, "moving average window")->check(CLI::PositiveNumber);
    cmd->add_option("--threshold-m", c.run.threshold_m, "risk distance threshold")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--repeats", c.run.repeats, "random splits")->check(CLI::PositiveNumber);
  }
  cmd->add_option("--seed", c.run.seed, "random seed");
  cmd->add_option("--out", c.out, "output path");
}

app::RunConfig resolve(const Common& c) {
  auto run = c.run;
  run.data = c.data;
  if (!c.mapping.empty()) run.mapping = c.mapping;
  run.body_case = parse_body_case(c.body_case);
  run.method = parse_method(c.method);
  run.out = c.out;
  return run;
}

std::vector<DemoContact> parse_contacts(const std::string& text) {
  std::vector<DemoContact> contacts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "absent" || item == "-") {
      contacts.push_back({});
      continue;
    }
    std::size_t used = 0;
    double d = 0.0;
    try {
      d = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || item.empty() || !(d > 0.0)) {
      throw ParseError(fmt::format("bad contact '{}'", item));
    }
    contacts.push_back({d});
  }
  return contacts;
}

void require_data(const Common& c) {
  if (c.data.empty()) throw ValidationError("--data is required");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Smart contact tracing toolkit"};
  cli.require_subcommand(1);

  Common fit_opts;
  auto* fit = cli.add_subcommand("fit", "fit the path loss model");
  add_common(fit, fit_opts, false);

  std::string scenario, model_path, sim_out;
  bool noiseless = false;
  auto* sim = cli.add_subcommand("simulate", "simulate one encounter");
  sim->add_option("--scenario", scenario, "scenario file")->required();
  sim->add_option("--model", model_path, "path loss model file");
  sim->add_option("--out", sim_out, "trace output");
  sim->add_flag("--noiseless", noiseless, "disable RSS noise");

  Common eval_opts;
  auto* eval = cli.add_subcommand("evaluate", "cross-validated accuracy for one case");
  add_common(eval, eval_opts, true);

  Common train_opts;
  auto* trn = cli.add_subcommand("train", "train a classifier on one case");
  add_common(trn, train_opts, true);

  DemoConfig demo;
  std::string contacts, classifier_path, demo_out;
  auto* tdemo = cli.add_subcommand("trace-demo", "end-to-end tracing demo");
  tdemo->add_option("--devices", demo.n_devices, "number of devices")->check(CLI::Range(2, 1000));
  tdemo->add_option("--infected", demo.infected, "infected device id");
  tdemo->add_option("--duration-ms", demo.duration_ms, "interaction phase length")
      ->check(CLI::PositiveNumber);
  tdemo->add_option("--seed", demo.seed, "random seed");
  tdemo->add_option("--contacts", contacts, "per-device distance list, e.g. 1.0,5,absent");
  tdemo->add_option("--noise-var", demo.noise_var, "RSS noise variance")
      ->check(CLI::NonNegativeNumber);
  tdemo->add_option("--window", demo.window, "moving average window")->check(CLI::PositiveNumber);
  tdemo->add_option("--threshold-m", demo.threshold_m, "risk distance threshold")
      ->check(CLI::PositiveNumber);
  tdemo->add_option("--classifier", classifier_path, "classifier dump from `train`");
  tdemo->add_option("--out", demo_out, "report output");

  Common report_opts;
  app::ReportOptions report;
  auto* rep = cli.add_subcommand("report", "accuracy table and figure data for all cases");
  add_common(rep, report_opts, true);
  rep->add_option("--sweep-repeats", report.sweep_repeats, "repeats for the sweeps")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(cli, argc, argv);

  try {
    if (*fit) {
      app::cmd_fit(resolve(fit_opts), std::cout);
    } else if (*sim) {
      app::SimulateOptions opts;
      opts.scenario = scenario;
      if (!model_path.empty()) opts.model = model_path;
      opts.out = sim_out;
      opts.noiseless = noiseless;
      app::cmd_simulate(opts, std::cout);
    } else if (*eval) {
      require_data(eval_opts);
      app::cmd_evaluate(resolve(eval_opts), std::cout);
    } else if (*trn) {
      require_data(train_opts);
      app::cmd_train(resolve(train_opts), std::cout);
    } else if (*tdemo) {
      if (!contacts.empty()) demo.contacts = parse_contacts(contacts);
      if (!classifier_path.empty()) {
        std::ifstream in(classifier_path, std::ios::binary);
        if (!in) throw IoError("cannot read " + classifier_path);
        std::stringstream buf;
        buf << in.rdbuf();
        demo.classifier = parse_classifier(buf.str());
      }
      std::optional<std::filesystem::path> out;
      if (!demo_out.empty()) out = demo_out;
      app::cmd_trace_demo(demo, out, std::cout);
    } else if (*rep) {
      require_data(report_opts);
      report.run = resolve(report_opts);
      app::cmd_report(report, std::cout, std::cerr);
    }
  } catch (const sct::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
