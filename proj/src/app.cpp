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

#include "sct/app.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "sct/errors.hpp"

namespace sct::app {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError(fmt::format("cannot write {}", path.string()));
  return f;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError(fmt::format("cannot read {}", path.string()));
  return f;
}

EvalConfig eval_config(const RunConfig& cfg, Method method, std::size_t window) {
  EvalConfig e;
  e.method = method;
  e.window = window;
  e.threshold_m = cfg.threshold_m;
  e.seed = cfg.seed;
  e.repeats = cfg.repeats;
  return e;
}

void write_confusion(std::ostream& out, const ConfusionMatrix& cm) {
  out << "confusion,truth=+1,truth=-1\n"
      << fmt::format("pred=+1,{},{}\n", cm.counts[0][0], cm.counts[0][1])
      << fmt::format("pred=-1,{},{}\n", cm.counts[1][0], cm.counts[1][1]);
}

}  // namespace

ColumnMapping mapping_for(const RunConfig& cfg) {
  return cfg.mapping ? ColumnMapping::load(*cfg.mapping) : ColumnMapping::default_mapping();
}

PathLossFit cmd_fit(const RunConfig& cfg, std::ostream& out) {
  std::vector<DistanceStats> stats;
  if (cfg.data.empty()) {
    const auto ref = hand_to_hand_reference();
    stats.assign(ref.begin(), ref.end());
  } else {
    stats = summarize(load_case(cfg.data, mapping_for(cfg), cfg.body_case));
  }
  const auto points = fit_points(stats);
  const auto fit = fit_path_loss(points);
  if (!cfg.out.empty()) {
    auto f = open_out(cfg.out);
    f << format_model(fit.model);
  }
  out << fmt::format("points={}\nn={}\nc={}\nresidual_ss={}\niterations={}\nconverged={}\n",
                     points.size(), fit.model.n(), fit.model.c(), fit.residual_ss, fit.iterations,
                     fit.converged ? "yes" : "no");
  return fit;
}

std::vector<RssSample> cmd_simulate(const SimulateOptions& opts, std::ostream& out) {
  auto in = open_in(opts.scenario);
  const auto scenario = parse_scenario(in);
  const auto model = opts.model ? load_model(*opts.model) : reference_model();
  const NoiseLookup noise =
      opts.noiseless ? NoiseLookup([](double) { return 0.0; }) : hand_to_hand_noise();
  const auto samples = run_encounter(scenario, model, noise);
  if (!opts.out.empty()) {
    auto f = open_out(opts.out);
    write_trace(f, samples);
  }
  const auto broadcasts = simulate_reception(scenario.tx, scenario.rx, scenario, model, noise);
  out << fmt::format("broadcasts={}\nreceived={}\n", broadcasts.broadcast_count, samples.size());
  return samples;
}

AccuracyReport cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
  const auto ds = load_case(cfg.data, mapping_for(cfg), cfg.body_case);
  const auto report = evaluate_case(ds.samples, eval_config(cfg, cfg.method, cfg.window));
  std::ostringstream text;
  text << "case,method,window,threshold_m,repeats,mean,ci_lo,ci_hi\n"
       << fmt::format("{},{},{},{},{},{:.6f},{:.6f},{:.6f}\n", to_string(cfg.body_case),
                      to_string(cfg.method), cfg.window, cfg.threshold_m, report.repeats,
                      report.mean, report.ci_lo, report.ci_hi);
  write_confusion(text, report.confusion);
  out << text.str();
  if (!cfg.out.empty()) {
    auto f = open_out(cfg.out);
    f << text.str();
  }
  return report;
}

TrainedClassifier cmd_train(const RunConfig& cfg, std::ostream& out) {
  const auto ds = load_case(cfg.data, mapping_for(cfg), cfg.body_case);
  const auto rss = cfg.window > 1 ? filter_by_segment(ds.samples, cfg.window) : [&] {
    std::vector<double> v;
    for (const auto& s : ds.samples) v.push_back(s.rss);
    return v;
  }();
  std::vector<LabeledFeature> set;
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    set.push_back({encode_rss_8bit(rss[i]), threshold_classify(*ds.samples[i].true_distance, cfg.threshold_m)});
  }
  auto model = train(cfg.method, set, Hyperparams{}, cfg.seed);
  const TrainedClassifier stamped(model.kind(), model.params(),
                                  TrainMeta{set.size(), cfg.seed, cfg.window});
  const auto dump = dump_classifier(stamped);
  if (!cfg.out.empty()) {
    auto f = open_out(cfg.out);
    f << dump;
  }
  out << fmt::format("method={}\nsamples={}\n", to_string(cfg.method), set.size());
  return stamped;
}

DemoResult cmd_trace_demo(const DemoConfig& demo, const std::optional<std::filesystem::path>& report,
                          std::ostream& out) {
  const auto result = run_trace_demo(demo);
  std::ostringstream text;
  write_demo_report(text, demo, result);
  out << text.str();
  if (report) {
    auto f = open_out(*report);
    f << text.str();
  }
  return result;
}

void write_report_table(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << "case,method,data,window,repeats,mean,ci_lo,ci_hi\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{:.6f},{:.6f},{:.6f}\n", to_string(r.body_case),
                       to_string(r.method), r.filtered ? "filtered" : "raw",
                       r.window, r.report.repeats, r.report.mean,
                       r.report.ci_lo, r.report.ci_hi);
  }
}

ReportResult cmd_report(const ReportOptions& opts, std::ostream& out, std::ostream& warn) {
  const auto& run = opts.run;
  const auto mapping = mapping_for(run);
  if (run.out.empty()) throw ValidationError("report needs an output directory");
  std::filesystem::create_directories(run.out);

  std::vector<CaseDataset> datasets;
  ReportResult result;
  for (const auto c : kAllCases) {
    const auto path = run.data / fmt::format("{}.csv", to_string(c));
    if (!std::filesystem::exists(path)) {
      warn << fmt::format("warning: no data for case {} ({} missing)\n", to_string(c), path.string());
      result.missing.push_back(c);
      continue;
    }
    datasets.push_back(load_case(path, mapping, c));
  }
  if (datasets.empty()) throw EmptyDatasetError("no case files found in " + run.data.string());

  {
    auto f = open_out(run.out / "counts.csv");
    f << "case,loaded,published,skipped\n";
    for (const auto& ds : datasets) {
      f << fmt::format("{},{},{},{}\n", to_string(ds.body_case), ds.samples.size(),
                       published_case_count(ds.body_case), ds.skipped_rows);
    }
  }
  for (const auto& ds : datasets) {
    auto f = open_out(run.out / fmt::format("summary_{}.csv", to_string(ds.body_case)));
    write_summary(f, summarize(ds));
  }

  for (const auto& ds : datasets) {
    for (const auto m : kAllMethods) {
      for (const bool filtered : {false, true}) {
        const auto report =
            evaluate_case(ds.samples, eval_config(run, m, filtered ? run.window : 1));
        result.rows.push_back({ds.body_case, m, filtered, report, filtered ? run.window : 1});
      }
    }
  }
  {
    auto f = open_out(run.out / "table_accuracy.csv");
    write_report_table(f, result.rows);
  }

  // Figure data uses the first present case for the single-case studies.
  const auto& lead = datasets.front();
  {
    auto f = open_out(run.out / "fig_window.csv");
    f << "case,method,window,mean,ci_lo,ci_hi,gain\n";
    for (const auto m : kAllMethods) {
      auto cfg = eval_config(run, m, 1);
      cfg.repeats = opts.sweep_repeats;
      const auto points = sweep_window(lead.samples, cfg, opts.windows);
      const auto raw = evaluate_case(lead.samples, cfg).mean;
      for (const auto& p : points) {
        f << fmt::format("{},{},{},{:.6f},{:.6f},{:.6f},{:.6f}\n", to_string(lead.body_case),
                         to_string(m), p.window, p.report.mean, p.report.ci_lo, p.report.ci_hi,
                         raw > 0.0 ? performance_gain(p.report.mean, raw) : 0.0);
      }
    }
  }
  {
    auto f = open_out(run.out / "fig_threshold.csv");
    f << "case,method,data,threshold_m,mean,ci_lo,ci_hi\n";
    for (const auto m : {Method::PL, Method::DT, Method::LDA}) {
      for (const bool filtered : {false, true}) {
        for (const auto t : opts.thresholds) {
          auto cfg = eval_config(run, m, filtered ? run.window : 1);
          cfg.repeats = opts.sweep_repeats;
          cfg.threshold_m = t;
          try {
            const auto r = evaluate_case(lead.samples, cfg);
            f << fmt::format("{},{},{},{},{:.6f},{:.6f},{:.6f}\n", to_string(lead.body_case),
                             to_string(m), filtered ? "filtered" : "raw", t, r.mean, r.ci_lo,
                             r.ci_hi);
          } catch (const DegenerateEvaluationError&) {
            warn << fmt::format("warning: threshold {} m leaves one class; skipped\n", t);
          }
        }
      }
    }
  }
  {
    auto cdf_file = open_out(run.out / "fig_cdf.csv");
    auto summary = open_out(run.out / "cdf_summary.csv");
    auto time_file = open_out(run.out / "fig_time.csv");
    cdf_file << "case,error_m,cdf\n";
    summary << "case,mae_m,p80_m\n";
    time_file << "case,duration_s,accuracy,contacts\n";
    for (const auto& ds : datasets) {
      const auto model = fit_case_model(ds.samples);
      const auto cdf = distance_error_cdf(ds.samples, model, run.window);
      for (const auto& [err, frac] : cdf.points) {
        cdf_file << fmt::format("{},{:.6f},{:.6f}\n", to_string(ds.body_case), err, frac);
      }
      summary << fmt::format("{},{:.6f},{:.6f}\n", to_string(ds.body_case), cdf.mae,
                             cdf.quantile(0.8));
      for (const auto& p : accuracy_over_time(ds.samples, model, run.threshold_m, opts.durations_s)) {
        time_file << fmt::format("{},{},{:.6f},{}\n", to_string(ds.body_case), p.duration_s,
                                 p.accuracy, p.contacts);
      }
    }
  }

  out << fmt::format("cases={} rows={}\n", datasets.size(), result.rows.size());
  return result;
}

}  // namespace sct::app
