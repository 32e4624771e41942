#include "oad/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>

#include "oad/errors.hpp"
#include "oad/experiment.hpp"
#include "oad/report.hpp"

namespace oad::cli {

namespace fs = std::filesystem;

void apply_window_override(ExperimentConfig& cfg, std::size_t windows) {
  if (windows < 1) throw ConfigError("--windows must be >= 1");
  const std::size_t total = windows * cfg.online.window_frames;
  auto& s = cfg.stream;
  if (total > s.activities * s.frames_per_activity) {
    s.frames_per_activity = (total + s.activities - 1) / s.activities;
  }
  s.frame_limit = total;
}

ExperimentConfig resolve_config(const Options& options) {
  ExperimentConfig cfg = options.config ? parse_config(*options.config) : ExperimentConfig{};
  if (options.seed) cfg.seeds = {*options.seed};
  if (options.out) cfg.output_dir = *options.out;
  if (options.strategy) {
    cfg.online.strategy = parse_strategy(*options.strategy);
    cfg.strategies = {cfg.online.strategy};
  }
  if (options.rate) {
    if (options.command != "offline" && !(*options.rate > 0.0 && *options.rate <= 1.0)) {
      throw ConfigError("--rate must lie in (0, 1]");
    }
    if (*options.rate > 0.0) cfg.online.rate = *options.rate;
    cfg.rates = {*options.rate};
  }
  if (options.teacher) {
    cfg.online.teacher = cfg.teacher(*options.teacher);
    cfg.teachers = {*options.teacher};
  }
  if (options.windows) apply_window_override(cfg, *options.windows);
  return cfg;
}

namespace {

SeedContext context_for(const ExperimentConfig& cfg, std::uint64_t seed, const Options& options) {
  if (!options.pretrained) return prepare_seed(cfg, seed);
  std::ifstream in(*options.pretrained);
  if (!in) throw IoError("cannot read checkpoint '" + options.pretrained->string() + "'");
  SeedContext ctx{build_stream(cfg.stream_for(seed)), load_checkpoint(in)};
  require(ctx.pretrained.input_dim() == cfg.stream.feature_dim &&
              ctx.pretrained.joints == cfg.stream.joints,
          "checkpoint does not fit the configured stream");
  return ctx;
}

void save_pretrained(const SeedContext& ctx, const fs::path& dir, std::uint64_t seed) {
  const fs::path path = dir / ("pretrained_s" + std::to_string(seed) + ".ckpt");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  save_checkpoint(ctx.pretrained, out);
}

void print_row(const SummaryRow& row, std::ostream& out) {
  std::vector<SummaryRow> rows{row};
  write_summary_csv(rows, out);
}

std::vector<ReferenceLine> references_for(const ExperimentConfig& cfg, double baseline_mpjpe) {
  std::vector<ReferenceLine> refs{{"baseline", baseline_mpjpe}};
  for (const auto& t : cfg.teachers) {
    if (t == "noisy") refs.push_back({"teacher", cfg.noisy_teacher_mpjpe_px});
  }
  return refs;
}

}  // namespace

int cmd_single(const ExperimentConfig& cfg, RunMode mode, const Options& options,
               std::ostream& out) {
  const std::uint64_t seed = cfg.seeds.front();
  fs::create_directories(cfg.output_dir);
  const SeedContext ctx = context_for(cfg, seed, options);
  save_pretrained(ctx, cfg.output_dir, seed);

  const RunSpec spec = plan_single(cfg, mode, seed);
  RunOutcome outcome = execute_run(spec, ctx);
  if (!outcome.error.empty()) throw std::runtime_error(outcome.error);

  write_window_csv(spec.meta, outcome.result.records, cfg.output_dir / (spec.meta.run_id + ".csv"));
  std::vector<SummaryRow> rows{outcome.summary};
  write_summary_files(rows, cfg.output_dir, "summary");
  if (options.svg) {
    std::vector<SeriesRun> series{{spec.meta.run_id, outcome.summary.window_mpjpe_px}};
    const auto bounds = boundary_windows(outcome.result.records);
    const auto refs = references_for(cfg, outcome.summary.window_mpjpe_px.front());
    render_series_svg(series, bounds, refs, cfg.output_dir / (spec.meta.run_id + ".svg"));
  }
  print_row(outcome.summary, out);
  return 0;
}

int cmd_offline(const ExperimentConfig& cfg, const Options& options, std::ostream& out) {
  fs::create_directories(cfg.output_dir);
  std::vector<SummaryRow> rows;
  for (std::uint64_t seed : cfg.seeds) {
    const SeedContext ctx = context_for(cfg, seed, options);
    save_pretrained(ctx, cfg.output_dir, seed);
    if (options.strategy && options.rate) {
      // Single cell plus its 0% reference.
      const auto corpora = make_offline_corpora(ctx.stream, cfg.offline_test_fraction);
      rows.push_back(run_offline_cell(cfg, seed, ctx, corpora, "-", 0.0));
      if (*options.rate > 0.0) {
        rows.push_back(run_offline_cell(cfg, seed, ctx, corpora, *options.strategy, *options.rate));
      }
    } else {
      auto sweep = run_offline_sweep(cfg, seed, ctx, options.jobs);
      rows.insert(rows.end(), sweep.begin(), sweep.end());
    }
  }
  write_summary_files(rows, cfg.output_dir, "offline_summary");
  write_summary_csv(rows, out);
  return 0;
}

int cmd_matrix(const ExperimentConfig& cfg, const Options& options, std::ostream& out,
               std::ostream& err) {
  fs::create_directories(cfg.output_dir);
  std::map<std::uint64_t, SeedContext> contexts;
  {
    std::vector<std::optional<SeedContext>> prepared(cfg.seeds.size());
    parallel_for(cfg.seeds.size(), options.jobs,
                 [&](std::size_t i) { prepared[i] = context_for(cfg, cfg.seeds[i], options); });
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
      save_pretrained(*prepared[i], cfg.output_dir, cfg.seeds[i]);
      contexts.emplace(cfg.seeds[i], std::move(*prepared[i]));
    }
  }

  std::vector<RunSpec> specs;
  for (std::uint64_t seed : cfg.seeds) {
    auto plan = plan_matrix(cfg, seed);
    specs.insert(specs.end(), plan.begin(), plan.end());
  }
  const auto outcomes = execute_runs(specs, contexts, options.jobs);

  std::vector<SummaryRow> rows;
  std::vector<SeriesRun> series;
  std::vector<std::size_t> bounds;
  double baseline_mpjpe = 0.0;
  std::vector<std::string> failures;
  for (const auto& o : outcomes) {
    if (!o.error.empty()) {
      failures.push_back(o.spec.meta.run_id + ": " + o.error);
      continue;
    }
    write_window_csv(o.spec.meta, o.result.records, cfg.output_dir / (o.spec.meta.run_id + ".csv"));
    rows.push_back(o.summary);
    series.push_back({o.spec.meta.run_id, o.summary.window_mpjpe_px});
    if (o.spec.meta.mode == RunMode::baseline && bounds.empty()) {
      bounds = boundary_windows(o.result.records);
      baseline_mpjpe = o.summary.overall_mpjpe_px;
    }
  }
  write_summary_files(rows, cfg.output_dir, "summary");
  if (!series.empty()) {
    render_series_svg(series, bounds, references_for(cfg, baseline_mpjpe),
                      cfg.output_dir / "series.svg");
  }
  write_summary_csv(rows, out);

  if (!failures.empty()) {
    std::ofstream manifest(cfg.output_dir / "failures.txt", std::ios::binary);
    for (const auto& f : failures) {
      manifest << f << '\n';
      err << "run failed: " << f << '\n';
    }
    return 1;
  }
  return 0;
}

int cmd_gradcheck(std::ostream& out, const numkit::GradientFn& gradient) {
  const auto fixtures = numkit::gradcheck_fixtures();
  const double worst = numkit::gradcheck_suite(fixtures, 1e-4, gradient);
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.3e", worst);
  const bool ok = worst < kGradcheckTolerance;
  out << "gradcheck: " << fixtures.size() << " fixtures, max relative error " << buf << " ("
      << (ok ? "ok" : "FAILED") << ", tolerance 1e-4)\n";
  return ok ? 0 : 1;
}

int run(const Options& options, std::ostream& out, std::ostream& err) {
  try {
    if (options.command == "gradcheck") return cmd_gradcheck(out);
    const ExperimentConfig cfg = resolve_config(options);
    if (options.command == "matrix") return cmd_matrix(cfg, options, out, err);
    if (options.command == "offline") return cmd_offline(cfg, options, out);
    const RunMode mode = parse_mode(options.command);
    return cmd_single(cfg, mode, options, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace oad::cli
