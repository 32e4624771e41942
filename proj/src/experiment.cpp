#include "oad/experiment.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <thread>

#include "oad/errors.hpp"

namespace oad {

std::string make_run_id(const RunMeta& meta) {
  std::string id(to_string(meta.mode));
  if (meta.mode == RunMode::online || (meta.mode == RunMode::offline && meta.strategy != "-")) {
    char rate[32];
    std::snprintf(rate, sizeof rate, "%g", meta.rate);
    id += "_" + meta.strategy + "_r" + rate;
  } else if (meta.mode == RunMode::offline) {
    char rate[32];
    std::snprintf(rate, sizeof rate, "%g", meta.rate);
    id += std::string("_r") + rate;
  }
  if (meta.teacher != "-") id += "_" + meta.teacher;
  id += "_s" + std::to_string(meta.seed);
  return id;
}

std::uint64_t run_seed(std::uint64_t master_seed, const std::string& run_id) {
  return mix_seed(master_seed, fnv1a(run_id));
}

namespace {

RunSpec finish_spec(const ExperimentConfig& cfg, RunMeta meta, OnlineConfig online) {
  meta.run_id = make_run_id(meta);
  online.mode = meta.mode;
  online.seed = run_seed(meta.seed, meta.run_id);
  if (meta.teacher != "-") online.teacher = cfg.teacher(meta.teacher);
  return {std::move(meta), online};
}

}  // namespace

RunSpec plan_single(const ExperimentConfig& cfg, RunMode mode, std::uint64_t master_seed) {
  RunMeta meta;
  meta.mode = mode;
  meta.seed = master_seed;
  meta.strategy = "-";
  meta.teacher = cfg.online.teacher.name();
  switch (mode) {
    case RunMode::online:
      meta.strategy = std::string(to_string(cfg.online.strategy));
      meta.rate = cfg.online.rate;
      break;
    case RunMode::baseline:
      meta.teacher = "-";
      break;
    case RunMode::continual:
      meta.rate = 1.0;
      break;
    case RunMode::offline:
      meta.strategy = std::string(to_string(cfg.online.strategy));
      meta.rate = cfg.online.rate;
      break;
  }
  return finish_spec(cfg, meta, cfg.online);
}

std::vector<RunSpec> plan_matrix(const ExperimentConfig& cfg, std::uint64_t master_seed) {
  std::vector<RunSpec> specs;
  specs.push_back(plan_single(cfg, RunMode::baseline, master_seed));
  specs.push_back(plan_single(cfg, RunMode::continual, master_seed));
  for (StrategyKind strategy : cfg.strategies) {
    for (double rate : cfg.rates) {
      for (const auto& teacher : cfg.teachers) {
        RunMeta meta;
        meta.mode = RunMode::online;
        meta.strategy = std::string(to_string(strategy));
        meta.rate = rate;
        meta.teacher = teacher;
        meta.seed = master_seed;
        OnlineConfig online = cfg.online;
        online.strategy = strategy;
        online.rate = rate;
        specs.push_back(finish_spec(cfg, meta, online));
      }
    }
  }
  return specs;
}

StudentModel pretrain_for_seed(const ExperimentConfig& cfg, std::uint64_t master_seed) {
  const StreamConfig stream = cfg.stream_for(master_seed);
  const std::uint64_t seed = derive_seed(master_seed, seed_tag::pretrain);
  const auto corpus = build_pretrain_corpus(stream, cfg.student.pretrain_size, seed);
  TrainRecipe recipe = cfg.online.recipe();
  recipe.epochs = cfg.student.pretrain_epochs;
  return pretrain_student(cfg.student_shape(), corpus, recipe, seed);
}

SeedContext prepare_seed(const ExperimentConfig& cfg, std::uint64_t master_seed) {
  return {build_stream(cfg.stream_for(master_seed)), pretrain_for_seed(cfg, master_seed)};
}

RunOutcome execute_run(const RunSpec& spec, const SeedContext& context) {
  RunOutcome outcome{spec, {}, {}, {}};
  try {
    switch (spec.meta.mode) {
      case RunMode::online:
        outcome.result = run_online(spec.online, context.stream, context.pretrained);
        break;
      case RunMode::baseline:
        outcome.result = run_baseline(spec.online, context.stream, context.pretrained);
        break;
      case RunMode::continual:
        outcome.result = run_continual(spec.online, context.stream, context.pretrained);
        break;
      case RunMode::offline:
        throw ConfigError("offline runs go through run_offline_sweep");
    }
    outcome.summary = summarize(spec.meta, outcome.result);
  } catch (const std::exception& e) {
    outcome.error = e.what();
  }
  return outcome;
}

void parallel_for(std::size_t count, std::size_t jobs,
                  const std::function<void(std::size_t)>& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  for (std::size_t j = 0; j < jobs; ++j) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  // Lowest index wins so the reported failure does not depend on timing.
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<RunOutcome> execute_runs(const std::vector<RunSpec>& specs,
                                     const std::map<std::uint64_t, SeedContext>& contexts,
                                     std::size_t jobs) {
  std::vector<RunOutcome> outcomes(specs.size());
  parallel_for(specs.size(), jobs, [&](std::size_t i) {
    auto it = contexts.find(specs[i].meta.seed);
    if (it == contexts.end()) {
      outcomes[i] = {specs[i], {}, {}, "no prepared context for seed"};
      return;
    }
    outcomes[i] = execute_run(specs[i], it->second);
  });
  return outcomes;
}

SummaryRow run_offline_cell(const ExperimentConfig& cfg, std::uint64_t master_seed,
                            const SeedContext& context, const OfflineCorpora& corpora,
                            const std::string& strategy, double rate) {
  RunMeta meta;
  meta.mode = RunMode::offline;
  meta.strategy = strategy;
  meta.rate = rate;
  meta.teacher = rate == 0.0 ? "-" : cfg.online.teacher.name();
  meta.seed = master_seed;
  meta.run_id = make_run_id(meta);
  OnlineConfig online = cfg.online;
  online.mode = RunMode::offline;
  online.seed = run_seed(master_seed, meta.run_id);
  const StrategyKind kind = strategy == "-" ? StrategyKind::uniform : parse_strategy(strategy);
  return summarize_offline(
      meta, run_offline(context.pretrained, corpora.train, corpora.test, rate, kind, online));
}

std::vector<SummaryRow> run_offline_sweep(const ExperimentConfig& cfg, std::uint64_t master_seed,
                                          const SeedContext& context, std::size_t jobs) {
  const OfflineCorpora corpora = make_offline_corpora(context.stream, cfg.offline_test_fraction);
  std::vector<std::pair<std::string, double>> cells{{"-", 0.0}};
  for (StrategyKind s : cfg.strategies) {
    for (double r : cfg.offline_rates) cells.emplace_back(std::string(to_string(s)), r);
  }
  cells.emplace_back("-", 1.0);

  std::vector<SummaryRow> rows(cells.size());
  parallel_for(cells.size(), jobs, [&](std::size_t i) {
    rows[i] = run_offline_cell(cfg, master_seed, context, corpora, cells[i].first, cells[i].second);
  });
  return rows;
}

}  // namespace oad
