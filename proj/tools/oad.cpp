#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "oad/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Online active distillation simulator"};
  app.require_subcommand(1);

  oad::cli::Options options;
  options.jobs = std::max(1u, std::thread::hardware_concurrency());

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", options.config, "JSON config file");
    sub->add_option("--seed", options.seed, "Master seed (overrides the config's seed list)");
    sub->add_option("--out", options.out, "Output directory");
    sub->add_flag("--svg", options.svg, "Also write an SVG series chart");
    sub->add_option("--strategy", options.strategy, "uniform | random | error | uncertainty");
    sub->add_option("--rate", options.rate, "Sampling rate in (0, 1]");
    sub->add_option("--teacher", options.teacher, "gt | noisy");
    sub->add_option("--windows", options.windows, "Stream length in windows");
    sub->add_option("--pretrained", options.pretrained, "Load the pre-trained student checkpoint");
    sub->add_option("--jobs", options.jobs, "Worker threads for independent runs");
  };
  for (const char* name : {"online", "continual", "baseline", "offline", "matrix"}) {
    add_common(app.add_subcommand(name));
  }
  app.add_subcommand("gradcheck", "Finite-difference check of the backward pass");

  CLI11_PARSE(app, argc, argv);
  options.command = app.get_subcommands().front()->get_name();
  return oad::cli::run(options, std::cout, std::cerr);
}
