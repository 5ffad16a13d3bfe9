#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dpfit/benchdata.hpp"
#include "dpfit/error.hpp"
#include "dpfit/harness.hpp"
#include "dpfit/report.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kIoError = 2;
constexpr int kUnconverged = 3;

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw dpfit::IoError("cannot write " + path);
  out << text;
  if (!out) throw dpfit::IoError("failed writing " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw dpfit::IoError("cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private histogram measurement and postprocessing"};
  app.require_subcommand(1);

  std::string family;
  int k = 0;
  int dims = 1;
  long long d = 100;
  double eps = 1.0;
  std::string out_path;
  auto* gen = app.add_subcommand("gen-data", "Write a benchmark histogram as CSV");
  gen->add_option("--family", family, "level, stair, step, splitstairs or difficult")->required();
  gen->add_option("--k", k, "level or step height");
  gen->add_option("--dims", dims, "1 or 2");
  gen->add_option("--d", d, "cells of the difficult dataset");
  gen->add_option("--eps", eps, "epsilon of the difficult dataset");
  gen->add_option("--out", out_path, "output path")->required();

  std::string config_path;
  std::string format = "csv";
  int threads = 1;
  auto* run = app.add_subcommand("run", "Run a Monte-Carlo experiment");
  run->add_option("--config", config_path, "experiment config")->required();
  run->add_option("--out", out_path, "output path, - for stdout")->required();
  run->add_option("--format", format, "csv or md");
  run->add_option("--threads", threads, "worker threads, 0 for all cores");

  int trials = 1000;
  unsigned long long seed = 0;
  auto* demo = app.add_subcommand("demo-uncertainty", "Point-versus-sum error tradeoff demo");
  demo->add_option("--d", d, "number of cells")->required();
  demo->add_option("--eps", eps, "epsilon")->required();
  demo->add_option("--trials", trials, "trials")->required();
  demo->add_option("--seed", seed, "seed");
  demo->add_option("--threads", threads, "worker threads, 0 for all cores");

  std::string results_path;
  auto* report = app.add_subcommand("report", "Render a results CSV");
  report->add_option("--results", results_path, "results CSV")->required();
  report->add_option("--format", format, "md or csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*gen) {
      dpfit::DatasetSpec spec;
      switch (dpfit::parse_family(family)) {
        case dpfit::DatasetFamily::kLevel: spec = dpfit::DatasetSpec::level(k, dims); break;
        case dpfit::DatasetFamily::kStair: spec = dpfit::DatasetSpec::stair(dims); break;
        case dpfit::DatasetFamily::kStep: spec = dpfit::DatasetSpec::step(k, dims); break;
        case dpfit::DatasetFamily::kSplitStairs: spec = dpfit::DatasetSpec::split_stairs(dims); break;
        case dpfit::DatasetFamily::kDifficult: spec = dpfit::DatasetSpec::difficult(d, eps); break;
        case dpfit::DatasetFamily::kFile:
          throw dpfit::ConfigError("gen-data cannot generate a file dataset");
      }
      dpfit::write_histogram_file(out_path, dpfit::generate(spec));
      return kOk;
    }
    if (*run) {
      const auto fmt = dpfit::parse_table_format(format);
      const auto config = dpfit::load_config(config_path);
      const auto result = dpfit::run(config, threads);
      write_text(out_path, dpfit::emit_table(result.rows(), fmt));
      if (result.any_all_unconverged()) {
        std::cerr << "some algorithm converged on no trial\n";
        return kUnconverged;
      }
      return kOk;
    }
    if (*demo) {
      std::cout << dpfit::format_demo(dpfit::uncertainty_demo(d, eps, trials, seed, threads));
      return kOk;
    }
    if (*report) {
      const auto fmt = dpfit::parse_table_format(format);
      std::cout << dpfit::emit_table(dpfit::parse_csv(read_text(results_path)), fmt);
      return kOk;
    }
  } catch (const dpfit::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const dpfit::HistogramFileError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const dpfit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kOk;
}
