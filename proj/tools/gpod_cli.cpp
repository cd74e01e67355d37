// gpod: spectral clustering with out-of-sample extension.
//
//   gpod cluster  [run flags] --out result.json [--assignments a.csv] [--model-out model.json]
//   gpod extend   --model model.json [run flags] [--subset all|train|test] --out result.json
//   gpod eval     --pred pred.csv --truth truth.csv
//   gpod bench    [run flags] --size 1000x100 --size 1500x150 [--out bench.csv]
//   gpod plotdata --result result.json --out-dir plots/
//
// Exit codes: 0 success, 1 usage/config error, 2 data error, 3 numerical error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gpod/pipeline.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

int exit_code(gpod::ErrorKind kind) {
  switch (kind) {
    case gpod::ErrorKind::config:
    case gpod::ErrorKind::parameter: return kExitUsage;
    case gpod::ErrorKind::input:
    case gpod::ErrorKind::size: return kExitData;
    case gpod::ErrorKind::degenerate_graph:
    case gpod::ErrorKind::numerical: return kExitNumerical;
  }
  return kExitUsage;
}

// Flags mirroring RunConfig. Only flags given on the command line override
// the config file (or the defaults).
struct RunFlags {
  std::string config_path;
  std::string variant, scaling, dataset, data, delimiter;
  double sigma = 0, test_fraction = 0, pod_tol = 0, degenerate_threshold = 0, noise = 0, radius_ratio = 0;
  int k = 0, repeats = 0, pod_max_iter = 0, n = 0, label_column = 0;
  std::uint64_t seed = 0;
  bool standardize = true;
  std::vector<std::pair<std::string, CLI::Option*>> options;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON config file (flat keys matching the flags)");
    auto add = [&](const std::string& key, auto& target, const std::string& help) {
      options.emplace_back(key, app->add_option("--" + key, target, help));
    };
    add("variant", variant, "ratiocut or ncut");
    add("sigma", sigma, "Gaussian kernel bandwidth");
    add("k", k, "number of clusters");
    add("seed", seed, "base random seed");
    add("test-fraction", test_fraction, "held-out fraction per repeat (0 = no split)");
    add("repeats", repeats, "number of repeats");
    add("pod-tol", pod_tol, "POD stopping tolerance");
    add("pod-max-iter", pod_max_iter, "POD iteration cap");
    add("scaling-mode", scaling, "RatioCut extension scaling: inv-sqrt-lambda or inv-lambda");
    add("degenerate-threshold", degenerate_threshold, "eigenvalue threshold for constant extension columns");
    add("dataset", dataset, "circles, moons or file");
    add("data", data, "path of a delimited data file (dataset=file)");
    add("label-column", label_column, "label column index (negative counts from the end)");
    add("delimiter", delimiter, "field delimiter of the data file");
    add("n", n, "generator sample count");
    add("noise", noise, "generator noise standard deviation");
    add("radius-ratio", radius_ratio, "inner circle radius");
    options.emplace_back("standardize", app->add_option("--standardize", standardize, "z-score file features (true/false)"));
  }

  gpod::RunConfig resolve() const {
    gpod::RunConfig config = config_path.empty() ? gpod::RunConfig{} : gpod::load_config(config_path);
    gpod::json overrides = gpod::json::object();
    for (const auto& [key, option] : options) {
      if (option->count() == 0) continue;
      if (key == "variant") overrides[key] = variant;
      else if (key == "sigma") overrides[key] = sigma;
      else if (key == "k") overrides[key] = k;
      else if (key == "seed") overrides[key] = seed;
      else if (key == "test-fraction") overrides[key] = test_fraction;
      else if (key == "repeats") overrides[key] = repeats;
      else if (key == "pod-tol") overrides[key] = pod_tol;
      else if (key == "pod-max-iter") overrides[key] = pod_max_iter;
      else if (key == "scaling-mode") overrides[key] = scaling;
      else if (key == "degenerate-threshold") overrides[key] = degenerate_threshold;
      else if (key == "dataset") overrides[key] = dataset;
      else if (key == "data") overrides[key] = data;
      else if (key == "label-column") overrides[key] = label_column;
      else if (key == "delimiter") overrides[key] = delimiter;
      else if (key == "n") overrides[key] = n;
      else if (key == "noise") overrides[key] = noise;
      else if (key == "radius-ratio") overrides[key] = radius_ratio;
      else if (key == "standardize") overrides[key] = standardize;
    }
    if (overrides.contains("data") && !overrides.contains("dataset")) overrides["dataset"] = "file";
    gpod::apply_json(config, overrides);
    config.validate();
    return config;
  }
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) gpod::fail(gpod::ErrorKind::input, "cannot write " + path);
  out << text;
}

void write_assignments(const std::string& path, const gpod::ClusterRun& run) {
  std::string text = "index,split,cluster\n";
  for (const auto& [row, cluster] : run.train_assignment)
    text += std::to_string(row) + ",train," + std::to_string(cluster) + "\n";
  for (const auto& [row, cluster] : run.test_assignment)
    text += std::to_string(row) + ",test," + std::to_string(cluster) + "\n";
  write_text(path, text);
}

std::pair<gpod::Index, gpod::Index> parse_size(const std::string& s) {
  const auto x = s.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(s);
    return {std::stol(s.substr(0, x)), std::stol(s.substr(x + 1))};
  } catch (const std::exception&) {
    gpod::fail(gpod::ErrorKind::config, "size must look like NxM, got '" + s + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral clustering (relaxed RatioCut / NCut) with POD discretization and out-of-sample GPOD"};
  app.require_subcommand(1);

  RunFlags cluster_flags;
  std::string cluster_out, cluster_assignments, cluster_model_out;
  auto* cluster = app.add_subcommand("cluster", "cluster a dataset and extend to its held-out split");
  cluster_flags.attach(cluster);
  cluster->add_option("--out", cluster_out, "result JSON path ('-' for stdout)")->default_val("-");
  cluster->add_option("--assignments", cluster_assignments, "assignment CSV path (repeat 0)");
  cluster->add_option("--model-out", cluster_model_out, "write the repeat-0 extension model here");

  RunFlags extend_flags;
  std::string extend_model, extend_out, extend_subset = "all";
  auto* extend = app.add_subcommand("extend", "cluster new points with a saved extension model");
  extend_flags.attach(extend);
  extend->add_option("--model", extend_model, "extension model JSON")->required();
  extend->add_option("--subset", extend_subset, "which part of the configured dataset to cluster: all, train, test");
  extend->add_option("--out", extend_out, "result JSON path ('-' for stdout)")->default_val("-");

  std::string eval_pred, eval_truth;
  auto* eval = app.add_subcommand("eval", "ACC and NMI between two label files");
  eval->add_option("--pred", eval_pred, "predicted labels, one per line")->required();
  eval->add_option("--truth", eval_truth, "true labels, one per line")->required();

  RunFlags bench_flags;
  std::vector<std::string> bench_sizes;
  std::string bench_out;
  auto* bench = app.add_subcommand("bench", "time full re-clustering against train + extension");
  bench_flags.attach(bench);
  bench->add_option("--size", bench_sizes, "NxM pair (repeatable)");
  bench->add_option("--out", bench_out, "CSV path ('-' for stdout)")->default_val("-");

  std::string plot_result, plot_dir;
  auto* plotdata = app.add_subcommand("plotdata", "emit point and convergence CSVs from a result JSON");
  plotdata->add_option("--result", plot_result, "result JSON from cluster or extend")->required();
  plotdata->add_option("--out-dir", plot_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*cluster) {
      const gpod::RunConfig config = cluster_flags.resolve();
      const gpod::ClusterRun run = gpod::run_cluster(config);
      write_text(cluster_out, run.result.dump(2) + "\n");
      if (!cluster_assignments.empty()) write_assignments(cluster_assignments, run);
      if (!cluster_model_out.empty() && run.model) gpod::save_model(*run.model, cluster_model_out);
    } else if (*extend) {
      const gpod::RunConfig config = extend_flags.resolve();
      const gpod::ExtensionModel model = gpod::load_model(extend_model);
      const gpod::json result = gpod::run_extend(model, config, gpod::parse_subset(extend_subset));
      write_text(extend_out, result.dump(2) + "\n");
    } else if (*eval) {
      const auto pred = gpod::read_labels(eval_pred);
      const auto truth = gpod::read_labels(eval_truth);
      std::cout << gpod::run_eval(pred, truth).dump(2) << "\n";
    } else if (*bench) {
      const gpod::RunConfig config = bench_flags.resolve();
      std::vector<std::pair<gpod::Index, gpod::Index>> sizes;
      for (const auto& s : bench_sizes) sizes.push_back(parse_size(s));
      write_text(bench_out, gpod::bench_csv(gpod::run_bench(config, sizes)));
    } else if (*plotdata) {
      std::ifstream in(plot_result);
      if (!in) gpod::fail(gpod::ErrorKind::input, "cannot read " + plot_result);
      gpod::json doc;
      try {
        in >> doc;
      } catch (const gpod::json::exception& e) {
        gpod::fail(gpod::ErrorKind::input, plot_result + " is not valid JSON: " + e.what());
      }
      const gpod::PlotFiles files = gpod::run_plotdata(doc, plot_dir);
      if (files.points) std::cout << files.points->string() << "\n";
      for (const auto& t : files.traces) std::cout << t.string() << "\n";
      if (!files.notice.empty()) std::cerr << "notice: " << files.notice << "\n";
    }
  } catch (const gpod::Error& e) {
    std::cerr << "gpod: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "gpod: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
