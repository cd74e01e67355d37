#pragma once

#include <charconv>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "gpod/datasets.hpp"
#include "gpod/errors.hpp"
#include "gpod/extension.hpp"
#include "gpod/kernel_graph.hpp"
#include "gpod/metrics.hpp"
#include "gpod/model_io.hpp"
#include "gpod/pod.hpp"
#include "gpod/risk.hpp"
#include "gpod/spectra.hpp"

namespace gpod {

using json = nlohmann::json;

// Effective settings of a run. Keys in the JSON form match the CLI flags.
struct RunConfig {
  Variant variant = Variant::ncut;
  double sigma = 0.1;
  int k = 2;
  std::uint64_t seed = 0;
  double test_fraction = 0.2;  // 0 clusters the whole dataset without a held-out part
  int repeats = 4;
  double pod_tol = 1e-10;
  int pod_max_iter = 100;
  ScalingMode scaling = ScalingMode::inv_sqrt_lambda;
  double degenerate_threshold = 1e-8;

  std::string dataset = "moons";  // circles | moons | file
  std::string data_path;
  std::optional<int> label_column;
  char delimiter = ',';
  bool standardize = true;  // file data only
  int n = 400;              // generator size
  double noise = 0.05;
  double radius_ratio = 0.5;

  void validate() const {
    auto bad = [](const std::string& what) { fail(ErrorKind::config, what); };
    if (!(sigma > 0.0) || !std::isfinite(sigma)) bad("sigma must be positive");
    if (k < 1) bad("k must be at least 1");
    if (!(test_fraction >= 0.0 && test_fraction < 1.0)) bad("test-fraction must lie in [0, 1)");
    if (repeats < 1) bad("repeats must be at least 1");
    if (!(pod_tol > 0.0)) bad("pod-tol must be positive");
    if (pod_max_iter < 1) bad("pod-max-iter must be at least 1");
    if (!(degenerate_threshold >= 0.0)) bad("degenerate-threshold must be nonnegative");
    if (dataset != "circles" && dataset != "moons" && dataset != "file")
      bad("dataset must be circles, moons or file, got '" + dataset + "'");
    if (dataset == "file" && data_path.empty()) bad("dataset 'file' needs a data path");
    if (dataset != "file" && n < 2) bad("n must be at least 2");
    if (!(noise >= 0.0)) bad("noise must be nonnegative");
    if (!(radius_ratio > 0.0 && radius_ratio < 1.0)) bad("radius-ratio must lie in (0, 1)");
  }
};

inline json to_json(const RunConfig& c) {
  json j;
  j["variant"] = to_string(c.variant);
  j["sigma"] = c.sigma;
  j["k"] = c.k;
  j["seed"] = c.seed;
  j["test-fraction"] = c.test_fraction;
  j["repeats"] = c.repeats;
  j["pod-tol"] = c.pod_tol;
  j["pod-max-iter"] = c.pod_max_iter;
  j["scaling-mode"] = to_string(c.scaling);
  j["degenerate-threshold"] = c.degenerate_threshold;
  j["dataset"] = c.dataset;
  j["data"] = c.data_path;
  j["label-column"] = c.label_column ? json(*c.label_column) : json(nullptr);
  j["delimiter"] = std::string(1, c.delimiter);
  j["standardize"] = c.standardize;
  j["n"] = c.n;
  j["noise"] = c.noise;
  j["radius-ratio"] = c.radius_ratio;
  return j;
}

// Overlays the keys present in `j` onto `c`; unknown keys are rejected.
inline void apply_json(RunConfig& c, const json& j) {
  if (!j.is_object()) fail(ErrorKind::config, "config document must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "variant") c.variant = parse_variant(value.get<std::string>());
      else if (key == "sigma") c.sigma = value.get<double>();
      else if (key == "k") c.k = value.get<int>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "test-fraction") c.test_fraction = value.get<double>();
      else if (key == "repeats") c.repeats = value.get<int>();
      else if (key == "pod-tol") c.pod_tol = value.get<double>();
      else if (key == "pod-max-iter") c.pod_max_iter = value.get<int>();
      else if (key == "scaling-mode") c.scaling = parse_scaling(value.get<std::string>());
      else if (key == "degenerate-threshold") c.degenerate_threshold = value.get<double>();
      else if (key == "dataset") c.dataset = value.get<std::string>();
      else if (key == "data") c.data_path = value.get<std::string>();
      else if (key == "label-column") c.label_column = value.is_null() ? std::nullopt : std::optional<int>(value.get<int>());
      else if (key == "delimiter") {
        const auto s = value.get<std::string>();
        if (s.size() != 1) fail(ErrorKind::config, "delimiter must be a single character");
        c.delimiter = s[0];
      } else if (key == "standardize") c.standardize = value.get<bool>();
      else if (key == "n") c.n = value.get<int>();
      else if (key == "noise") c.noise = value.get<double>();
      else if (key == "radius-ratio") c.radius_ratio = value.get<double>();
      else fail(ErrorKind::config, "unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::config, std::string("bad config value: ") + e.what());
  }
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::config, "cannot read config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorKind::config, "config file " + path + " is not valid JSON: " + e.what());
  }
  RunConfig c;
  apply_json(c, j);
  return c;
}

// Independent per-purpose seeds derived from the base seed (splitmix64).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t repeat, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (repeat * 4 + stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline Dataset load_dataset(const RunConfig& c) {
  if (c.dataset == "circles") return make_circles(c.n, c.noise, c.radius_ratio, c.seed);
  if (c.dataset == "moons") return make_moons(c.n, c.noise, c.seed);
  return load_delimited(c.data_path, {c.label_column, c.delimiter, c.standardize});
}

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Runs `fn`, prefixing any library error with the stage name.
template <typename Fn>
auto in_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(stage) + ": " + e.what());
  }
}

inline json pod_json(const PodResult& r) {
  return {{"objective_trace", r.objective_trace},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"empty_cluster", r.empty_cluster}};
}

inline json metrics_json(const std::vector<int>& pred, const std::vector<int>& truth) {
  return {{"acc", accuracy(pred, truth)}, {"nmi", nmi(pred, truth)}};
}

inline json dataset_json(const Dataset& d) {
  json j = {{"name", d.name}, {"n", d.n()}, {"dimension", d.dimension()}, {"classes", d.num_classes()}};
  if (d.dimension() == 2) j["points"] = matrix_to_json(d.points);
  if (d.labels) j["labels"] = *d.labels;
  return j;
}

inline std::vector<int> as_vector(const std::vector<std::size_t>& v) { return {v.begin(), v.end()}; }

}  // namespace detail

// Result of clustering one training set: everything GPOD needs downstream.
struct TrainedClustering {
  WeightGraph graph;
  SpectralEmbedding embedding;
  RowNormalization normalized;
  PodResult pod;
  double graph_seconds = 0.0;
  double eigensolve_seconds = 0.0;
  double pod_seconds = 0.0;
};

inline TrainedClustering train_clustering(const Matrix& points, const KernelSpec& kernel, Variant variant, Index k,
                                          std::uint64_t pod_seed, const PodOptions& options) {
  TrainedClustering t;
  if (k > points.rows())
    fail(ErrorKind::size, "k = " + std::to_string(k) + " exceeds the " + std::to_string(points.rows()) +
                              " training points");
  detail::Stopwatch graph_clock;
  t.graph = detail::in_stage("graph build", [&] { return build_weight_graph(points, kernel); });
  t.graph_seconds = graph_clock.seconds();

  detail::Stopwatch eig_clock;
  const LaplacianKind kind = variant == Variant::ratiocut ? LaplacianKind::unnormalized : LaplacianKind::random_walk;
  t.embedding = detail::in_stage("eigensolve", [&] { return smallest_eigenpairs(laplacian(t.graph, kind), k); });
  t.eigensolve_seconds = eig_clock.seconds();

  detail::Stopwatch pod_clock;
  t.normalized = normalize_rows(t.embedding.vectors);
  t.pod = detail::in_stage("pod", [&] { return pod(t.normalized.rows, pod_seed, options); });
  t.pod_seconds = pod_clock.seconds();
  return t;
}

struct ClusterRun {
  json result;
  std::optional<ExtensionModel> model;           // from repeat 0
  std::vector<std::pair<std::size_t, int>> train_assignment;  // (dataset row, cluster), repeat 0
  std::vector<std::pair<std::size_t, int>> test_assignment;
};

// Full protocol: per repeat, split, cluster the training part, extend to the
// held-out part with GPOD, score both against labels when present.
inline ClusterRun run_cluster(const RunConfig& config) {
  config.validate();
  const Dataset data = detail::in_stage("data", [&] { return load_dataset(config); });
  const KernelSpec kernel = KernelSpec::gaussian(config.sigma);
  const PodOptions pod_options{config.pod_tol, config.pod_max_iter};
  const long eigensolves_before = eigensolve_count();

  ClusterRun run;
  json repeats = json::array();
  json timing_repeats = json::array();
  double sums[4] = {0.0, 0.0, 0.0, 0.0};  // train acc, train nmi, test acc, test nmi
  const bool labelled = data.labels.has_value();
  const bool held_out = config.test_fraction > 0.0;

  for (int r = 0; r < config.repeats; ++r) {
    const std::uint64_t split_seed = derive_seed(config.seed, static_cast<std::uint64_t>(r), 0);
    const std::uint64_t pod_seed = derive_seed(config.seed, static_cast<std::uint64_t>(r), 1);
    Split split;
    if (held_out) {
      split = detail::in_stage("split", [&] { return train_test_split(data, config.test_fraction, split_seed); });
    } else {
      split.train = data;
      split.train_indices.resize(static_cast<std::size_t>(data.n()));
      std::iota(split.train_indices.begin(), split.train_indices.end(), std::size_t{0});
    }

    TrainedClustering trained =
        train_clustering(split.train.points, kernel, config.variant, config.k, pod_seed, pod_options);
    json rep;
    rep["repeat"] = r;
    rep["split_seed"] = split_seed;
    rep["pod_seed"] = pod_seed;
    rep["eigenvalues"] = std::vector<double>(trained.embedding.eigenvalues.data(),
                                             trained.embedding.eigenvalues.data() + trained.embedding.eigenvalues.size());
    const RiskReport risk = risk_report(trained.graph, trained.embedding, trained.pod.assignment,
                                        trained.normalized.rows, trained.pod.rotation);
    rep["risk"] = {{"empirical_error", risk.empirical_error},
                   {"eigen_sum_scaled", risk.eigen_sum_scaled},
                   {"discretization_gap", risk.discretization_gap},
                   {"per_cluster_gap", std::vector<double>(risk.per_cluster_gap.data(),
                                                           risk.per_cluster_gap.data() + risk.per_cluster_gap.size())}};
    rep["train"] = {{"indices", detail::as_vector(split.train_indices)},
                    {"assignment", trained.pod.assignment.cluster_of},
                    {"zero_rows", trained.normalized.zero_rows},
                    {"pod", detail::pod_json(trained.pod)}};
    if (labelled) {
      rep["train"]["metrics"] = detail::metrics_json(trained.pod.assignment.cluster_of, *split.train.labels);
      sums[0] += rep["train"]["metrics"]["acc"].get<double>();
      sums[1] += rep["train"]["metrics"]["nmi"].get<double>();
    }

    ExtensionModel model = fit_extension(trained.embedding, split.train.points, kernel,
                                         {config.variant, config.scaling, config.degenerate_threshold});
    double extension_seconds = 0.0;
    if (held_out) {
      detail::Stopwatch clock;
      const std::uint64_t gpod_seed = derive_seed(config.seed, static_cast<std::uint64_t>(r), 2);
      const GpodResult g = detail::in_stage("extension", [&] { return gpod(model, split.test.points, gpod_seed, pod_options); });
      extension_seconds = clock.seconds();
      rep["test"] = {{"indices", detail::as_vector(split.test_indices)},
                     {"assignment", g.pod.assignment.cluster_of},
                     {"zero_rows", g.zero_rows},
                     {"degenerate_columns", g.extension.degenerate_columns},
                     {"pod", detail::pod_json(g.pod)}};
      if (labelled) {
        rep["test"]["metrics"] = detail::metrics_json(g.pod.assignment.cluster_of, *split.test.labels);
        sums[2] += rep["test"]["metrics"]["acc"].get<double>();
        sums[3] += rep["test"]["metrics"]["nmi"].get<double>();
      }
      if (r == 0)
        for (std::size_t i = 0; i < split.test_indices.size(); ++i)
          run.test_assignment.emplace_back(split.test_indices[i], g.pod.assignment.cluster_of[i]);
    }
    if (r == 0) {
      for (std::size_t i = 0; i < split.train_indices.size(); ++i)
        run.train_assignment.emplace_back(split.train_indices[i], trained.pod.assignment.cluster_of[i]);
      run.model = std::move(model);
    }
    timing_repeats.push_back({{"graph_build", trained.graph_seconds},
                              {"eigensolve", trained.eigensolve_seconds},
                              {"pod", trained.pod_seconds},
                              {"extension", extension_seconds}});
    repeats.push_back(std::move(rep));
  }

  json& out = run.result;
  out["command"] = "cluster";
  out["config"] = to_json(config);
  out["dataset"] = detail::dataset_json(data);
  out["repeats"] = std::move(repeats);
  out["eigensolves"] = eigensolve_count() - eigensolves_before;
  if (labelled) {
    const double reps = static_cast<double>(config.repeats);
    out["metrics"]["train"] = {{"acc", sums[0] / reps}, {"nmi", sums[1] / reps}};
    if (held_out) out["metrics"]["test"] = {{"acc", sums[2] / reps}, {"nmi", sums[3] / reps}};
  }
  json totals = {{"graph_build", 0.0}, {"eigensolve", 0.0}, {"pod", 0.0}, {"extension", 0.0}};
  for (const auto& t : timing_repeats)
    for (auto& [key, value] : totals.items()) value = value.get<double>() + t.at(key).get<double>();
  out["timings"] = {{"total", totals}, {"per_repeat", std::move(timing_repeats)}};
  return run;
}

enum class Subset { all, train, test };

inline Subset parse_subset(const std::string& s) {
  if (s == "all") return Subset::all;
  if (s == "train") return Subset::train;
  if (s == "test") return Subset::test;
  fail(ErrorKind::config, "subset must be all, train or test, got '" + s + "'");
}

// Clusters new points with a saved model. No eigensolve happens; the result
// records the solver count to show it.
inline json run_extend(const ExtensionModel& model, const RunConfig& config, Subset subset = Subset::all) {
  config.validate();
  Dataset data = detail::in_stage("data", [&] { return load_dataset(config); });
  if (subset != Subset::all) {
    if (!(config.test_fraction > 0.0)) fail(ErrorKind::config, "train/test subsets need a positive test-fraction");
    Split split = train_test_split(data, config.test_fraction, derive_seed(config.seed, 0, 0));
    data = subset == Subset::train ? std::move(split.train) : std::move(split.test);
  }
  if (data.dimension() != model.dimension())
    fail(ErrorKind::input, "new data has dimension " + std::to_string(data.dimension()) +
                               " but the model expects dimension " + std::to_string(model.dimension()));

  const long eigensolves_before = eigensolve_count();
  detail::Stopwatch clock;
  const GpodResult g = detail::in_stage(
      "extension", [&] { return gpod(model, data.points, derive_seed(config.seed, 0, 2), {config.pod_tol, config.pod_max_iter}); });
  const double seconds = clock.seconds();

  json out;
  out["command"] = "extend";
  out["config"] = to_json(config);
  out["model"] = {{"variant", to_string(model.variant)},
                  {"train_points", model.n()},
                  {"k", model.k()},
                  {"sigma", model.kernel.sigma},
                  {"scaling_mode", to_string(model.scaling)}};
  out["dataset"] = detail::dataset_json(data);
  out["assignment"] = g.pod.assignment.cluster_of;
  out["pod"] = detail::pod_json(g.pod);
  out["zero_rows"] = g.zero_rows;
  out["degenerate_columns"] = g.extension.degenerate_columns;
  out["eigensolves"] = eigensolve_count() - eigensolves_before;
  if (data.labels) out["metrics"] = detail::metrics_json(g.pod.assignment.cluster_of, *data.labels);
  out["timings"] = {{"extension", seconds}};
  return out;
}

// One label per line; a non-integer first line is skipped as a header.
inline std::vector<int> read_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::input, "cannot open label file " + path);
  std::vector<int> labels;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto field = detail::trim(line);
    if (field.empty()) continue;
    int value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
      if (line_no == 1) continue;
      fail(ErrorKind::input, path + ":" + std::to_string(line_no) + ": not an integer label: '" + std::string(field) + "'");
    }
    labels.push_back(value);
  }
  return labels;
}

inline json run_eval(const std::vector<int>& pred, const std::vector<int>& truth) {
  return {{"n", pred.size()}, {"acc", accuracy(pred, truth)}, {"nmi", nmi(pred, truth)}};
}

struct BenchRow {
  Index n = 0;
  Index m = 0;
  double full_seconds = 0.0;
  int full_iterations = 0;
  double train_seconds = 0.0;
  double extend_seconds = 0.0;
  int extend_iterations = 0;
  long extend_eigensolves = 0;
};

// For each (n, m): (a) cluster all n + m points from scratch, (b) cluster
// n points and extend to the other m with GPOD.
inline std::vector<BenchRow> run_bench(const RunConfig& config, const std::vector<std::pair<Index, Index>>& sizes) {
  config.validate();
  const KernelSpec kernel = KernelSpec::gaussian(config.sigma);
  const PodOptions options{config.pod_tol, config.pod_max_iter};
  std::vector<BenchRow> rows;
  for (const auto& [n, m] : sizes) {
    if (n < 2 || m < 1) fail(ErrorKind::size, "bench sizes need n >= 2 and m >= 1");
    RunConfig sized = config;
    if (config.dataset != "file") sized.n = static_cast<int>(n + m);
    const Dataset data = load_dataset(sized);
    if (data.n() < n + m)
      fail(ErrorKind::size, "dataset has " + std::to_string(data.n()) + " points, bench needs " + std::to_string(n + m));
    Rng rng(derive_seed(config.seed, 0, 0));
    std::vector<std::size_t> perm = rng.permutation(static_cast<std::size_t>(data.n()));
    const std::vector<std::size_t> all(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n + m));
    const std::vector<std::size_t> head(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n));
    const std::vector<std::size_t> tail(perm.begin() + static_cast<std::ptrdiff_t>(n), perm.begin() + static_cast<std::ptrdiff_t>(n + m));
    const Dataset full = data.subset(all, "full");
    const Dataset train = data.subset(head, "train");
    const Dataset fresh = data.subset(tail, "new");
    const std::uint64_t pod_seed = derive_seed(config.seed, 0, 1);

    BenchRow row{n, m};
    detail::Stopwatch full_clock;
    const TrainedClustering everything = train_clustering(full.points, kernel, config.variant, config.k, pod_seed, options);
    row.full_seconds = full_clock.seconds();
    row.full_iterations = everything.pod.iterations;

    detail::Stopwatch train_clock;
    const TrainedClustering trained = train_clustering(train.points, kernel, config.variant, config.k, pod_seed, options);
    const ExtensionModel model =
        fit_extension(trained.embedding, train.points, kernel, {config.variant, config.scaling, config.degenerate_threshold});
    row.train_seconds = train_clock.seconds();

    const long before = eigensolve_count();
    detail::Stopwatch extend_clock;
    const GpodResult g = gpod(model, fresh.points, derive_seed(config.seed, 0, 2), options);
    row.extend_seconds = extend_clock.seconds();
    row.extend_iterations = g.pod.iterations;
    row.extend_eigensolves = eigensolve_count() - before;
    rows.push_back(row);
  }
  return rows;
}

inline std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::string out = "n,m,full_seconds,full_iterations,train_seconds,extend_seconds,extend_iterations,extend_eigensolves\n";
  for (const auto& r : rows)
    out += std::to_string(r.n) + "," + std::to_string(r.m) + "," + detail::format_double(r.full_seconds) + "," +
           std::to_string(r.full_iterations) + "," + detail::format_double(r.train_seconds) + "," +
           detail::format_double(r.extend_seconds) + "," + std::to_string(r.extend_iterations) + "," +
           std::to_string(r.extend_eigensolves) + "\n";
  return out;
}

struct PlotFiles {
  std::optional<std::filesystem::path> points;  // absent for non-2-d data
  std::vector<std::filesystem::path> traces;
  std::string notice;
};

// Emits the CSV data behind scatter and convergence plots for a result
// document written by `cluster` or `extend`.
inline PlotFiles run_plotdata(const json& result, const std::filesystem::path& out_dir) {
  PlotFiles files;
  std::filesystem::create_directories(out_dir);
  auto write_trace = [&](const std::string& name, const json& pod) {
    const auto path = out_dir / name;
    std::ofstream out(path);
    if (!out) fail(ErrorKind::input, "cannot write " + path.string());
    out << "iteration,objective\n";
    const auto trace = pod.at("objective_trace").get<std::vector<double>>();
    for (std::size_t i = 0; i < trace.size(); ++i) out << i + 1 << ',' << detail::format_double(trace[i]) << '\n';
    files.traces.push_back(path);
  };

  try {
    const std::string command = result.at("command").get<std::string>();
    const json& dataset = result.at("dataset");
    std::vector<int> cluster(dataset.at("n").get<std::size_t>(), -1);
    std::vector<std::string> split(cluster.size(), "all");
    if (command == "cluster") {
      for (const auto& rep : result.at("repeats")) {
        const int r = rep.at("repeat").get<int>();
        write_trace("trace_train_r" + std::to_string(r) + ".csv", rep.at("train").at("pod"));
        if (rep.contains("test")) write_trace("trace_test_r" + std::to_string(r) + ".csv", rep.at("test").at("pod"));
      }
      const json& first = result.at("repeats").at(0);
      for (const char* part : {"train", "test"}) {
        if (!first.contains(part)) continue;
        const auto idx = first.at(part).at("indices").get<std::vector<std::size_t>>();
        const auto lab = first.at(part).at("assignment").get<std::vector<int>>();
        for (std::size_t i = 0; i < idx.size(); ++i) {
          cluster.at(idx[i]) = lab[i];
          split.at(idx[i]) = part;
        }
      }
    } else if (command == "extend") {
      write_trace("trace_extend.csv", result.at("pod"));
      cluster = result.at("assignment").get<std::vector<int>>();
    } else {
      fail(ErrorKind::config, "plotdata needs a cluster or extend result, got '" + command + "'");
    }

    if (dataset.at("dimension").get<int>() == 2 && dataset.contains("points")) {
      const auto path = out_dir / "points.csv";
      std::ofstream out(path);
      if (!out) fail(ErrorKind::input, "cannot write " + path.string());
      out << "x,y,split,cluster\n";
      const json& points = dataset.at("points");
      for (std::size_t i = 0; i < points.size(); ++i)
        out << detail::format_double(points[i][0].get<double>()) << ',' << detail::format_double(points[i][1].get<double>())
            << ',' << split[i] << ',' << cluster[i] << '\n';
      files.points = path;
    } else {
      files.notice = "data is " + std::to_string(dataset.at("dimension").get<int>()) +
                     "-dimensional; points CSV skipped (traces written)";
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::input, std::string("malformed result document: ") + e.what());
  }
  return files;
}

// Result document without wall-clock fields, for reproducibility checks.
inline json without_timings(json doc) {
  doc.erase("timings");
  return doc;
}

}  // namespace gpod
