#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>

#include "output.hpp"
#include "rtw/barycenter.hpp"
#include "rtw/datasets.hpp"
#include "rtw/dtw.hpp"
#include "rtw/metrics.hpp"
#include "rtw/signal_io.hpp"
#include "rtw/spd.hpp"
#include "rtw/stats.hpp"
#include "svg.hpp"

namespace rtw::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr double kPi = std::numbers::pi;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path prepare_out(const std::string& out) {
  if (out.empty()) throw ModuleError("cli", Error(ErrorCode::kBadConfig, "--out is required"));
  in_module("cli", [&] { ensure_dir(out); });
  return out;
}

void write_run(const fs::path& dir, const Common& c, const std::string& sub, json config, json extra = json::object()) {
  json j{{"tool", "rtw"},
         {"version", kVersion},
         {"subcommand", sub},
         {"command", c.command_line},
         {"seed", c.seed},
         {"emit_plots", c.emit_plots},
         {"config", std::move(config)}};
  for (auto& [k, v] : extra.items()) j[k] = v;
  in_module("cli", [&] { write_json(dir / "run.json", j); });
}

// Input as a manifest, a directory holding manifest.json, or a UCR .tsv file.
LoadedSignals load_input(const std::string& path) {
  return in_module("io", [&] {
    fs::path p(path);
    if (p.empty()) throw Error(ErrorCode::kBadConfig, "--input is required");
    if (!fs::exists(p)) throw Error(ErrorCode::kBadConfig, "input " + path + " does not exist");
    if (fs::is_directory(p)) p /= "manifest.json";
    if (p.extension() == ".tsv") return LoadedSignals{load_ucr_tsv(p), 0};
    return load_signal_set(p);
  });
}

fs::path manifest_path(const std::string& path) {
  fs::path p(path);
  if (fs::is_directory(p)) p /= "manifest.json";
  return fs::absolute(p).lexically_normal();
}

void check_manifold(const std::string& flag, const Manifold& m) {
  if (flag.empty()) return;
  in_module("io", [&] {
    const Manifold expected = Manifold::parse(flag);
    if (!(expected == m)) {
      throw Error(ErrorCode::kManifestMismatch, "--manifold " + flag + " but input holds " + m.to_string());
    }
  });
}

// Smooth stand-in signal on any manifold: the exponential of a slowly varying
// tangent curve at a fixed origin, block by block. S^1 uses the benchmark base.
Signal base_signal(const Manifold& m, int t_len) {
  if (m.kind() == Manifold::Kind::kSphere && m.dim() == 1) return s1_base_signal(t_len);
  if (t_len < 2) throw Error(ErrorCode::kBadConfig, "--len must be >= 2");
  Vec origin = Vec::Zero(m.ambient_dim());
  for (const auto& b : m.blocks()) {
    if (b.kind == Manifold::Kind::kSphere) origin[b.offset + b.width - 1] = 1.0;
    if (b.kind == Manifold::Kind::kSpd) origin.segment(b.offset, b.width) = spd::to_flat(Mat::Identity(b.dim, b.dim));
  }
  Signal out(t_len, m.ambient_dim());
  for (int t = 0; t < t_len; ++t) {
    const double u = static_cast<double>(t) / (t_len - 1);
    Vec v = Vec::Zero(m.ambient_dim());
    for (const auto& b : m.blocks()) {
      if (b.kind == Manifold::Kind::kEuclidean) {
        for (int j = 0; j < b.dim; ++j) v[b.offset + j] = std::sin(2 * kPi * u * (1 + 0.5 * j) + j);
      } else if (b.kind == Manifold::Kind::kSphere) {
        for (int j = 0; j < b.dim; ++j) v[b.offset + j] = 0.7 * std::sin(2 * kPi * u * (1 + 0.5 * j) + 0.7 * j);
      } else {
        Mat s(b.dim, b.dim);
        for (int i = 0; i < b.dim; ++i)
          for (int j = 0; j < b.dim; ++j) s(i, j) = 0.4 * std::sin(2 * kPi * u * (1 + 0.25 * (i + j)) + 0.3 * (i + j));
        v.segment(b.offset, b.width) = spd::to_flat(s);
      }
    }
    out.row(t) = m.exp_map(origin, v).transpose();
  }
  return out;
}

Mat stack_columns(const std::vector<Vec>& cols) {
  Mat m(cols.empty() ? 0 : cols.front().size(), static_cast<Eigen::Index>(cols.size()));
  for (size_t i = 0; i < cols.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = cols[i];
  return m;
}

int max_length(const std::vector<Signal>& s) {
  int t = 0;
  for (const auto& x : s) t = std::max(t, static_cast<int>(x.rows()));
  return t;
}

void save_aligned(const fs::path& dir, const Manifold& m, const std::vector<Signal>& aligned, const Signal& mean) {
  in_module("io", [&] {
    save_signal_set(dir / "aligned", SignalSet{m, aligned, {}}, "aligned");
    write_signal_csv(dir / "mean.csv", mean);
  });
}

json metrics_json(const Manifold& m, const std::vector<Signal>& originals, const std::vector<Signal>& aligned,
                  const Signal& mean, const Signal* base, const MetricOptions& opts) {
  json j;
  if (base) j["restoration_accuracy"] = to_json(restoration_accuracy(m, aligned, *base, opts));
  j["barycenter_loss"] = to_json(barycenter_loss(m, originals, mean, opts));
  j["alignment_quality"] = to_json(alignment_quality(m, aligned, mean, opts));
  return j;
}

}  // namespace

AlignConfig make_align_config(const AlignFlags& f, std::uint64_t seed) {
  AlignConfig cfg;
  cfg.epochs = f.epochs;
  cfg.lr = f.lr;
  cfg.lambda = f.lambda;
  cfg.sinc.window = f.sinc_window;
  cfg.loss.window = f.loss_window;
  cfg.loss.step = f.loss_step;
  cfg.z_factor = f.z_factor;
  cfg.seed = seed;
  if (f.warp == "mlp") {
    cfg.warp = WarpKind::kMlp;
  } else if (f.warp.rfind("sine:", 0) == 0) {
    int k = -1;
    try {
      size_t used = 0;
      k = std::stoi(f.warp.substr(5), &used);
      if (used != f.warp.size() - 5) k = -1;
    } catch (const std::exception&) {
      k = -1;
    }
    if (k < 0) throw Error(ErrorCode::kBadConfig, "--warp sine:K needs an integer K >= 0, got " + f.warp);
    cfg.warp = WarpKind::kSineBasis;
    cfg.model.sine_k = k;
  } else {
    throw Error(ErrorCode::kBadConfig, "--warp must be mlp or sine:K, got " + f.warp);
  }
  if (f.sinc_window < 1) throw Error(ErrorCode::kBadConfig, "--sinc-window must be >= 1");
  if (f.loss_window < 0 || f.loss_step < 1) throw Error(ErrorCode::kBadConfig, "--loss-window >= 0 and --loss-step >= 1");
  if (f.z_factor < 0) throw Error(ErrorCode::kBadConfig, "--z-factor must be >= 0");
  if (!(f.lr > 0.0)) throw Error(ErrorCode::kBadConfig, "--lr must be > 0");
  return cfg;
}

void run_generate(const Common& c, const GenerateArgs& a) {
  const fs::path out = prepare_out(c.out);
  const WarpFamily family = in_module("datasets", [&] { return parse_warp_family(a.family); });
  json config{{"kind", a.kind}, {"family", to_string(family)}, {"n", a.n}, {"len", a.len}};
  std::vector<std::string> files;
  if (a.kind == "two-class") {
    const ClassificationData d = in_module("datasets", [&] { return two_class_dataset(a.len, a.train, a.test, c.seed); });
    in_module("io", [&] {
      save_signal_set(out / "train", d.train);
      save_signal_set(out / "test", d.test);
    });
    config["train_per_class"] = a.train;
    config["test_per_class"] = a.test;
    config["manifold"] = "euclidean:1";
    files = {"train/manifest.json", "test/manifest.json"};
    if (c.emit_plots) {
      in_module("cli", [&] { plot_signals(out / "train.svg", d.train.manifold, d.train.signals, "two-class training signals"); });
    }
    write_run(out, c, "generate", config, json{{"outputs", files}});
    return;
  }
  auto make = [&]() -> WarpedDataset {
    if (a.kind == "inverted") {
      const Manifold m = in_module("io", [&] { return Manifold::parse(a.manifold); });
      SincConfig sinc;
      sinc.window = a.sinc_window;
      config["manifold"] = m.to_string();
      config["sinc_window"] = a.sinc_window;
      return in_module("datasets", [&] { return inverted_warp_dataset(m, base_signal(m, a.len), a.n, c.seed, family, sinc); });
    }
    if (a.kind == "robot") {
      if (a.manifold != "sphere:1" && a.manifold != "spd:2") {
        throw ModuleError("datasets", Error(ErrorCode::kBadConfig, "robot data lives on spd:2, not " + a.manifold));
      }
      config["manifold"] = "spd:2";
      config["links"] = a.links;
      return in_module("datasets", [&] { return robot_manipulability_dataset(a.n, a.len, c.seed, a.links, family); });
    }
    throw ModuleError("cli", Error(ErrorCode::kBadConfig, "generate kind must be inverted, robot or two-class"));
  };
  const WarpedDataset d = make();
  in_module("io", [&] {
    save_signal_set(out, d.set);
    write_signal_csv(out / "base.csv", d.base);
    write_warps(out / "warps.csv", stack_columns(d.warps));
  });
  files = {"manifest.json", "base.csv", "warps.csv"};
  if (c.emit_plots) {
    in_module("cli", [&] {
      plot_signals(out / "signals.svg", d.set.manifold, d.set.signals, "generated signals (base in black)", &d.base);
      plot_warps(out / "warps.svg", stack_columns(d.warps), "ground-truth warps");
    });
    files.insert(files.end(), {"signals.svg", "warps.svg"});
  }
  write_run(out, c, "generate", config, json{{"outputs", files}});
}

void run_align(const Common& c, const AlignArgs& a) {
  const fs::path out = prepare_out(c.out);
  const LoadedSignals in = load_input(a.input);
  check_manifold(a.manifold, in.set.manifold);
  const AlignConfig cfg = in_module("align", [&] { return make_align_config(a.flags, c.seed); });
  const Manifold& m = in.set.manifold;
  const auto t0 = std::chrono::steady_clock::now();
  const AlignmentResult r = in_module("align", [&] { return align(m, in.set.signals, cfg); });
  const double runtime = seconds_since(t0);
  const int t_max = max_length(in.set.signals);
  const Feasibility f = check_feasibility(r.gamma, t_max);
  save_aligned(out, m, r.warped, r.mean);
  in_module("io", [&] {
    write_warps(out / "gamma.csv", r.gamma);
    write_trace(out / "trace.csv", r.trace);
    std::ofstream(out / "model.json") << model_to_json(r.model) << '\n';
  });
  std::vector<std::string> files{"aligned/manifest.json", "mean.csv", "gamma.csv", "trace.csv", "model.json"};
  if (c.emit_plots) {
    in_module("cli", [&] {
      plot_signals(out / "before.svg", m, in.set.signals, "input signals");
      plot_signals(out / "after.svg", m, r.warped, "aligned signals (mean in black)", &r.mean);
      plot_warps(out / "warps.svg", r.gamma, "learned warps");
    });
    files.insert(files.end(), {"before.svg", "after.svg", "warps.svg"});
  }
  json extra{{"method", cfg.warp == WarpKind::kMlp ? "rtw" : "ttw"},
             {"input", manifest_path(a.input).string()},
             {"manifold", m.to_string()},
             {"n_signals", in.set.signals.size()},
             {"t_max", t_max},
             {"z_len", r.gamma.rows()},
             {"load_warnings", in.warnings},
             {"best_epoch", r.best_epoch},
             {"best_objective", r.best_objective},
             {"feasibility", to_json(f)},
             {"runtime_seconds", runtime},
             {"outputs", files}};
  write_run(out, c, "align", to_json(cfg), extra);
  std::printf("aligned %zu signals on %s: best objective %.6g at epoch %d (%.1f s)\n", in.set.signals.size(),
              m.to_string().c_str(), r.best_objective, r.best_epoch, runtime);
}

void run_baseline(const Common& c, const BaselineArgs& a) {
  const fs::path out = prepare_out(c.out);
  const LoadedSignals in = load_input(a.input);
  const Manifold& m = in.set.manifold;
  const NodeCost node = in_module("baselines", [&] {
    if (a.node_cost == "geodesic") return NodeCost::kGeodesic;
    if (a.node_cost == "cholesky") return NodeCost::kCholesky;
    throw Error(ErrorCode::kBadConfig, "--node-cost must be geodesic or cholesky");
  });
  json config{{"method", a.method}, {"node_cost", a.node_cost}, {"shuffle", a.shuffle}};
  const auto t0 = std::chrono::steady_clock::now();
  MultiAlignment r;
  json extra;
  if (a.method == "dtw") {
    const DtwResult d = in_module("baselines", [&] {
      if (in.set.signals.size() != 2) throw Error(ErrorCode::kBadConfig, "dtw aligns exactly two signals");
      return dtw(in.set.signals[0], in.set.signals[1], geodesic_distance(m));
    });
    r.aligned = expand_along_path(in.set.signals, d.path);
    r.mean = in_module("barycenter", [&] { return mean_signal(m, r.aligned).mean; });
    r.cost = d.cost;
    Mat path(static_cast<Eigen::Index>(d.path.size()), 2);
    for (size_t k = 0; k < d.path.size(); ++k) {
      path(static_cast<Eigen::Index>(k), 0) = d.path[k][0];
      path(static_cast<Eigen::Index>(k), 1) = d.path[k][1];
    }
    in_module("io", [&] { write_matrix_csv(out / "path.csv", path, {"i", "j"}); });
  } else if (a.method == "mmddtw") {
    r = in_module("baselines", [&] { return mmddtw_align(m, in.set.signals, node); });
  } else if (a.method == "pdtw") {
    r = in_module("baselines", [&] {
      return pairwise_pdtw(m, in.set.signals, a.shuffle ? std::optional<std::uint64_t>(c.seed) : std::nullopt);
    });
  } else {
    throw ModuleError("cli", Error(ErrorCode::kBadConfig, "baseline method must be dtw, mmddtw or pdtw"));
  }
  const double runtime = seconds_since(t0);
  save_aligned(out, m, r.aligned, r.mean);
  if (c.emit_plots) {
    in_module("cli", [&] {
      plot_signals(out / "before.svg", m, in.set.signals, "input signals");
      plot_signals(out / "after.svg", m, r.aligned, a.method + " aligned signals (mean in black)", &r.mean);
    });
  }
  extra = json{{"method", a.method},
               {"input", manifest_path(a.input).string()},
               {"manifold", m.to_string()},
               {"cost", r.cost},
               {"aligned_length", r.mean.rows()},
               {"runtime_seconds", runtime}};
  write_run(out, c, "baseline", config, extra);
  std::printf("%s: cost %.6g, aligned length %ld (%.1f s)\n", a.method.c_str(), r.cost, static_cast<long>(r.mean.rows()),
              runtime);
}

void run_eval(const Common& c, const EvalArgs& a) {
  if (a.aligned.empty()) throw ModuleError("cli", Error(ErrorCode::kBadConfig, "--aligned is required"));
  const fs::path dir(a.aligned);
  const json run = in_module("io", [&] { return read_json(dir / "run.json"); });
  const std::string input = !a.input.empty() ? a.input : run.value("input", std::string());
  if (input.empty()) throw ModuleError("eval", Error(ErrorCode::kBadConfig, "no --input and no input in run.json"));
  const LoadedSignals originals = load_input(input);
  const LoadedSignals aligned = load_input((dir / "aligned" / "manifest.json").string());
  const Manifold& m = originals.set.manifold;
  if (!(aligned.set.manifold == m)) {
    throw ModuleError("eval", Error(ErrorCode::kManifestMismatch, "aligned and original signals differ in manifold"));
  }
  const Signal mean = in_module("io", [&] { return read_signal_csv(dir / "mean.csv"); });
  fs::path base_path = a.original;
  if (base_path.empty()) {
    const fs::path guess = manifest_path(input).parent_path() / "base.csv";
    if (fs::exists(guess)) base_path = guess;
  }
  std::optional<Signal> base;
  if (!base_path.empty()) base = in_module("io", [&] { return read_signal_csv(base_path); });
  const fs::path out = prepare_out(c.out.empty() ? (dir / "eval").string() : c.out);
  MetricOptions opts;
  opts.common_length = !a.raw_lengths;
  const auto t0 = std::chrono::steady_clock::now();
  json metrics = in_module("eval", [&] {
    return metrics_json(m, originals.set.signals, aligned.set.signals, mean, base ? &*base : nullptr, opts);
  });
  metrics["runtime_seconds"] = seconds_since(t0);
  metrics["align_runtime_seconds"] = run.value("runtime_seconds", 0.0);
  metrics["config"] = run.value("config", json::object());
  metrics["seed"] = run.value("seed", 0);
  metrics["method"] = run.value("method", std::string());
  in_module("io", [&] { write_json(out / "metrics.json", metrics); });
  json config{{"aligned", fs::absolute(dir).lexically_normal().string()},
              {"input", manifest_path(input).string()},
              {"original", base_path.empty() ? std::string() : fs::absolute(base_path).lexically_normal().string()},
              {"common_length", opts.common_length}};
  write_run(out, c, "eval", config, json{{"outputs", {"metrics.json"}}});
  for (const char* key : {"restoration_accuracy", "barycenter_loss", "alignment_quality"}) {
    if (metrics.contains(key)) {
      std::printf("%-22s raw %.6g  per_signal %.6g  per_step %.6g\n", key, metrics[key]["raw"].get<double>(),
                  metrics[key]["per_signal"].get<double>(), metrics[key]["per_step"].get<double>());
    }
  }
}

void run_classify(const Common& c, const ClassifyArgs& a) {
  const fs::path out = prepare_out(c.out);
  const LoadedSignals train = load_input(a.train);
  const LoadedSignals test = load_input(a.test);
  const Manifold& m = train.set.manifold;
  if (!(test.set.manifold == m)) {
    throw ModuleError("eval", Error(ErrorCode::kManifestMismatch, "train and test sets differ in manifold"));
  }
  if (train.set.labels.empty() || test.set.labels.empty()) {
    throw ModuleError("eval", Error(ErrorCode::kBadConfig, "classification needs labelled train and test sets"));
  }
  if (a.method != "rtw" && a.method != "naive") {
    throw ModuleError("cli", Error(ErrorCode::kBadConfig, "--method must be rtw or naive"));
  }
  const AlignConfig cfg = in_module("align", [&] { return make_align_config(a.flags, c.seed); });
  const std::set<int> classes(train.set.labels.begin(), train.set.labels.end());
  std::map<int, int> class_id;
  std::vector<int> class_labels;
  for (int label : classes) {
    class_id[label] = static_cast<int>(class_labels.size());
    class_labels.push_back(label);
  }
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<Signal> centroids;
  for (int label : class_labels) {
    std::vector<Signal> members;
    for (size_t i = 0; i < train.set.signals.size(); ++i)
      if (train.set.labels[i] == label) members.push_back(train.set.signals[i]);
    const int t_len = max_length(members);
    if (a.method == "naive" || members.size() == 1) {
      for (auto& s : members) s = in_module("resample", [&] { return resample_length(m, s, t_len); });
      centroids.push_back(in_module("barycenter", [&] { return mean_signal(m, members, cfg.mean).mean; }));
    } else {
      const AlignmentResult r = in_module("align", [&] { return align(m, members, cfg); });
      centroids.push_back(in_module("resample", [&] { return resample_length(m, r.mean, t_len); }));
    }
  }
  std::vector<int> test_ids;
  for (int label : test.set.labels) test_ids.push_back(class_id.count(label) ? class_id[label] : -1);
  const Classification result =
      in_module("eval", [&] { return nearest_centroid_classify(m, test.set.signals, test_ids, centroids); });
  const double runtime = seconds_since(t0);
  Mat pred(static_cast<Eigen::Index>(test_ids.size()), 3);
  for (size_t i = 0; i < test_ids.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    pred(r, 0) = static_cast<double>(i);
    pred(r, 1) = test.set.labels[i];
    pred(r, 2) = class_labels[static_cast<size_t>(result.predicted[i])];
  }
  in_module("io", [&] {
    write_matrix_csv(out / "predictions.csv", pred, {"index", "label", "predicted"});
    save_signal_set(out / "centroids", SignalSet{m, centroids, class_labels}, "centroid");
    write_json(out / "metrics.json", json{{"accuracy", result.accuracy},
                                          {"method", a.method},
                                          {"classes", class_labels},
                                          {"n_train", train.set.signals.size()},
                                          {"n_test", test.set.signals.size()},
                                          {"runtime_seconds", runtime}});
  });
  if (c.emit_plots) in_module("cli", [&] { plot_signals(out / "centroids.svg", m, centroids, "class centroids"); });
  json config = to_json(cfg);
  config["method"] = a.method;
  write_run(out, c, "classify", config,
            json{{"train", manifest_path(a.train).string()}, {"test", manifest_path(a.test).string()}});
  std::printf("%s centroids: accuracy %.4f on %zu test signals\n", a.method.c_str(), result.accuracy,
              test.set.signals.size());
}

namespace {

struct BenchRow {
  std::string method;
  std::uint64_t seed;
  Metric restoration, barycenter, alignment;
  double runtime;
};

}  // namespace

void run_bench(const Common& c, const BenchArgs& a) {
  const fs::path out = prepare_out(c.out);
  if (a.runs < 1) throw ModuleError("cli", Error(ErrorCode::kBadConfig, "--runs must be >= 1"));
  int n = 0, t_len = 0;
  std::vector<std::string> comparators;
  if (a.protocol == "s1-n4") {
    n = 4, t_len = 100, comparators = {"ttw"};
  } else if (a.protocol == "s1-n30") {
    n = 30, t_len = 100, comparators = {"pdtw"};
  } else if (a.protocol == "spd") {
    n = 3, t_len = 50, comparators = {"mmddtw-geodesic", "mmddtw-cholesky"};
  } else {
    throw ModuleError("cli", Error(ErrorCode::kBadConfig, "bench protocol must be s1-n4, s1-n30 or spd"));
  }
  if (a.n > 0) n = a.n;
  if (a.len > 0) t_len = a.len;
  const bool spd_protocol = a.protocol == "spd";
  const Manifold m = spd_protocol ? Manifold::spd(2) : Manifold::sphere(1);
  const AlignConfig base_cfg = in_module("align", [&] { return make_align_config(a.flags, c.seed); });

  std::vector<BenchRow> rows;
  int infeasible = 0;
  for (int run = 0; run < a.runs; ++run) {
    const std::uint64_t seed = c.seed + static_cast<std::uint64_t>(run);
    const WarpedDataset d = in_module("datasets", [&] {
      return spd_protocol ? robot_manipulability_dataset(n, t_len, seed)
                          : inverted_warp_dataset(m, s1_base_signal(t_len), n, seed);
    });
    AlignConfig cfg = base_cfg;
    cfg.seed = seed;
    auto record = [&](const std::string& method, const std::vector<Signal>& aligned, const Signal& mean, double rt) {
      BenchRow row{method, seed, {}, {}, {}, rt};
      in_module("eval", [&] {
        if (!spd_protocol) row.restoration = restoration_accuracy(m, aligned, d.base);
        row.barycenter = barycenter_loss(m, d.set.signals, mean);
        row.alignment = alignment_quality(m, aligned, mean);
      });
      rows.push_back(std::move(row));
    };
    auto t0 = std::chrono::steady_clock::now();
    const AlignmentResult r = in_module("align", [&] { return align(m, d.set.signals, cfg); });
    record(cfg.warp == WarpKind::kMlp ? "rtw" : "rtw-" + a.flags.warp, r.warped, r.mean, seconds_since(t0));
    const Feasibility f = check_feasibility(r.gamma, t_len);
    infeasible += !(f.boundary && f.monotone && f.continuity);
    if (c.emit_plots && run == 0) {
      in_module("cli", [&] {
        plot_signals(out / "signals_before.svg", m, d.set.signals, "input signals (base in black)", &d.base);
        plot_signals(out / "rtw_after.svg", m, r.warped, "RTW aligned (mean in black)", &r.mean);
        plot_warps(out / "rtw_warps.svg", r.gamma, "RTW warps");
      });
    }
    for (const auto& comp : comparators) {
      t0 = std::chrono::steady_clock::now();
      MultiAlignment b;
      Mat gamma;
      if (comp == "ttw") {
        const AlignmentResult t = in_module("align", [&] { return align_ttw_mode(m, d.set.signals, cfg, 5); });
        b = MultiAlignment{t.warped, t.mean, t.best_objective};
        gamma = t.gamma;
      } else if (comp == "pdtw") {
        b = in_module("baselines", [&] { return pairwise_pdtw(m, d.set.signals); });
      } else {
        const NodeCost node = comp == "mmddtw-geodesic" ? NodeCost::kGeodesic : NodeCost::kCholesky;
        b = in_module("baselines", [&] { return mmddtw_align(m, d.set.signals, node); });
      }
      record(comp, b.aligned, b.mean, seconds_since(t0));
      if (c.emit_plots && run == 0) {
        in_module("cli", [&] {
          plot_signals(out / (comp + "_after.svg"), m, b.aligned, comp + " aligned (mean in black)", &b.mean);
          if (gamma.size()) plot_warps(out / (comp + "_warps.svg"), gamma, comp + " warps");
        });
      }
    }
    std::printf("run %d/%d (seed %llu) done\n", run + 1, a.runs, static_cast<unsigned long long>(seed));
    std::fflush(stdout);
  }

  Mat table(static_cast<Eigen::Index>(rows.size()), 9);
  std::vector<std::string> methods;
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
    const auto k = static_cast<Eigen::Index>(i);
    table.row(k) << static_cast<double>(std::find(methods.begin(), methods.end(), r.method) - methods.begin()),
        static_cast<double>(r.seed), r.restoration.per_step, r.barycenter.per_step, r.alignment.per_step,
        r.restoration.per_signal, r.barycenter.per_signal, r.alignment.per_signal, r.runtime;
  }
  json summary{{"protocol", a.protocol},
               {"manifold", m.to_string()},
               {"n", n},
               {"len", t_len},
               {"runs", a.runs},
               {"first_seed", c.seed},
               {"method_ids", methods},
               {"rtw_infeasible_runs", infeasible},
               {"normalization", "per_step is the headline value; per_signal is raw / N"}};
  auto column = [&](const std::string& method, auto get) {
    std::vector<double> v;
    for (const auto& r : rows)
      if (r.method == method) v.push_back(get(r));
    return v;
  };
  auto mean_of = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
  };
  const std::vector<std::pair<const char*, double (*)(const BenchRow&)>> fields{
      {"restoration_accuracy", [](const BenchRow& r) { return r.restoration.per_step; }},
      {"barycenter_loss", [](const BenchRow& r) { return r.barycenter.per_step; }},
      {"alignment_quality", [](const BenchRow& r) { return r.alignment.per_step; }},
      {"restoration_accuracy_per_signal", [](const BenchRow& r) { return r.restoration.per_signal; }},
      {"barycenter_loss_per_signal", [](const BenchRow& r) { return r.barycenter.per_signal; }},
      {"alignment_quality_per_signal", [](const BenchRow& r) { return r.alignment.per_signal; }},
      {"runtime_seconds", [](const BenchRow& r) { return r.runtime; }},
  };
  json per_method = json::object();
  for (const auto& method : methods) {
    json mj = json::object();
    for (const auto& [name, get] : fields) {
      if (spd_protocol && std::string(name).rfind("restoration", 0) == 0) continue;
      mj[name] = mean_of(column(method, get));
    }
    per_method[method] = mj;
  }
  summary["mean"] = per_method;
  const std::string primary = methods.front();
  json comparisons = json::object();
  for (size_t k = 1; k < methods.size(); ++k) {
    json cj = json::object();
    int joint = 0;
    const auto pa = column(primary, fields[1].second), pb = column(methods[k], fields[1].second);
    const auto qa = column(primary, fields[2].second), qb = column(methods[k], fields[2].second);
    const auto ra = column(primary, fields[0].second), rb = column(methods[k], fields[0].second);
    for (size_t i = 0; i < pa.size(); ++i) joint += pa[i] < pb[i] && qa[i] < qb[i] && (spd_protocol || ra[i] < rb[i]);
    cj["primary_wins_all_metrics"] = joint;
    if (pa.size() >= 2) {
      const TTestResult t = in_module("eval", [&] { return paired_t_test(qa, qb); });
      cj["alignment_quality_t"] = std::isfinite(t.t) ? json(t.t) : json(t.t > 0 ? "inf" : "-inf");
      cj["alignment_quality_p"] = t.p;
      cj["alignment_quality_significant"] = t.significant;
    }
    comparisons[methods[k]] = cj;
  }
  summary["comparisons"] = comparisons;
  in_module("io", [&] {
    write_matrix_csv(out / "summary.csv", table,
                     {"method_id", "seed", "restoration_per_step", "barycenter_per_step", "alignment_per_step",
                      "restoration_per_signal", "barycenter_per_signal", "alignment_per_signal", "runtime_seconds"});
    write_json(out / "summary.json", summary);
  });
  json config = to_json(base_cfg);
  config["protocol"] = a.protocol;
  config["runs"] = a.runs;
  write_run(out, c, "bench", config, json{{"outputs", {"summary.csv", "summary.json"}}});
  std::printf("%-18s %12s %12s %12s\n", "method", "restoration", "barycenter", "alignment");
  for (const auto& method : methods) {
    const json& mj = per_method[method];
    std::printf("%-18s %12.5f %12.5f %12.5f\n", method.c_str(), mj.value("restoration_accuracy", 0.0),
                mj["barycenter_loss"].get<double>(), mj["alignment_quality"].get<double>());
  }
}

}  // namespace rtw::cli
