#include "output.hpp"

#include <fstream>

#include "rtw/error.hpp"
#include "rtw/signal_io.hpp"

namespace rtw::cli {

namespace fs = std::filesystem;

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorCode::kBadConfig, "cannot create output directory " + dir.string());
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kBadConfig, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kBadConfig, "cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

json to_json(const Metric& m) {
  return json{{"raw", m.raw},
              {"per_signal", m.per_signal},
              {"per_step", m.per_step},
              {"costs", m.costs},
              {"path_lengths", m.path_lengths}};
}

json to_json(const AlignConfig& cfg) {
  json hidden = cfg.model.hidden;
  return json{
      {"epochs", cfg.epochs},
      {"lr", cfg.lr},
      {"lambda", cfg.lambda},
      {"z_factor", cfg.z_factor},
      {"z_factor_cap", cfg.z_factor_cap},
      {"z_len", cfg.z_len},
      {"seed", cfg.seed},
      {"warp", cfg.warp == WarpKind::kMlp ? "mlp" : "sine:" + std::to_string(cfg.model.sine_k)},
      {"hidden", hidden},
      {"skip", cfg.model.skip == SkipMode::kDenseConcat ? "dense_concat" : "none"},
      {"sinc", {{"window", cfg.sinc.window}, {"refine_iters", cfg.sinc.refine_iters}, {"refine_tol", cfg.sinc.refine_tol}}},
      {"loss",
       {{"window", cfg.loss.window},
        {"step", cfg.loss.step},
        {"epsilon", cfg.loss.epsilon},
        {"distance", cfg.loss.distance == LossDistance::kGeodesic ? "geodesic" : "cholesky"}}},
      {"mean", {{"max_iters", cfg.mean.max_iters}, {"tol", cfg.mean.tol}, {"warm_start", cfg.mean.warm_start}}},
  };
}

json to_json(const Feasibility& f) {
  return json{{"boundary", f.boundary}, {"monotone", f.monotone}, {"continuity", f.continuity}, {"max_step", f.max_step}};
}

void write_warps(const fs::path& path, const Mat& gamma) {
  std::vector<std::string> header;
  for (Eigen::Index n = 0; n < gamma.cols(); ++n) header.push_back("gamma_" + std::to_string(n));
  write_matrix_csv(path, gamma, header);
}

void write_trace(const fs::path& path, const std::vector<EpochRecord>& trace) {
  Mat m(static_cast<Eigen::Index>(trace.size()), 4);
  for (size_t i = 0; i < trace.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    m(r, 0) = static_cast<double>(i);
    m(r, 1) = trace[i].data_loss;
    m(r, 2) = trace[i].penalty;
    m(r, 3) = trace[i].objective;
  }
  write_matrix_csv(path, m, {"epoch", "data_loss", "penalty", "objective"});
}

}  // namespace rtw::cli
