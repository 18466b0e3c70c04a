#include "rtw/warpnet.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <json.hpp>

#include "rtw/error.hpp"

namespace rtw {

namespace {

using ad::Tensor;
using ad::Var;

Tensor xavier_uniform(int fan_in, int fan_out, std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Tensor w(fan_in, fan_out);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = dist(rng);
  return w;
}

// U(-1/sqrt(fan_in), 1/sqrt(fan_in)); spreads the ReLU kinks over the input range.
Tensor bias_uniform(int fan_in, int width, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Tensor b(1, width);
  for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = dist(rng);
  return b;
}

int output_input_width(const WarpModel& m) {
  if (m.skip == SkipMode::kNone) return m.hidden.empty() ? 1 : m.hidden.back();
  int width = 1;
  for (int h : m.hidden) width += h;
  return width;
}

Tensor sine_matrix(int z_len, int k) {
  const Vec grid = warp_grid(z_len);
  Tensor s(z_len, k);
  for (int z = 0; z < z_len; ++z) {
    for (int j = 0; j < k; ++j) {
      s(z, j) = (z == z_len - 1) ? 0.0 : std::sin(std::numbers::pi * (j + 1) * grid[z]);
    }
  }
  return s;
}

SkipMode parse_skip(const std::string& s) {
  if (s == "dense_concat") return SkipMode::kDenseConcat;
  if (s == "none") return SkipMode::kNone;
  throw Error(ErrorCode::kParseError, "unknown skip mode '" + s + "'");
}

}  // namespace

std::string to_string(WarpKind kind) { return kind == WarpKind::kMlp ? "mlp" : "sine"; }

std::vector<int> WarpModel::layer_sizes() const {
  if (kind == WarpKind::kSineBasis) return {sine_k, n_signals};
  std::vector<int> sizes{1};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  if (skip == SkipMode::kDenseConcat) sizes.push_back(output_input_width(*this));
  sizes.push_back(n_signals - 1);
  return sizes;
}

size_t WarpModel::parameter_count() const {
  size_t n = 0;
  for (const auto& p : params) n += static_cast<size_t>(p.size());
  return n;
}

Vec WarpModel::flat_params() const {
  Vec flat(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index off = 0;
  for (const auto& p : params) {
    for (Eigen::Index r = 0; r < p.rows(); ++r)
      for (Eigen::Index c = 0; c < p.cols(); ++c) flat[off++] = p(r, c);
  }
  return flat;
}

void WarpModel::set_flat_params(const Vec& flat) {
  if (static_cast<size_t>(flat.size()) != parameter_count()) {
    throw Error(ErrorCode::kShapeMismatch, "flat parameter vector has wrong length");
  }
  Eigen::Index off = 0;
  for (auto& p : params) {
    for (Eigen::Index r = 0; r < p.rows(); ++r)
      for (Eigen::Index c = 0; c < p.cols(); ++c) p(r, c) = flat[off++];
  }
}

Mat make_basis(int n) {
  if (n < 1) throw Error(ErrorCode::kBadConfig, "basis needs N >= 1");
  Mat basis(n, n);
  basis.col(0) = Vec::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  int filled = 1;
  for (int e = 0; e < n && filled < n; ++e) {
    Vec v = Vec::Unit(n, e);
    for (int pass = 0; pass < 2; ++pass) {
      for (int k = 0; k < filled; ++k) v -= basis.col(k).dot(v) * basis.col(k);
    }
    const double len = v.norm();
    if (len < 1e-8) continue;
    v /= len;
    for (int i = 0; i < n; ++i) {
      if (std::abs(v[i]) > 1e-12) {
        if (v[i] < 0.0) v = -v;
        break;
      }
    }
    basis.col(filled++) = v;
  }
  return basis;
}

Vec warp_grid(int z_len) {
  Vec g(z_len);
  if (z_len == 1) {
    g[0] = 0.0;
    return g;
  }
  for (int z = 0; z < z_len; ++z) g[z] = static_cast<double>(z) / static_cast<double>(z_len - 1);
  g[z_len - 1] = 1.0;
  return g;
}

WarpModel init_model(WarpKind kind, int n_signals, int z_len, std::uint64_t seed, const WarpModelOptions& options) {
  if (n_signals < 2) throw Error(ErrorCode::kBadConfig, "need at least two signals");
  if (z_len < 2) throw Error(ErrorCode::kBadConfig, "warped length Z must be >= 2");
  if (options.t_max > 0 && z_len < options.t_max) {
    throw Error(ErrorCode::kBadConfig, "Z=" + std::to_string(z_len) + " is shorter than the longest signal (" +
                                           std::to_string(options.t_max) + ")");
  }
  WarpModel m;
  m.kind = kind;
  m.n_signals = n_signals;
  m.z_len = z_len;
  m.seed = seed;
  if (kind == WarpKind::kSineBasis) {
    if (options.sine_k < 0) throw Error(ErrorCode::kBadConfig, "sine basis K must be >= 0");
    m.sine_k = options.sine_k;
    m.params.push_back(Tensor::Zero(options.sine_k, n_signals));
    return m;
  }
  m.hidden = options.hidden;
  m.skip = options.skip;
  for (int h : m.hidden) {
    if (h < 1) throw Error(ErrorCode::kBadConfig, "hidden layer widths must be >= 1");
  }
  std::mt19937_64 rng(seed);
  int fan_in = 1;
  for (int h : m.hidden) {
    m.params.push_back(xavier_uniform(fan_in, h, rng));
    if (fan_in == 1) {
      // Place each first-layer ReLU kink at a uniform point of [0, 1].
      std::uniform_real_distribution<double> u(0.0, 1.0);
      Tensor b(1, h);
      for (int i = 0; i < h; ++i) b(0, i) = -m.params.back()(0, i) * u(rng);
      m.params.push_back(b);
    } else {
      m.params.push_back(bias_uniform(fan_in, h, rng));
    }
    fan_in = h;
  }
  const int out_in = output_input_width(m);
  if (options.zero_output) {
    m.params.push_back(Tensor::Zero(out_in, n_signals - 1));
  } else {
    m.params.push_back(xavier_uniform(out_in, n_signals - 1, rng));
  }
  m.params.push_back(Tensor::Zero(1, n_signals - 1));
  return m;
}

Var eval_warp(const WarpModel& model, const Mat& basis, ad::Tape& tape, std::span<const Var> params) {
  if (params.size() != model.params.size()) {
    throw Error(ErrorCode::kShapeMismatch, "eval_warp: parameter count mismatch");
  }
  const int z_len = model.z_len;
  const int n = model.n_signals;
  const Vec grid = warp_grid(z_len);
  const Var identity = tape.constant(grid * Eigen::RowVectorXd::Ones(n));

  if (model.kind == WarpKind::kSineBasis) {
    if (model.sine_k == 0) return identity;
    const Var s = tape.constant(sine_matrix(z_len, model.sine_k));
    return add(identity, matmul(s, params[0]));
  }

  const Var input = tape.constant(grid);
  std::vector<Var> features{input};
  Var h = input;
  const size_t n_hidden = model.hidden.size();
  for (size_t l = 0; l < n_hidden; ++l) {
    h = ad::relu(add(matmul(h, params[2 * l]), params[2 * l + 1]));
    features.push_back(h);
  }
  const Var head_in = (model.skip == SkipMode::kDenseConcat) ? ad::concat_cols(features) : h;
  const Var f = add(matmul(head_in, params[2 * n_hidden]), params[2 * n_hidden + 1]);

  const Vec envelope = grid.array() * (1.0 - grid.array());
  const Var shaped = mul(f, tape.constant(envelope));
  const Var directions = tape.constant(basis.rightCols(n - 1).transpose());
  return add(identity, matmul(shaped, directions));
}

Mat eval_warp_values(const WarpModel& model, const Mat& basis) {
  ad::Tape tape;
  std::vector<Var> params;
  for (const auto& p : model.params) params.push_back(tape.constant(p));
  return eval_warp(model, basis, tape, params).value();
}

Var monotonicity_penalty(Var gamma) {
  const auto z_len = gamma.rows();
  if (z_len < 2) return gamma.tape()->constant(Tensor::Zero(1, 1));
  const Var head = ad::slice_rows(gamma, 0, z_len - 1);
  const Var tail = ad::slice_rows(gamma, 1, z_len - 1);
  return ad::sum(ad::relu(sub(head, tail)));
}

double monotonicity_penalty_value(const Mat& gamma) {
  double total = 0.0;
  for (Eigen::Index n = 0; n < gamma.cols(); ++n)
    for (Eigen::Index z = 0; z + 1 < gamma.rows(); ++z) total += std::max(gamma(z, n) - gamma(z + 1, n), 0.0);
  return total;
}

std::string model_to_json(const WarpModel& model) {
  nlohmann::json j;
  j["kind"] = to_string(model.kind);
  j["N"] = model.n_signals;
  j["Z"] = model.z_len;
  j["layer_sizes"] = model.layer_sizes();
  j["seed"] = model.seed;
  if (model.kind == WarpKind::kMlp) {
    j["hidden"] = model.hidden;
    j["skip"] = model.skip == SkipMode::kDenseConcat ? "dense_concat" : "none";
  } else {
    j["K"] = model.sine_k;
  }
  const Vec flat = model.flat_params();
  j["params"] = std::vector<double>(flat.data(), flat.data() + flat.size());
  return j.dump(2);
}

WarpModel model_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("model checkpoint: ") + e.what());
  }
  try {
    const std::string kind = j.at("kind");
    WarpModelOptions opts;
    WarpKind wk;
    if (kind == "mlp") {
      wk = WarpKind::kMlp;
      opts.hidden = j.at("hidden").get<std::vector<int>>();
      opts.skip = parse_skip(j.at("skip"));
    } else if (kind == "sine") {
      wk = WarpKind::kSineBasis;
      opts.sine_k = j.at("K");
    } else {
      throw Error(ErrorCode::kParseError, "unknown warp kind '" + kind + "'");
    }
    WarpModel m = init_model(wk, j.at("N"), j.at("Z"), j.at("seed").get<std::uint64_t>(), opts);
    const auto flat = j.at("params").get<std::vector<double>>();
    m.set_flat_params(Eigen::Map<const Vec>(flat.data(), static_cast<Eigen::Index>(flat.size())));
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("model checkpoint: ") + e.what());
  }
}

}  // namespace rtw
