#include "rtw/align.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rtw/adam.hpp"
#include "rtw/error.hpp"

namespace rtw {

using ad::Tensor;
using ad::Var;

namespace {

int max_length(std::span<const Signal> signals) {
  int t_max = 0;
  for (const auto& s : signals) t_max = std::max(t_max, static_cast<int>(s.rows()));
  return t_max;
}

void validate(const Manifold& m, std::span<const Signal> signals, const AlignConfig& cfg) {
  if (signals.size() < 2) throw Error(ErrorCode::kBadConfig, "alignment needs at least two signals");
  if (cfg.epochs < 1) throw Error(ErrorCode::kBadConfig, "epochs must be >= 1");
  if (!(cfg.lr > 0.0) || !std::isfinite(cfg.lr)) throw Error(ErrorCode::kBadConfig, "learning rate must be positive");
  if (!(cfg.lambda >= 0.0) || !std::isfinite(cfg.lambda)) throw Error(ErrorCode::kBadConfig, "lambda must be >= 0");
  if (cfg.sinc.window < 1) throw Error(ErrorCode::kBadConfig, "sinc window must be >= 1");
  if (cfg.loss.window < 0 || cfg.loss.step < 1) throw Error(ErrorCode::kBadConfig, "bad loss window/step");
  if (cfg.loss.distance == LossDistance::kCholesky && m.kind() != Manifold::Kind::kSpd) {
    throw Error(ErrorCode::kBadConfig, "Cholesky loss needs an SPD manifold");
  }
  for (size_t n = 0; n < signals.size(); ++n) {
    const Signal& s = signals[n];
    if (s.rows() < 1) throw Error(ErrorCode::kBadConfig, "signal " + std::to_string(n) + " is empty");
    if (s.cols() != m.ambient_dim()) {
      throw Error(ErrorCode::kShapeMismatch, "signal " + std::to_string(n) + " has " + std::to_string(s.cols()) +
                                                 " columns, manifold " + m.to_string() + " needs " +
                                                 std::to_string(m.ambient_dim()));
    }
    if (!s.allFinite()) throw Error(ErrorCode::kNonFinite, "signal " + std::to_string(n) + " has non-finite values");
  }
}

Vec clamped_column(const Mat& gamma, Eigen::Index n) {
  return gamma.col(n).cwiseMax(0.0).cwiseMin(1.0);
}

}  // namespace

int resolve_z_len(const AlignConfig& cfg, int n_signals, int t_max) {
  if (cfg.z_len > 0) return cfg.z_len;
  const int factor = cfg.z_factor > 0 ? cfg.z_factor : std::min(n_signals, std::max(1, cfg.z_factor_cap));
  return factor * t_max;
}

FrozenState freeze_statistics(const Manifold& m, std::span<const Signal> signals, const WarpModel& model,
                              const Mat& basis, const AlignConfig& cfg) {
  const Mat gamma = eval_warp_values(model, basis);
  FrozenState f;
  f.stats.reserve(signals.size());
  std::vector<Signal> warped;
  warped.reserve(signals.size());
  for (size_t n = 0; n < signals.size(); ++n) {
    f.stats.push_back(prepare_warp(m, signals[n], clamped_column(gamma, static_cast<Eigen::Index>(n)), cfg.sinc));
    warped.push_back(f.stats.back().warped);
  }
  f.mean = mean_signal(m, warped, cfg.mean).mean;
  return f;
}

ObjectiveEval evaluate_frozen(const Manifold& m, const WarpModel& model, const Mat& basis, const FrozenState& frozen,
                              const AlignConfig& cfg, bool with_grad) {
  if (frozen.stats.size() != static_cast<size_t>(model.n_signals)) {
    throw Error(ErrorCode::kShapeMismatch, "frozen statistics do not match the model");
  }
  ad::Tape tape;
  std::vector<Var> params;
  params.reserve(model.params.size());
  for (const auto& p : model.params) params.push_back(tape.leaf(p));
  const Var gamma = eval_warp(model, basis, tape, params);
  std::vector<Var> warped;
  warped.reserve(frozen.stats.size());
  for (size_t n = 0; n < frozen.stats.size(); ++n) {
    warped.push_back(warp_on_tape(m, frozen.stats[n], ad::col(gamma, static_cast<Eigen::Index>(n))));
  }
  const Var data = alignment_loss(m, warped, frozen.mean, cfg.loss);
  const Var pen = monotonicity_penalty(gamma);
  const Var obj = add(data, scale(pen, cfg.lambda));

  ObjectiveEval out;
  out.data_loss = tape.scalar(data);
  out.penalty = tape.scalar(pen);
  out.objective = tape.scalar(obj);
  if (with_grad) out.grads = tape.grad(obj, params);
  return out;
}

Feasibility check_feasibility(const Mat& gamma, int t_max) {
  Feasibility f;
  f.boundary = true;
  f.monotone = true;
  const Eigen::Index z_len = gamma.rows();
  for (Eigen::Index n = 0; n < gamma.cols(); ++n) {
    if (gamma(0, n) != 0.0 || gamma(z_len - 1, n) != 1.0) f.boundary = false;
    for (Eigen::Index z = 0; z + 1 < z_len; ++z) {
      const double d = gamma(z + 1, n) - gamma(z, n);
      if (!(d >= 0.0)) f.monotone = false;
      f.max_step = std::max(f.max_step, d);
    }
  }
  f.continuity = t_max > 0 && f.max_step <= (1.0 + 0.01) / t_max;
  return f;
}

void repair_warp(Mat& gamma, int t_max) {
  const Eigen::Index z_len = gamma.rows();
  if (z_len < 2) return;
  const double cap = std::max(t_max > 0 ? 1.0 / t_max : 1.0, 1.0 / static_cast<double>(z_len - 1));
  Vec d(z_len - 1);
  for (Eigen::Index n = 0; n < gamma.cols(); ++n) {
    auto g = gamma.col(n);
    g = g.cwiseMax(0.0).cwiseMin(1.0);
    g[0] = 0.0;
    g[z_len - 1] = 1.0;
    for (Eigen::Index z = 1; z < z_len; ++z) g[z] = std::max(g[z], g[z - 1]);

    double excess = 0.0;
    double slack = 0.0;
    for (Eigen::Index z = 0; z + 1 < z_len; ++z) {
      d[z] = g[z + 1] - g[z];
      if (d[z] > cap) {
        excess += d[z] - cap;
        d[z] = cap;
      } else {
        slack += cap - d[z];
      }
    }
    if (excess > 0.0 && slack > 0.0) {
      const double r = std::min(1.0, excess / slack);
      for (Eigen::Index z = 0; z + 1 < z_len; ++z) d[z] += r * (cap - d[z]);
      double acc = 0.0;
      for (Eigen::Index z = 1; z + 1 < z_len; ++z) {
        acc += d[z - 1];
        g[z] = std::min(acc, 1.0);
      }
    }
  }
}

AlignmentResult align(const Manifold& m, std::span<const Signal> signals, const AlignConfig& cfg) {
  validate(m, signals, cfg);
  const int n = static_cast<int>(signals.size());
  const int t_max = max_length(signals);
  const int z_len = resolve_z_len(cfg, n, t_max);

  WarpModelOptions opts = cfg.model;
  opts.t_max = t_max;
  AlignmentResult res;
  res.model = init_model(cfg.warp, n, z_len, cfg.seed, opts);
  const Mat basis = make_basis(n);

  Adam adam(AdamConfig{.lr = cfg.lr});
  std::vector<Tensor> best_params = res.model.params;
  double best = std::numeric_limits<double>::infinity();
  int violations = 0;
  res.trace.reserve(static_cast<size_t>(cfg.epochs) + 1);

  for (int e = 0; e <= cfg.epochs; ++e) {
    const FrozenState frozen = freeze_statistics(m, signals, res.model, basis, cfg);
    for (const auto& s : frozen.stats) violations += s.refinement_violations;
    const bool step = e < cfg.epochs;
    ObjectiveEval ev = evaluate_frozen(m, res.model, basis, frozen, cfg, step);
    if (!std::isfinite(ev.objective)) {
      throw Error(ErrorCode::kNonFinite, "objective is not finite at epoch " + std::to_string(e));
    }
    res.trace.push_back({ev.data_loss, ev.penalty, ev.objective});
    if (ev.objective < best) {
      best = ev.objective;
      best_params = res.model.params;
      res.best_epoch = e;
    }
    if (step) adam.step(res.model.params, ev.grads);
  }

  res.model.params = best_params;
  res.best_objective = best;
  res.gamma = eval_warp_values(res.model, basis);
  const double pre_repair_penalty = monotonicity_penalty_value(res.gamma);
  repair_warp(res.gamma, t_max);

  res.warped.reserve(signals.size());
  for (int i = 0; i < n; ++i) res.warped.push_back(warp_signal_riemannian(m, signals[static_cast<size_t>(i)], res.gamma.col(i), cfg.sinc));
  const SignalMean mean = mean_signal(m, res.warped, cfg.mean);
  res.mean = mean.mean;

  const Feasibility feas = check_feasibility(res.gamma, t_max);
  res.metrics["z_len"] = z_len;
  res.metrics["t_max"] = t_max;
  res.metrics["parameters"] = static_cast<double>(res.model.parameter_count());
  res.metrics["initial_objective"] = res.trace.front().objective;
  res.metrics["best_objective"] = best;
  res.metrics["best_epoch"] = res.best_epoch;
  res.metrics["penalty_before_repair"] = pre_repair_penalty;
  res.metrics["final_data_loss"] = alignment_loss_value(m, res.warped, res.mean, cfg.loss);
  res.metrics["refinement_violations"] = violations;
  res.metrics["mean_max_iterations"] = mean.max_iterations;
  res.metrics["mean_stalled"] = mean.stalled;
  res.metrics["max_step"] = feas.max_step;
  res.metrics["feasible"] = (feas.boundary && feas.monotone && feas.continuity) ? 1.0 : 0.0;
  return res;
}

AlignmentResult align_ttw_mode(const Manifold& m, std::span<const Signal> signals, AlignConfig cfg, int k) {
  cfg.warp = WarpKind::kSineBasis;
  cfg.model.sine_k = k;
  return align(m, signals, cfg);
}

}  // namespace rtw
