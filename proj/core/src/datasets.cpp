#include "rtw/datasets.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "rtw/error.hpp"

namespace rtw {

namespace {

constexpr double kPi = std::numbers::pi;

double ramp(double s) { return 2.0 * s - 1.0; }
double double_lobe(double s) { return std::sin(kPi * s) * std::sin(2.0 * kPi * s) * 1.5; }

}  // namespace

Signal s1_base_signal(int t_len) {
  if (t_len < 1) throw Error(ErrorCode::kBadConfig, "base signal length must be >= 1");
  Signal s(t_len, 2);
  for (int t = 0; t < t_len; ++t) {
    const double u = static_cast<double>(t) / t_len;
    const double phi = 0.8 * std::sin(2.0 * kPi * u) + 0.4 * std::sin(4.0 * kPi * u);
    s(t, 0) = std::cos(phi);
    s(t, 1) = std::sin(phi);
  }
  return s;
}

Vec dataset_warp(int t_len, std::uint64_t seed, WarpFamily family) {
  if (t_len < 2) throw Error(ErrorCode::kBadConfig, "dataset signals need T >= 2");
  const Vec fine = generate_random_warp(2 * (t_len - 1) + 1, t_len, seed, family);
  Vec g(t_len);
  for (int t = 0; t < t_len; ++t) g[t] = fine[2 * t];
  return g;
}

WarpedDataset inverted_warp_dataset(const Manifold& m, const Signal& base, int n, std::uint64_t seed,
                                    WarpFamily family, const SincConfig& sinc) {
  if (n < 1) throw Error(ErrorCode::kBadConfig, "dataset needs N >= 1");
  if (base.cols() != m.ambient_dim()) throw Error(ErrorCode::kShapeMismatch, "base signal does not match manifold");
  const int t_len = static_cast<int>(base.rows());
  WarpedDataset d{SignalSet{m, {}, {}}, base, {}};
  for (int i = 0; i < n; ++i) {
    Vec g = dataset_warp(t_len, mix_seed(seed, static_cast<std::uint64_t>(i)), family);
    d.set.signals.push_back(warp_signal_riemannian(m, base, g, sinc));
    d.warps.push_back(std::move(g));
  }
  return d;
}

Vec robot_reference_joints(int links, double s) {
  Vec q(links);
  const double w = 2.0 * kPi * s;
  for (int i = 0; i < links; ++i) {
    if (i == 0) {
      q[i] = 0.3 + 0.6 * std::sin(w);
    } else {
      // Elbows stay inside (0.4, 1.6) rad, away from the straight-arm singularity.
      q[i] = 1.0 + 0.5 * std::sin(w * (1.0 + 0.5 * (i - 1)) + 1.0 * i) / std::sqrt(static_cast<double>(i));
    }
  }
  return q;
}

WarpedDataset robot_manipulability_dataset(int n, int t_len, std::uint64_t seed, int links, WarpFamily family,
                                           double joint_noise) {
  if (n < 1 || t_len < 2 || links < 2) throw Error(ErrorCode::kBadConfig, "robot dataset needs N>=1, T>=2, links>=2");
  const PlanarRobot robot = PlanarRobot::uniform(links);
  const Manifold m = Manifold::spd(2);
  auto sample = [&](const Vec& times, const Vec& offset) {
    Signal s(t_len, 4);
    for (int t = 0; t < t_len; ++t) {
      const Vec q = robot_reference_joints(links, times[t]) + offset;
      s.row(t) = manipulability(planar_fk_jacobian(robot, q).jacobian).transpose();
    }
    return s;
  };
  WarpedDataset d{SignalSet{m, {}, {}}, Signal(), {}};
  Vec identity(t_len);
  for (int t = 0; t < t_len; ++t) identity[t] = static_cast<double>(t) / (t_len - 1);
  d.base = sample(identity, Vec::Zero(links));
  for (int i = 0; i < n; ++i) {
    const std::uint64_t s = mix_seed(seed, static_cast<std::uint64_t>(i));
    Vec g = dataset_warp(t_len, s, family);
    std::mt19937_64 rng(mix_seed(s, 1));
    std::uniform_real_distribution<double> u(-joint_noise, joint_noise);
    Vec offset(links);
    for (int k = 0; k < links; ++k) offset[k] = u(rng);
    d.set.signals.push_back(sample(g, offset));
    d.warps.push_back(std::move(g));
  }
  return d;
}

ClassificationData two_class_dataset(int t_len, int train_per_class, int test_per_class, std::uint64_t seed) {
  if (t_len < 2 || train_per_class < 1 || test_per_class < 1) {
    throw Error(ErrorCode::kBadConfig, "two-class dataset needs T >= 2 and at least one signal per class and split");
  }
  ClassificationData out{SignalSet{Manifold::euclidean(1), {}, {}}, SignalSet{Manifold::euclidean(1), {}, {}}};
  std::uint64_t stream = 0;
  auto make = [&](int label) {
    const std::uint64_t s = mix_seed(seed, stream++);
    const Vec g = dataset_warp(t_len, s, WarpFamily::kMixed);
    std::mt19937_64 rng(mix_seed(s, 7));
    std::uniform_real_distribution<double> amp(0.9, 1.1);
    std::normal_distribution<double> noise(0.0, 0.02);
    const double a = amp(rng);
    Signal x(t_len, 1);
    for (int t = 0; t < t_len; ++t) {
      const double v = label == 0 ? ramp(g[t]) : double_lobe(g[t]);
      x(t, 0) = a * v + noise(rng);
    }
    return x;
  };
  for (int c = 0; c < 2; ++c) {
    for (int i = 0; i < train_per_class; ++i) {
      out.train.signals.push_back(make(c));
      out.train.labels.push_back(c);
    }
  }
  for (int c = 0; c < 2; ++c) {
    for (int i = 0; i < test_per_class; ++i) {
      out.test.signals.push_back(make(c));
      out.test.labels.push_back(c);
    }
  }
  return out;
}

Signal lift_planar_to_sphere(const Signal& xy, double scale, int sphere_dim) {
  if (xy.cols() != 2) throw Error(ErrorCode::kShapeMismatch, "lift expects planar (x, y) rows");
  if (sphere_dim != 2 && sphere_dim != 3) throw Error(ErrorCode::kBadConfig, "lift supports S^2 and S^3");
  if (!xy.allFinite() || !std::isfinite(scale)) throw Error(ErrorCode::kNonFinite, "lift input is not finite");
  Signal out(xy.rows(), sphere_dim + 1);
  for (Eigen::Index t = 0; t < xy.rows(); ++t) {
    const double x = xy(t, 0);
    const double y = xy(t, 1);
    const double r = scale * std::hypot(x, y);
    const double theta = std::atan2(y, x);
    const double sr = std::sin(r);
    Vec p = Vec::Zero(sphere_dim + 1);
    p[0] = sr * std::cos(theta);
    p[1] = sr * std::sin(theta);
    p[sphere_dim] = std::cos(r);
    p /= p.norm();
    if (sphere_dim == 3 && t > 0 && p.dot(out.row(t - 1).transpose()) < 0.0) p = -p;
    out.row(t) = p.transpose();
  }
  return out;
}

}  // namespace rtw
