#pragma once

#include <cstdint>
#include <vector>

#include "rtw/manifold.hpp"
#include "rtw/resample.hpp"
#include "rtw/robot.hpp"
#include "rtw/signal_io.hpp"
#include "rtw/warp_generator.hpp"

namespace rtw {

// Signals generated from a base by random warps, with the warps kept as
// ground truth (one length-T warp per signal).
struct WarpedDataset {
  SignalSet set;
  Signal base;
  std::vector<Vec> warps;
};

// S^1 angle trace phi(t) = 0.8 sin(2 pi t/T) + 0.4 sin(4 pi t/T), t = 0..T-1,
// as points (cos phi, sin phi).
Signal s1_base_signal(int t_len);

// Length-T warp: a generator warp on the grid of length 2(T-1)+1 (step cap
// 1/T) subsampled with stride 2.
Vec dataset_warp(int t_len, std::uint64_t seed, WarpFamily family);

// Warps base through N random warps with Riemannian sinc resampling.
WarpedDataset inverted_warp_dataset(const Manifold& m, const Signal& base, int n, std::uint64_t seed,
                                    WarpFamily family = WarpFamily::kMixed, const SincConfig& sinc = {});

// Manipulability J J^T of a planar robot following a smooth joint trajectory,
// sampled at randomly warped times with a small constant joint offset per
// signal. base is the unwarped, offset-free trajectory.
WarpedDataset robot_manipulability_dataset(int n, int t_len, std::uint64_t seed, int links = 3,
                                           WarpFamily family = WarpFamily::kMixed, double joint_noise = 0.05);

// Joint configuration of the reference trajectory at normalized time s.
Vec robot_reference_joints(int links, double s);

struct ClassificationData {
  SignalSet train;
  SignalSet test;
};

// Two R^1 classes (ramps and double lobes) with random warps, amplitude
// jitter and small noise.
ClassificationData two_class_dataset(int t_len, int train_per_class, int test_per_class, std::uint64_t seed);

// Azimuthal equidistant lift: a planar point at radius r and angle theta
// maps to geodesic distance scale*r from the north pole. sphere_dim is 2 or
// 3; the S^3 variant pads a zero coordinate and fixes the sign by continuity.
Signal lift_planar_to_sphere(const Signal& xy, double scale, int sphere_dim = 2);

}  // namespace rtw
