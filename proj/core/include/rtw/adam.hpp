#pragma once

#include <span>
#include <vector>

#include "rtw/autodiff.hpp"

namespace rtw {

struct AdamConfig {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam with bias correction. Holds one pair of moment tensors per parameter
// tensor.
class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  const AdamConfig& config() const { return config_; }
  long step_count() const { return step_; }
  const std::vector<ad::Tensor>& first_moment() const { return m_; }
  const std::vector<ad::Tensor>& second_moment() const { return v_; }

  // Updates params in place. Shapes must match the first call.
  void step(std::span<ad::Tensor> params, std::span<const ad::Tensor> grads);

  void reset();

 private:
  AdamConfig config_;
  long step_ = 0;
  std::vector<ad::Tensor> m_;
  std::vector<ad::Tensor> v_;
};

}  // namespace rtw
