#include "rtw/adam.hpp"

#include <cmath>

#include "rtw/error.hpp"

namespace rtw {

void Adam::reset() {
  step_ = 0;
  m_.clear();
  v_.clear();
}

void Adam::step(std::span<ad::Tensor> params, std::span<const ad::Tensor> grads) {
  if (params.size() != grads.size()) {
    throw Error(ErrorCode::kShapeMismatch, "Adam: parameter and gradient counts differ");
  }
  if (m_.empty()) {
    for (const auto& p : params) {
      m_.push_back(ad::Tensor::Zero(p.rows(), p.cols()));
      v_.push_back(ad::Tensor::Zero(p.rows(), p.cols()));
    }
  }
  if (m_.size() != params.size()) throw Error(ErrorCode::kShapeMismatch, "Adam: parameter count changed");
  for (size_t i = 0; i < params.size(); ++i) {
    if (params[i].rows() != grads[i].rows() || params[i].cols() != grads[i].cols() ||
        params[i].rows() != m_[i].rows() || params[i].cols() != m_[i].cols()) {
      throw Error(ErrorCode::kShapeMismatch, "Adam: gradient shape does not match parameter");
    }
    if (!grads[i].allFinite()) throw Error(ErrorCode::kNonFinite, "Adam: non-finite gradient");
  }

  ++step_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  for (size_t i = 0; i < params.size(); ++i) {
    m_[i] = b1 * m_[i] + (1.0 - b1) * grads[i];
    v_[i] = b2 * v_[i] + (1.0 - b2) * grads[i].cwiseProduct(grads[i]);
    const auto m_hat = m_[i].array() / c1;
    const auto v_hat = v_[i].array() / c2;
    params[i].array() -= config_.lr * m_hat / (v_hat.sqrt() + config_.eps);
  }
}

}  // namespace rtw
