#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

// Reverse-mode differentiation over dense real matrices.
//
// A Tape records primitive operations in execution order. Every recorded node
// stores its forward value and a backward rule that maps the gradient of the
// node to gradients of its inputs. Binary elementwise ops broadcast 1x1
// scalars, 1xC rows and Rx1 columns.
namespace rtw::ad {

using Tensor = Eigen::MatrixXd;

class Tape;

class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  int id() const { return id_; }
  Tape* tape() const { return tape_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  int id_ = -1;
};

// grad_in[i] is null when input i does not need a gradient. Rules accumulate
// (+=) into the non-null entries.
using Backward = std::function<void(const Tensor& grad_out, std::span<Tensor* const> grad_in)>;

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Differentiable input.
  Var leaf(Tensor value);
  // Input that never receives a gradient.
  Var constant(Tensor value);
  Var record(Tensor value, std::initializer_list<Var> inputs, Backward backward);
  Var record(Tensor value, std::span<const Var> inputs, Backward backward);

  const Tensor& value(int id) const { return nodes_[static_cast<size_t>(id)].value; }
  bool requires_grad(Var v) const { return nodes_[static_cast<size_t>(v.id())].requires_grad; }
  size_t size() const { return nodes_.size(); }

  // Value of a 1x1 node; throws NotScalar or NonFinite.
  double scalar(Var v) const;

  // d loss / d wrt for a scalar loss. Inputs the loss does not depend on get
  // zero gradients.
  std::vector<Tensor> grad(Var loss, std::span<const Var> wrt) const;

 private:
  struct Node {
    Tensor value;
    std::vector<int> inputs;
    Backward backward;
    bool requires_grad = false;
  };

  void check_owner(Var v) const;

  std::vector<Node> nodes_;
};

// Elementwise arithmetic (broadcasting).
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var div(Var a, Var b);
Var neg(Var a);
Var scale(Var a, double s);
Var shift(Var a, double s);

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(Var a, Var b) { return mul(a, b); }
inline Var operator/(Var a, Var b) { return div(a, b); }
inline Var operator-(Var a) { return neg(a); }
inline Var operator*(double s, Var a) { return scale(a, s); }
inline Var operator*(Var a, double s) { return scale(a, s); }

Var matmul(Var a, Var b);
Var transpose(Var a);

// Reductions.
Var sum(Var a);       // 1x1
Var mean(Var a);      // 1x1
Var row_sum(Var a);   // Rx1
Var col_sum(Var a);   // 1xC
Var norm(Var a);      // Frobenius norm, 1x1; subgradient 0 at 0
Var row_norms(Var a); // Rx1 Euclidean norms of rows; subgradient 0 at 0

// Elementwise functions.
Var relu(Var a);  // max(x, 0); derivative at 0 is 0
Var clamp(Var a, double lo, double hi);
Var sin(Var a);
Var cos(Var a);
Var acos(Var a);  // argument clamped to [-1+1e-12, 1-1e-12]
Var sqrt(Var a);
Var exp(Var a);
Var log(Var a);
Var pow(Var a, double p);
Var sinc(Var a);  // sin(pi x)/(pi x), sinc(0) = 1

// Shape manipulation.
Var slice_rows(Var a, Eigen::Index start, Eigen::Index count);
Var slice_cols(Var a, Eigen::Index start, Eigen::Index count);
Var col(Var a, Eigen::Index j);
Var concat_cols(std::span<const Var> parts);

// Scalar helpers shared with non-tape code.
double sinc_value(double x);
double sinc_derivative(double x);

inline constexpr double kAcosClamp = 1e-12;

}  // namespace rtw::ad
