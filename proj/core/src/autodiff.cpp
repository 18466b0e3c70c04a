#include "rtw/autodiff.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rtw/error.hpp"

namespace rtw::ad {

namespace {

using Index = Eigen::Index;

std::string shape_str(const Tensor& t) {
  return std::to_string(t.rows()) + "x" + std::to_string(t.cols());
}

struct Shape {
  Index rows;
  Index cols;
};

Shape broadcast_shape(const Tensor& a, const Tensor& b) {
  auto fits = [](Index x, Index y) { return x == y || x == 1 || y == 1; };
  if (!fits(a.rows(), b.rows()) || !fits(a.cols(), b.cols())) {
    throw Error(ErrorCode::kShapeMismatch, "cannot broadcast " + shape_str(a) + " with " + shape_str(b));
  }
  return {std::max(a.rows(), b.rows()), std::max(a.cols(), b.cols())};
}

Tensor expand(const Tensor& t, Shape s) {
  if (t.rows() == s.rows && t.cols() == s.cols) return t;
  return t.replicate(s.rows / t.rows(), s.cols / t.cols());
}

// Sums a broadcast gradient back down to the operand's shape.
Tensor reduce_to(const Tensor& g, Index rows, Index cols) {
  if (g.rows() == rows && g.cols() == cols) return g;
  if (rows == 1 && cols == 1) return Tensor::Constant(1, 1, g.sum());
  if (rows == 1) return g.colwise().sum();
  return g.rowwise().sum();
}

double sin_pi(double x) {
  const double r = x - 2.0 * std::round(0.5 * x);
  return std::sin(std::numbers::pi * r);
}

double cos_pi(double x) {
  const double r = x - 2.0 * std::round(0.5 * x);
  return std::cos(std::numbers::pi * r);
}

template <typename F, typename DF>
Var unary(Var a, F f, DF df) {
  Tensor out = a.value().unaryExpr(f);
  return a.tape()->record(std::move(out), {a}, [a, df](const Tensor& g, std::span<Tensor* const> gin) {
    if (gin[0]) *gin[0] += g.cwiseProduct(a.value().unaryExpr(df));
  });
}

}  // namespace

const Tensor& Var::value() const { return tape_->value(id_); }

void Tape::check_owner(Var v) const {
  if (v.tape() != this) throw Error(ErrorCode::kShapeMismatch, "variable belongs to a different tape");
}

Var Tape::leaf(Tensor value) {
  nodes_.push_back({std::move(value), {}, {}, true});
  return Var(this, static_cast<int>(nodes_.size() - 1));
}

Var Tape::constant(Tensor value) {
  nodes_.push_back({std::move(value), {}, {}, false});
  return Var(this, static_cast<int>(nodes_.size() - 1));
}

Var Tape::record(Tensor value, std::initializer_list<Var> inputs, Backward backward) {
  return record(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()), std::move(backward));
}

Var Tape::record(Tensor value, std::span<const Var> inputs, Backward backward) {
  Node node;
  node.value = std::move(value);
  node.inputs.reserve(inputs.size());
  for (const Var& v : inputs) {
    check_owner(v);
    node.inputs.push_back(v.id());
    node.requires_grad = node.requires_grad || nodes_[static_cast<size_t>(v.id())].requires_grad;
  }
  if (node.requires_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<int>(nodes_.size() - 1));
}

double Tape::scalar(Var v) const {
  check_owner(v);
  const Tensor& t = v.value();
  if (t.rows() != 1 || t.cols() != 1) throw Error(ErrorCode::kNotScalar, "expected 1x1, got " + shape_str(t));
  if (!std::isfinite(t(0, 0))) throw Error(ErrorCode::kNonFinite, "loss is not finite");
  return t(0, 0);
}

std::vector<Tensor> Tape::grad(Var loss, std::span<const Var> wrt) const {
  scalar(loss);
  std::vector<Tensor> grads(nodes_.size());
  std::vector<bool> touched(nodes_.size(), false);
  grads[static_cast<size_t>(loss.id())] = Tensor::Ones(1, 1);
  touched[static_cast<size_t>(loss.id())] = true;

  std::vector<Tensor*> gin;
  for (int id = loss.id(); id >= 0; --id) {
    const auto uid = static_cast<size_t>(id);
    const Node& node = nodes_[uid];
    if (!touched[uid] || !node.backward) continue;
    gin.assign(node.inputs.size(), nullptr);
    for (size_t i = 0; i < node.inputs.size(); ++i) {
      const auto in = static_cast<size_t>(node.inputs[i]);
      if (!nodes_[in].requires_grad) continue;
      if (!touched[in]) {
        grads[in] = Tensor::Zero(nodes_[in].value.rows(), nodes_[in].value.cols());
        touched[in] = true;
      }
      gin[i] = &grads[in];
    }
    node.backward(grads[uid], gin);
  }

  std::vector<Tensor> out;
  out.reserve(wrt.size());
  for (const Var& v : wrt) {
    check_owner(v);
    const auto uid = static_cast<size_t>(v.id());
    if (touched[uid]) {
      out.push_back(grads[uid]);
    } else {
      out.push_back(Tensor::Zero(nodes_[uid].value.rows(), nodes_[uid].value.cols()));
    }
  }
  return out;
}

Var add(Var a, Var b) {
  const Shape s = broadcast_shape(a.value(), b.value());
  Tensor out = expand(a.value(), s) + expand(b.value(), s);
  return a.tape()->record(std::move(out), {a, b}, [a, b](const Tensor& g, std::span<Tensor* const> gin) {
    if (gin[0]) *gin[0] += reduce_to(g, a.rows(), a.cols());
    if (gin[1]) *gin[1] += reduce_to(g, b.rows(), b.cols());
  });
}

Var sub(Var a, Var b) {
  const Shape s = broadcast_shape(a.value(), b.value());
  Tensor out = expand(a.value(), s) - expand(b.value(), s);
  return a.tape()->record(std::move(out), {a, b}, [a, b](const Tensor& g, std::span<Tensor* const> gin) {
    if (gin[0]) *gin[0] += reduce_to(g, a.rows(), a.cols());
    if (gin[1]) *gin[1] -= reduce_to(g, b.rows(), b.cols());
  });
}

Var mul(Var a, Var b) {
  const Shape s = broadcast_shape(a.value(), b.value());
  Tensor out = expand(a.value(), s).cwiseProduct(expand(b.value(), s));
  return a.tape()->record(std::move(out), {a, b}, [a, b, s](const Tensor& g, std::span<Tensor* const> gin) {
    if (gin[0]) *gin[0] += reduce_to(g.cwiseProduct(expand(b.value(), s)), a.rows(), a.cols());
    if (gin[1]) *gin[1] += reduce_to(g.cwiseProduct(expand(a.value(), s)), b.rows(), b.cols());
  });
}

Var div(Var a, Var b) {
  const Shape s = broadcast_shape(a.value(), b.value());
  Tensor out = expand(a.value(), s).cwiseQuotient(expand(b.value(), s));
  return a.tape()->record(std::move(out), {a, b}, [a, b, s](const Tensor& g, std::span<Tensor* const> gin) {
    const Tensor bb = expand(b.value(), s);
    if (gin[0]) *gin[0] += reduce_to(g.cwiseQuotient(bb), a.rows(), a.cols());
    if (gin[1]) {
      const Tensor aa = expand(a.value(), s);
      *gin[1] -= reduce_to(g.cwiseProduct(aa).cwiseQuotient(bb.cwiseProduct(bb)), b.rows(), b.cols());
    }
  });
}

Var neg(Var a) { return scale(a, -1.0); }

Var scale(Var a, double s) {
  return a.tape()->record(a.value() * s, {a}, [s](const Tensor& g, std::span<Tensor* const> gin) {
    if (gin[0]) *gin[0] += g * s;
  });
}

Var shift(Var a, double s) {
  Tensor out = a.value().array() + s;
  return a.tape()->record(std::move(out), {a}, [](const Tensor& g, std::span<Tensor* const> gin) {
    if (gin[0]) *gin[0] += g;
  });
}

Var matmul(Var a, Var b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "matmul " + shape_str(a.value()) + " by " + shape_str(b.value()));
  }
  Tensor out = a.value() * b.value();
  return a.tape()->record(std::move(out), {a, b}, [a, b](const Tensor& g, std::span<Tensor* const> gin) {
    if (gin[0]) gin[0]->noalias() += g * b.value().transpose();
    if (gin[1]) gin[1]->noalias() += a.value().transpose() * g;
  });
}

Var transpose(Var a) {
  return a.tape()->record(a.value().transpose(), {a}, [](const Tensor& g, std::span<Tensor* const> gin) {
    if (gin[0]) *gin[0] += g.transpose();
  });
}

Var sum(Var a) {
  return a.tape()->record(Tensor::Constant(1, 1, a.value().sum()), {a},
                          [a](const Tensor& g, std::span<Tensor* const> gin) {
                            if (gin[0]) gin[0]->array() += g(0, 0);
                          });
}

Var mean(Var a) {
  const double n = static_cast<double>(a.value().size());
  return scale(sum(a), 1.0 / n);
}

Var row_sum(Var a) {
  Tensor out = a.value().rowwise().sum();
  return a.tape()->record(std::move(out), {a}, [a](const Tensor& g, std::span<Tensor* const> gin) {
    if (gin[0]) *gin[0] += g.replicate(1, a.cols());
  });
}

Var col_sum(Var a) {
  Tensor out = a.value().colwise().sum();
  return a.tape()->record(std::move(out), {a}, [a](const Tensor& g, std::span<Tensor* const> gin) {
    if (gin[0]) *gin[0] += g.replicate(a.rows(), 1);
  });
}

Var norm(Var a) {
  const double n = a.value().norm();
  return a.tape()->record(Tensor::Constant(1, 1, n), {a}, [a, n](const Tensor& g, std::span<Tensor* const> gin) {
    if (gin[0] && n > 0.0) *gin[0] += a.value() * (g(0, 0) / n);
  });
}

Var row_norms(Var a) {
  Tensor out = a.value().rowwise().norm();
  Tensor norms = out;
  return a.tape()->record(std::move(out), {a},
                          [a, norms](const Tensor& g, std::span<Tensor* const> gin) {
                            if (!gin[0]) return;
                            for (Index r = 0; r < norms.rows(); ++r) {
                              if (norms(r, 0) > 0.0) gin[0]->row(r) += a.value().row(r) * (g(r, 0) / norms(r, 0));
                            }
                          });
}

Var relu(Var a) {
  return unary(a, [](double x) { return x > 0.0 ? x : 0.0; }, [](double x) { return x > 0.0 ? 1.0 : 0.0; });
}

Var clamp(Var a, double lo, double hi) {
  return unary(
      a, [lo, hi](double x) { return std::clamp(x, lo, hi); },
      [lo, hi](double x) { return (x >= lo && x <= hi) ? 1.0 : 0.0; });
}

Var sin(Var a) {
  return unary(a, [](double x) { return std::sin(x); }, [](double x) { return std::cos(x); });
}

Var cos(Var a) {
  return unary(a, [](double x) { return std::cos(x); }, [](double x) { return -std::sin(x); });
}

Var acos(Var a) {
  static constexpr double lo = -1.0 + kAcosClamp;
  static constexpr double hi = 1.0 - kAcosClamp;
  return unary(
      a, [](double x) { return std::acos(std::clamp(x, lo, hi)); },
      [](double x) { return (x >= lo && x <= hi) ? -1.0 / std::sqrt(1.0 - x * x) : 0.0; });
}

Var sqrt(Var a) {
  return unary(a, [](double x) { return std::sqrt(x); },
               [](double x) { return x > 0.0 ? 0.5 / std::sqrt(x) : 0.0; });
}

Var exp(Var a) {
  return unary(a, [](double x) { return std::exp(x); }, [](double x) { return std::exp(x); });
}

Var log(Var a) {
  return unary(a, [](double x) { return std::log(x); }, [](double x) { return 1.0 / x; });
}

Var pow(Var a, double p) {
  return unary(a, [p](double x) { return std::pow(x, p); },
               [p](double x) { return p * std::pow(x, p - 1.0); });
}

double sinc_value(double x) {
  if (x == 0.0) return 1.0;
  if (x == std::round(x)) return 0.0;
  return sin_pi(x) / (std::numbers::pi * x);
}

double sinc_derivative(double x) {
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  if (std::abs(x) < 1e-4) {
    return x * (-pi2 / 3.0 + pi2 * pi2 * x * x / 30.0);
  }
  return (cos_pi(x) - sinc_value(x)) / x;
}

Var sinc(Var a) { return unary(a, sinc_value, sinc_derivative); }

Var slice_rows(Var a, Index start, Index count) {
  if (start < 0 || count < 0 || start + count > a.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "row slice out of range for " + shape_str(a.value()));
  }
  Tensor out = a.value().middleRows(start, count);
  return a.tape()->record(std::move(out), {a}, [start, count](const Tensor& g, std::span<Tensor* const> gin) {
    if (gin[0]) gin[0]->middleRows(start, count) += g;
  });
}

Var slice_cols(Var a, Index start, Index count) {
  if (start < 0 || count < 0 || start + count > a.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "column slice out of range for " + shape_str(a.value()));
  }
  Tensor out = a.value().middleCols(start, count);
  return a.tape()->record(std::move(out), {a}, [start, count](const Tensor& g, std::span<Tensor* const> gin) {
    if (gin[0]) gin[0]->middleCols(start, count) += g;
  });
}

Var col(Var a, Index j) { return slice_cols(a, j, 1); }

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw Error(ErrorCode::kShapeMismatch, "concat of zero tensors");
  const Index rows = parts.front().rows();
  Index cols = 0;
  for (const Var& p : parts) {
    if (p.rows() != rows) throw Error(ErrorCode::kShapeMismatch, "concat_cols row mismatch");
    cols += p.cols();
  }
  Tensor out(rows, cols);
  std::vector<Index> offsets;
  Index off = 0;
  for (const Var& p : parts) {
    out.middleCols(off, p.cols()) = p.value();
    offsets.push_back(off);
    off += p.cols();
  }
  std::vector<Index> widths;
  for (const Var& p : parts) widths.push_back(p.cols());
  return parts.front().tape()->record(
      std::move(out), parts, [offsets, widths](const Tensor& g, std::span<Tensor* const> gin) {
        for (size_t i = 0; i < gin.size(); ++i) {
          if (gin[i]) *gin[i] += g.middleCols(offsets[i], widths[i]);
        }
      });
}

}  // namespace rtw::ad
