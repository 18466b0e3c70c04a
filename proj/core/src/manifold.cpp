#include "rtw/manifold.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rtw/error.hpp"
#include "rtw/spd.hpp"

namespace rtw {

namespace {

constexpr double kAntipodalTol = 1e-9;

void require_finite(ConstVecRef v, const char* what) {
  if (!v.allFinite()) throw Error(ErrorCode::kNonFinite, std::string(what) + " has non-finite entries");
}

int parse_dim(std::string_view text, std::string_view full) {
  int value = 0;
  if (text.empty()) throw Error(ErrorCode::kBadConfig, "missing dimension in manifold '" + std::string(full) + "'");
  for (char c : text) {
    if (c < '0' || c > '9') throw Error(ErrorCode::kBadConfig, "bad dimension in manifold '" + std::string(full) + "'");
    value = value * 10 + (c - '0');
  }
  if (value < 1) throw Error(ErrorCode::kBadConfig, "manifold dimension must be >= 1");
  return value;
}

}  // namespace

namespace sphere {

void exp_map(ConstVecRef base, ConstVecRef u, VecRef out) {
  const double r = u.norm();
  if (r == 0.0) {
    out = base;
    return;
  }
  out = base * std::cos(r) + u * (std::sin(r) / r);
  out /= out.norm();
}

void log_map(ConstVecRef base, ConstVecRef x, VecRef out) {
  const double c = base.dot(x);
  if (c <= -1.0 + kAntipodalTol) {
    throw Error(ErrorCode::kAntipodalPoint, "sphere log map of an antipodal point");
  }
  out = x - c * base;
  const double s = out.norm();
  if (s == 0.0) {
    out.setZero();
    return;
  }
  // atan2 is arccos(c) for unit vectors without the precision loss near c = 1.
  out *= std::atan2(s, c) / s;
}

double distance(ConstVecRef a, ConstVecRef b) {
  const double c = a.dot(b);
  const double s = (b - c * a).norm();
  return std::atan2(s, c);
}

}  // namespace sphere

Manifold::Manifold(Kind kind, int dim, std::vector<Manifold> components)
    : kind_(kind), dim_(dim), ambient_(0), components_(std::move(components)) {
  switch (kind_) {
    case Kind::kEuclidean: ambient_ = dim_; break;
    case Kind::kSphere: ambient_ = dim_ + 1; break;
    case Kind::kSpd: ambient_ = dim_ * dim_; break;
    case Kind::kProduct: {
      for (const auto& c : components_) {
        for (const auto& b : c.blocks_) {
          blocks_.push_back({b.kind, b.dim, ambient_ + b.offset, b.width});
        }
        ambient_ += c.ambient_;
      }
      return;
    }
  }
  blocks_.push_back({kind_, dim_, 0, ambient_});
}

Manifold Manifold::euclidean(int dim) { return Manifold(Kind::kEuclidean, dim, {}); }
Manifold Manifold::sphere(int dim) { return Manifold(Kind::kSphere, dim, {}); }
Manifold Manifold::spd(int dim) { return Manifold(Kind::kSpd, dim, {}); }

Manifold Manifold::product(std::vector<Manifold> components) {
  if (components.empty()) throw Error(ErrorCode::kBadConfig, "product manifold needs components");
  const int n = static_cast<int>(components.size());
  return Manifold(Kind::kProduct, n, std::move(components));
}

Manifold Manifold::pose3d() { return product({euclidean(3), sphere(3)}); }

Manifold Manifold::parse(std::string_view text) {
  if (text == "pose3d") return pose3d();
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorCode::kBadConfig, "manifold must be euclidean:D, sphere:D, spd:D or pose3d, got '" +
                                           std::string(text) + "'");
  }
  const auto name = text.substr(0, colon);
  const int dim = parse_dim(text.substr(colon + 1), text);
  if (name == "euclidean") return euclidean(dim);
  if (name == "sphere") return sphere(dim);
  if (name == "spd") return spd(dim);
  throw Error(ErrorCode::kBadConfig, "unknown manifold '" + std::string(name) + "'");
}

int Manifold::intrinsic_dim() const {
  switch (kind_) {
    case Kind::kEuclidean:
    case Kind::kSphere: return dim_;
    case Kind::kSpd: return dim_ * (dim_ + 1) / 2;
    case Kind::kProduct:
      return std::accumulate(components_.begin(), components_.end(), 0,
                             [](int acc, const Manifold& m) { return acc + m.intrinsic_dim(); });
  }
  return 0;
}

bool Manifold::is_flat() const {
  for (const auto& b : blocks_)
    if (b.kind != Kind::kEuclidean) return false;
  return true;
}

std::string Manifold::to_string() const {
  switch (kind_) {
    case Kind::kEuclidean: return "euclidean:" + std::to_string(dim_);
    case Kind::kSphere: return "sphere:" + std::to_string(dim_);
    case Kind::kSpd: return "spd:" + std::to_string(dim_);
    case Kind::kProduct: {
      if (*this == pose3d()) return "pose3d";
      std::ostringstream os;
      os << "product(";
      for (size_t i = 0; i < components_.size(); ++i) os << (i ? "," : "") << components_[i].to_string();
      os << ")";
      return os.str();
    }
  }
  return "?";
}

bool Manifold::operator==(const Manifold& other) const {
  return kind_ == other.kind_ && dim_ == other.dim_ && components_ == other.components_;
}

Vec Manifold::exp_map(ConstVecRef base, ConstVecRef u) const {
  Vec out(ambient_);
  exp_map(base, u, out);
  return out;
}

void Manifold::exp_map(ConstVecRef base, ConstVecRef u, VecRef out) const {
  require_finite(base, "exp_map base");
  require_finite(u, "exp_map tangent");
  for (const auto& b : blocks_) {
    auto p = base.segment(b.offset, b.width);
    auto v = u.segment(b.offset, b.width);
    auto o = out.segment(b.offset, b.width);
    switch (b.kind) {
      case Kind::kEuclidean: o = p + v; break;
      case Kind::kSphere: sphere::exp_map(p, v, o); break;
      case Kind::kSpd:
        o = spd::to_flat(spd::exp_map(spd::from_flat(p, b.dim), spd::from_flat(v, b.dim)));
        break;
      case Kind::kProduct: break;
    }
  }
}

Vec Manifold::log_map(ConstVecRef base, ConstVecRef x) const {
  Vec out(ambient_);
  log_map(base, x, out);
  return out;
}

void Manifold::log_map(ConstVecRef base, ConstVecRef x, VecRef out) const {
  require_finite(base, "log_map base");
  require_finite(x, "log_map point");
  for (const auto& b : blocks_) {
    auto p = base.segment(b.offset, b.width);
    auto q = x.segment(b.offset, b.width);
    auto o = out.segment(b.offset, b.width);
    switch (b.kind) {
      case Kind::kEuclidean: o = q - p; break;
      case Kind::kSphere: sphere::log_map(p, q, o); break;
      case Kind::kSpd:
        o = spd::to_flat(spd::log_map(spd::from_flat(p, b.dim), spd::from_flat(q, b.dim)));
        break;
      case Kind::kProduct: break;
    }
  }
}

double Manifold::distance(ConstVecRef a, ConstVecRef b) const {
  require_finite(a, "distance argument");
  require_finite(b, "distance argument");
  if (blocks_.size() == 1) {
    const auto& blk = blocks_.front();
    switch (blk.kind) {
      case Kind::kEuclidean: return (a - b).norm();
      case Kind::kSphere: return sphere::distance(a, b);
      case Kind::kSpd: return spd::distance(spd::from_flat(a, blk.dim), spd::from_flat(b, blk.dim));
      case Kind::kProduct: break;
    }
  }
  double acc = 0.0;
  for (const auto& blk : blocks_) {
    auto pa = a.segment(blk.offset, blk.width);
    auto pb = b.segment(blk.offset, blk.width);
    double d = 0.0;
    switch (blk.kind) {
      case Kind::kEuclidean: d = (pa - pb).norm(); break;
      case Kind::kSphere: d = sphere::distance(pa, pb); break;
      case Kind::kSpd: d = spd::distance(spd::from_flat(pa, blk.dim), spd::from_flat(pb, blk.dim)); break;
      case Kind::kProduct: break;
    }
    acc += d * d;
  }
  return std::sqrt(acc);
}

double Manifold::tangent_norm(ConstVecRef base, ConstVecRef u) const {
  double acc = 0.0;
  for (const auto& blk : blocks_) {
    auto v = u.segment(blk.offset, blk.width);
    if (blk.kind == Kind::kSpd) {
      const spd::Roots r = spd::roots(spd::from_flat(base.segment(blk.offset, blk.width), blk.dim));
      acc += (r.inv_sqrt * spd::from_flat(v, blk.dim) * r.inv_sqrt).squaredNorm();
    } else {
      acc += v.squaredNorm();
    }
  }
  return std::sqrt(acc);
}

Vec Manifold::project(ConstVecRef raw) const {
  if (raw.size() != ambient_) {
    throw Error(ErrorCode::kManifestMismatch, "expected " + std::to_string(ambient_) + " coordinates, got " +
                                                  std::to_string(raw.size()));
  }
  require_finite(raw, "raw point");
  Vec out = raw;
  for (const auto& blk : blocks_) {
    auto o = out.segment(blk.offset, blk.width);
    switch (blk.kind) {
      case Kind::kEuclidean: break;
      case Kind::kSphere: {
        const double n = o.norm();
        if (n < 1e-12) throw Error(ErrorCode::kZeroVector, "cannot project a zero vector onto the sphere");
        o /= n;
        break;
      }
      case Kind::kSpd: {
        const Mat sym = spd::symmetrize(spd::from_flat(o, blk.dim));
        const spd::SymEig e = spd::eig(sym);
        if (e.values.minCoeff() >= 1e-9) {
          o = spd::to_flat(sym);
        } else {
          o = spd::to_flat(spd::symmetrize(spd::apply(e, [](double l) { return std::max(l, 1e-9); })));
        }
        break;
      }
      case Kind::kProduct: break;
    }
  }
  return out;
}

bool Manifold::contains(ConstVecRef p, double tol) const {
  if (p.size() != ambient_ || !p.allFinite()) return false;
  for (const auto& blk : blocks_) {
    auto v = p.segment(blk.offset, blk.width);
    switch (blk.kind) {
      case Kind::kEuclidean: break;
      case Kind::kSphere:
        if (std::abs(v.norm() - 1.0) > tol) return false;
        break;
      case Kind::kSpd: {
        const Mat m = spd::from_flat(v, blk.dim);
        if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol) return false;
        if (spd::eig(spd::symmetrize(m)).values.minCoeff() <= 0.0) return false;
        break;
      }
      case Kind::kProduct: break;
    }
  }
  return true;
}

bool Manifold::is_tangent(ConstVecRef base, ConstVecRef u, double tol) const {
  if (u.size() != ambient_ || !u.allFinite()) return false;
  for (const auto& blk : blocks_) {
    auto v = u.segment(blk.offset, blk.width);
    switch (blk.kind) {
      case Kind::kEuclidean: break;
      case Kind::kSphere:
        if (std::abs(v.dot(base.segment(blk.offset, blk.width))) > tol) return false;
        break;
      case Kind::kSpd: {
        const Mat m = spd::from_flat(v, blk.dim);
        if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol) return false;
        break;
      }
      case Kind::kProduct: break;
    }
  }
  return true;
}

double cholesky_distance(ConstVecRef a, ConstVecRef b, int dim) {
  const Mat ma = spd::symmetrize(spd::from_flat(a, dim));
  const Mat mb = spd::symmetrize(spd::from_flat(b, dim));
  Eigen::LLT<Mat> la(ma), lb(mb);
  if (la.info() != Eigen::Success || lb.info() != Eigen::Success) {
    throw Error(ErrorCode::kNotSpd, "Cholesky factorization failed");
  }
  return (Mat(la.matrixL()) - Mat(lb.matrixL())).norm();
}

}  // namespace rtw
