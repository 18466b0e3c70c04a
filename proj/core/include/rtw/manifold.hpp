#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rtw/types.hpp"

namespace rtw {

// Geometry descriptor for Euclidean space, unit spheres, SPD matrices and
// products thereof. Points and tangent vectors are stored as flat ambient
// coordinate vectors:
//   Euclidean(D): D entries
//   Sphere(D):    D+1 entries (unit vector)
//   Spd(D):       D*D entries (row-major matrix)
//   Product:      concatenation of the component layouts
class Manifold {
 public:
  enum class Kind { kEuclidean, kSphere, kSpd, kProduct };

  // A leaf (non-product) component and the columns it occupies.
  struct Block {
    Kind kind;
    int dim;
    int offset;
    int width;
  };

  static Manifold euclidean(int dim);
  static Manifold sphere(int dim);
  static Manifold spd(int dim);
  static Manifold product(std::vector<Manifold> components);
  // R^3 x S^3: position plus unit quaternion.
  static Manifold pose3d();

  // Parses "euclidean:D", "sphere:D", "spd:D" or "pose3d".
  static Manifold parse(std::string_view text);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  int ambient_dim() const { return ambient_; }
  int intrinsic_dim() const;
  const std::vector<Manifold>& components() const { return components_; }
  std::span<const Block> blocks() const { return blocks_; }
  bool is_flat() const;
  std::string to_string() const;

  bool operator==(const Manifold& other) const;

  Vec exp_map(ConstVecRef base, ConstVecRef u) const;
  void exp_map(ConstVecRef base, ConstVecRef u, VecRef out) const;

  Vec log_map(ConstVecRef base, ConstVecRef x) const;
  void log_map(ConstVecRef base, ConstVecRef x, VecRef out) const;

  double distance(ConstVecRef a, ConstVecRef b) const;

  // Norm of u under the Riemannian metric at base.
  double tangent_norm(ConstVecRef base, ConstVecRef u) const;

  // Sanitizes raw coordinates onto the manifold (normalize / symmetrize and
  // clamp eigenvalues). Euclidean coordinates pass through.
  Vec project(ConstVecRef raw) const;

  bool contains(ConstVecRef p, double tol = 1e-9) const;
  bool is_tangent(ConstVecRef base, ConstVecRef u, double tol = 1e-9) const;

  Vec zero_tangent() const { return Vec::Zero(ambient_); }

 private:
  Manifold(Kind kind, int dim, std::vector<Manifold> components);

  Kind kind_;
  int dim_;
  int ambient_;
  std::vector<Manifold> components_;
  std::vector<Block> blocks_;
};

// Sphere helpers on raw coordinate blocks.
namespace sphere {
void exp_map(ConstVecRef base, ConstVecRef u, VecRef out);
void log_map(ConstVecRef base, ConstVecRef x, VecRef out);
double distance(ConstVecRef a, ConstVecRef b);
}  // namespace sphere

// Frobenius distance between lower Cholesky factors of two SPD(D) points.
double cholesky_distance(ConstVecRef a, ConstVecRef b, int dim);

}  // namespace rtw
