#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace clipnorm {

// Finite-dimensional l_q primal space paired with its l_r dual, 1/q + 1/r = 1.
//
// The dual norm ||.||_r is (2, C)-smooth exactly when r >= 2, with C = r - 1
// (C = 1 for the Euclidean case).  Norm and duality computations work for
// any finite conjugate pair; smoothness-dependent routines require
// dual_is_smooth().
class NormedSpace {
 public:
  NormedSpace(std::size_t dim, double primal_exponent);

  static NormedSpace euclidean(std::size_t dim) { return {dim, 2.0}; }
  // Space whose dual norm is l_r.
  static NormedSpace from_dual_exponent(std::size_t dim, double dual_exponent);

  std::size_t dim() const { return dim_; }
  double primal_exponent() const { return q_; }
  double dual_exponent() const { return r_; }
  static constexpr double smooth_p() { return 2.0; }
  bool dual_is_smooth() const { return r_ >= 2.0; }
  // C of the (2, C)-smooth dual; throws std::domain_error when r < 2.
  double smooth_constant() const;

  friend bool operator==(const NormedSpace&, const NormedSpace&) = default;

 private:
  std::size_t dim_;
  double q_;
  double r_;
};

struct PrimalTag;
struct DualTag;

// Immutable coordinate vector tagged with its owning space.  Every
// constructor rejects non-finite components, so no public operation can
// leave a NaN/Inf behind silently.
template <class Tag>
class BasicVector {
 public:
  BasicVector(const NormedSpace& space, std::vector<double> components);

  static BasicVector zeros(const NormedSpace& space) {
    return BasicVector(space, std::vector<double>(space.dim(), 0.0));
  }

  const NormedSpace& space() const { return space_; }
  std::size_t size() const { return x_.size(); }
  std::span<const double> components() const { return x_; }
  double operator[](std::size_t i) const { return x_[i]; }
  bool is_zero() const;

  BasicVector operator+(const BasicVector& o) const;
  BasicVector operator-(const BasicVector& o) const;
  BasicVector operator-() const;
  BasicVector operator*(double a) const;
  friend BasicVector operator*(double a, const BasicVector& v) { return v * a; }

  friend bool operator==(const BasicVector&, const BasicVector&) = default;

 private:
  NormedSpace space_;
  std::vector<double> x_;
};

using PrimalVector = BasicVector<PrimalTag>;
using DualVector = BasicVector<DualTag>;

extern template class BasicVector<PrimalTag>;
extern template class BasicVector<DualTag>;

// Throws std::invalid_argument unless both vectors live in the same space.
void require_same_space(const NormedSpace& a, const NormedSpace& b);

// ||x||_exponent with max-factoring, so heavy-tailed inputs do not overflow.
double lp_norm(std::span<const double> x, double exponent);

// <v, w>: application of a dual vector to a primal vector.
double pairing(const DualVector& v, const PrimalVector& w);

double primal_norm(const PrimalVector& w);
double dual_norm(const DualVector& v);

// Unit primal vector d(v) with <v, d(v)> = ||v||_*.  d(0) = 0.
PrimalVector duality_map(const DualVector& v);

// v * min(tau, ||v||_*) / ||v||_*.  Throws std::invalid_argument if tau <= 0.
DualVector clip_dual(const DualVector& v, double tau);

// Gradient of ||x||_*^2 as a primal vector: 2 ||x||_* d(x).
PrimalVector grad_squared_dual_norm(const DualVector& x);

// RHS - LHS of ||x+y||^2 <= ||x||^2 + <grad ||x||^2, y> + C ||y||^2 on the
// dual norm.  The first overload takes C from the space.
double verify_smooth_norm(const DualVector& x, const DualVector& y);
double verify_smooth_norm(const DualVector& x, const DualVector& y, double smooth_c);

}  // namespace clipnorm
