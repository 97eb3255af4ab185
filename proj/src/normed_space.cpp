#include "clipnorm/normed_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace clipnorm {

NormedSpace::NormedSpace(std::size_t dim, double primal_exponent)
    : dim_(dim), q_(primal_exponent), r_(0.0) {
  if (dim == 0) throw std::invalid_argument("NormedSpace: dim must be positive");
  if (!(primal_exponent > 1.0) || !std::isfinite(primal_exponent)) {
    throw std::invalid_argument("NormedSpace: primal exponent must be finite and > 1, got " +
                                std::to_string(primal_exponent));
  }
  r_ = primal_exponent == 2.0 ? 2.0 : primal_exponent / (primal_exponent - 1.0);
}

NormedSpace NormedSpace::from_dual_exponent(std::size_t dim, double dual_exponent) {
  if (!(dual_exponent > 1.0) || !std::isfinite(dual_exponent)) {
    throw std::invalid_argument("NormedSpace: dual exponent must be finite and > 1");
  }
  NormedSpace s(dim, dual_exponent == 2.0 ? 2.0 : dual_exponent / (dual_exponent - 1.0));
  s.r_ = dual_exponent;
  return s;
}

double NormedSpace::smooth_constant() const {
  if (!dual_is_smooth()) {
    throw std::domain_error("NormedSpace: dual l_" + std::to_string(r_) +
                            " norm is not (2,C)-smooth; need dual exponent >= 2");
  }
  return r_ - 1.0;
}

template <class Tag>
BasicVector<Tag>::BasicVector(const NormedSpace& space, std::vector<double> components)
    : space_(space), x_(std::move(components)) {
  if (x_.size() != space_.dim()) {
    throw std::invalid_argument("vector has " + std::to_string(x_.size()) +
                                " components, space has dim " + std::to_string(space_.dim()));
  }
  for (double c : x_) {
    if (!std::isfinite(c)) throw std::domain_error("vector component is not finite");
  }
}

template <class Tag>
bool BasicVector<Tag>::is_zero() const {
  return std::all_of(x_.begin(), x_.end(), [](double c) { return c == 0.0; });
}

template <class Tag>
BasicVector<Tag> BasicVector<Tag>::operator+(const BasicVector& o) const {
  require_same_space(space_, o.space_);
  std::vector<double> out(x_.size());
  for (std::size_t i = 0; i < x_.size(); ++i) out[i] = x_[i] + o.x_[i];
  return BasicVector(space_, std::move(out));
}

template <class Tag>
BasicVector<Tag> BasicVector<Tag>::operator-(const BasicVector& o) const {
  require_same_space(space_, o.space_);
  std::vector<double> out(x_.size());
  for (std::size_t i = 0; i < x_.size(); ++i) out[i] = x_[i] - o.x_[i];
  return BasicVector(space_, std::move(out));
}

template <class Tag>
BasicVector<Tag> BasicVector<Tag>::operator-() const {
  std::vector<double> out(x_.size());
  for (std::size_t i = 0; i < x_.size(); ++i) out[i] = -x_[i];
  return BasicVector(space_, std::move(out));
}

template <class Tag>
BasicVector<Tag> BasicVector<Tag>::operator*(double a) const {
  std::vector<double> out(x_.size());
  for (std::size_t i = 0; i < x_.size(); ++i) out[i] = a * x_[i];
  return BasicVector(space_, std::move(out));
}

template class BasicVector<PrimalTag>;
template class BasicVector<DualTag>;

void require_same_space(const NormedSpace& a, const NormedSpace& b) {
  if (!(a == b)) throw std::invalid_argument("vectors belong to different normed spaces");
}

double lp_norm(std::span<const double> x, double exponent) {
  double m = 0.0;
  for (double c : x) m = std::max(m, std::abs(c));
  if (m == 0.0) return 0.0;
  double acc = 0.0;
  if (exponent == 2.0) {
    for (double c : x) {
      const double u = c / m;
      acc += u * u;
    }
    return m * std::sqrt(acc);
  }
  for (double c : x) acc += std::pow(std::abs(c) / m, exponent);
  return m * std::pow(acc, 1.0 / exponent);
}

double pairing(const DualVector& v, const PrimalVector& w) {
  require_same_space(v.space(), w.space());
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) acc += v[i] * w[i];
  return acc;
}

double primal_norm(const PrimalVector& w) {
  return lp_norm(w.components(), w.space().primal_exponent());
}

double dual_norm(const DualVector& v) { return lp_norm(v.components(), v.space().dual_exponent()); }

PrimalVector duality_map(const DualVector& v) {
  const NormedSpace& space = v.space();
  const double n = dual_norm(v);
  if (n == 0.0) return PrimalVector::zeros(space);
  const double r = space.dual_exponent();
  std::vector<double> d(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double u = v[i] / n;
    d[i] = r == 2.0 ? u : std::copysign(std::pow(std::abs(u), r - 1.0), u);
  }
  return PrimalVector(space, std::move(d));
}

DualVector clip_dual(const DualVector& v, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("clip_dual: tau must be positive");
  const double n = dual_norm(v);
  // A few ulps of slack makes clipping idempotent: a rescaled vector whose
  // recomputed norm rounds just above tau is left alone.
  if (n <= tau * (1.0 + 8.0 * std::numeric_limits<double>::epsilon())) return v;
  return v * (tau / n);
}

PrimalVector grad_squared_dual_norm(const DualVector& x) {
  return duality_map(x) * (2.0 * dual_norm(x));
}

double verify_smooth_norm(const DualVector& x, const DualVector& y) {
  return verify_smooth_norm(x, y, x.space().smooth_constant());
}

double verify_smooth_norm(const DualVector& x, const DualVector& y, double smooth_c) {
  require_same_space(x.space(), y.space());
  const double nx = dual_norm(x);
  const double ny = dual_norm(y);
  const double nxy = dual_norm(x + y);
  const double rhs = nx * nx + pairing(y, grad_squared_dual_norm(x)) + smooth_c * ny * ny;
  return rhs - nxy * nxy;
}

}  // namespace clipnorm
