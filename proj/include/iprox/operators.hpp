#pragma once

// Linear operators used by the benchmark problems and the dual prox solvers.
// Images are stored row-major in a flat Vector of length side*side.

#include "iprox/core.hpp"

#include <cmath>
#include <utility>
#include <vector>

namespace iprox {

// Forward-difference gradient with zero difference across the last row and
// column (Neumann boundary), and its negative adjoint, the divergence:
//   <grad x, p> = -<x, div p>.
// A dual field p stores the two components as [px (side*side), py (side*side)].
class ImageGradient {
public:
  explicit ImageGradient(Index side);

  Index side() const { return side_; }
  Index pixels() const { return side_ * side_; }

  Vector apply(const Vector& x) const;
  Vector divergence(const Vector& p) const;

  // sum_{i,j} ||(grad x)_{i,j}||_2
  double total_variation(const Vector& x) const;

private:
  Index side_;
};

// Separable Gaussian blur with half-sample symmetric boundary extension. With
// a symmetric kernel this operator is self-adjoint.
class GaussianBlur {
public:
  GaussianBlur(Index side, int kernel_size, double stddev);

  Index side() const { return side_; }
  const std::vector<double>& kernel() const { return kernel_; }

  Vector apply(const Vector& x) const;
  Vector apply_adjoint(const Vector& x) const { return apply(x); }

private:
  Index side_;
  int radius_;
  std::vector<double> kernel_;
  // For each output index and tap, the (reflected) input index.
  std::vector<Index> taps_;
};

// Signed edge-incidence operator: (B x)_e = x_v - x_u for edge e = (u, v), u < v.
class EdgeIncidence {
public:
  EdgeIncidence(Index vertices, std::vector<std::pair<Index, Index>> edges);

  Index vertices() const { return vertices_; }
  Index num_edges() const { return static_cast<Index>(edges_.size()); }
  const std::vector<std::pair<Index, Index>>& edges() const { return edges_; }

  Vector apply(const Vector& x) const;
  Vector apply_adjoint(const Vector& v) const;

private:
  Index vertices_;
  std::vector<std::pair<Index, Index>> edges_;
};

// Largest eigenvalue of a symmetric positive semidefinite operator by power
// iteration, started from a fixed deterministic vector.
template <class Op>
double power_iteration(Index dim, Op&& normal_op, int iterations) {
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v[i] = 1.0 + 0.5 * std::sin(1.0 + static_cast<double>(i));
  v.normalize();
  double estimate = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Vector w = normal_op(v);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    estimate = v.dot(w);
    v = w / norm;
  }
  return estimate;
}

}  // namespace iprox
