#include "iprox/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace iprox {

ImageGradient::ImageGradient(Index side) : side_(side) {
  if (side_ < 1) throw std::invalid_argument("ImageGradient: side must be positive");
}

Vector ImageGradient::apply(const Vector& x) const {
  const Index n = side_;
  if (x.size() != n * n) throw std::invalid_argument("ImageGradient: size mismatch");
  Vector p = Vector::Zero(2 * n * n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const Index idx = i * n + j;
      if (j + 1 < n) p[idx] = x[idx + 1] - x[idx];
      if (i + 1 < n) p[n * n + idx] = x[idx + n] - x[idx];
    }
  }
  return p;
}

Vector ImageGradient::divergence(const Vector& p) const {
  const Index n = side_;
  if (p.size() != 2 * n * n) throw std::invalid_argument("ImageGradient: dual size mismatch");
  Vector d(n * n);
  const double* px = p.data();
  const double* py = p.data() + n * n;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const Index idx = i * n + j;
      double v = 0.0;
      if (j + 1 < n) v += px[idx];
      if (j > 0) v -= px[idx - 1];
      if (i + 1 < n) v += py[idx];
      if (i > 0) v -= py[idx - n];
      d[idx] = v;
    }
  }
  return d;
}

double ImageGradient::total_variation(const Vector& x) const {
  const Index n = side_;
  if (x.size() != n * n) throw std::invalid_argument("ImageGradient: size mismatch");
  double tv = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const Index idx = i * n + j;
      const double gx = j + 1 < n ? x[idx + 1] - x[idx] : 0.0;
      const double gy = i + 1 < n ? x[idx + n] - x[idx] : 0.0;
      tv += std::hypot(gx, gy);
    }
  }
  return tv;
}

GaussianBlur::GaussianBlur(Index side, int kernel_size, double stddev)
    : side_(side), radius_(kernel_size / 2) {
  if (kernel_size < 1 || kernel_size % 2 == 0)
    throw std::invalid_argument("GaussianBlur: kernel size must be odd and positive");
  if (!(stddev > 0.0)) throw std::invalid_argument("GaussianBlur: stddev must be positive");
  if (radius_ > side_) throw std::invalid_argument("GaussianBlur: kernel larger than image");

  // The 2-D kernel is the outer product of this 1-D kernel with itself, so it
  // sums to one as well.
  kernel_.resize(static_cast<std::size_t>(kernel_size));
  double total = 0.0;
  for (int t = -radius_; t <= radius_; ++t) {
    const double w = std::exp(-0.5 * t * t / (stddev * stddev));
    kernel_[static_cast<std::size_t>(t + radius_)] = w;
    total += w;
  }
  for (double& w : kernel_) w /= total;

  taps_.resize(static_cast<std::size_t>(side_ * kernel_size));
  for (Index i = 0; i < side_; ++i) {
    for (int t = -radius_; t <= radius_; ++t) {
      Index src = i + t;
      if (src < 0) src = -1 - src;
      if (src >= side_) src = 2 * side_ - 1 - src;
      taps_[static_cast<std::size_t>(i * kernel_size + t + radius_)] = src;
    }
  }
}

Vector GaussianBlur::apply(const Vector& x) const {
  const Index n = side_;
  if (x.size() != n * n) throw std::invalid_argument("GaussianBlur: size mismatch");
  const int width = 2 * radius_ + 1;
  Vector rows(n * n);
  for (Index i = 0; i < n; ++i) {
    const double* in = x.data() + i * n;
    for (Index j = 0; j < n; ++j) {
      const Index* tap = taps_.data() + j * width;
      double acc = 0.0;
      for (int t = 0; t < width; ++t) acc += kernel_[static_cast<std::size_t>(t)] * in[tap[t]];
      rows[i * n + j] = acc;
    }
  }
  Vector out(n * n);
  for (Index i = 0; i < n; ++i) {
    const Index* tap = taps_.data() + i * width;
    for (Index j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int t = 0; t < width; ++t)
        acc += kernel_[static_cast<std::size_t>(t)] * rows[tap[t] * n + j];
      out[i * n + j] = acc;
    }
  }
  return out;
}

EdgeIncidence::EdgeIncidence(Index vertices, std::vector<std::pair<Index, Index>> edges)
    : vertices_(vertices), edges_(std::move(edges)) {
  if (vertices_ < 1) throw std::invalid_argument("EdgeIncidence: need at least one vertex");
  for (auto& [u, v] : edges_) {
    if (u < 0 || v < 0 || u >= vertices_ || v >= vertices_ || u == v)
      throw std::invalid_argument("EdgeIncidence: invalid edge");
    if (u > v) std::swap(u, v);
  }
}

Vector EdgeIncidence::apply(const Vector& x) const {
  if (x.size() != vertices_) throw std::invalid_argument("EdgeIncidence: vertex size mismatch");
  Vector out(num_edges());
  for (std::size_t e = 0; e < edges_.size(); ++e)
    out[static_cast<Index>(e)] = x[edges_[e].second] - x[edges_[e].first];
  return out;
}

Vector EdgeIncidence::apply_adjoint(const Vector& v) const {
  if (v.size() != num_edges()) throw std::invalid_argument("EdgeIncidence: edge size mismatch");
  Vector out = Vector::Zero(vertices_);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const double w = v[static_cast<Index>(e)];
    out[edges_[e].second] += w;
    out[edges_[e].first] -= w;
  }
  return out;
}

}  // namespace iprox
