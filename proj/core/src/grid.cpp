#include "cq/grid.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cq {

GridLayout::GridLayout(int dim, double r, int m) : dim_(dim), r_(r), m_(m) {
  if (dim < 1) throw std::invalid_argument("GridLayout: dim >= 1 required");
  if (!(r > 0.0) || !std::isfinite(r))
    throw std::invalid_argument("GridLayout: r must be positive and finite");
  if (m < 5) throw std::invalid_argument("GridLayout: m >= 5 required");
  if (m % 2 == 0) throw std::invalid_argument("GridLayout: m must be odd");

  strides_.resize(static_cast<std::size_t>(dim));
  long long s = 1;
  for (int a = dim - 1; a >= 0; --a) {
    strides_[static_cast<std::size_t>(a)] = s;
    if (s > std::numeric_limits<long long>::max() / m)
      throw std::invalid_argument("GridLayout: grid too large");
    s *= m;
  }
  num_nodes_ = s;
}

long long GridLayout::flat(std::span<const int> idx) const {
  long long node = 0;
  for (int a = 0; a < dim_; ++a)
    node += static_cast<long long>(idx[static_cast<std::size_t>(a)]) *
            strides_[static_cast<std::size_t>(a)];
  return node;
}

void GridLayout::multi_index(long long node, std::span<int> idx) const {
  for (int a = 0; a < dim_; ++a) {
    idx[static_cast<std::size_t>(a)] =
        static_cast<int>(node / strides_[static_cast<std::size_t>(a)]);
    node %= strides_[static_cast<std::size_t>(a)];
  }
}

int GridLayout::axis_index(long long node, int axis) const {
  return static_cast<int>((node / strides_[static_cast<std::size_t>(axis)]) % m_);
}

void GridLayout::coords(long long node, std::span<double> x) const {
  for (int a = 0; a < dim_; ++a)
    x[static_cast<std::size_t>(a)] = coord_of(axis_index(node, a));
}

int GridLayout::depth(long long node) const {
  int best = m_;
  for (int a = 0; a < dim_; ++a) {
    const int i = axis_index(node, a);
    best = std::min({best, i, m_ - 1 - i});
  }
  return best;
}

long long GridLayout::num_interior() const noexcept {
  long long s = 1;
  for (int a = 0; a < dim_; ++a) s *= (m_ - 2);
  return s;
}

double d1_at(const GridLayout& g, const Field& f, int axis, long long node) {
  const long long s = g.stride(axis);
  const int i = g.axis_index(node, axis);
  const double inv2h = 1.0 / (2.0 * g.h());
  const auto v = [&](long long off) {
    return f[static_cast<std::size_t>(node + off * s)];
  };
  if (i == 0) return (-3.0 * v(0) + 4.0 * v(1) - v(2)) * inv2h;
  if (i == g.m() - 1) return (3.0 * v(0) - 4.0 * v(-1) + v(-2)) * inv2h;
  return (v(1) - v(-1)) * inv2h;
}

double d2_at(const GridLayout& g, const Field& f, int axis, long long node) {
  const long long s = g.stride(axis);
  const int i = g.axis_index(node, axis);
  const double invh2 = 1.0 / (g.h() * g.h());
  const auto v = [&](long long off) {
    return f[static_cast<std::size_t>(node + off * s)];
  };
  if (i == 0) return (2.0 * v(0) - 5.0 * v(1) + 4.0 * v(2) - v(3)) * invh2;
  if (i == g.m() - 1) return (2.0 * v(0) - 5.0 * v(-1) + 4.0 * v(-2) - v(-3)) * invh2;
  return (v(1) - 2.0 * v(0) + v(-1)) * invh2;
}

void apply_d1(const GridLayout& g, const Field& f, int axis, Field& out) {
  out.resize(f.size());
  const long long count = g.num_nodes();
  for (long long node = 0; node < count; ++node)
    out[static_cast<std::size_t>(node)] = d1_at(g, f, axis, node);
}

void apply_d2(const GridLayout& g, const Field& f, int axis, Field& out) {
  out.resize(f.size());
  const long long count = g.num_nodes();
  for (long long node = 0; node < count; ++node)
    out[static_cast<std::size_t>(node)] = d2_at(g, f, axis, node);
}

}  // namespace cq
