#pragma once

#include <span>
#include <vector>

namespace cq {

/// Scalar field on the tensor grid, flat lexicographic storage (last axis fastest).
using Field = std::vector<double>;

/// Uniform tensor grid over the cube [-r, r]^dim with m nodes per axis.
class GridLayout {
 public:
  GridLayout(int dim, double r, int m);

  int dim() const noexcept { return dim_; }
  int m() const noexcept { return m_; }
  double r() const noexcept { return r_; }
  double h() const noexcept { return 2.0 * r_ / (m_ - 1); }
  long long num_nodes() const noexcept { return num_nodes_; }
  long long stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }

  long long flat(std::span<const int> idx) const;
  void multi_index(long long node, std::span<int> idx) const;
  int axis_index(long long node, int axis) const;
  void coords(long long node, std::span<double> x) const;
  double coord_of(int axis_index) const { return -r_ + axis_index * h(); }

  /// Distance to the nearest face in grid steps (0 on the boundary).
  int depth(long long node) const;
  bool is_interior(long long node) const { return depth(node) > 0; }
  long long num_interior() const noexcept;

  Field make_field() const { return Field(static_cast<std::size_t>(num_nodes_), 0.0); }

 private:
  int dim_;
  double r_;
  int m_;
  long long num_nodes_;
  std::vector<long long> strides_;
};

/// Second-order first derivative along `axis`: centered on interior axis
/// indices, one-sided on the two faces.
void apply_d1(const GridLayout& g, const Field& f, int axis, Field& out);

/// Second-order pure second derivative along `axis`.
void apply_d2(const GridLayout& g, const Field& f, int axis, Field& out);

/// Point versions of the stencils above.
double d1_at(const GridLayout& g, const Field& f, int axis, long long node);
double d2_at(const GridLayout& g, const Field& f, int axis, long long node);

/// Packed index into the upper triangle of a symmetric dim x dim tensor.
inline int sym_index(int dim, int i, int j) {
  if (i > j) std::swap(i, j);
  return i * dim - i * (i - 1) / 2 + (j - i);
}

inline int sym_size(int dim) { return dim * (dim + 1) / 2; }

}  // namespace cq
