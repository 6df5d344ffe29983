#include "cq/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "cq/quotient.hpp"

namespace cq {

GraphPatch::GraphPatch(GridLayout g, Field values)
    : grid(std::move(g)), u(std::move(values)) {
  if (static_cast<long long>(u.size()) != grid.num_nodes())
    throw std::invalid_argument("GraphPatch: field size does not match grid");
}

GeometryFields::GeometryFields(GridLayout g) : grid(g) {}

Eigen::VectorXd GeometryFields::gradient_at(long long node) const {
  const int dim = grid.dim();
  Eigen::VectorXd p(dim);
  for (int a = 0; a < dim; ++a)
    p[a] = du[static_cast<std::size_t>(a)][static_cast<std::size_t>(node)];
  return p;
}

Eigen::MatrixXd GeometryFields::hessian_at(long long node) const {
  const int dim = grid.dim();
  Eigen::MatrixXd s(dim, dim);
  for (int a = 0; a < dim; ++a)
    for (int b = a; b < dim; ++b) {
      const double v = d2u[static_cast<std::size_t>(sym_index(dim, a, b))]
                          [static_cast<std::size_t>(node)];
      s(a, b) = v;
      s(b, a) = v;
    }
  return s;
}

Eigen::MatrixXd GeometryFields::shape_at(long long node) const {
  const int dim = grid.dim();
  Eigen::MatrixXd s(dim, dim);
  for (int a = 0; a < dim; ++a)
    for (int b = a; b < dim; ++b) {
      const double v = shape[static_cast<std::size_t>(sym_index(dim, a, b))]
                            [static_cast<std::size_t>(node)];
      s(a, b) = v;
      s(b, a) = v;
    }
  return s;
}

std::vector<double> GeometryFields::curvatures_at(long long node) const {
  std::vector<double> out(static_cast<std::size_t>(grid.dim()));
  for (int a = 0; a < grid.dim(); ++a)
    out[static_cast<std::size_t>(a)] =
        curvature[static_cast<std::size_t>(a)][static_cast<std::size_t>(node)];
  return out;
}

Eigen::MatrixXd tilt_projector(const Eigen::VectorXd& du, double w) {
  const int dim = static_cast<int>(du.size());
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Identity(dim, dim);
  gamma.noalias() -= du * du.transpose() / (w * (1.0 + w));
  return gamma;
}

namespace {

/// du, d2u and w only; the geometric fields are filled by derive_fields.
void compute_differentials(const GraphPatch& patch, GeometryFields& out) {
  const GridLayout& g = patch.grid;
  const int dim = g.dim();

  out.du.resize(static_cast<std::size_t>(dim));
  for (int a = 0; a < dim; ++a)
    apply_d1(g, patch.u, a, out.du[static_cast<std::size_t>(a)]);

  out.d2u.assign(static_cast<std::size_t>(sym_size(dim)), Field());
  for (int a = 0; a < dim; ++a) {
    apply_d2(g, patch.u, a, out.d2u[static_cast<std::size_t>(sym_index(dim, a, a))]);
    for (int b = a + 1; b < dim; ++b)
      apply_d1(g, out.du[static_cast<std::size_t>(b)], a,
               out.d2u[static_cast<std::size_t>(sym_index(dim, a, b))]);
  }

  out.w = g.make_field();
  const long long count = g.num_nodes();
  for (long long node = 0; node < count; ++node) {
    double norm2 = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double v = out.du[static_cast<std::size_t>(a)][static_cast<std::size_t>(node)];
      norm2 += v * v;
    }
    out.w[static_cast<std::size_t>(node)] = std::sqrt(1.0 + norm2);
  }
}

}  // namespace

GeometryFields derive_differentials(const GraphPatch& patch) {
  GeometryFields out(patch.grid);
  compute_differentials(patch, out);
  return out;
}

GeometryFields derive_fields(const GraphPatch& patch) {
  const GridLayout& g = patch.grid;
  const int dim = g.dim();
  GeometryFields out(g);
  compute_differentials(patch, out);

  out.nu.assign(static_cast<std::size_t>(dim + 1), g.make_field());
  out.shape.assign(static_cast<std::size_t>(sym_size(dim)), g.make_field());
  out.curvature.assign(static_cast<std::size_t>(dim), g.make_field());

  const long long count = g.num_nodes();
  Eigen::VectorXd p(dim);
  Eigen::MatrixXd s(dim, dim);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  for (long long node = 0; node < count; ++node) {
    const auto idx = static_cast<std::size_t>(node);
    for (int a = 0; a < dim; ++a) p[a] = out.du[static_cast<std::size_t>(a)][idx];
    const double w = out.w[idx];

    for (int a = 0; a < dim; ++a)
      out.nu[static_cast<std::size_t>(a)][idx] = -p[a] / w;
    out.nu[static_cast<std::size_t>(dim)][idx] = 1.0 / w;

    for (int a = 0; a < dim; ++a)
      for (int b = a; b < dim; ++b)
        s(a, b) = s(b, a) =
            out.d2u[static_cast<std::size_t>(sym_index(dim, a, b))][idx];

    const Eigen::MatrixXd gamma = tilt_projector(p, w);
    Eigen::MatrixXd shape = gamma * s * gamma / w;
    shape = 0.5 * (shape + shape.transpose()).eval();
    for (int a = 0; a < dim; ++a)
      for (int b = a; b < dim; ++b)
        out.shape[static_cast<std::size_t>(sym_index(dim, a, b))][idx] =
            shape(a, b);

    eig.compute(shape);
    for (int a = 0; a < dim; ++a)
      out.curvature[static_cast<std::size_t>(a)][idx] =
          eig.eigenvalues()[dim - 1 - a];
  }
  return out;
}

MetricWork::MetricWork(GridLayout layout) : grid(layout) {}

double MetricWork::gamma_at(long long node, int k, int i, int j) const {
  const int dim = grid.dim();
  return christoffel[static_cast<std::size_t>(k * sym_size(dim) + sym_index(dim, i, j))]
                    [static_cast<std::size_t>(node)];
}

MetricWork build_metric_work(const GeometryFields& fields) {
  const GridLayout& g = fields.grid;
  const int dim = g.dim();
  const long long count = g.num_nodes();
  MetricWork out(g);

  out.g.assign(static_cast<std::size_t>(sym_size(dim)), g.make_field());
  out.ginv.assign(static_cast<std::size_t>(sym_size(dim)), g.make_field());
  out.h.assign(static_cast<std::size_t>(sym_size(dim)), g.make_field());
  for (long long node = 0; node < count; ++node) {
    const auto idx = static_cast<std::size_t>(node);
    const double w = fields.w[idx];
    for (int a = 0; a < dim; ++a)
      for (int b = a; b < dim; ++b) {
        const auto ab = static_cast<std::size_t>(sym_index(dim, a, b));
        const double pa = fields.du[static_cast<std::size_t>(a)][idx];
        const double pb = fields.du[static_cast<std::size_t>(b)][idx];
        const double delta = (a == b) ? 1.0 : 0.0;
        out.g[ab][idx] = delta + pa * pb;
        out.ginv[ab][idx] = delta - pa * pb / (w * w);
        out.h[ab][idx] = fields.d2u[ab][idx] / w;
      }
  }

  // dg[a][sym(i,j)] = d_a g_ij, then Gamma^k_ij = ginv^{kl}(d_i g_lj + d_j g_li - d_l g_ij)/2
  std::vector<Field> dg(static_cast<std::size_t>(dim * sym_size(dim)));
  for (int a = 0; a < dim; ++a)
    for (int s = 0; s < sym_size(dim); ++s)
      apply_d1(g, out.g[static_cast<std::size_t>(s)], a,
               dg[static_cast<std::size_t>(a * sym_size(dim) + s)]);

  out.christoffel.assign(static_cast<std::size_t>(dim * sym_size(dim)),
                         g.make_field());
  const auto dg_at = [&](long long node, int a, int i, int j) {
    return dg[static_cast<std::size_t>(a * sym_size(dim) + sym_index(dim, i, j))]
             [static_cast<std::size_t>(node)];
  };
  for (long long node = 0; node < count; ++node) {
    const auto idx = static_cast<std::size_t>(node);
    for (int k = 0; k < dim; ++k)
      for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) {
          double sum = 0.0;
          for (int l = 0; l < dim; ++l) {
            const double ginv_kl =
                out.ginv[static_cast<std::size_t>(sym_index(dim, k, l))][idx];
            sum += ginv_kl * (dg_at(node, i, l, j) + dg_at(node, j, l, i) -
                              dg_at(node, l, i, j));
          }
          out.christoffel[static_cast<std::size_t>(k * sym_size(dim) +
                                                   sym_index(dim, i, j))][idx] =
              0.5 * sum;
        }
  }
  return out;
}

double codazzi_residual(const GraphPatch& patch) {
  const GeometryFields fields = derive_differentials(patch);
  const MetricWork metric = build_metric_work(fields);

  const GridLayout& g = patch.grid;
  const int dim = g.dim();
  const long long count = g.num_nodes();
  double worst = 0.0;

  std::vector<double> hmat(static_cast<std::size_t>(dim * dim));
  std::vector<double> hcov(static_cast<std::size_t>(dim * dim * dim));
  const auto hval = [&](long long node, int i, int j) {
    return metric.h[static_cast<std::size_t>(sym_index(dim, i, j))]
                   [static_cast<std::size_t>(node)];
  };
  for (long long node = 0; node < count; ++node) {
    if (g.depth(node) < 2) continue;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        for (int k = 0; k < dim; ++k) {
          double v = d1_at(g, metric.h[static_cast<std::size_t>(sym_index(dim, i, j))],
                           k, node);
          for (int l = 0; l < dim; ++l)
            v -= metric.gamma_at(node, l, k, i) * hval(node, l, j) +
                 metric.gamma_at(node, l, k, j) * hval(node, i, l);
          hcov[static_cast<std::size_t>((i * dim + j) * dim + k)] = v;
        }
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        for (int k = j + 1; k < dim; ++k) {
          const double diff =
              hcov[static_cast<std::size_t>((i * dim + j) * dim + k)] -
              hcov[static_cast<std::size_t>((i * dim + k) * dim + j)];
          worst = std::max(worst, std::abs(diff));
        }
  }
  return worst;
}

double gauss_residual(const GraphPatch& patch) {
  const GeometryFields fields = derive_differentials(patch);
  const MetricWork metric = build_metric_work(fields);

  const GridLayout& g = patch.grid;
  const int dim = g.dim();
  const long long count = g.num_nodes();
  const int ss = sym_size(dim);
  double worst = 0.0;

  // dG[c][a][sym(d,b)] = d_c Gamma^a_{db}; rup[a][b][c][d] = R^a_{bcd}
  std::vector<double> dgam(static_cast<std::size_t>(dim * dim * ss));
  std::vector<double> rup(static_cast<std::size_t>(dim * dim * dim * dim));
  const auto hval = [&](long long node, int i, int j) {
    return metric.h[static_cast<std::size_t>(sym_index(dim, i, j))]
                   [static_cast<std::size_t>(node)];
  };
  const auto gval = [&](long long node, int i, int j) {
    return metric.g[static_cast<std::size_t>(sym_index(dim, i, j))]
                   [static_cast<std::size_t>(node)];
  };
  for (long long node = 0; node < count; ++node) {
    if (g.depth(node) < 2) continue;
    for (int c = 0; c < dim; ++c)
      for (int a = 0; a < dim; ++a)
        for (int s = 0; s < ss; ++s)
          dgam[static_cast<std::size_t>((c * dim + a) * ss + s)] = d1_at(
              g, metric.christoffel[static_cast<std::size_t>(a * ss + s)], c, node);

    const auto dgam_at = [&](int c, int a, int d, int b) {
      return dgam[static_cast<std::size_t>((c * dim + a) * ss +
                                           sym_index(dim, d, b))];
    };
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b)
        for (int c = 0; c < dim; ++c)
          for (int d = 0; d < dim; ++d) {
            double sum = 0.0;
            for (int e = 0; e < dim; ++e)
              sum += metric.gamma_at(node, a, c, e) *
                         metric.gamma_at(node, e, d, b) -
                     metric.gamma_at(node, a, d, e) *
                         metric.gamma_at(node, e, c, b);
            rup[static_cast<std::size_t>(((a * dim + b) * dim + c) * dim + d)] =
                dgam_at(c, a, d, b) - dgam_at(d, a, c, b) + sum;
          }

    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b)
        for (int c = 0; c < dim; ++c)
          for (int d = 0; d < dim; ++d) {
            double rlow = 0.0;
            for (int e = 0; e < dim; ++e)
              rlow += gval(node, a, e) *
                      rup[static_cast<std::size_t>(((e * dim + b) * dim + c) * dim + d)];
            const double target = hval(node, a, c) * hval(node, b, d) -
                                  hval(node, a, d) * hval(node, b, c);
            worst = std::max(worst, std::abs(rlow - target));
          }
  }
  return worst;
}

}  // namespace cq
