#include "lagflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lagflow/errors.hpp"
#include "lagflow/spectrum.hpp"

namespace lagflow::geometry {

namespace {

constexpr double kFrameTol = 1e-12;

using Small = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

Small to_small(const SymMatrix& m) {
  Small s(m.dim(), m.dim());
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) s(i, j) = m(i, j);
  return s;
}

SymMatrix from_small(const Small& s) {
  const int n = static_cast<int>(s.rows());
  SymMatrix m(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) m.set(i, j, 0.5 * (s(i, j) + s(j, i)));
  return m;
}

void require_valid(const AdaptedFrame& frame) {
  if (orthonormality_defect(frame) > kFrameTol) throw InvalidFrame("frame is not orthonormal");
  if (lagrangian_defect(frame) > kFrameTol) throw InvalidFrame("frame is not Lagrangian");
}

}  // namespace

Matrix base_projection(int n) {
  Matrix m = Matrix::Zero(2 * n, 2 * n);
  m.topLeftCorner(n, n).setIdentity();
  return m;
}

Matrix fiber_projection(int n) {
  Matrix m = Matrix::Zero(2 * n, 2 * n);
  m.bottomRightCorner(n, n).setIdentity();
  return m;
}

Matrix complex_structure(int n) {
  Matrix m = Matrix::Zero(2 * n, 2 * n);
  m.topRightCorner(n, n) = -Matrix::Identity(n, n);
  m.bottomLeftCorner(n, n) = Matrix::Identity(n, n);
  return m;
}

AdaptedFrame make_frame(const SymMatrix& hessian) {
  const Eigensystem es = eigen_sym(hessian);
  const int n = es.dim();
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = es.vector(i, j);
  return make_frame(a, es.values);
}

AdaptedFrame make_frame(const Matrix& a, std::span<const double> lambdas) {
  const int n = static_cast<int>(lambdas.size());
  if (a.rows() != n || a.cols() != n) throw InvalidFrame("eigenvector matrix has the wrong shape");
  if ((a.transpose() * a - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > kFrameTol)
    throw InvalidFrame("eigenvector matrix is not orthonormal");
  AdaptedFrame f;
  f.n = n;
  f.a = a;
  f.lambdas = EigenTuple::from(lambdas);
  f.e.resize(2 * n, n);
  for (int i = 0; i < n; ++i) {
    const double l = lambdas[static_cast<std::size_t>(i)];
    const double scale = 1.0 / std::sqrt(1.0 + l * l);
    f.e.col(i).head(n) = scale * a.col(i);
    f.e.col(i).tail(n) = scale * l * a.col(i);
  }
  return f;
}

double orthonormality_defect(const AdaptedFrame& frame) {
  return (frame.e.transpose() * frame.e - Matrix::Identity(frame.n, frame.n)).cwiseAbs().maxCoeff();
}

double lagrangian_defect(const AdaptedFrame& frame) {
  const Matrix omega = (complex_structure(frame.n) * frame.e).transpose() * frame.e;
  return omega.cwiseAbs().maxCoeff();
}

Matrix s_from_first_principles(const AdaptedFrame& frame) {
  require_valid(frame);
  const int n = frame.n;
  const Matrix lhs = complex_structure(n) * base_projection(n) * frame.e;
  const Matrix rhs = fiber_projection(n) * frame.e;
  return lhs.transpose() * rhs;
}

Matrix p_from_first_principles(const AdaptedFrame& frame) {
  require_valid(frame);
  const int n = frame.n;
  const Matrix b = base_projection(n) * frame.e;
  const Matrix f = fiber_projection(n) * frame.e;
  return b.transpose() * b - f.transpose() * f;
}

Matrix s2_matrix(const Matrix& t) {
  const int n = static_cast<int>(t.rows());
  if (n < 2) throw UndefinedForDimension("S^[2] needs n >= 2");
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  const auto delta = [](int x, int y) { return x == y ? 1.0 : 0.0; };
  const auto m = static_cast<Eigen::Index>(pairs.size());
  Matrix out(m, m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto [i, j] = pairs[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < m; ++c) {
      const auto [k, l] = pairs[static_cast<std::size_t>(c)];
      out(r, c) = t(i, k) * delta(j, l) + t(j, l) * delta(i, k) - t(i, l) * delta(j, k) - t(j, k) * delta(i, l);
    }
  }
  return out;
}

double log_det(const Matrix& m) {
  const double d = m.partialPivLu().determinant();
  return d > 0.0 ? std::log(d) : -std::numeric_limits<double>::infinity();
}

SymMatrix inverse_metric(const SymMatrix& hessian) {
  const int n = hessian.dim();
  const Small hs = to_small(hessian);
  const Small g = Small::Identity(n, n) + hs * hs;
  return from_small(g.llt().solve(Small::Identity(n, n)));
}

SecondFundamental second_fundamental(const SymMatrix& hessian, const SymTensor3& third) {
  const int n = hessian.dim();
  const Small hs = to_small(hessian);
  const Small g = Small::Identity(n, n) + hs * hs;
  const Small g_inv = g.llt().solve(Small::Identity(n, n));

  SecondFundamental sf;
  sf.h = third;
  sf.g = from_small(g);
  sf.g_inv = from_small(g_inv);

  // Raise all three indices one at a time: w = g^-1 (x) g^-1 (x) g^-1 . u.
  double u[kMaxDim][kMaxDim][kMaxDim], w1[kMaxDim][kMaxDim][kMaxDim], w2[kMaxDim][kMaxDim][kMaxDim];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) u[i][j][k] = third(i, j, k);
  for (int p = 0; p < n; ++p)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += g_inv(p, i) * u[i][j][k];
        w1[p][j][k] = s;
      }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += g_inv(q, j) * w1[p][j][k];
        w2[p][q][k] = s;
      }
  double norm = 0.0;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += g_inv(r, k) * w2[p][q][k];
        norm += s * u[p][q][r];
      }
  sf.normA2 = std::max(0.0, norm);

  sf.mean_curvature = EigenTuple(n);
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += g_inv(i, j) * u[i][j][k];
    sf.mean_curvature[k] = s;
  }
  double h2 = 0.0;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) h2 += g_inv(k, l) * sf.mean_curvature[k] * sf.mean_curvature[l];
  sf.mean_curvature_norm2 = std::max(0.0, h2);
  return sf;
}

namespace {

// tangent: 2n x n, columns d_i F. second_fiber(i, j): fiber part of d_i d_j F
// (the base part x is linear and drops out).
template <class SecondFiber>
ImmersionCheck immersion_core(const Matrix& tangent, const SecondFiber& second_fiber) {
  const int n = static_cast<int>(tangent.cols());

  // Modified Gram-Schmidt: tangent = E R with R upper triangular, positive diagonal.
  Matrix e = tangent;
  Matrix r = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < i; ++k) {
      r(k, i) = e.col(k).dot(e.col(i));
      e.col(i) -= r(k, i) * e.col(k);
    }
    r(i, i) = e.col(i).norm();
    e.col(i) /= r(i, i);
  }
  const Matrix r_inv = r.triangularView<Eigen::Upper>().solve(Matrix::Identity(n, n));
  const Matrix normals = complex_structure(n) * e;

  // coord(i, j, c) = <d_i d_j F, J e_c>
  std::vector<double> coord(static_cast<std::size_t>(n * n * n));
  const auto at = [n](std::vector<double>& t, int i, int j, int k) -> double& {
    return t[static_cast<std::size_t>((i * n + j) * n + k)];
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Eigen::VectorXd second = second_fiber(i, j);
      for (int c = 0; c < n; ++c) at(coord, i, j, c) = second.dot(normals.col(c).tail(n));
    }

  std::vector<double> ortho(coord.size(), 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) s += r_inv(i, a) * r_inv(j, b) * at(coord, i, j, c);
        at(ortho, a, b, c) = s;
      }

  ImmersionCheck out;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        const double x = at(ortho, a, b, c);
        out.normA2 += x * x;
        out.symmetry_defect = std::max({out.symmetry_defect, std::abs(x - at(ortho, b, a, c)),
                                        std::abs(x - at(ortho, a, c, b)), std::abs(x - at(ortho, c, b, a))});
      }
  return out;
}

}  // namespace

ImmersionCheck immersion_from_jet(const SymMatrix& hessian, const SymTensor3& third) {
  const int n = hessian.dim();
  Matrix tangent(2 * n, n);
  for (int i = 0; i < n; ++i) {
    tangent.col(i).head(n) = Eigen::VectorXd::Unit(n, i);
    for (int a = 0; a < n; ++a) tangent(n + a, i) = hessian(a, i);
  }
  return immersion_core(tangent, [&](int i, int j) {
    Eigen::VectorXd s(n);
    for (int a = 0; a < n; ++a) s(a) = third(i, j, a);
    return s;
  });
}

ImmersionCheck immersion_oracle_a2(const PotentialField& field, std::size_t p) {
  const int n = field.dim();
  const Grid& grid = field.grid;
  const double h = grid.spacing();

  // Centered difference of the periodic part; the linear part A x is differentiated exactly.
  const auto grad_v = [&](std::size_t q) {
    Eigen::VectorXd g(n);
    for (int a = 0; a < n; ++a) g(a) = (field.v[grid.shift(q, a, 1)] - field.v[grid.shift(q, a, -1)]) / (2.0 * h);
    return g;
  };
  const auto d_grad = [&](std::size_t q, int i) -> Eigen::VectorXd {
    return (grad_v(grid.shift(q, i, 1)) - grad_v(grid.shift(q, i, -1))) / (2.0 * h);
  };

  Matrix tangent(2 * n, n);
  for (int i = 0; i < n; ++i) {
    tangent.col(i).head(n) = Eigen::VectorXd::Unit(n, i);
    Eigen::VectorXd fiber = d_grad(p, i);
    for (int a = 0; a < n; ++a) fiber(a) += field.A(a, i);
    tangent.col(i).tail(n) = fiber;
  }
  return immersion_core(tangent, [&](int i, int j) -> Eigen::VectorXd {
    return (d_grad(grid.shift(p, j, 1), i) - d_grad(grid.shift(p, j, -1), i)) / (2.0 * h);
  });
}

double theta_gradient_vs_meancurv(const PotentialField& field, std::size_t p) {
  const int n = field.dim();
  const double h = field.grid.spacing();
  const SecondFundamental sf = second_fundamental(hessian_at(field, p), third_at(field, p));
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    const double fwd = spectrum::lagrangian_angle(eigenvalues_sym(hessian_at(field, field.grid.shift(p, k, 1))));
    const double bwd = spectrum::lagrangian_angle(eigenvalues_sym(hessian_at(field, field.grid.shift(p, k, -1))));
    worst = std::max(worst, std::abs((fwd - bwd) / (2.0 * h) - sf.mean_curvature[k]));
  }
  return worst;
}

}  // namespace lagflow::geometry
