#include "lagflow/sym_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lagflow/errors.hpp"

namespace lagflow {

namespace {

constexpr double kOffDiagonalTol = 1e-14;
constexpr int kMaxSweeps = 50;
constexpr double kSignThreshold = 1e-12;

void check_dim(int n) {
  if (n < 1 || n > kMaxDim) throw InvalidMatrix("matrix dimension must be in [1, 4]");
}

struct Work {
  int n = 0;
  double a[kMaxDim][kMaxDim]{};
  double v[kMaxDim][kMaxDim]{};
};

Work load(const SymMatrix& m) {
  if (!m.finite()) throw InvalidMatrix("non-finite matrix entry");
  Work w;
  w.n = m.dim();
  for (int i = 0; i < w.n; ++i) {
    for (int j = 0; j < w.n; ++j) w.a[i][j] = m(i, j);
    w.v[i][i] = 1.0;
  }
  return w;
}

void closed_form_2x2(Work& w, bool want_vectors) {
  const double a = w.a[0][0], b = w.a[0][1], c = w.a[1][1];
  if (b == 0.0) return;  // already diagonal, Q = I
  const double mean = 0.5 * (a + c);
  const double r = std::hypot(0.5 * (a - c), b);
  // Larger-magnitude root first, the other from the determinant to avoid cancellation.
  const double det = std::fma(a, c, -b * b);
  double hi, lo;
  if (mean >= 0.0) {
    hi = mean + r;
    lo = hi != 0.0 ? det / hi : mean - r;
  } else {
    lo = mean - r;
    hi = det / lo;
  }
  w.a[0][0] = hi;
  w.a[1][1] = lo;
  w.a[0][1] = w.a[1][0] = 0.0;
  if (want_vectors) {
    const double phi = 0.5 * std::atan2(2.0 * b, a - c);
    const double cs = std::cos(phi), sn = std::sin(phi);
    w.v[0][0] = cs;
    w.v[1][0] = sn;
    w.v[0][1] = -sn;
    w.v[1][1] = cs;
  }
}

void jacobi(Work& w, bool want_vectors) {
  const int n = w.n;
  double fro2 = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) fro2 += w.a[i][j] * w.a[i][j];
  const double limit = kOffDiagonalTol * kOffDiagonalTol * fro2;

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += w.a[p][q] * w.a[p][q];
    if (off == 0.0 || off <= limit) return;

    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = w.a[p][q];
        if (apq == 0.0) continue;
        const double theta = (w.a[q][q] - w.a[p][p]) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = w.a[k][p], akq = w.a[k][q];
          w.a[k][p] = w.a[p][k] = c * akp - s * akq;
          w.a[k][q] = w.a[q][k] = s * akp + c * akq;
        }
        w.a[p][p] -= t * apq;
        w.a[q][q] += t * apq;
        w.a[p][q] = w.a[q][p] = 0.0;
        if (want_vectors) {
          for (int k = 0; k < n; ++k) {
            const double vkp = w.v[k][p], vkq = w.v[k][q];
            w.v[k][p] = c * vkp - s * vkq;
            w.v[k][q] = s * vkp + c * vkq;
          }
        }
      }
    }
  }
}

void diagonalize(Work& w, bool want_vectors) {
  if (w.n == 2) {
    closed_form_2x2(w, want_vectors);
  } else if (w.n > 2) {
    jacobi(w, want_vectors);
  }
}

}  // namespace

EigenTuple::EigenTuple(std::initializer_list<double> values) : n_(static_cast<int>(values.size())) {
  check_dim(n_);
  std::copy(values.begin(), values.end(), v_.begin());
}

EigenTuple EigenTuple::from(std::span<const double> values) {
  EigenTuple t(static_cast<int>(values.size()));
  check_dim(t.n_);
  std::copy(values.begin(), values.end(), t.v_.begin());
  return t;
}

SymMatrix::SymMatrix(int n) : n_(n) { check_dim(n); }

SymMatrix SymMatrix::identity(int n) {
  SymMatrix m(n);
  for (int i = 0; i < n; ++i) m.set(i, i, 1.0);
  return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
  SymMatrix m(static_cast<int>(d.size()));
  for (int i = 0; i < m.n_; ++i) m.set(i, i, d[static_cast<std::size_t>(i)]);
  return m;
}

SymMatrix SymMatrix::from_row_major(int n, std::span<const double> entries) {
  check_dim(n);
  if (entries.size() != static_cast<std::size_t>(n * n)) throw InvalidMatrix("expected n*n entries");
  SymMatrix m(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x = entries[static_cast<std::size_t>(i * n + j)];
      if (!std::isfinite(x)) throw InvalidMatrix("non-finite matrix entry");
      if (x != entries[static_cast<std::size_t>(j * n + i)]) throw InvalidMatrix("matrix is not symmetric");
      m.set(i, j, x);
    }
  }
  return m;
}

void SymMatrix::set(int i, int j, double value) {
  a_[static_cast<std::size_t>(i * kMaxDim + j)] = value;
  a_[static_cast<std::size_t>(j * kMaxDim + i)] = value;
}

bool SymMatrix::finite() const {
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      if (!std::isfinite((*this)(i, j))) return false;
  return true;
}

double SymMatrix::max_abs() const {
  double m = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) m = std::max(m, std::abs((*this)(i, j)));
  return m;
}

SymMatrix SymMatrix::operator+(const SymMatrix& o) const {
  SymMatrix r(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = i; j < n_; ++j) r.set(i, j, (*this)(i, j) + o(i, j));
  return r;
}

SymMatrix SymMatrix::operator-(const SymMatrix& o) const {
  SymMatrix r(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = i; j < n_; ++j) r.set(i, j, (*this)(i, j) - o(i, j));
  return r;
}

bool SymMatrix::operator==(const SymMatrix& o) const {
  if (n_ != o.n_) return false;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      if ((*this)(i, j) != o(i, j)) return false;
  return true;
}

SymTensor3::SymTensor3(int n) : n_(n) { check_dim(n); }

int SymTensor3::slot(int n, int i, int j, int k) {
  if (i > j) std::swap(i, j);
  if (j > k) std::swap(j, k);
  if (i > j) std::swap(i, j);
  // Enumerate i <= j <= k lexicographically.
  int s = 0;
  for (int a = 0; a < i; ++a) s += (n - a) * (n - a + 1) / 2;
  for (int b = i; b < j; ++b) s += n - b;
  return s + (k - j);
}

Eigensystem eigen_sym(const SymMatrix& m) {
  Work w = load(m);
  diagonalize(w, true);
  const int n = w.n;

  std::array<int, kMaxDim> order{};
  std::iota(order.begin(), order.begin() + n, 0);

  // Sign rule first so that ties can be ordered by the normalized vectors.
  for (int col = 0; col < n; ++col) {
    for (int row = 0; row < n; ++row) {
      const double x = w.v[row][col];
      if (std::abs(x) > kSignThreshold) {
        if (x < 0.0)
          for (int r = 0; r < n; ++r) w.v[r][col] = -w.v[r][col];
        break;
      }
    }
  }

  std::sort(order.begin(), order.begin() + n, [&](int x, int y) {
    if (w.a[x][x] != w.a[y][y]) return w.a[x][x] < w.a[y][y];
    for (int r = 0; r < n; ++r)
      if (w.v[r][x] != w.v[r][y]) return w.v[r][x] > w.v[r][y];
    return x < y;
  });

  Eigensystem es;
  es.values = EigenTuple(n);
  for (int k = 0; k < n; ++k) {
    const int src = order[static_cast<std::size_t>(k)];
    es.values[k] = w.a[src][src];
    for (int r = 0; r < n; ++r) es.vectors[static_cast<std::size_t>(r * kMaxDim + k)] = w.v[r][src];
  }
  return es;
}

EigenTuple eigenvalues_sym(const SymMatrix& m) {
  Work w = load(m);
  diagonalize(w, false);
  EigenTuple values(w.n);
  for (int i = 0; i < w.n; ++i) values[i] = w.a[i][i];
  std::sort(&values[0], &values[0] + w.n);
  return values;
}

}  // namespace lagflow
