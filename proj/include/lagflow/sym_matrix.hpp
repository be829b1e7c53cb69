#pragma once

#include <array>
#include <cstddef>
#include <span>

namespace lagflow {

inline constexpr int kMaxDim = 4;

// Small fixed-capacity tuple of reals (eigenvalues, mean-curvature vectors).
class EigenTuple {
 public:
  EigenTuple() = default;
  explicit EigenTuple(int n) : n_(n) {}
  EigenTuple(std::initializer_list<double> values);
  static EigenTuple from(std::span<const double> values);

  int size() const { return n_; }
  double& operator[](int i) { return v_[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return v_[static_cast<std::size_t>(i)]; }
  const double* begin() const { return v_.data(); }
  const double* end() const { return v_.data() + n_; }
  std::span<const double> span() const { return {v_.data(), static_cast<std::size_t>(n_)}; }
  operator std::span<const double>() const { return span(); }

 private:
  int n_ = 0;
  std::array<double, kMaxDim> v_{};
};

// Real symmetric n x n matrix, n <= 4. Writes go to both (i,j) and (j,i), so
// symmetry holds exactly.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int n);

  static SymMatrix identity(int n);
  static SymMatrix diagonal(std::span<const double> d);
  // Throws InvalidMatrix unless the row-major input is exactly symmetric and finite.
  static SymMatrix from_row_major(int n, std::span<const double> entries);

  int dim() const { return n_; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i * kMaxDim + j)]; }
  void set(int i, int j, double value);

  bool finite() const;
  double max_abs() const;

  SymMatrix operator+(const SymMatrix& o) const;
  SymMatrix operator-(const SymMatrix& o) const;
  bool operator==(const SymMatrix& o) const;

 private:
  int n_ = 0;
  std::array<double, kMaxDim * kMaxDim> a_{};
};

// Totally symmetric n x n x n array; only multi-indices i <= j <= k are stored,
// so every permutation reads the same slot.
class SymTensor3 {
 public:
  SymTensor3() = default;
  explicit SymTensor3(int n);

  static int unique_count(int n) { return n * (n + 1) * (n + 2) / 6; }
  static int slot(int n, int i, int j, int k);

  int dim() const { return n_; }
  double operator()(int i, int j, int k) const { return c_[static_cast<std::size_t>(slot(n_, i, j, k))]; }
  void set(int i, int j, int k, double value) { c_[static_cast<std::size_t>(slot(n_, i, j, k))] = value; }
  double& unique(int s) { return c_[static_cast<std::size_t>(s)]; }
  double unique(int s) const { return c_[static_cast<std::size_t>(s)]; }

 private:
  int n_ = 0;
  std::array<double, 20> c_{};
};

struct Eigensystem {
  EigenTuple values;                                // ascending
  std::array<double, kMaxDim * kMaxDim> vectors{};  // vectors[row * kMaxDim + col], column col is an eigenvector

  int dim() const { return values.size(); }
  double vector(int row, int col) const { return vectors[static_cast<std::size_t>(row * kMaxDim + col)]; }
};

// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations (closed
// form for n == 2). Eigenvalues ascending; each eigenvector's first component
// above 1e-12 in magnitude is positive. Throws InvalidMatrix on non-finite input.
Eigensystem eigen_sym(const SymMatrix& m);

// Eigenvalues only, same ordering as eigen_sym. Used in the time-stepping loop.
EigenTuple eigenvalues_sym(const SymMatrix& m);

}  // namespace lagflow
