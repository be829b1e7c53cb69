#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "lagflow/sym_matrix.hpp"

namespace lagflow {

// Uniform periodic grid over [0, 2pi)^n, row-major (last axis fastest).
class Grid {
 public:
  static constexpr int kMinPoints = 16;

  Grid() = default;
  // Throws ConfigError unless 1 <= n <= 4 and N >= 16 (and N^n fits in memory sensibly).
  Grid(int n, int points_per_axis);

  int dim() const { return n_; }
  int points_per_axis() const { return N_; }
  double spacing() const { return h_; }
  std::size_t size() const { return size_; }
  std::size_t stride(int axis) const { return stride_[static_cast<std::size_t>(axis)]; }

  std::array<int, kMaxDim> coords(std::size_t p) const;
  std::size_t index(std::span<const int> coords) const;
  // Periodic neighbour of p displaced by delta cells along axis.
  std::size_t shift(std::size_t p, int axis, int delta) const;
  double coordinate(int cell) const { return h_ * cell; }

  bool operator==(const Grid& o) const { return n_ == o.n_ && N_ == o.N_; }

 private:
  int n_ = 0;
  int N_ = 0;
  double h_ = 0.0;
  std::size_t size_ = 0;
  std::array<std::size_t, kMaxDim> stride_{};
};

// u(x) = x^T A x / 2 + v(x) + phase, with v periodic and mean-zero.
struct PotentialField {
  Grid grid;
  SymMatrix A;
  std::vector<double> v;
  double phase = 0.0;
  double t = 0.0;

  int dim() const { return grid.dim(); }
};

// Zero periodic part, t = 0, phase = 0. Throws ConfigError on bad n, N or A dimension.
PotentialField make_field(int n, int points_per_axis, const SymMatrix& A);

// Neumaier-compensated arithmetic mean.
double compensated_mean(std::span<const double> values);

// Subtracts mean(v) and adds it to phase. Returns the amount removed.
double remove_mean(PotentialField& field);

// D^2 v at a grid point: [1,-2,1]/h^2 on the diagonal, 4-point cross / (4h^2) off it.
SymMatrix periodic_hessian_at(const PotentialField& field, std::size_t p);
// A + D^2 v.
SymMatrix hessian_at(const PotentialField& field, std::size_t p);

// Number of unique entries of a symmetric n x n matrix.
inline int sym_unique_count(int n) { return n * (n + 1) / 2; }

class HessianField {
 public:
  HessianField(Grid grid, SymMatrix A);

  const Grid& grid() const { return grid_; }
  const SymMatrix& quadratic() const { return A_; }
  // Full Hessian A + D^2 v.
  SymMatrix at(std::size_t p) const;
  // Periodic part D^2 v only.
  SymMatrix periodic_at(std::size_t p) const;
  double periodic_entry(std::size_t p, int i, int j) const;
  void set_periodic(std::size_t p, const SymMatrix& m);

 private:
  Grid grid_;
  SymMatrix A_;
  int unique_ = 0;
  std::vector<double> entries_;
};

HessianField hessian(const PotentialField& field);

class ThirdDerivField {
 public:
  explicit ThirdDerivField(Grid grid);

  const Grid& grid() const { return grid_; }
  SymTensor3 at(std::size_t p) const;
  void set(std::size_t p, const SymTensor3& t);

 private:
  Grid grid_;
  int unique_ = 0;
  std::vector<double> entries_;
};

// Centered differences of the periodic Hessian entries. Each unique multi-index
// i <= j <= k is differentiated from the purest available Hessian entry: a repeated
// index pair is kept on the Hessian side, the remaining index is differenced.
ThirdDerivField third_derivs(const PotentialField& field);
ThirdDerivField third_derivs(const HessianField& hess);
// Same stencil as third_derivs, evaluated at a single point.
SymTensor3 third_at(const PotentialField& field, std::size_t p);

// Snapshot text format: header "n N t phase A00 A01 ... " then N^n values of v,
// row-major, one per line, at 17 significant digits.
void write_snapshot(std::ostream& out, const PotentialField& field);
PotentialField read_snapshot(std::istream& in);

}  // namespace lagflow
