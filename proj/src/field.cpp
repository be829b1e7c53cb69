#include "lagflow/field.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include "lagflow/errors.hpp"
#include "lagflow/parallel.hpp"
#include "lagflow/real_format.hpp"

namespace lagflow {

namespace {

constexpr std::size_t kMaxGridPoints = std::size_t{1} << 26;

// Cell coordinates of p plus cheap axis-neighbour lookup.
struct Stencil {
  const Grid& grid;
  const std::vector<double>& v;
  std::size_t p;
  std::array<int, kMaxDim> c;

  Stencil(const Grid& g, const std::vector<double>& values, std::size_t point)
      : grid(g), v(values), p(point), c(g.coords(point)) {}

  std::ptrdiff_t step(int axis, int delta) const {
    const int N = grid.points_per_axis();
    int moved = c[static_cast<std::size_t>(axis)] + delta;
    moved = ((moved % N) + N) % N;
    return static_cast<std::ptrdiff_t>(moved - c[static_cast<std::size_t>(axis)]) *
           static_cast<std::ptrdiff_t>(grid.stride(axis));
  }
  double at(std::ptrdiff_t offset) const { return v[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(p) + offset)]; }

  double second(int i) const {
    const double h = grid.spacing();
    return (at(step(i, 1)) - 2.0 * v[p] + at(step(i, -1))) / (h * h);
  }
  double mixed(int i, int j) const {
    const double h = grid.spacing();
    const std::ptrdiff_t ip = step(i, 1), im = step(i, -1), jp = step(j, 1), jm = step(j, -1);
    return (at(ip + jp) - at(ip + jm) - at(im + jp) + at(im + jm)) / (4.0 * h * h);
  }
};

SymMatrix stencil_hessian(const Grid& grid, const std::vector<double>& v, std::size_t p) {
  const Stencil s(grid, v, p);
  const int n = grid.dim();
  SymMatrix m(n);
  for (int i = 0; i < n; ++i) {
    m.set(i, i, s.second(i));
    for (int j = i + 1; j < n; ++j) m.set(i, j, s.mixed(i, j));
  }
  return m;
}

struct DiffRule {
  int row, col, axis;
};

DiffRule third_rule(int i, int j, int k) {
  if (i == j) return {i, i, k};
  if (j == k) return {j, j, i};
  return {i, j, k};
}

}  // namespace

Grid::Grid(int n, int points_per_axis) : n_(n), N_(points_per_axis) {
  if (n < 1 || n > kMaxDim) throw ConfigError("dimension n must be in [1, 4], got " + std::to_string(n));
  if (points_per_axis < kMinPoints)
    throw ConfigError("points per axis N must be >= 16, got " + std::to_string(points_per_axis));
  h_ = 2.0 * std::numbers::pi / N_;
  size_ = 1;
  for (int a = 0; a < n; ++a) {
    size_ *= static_cast<std::size_t>(N_);
    if (size_ > kMaxGridPoints) throw ConfigError("grid too large: N^n exceeds 2^26 points");
  }
  std::size_t s = 1;
  for (int a = n - 1; a >= 0; --a) {
    stride_[static_cast<std::size_t>(a)] = s;
    s *= static_cast<std::size_t>(N_);
  }
}

std::array<int, kMaxDim> Grid::coords(std::size_t p) const {
  std::array<int, kMaxDim> c{};
  for (int a = 0; a < n_; ++a)
    c[static_cast<std::size_t>(a)] = static_cast<int>((p / stride_[static_cast<std::size_t>(a)]) % static_cast<std::size_t>(N_));
  return c;
}

std::size_t Grid::index(std::span<const int> c) const {
  std::size_t p = 0;
  for (int a = 0; a < n_; ++a) {
    const int ca = ((c[static_cast<std::size_t>(a)] % N_) + N_) % N_;
    p += static_cast<std::size_t>(ca) * stride_[static_cast<std::size_t>(a)];
  }
  return p;
}

std::size_t Grid::shift(std::size_t p, int axis, int delta) const {
  auto c = coords(p);
  c[static_cast<std::size_t>(axis)] += delta;
  return index(std::span<const int>(c.data(), static_cast<std::size_t>(n_)));
}

PotentialField make_field(int n, int points_per_axis, const SymMatrix& A) {
  PotentialField f;
  f.grid = Grid(n, points_per_axis);
  if (A.dim() != n) throw ConfigError("quadratic part A has wrong dimension");
  if (!A.finite()) throw ConfigError("quadratic part A must be finite");
  f.A = A;
  f.v.assign(f.grid.size(), 0.0);
  return f;
}

double compensated_mean(std::span<const double> values) {
  double sum = 0.0, carry = 0.0;
  for (double x : values) {
    const double s = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - s) + x : (x - s) + sum;
    sum = s;
  }
  return (sum + carry) / static_cast<double>(values.size());
}

double remove_mean(PotentialField& field) {
  // A mean already at rounding level of the data is left alone, which makes
  // the operation idempotent.
  double peak = 0.0;
  for (double x : field.v) peak = std::max(peak, std::abs(x));
  const double mean = compensated_mean(field.v);
  if (std::abs(mean) <= 4.0 * std::numeric_limits<double>::epsilon() * peak) return 0.0;
  for (double& x : field.v) x -= mean;
  field.phase += mean;
  return mean;
}

SymMatrix periodic_hessian_at(const PotentialField& field, std::size_t p) {
  return stencil_hessian(field.grid, field.v, p);
}

SymMatrix hessian_at(const PotentialField& field, std::size_t p) {
  return field.A + stencil_hessian(field.grid, field.v, p);
}

HessianField::HessianField(Grid grid, SymMatrix A)
    : grid_(grid), A_(A), unique_(sym_unique_count(grid.dim())), entries_(grid.size() * static_cast<std::size_t>(unique_), 0.0) {}

double HessianField::periodic_entry(std::size_t p, int i, int j) const {
  if (i > j) std::swap(i, j);
  const int n = grid_.dim();
  const int slot = i * n - i * (i - 1) / 2 + (j - i);
  return entries_[p * static_cast<std::size_t>(unique_) + static_cast<std::size_t>(slot)];
}

SymMatrix HessianField::periodic_at(std::size_t p) const {
  const int n = grid_.dim();
  SymMatrix m(n);
  const double* e = &entries_[p * static_cast<std::size_t>(unique_)];
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) m.set(i, j, *e++);
  return m;
}

SymMatrix HessianField::at(std::size_t p) const { return A_ + periodic_at(p); }

void HessianField::set_periodic(std::size_t p, const SymMatrix& m) {
  const int n = grid_.dim();
  double* e = &entries_[p * static_cast<std::size_t>(unique_)];
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) *e++ = m(i, j);
}

HessianField hessian(const PotentialField& field) {
  HessianField out(field.grid, field.A);
  parallel_for(field.grid.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) out.set_periodic(p, periodic_hessian_at(field, p));
  });
  return out;
}

ThirdDerivField::ThirdDerivField(Grid grid)
    : grid_(grid), unique_(SymTensor3::unique_count(grid.dim())), entries_(grid.size() * static_cast<std::size_t>(unique_), 0.0) {}

SymTensor3 ThirdDerivField::at(std::size_t p) const {
  SymTensor3 t(grid_.dim());
  for (int s = 0; s < unique_; ++s) t.unique(s) = entries_[p * static_cast<std::size_t>(unique_) + static_cast<std::size_t>(s)];
  return t;
}

void ThirdDerivField::set(std::size_t p, const SymTensor3& t) {
  for (int s = 0; s < unique_; ++s) entries_[p * static_cast<std::size_t>(unique_) + static_cast<std::size_t>(s)] = t.unique(s);
}

ThirdDerivField third_derivs(const HessianField& hess) {
  const Grid& grid = hess.grid();
  const int n = grid.dim();
  const double inv2h = 1.0 / (2.0 * grid.spacing());
  ThirdDerivField out(grid);
  parallel_for(grid.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      SymTensor3 t(n);
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
          for (int k = j; k < n; ++k) {
            const DiffRule d = third_rule(i, j, k);
            const double fwd = hess.periodic_entry(grid.shift(p, d.axis, 1), d.row, d.col);
            const double bwd = hess.periodic_entry(grid.shift(p, d.axis, -1), d.row, d.col);
            t.set(i, j, k, (fwd - bwd) * inv2h);
          }
        }
      }
      out.set(p, t);
    }
  });
  return out;
}

ThirdDerivField third_derivs(const PotentialField& field) { return third_derivs(hessian(field)); }

SymTensor3 third_at(const PotentialField& field, std::size_t p) {
  const int n = field.dim();
  const double inv2h = 1.0 / (2.0 * field.grid.spacing());
  std::array<SymMatrix, kMaxDim> fwd, bwd;
  for (int a = 0; a < n; ++a) {
    fwd[static_cast<std::size_t>(a)] = periodic_hessian_at(field, field.grid.shift(p, a, 1));
    bwd[static_cast<std::size_t>(a)] = periodic_hessian_at(field, field.grid.shift(p, a, -1));
  }
  SymTensor3 t(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int k = j; k < n; ++k) {
        const DiffRule d = third_rule(i, j, k);
        const auto axis = static_cast<std::size_t>(d.axis);
        t.set(i, j, k, (fwd[axis](d.row, d.col) - bwd[axis](d.row, d.col)) * inv2h);
      }
  return t;
}

void write_snapshot(std::ostream& out, const PotentialField& field) {
  const int n = field.dim();
  out << n << ' ' << field.grid.points_per_axis() << ' ' << format_real(field.t) << ' ' << format_real(field.phase);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out << ' ' << format_real(field.A(i, j));
  out << '\n';
  for (double x : field.v) out << format_real(x) << '\n';
}

PotentialField read_snapshot(std::istream& in) {
  int n = 0, N = 0;
  std::string tok;
  if (!(in >> n >> N)) throw ConfigError("snapshot: malformed header");
  auto next_real = [&]() {
    if (!(in >> tok)) throw ConfigError("snapshot: truncated");
    return parse_real(tok);
  };
  const double t = next_real();
  const double phase = next_real();
  std::vector<double> a(static_cast<std::size_t>(n > 0 && n <= kMaxDim ? n * n : 0));
  if (a.empty()) throw ConfigError("snapshot: bad dimension");
  for (double& x : a) x = next_real();
  PotentialField f = make_field(n, N, SymMatrix::from_row_major(n, a));
  f.t = t;
  f.phase = phase;
  for (double& x : f.v) x = next_real();
  return f;
}

}  // namespace lagflow
