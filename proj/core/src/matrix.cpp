#include "degroot/matrix.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "degroot/error.hpp"

namespace degroot {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void require_same_size(std::size_t a, std::size_t b, const char* where) {
  if (a != b) {
    std::ostringstream os;
    os << where << ": dimensions " << a << " and " << b << " differ";
    raise(Errc::DimensionMismatch, os.str());
  }
}

}  // namespace

StochasticMatrix StochasticMatrix::identity(std::size_t n) {
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 1.0;
  return {n, std::move(d)};
}

StochasticMatrix StochasticMatrix::uniform(std::size_t n) {
  return {n, std::vector<double>(n * n, 1.0 / static_cast<double>(n))};
}

StochasticMatrix StochasticMatrix::cyclic_shift(std::size_t n) {
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) d[i * n + (i + 1) % n] = 1.0;
  return {n, std::move(d)};
}

StochasticMatrix StochasticMatrix::adopt(std::size_t n, std::vector<double> entries) {
  if (entries.size() != n * n) raise(Errc::DimensionMismatch, "adopt: entry count is not n*n");
  for (double& v : entries) v = std::max(v, 0.0);
  StochasticMatrix m(n, std::move(entries));
  m.renormalize_rows();
  return m;
}

void StochasticMatrix::renormalize_rows() noexcept {
  for (std::size_t i = 0; i < n_; ++i) {
    double* r = data_.data() + i * n_;
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) s += r[j];
    // Rows already normalised up to summation round-off are left alone, so
    // re-adopting stored entries is bit-for-bit idempotent.
    const double slack = 4.0 * static_cast<double>(n_) * std::numeric_limits<double>::epsilon();
    if (s > 0.0 && std::abs(s - 1.0) > slack) {
      for (std::size_t j = 0; j < n_; ++j) r[j] = std::min(r[j] / s, 1.0);
    }
  }
}

std::vector<std::vector<double>> StochasticMatrix::to_rows() const {
  std::vector<std::vector<double>> rows(n_);
  for (std::size_t i = 0; i < n_; ++i) rows[i].assign(data_.begin() + i * n_, data_.begin() + (i + 1) * n_);
  return rows;
}

void StochasticMatrix::left_multiply_by(const StochasticMatrix& factor, std::vector<double>& scratch) {
  require_same_size(factor.n_, n_, "left_multiply_by");
  scratch.assign(n_ * n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    double* out = scratch.data() + i * n_;
    for (std::size_t k = 0; k < n_; ++k) {
      const double w = factor.data_[i * n_ + k];
      if (w == 0.0) continue;
      const double* src = data_.data() + k * n_;
      for (std::size_t j = 0; j < n_; ++j) out[j] += w * src[j];
    }
  }
  data_.swap(scratch);
  renormalize_rows();
}

SkeletonMask::SkeletonMask(std::size_t n, std::vector<std::uint8_t> bits) : n_(n), bits_(std::move(bits)) {
  if (bits_.size() != n * n) raise(Errc::DimensionMismatch, "SkeletonMask: bit count is not n*n");
  for (auto& b : bits_) b = b ? 1 : 0;
}

SkeletonMask SkeletonMask::all_true(std::size_t n) { return {n, std::vector<std::uint8_t>(n * n, 1)}; }

bool SkeletonMask::is_all_true() const noexcept {
  return std::all_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; });
}

std::size_t SkeletonMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

StochasticMatrix make_stochastic(const std::vector<std::vector<double>>& rows, double row_tol) {
  const std::size_t n = rows.size();
  std::vector<double> flat;
  flat.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) {
      std::ostringstream os;
      os << "row " << i << " has " << rows[i].size() << " entries, expected " << n;
      raise(Errc::DimensionMismatch, os.str());
    }
    flat.insert(flat.end(), rows[i].begin(), rows[i].end());
  }
  return make_stochastic(n, flat, row_tol);
}

StochasticMatrix make_stochastic(std::size_t n, std::span<const double> row_major, double row_tol) {
  if (n == 0) raise(Errc::InvalidArgument, "make_stochastic: empty matrix");
  if (row_major.size() != n * n) raise(Errc::DimensionMismatch, "make_stochastic: entry count is not n*n");
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = row_major[i * n + j];
      if (!(v >= 0.0)) {
        std::ostringstream os;
        os << "entry (" << i << "," << j << ") = " << v;
        raise(Errc::NegativeEntry, os.str());
      }
      s += v;
    }
    if (std::abs(s - 1.0) > row_tol) {
      std::ostringstream os;
      os.precision(17);
      os << "row " << i << " sums to " << s;
      raise(Errc::RowSumViolation, os.str());
    }
  }
  return StochasticMatrix::adopt(n, std::vector<double>(row_major.begin(), row_major.end()));
}

StochasticMatrix multiply(const StochasticMatrix& a, const StochasticMatrix& b) {
  require_same_size(a.size(), b.size(), "multiply");
  StochasticMatrix out = b;
  std::vector<double> scratch;
  out.left_multiply_by(a, scratch);
  return out;
}

SkeletonMask skeleton(const StochasticMatrix& m, double zero_tol) {
  std::vector<std::uint8_t> bits(m.entries().size());
  std::transform(m.entries().begin(), m.entries().end(), bits.begin(),
                 [zero_tol](double v) { return static_cast<std::uint8_t>(v > zero_tol); });
  return {m.size(), std::move(bits)};
}

bool same_skeleton(const StochasticMatrix& a, const StochasticMatrix& b) {
  require_same_size(a.size(), b.size(), "same_skeleton");
  return skeleton(a) == skeleton(b);
}

SkeletonMask boolean_product(const SkeletonMask& a, const SkeletonMask& b) {
  require_same_size(a.size(), b.size(), "boolean_product");
  const std::size_t n = a.size();
  std::vector<std::uint8_t> bits(n * n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      if (!a(i, k)) continue;
      for (std::size_t j = 0; j < n; ++j) bits[i * n + j] |= b.bits()[k * n + j];
    }
  return {n, std::move(bits)};
}

SkeletonMask mask_union(const SkeletonMask& a, const SkeletonMask& b) {
  require_same_size(a.size(), b.size(), "mask_union");
  std::vector<std::uint8_t> bits(a.bits());
  for (std::size_t k = 0; k < bits.size(); ++k) bits[k] |= b.bits()[k];
  return {a.size(), std::move(bits)};
}

bool is_strictly_positive(const StochasticMatrix& m, double zero_tol) {
  return std::all_of(m.entries().begin(), m.entries().end(), [zero_tol](double v) { return v > zero_tol; });
}

bool is_bistochastic(const StochasticMatrix& m, double tol) {
  const std::size_t n = m.size();
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += m(i, j);
    if (std::abs(s - 1.0) > tol) return false;
  }
  return true;
}

double dobrushin_coefficient(const StochasticMatrix& m) {
  const std::size_t n = m.size();
  double min_overlap = 1.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = i + 1; k < n; ++k) {
      double overlap = 0.0;
      for (std::size_t j = 0; j < n; ++j) overlap += std::min(m(i, j), m(k, j));
      min_overlap = std::min(min_overlap, overlap);
    }
  return std::clamp(1.0 - min_overlap, 0.0, 1.0);
}

double lambda2_2x2(const StochasticMatrix& m) {
  if (m.size() != 2) raise(Errc::DimensionMismatch, "lambda2_2x2 requires a 2x2 matrix");
  return m(0, 0) - m(1, 0);
}

RankReport numeric_rank(std::size_t n, std::span<const double> row_major, double rel_tol) {
  if (row_major.size() != n * n) raise(Errc::DimensionMismatch, "numeric_rank: entry count is not n*n");
  Eigen::Map<const RowMajor> a(row_major.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  if (svd.info() != Eigen::Success) raise(Errc::NumericalFailure, "singular value decomposition did not converge");
  RankReport report;
  const auto& sv = svd.singularValues();
  report.singular_values.assign(sv.data(), sv.data() + sv.size());
  report.tol_used = rel_tol;
  const double largest = report.singular_values.empty() ? 0.0 : report.singular_values.front();
  report.numeric_rank = static_cast<std::size_t>(std::count_if(
      report.singular_values.begin(), report.singular_values.end(),
      [&](double s) { return s > rel_tol * largest; }));
  return report;
}

RankReport numeric_rank(const StochasticMatrix& m, double rel_tol) {
  return numeric_rank(m.size(), m.entries(), rel_tol);
}

double distance_to_rank_one(const StochasticMatrix& m) {
  const std::size_t n = m.size();
  double gap = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
      lo = std::min(lo, m(i, j));
      hi = std::max(hi, m(i, j));
    }
    gap = std::max(gap, hi - lo);
  }
  return gap;
}

double distance_to_uniform(const StochasticMatrix& m) {
  const std::size_t n = m.size();
  const double u = 1.0 / static_cast<double>(n);
  RowMajor d(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  double frob = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double v = m(i, j) - u;
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      frob += v * v;
    }
  if (frob == 0.0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(d);
  return svd.singularValues()(0);
}

double max_abs_difference(const StochasticMatrix& a, const StochasticMatrix& b) {
  require_same_size(a.size(), b.size(), "max_abs_difference");
  double d = 0.0;
  for (std::size_t k = 0; k < a.entries().size(); ++k) d = std::max(d, std::abs(a.entries()[k] - b.entries()[k]));
  return d;
}

std::size_t wielandt_bound(std::size_t n) noexcept { return n == 0 ? 1 : (n - 1) * (n - 1) + 1; }

bool skeleton_is_primitive(const SkeletonMask& s, std::size_t max_power) {
  if (max_power == 0) max_power = wielandt_bound(s.size());
  SkeletonMask power = s;
  for (std::size_t p = 1; p <= max_power; ++p) {
    if (power.is_all_true()) return true;
    if (p < max_power) power = boolean_product(power, s);
  }
  return false;
}

std::vector<double> stationary_distribution(const StochasticMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.size());
  Eigen::Map<const RowMajor> t(m.entries().data(), n, n);
  // Solve s (T - I) = 0 with the normalisation sum(s) = 1 appended.
  Eigen::MatrixXd a(n + 1, n);
  a.topRows(n) = t.transpose() - Eigen::MatrixXd::Identity(n, n);
  a.row(n).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs(n) = 1.0;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < n) raise(Errc::EigenvectorFailure, "unit eigenvalue is not simple");
  Eigen::VectorXd s = qr.solve(rhs);
  if ((a * s - rhs).norm() > 1e-9) raise(Errc::EigenvectorFailure, "no stochastic left eigenvector found");
  std::vector<double> out(s.data(), s.data() + n);
  for (double& v : out) v = std::max(v, 0.0);
  const double total = std::accumulate(out.begin(), out.end(), 0.0);
  for (double& v : out) v /= total;
  return out;
}

}  // namespace degroot
