#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace degroot {

inline constexpr double kRowTol = 1e-12;
inline constexpr double kZeroTol = 1e-12;
inline constexpr double kRankRelTol = 1e-8;

/// Dense n x n row-stochastic matrix stored row-major.
///
/// Instances are immutable from the outside and always satisfy the
/// stochastic invariant: entries in [0, 1] and every row summing to one in
/// working precision (rows are renormalised on construction).
class StochasticMatrix {
 public:
  StochasticMatrix() = default;

  static StochasticMatrix identity(std::size_t n);
  /// The rank-one averaging matrix 11'/n.
  static StochasticMatrix uniform(std::size_t n);
  /// Unit mass on the cyclic successor: row i puts weight 1 on i+1 (mod n).
  static StochasticMatrix cyclic_shift(std::size_t n);

  /// Wraps entries produced by trusted arithmetic (products, mixtures,
  /// samplers). Round-off negatives are clamped to zero and rows are
  /// renormalised; no tolerance check is performed.
  static StochasticMatrix adopt(std::size_t n, std::vector<double> entries);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * n_, n_};
  }
  const std::vector<double>& entries() const noexcept { return data_; }
  std::vector<std::vector<double>> to_rows() const;

  /// Replaces *this by factor * (*this). Zero entries of the factor are
  /// skipped, so sparse interaction matrices cost O(nnz * n).
  void left_multiply_by(const StochasticMatrix& factor, std::vector<double>& scratch);

  friend bool operator==(const StochasticMatrix&, const StochasticMatrix&) = default;

 private:
  StochasticMatrix(std::size_t n, std::vector<double> data) : n_(n), data_(std::move(data)) {}
  void renormalize_rows() noexcept;

  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Zero/nonzero pattern of a stochastic matrix.
class SkeletonMask {
 public:
  SkeletonMask() = default;
  SkeletonMask(std::size_t n, std::vector<std::uint8_t> bits);

  static SkeletonMask all_true(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  bool operator()(std::size_t i, std::size_t j) const noexcept { return bits_[i * n_ + j] != 0; }
  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }
  bool is_all_true() const noexcept;
  std::size_t count() const noexcept;

  friend bool operator==(const SkeletonMask&, const SkeletonMask&) = default;
  friend auto operator<=>(const SkeletonMask& a, const SkeletonMask& b) {
    if (auto c = a.n_ <=> b.n_; c != 0) return c;
    return a.bits_ <=> b.bits_;
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> bits_;
};

struct RankReport {
  std::size_t numeric_rank = 0;
  std::vector<double> singular_values;
  double tol_used = 0.0;
};

StochasticMatrix make_stochastic(const std::vector<std::vector<double>>& rows,
                                 double row_tol = kRowTol);
StochasticMatrix make_stochastic(std::size_t n, std::span<const double> row_major,
                                 double row_tol = kRowTol);

/// Returns a * b. The engine composes left products as X_{t+1} * X^(t).
StochasticMatrix multiply(const StochasticMatrix& a, const StochasticMatrix& b);

SkeletonMask skeleton(const StochasticMatrix& m, double zero_tol = kZeroTol);
bool same_skeleton(const StochasticMatrix& a, const StochasticMatrix& b);
/// Boolean matrix product: (a*b)[i][j] = OR_k a[i][k] AND b[k][j].
SkeletonMask boolean_product(const SkeletonMask& a, const SkeletonMask& b);
/// Entrywise OR of two masks.
SkeletonMask mask_union(const SkeletonMask& a, const SkeletonMask& b);

bool is_strictly_positive(const StochasticMatrix& m, double zero_tol = kZeroTol);
bool is_bistochastic(const StochasticMatrix& m, double tol = 1e-9);

/// 1 - min over row pairs of sum_j min(m[i][j], m[k][j]).
double dobrushin_coefficient(const StochasticMatrix& m);

/// Second eigenvalue a - b of the 2x2 matrix (a, 1-a; b, 1-b).
double lambda2_2x2(const StochasticMatrix& m);

RankReport numeric_rank(const StochasticMatrix& m, double rel_tol = kRankRelTol);
RankReport numeric_rank(std::size_t n, std::span<const double> row_major,
                        double rel_tol = kRankRelTol);

/// max_j (max_i m[i][j] - min_i m[i][j]); zero iff all rows coincide.
double distance_to_rank_one(const StochasticMatrix& m);

/// Spectral norm of m - 11'/n.
double distance_to_uniform(const StochasticMatrix& m);

/// Entrywise max |a - b|.
double max_abs_difference(const StochasticMatrix& a, const StochasticMatrix& b);

/// Default power bound for boolean primitivity: (n-1)^2 + 1.
std::size_t wielandt_bound(std::size_t n) noexcept;
bool skeleton_is_primitive(const SkeletonMask& s, std::size_t max_power = 0);

/// Unit left eigenvector s of m for eigenvalue one (s m = s, sum s = 1).
std::vector<double> stationary_distribution(const StochasticMatrix& m);

}  // namespace degroot
