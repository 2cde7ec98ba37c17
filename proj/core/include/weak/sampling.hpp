#pragma once

// Uniform-variate sources and Monte Carlo / quasi-Monte Carlo estimation.
//
// Every source is random access: point k is a pure function of the source descriptor
// and k, which lets workers generate their own blocks without shared state.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace weak {

/// Standard normal quantile (Wichura AS241); throws DomainError unless 0 < u < 1.
double inv_normal_cdf(double u);
/// Standard normal distribution function.
double normal_cdf(double x);

/// Primitive polynomials and initial direction integers in the Joe-Kuo text layout
/// ("d s a m_i" header, one row per dimension starting at 2).
class DirectionTable {
 public:
  struct Row {
    unsigned degree = 0;
    std::uint32_t coefficients = 0;
    std::vector<std::uint32_t> initial;
  };

  static DirectionTable parse(std::string_view text);
  static DirectionTable load(const std::string& path);
  /// The table compiled into the library (1024 dimensions).
  static const DirectionTable& embedded();

  /// Highest supported dimension, counting the first (van der Corput) coordinate.
  std::size_t max_dimension() const noexcept { return rows_.size() + 1; }
  const Row& row(std::size_t dimension_index) const { return rows_.at(dimension_index - 1); }

 private:
  std::vector<Row> rows_;  // rows_[k] describes dimension k + 2
};

/// Sobol points in Gray-code order: point i XORs the direction numbers selected by
/// the bits of i ^ (i >> 1). Index 0 is the origin.
class SobolSequence {
 public:
  static constexpr unsigned kBits = 32;

  explicit SobolSequence(std::size_t dimension, const DirectionTable& table = DirectionTable::embedded());

  std::size_t dimension() const noexcept { return dimension_; }
  void point(std::uint64_t index, std::span<double> out) const;
  /// Raw integer coordinates of point `index`.
  void integer_point(std::uint64_t index, std::span<std::uint32_t> out) const;
  std::uint32_t direction(std::size_t dim, unsigned bit) const { return directions_[dim * kBits + bit]; }

 private:
  std::size_t dimension_;
  std::vector<std::uint32_t> directions_;  // dimension x kBits
};

enum class SourceKind { pseudo_random, sobol };

/// A uniform point set on (0,1)^D. Sample k maps to Sobol index k + 1 + skip (the
/// origin is never emitted) or to counter-mode SplitMix64 outputs.
class UniformSource {
 public:
  static UniformSource sobol(std::size_t dimension, std::uint64_t skip = 0,
                             const DirectionTable& table = DirectionTable::embedded());
  static UniformSource pseudo_random(std::size_t dimension, std::uint64_t seed);

  SourceKind kind() const noexcept { return kind_; }
  std::size_t dimension() const noexcept { return dimension_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t skip() const noexcept { return skip_; }

  /// Random access to sample k.
  void point(std::uint64_t sample, std::span<double> out) const;

  /// Sequential access starting at `first`; produces exactly what point() would.
  class Stream {
   public:
    Stream(const UniformSource& source, std::uint64_t first);
    void next(std::span<double> out);

   private:
    const UniformSource* source_;
    std::uint64_t sample_;
    std::uint64_t sobol_index_ = 0;
    std::vector<std::uint32_t> state_;
  };

  Stream stream(std::uint64_t first) const { return Stream(*this, first); }

 private:
  UniformSource() = default;

  SourceKind kind_ = SourceKind::pseudo_random;
  std::size_t dimension_ = 0;
  std::uint64_t seed_ = 0;
  std::uint64_t skip_ = 0;
  std::optional<SobolSequence> sobol_;
};

/// Lower-triangular square root of a 2x2 covariance, applied to iid N(0,1) pairs.
class PairCorrelator {
 public:
  /// Throws ConfigurationError when [[R11, R12], [R12, R22]] is not PSD.
  PairCorrelator(double R11, double R12, double R22);

  std::pair<double, double> operator()(double z1, double z2) const noexcept {
    return {l11_ * z1, l21_ * z1 + l22_ * z2};
  }

  double l11() const noexcept { return l11_; }
  double l21() const noexcept { return l21_; }
  double l22() const noexcept { return l22_; }

 private:
  double l11_, l21_, l22_;
};

inline std::pair<double, double> correlate_pair(double z1, double z2, double R11, double R12, double R22) {
  return PairCorrelator(R11, R12, R22)(z1, z2);
}

enum class EstimatorMode { mc, qmc };

EstimatorMode parse_estimator_mode(const std::string& text);
std::string to_string(EstimatorMode mode);

/// A function on (0,1)^D. Implementations must be safe to call concurrently.
class Integrand {
 public:
  virtual ~Integrand() = default;
  virtual std::size_t dimension() const = 0;
  virtual double operator()(std::span<const double> u) const = 0;
};

struct EstimateOptions {
  EstimatorMode mode = EstimatorMode::qmc;
  std::uint64_t samples = 0;
  std::optional<double> reference;
  /// 0 selects std::thread::hardware_concurrency().
  unsigned workers = 0;
};

struct EstimatorReport {
  static constexpr std::size_t kBatches = 10;

  double estimate = 0.0;
  /// MC: 2 x standard deviation of the 10 batch means. QMC: |estimate - reference|,
  /// absent without a reference.
  std::optional<double> error;
  std::uint64_t samples = 0;
  double seconds = 0.0;
  std::vector<double> batch_means;
};

/// Averages the integrand over samples 0..M-1 of `source`. The sum is formed from
/// fixed-size chunks combined pairwise, so the result does not depend on the worker count.
EstimatorReport estimate(const Integrand& integrand, const UniformSource& source, const EstimateOptions& options);

/// Pairwise (cascade) summation.
double pairwise_sum(std::span<const double> values);

}  // namespace weak
