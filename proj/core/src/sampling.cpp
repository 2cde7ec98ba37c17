#include "weak/sampling.hpp"

#include "weak/errors.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace weak {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// SplitMix64 output function; the n-th output of a generator seeded with `seed`
// is mix(seed + n * kGolden), which makes every coordinate index-addressable.
std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double to_open_unit(std::uint64_t bits) { return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53; }

constexpr std::uint64_t kChunk = 1024;

}  // namespace

UniformSource UniformSource::sobol(std::size_t dimension, std::uint64_t skip, const DirectionTable& table) {
  UniformSource s;
  s.kind_ = SourceKind::sobol;
  s.dimension_ = dimension;
  s.skip_ = skip;
  s.sobol_.emplace(dimension, table);
  return s;
}

UniformSource UniformSource::pseudo_random(std::size_t dimension, std::uint64_t seed) {
  if (dimension == 0) throw ConfigurationError("uniform source needs at least one dimension");
  UniformSource s;
  s.kind_ = SourceKind::pseudo_random;
  s.dimension_ = dimension;
  s.seed_ = seed;
  return s;
}

void UniformSource::point(std::uint64_t sample, std::span<double> out) const {
  if (out.size() != dimension_) throw ConfigurationError("uniform point: output size mismatch");
  if (kind_ == SourceKind::sobol) {
    sobol_->point(sample + 1 + skip_, out);
    return;
  }
  const std::uint64_t base = sample * dimension_;
  for (std::size_t j = 0; j < dimension_; ++j) out[j] = to_open_unit(mix(seed_ + (base + j + 1) * kGolden));
}

UniformSource::Stream::Stream(const UniformSource& source, std::uint64_t first) : source_(&source), sample_(first) {
  if (source.kind_ == SourceKind::sobol) {
    sobol_index_ = first + 1 + source.skip_;
    state_.resize(source.dimension_);
    source.sobol_->integer_point(sobol_index_, state_);
  }
}

void UniformSource::Stream::next(std::span<double> out) {
  const UniformSource& src = *source_;
  if (src.kind_ == SourceKind::pseudo_random) {
    src.point(sample_++, out);
    return;
  }
  if (out.size() != src.dimension_) throw ConfigurationError("uniform point: output size mismatch");
  for (std::size_t j = 0; j < state_.size(); ++j) out[j] = static_cast<double>(state_[j]) * 0x1.0p-32;
  ++sample_;
  ++sobol_index_;
  if (sobol_index_ >> SobolSequence::kBits) throw ConfigurationError("Sobol index exceeds 2^32");
  const unsigned bit = static_cast<unsigned>(std::countr_zero(sobol_index_));
  for (std::size_t j = 0; j < state_.size(); ++j) state_[j] ^= src.sobol_->direction(j, bit);
}

PairCorrelator::PairCorrelator(double R11, double R12, double R22) {
  const double tol = 1e-14 * std::max({1.0, std::abs(R11), std::abs(R22)});
  if (R11 < -tol || R22 < -tol || R11 * R22 - R12 * R12 < -tol) {
    throw ConfigurationError("covariance is not positive semidefinite");
  }
  if (R11 <= 0.0) {
    if (std::abs(R12) > tol) throw ConfigurationError("covariance is not positive semidefinite");
    l11_ = 0.0;
    l21_ = 0.0;
    l22_ = std::sqrt(std::max(R22, 0.0));
    return;
  }
  l11_ = std::sqrt(R11);
  l21_ = R12 / l11_;
  l22_ = std::sqrt(std::max(R22 - R12 * R12 / R11, 0.0));
}

EstimatorMode parse_estimator_mode(const std::string& text) {
  if (text == "mc") return EstimatorMode::mc;
  if (text == "qmc") return EstimatorMode::qmc;
  throw ConfigurationError("unknown estimator mode '" + text + "' (expected mc or qmc)");
}

std::string to_string(EstimatorMode mode) { return mode == EstimatorMode::mc ? "mc" : "qmc"; }

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

EstimatorReport estimate(const Integrand& integrand, const UniformSource& source, const EstimateOptions& options) {
  if (integrand.dimension() != source.dimension()) {
    throw ConfigurationError("integrand dimension " + std::to_string(integrand.dimension()) +
                             " does not match source dimension " + std::to_string(source.dimension()));
  }
  const std::uint64_t M = options.samples;
  constexpr std::uint64_t B = EstimatorReport::kBatches;
  if (M < B) throw ConfigurationError("estimate: need at least 10 samples");

  // Chunks never straddle a batch boundary, so batch sums are unions of chunk sums.
  struct Chunk {
    std::uint64_t begin, end;
    std::size_t batch;
  };
  std::vector<Chunk> chunks;
  for (std::uint64_t b = 0; b < B; ++b) {
    const std::uint64_t lo = b * M / B;
    const std::uint64_t hi = (b + 1) * M / B;
    for (std::uint64_t c = lo; c < hi; c += kChunk) chunks.push_back({c, std::min(c + kChunk, hi), b});
  }
  std::vector<double> sums(chunks.size(), 0.0);

  unsigned workers = options.workers ? options.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, chunks.size()));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::size_t failed_chunk = chunks.size();
  std::mutex failure_mutex;
  auto work = [&] {
    std::vector<double> u(source.dimension());
    std::vector<double> values(kChunk);
    for (std::size_t c = next++; c < chunks.size(); c = next++) {
      try {
        auto stream = source.stream(chunks[c].begin);
        const std::size_t count = chunks[c].end - chunks[c].begin;
        for (std::size_t k = 0; k < count; ++k) {
          stream.next(u);
          values[k] = integrand(u);
        }
        sums[c] = pairwise_sum(std::span<const double>(values.data(), count));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (c < failed_chunk) {
          failed_chunk = c;
          failure = std::current_exception();
        }
        next = chunks.size();
      }
    }
  };

  const auto start = std::chrono::steady_clock::now();
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  const auto stop = std::chrono::steady_clock::now();
  if (failure) std::rethrow_exception(failure);

  EstimatorReport report;
  report.samples = M;
  report.seconds = std::chrono::duration<double>(stop - start).count();
  report.estimate = pairwise_sum(sums) / static_cast<double>(M);
  std::size_t first = 0;
  for (std::uint64_t b = 0; b < B; ++b) {
    std::size_t last = first;
    while (last < chunks.size() && chunks[last].batch == b) ++last;
    const double count = static_cast<double>((b + 1) * M / B - b * M / B);
    report.batch_means.push_back(
        pairwise_sum(std::span<const double>(sums.data() + first, last - first)) / count);
    first = last;
  }
  if (options.mode == EstimatorMode::mc) {
    double mean = 0.0;
    for (double m : report.batch_means) mean += m;
    mean /= static_cast<double>(B);
    double ss = 0.0;
    for (double m : report.batch_means) ss += (m - mean) * (m - mean);
    report.error = 2.0 * std::sqrt(ss / static_cast<double>(B - 1));
  } else if (options.reference) {
    report.error = std::abs(report.estimate - *options.reference);
  }
  return report;
}

}  // namespace weak
