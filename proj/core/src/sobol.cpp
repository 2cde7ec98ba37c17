#include "weak/errors.hpp"
#include "weak/sampling.hpp"

#include <bit>
#include <fstream>
#include <sstream>

namespace weak {

namespace detail {
std::string_view embedded_sobol_table();
}

DirectionTable DirectionTable::parse(std::string_view text) {
  DirectionTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t expected = 2;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::size_t dim = 0;
    if (!(fields >> dim)) continue;  // header or blank line
    Row row;
    if (!(fields >> row.degree >> row.coefficients)) {
      throw ConfigurationError("direction table: malformed row for dimension " + std::to_string(dim));
    }
    if (dim != expected) {
      throw ConfigurationError("direction table: expected dimension " + std::to_string(expected) + ", found " +
                               std::to_string(dim));
    }
    if (row.degree == 0 || row.degree >= SobolSequence::kBits) {
      throw ConfigurationError("direction table: bad degree in dimension " + std::to_string(dim));
    }
    for (unsigned k = 0; k < row.degree; ++k) {
      std::uint32_t m = 0;
      if (!(fields >> m)) {
        throw ConfigurationError("direction table: dimension " + std::to_string(dim) + " lists fewer than " +
                                 std::to_string(row.degree) + " initial integers");
      }
      // m_k must be odd and below 2^k.
      if ((m & 1u) == 0 || m >= (1u << (k + 1))) {
        throw ConfigurationError("direction table: invalid initial integer in dimension " + std::to_string(dim));
      }
      row.initial.push_back(m);
    }
    table.rows_.push_back(std::move(row));
    ++expected;
  }
  return table;
}

DirectionTable DirectionTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open direction table '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const DirectionTable& DirectionTable::embedded() {
  static const DirectionTable table = parse(detail::embedded_sobol_table());
  return table;
}

SobolSequence::SobolSequence(std::size_t dimension, const DirectionTable& table)
    : dimension_(dimension), directions_(dimension * kBits) {
  if (dimension == 0) throw ConfigurationError("Sobol sequence needs at least one dimension");
  if (dimension > table.max_dimension()) {
    throw ConfigurationError("Sobol dimension " + std::to_string(dimension) + " exceeds the direction table (" +
                             std::to_string(table.max_dimension()) + ")");
  }
  for (unsigned k = 0; k < kBits; ++k) directions_[k] = 1u << (kBits - 1 - k);
  for (std::size_t j = 1; j < dimension; ++j) {
    const DirectionTable::Row& row = table.row(j);
    const unsigned s = row.degree;
    std::vector<std::uint32_t> m(kBits);
    for (unsigned k = 0; k < s; ++k) m[k] = row.initial[k];
    for (unsigned k = s; k < kBits; ++k) {
      std::uint32_t v = m[k - s] ^ (m[k - s] << s);
      for (unsigned i = 1; i < s; ++i) {
        if ((row.coefficients >> (s - 1 - i)) & 1u) v ^= m[k - i] << i;
      }
      m[k] = v;
    }
    for (unsigned k = 0; k < kBits; ++k) directions_[j * kBits + k] = m[k] << (kBits - 1 - k);
  }
}

void SobolSequence::integer_point(std::uint64_t index, std::span<std::uint32_t> out) const {
  if (out.size() != dimension_) throw ConfigurationError("Sobol point: output size mismatch");
  if (index >> kBits) throw ConfigurationError("Sobol index exceeds 2^32");
  const std::uint64_t gray = index ^ (index >> 1);
  for (std::size_t j = 0; j < dimension_; ++j) {
    std::uint32_t x = 0;
    for (std::uint64_t g = gray; g != 0; g &= g - 1) x ^= directions_[j * kBits + std::countr_zero(g)];
    out[j] = x;
  }
}

void SobolSequence::point(std::uint64_t index, std::span<double> out) const {
  std::vector<std::uint32_t> raw(dimension_);
  integer_point(index, raw);
  for (std::size_t j = 0; j < dimension_; ++j) out[j] = static_cast<double>(raw[j]) * 0x1.0p-32;
}

}  // namespace weak
