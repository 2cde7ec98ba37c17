#include "oracles.hpp"

#include "weak/errors.hpp"
#include "weak/freealg.hpp"

#include <gtest/gtest.h>

using weak::Rational;
using weak::Word;
using Series = weak::TruncatedSeries<Rational>;
using Lie = weak::LieElement<Rational>;

namespace {

Series w(const std::string& text, int m, Rational c = Rational(1)) { return Series::word(weak::parse_word(text), m, c); }

// A random series without constant term, every word of scaled degree <= m.
Series random_series(oracle::RationalGen& g, int m, int d, bool constant = false) {
  Series s(m);
  for (const Word& word : weak::enumerate_words(d, m)) {
    if (word.empty() && !constant) continue;
    if (g.next() % 3 == 0) continue;
    s.add_to(word, g.rational(5, 4));
  }
  return s;
}

Lie random_lie(oracle::RationalGen& g, int m) {
  Lie z(m);
  for (int i = 0; i <= 2; ++i) z = z + Lie::letter(i, m, g.rational(3, 3));
  z = z + g.rational(3, 3) * bracket(Lie::letter(1, m), Lie::letter(2, m));
  z = z + g.rational(3, 3) * bracket(Lie::letter(0, m), Lie::letter(1, m));
  return z;
}

}  // namespace

TEST(Word, ScaledDegree) {
  EXPECT_EQ(Word{}.scaled_degree(), 0);
  EXPECT_EQ(Word::of({1, 2}).scaled_degree(), 2);
  EXPECT_EQ(Word::of({0, 1, 0}).scaled_degree(), 5);
}

TEST(Word, TextRoundTrip) {
  EXPECT_EQ(weak::parse_word("v0.v1.v1"), Word::of({0, 1, 1}));
  EXPECT_EQ(Word::of({0, 1, 1}).to_string(), "v0.v1.v1");
  EXPECT_EQ(weak::parse_word("1"), Word{});
  EXPECT_THROW(weak::parse_word("v1.x2"), weak::ConfigurationError);
}

TEST(Word, EnumerationCountsAndOrder) {
  // d = 1, m = 3: 1, v1, v0, v1v1, v0v1, v1v0, v1v1v1.
  const auto words = weak::enumerate_words(1, 3);
  ASSERT_EQ(words.size(), 7u);
  weak::CanonicalWordOrder less;
  for (std::size_t i = 1; i < words.size(); ++i) EXPECT_TRUE(less(words[i - 1], words[i]));
}

TEST(Series, Distributivity) {
  const Series one = Series::one(2);
  const Series p = (one + w("v1", 2)) * (one + w("v2", 2));
  EXPECT_EQ(p, one + w("v1", 2) + w("v2", 2) + w("v1.v2", 2));
}

TEST(Series, TruncationDropsHighDegreeWords) {
  EXPECT_EQ(w("v1", 3) * w("v1", 3), w("v1.v1", 3));
  EXPECT_TRUE((w("v0", 3) * w("v0", 3)).is_zero());
}

TEST(Series, MixedDegreesAreRejected) {
  EXPECT_THROW(w("v1", 2) + w("v1", 3), weak::ConfigurationError);
  EXPECT_THROW(w("v1", 2) * w("v1", 3), weak::ConfigurationError);
}

TEST(Series, MultiplicationIsAssociativeAndDistributive) {
  oracle::RationalGen g(7);
  for (int trial = 0; trial < 5; ++trial) {
    const Series a = random_series(g, 4, 2, true), b = random_series(g, 4, 2, true), c = random_series(g, 4, 2, true);
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ(a * (b + c), a * b + a * c);
  }
}

TEST(Series, ExpOfLetter) {
  const Series expected = Series::one(3) + w("v1", 3) + w("v1.v1", 3, Rational(1, 2)) + w("v1.v1.v1", 3, Rational(1, 6));
  EXPECT_EQ(weak::exp(w("v1", 3)), expected);
  EXPECT_EQ(weak::exp(Series(3)), Series::one(3));
}

TEST(Series, LogInvertsExp) {
  EXPECT_TRUE(weak::log(Series::one(4)).is_zero());
  EXPECT_EQ(weak::log(weak::exp(w("v1", 4) + w("v2", 4))), w("v1", 4) + w("v2", 4));
  EXPECT_EQ(weak::exp(weak::log(Series::one(4) + w("v1", 4))), Series::one(4) + w("v1", 4));
  oracle::RationalGen g(11);
  for (int trial = 0; trial < 5; ++trial) {
    const Series p = random_series(g, 5, 2);
    EXPECT_EQ(weak::log(weak::exp(p)), p);
  }
}

TEST(Series, LogInvertsExpInDoubles) {
  using D = weak::TruncatedSeries<double>;
  D p(5);
  p.add_to(Word::of({1}), 0.3);
  p.add_to(Word::of({0}), -0.7);
  p.add_to(Word::of({2, 1}), 0.11);
  const D back = weak::log(weak::exp(p));
  for (const auto& [word, c] : p.terms()) EXPECT_NEAR(back.coefficient(word), c, 1e-12 * std::abs(c));
  for (const auto& [word, c] : back.terms()) {
    if (p.coefficient(word) == 0.0) {
      EXPECT_NEAR(c, 0.0, 1e-12);
    }
  }
}

TEST(Series, ExpRejectsConstantTerm) {
  EXPECT_THROW(weak::exp(Series::one(2)), weak::DomainError);
}

TEST(Series, Projection) {
  EXPECT_EQ(weak::project_jm(Series::one(3) + w("v1", 3), 0), Series::one(3));
  EXPECT_EQ(weak::project_jm(w("v0", 3) + w("v1.v1", 3) + w("v0.v1", 3), 2), w("v0", 3) + w("v1.v1", 3));
  EXPECT_THROW(weak::project_jm(w("v0", 3), 4), weak::ConfigurationError);
  oracle::RationalGen g(3);
  const Series p = random_series(g, 5, 2, true);
  EXPECT_EQ(weak::project_jm(weak::project_jm(p, 3), 3), weak::project_jm(p, 3));
}

TEST(Series, Rescaling) {
  const Rational s(1, 4);
  EXPECT_EQ(weak::rescale_psi(w("v0", 3), s), w("v0", 3, s));
  EXPECT_EQ(weak::rescale_psi(w("v1", 3), s), w("v1", 3, Rational(1, 2)));
  oracle::RationalGen g(5);
  const Series p = random_series(g, 5, 2, true);
  EXPECT_EQ(weak::rescale_psi(p, Rational(1)), p);
  const Rational t(9, 4);
  EXPECT_EQ(weak::rescale_psi(weak::rescale_psi(p, s), t), weak::rescale_psi(p, Rational(s * t)));
  EXPECT_EQ(weak::project_jm(weak::rescale_psi(p, t), 3), weak::rescale_psi(weak::project_jm(p, 3), t));
  EXPECT_THROW(weak::rescale_psi(p, Rational(2)), weak::DomainError);
}

TEST(Series, InnerProduct) {
  EXPECT_EQ(weak::inner(w("v1", 2), w("v1", 2)), Rational(1));
  EXPECT_EQ(weak::inner(w("v1", 2), w("v2", 2)), Rational(0));
  const Series a = Series::one(2) + w("v1", 2, Rational(2));
  const Series b = Series::one(2) * Rational(3) + w("v1", 2);
  EXPECT_EQ(weak::inner(a, b), Rational(5));
}

TEST(Series, TextForm) {
  const Series p = Series::one(2) + w("v1.v1", 2, Rational(1, 2)) + w("v0", 2);
  EXPECT_EQ(weak::to_string(p), "1 + (1) v0 + (1/2) v1.v1");
}

TEST(Lie, LieTestAcceptsBracketsAndRejectsProducts) {
  const int m = 6;
  EXPECT_TRUE(weak::is_lie(w("v1", m)));
  EXPECT_TRUE(weak::is_lie(weak::bracket(w("v1", m), w("v2", m))));
  EXPECT_FALSE(weak::is_lie(w("v1.v2", m)));
  EXPECT_FALSE(weak::is_lie(w("v1.v1", m)));
  EXPECT_THROW(Lie::checked(w("v1.v2", m)), weak::DomainError);
}

TEST(Lie, BchIdentityAndLowOrderTerms) {
  const int m = 3;
  const Lie a = Lie::letter(1, m), b = Lie::letter(2, m);
  EXPECT_EQ(bch(a, Lie(m)), a);
  // Through scaled degree 2 only the first bracket survives.
  const Lie two = bch(Lie::letter(1, 2), Lie::letter(2, 2));
  EXPECT_EQ(two.series(), w("v1", 2) + w("v2", 2) + Rational(1, 2) * weak::bracket(w("v1", 2), w("v2", 2)));
  // Degree 3: a + b + [a,b]/2 + [a,[a,b]]/12 + [b,[b,a]]/12.
  const Series A = a.series(), B = b.series();
  const Series ab = weak::bracket(A, B);
  const Series expected = A + B + Rational(1, 2) * ab + Rational(1, 12) * weak::bracket(A, ab) +
                          Rational(1, 12) * weak::bracket(B, weak::bracket(B, A));
  EXPECT_EQ(bch(a, b).series(), expected);
}

TEST(Lie, BchIsAssociativeAndStaysLie) {
  oracle::RationalGen g(19);
  const int m = 4;
  for (int trial = 0; trial < 3; ++trial) {
    const Lie z1 = random_lie(g, m), z2 = random_lie(g, m), z3 = random_lie(g, m);
    const Lie left = bch(bch(z1, z2), z3);
    EXPECT_EQ(left, bch(z1, bch(z2, z3)));
    EXPECT_TRUE(weak::is_lie(left.series()));
  }
}
