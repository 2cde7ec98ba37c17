#include "weak/errors.hpp"
#include "weak/rational.hpp"

#include <gtest/gtest.h>

using weak::Rational;

TEST(Rational, ParsesFractionsIntegersAndDecimals) {
  EXPECT_EQ(weak::parse_rational("11/64"), Rational(11, 64));
  EXPECT_EQ(weak::parse_rational("-15/64"), Rational(-15, 64));
  EXPECT_EQ(weak::parse_rational("42"), Rational(42));
  EXPECT_EQ(weak::parse_rational(" 0.75 "), Rational(3, 4));
  EXPECT_EQ(weak::parse_rational("+0.1"), Rational(1, 10));
  EXPECT_EQ(weak::parse_rational("-.5"), Rational(-1, 2));
  EXPECT_EQ(weak::parse_rational("6/8"), Rational(3, 4));
}

TEST(Rational, LeadingZerosAreDecimal) {
  EXPECT_EQ(weak::parse_rational("010"), Rational(10));
  EXPECT_EQ(weak::parse_rational("0.075"), Rational(3, 40));
  EXPECT_EQ(weak::parse_rational("07/010"), Rational(7, 10));
}

TEST(Rational, RejectsMalformedInput) {
  EXPECT_THROW(weak::parse_rational(""), weak::ConfigurationError);
  EXPECT_THROW(weak::parse_rational("1/0"), weak::ConfigurationError);
  EXPECT_THROW(weak::parse_rational("1/2/3"), weak::ConfigurationError);
  EXPECT_THROW(weak::parse_rational("abc"), weak::ConfigurationError);
  EXPECT_THROW(weak::parse_rational("1e3"), weak::ConfigurationError);
  EXPECT_THROW(weak::parse_rational("."), weak::ConfigurationError);
}

TEST(Rational, ToStringIsCanonical) {
  EXPECT_EQ(weak::to_string(Rational(3, 4)), "3/4");
  EXPECT_EQ(weak::to_string(Rational(-2)), "-2");
  EXPECT_EQ(weak::to_string(weak::parse_rational("4/8")), "1/2");
}

TEST(Rational, ExactSqrt) {
  EXPECT_EQ(weak::exact_sqrt(Rational(9, 4)), Rational(3, 2));
  EXPECT_EQ(weak::exact_sqrt(Rational(1)), Rational(1));
  EXPECT_FALSE(weak::exact_sqrt(Rational(2)).has_value());
  EXPECT_FALSE(weak::exact_sqrt(Rational(-1)).has_value());
}
