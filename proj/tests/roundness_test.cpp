#include "embedlab/roundness.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>

namespace embedlab {
namespace {

// Brute-force RHS - LHS straight from the closed-form distance, integral q.
std::int64_t brute_deficit(const std::vector<PointM>& a, const std::vector<PointM>& b, int q) {
  auto pw = [q](int d) {
    std::int64_t r = 1;
    for (int i = 0; i < q; ++i) r *= d;
    return r;
  };
  std::int64_t lhs = 0, rhs = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      rhs += pw(distance(a[i], b[j]));
      if (i < j) lhs += pw(distance(a[i], a[j])) + pw(distance(b[i], b[j]));
    }
  return rhs - lhs;
}

std::vector<int> iota_indices(int n) {
  std::vector<int> v(n);
  std::iota(v.begin(), v.end(), 1);
  return v;
}

TEST(RoundnessDeficitTest, PaperCertificateInM3) {
  const auto space = build_truncation(3);
  const std::vector<int> idx{1, 2, 3};
  const auto cert = paper_certificate(space, idx);
  const auto sums = roundness_deficit(space, cert.a_list, cert.b_list, 1);
  ASSERT_TRUE(sums.exact);
  EXPECT_EQ(sums.cross, 15);
  EXPECT_EQ(sums.within, 12);
  EXPECT_EQ(sums.deficit(), 3);
  EXPECT_EQ(brute_deficit(cert.a_list, cert.b_list, 1), 3);
}

TEST(RoundnessDeficitTest, IdenticalListsGiveZero) {
  const auto space = build_truncation(4);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<PointM> pts;
    const int n = 2 + static_cast<int>(rng() % 5);
    for (int i = 0; i < n; ++i) pts.push_back(space.point(rng() % space.size()));
    EXPECT_EQ(roundness_deficit(space, pts, pts, 1).deficit(), 0);
  }
}

TEST(RoundnessDeficitTest, TwoPointConfiguration) {
  const auto space = build_truncation(2);
  const std::vector<PointM> a{PointM::integer(1), PointM::integer(2)};
  const std::vector<PointM> b{PointM::set({2}), PointM::set({1})};
  const auto sums = roundness_deficit(space, a, b, 1);
  EXPECT_EQ(sums.within, 6);
  EXPECT_EQ(sums.cross, 8);
  EXPECT_EQ(sums.deficit(), 2);
}

TEST(RoundnessDeficitTest, Errors) {
  const auto space = build_truncation(3);
  const std::vector<PointM> a{PointM::integer(1), PointM::integer(2)};
  const std::vector<PointM> b3{PointM::root(), PointM::integer(3), PointM::integer(1)};
  EXPECT_THROW(roundness_deficit(space, a, b3, 1), Error);
  const std::vector<PointM> outside{PointM::integer(1), PointM::integer(7)};
  try {
    roundness_deficit(space, a, outside, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Membership);
  }
  EXPECT_THROW(roundness_deficit(space, a, a, 0), Error);
}

TEST(RoundnessDeficitTest, IntegralExponentMatchesBruteForce) {
  const auto space = build_truncation(5);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    std::vector<PointM> a, b;
    for (int i = 0; i < n; ++i) {
      a.push_back(space.point(rng() % space.size()));
      b.push_back(space.point(rng() % space.size()));
    }
    for (int q : {1, 2, 3})
      EXPECT_EQ(roundness_deficit(space, a, b, q).deficit(), brute_deficit(a, b, q));
  }
}

TEST(RoundnessDeficitTest, FractionalExponentIsFloat) {
  const auto space = build_truncation(3);
  const auto cert = paper_certificate(space, iota_indices(3));
  const auto sums = roundness_deficit(space, cert.a_list, cert.b_list, make_rational(1, 2));
  EXPECT_FALSE(sums.exact);
  EXPECT_THROW((void)sums.deficit(), Error);
  // within: 6 pairs at distance 2; cross: 3 at distance 3, 6 at distance 1
  const double within = 6 * std::sqrt(2.0);
  const double cross = 3 * std::sqrt(3.0) + 6;
  EXPECT_NEAR(sums.deficit_approx(), cross - within, 1e-12);
  EXPECT_TRUE(sums.holds());
}

TEST(RoundnessDeficitTest, InvariantUnderIndependentPermutations) {
  const auto space = build_truncation(5);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    std::vector<PointM> a, b;
    for (int i = 0; i < n; ++i) {
      a.push_back(space.point(rng() % space.size()));
      b.push_back(space.point(rng() % space.size()));
    }
    const Rational base = roundness_deficit(space, a, b, 1).deficit();
    std::shuffle(a.begin(), a.end(), rng);
    std::shuffle(b.begin(), b.end(), rng);
    EXPECT_EQ(roundness_deficit(space, a, b, 1).deficit(), base);
  }
}

TEST(PaperCertificateTest, Configuration) {
  const auto space = build_truncation(9);
  const std::vector<int> idx{2, 5, 9};
  const auto cert = paper_certificate(space, idx);
  EXPECT_EQ(cert.a_list, (std::vector<PointM>{PointM::integer(2), PointM::integer(5),
                                               PointM::integer(9)}));
  EXPECT_EQ(cert.b_list, (std::vector<PointM>{PointM::set({5, 9}), PointM::set({2, 9}),
                                               PointM::set({2, 5})}));
}

TEST(PaperCertificateTest, CrossDistancesForFour) {
  const auto space = build_truncation(4);
  const auto cert = paper_certificate(space, iota_indices(4));
  int threes = 0, ones = 0;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      const int d = space.distance(cert.a_list[i], cert.b_list[j]);
      if (i == j) {
        EXPECT_EQ(d, 3);
        ++threes;
      } else {
        EXPECT_EQ(d, 1);
        ++ones;
      }
      if (i != j) {
        EXPECT_EQ(space.distance(cert.a_list[i], cert.a_list[j]), 2);
        EXPECT_EQ(space.distance(cert.b_list[i], cert.b_list[j]), 2);
      }
    }
  EXPECT_EQ(threes, 4);
  EXPECT_EQ(ones, 12);
}

TEST(PaperCertificateTest, Errors) {
  const auto space = build_truncation(5);
  const std::vector<int> two{1, 2}, dup{1, 2, 2}, big{1, 2, 6}, zero{0, 1, 2};
  EXPECT_THROW(paper_certificate(space, two), Error);
  EXPECT_THROW(paper_certificate(space, dup), Error);
  EXPECT_THROW(paper_certificate(space, big), Error);
  EXPECT_THROW(paper_certificate(space, zero), Error);
  const std::vector<int> ok{1, 2, 3};
  EXPECT_THROW(paper_certificate(TruncatedSpace::n0_space(5), ok), Error);
}

TEST(PaperCertificateTest, DeficitClosedForm) {
  for (int n = 3; n <= 10; ++n) {
    const auto space = build_truncation(n);
    const auto cert = paper_certificate(space, iota_indices(n));
    const auto sums = roundness_deficit(space, cert.a_list, cert.b_list, 1);
    EXPECT_EQ(sums.deficit(), n * (4 - n));
    EXPECT_EQ(sums.deficit(), brute_deficit(cert.a_list, cert.b_list, 1));
    // equality case: scaling the cross terms by the lower bound closes the gap
    const Rational bound = *distortion_lower_bound(n, 1).exact;
    EXPECT_EQ(bound * sums.cross - sums.within, 0);
  }
}

TEST(LowerBoundTest, Examples) {
  EXPECT_EQ(*distortion_lower_bound(4, 1).exact, 1);
  EXPECT_EQ(*distortion_lower_bound(31, 1).exact, make_rational(20, 11));
  EXPECT_EQ(*distortion_lower_bound(3, 1).exact, make_rational(4, 5));
  EXPECT_EQ(*distortion_lower_bound(5, 1).exact, make_rational(8, 7));
  EXPECT_NEAR(distortion_lower_bound(31, 1).value, 20.0 / 11.0, 1e-15);
  EXPECT_THROW(distortion_lower_bound(2, 1), Error);
  EXPECT_THROW(distortion_lower_bound(5, 0), Error);
}

TEST(LowerBoundTest, IncreasingBelowTwoAndTendsToTwo) {
  Rational prev = 0;
  for (int n = 3; n <= 10000; ++n) {
    const Rational b = *distortion_lower_bound(n, 1).exact;
    EXPECT_GT(b, prev);
    EXPECT_LT(b, 2);
    prev = b;
  }
  for (const Rational& q : {Rational(2), make_rational(1, 2), Rational(3)}) {
    double last = 0;
    for (int n : {3, 10, 100, 1000, 100000, 10000000}) {
      const double v = distortion_lower_bound(n, q).value;
      EXPECT_GT(v, last);
      EXPECT_LT(v, 2.0);
      last = v;
    }
    EXPECT_GT(last, 1.99);
  }
}

TEST(LowerBoundTest, FractionalExponentMatchesFormula) {
  const auto rec = distortion_lower_bound(10, 2);
  EXPECT_FALSE(rec.exact.has_value());
  EXPECT_NEAR(rec.value, 2.0 / std::sqrt(1.0 + 9.0 / 9.0), 1e-14);
}

TEST(ImageCheckTest, QuadrilateralCase) {
  const std::vector<std::vector<std::int64_t>> v{{0, 0}, {3, -1}, {1, 4}, {-2, 2}};
  const std::vector<std::size_t> a{0, 1}, b{2, 3};
  const auto r = check_inequality_on_images(v, a, b);
  auto l1 = [&](std::size_t x, std::size_t y) {
    return std::abs(v[x][0] - v[y][0]) + std::abs(v[x][1] - v[y][1]);
  };
  EXPECT_EQ(r.deficit, l1(0, 2) + l1(0, 3) + l1(1, 2) + l1(1, 3) - l1(0, 1) - l1(2, 3));
  EXPECT_TRUE(r.holds);
}

TEST(ImageCheckTest, RandomIntegerConfigurationsAreNonnegative) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> coord(-10, 10);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 5;
    const std::size_t k = 1 + rng() % 5;
    std::vector<std::vector<Rational>> v(2 * n, std::vector<Rational>(k));
    for (auto& row : v)
      for (auto& c : row) c = Rational(coord(rng));
    std::vector<std::size_t> a(n), b(n);
    std::iota(a.begin(), a.end(), 0);
    std::iota(b.begin(), b.end(), n);
    const auto r = check_inequality_on_images(v, a, b);
    EXPECT_TRUE(r.holds);
    EXPECT_GE(r.deficit, 0);
  }
}

TEST(ImageCheckTest, ScalesLinearly) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> coord(-10, 10);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng() % 4, k = 1 + rng() % 4;
    std::vector<std::vector<Rational>> v(2 * n, std::vector<Rational>(k));
    for (auto& row : v)
      for (auto& c : row) c = Rational(coord(rng));
    std::vector<std::size_t> a(n), b(n);
    std::iota(a.begin(), a.end(), 0);
    std::iota(b.begin(), b.end(), n);
    const Rational c = make_rational(7, 3);
    auto scaled = v;
    for (auto& row : scaled)
      for (auto& x : row) x *= c;
    EXPECT_EQ(check_inequality_on_images(scaled, a, b).deficit,
              c * check_inequality_on_images(v, a, b).deficit);
  }
}

TEST(ImageCheckTest, DimensionMismatch) {
  const std::vector<std::vector<Rational>> v{{1, 2}, {3}};
  const std::vector<std::size_t> a{0}, b{1};
  EXPECT_THROW(check_inequality_on_images(v, a, b), Error);
}

}  // namespace
}  // namespace embedlab
