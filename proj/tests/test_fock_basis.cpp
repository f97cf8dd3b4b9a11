#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <set>
#include <vector>

#include "polariton/fock_basis.hpp"

using namespace polariton;

namespace {

// Every vector in {0..N}^L with the right sum and cap, by odometer.
std::vector<std::vector<int>> brute_force(int L, int N, SiteCap cap) {
  std::vector<std::vector<int>> out;
  const int top = cap ? std::min(*cap, N) : N;
  std::vector<int> v(L, 0);
  while (true) {
    int sum = 0;
    for (int x : v) sum += x;
    if (sum == N) out.push_back(v);
    int i = L - 1;
    while (i >= 0 && v[i] == top) v[i--] = 0;
    if (i < 0) break;
    ++v[i];
  }
  return out;
}

}  // namespace

TEST(FockBasis, PaperSize) {
  EXPECT_EQ(dimension(8, 3), 120u);
  FockBasis b(8, 3);
  EXPECT_EQ(b.size(), 120u);
  EXPECT_EQ(b.size() * b.size(), 14400u);
}

TEST(FockBasis, EmptyLattice) {
  FockBasis b(1, 0);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b.state(0)[0], 0);
  EXPECT_EQ(dimension(5, 0, 1), 1u);
  EXPECT_EQ(dimension(5, 0), 1u);
}

TEST(FockBasis, HardCoreThreeSites) {
  FockBasis b(3, 2, 1);
  ASSERT_EQ(b.size(), 3u);
  const std::vector<std::vector<int>> expected{{1, 1, 0}, {1, 0, 1}, {0, 1, 1}};
  for (std::size_t k = 0; k < 3; ++k) {
    const auto s = b.state(k);
    EXPECT_EQ(std::vector<int>(s.begin(), s.end()), expected[k]);
  }
  EXPECT_EQ(dimension(4, 2, 1), 6u);
}

TEST(FockBasis, DimensionMatchesBruteForce) {
  for (int L = 1; L <= 6; ++L) {
    for (int N = 0; N <= 6; ++N) {
      for (SiteCap cap : {SiteCap{1}, SiteCap{2}, SiteCap{3}, kUnbounded}) {
        if (cap && *cap * L < N) {
          EXPECT_THROW(dimension(L, N, cap), InfeasibleBasis);
          EXPECT_THROW(FockBasis(L, N, cap), InfeasibleBasis);
          continue;
        }
        const auto reference = brute_force(L, N, cap);
        EXPECT_EQ(dimension(L, N, cap), reference.size()) << L << " " << N;
        FockBasis b(L, N, cap);
        ASSERT_EQ(b.size(), reference.size());
        // odometer order is lexicographic ascending; the basis is descending
        for (std::size_t k = 0; k < b.size(); ++k) {
          const auto s = b.state(k);
          EXPECT_EQ(std::vector<int>(s.begin(), s.end()), reference[reference.size() - 1 - k]);
        }
      }
    }
  }
}

TEST(FockBasis, IndexRoundTrip) {
  for (SiteCap cap : {SiteCap{2}, kUnbounded}) {
    FockBasis b(7, 4, cap);
    for (std::size_t k = 0; k < b.size(); ++k) EXPECT_EQ(b.index_of(b.state(k)), k);
    EXPECT_EQ(b.index_of(b.state(0)), 0u);
  }
}

TEST(FockBasis, StrictlyDescending) {
  FockBasis b(5, 4);
  for (std::size_t k = 1; k < b.size(); ++k) {
    const auto prev = b.state(k - 1);
    const auto cur = b.state(k);
    EXPECT_TRUE(std::lexicographical_compare(cur.begin(), cur.end(), prev.begin(), prev.end()));
  }
  EXPECT_EQ(b.state(0)[0], 4);
}

TEST(FockBasis, NotInBasis) {
  FockBasis b(4, 3, 2);
  const std::vector<int> short_sum{1, 1, 0, 0};
  const std::vector<int> over_cap{3, 0, 0, 0};
  const std::vector<int> wrong_size{1, 1, 1};
  const std::vector<int> negative{4, -1, 0, 0};
  EXPECT_THROW(b.index_of(short_sum), NotInBasis);
  EXPECT_THROW(b.index_of(over_cap), NotInBasis);
  EXPECT_THROW(b.index_of(wrong_size), NotInBasis);
  EXPECT_THROW(b.index_of(negative), NotInBasis);
}

TEST(FockBasis, InvalidArguments) {
  EXPECT_THROW(FockBasis(0, 1), InfeasibleBasis);
  EXPECT_THROW(FockBasis(3, -1), InfeasibleBasis);
  EXPECT_THROW(FockBasis(3, 2, 0), InfeasibleBasis);
  EXPECT_THROW(FockBasis(2, 3, 1), InfeasibleBasis);
}

TEST(FockBasis, CapAboveParticleNumberIsUnbounded) {
  EXPECT_EQ(dimension(8, 3, 10), dimension(8, 3));
  EXPECT_EQ(FockBasis(8, 3, 10).size(), 120u);
}
