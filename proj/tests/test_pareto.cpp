#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "paretogp/pareto.hpp"

using namespace pgp;

namespace {

template <std::size_t D>
std::vector<Objectives<D>> random_points(std::mt19937_64& rng, std::size_t n, bool integer) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Objectives<D>> pts(n);
    for (auto& p : pts)
        for (auto& v : p) v = integer ? std::floor(u(rng) * 8.0) : u(rng);
    return pts;
}

}  // namespace

TEST(Dominates, Definition) {
    EXPECT_TRUE(dominates<2>({1, 1}, {1, 2}));
    EXPECT_FALSE(dominates<2>({1, 2}, {1, 2}));
    EXPECT_FALSE(dominates<2>({0, 3}, {1, 2}));
    EXPECT_TRUE(dominates<3>({0, 0, 0}, {0, 0, 1}));
}

TEST(NondominatedSort, SmallExample) {
    const std::vector<Objectives<2>> pts{{1, 5}, {2, 2}, {5, 1}, {3, 3}, {6, 6}, {2, 2}};
    const auto layers = nondominated_sort<2>(pts);
    ASSERT_EQ(layers.size(), 3u);
    EXPECT_EQ(layers[0], (std::vector<std::size_t>{0, 1, 2, 5}));
    EXPECT_EQ(layers[1], (std::vector<std::size_t>{3}));
    EXPECT_EQ(layers[2], (std::vector<std::size_t>{4}));
}

TEST(NondominatedSort, Empty) { EXPECT_TRUE(nondominated_sort<2>(std::vector<Objectives<2>>{}).empty()); }

TEST(NondominatedSort, MatchesBruteForce2D) {
    std::mt19937_64 rng(10);
    for (int t = 0; t < 40; ++t) {
        const auto pts = random_points<2>(rng, 200, t % 2 == 0);
        ASSERT_EQ(nondominated_sort<2>(pts), oracle::brute_layers<2>(pts));
    }
}

TEST(NondominatedSort, MatchesBruteForce3D) {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 40; ++t) {
        const auto pts = random_points<3>(rng, 200, t % 2 == 0);
        ASSERT_EQ(nondominated_sort<3>(pts), oracle::brute_layers<3>(pts));
    }
}

TEST(NondominatedSort, LayersPartitionAndRespectDominance) {
    std::mt19937_64 rng(12);
    const auto pts = random_points<3>(rng, 300, true);
    const auto layers = nondominated_sort<3>(pts);
    std::vector<int> layer_of(pts.size(), -1);
    std::size_t total = 0;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        total += layers[l].size();
        for (auto i : layers[l]) layer_of[i] = static_cast<int>(l);
    }
    EXPECT_EQ(total, pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = 0; j < pts.size(); ++j)
            if (dominates(pts[i], pts[j])) EXPECT_LT(layer_of[i], layer_of[j]);
}

TEST(SelectByLayers, WholeLayersThenTruncation) {
    const std::vector<Objectives<2>> pts{{1, 5}, {2, 2}, {5, 1}, {3, 3}, {6, 6}, {4, 4}};
    // Layers: {0,1,2}, {3}, {5}, {4}. Truncate layer 0 by second objective.
    auto by_second = [&](std::size_t a, std::size_t b) { return pts[a][1] < pts[b][1]; };
    EXPECT_EQ(select_by_layers<2>(pts, 2, by_second), (std::vector<std::size_t>{2, 1}));
    EXPECT_EQ(select_by_layers<2>(pts, 4, by_second), (std::vector<std::size_t>{0, 1, 2, 3}));
    EXPECT_EQ(select_by_layers<2>(pts, 10, by_second).size(), pts.size());
    EXPECT_TRUE(select_by_layers<2>(pts, 0, by_second).empty());
}

TEST(SelectByLayers, MatchesBruteLayeredSelection) {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 30; ++t) {
        const auto pts = random_points<2>(rng, 100, true);
        const std::size_t count = 1 + static_cast<std::size_t>(t * 3);
        auto before = [&](std::size_t a, std::size_t b) {
            return pts[a][1] != pts[b][1] ? pts[a][1] < pts[b][1] : pts[a][0] < pts[b][0];
        };
        // Oracle: sort all indices by (brute layer, then truncation order within the overflowing layer).
        const auto layers = oracle::brute_layers<2>(pts);
        std::vector<std::size_t> want;
        for (auto layer : layers) {
            if (want.size() + layer.size() > count) {
                std::stable_sort(layer.begin(), layer.end(), before);
                layer.resize(count - want.size());
            }
            want.insert(want.end(), layer.begin(), layer.end());
            if (want.size() == count) break;
        }
        auto got = select_by_layers<2>(pts, count, before);
        ASSERT_EQ(got, want);
    }
}
