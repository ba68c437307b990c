#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "paretogp/interval.hpp"
#include "paretogp/text.hpp"
#include "paretogp/variation.hpp"

using namespace pgp;

namespace {

Interval eval_text(const char* text, const std::vector<Interval>& ranges) { return interval_eval(parse(text), ranges); }

}  // namespace

TEST(Interval, AffineModelIsBoundedOverWeatherRanges) {
    const auto r = interval_eval(parse(oracle::kAffineModel, oracle::kWeatherVariables), oracle::kWeatherRanges);
    ASSERT_FALSE(r.pathological);
    EXPECT_LE(r.lo, -25.2334);
    EXPECT_GE(r.hi, -25.2334 + 3.21666 * 70);
    EXPECT_NEAR(r.lo, -25.2334, 1e-12);
    EXPECT_NEAR(r.hi, -25.2334 + 3.21666 * 70, 1e-9);
}

TEST(Interval, EnsembleFixturesAreSafeOverWeatherRanges) {
    for (const auto& f : oracle::ensemble_fixtures())
        EXPECT_FALSE(interval_eval(parse(f.text, oracle::kWeatherVariables), oracle::kWeatherRanges).pathological)
            << f.text;
}

TEST(Interval, SingularitiesInsideTheRangeArePathological) {
    const std::vector<Interval> r{{0.0, 10.0}, {-2.0, 3.0}};
    EXPECT_TRUE(eval_text("inv(x0 - 4)", r).pathological);
    EXPECT_TRUE(eval_text("x1/(x0 - 5)", r).pathological);
    EXPECT_TRUE(eval_text("sqrt(x1)", r).pathological);
    EXPECT_TRUE(eval_text("1/x0", r).pathological);
    EXPECT_FALSE(eval_text("inv(x0 + 1)", r).pathological);
    EXPECT_FALSE(eval_text("sqrt(x0)", r).pathological);
    EXPECT_FALSE(eval_text("sqrt(x1^2)", r).pathological);
}

TEST(Interval, UnboundedResultIsPathological) {
    const std::vector<Interval> r{{0.0, 1e300}};
    EXPECT_TRUE(eval_text("x0*x0*x0", r).pathological);
}

TEST(Interval, ExactOperationsStayTight) {
    const std::vector<Interval> r{{-2.0, 3.0}, {1.0, 4.0}};
    EXPECT_EQ(eval_text("x0 + x1", r), (Interval{-1.0, 7.0, false}));
    EXPECT_EQ(eval_text("x0*x1", r), (Interval{-8.0, 12.0, false}));
    EXPECT_EQ(eval_text("x0^2", r), (Interval{0.0, 9.0, false}));
    EXPECT_EQ(eval_text("-(x0)", r), (Interval{-3.0, 2.0, false}));
    EXPECT_EQ(eval_text("x0 - x1", r), (Interval{-6.0, 2.0, false}));
}

TEST(Interval, InexactOperationsRoundOutward) {
    const std::vector<Interval> r{{1.0, 1.0}, {3.0, 3.0}};
    const auto q = eval_text("x0/x1", r);
    ASSERT_FALSE(q.pathological);
    EXPECT_LE(static_cast<long double>(q.lo), 1.0L / 3.0L);
    EXPECT_GE(static_cast<long double>(q.hi), 1.0L / 3.0L);
}

TEST(Interval, MissingRangeIsAnInputError) {
    const std::vector<Interval> r{{0.0, 1.0}};
    EXPECT_THROW(eval_text("x0 + x3", r), InputError);
}

TEST(Interval, EnclosesPointEvaluationsOnRandomTrees) {
    Rng rng(2024);
    TreeGenConfig cfg;
    cfg.num_variables = 3;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t checked = 0;
    for (int i = 0; i < 400; ++i) {
        const Tree t = random_individual(cfg, rng, 2 + static_cast<std::size_t>(i % 5));
        std::vector<Interval> ranges;
        for (int v = 0; v < 3; ++v) {
            const double a = -10 + 20 * u(rng), b = -10 + 20 * u(rng);
            ranges.push_back({std::min(a, b), std::max(a, b), false});
        }
        const Interval out = interval_eval(t, ranges);
        if (out.pathological) continue;
        ++checked;
        for (int k = 0; k < 1000; ++k) {
            std::vector<double> row(3);
            for (int v = 0; v < 3; ++v) {
                // Endpoints first, then interior points clamped into the box.
                if (k < 2) {
                    row[v] = k == 0 ? ranges[v].lo : ranges[v].hi;
                } else {
                    const double w = u(rng);
                    row[v] = std::clamp(ranges[v].lo + w * (ranges[v].hi - ranges[v].lo), ranges[v].lo, ranges[v].hi);
                }
            }
            const double y = evaluate(t, row);
            ASSERT_TRUE(std::isfinite(y)) << format(t);
            ASSERT_LE(out.lo, y) << format(t);
            ASSERT_GE(out.hi, y) << format(t);
        }
    }
    EXPECT_GT(checked, 50u);
}
