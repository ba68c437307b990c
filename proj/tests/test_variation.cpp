#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "paretogp/text.hpp"
#include "paretogp/variation.hpp"

using namespace pgp;

namespace {

TreeGenConfig config(std::size_t vars, std::size_t cap = 1000) {
    TreeGenConfig c;
    c.num_variables = vars;
    c.max_complexity = cap;
    return c;
}

void expect_individual(const Tree& t, std::size_t cap) {
    ASSERT_TRUE(is_valid(t)) << format(t);
    ASSERT_EQ(t.root().op, Op::Plus) << format(t);
    ASSERT_LE(complexity(t), cap) << format(t);
}

}  // namespace

TEST(RandomTree, IndividualsHaveTemplateRootAndRespectLimits) {
    Rng rng(1);
    const auto cfg = config(4);
    for (int i = 0; i < 500; ++i) {
        const std::size_t d = 2 + static_cast<std::size_t>(i % 6);
        const Tree t = random_individual(cfg, rng, d);
        expect_individual(t, cfg.max_complexity);
        EXPECT_LE(depth(t), d);
        EXPECT_LE(t.root().arity, cfg.max_root_arity);
        EXPECT_LE(max_variable_index(t), 4u);
    }
}

TEST(RandomTree, ExactDepth) {
    Rng rng(2);
    const auto cfg = config(2);
    for (std::size_t d = 1; d <= 6; ++d)
        for (int i = 0; i < 50; ++i) EXPECT_EQ(depth(random_tree_exact_depth(cfg, rng, d)), d);
}

TEST(RandomTree, ConstantsAreIntegersOrFourDecimalReals) {
    Rng rng(3);
    const auto cfg = config(1);
    for (int i = 0; i < 200; ++i) {
        for (const auto& n : random_individual(cfg, rng, 5).nodes()) {
            if (n.op != Op::Constant) continue;
            EXPECT_LE(std::abs(n.value), cfg.constant_range);
            EXPECT_NEAR(n.value * 1e4, std::round(n.value * 1e4), 1e-6);
        }
    }
}

TEST(RandomTree, SmallComplexityCapIsHonoured) {
    Rng rng(4);
    const auto cfg = config(3, 25);
    for (int i = 0; i < 300; ++i) expect_individual(random_individual(cfg, rng, 6), 25);
}

TEST(RandomTree, SameSeedSameTree) {
    const auto cfg = config(3);
    Rng a(77), b(77);
    for (int i = 0; i < 20; ++i) EXPECT_EQ(random_individual(cfg, a, 5), random_individual(cfg, b, 5));
}

TEST(Variation, OperatorsPreserveInvariants) {
    Rng rng(5);
    const auto cfg = config(3, 120);
    std::vector<Tree> pool;
    for (int i = 0; i < 60; ++i) pool.push_back(random_individual(cfg, rng, 2 + static_cast<std::size_t>(i % 5)));
    for (int i = 0; i < 2000; ++i) {
        const Tree& a = pool[static_cast<std::size_t>(i) % pool.size()];
        const Tree& b = pool[static_cast<std::size_t>(i * 7 + 3) % pool.size()];
        const Tree x = crossover(a, b, rng, cfg);
        const Tree s = subtree_mutation(a, rng, cfg);
        const Tree d = depth_preserving_mutation(a, rng, cfg);
        for (const Tree* c : {&x, &s, &d}) {
            expect_individual(*c, cfg.max_complexity);
            EXPECT_EQ(c->root().arity, a.root().arity);
        }
        EXPECT_EQ(depth(d), depth(a)) << format(a) << " -> " << format(d);
    }
}

TEST(Variation, CrossoverDrawsMaterialFromBothParents) {
    Rng rng(6);
    const auto cfg = config(2);
    const Tree a = parse("x0*x0 + x0*x0");
    const Tree b = parse("x1*x1 + x1*x1");
    bool mixed = false;
    for (int i = 0; i < 50 && !mixed; ++i) {
        const auto used = variables_used(crossover(a, b, rng, cfg));
        mixed = used.count(1) > 0;
    }
    EXPECT_TRUE(mixed);
}

TEST(Variation, FallsBackToParentWhenNoChildFitsTheCap) {
    Rng rng(7);
    auto cfg = config(1, 9);
    const Tree small = parse("+(x0 + 1)");
    const Tree big = parse("x0*x0*x0*x0 + x0*x0*x0*x0");
    ASSERT_GT(complexity(small.replace_subtree(1, big.subtree(1))), cfg.max_complexity);
    const Tree child = crossover(small, parse("+((x0*x0*x0*x0)*(x0*x0*x0*x0))"), rng, cfg);
    EXPECT_LE(complexity(child), cfg.max_complexity);
}
