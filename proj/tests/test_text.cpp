#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "paretogp/text.hpp"
#include "paretogp/variation.hpp"

using namespace pgp;

TEST(Format, AffineWeatherModel) {
    const Tree t = Tree::make(Op::Plus, {Tree::constant(-25.2334),
                                         Tree::make(Op::Times, {Tree::constant(3.21666), Tree::variable(13)})});
    EXPECT_EQ(format(t, oracle::kWeatherVariables), oracle::kAffineModel);
    EXPECT_EQ(format(t), "-25.2334 + 3.21666*x13");
}

TEST(Format, PrecedenceAndGrouping) {
    const auto x0 = Tree::variable(0), x1 = Tree::variable(1);
    EXPECT_EQ(format(Tree::make(Op::Subtract, {x0, Tree::make(Op::Subtract, {x1, x0})})), "x0 - (x1 - x0)");
    EXPECT_EQ(format(Tree::make(Op::Times, {Tree::make(Op::Plus, {x0, x1}), x1})), "(x0 + x1)*x1");
    EXPECT_EQ(format(Tree::make(Op::Square, {Tree::make(Op::Plus, {x0, x1})})), "(x0 + x1)^2");
    EXPECT_EQ(format(Tree::make(Op::Square, {Tree::constant(-2)})), "(-2)^2");
    EXPECT_EQ(format(Tree::make(Op::Divide, {x0, Tree::make(Op::Times, {x0, x1})})), "x0/(x0*x1)");
    EXPECT_EQ(format(Tree::make(Op::Minus, {x0})), "-(x0)");
    EXPECT_EQ(format(Tree::make(Op::Inverse, {x0})), "inv(x0)");
    EXPECT_EQ(format(Tree::make(Op::Plus, {x0})), "+(x0)");
}

TEST(Parse, AffineWeatherModel) {
    const Tree t = parse(oracle::kAffineModel, oracle::kWeatherVariables);
    EXPECT_EQ(t, Tree::make(Op::Plus, {Tree::constant(-25.2334),
                                       Tree::make(Op::Times, {Tree::constant(3.21666), Tree::variable(13)})}));
}

TEST(Parse, NegativeLiteralVersusSubtraction) {
    EXPECT_EQ(parse("x0 - 3"), Tree::make(Op::Subtract, {Tree::variable(0), Tree::constant(3)}));
    EXPECT_EQ(parse("x0 + -3"), Tree::make(Op::Plus, {Tree::variable(0), Tree::constant(-3)}));
    EXPECT_EQ(parse("-3^2"), Tree::make(Op::Minus, {Tree::make(Op::Square, {Tree::constant(3)})}));
    EXPECT_EQ(parse("-x0"), Tree::make(Op::Minus, {Tree::variable(0)}));
}

TEST(Parse, LongChainsAreChunked) {
    const Tree t = parse("x0 + x1 + x2 + x3 + x4 + x5 + x6");
    EXPECT_TRUE(is_valid(t));
    EXPECT_EQ(t.root().op, Op::Plus);
    for (const auto& n : t.nodes())
        if (n.op == Op::Plus) EXPECT_LE(n.arity, kMaxVariadicArity);
    EXPECT_DOUBLE_EQ(evaluate(t, std::vector<double>{1, 2, 3, 4, 5, 6, 7}), 28.0);
}

TEST(Parse, ErrorsCarryPosition) {
    try {
        parse("x0 + foo");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.position(), 5u);
    }
    EXPECT_THROW(parse("x0^3"), ParseError);
    EXPECT_THROW(parse("(x0 + x1"), ParseError);
    EXPECT_THROW(parse("x0 x1"), ParseError);
    EXPECT_THROW(parse(""), ParseError);
    EXPECT_THROW(parse("windGust2", std::vector<std::string>{"dewPoint"}), InputError);
}

TEST(Parse, ScientificNotation) {
    EXPECT_EQ(parse("1.5e-4*x0"), Tree::make(Op::Times, {Tree::constant(1.5e-4), Tree::variable(0)}));
}

TEST(RoundTrip, RandomTreesSurviveFormatParse) {
    Rng rng(99);
    TreeGenConfig cfg;
    cfg.num_variables = 5;
    const std::vector<std::string> names{"a", "b2", "windGust2", "dewPoint", "z_9"};
    for (int i = 0; i < 1000; ++i) {
        const Tree t = random_individual(cfg, rng, 2 + static_cast<std::size_t>(i % 7));
        const auto text = format(t);
        ASSERT_EQ(parse(text), t) << text;
        ASSERT_EQ(parse(format(t, names), names), t) << format(t, names);
    }
}

TEST(RoundTrip, EnsembleFixturesAreStableUnderReformatting) {
    for (const auto& f : oracle::ensemble_fixtures()) {
        const Tree t = parse(f.text, oracle::kWeatherVariables);
        EXPECT_TRUE(is_valid(t)) << f.text;
        EXPECT_EQ(parse(format(t, oracle::kWeatherVariables), oracle::kWeatherVariables), t) << f.text;
    }
}

TEST(FormatNumber, ShortestRoundTrip) {
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(-25.2334), "-25.2334");
    EXPECT_EQ(format_number(3.0), "3");
    const double v = 0.1 + 0.2;
    EXPECT_EQ(std::stod(format_number(v)), v);
}
