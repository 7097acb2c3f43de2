#include <gtest/gtest.h>

#include <random>

#include "biharm/expression.hpp"
#include "random_expr.hpp"

using namespace biharm;

TEST(Expression, ParsesSpecExamples) {
    auto e = parse("cos(u)*sin(v)", {"u", "v"});
    ASSERT_EQ(e.root()->kind, NodeKind::mul);
    EXPECT_EQ(e.root()->a->kind, NodeKind::call);
    EXPECT_EQ(e.root()->a->fn, JetOp::cos);
    EXPECT_EQ(e.root()->a->a->var, 0);
    EXPECT_EQ(e.root()->b->fn, JetOp::sin);
    auto d = parse("1/sqrt(2)", {});
    EXPECT_EQ(d.root()->kind, NodeKind::div);
    EXPECT_EQ(d.root()->b->fn, JetOp::sqrt);
    EXPECT_NEAR(eval(d, {}), 1 / std::sqrt(2.0), 1e-16);
}

TEST(Expression, UnbalancedParenthesisOffset) {
    try {
        parse("exp(a*u", {"u"});
        FAIL();
    } catch (const ParseError& err) {
        EXPECT_EQ(err.kind, ParseError::Kind::syntax);
        EXPECT_EQ(err.offset, 8u);
    }
}

TEST(Expression, Errors) {
    EXPECT_THROW(parse("", {}), ParseError);
    try {
        parse("a*u", {"u"});
        FAIL();
    } catch (const ParseError& err) {
        EXPECT_EQ(err.kind, ParseError::Kind::unknown_identifier);
        EXPECT_EQ(err.offset, 1u);
    }
    try {
        parse("sin(u, u)", {"u"});
        FAIL();
    } catch (const ParseError& err) {
        EXPECT_EQ(err.kind, ParseError::Kind::arity);
    }
    EXPECT_THROW(parse("sin", {}), ParseError);
    EXPECT_THROW(parse("u^v", {"u", "v"}), ParseError);
    EXPECT_THROW(parse("2 u", {"u"}), ParseError);
    EXPECT_THROW(parse("foo(u)", {"u"}), ParseError);
}

TEST(Expression, Precedence) {
    EXPECT_NEAR(eval(parse("-2^2", {}), {}), -4, 0);
    EXPECT_NEAR(eval(parse("2^3^2", {}), {}), 64, 0);
    EXPECT_NEAR(eval(parse("8/4/2", {}), {}), 1, 0);
    EXPECT_NEAR(eval(parse("1-2-3", {}), {}), -4, 0);
    EXPECT_NEAR(eval(parse("2*3+4*5", {}), {}), 26, 0);
    EXPECT_NEAR(eval(parse("u^(-1)", {"u"}), {4.0}), 0.25, 0);
    EXPECT_NEAR(eval(parse("u^-2", {"u"}), {2.0}), 0.25, 0);
    EXPECT_NEAR(eval(parse("2*pi", {}), {}), 2 * std::numbers::pi, 0);
    EXPECT_NEAR(eval(parse("log(e)", {}), {}), 1, 1e-16);
    EXPECT_NEAR(eval(parse("1.5e-1*2", {}), {}), 0.3, 1e-16);
}

TEST(Expression, EvalOnJets) {
    auto e = parse("u+v", {"u", "v"});
    Jet u = seed_variable(0, 1, 2, 2), v = seed_variable(1, 2, 2, 2);
    Jet r = eval_on_jets(e, {u, v}, u);
    EXPECT_EQ(r.value(), 3);
    EXPECT_EQ(r.d(0), 1);
    EXPECT_EQ(r.d(1), 1);
    Jet x = seed_variable(0, 3, 1, 2);
    EXPECT_EQ(eval_on_jets(parse("u^2", {"u"}), {x}, x).coeffs(), (std::vector<double>{9, 6, 1}));
    auto s = parse("sin(u)*exp(v)", {"u", "v"});
    Jet a = seed_variable(0, 0.4, 2, 2), b = seed_variable(1, 0.1, 2, 2);
    Jet j = eval_on_jets(s, {{"u", a}, {"v", b}}, a);
    double h = 1e-5;
    auto f = [](double x, double y) { return std::sin(x) * std::exp(y); };
    EXPECT_NEAR(j.partial({1, 0}), (f(0.4 + h, 0.1) - f(0.4 - h, 0.1)) / (2 * h), 1e-6);
    EXPECT_NEAR(j.partial({0, 1}), (f(0.4, 0.1 + h) - f(0.4, 0.1 - h)) / (2 * h), 1e-6);
    EXPECT_THROW(eval_on_jets(s, {{"u", a}}, a), std::invalid_argument);
}

TEST(Expression, RoundTrip) {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 500; ++i) {
        std::string src = testutil::random_expr(rng, {"u", "v"}, 4);
        auto e = parse(src, {"u", "v"});
        auto again = parse(print(e), {"u", "v"});
        EXPECT_TRUE(structurally_equal(e, again)) << src << " -> " << print(e);
    }
    auto p = parse("-u^(-1.5) + pi*e", {"u"});
    EXPECT_TRUE(structurally_equal(p, parse(print(p), {"u"})));
}

TEST(Expression, ReferentialTransparency) {
    auto e = parse("atan(u*v) + log(2 + sin(u))", {"u", "v"});
    Jet u = seed_variable(0, 0.3, 2, 4), v = seed_variable(1, 0.8, 2, 4);
    Jet a = eval_on_jets(e, {u, v}, u), b = eval_on_jets(e, {u, v}, u);
    EXPECT_EQ(a.coeffs(), b.coeffs());
}

TEST(Expression, FuzzNeverCrashes) {
    std::mt19937_64 rng(7);
    const std::vector<std::string> pieces = {"u", "v", "pi", "e", "1", "2.5", "1e3", "+", "-", "*", "/",
                                             "^", "(", ")", ",", "sin", "cos", "exp", "log", "sqrt",
                                             "atan", "tan", " ", "x", "@", ".", "1e", "..", "-3"};
    int trees = 0, errors = 0;
    for (int i = 0; i < 10000; ++i) {
        std::string s;
        int n = std::uniform_int_distribution<int>(0, 12)(rng);
        for (int k = 0; k < n; ++k) s += pieces[std::uniform_int_distribution<size_t>(0, pieces.size() - 1)(rng)];
        try {
            auto e = parse(s, {"u", "v"});
            ++trees;
            try {
                eval(e, {0.3, 0.7});
            } catch (const std::exception&) {
            }
        } catch (const ParseError& err) {
            ++errors;
            EXPECT_GE(err.offset, 1u);
            EXPECT_LE(err.offset, s.size() + 1);
        }
    }
    EXPECT_EQ(trees + errors, 10000);
}
