#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "biharm/expression.hpp"
#include "biharm/jet.hpp"
#include "random_expr.hpp"

using namespace biharm;

TEST(Jet, SeedVariable) {
    Jet x = seed_variable(0, 2.0, 2, 2);
    EXPECT_EQ(x.coeff({0, 0}), 2.0);
    EXPECT_EQ(x.coeff({1, 0}), 1.0);
    EXPECT_EQ(x.coeff({0, 1}), 0.0);
    EXPECT_EQ(x.coeff({2, 0}), 0.0);
    EXPECT_EQ(x.coeff({1, 1}), 0.0);
    Jet y = seed_variable(1, 0.0, 2, 1);
    EXPECT_EQ(y.coeff({0, 0}), 0.0);
    EXPECT_EQ(y.coeff({0, 1}), 1.0);
    EXPECT_THROW(seed_variable(2, 0.0, 2, 1), JetError);
}

TEST(Jet, Square) {
    Jet x = seed_variable(0, 3, 1, 3);
    Jet s = x * x;
    EXPECT_EQ(s.coeffs(), (std::vector<double>{9, 6, 1, 0}));
}

TEST(Jet, ElementaryTaylorSeries) {
    Jet s = sin(seed_variable(0, 0, 1, 3));
    EXPECT_NEAR(s.coeff({0}), 0, 1e-16);
    EXPECT_NEAR(s.coeff({1}), 1, 1e-16);
    EXPECT_NEAR(s.coeff({2}), 0, 1e-16);
    EXPECT_NEAR(s.coeff({3}), -1.0 / 6, 1e-16);
    Jet e = exp(seed_variable(0, 0, 1, 3));
    EXPECT_NEAR(e.coeff({2}), 0.5, 1e-16);
    EXPECT_NEAR(e.coeff({3}), 1.0 / 6, 1e-16);
}

TEST(Jet, ExtractPartial) {
    Jet x = seed_variable(0, 1, 2, 2), y = seed_variable(1, 1, 2, 2);
    EXPECT_EQ(extract_partial(x * y, {1, 1}), 1.0);
    Jet u = seed_variable(0, 0.4, 1, 2);
    EXPECT_EQ(extract_partial(u * u, {2}), 2.0);
    EXPECT_THROW(extract_partial(u * u, {3}), JetError);
}

TEST(Jet, DomainAndMismatchErrors) {
    Jet z(1, 2, 0.0);
    EXPECT_THROW(reciprocal(z), JetError);
    EXPECT_THROW(log(z), JetError);
    EXPECT_THROW(log(z - 1.0), JetError);
    EXPECT_THROW(sqrt(z), JetError);
    Jet a(1, 2, 1.0), b(1, 3, 1.0), c(2, 2, 1.0);
    EXPECT_THROW(a + b, JetError);
    EXPECT_THROW(a * c, JetError);
}

namespace {

double fd4(const std::function<double(double)>& f, double x, double h) {
    return (f(x + 2 * h) - 4 * f(x + h) + 6 * f(x) - 4 * f(x - h) + f(x - 2 * h)) / std::pow(h, 4);
}

}  // namespace

TEST(Jet, FourthDerivativeAgainstFiniteDifferences) {
    auto f = [](double x) { return std::sin(x * x); };
    Jet x = seed_variable(0, 0.7, 1, 4);
    double d4 = extract_partial(sin(x * x), {4});
    // Richardson over a step sweep
    double best = 1e300;
    for (double h : {0.08, 0.04, 0.02}) {
        double r = (4 * fd4(f, 0.7, h / 2) - fd4(f, 0.7, h)) / 3;
        best = std::min(best, std::abs(r - d4));
    }
    EXPECT_LE(best, 1e-5);
}

TEST(Jet, MixedPartialAgainstFiniteDifferences) {
    auto f = [](double x, double y) { return std::sin(x) * std::cos(y); };
    Jet x = seed_variable(0, 0.3, 2, 4), y = seed_variable(1, 0.5, 2, 4);
    double v = extract_partial(sin(x) * cos(y), {2, 1});
    double h = 1e-3;
    auto fxx = [&](double yy) { return (f(0.3 + h, yy) - 2 * f(0.3, yy) + f(0.3 - h, yy)) / (h * h); };
    double fd = (fxx(0.5 + h) - fxx(0.5 - h)) / (2 * h);
    EXPECT_NEAR(v, fd, 1e-6);
}

TEST(Jet, PolynomialsAreExact) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int trial = 0; trial < 20; ++trial) {
        // p(x,y,z) = sum c_g x^g over |g| <= 4, expanded at a base point
        const auto& L = *JetLayout::get(3, 4);
        std::vector<double> c(L.size());
        for (auto& v : c) v = U(rng);
        std::vector<double> x0 = {U(rng), U(rng), U(rng)};
        std::vector<Jet> X = {seed_variable(0, x0[0], 3, 4), seed_variable(1, x0[1], 3, 4),
                              seed_variable(2, x0[2], 3, 4)};
        Jet p(3, 4, 0.0);
        for (int i = 0; i < L.size(); ++i) {
            Jet m(3, 4, c[i]);
            for (int v = 0; v < 3; ++v) m = m * pow(X[v], L.index[i][v]);
            p += m;
        }
        // analytic partial: d^g p = sum_h c_h * prod_v h_v!/(h_v-g_v)! x0^(h_v-g_v)
        for (int g = 0; g < L.size(); ++g) {
            double expect = 0;
            for (int h = 0; h < L.size(); ++h) {
                double term = c[h];
                for (int v = 0; v < 3 && term != 0; ++v) {
                    int hv = L.index[h][v], gv = L.index[g][v];
                    if (hv < gv) {
                        term = 0;
                        break;
                    }
                    for (int t = 0; t < gv; ++t) term *= (hv - t);
                    term *= std::pow(x0[v], hv - gv);
                }
                expect += term;
            }
            EXPECT_NEAR(p.partial(L.index[g]), expect, 1e-13 * std::max(1.0, std::abs(expect)));
        }
    }
}

TEST(Jet, LeibnizRule) {
    std::mt19937_64 rng(5);
    auto e1 = parse("sin(u)*exp(v) + u^3", {"u", "v"});
    auto e2 = parse("atan(u - v) / (2 + cos(u))", {"u", "v"});
    Jet u = seed_variable(0, 0.37, 2, 4), v = seed_variable(1, -0.21, 2, 4);
    Jet a = eval_on_jets(e1, {u, v}, u), b = eval_on_jets(e2, {u, v}, u);
    Jet ab = a * b;
    const auto& L = ab.layout();
    for (int g = 0; g < L.size(); ++g) {
        double s = 0;
        for (int h = 0; h < L.size(); ++h) {
            bool ok = true;
            double binom = 1;
            for (int k = 0; k < 2; ++k) {
                int gk = L.index[g][k], hk = L.index[h][k];
                if (hk > gk) ok = false;
                else
                    for (int t = 0; t < hk; ++t) binom *= double(gk - t) / (t + 1);
            }
            if (!ok) continue;
            std::vector<int> rest = {L.index[g][0] - L.index[h][0], L.index[g][1] - L.index[h][1]};
            s += binom * a.partial(L.index[h]) * b.partial(rest);
        }
        EXPECT_NEAR(ab.partial(L.index[g]), s, 1e-12 * std::max(1.0, std::abs(s)));
    }
}

TEST(Jet, ChainConsistency) {
    // f(g(u,v)) by jet composition vs the fused expression, 20 random trees
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        std::string fs = testutil::random_expr(rng, {"x"}, 3);
        std::string gs = testutil::random_expr(rng, {"u", "v"}, 3);
        auto f = parse(fs, {"x"});
        auto g = parse(gs, {"u", "v"});
        auto fused = parse("(" + fs + ")", {"x"});
        Jet u = seed_variable(0, 0.3, 2, 4), v = seed_variable(1, 0.6, 2, 4);
        Jet gj = eval_on_jets(g, {u, v}, u);
        // outer jet of f at x0 = g(0.3, 0.6)
        Jet x = seed_variable(0, gj.value(), 1, 4);
        Jet fj = eval_on_jets(f, {x}, x);
        Jet composed = compose(fj, {gj});
        // fused: substitute g's jet straight into f
        Jet direct = eval_on_jets(fused, {gj}, gj);
        for (size_t i = 0; i < composed.coeffs().size(); ++i)
            EXPECT_NEAR(composed.coeffs()[i], direct.coeffs()[i],
                        1e-12 * std::max(1.0, std::abs(direct.coeffs()[i])))
                << fs << " o " << gs;
    }
}

TEST(Jet, DerivativeAndTruncate) {
    Jet u = seed_variable(0, 0.5, 2, 4), v = seed_variable(1, 0.2, 2, 4);
    Jet f = sin(u) * exp(v);
    Jet fu = f.derivative(0);
    EXPECT_EQ(fu.order(), 3);
    EXPECT_NEAR(fu.partial({1, 1}), f.partial({2, 1}), 1e-14);
    EXPECT_NEAR(fu.partial({0, 3}), f.partial({1, 3}), 1e-14);
    EXPECT_EQ(f.truncated(2).order(), 2);
    EXPECT_THROW(fu.truncated(4), JetError);
}

TEST(Jet, PowAndDivision) {
    Jet x = seed_variable(0, 1.7, 1, 4);
    Jet a = pow(x, 2.5), b = sqrt(x) * x * x;
    for (int k = 0; k <= 4; ++k) EXPECT_NEAR(a.coeff({k}), b.coeff({k}), 1e-13);
    Jet c = 1.0 / (x * x), d = pow(x, -2);
    for (int k = 0; k <= 4; ++k) EXPECT_NEAR(c.coeff({k}), d.coeff({k}), 1e-13);
    Jet t = tan(x), st = sin(x) / cos(x);
    for (int k = 0; k <= 4; ++k) EXPECT_NEAR(t.coeff({k}), st.coeff({k}), 1e-10 * std::abs(st.coeff({k})) + 1e-12);
    Jet at = atan(x - 1.0);
    auto f = [](double y) { return std::atan(y - 1.0); };
    EXPECT_NEAR(extract_partial(at, {4}), (4 * fd4(f, 1.7, 0.01) - fd4(f, 1.7, 0.02)) / 3, 1e-5);
    Jet neg = pow(x - 2.0, 3);
    EXPECT_NEAR(neg.value(), std::pow(-0.3, 3), 1e-15);
}

TEST(Jet, JetApplyCatalog) {
    Jet x = seed_variable(0, 0.4, 1, 3);
    EXPECT_NEAR(jet_apply(JetOp::pow, {x, Jet(1, 3, 3.0)}).value(), 0.064, 1e-15);
    EXPECT_THROW(jet_apply(JetOp::sin, {x, x}), JetError);
    EXPECT_NEAR(jet_apply(JetOp::exp, {x}).value(), std::exp(0.4), 1e-15);
}
