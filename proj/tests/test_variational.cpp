#include <gtest/gtest.h>

#include <numbers>

#include "biharm/variational.hpp"
#include "fixtures.hpp"

using namespace biharm;
using namespace biharm::fixtures;

namespace {
const double TWO_PI = 2 * std::numbers::pi;

QuadratureGrid periodic(int m, int n) {
    std::vector<Axis> ax(m, Axis{0, TWO_PI, true, n});
    return make_grid(ax);
}
}  // namespace

TEST(Variational, UnitCircleEnergies) {
    auto imm = make_immersion(space("euclidean_complex", 1), {"t"}, {"cos(t)", "sin(t)"});
    auto G = periodic(1, 32);
    EXPECT_NEAR(energy(imm, G, Functional::E), std::numbers::pi, 1e-12);
    EXPECT_NEAR(energy(imm, G, Functional::E2), std::numbers::pi, 1e-12);
    auto imm2 = make_immersion(space("euclidean_complex", 1), {"t"}, {"cos(t)", "sin(t)"}, "2");
    EXPECT_NEAR(energy(imm2, G, Functional::Ef), 2 * energy(imm, G, Functional::E), 1e-12);
}

TEST(Variational, GaussLegendreIntegratesPolynomials) {
    auto G = make_grid({Axis{0, 2, false, 5}, Axis{-1, 1, false, 4}});
    double s = integrate(G, [](const Vec& p) { return std::pow(p[0], 7) * p[1] * p[1]; });
    EXPECT_NEAR(s, 256.0 / 8 * 2.0 / 3, 1e-11);
}

TEST(Variational, ZeroVariation) {
    auto imm = make_immersion(space("euclidean_complex", 1), {"t"}, {"cos(t)", "sin(t)"});
    auto V = parse_variation(imm, {"0", "0"});
    auto vc = first_variation_check(imm, periodic(1, 16), Functional::E2, V);
    EXPECT_EQ(vc.rhs, 0);
    EXPECT_EQ(vc.steps[0].lhs, 0);
}

// radial variation of the unit circle: dE/dt = 2 pi, tau = -x
TEST(Variational, CircleRadialSignCoherence) {
    auto imm = make_immersion(space("euclidean_complex", 1), {"t"}, {"cos(t)", "sin(t)"});
    auto V = parse_variation(imm, {"cos(t)", "sin(t)"});
    auto vc = first_variation_check(imm, periodic(1, 32), Functional::E, V);
    EXPECT_NEAR(vc.rhs, TWO_PI, 1e-10);
    EXPECT_LT(vc.plateau, 1e-6);
}

struct VCase {
    const char* name;
    Immersion imm;
    std::vector<std::string> V;
    int nodes;
};

std::vector<VCase> suite() {
    return {
        {"curve in C^2 (flat)",
         make_immersion(space("euclidean_complex", 2), {"u"}, {"cos(u)", "sin(u)", "0.3*cos(2*u)", "0.2*sin(3*u)"},
                        "1 + 0.1*sin(u)"),
         {"0.2*sin(u) + 0.1*cos(2*u)", "0.1*cos(u + 0.3)", "0.05*sin(2*u + 1)", "0.1*cos(3*u)"}, 160},
        {"curve in S^3",
         make_immersion(space("sasakian_sphere", 1), {"u"}, {"0.4*cos(u)", "0.4*sin(u)", "0.2*sin(2*u)"},
                        "1 + 0.3*cos(u)"),
         {"0.1*sin(2*u) + 0.05*cos(u)", "0.05*cos(u + 0.4)", "0.1*cos(3*u) + 0.03*sin(u)"}, 96},
        {"torus in C^2 (flat)",
         make_immersion(space("euclidean_complex", 2), {"u", "v"}, {"cos(u)", "sin(u)", "0.7*cos(v)", "0.7*sin(v)"},
                        "1.5 + 0.2*cos(u) + 0.1*sin(v)"),
         {"0.1*cos(u)*sin(v) + 0.05*cos(u)", "0.05*sin(u+v) + 0.03*cos(2*v)", "0.1*cos(2*v) + 0.04*sin(u)",
          "0.05*sin(u)*cos(v + 0.2)"},
         24},
        {"torus in S^3",
         make_immersion(space("sasakian_sphere", 1), {"u", "v"},
                        {"cos(u)/(sqrt(2) + sin(v))", "sin(u)/(sqrt(2) + sin(v))", "cos(v)/(sqrt(2) + sin(v))"},
                        "exp(0.2*sin(u))"),
         {"0.05*sin(v) + 0.03*cos(u)", "0.05*cos(u+v)", "0.04*sin(2*u) + 0.02*cos(v)"}, 32},
        {"curve in CP^2",
         make_immersion(space("fubini_study", 2, 4.0), {"u"}, {"0.3*cos(u)", "0.3*sin(u)", "0.1*cos(2*u)", "0.1"},
                        "2 + 0.5*sin(u)"),
         {"0.05*sin(u)", "0.03*cos(3*u)", "0.02", "0.04*cos(u)"}, 64},
        {"torus in Kenmotsu H^3",
         make_immersion(space("kenmotsu_hyperbolic", 1), {"u", "v"},
                        {"(0.6 + 0.2*cos(v))*cos(u)", "(0.6 + 0.2*cos(v))*sin(u)", "0.2*sin(v)"},
                        "1 + 0.1*cos(u)*sin(v)"),
         {"0.05*sin(u)*cos(v) + 0.02", "0.04*cos(u)", "0.05*sin(v) + 0.03*cos(u)"}, 32},
    };
}

class VariationSuite : public ::testing::TestWithParam<int> {};

TEST_P(VariationSuite, AllFunctionals) {
    auto c = suite()[GetParam()];
    auto G = periodic(c.imm.m(), c.nodes);
    auto V = parse_variation(c.imm, c.V);
    for (const auto& [w, name] : functional_names()) {
        auto vc = first_variation_check(c.imm, G, w, V);
        EXPECT_TRUE(vc.pass) << c.name << " " << name << " plateau " << vc.plateau << " order " << vc.observed_order;
        std::printf("%-24s %-4s rhs % .6e  deltas %.1e %.1e %.1e order %.2f\n", c.name, name, vc.rhs, vc.steps[0].delta,
                    vc.steps[1].delta, vc.steps[2].delta, vc.observed_order);
    }
}

INSTANTIATE_TEST_SUITE_P(Suite, VariationSuite, ::testing::Range(0, 6));

TEST(Variational, QuadratureConvergence) {
    for (int i : {1, 3}) {
        auto c = suite()[i];
        auto G = periodic(c.imm.m(), c.nodes);
        auto G2 = refined(G, 2);
        for (const auto& [w, name] : functional_names())
            EXPECT_LE(std::abs(energy(c.imm, G, w) - energy(c.imm, G2, w)), 1e-9) << c.name << " " << name;
    }
}
