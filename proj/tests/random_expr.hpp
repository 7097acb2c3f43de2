#ifndef BIHARM_TEST_RANDOM_EXPR_HPP
#define BIHARM_TEST_RANDOM_EXPR_HPP

// Random well-defined expression strings for property tests.

#include <random>
#include <string>
#include <vector>

namespace biharm::testutil {

inline std::string random_expr(std::mt19937_64& rng, const std::vector<std::string>& vars, int depth) {
    std::uniform_int_distribution<int> pick(0, 9);
    std::uniform_real_distribution<double> lit(0.1, 2.0);
    auto leaf = [&]() -> std::string {
        if (vars.empty() || pick(rng) < 3) return std::to_string(lit(rng)).substr(0, 5);
        return vars[std::uniform_int_distribution<size_t>(0, vars.size() - 1)(rng)];
    };
    if (depth <= 0) return leaf();
    auto sub = [&]() { return random_expr(rng, vars, depth - 1); };
    switch (pick(rng)) {
        case 0: return "(" + sub() + " + " + sub() + ")";
        case 1: return "(" + sub() + " - " + sub() + ")";
        case 2: return "(" + sub() + " * " + sub() + ")";
        case 3: return "(" + sub() + " / (2 + sin(" + sub() + ")))";
        case 4: return "sin(" + sub() + ")";
        case 5: return "cos(" + sub() + ")";
        case 6: return "exp(0.3*" + sub() + ")";
        case 7: return "sqrt(1 + " + sub() + "^2)";
        case 8: return "atan(" + sub() + ")";
        default: return "log(3 + cos(" + sub() + "))";
    }
}

}  // namespace biharm::testutil

#endif
