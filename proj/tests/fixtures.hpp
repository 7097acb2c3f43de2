#ifndef BIHARM_TEST_FIXTURES_HPP
#define BIHARM_TEST_FIXTURES_HPP

#include <string>

#include "biharm/submanifold.hpp"

namespace biharm::fixtures {

inline std::shared_ptr<AmbientSpace> space(const std::string& kind, int n, double c = 0, bool has_c = false) {
    AmbientSpec s;
    s.kind = kind;
    s.n = n;
    s.c = c;
    s.has_c = has_c;
    return make_space(s);
}

inline Immersion generic_surface_cp2() {
    return make_immersion(space("fubini_study", 2, 4.0), {"u", "v"},
                          {"0.1 + 0.3*u + 0.1*v^2", "0.2*v - 0.2*u*v", "0.05 + 0.2*sin(u + 2*v)", "0.1*u - 0.3*v + 0.1*u^2"},
                          "2 + 0.3*u - 0.2*v^2");
}

inline Immersion generic_hypersurface_ch2() {
    return make_immersion(space("complex_hyperbolic", 2, -2.0), {"u", "v", "w"},
                          {"0.1*u + 0.05*v*w", "0.1*v", "0.12*w - 0.03*u^2", "0.05 + 0.04*u*v + 0.02*w^2"},
                          "1.2 + 0.1*u*w + 0.05*v^2");
}

inline Immersion generic_curve_cp2() {
    return make_immersion(space("fubini_study", 2, 1.0), {"t"},
                          {"0.2*cos(t)", "0.3*sin(t)", "0.1*t", "0.05*t^2"}, "1 + 0.2*t^2");
}

inline Immersion generic_3fold_s5() {
    return make_immersion(space("sasakian_sphere", 2, 2.0, true), {"u", "v", "w"},
                          {"0.1 + 0.3*u", "0.2*v + 0.1*u*w", "-0.1 + 0.25*w", "0.05*u^2 + 0.2*v", "0.15*sin(u+w)"},
                          "1.5 + 0.2*u*v - 0.1*w");
}

inline Immersion generic_surface_kenmotsu() {
    return make_immersion(space("kenmotsu_hyperbolic", 1), {"u", "v"}, {"u + 0.1*v^2", "v", "0.2*u*v + 0.1*u"},
                          "exp(0.2*u) + v^2");
}

inline Immersion generic_curve_cosymplectic() {
    return make_immersion(space("cosymplectic_flat", 2), {"t"},
                          {"cos(t)", "sin(2*t)", "0.3*t", "t^2/5", "0.5*sin(t)"}, "2 + sin(t)");
}

inline Immersion sphere_r3(double r) {
    std::string R = std::to_string(r);
    return make_immersion(space("cosymplectic_flat", 1), {"u", "v"},
                          {R + "*sin(u)*cos(v)", R + "*sin(u)*sin(v)", R + "*cos(u)"});
}

// stereographic image of (cos u, sin u, cos v, sin v)/sqrt(2)
inline Immersion clifford_torus() {
    return make_immersion(space("sasakian_sphere", 1), {"u", "v"},
                          {"cos(u)/(sqrt(2) + sin(v))", "sin(u)/(sqrt(2) + sin(v))", "cos(v)/(sqrt(2) + sin(v))"});
}

}  // namespace biharm::fixtures

#endif
