#include <gtest/gtest.h>

#include <cmath>

#include "biharm/submanifold.hpp"

using namespace biharm;

namespace {

std::shared_ptr<AmbientSpace> space(const std::string& kind, int n, double c = 0, bool has_c = false) {
    AmbientSpec s;
    s.kind = kind;
    s.n = n;
    s.c = c;
    s.has_c = has_c;
    return make_space(s);
}

double nrm(const Vec& v) { return v.norm(); }

// a few generic immersions used by the identity checks
Immersion generic_surface_cp2() {
    return make_immersion(space("fubini_study", 2, 4.0), {"u", "v"},
                          {"0.1 + 0.3*u + 0.1*v^2", "0.2*v - 0.2*u*v", "0.05 + 0.2*sin(u + 2*v)", "0.1*u - 0.3*v + 0.1*u^2"},
                          "2 + 0.3*u - 0.2*v^2");
}

Immersion generic_3fold_s5() {
    return make_immersion(space("sasakian_sphere", 2, 2.0, true), {"u", "v", "w"},
                          {"0.1 + 0.3*u", "0.2*v + 0.1*u*w", "-0.1 + 0.25*w", "0.05*u^2 + 0.2*v", "0.15*sin(u+w)"},
                          "1.5 + 0.2*u*v - 0.1*w");
}

Immersion generic_surface_kenmotsu() {
    return make_immersion(space("kenmotsu_hyperbolic", 1), {"u", "v"}, {"u + 0.1*v^2", "v", "0.2*u*v + 0.1*u"},
                          "exp(0.2*u) + v^2");
}

Immersion sphere_r3(double r) {
    std::string R = std::to_string(r);
    return make_immersion(space("cosymplectic_flat", 1), {"u", "v"},
                          {R + "*sin(u)*cos(v)", R + "*sin(u)*sin(v)", R + "*cos(u)"});
}

Immersion clifford_torus() {
    // stereographic image of (cos u, sin u, cos v, sin v)/sqrt(2)
    return make_immersion(space("sasakian_sphere", 1), {"u", "v"},
                          {"cos(u)/(sqrt(2) + sin(v))", "sin(u)/(sqrt(2) + sin(v))", "cos(v)/(sqrt(2) + sin(v))"});
}

}  // namespace

TEST(Submanifold, PlaneIsTotallyGeodesic) {
    auto imm = make_immersion(space("cosymplectic_flat", 1), {"u", "v"}, {"u + 2*v", "v - u", "0.5*u"});
    Vec p(2);
    p << 0.3, -0.7;
    auto fd = fundamental_data_at(imm, p);
    for (const auto& b : fd.B) EXPECT_LT(nrm(b), 1e-12);
    EXPECT_EQ(fd.q, 1);
}

TEST(Submanifold, RoundSphereInR3) {
    for (double r : {0.5, 1.0, 2.0}) {
        auto imm = sphere_r3(r);
        Vec p(2);
        p << 1.1, 0.4;
        PointGeometry pg(imm, p);
        auto fd = fundamental_data_at(imm, pg);
        auto t = trace_terms_at(pg, fd);
        EXPECT_NEAR(fd.norm(fd.H), 1 / r, 1e-10);
        EXPECT_NEAR(t.B2, 2 / (r * r), 1e-10);
        EXPECT_NEAR(t.scal, 2 / (r * r), 1e-9);
        EXPECT_LT(nrm(t.lap_perp_H), 1e-9);
        EXPECT_LT(nrm(t.grad_H2), 1e-9);
        // H points inward
        EXPECT_NEAR(fd.inner(fd.H, fd.x), -1.0, 1e-10);
    }
}

TEST(Submanifold, CliffordTorusIsMinimalAndFlat) {
    auto imm = clifford_torus();
    for (double u : {0.2, 1.3, 4.0})
        for (double v : {-0.5, 0.9, 2.5}) {
            Vec p(2);
            p << u, v;
            PointGeometry pg(imm, p);
            auto fd = fundamental_data_at(imm, pg);
            auto t = trace_terms_at(pg, fd);
            EXPECT_LT(fd.norm(fd.H), 1e-10);
            EXPECT_NEAR(t.scal, 0.0, 1e-8);
            EXPECT_NEAR(t.B2, 2.0, 1e-9);
            // the Hopf fibre direction is tangent
            EXPECT_LT(fd.norm(t.xiN), 1e-10);
        }
}

TEST(Submanifold, GaussEquationScalar) {
    // Scal = sum_{i != j} <Rbar(e_i, e_j) e_j, e_i> + m^2 |H|^2 - |B|^2
    for (auto imm : {generic_surface_cp2(), generic_3fold_s5(), generic_surface_kenmotsu()}) {
        Vec p = Vec::Constant(imm.m(), 0.15);
        PointGeometry pg(imm, p);
        auto fd = fundamental_data_at(imm, pg);
        auto t = trace_terms_at(pg, fd);
        double amb = 0;
        for (int i = 0; i < fd.m; ++i)
            for (int j = 0; j < fd.m; ++j)
                amb += fd.inner(fd.curvature(fd.e.col(i), fd.e.col(j), fd.e.col(j), CurvatureBackend::concrete),
                                fd.e.col(i));
        double rhs = amb + fd.m * fd.m * t.H2 - t.B2;
        EXPECT_NEAR(t.scal, rhs, 1e-7 * (1 + std::abs(rhs)));
    }
}

TEST(Submanifold, FramesAreOrthonormal) {
    auto imm = generic_3fold_s5();
    Vec p(3);
    p << 0.1, -0.2, 0.3;
    auto fd = fundamental_data_at(imm, p, FrameOptions{42});
    Mat all(fd.N, fd.N);
    all << fd.e, fd.nu;
    Mat G = all.transpose() * fd.gbar * all;
    EXPECT_LT((G - Mat::Identity(fd.N, fd.N)).norm(), 1e-10);
    for (const auto& b : fd.B) EXPECT_LT(nrm(fd.tangent(b)), 1e-10);
}

TEST(Submanifold, WeingartenFromNormalDerivative) {
    // -(D_X nu)^T = A_nu X for a normal field nu
    for (auto imm : {generic_surface_cp2(), generic_3fold_s5()}) {
        Vec p = Vec::Constant(imm.m(), -0.1);
        PointGeometry pg(imm, p);
        auto fd = fundamental_data_at(imm, pg);
        JetVec V;
        for (int i = 0; i < pg.N; ++i) V.push_back(pg.psi[i].constant_like(0.3 + 0.1 * i) * pg.psi[(i + 1) % pg.N]);
        JetVec nuJ = pg.normal_part(V);
        Vec nu0 = jet_values(nuJ);
        auto nd = normal_derivative(pg, fd, nuJ);
        for (int i = 0; i < fd.m; ++i) {
            Vec expect = fd.shape(nu0, fd.e.col(i));
            EXPECT_LT(nrm(nd.shape[i] - expect), 1e-9 * (1 + nrm(expect)));
            EXPECT_LT(nrm(fd.tangent(nd.perp[i])), 1e-9);
        }
    }
}

TEST(Submanifold, RoughLaplacianOfGradient) {
    // D^r grad f = grad(tr Hess f) + Ric(grad f) + tr B(., nabla grad f)
    //              + tr nabla-perp B(., grad f) - tr A_{B(., grad f)}
    for (auto imm : {generic_surface_cp2(), generic_3fold_s5(), generic_surface_kenmotsu()}) {
        Vec p = Vec::Constant(imm.m(), 0.2);
        PointGeometry pg(imm, p);
        auto fd = fundamental_data_at(imm, pg);
        auto t = trace_terms_at(pg, fd);
        JetVec G = pg.push(pg.gradient_coords(pg.f));
        Vec lhs = jet_values(pg.rough_laplacian(G));
        Vec rhs = -t.grad_lap_f + t.ric_grad_f + t.trB_Dgradf + t.trDB_gradf - t.trA_Bgradf;
        EXPECT_LT(nrm(lhs - rhs), 1e-7 * (1 + nrm(lhs)));
    }
}

TEST(Submanifold, RoughLaplacianOfMeanCurvature) {
    // D^r H = -(m/2) grad|H|^2 - 2 tr A_{Dperp H} - (tr Rbar(., H).)^T - tr B(., A_H .) - lap_perp H
    for (auto imm : {generic_surface_cp2(), generic_3fold_s5(), generic_surface_kenmotsu()}) {
        Vec p = Vec::Constant(imm.m(), 0.05);
        PointGeometry pg(imm, p);
        auto fd = fundamental_data_at(imm, pg);
        auto t = trace_terms_at(pg, fd);
        Vec lhs = jet_values(pg.rough_laplacian(mean_curvature_jets(pg)));
        Vec trR = fd.curvature_trace(fd.H, CurvatureBackend::concrete);
        Vec rhs = -0.5 * fd.m * t.grad_H2 - 2 * t.trA_DperpH - fd.tangent(trR) - t.trB_AH - t.lap_perp_H;
        EXPECT_LT(nrm(lhs - rhs), 1e-7 * (1 + nrm(lhs)));
    }
}

TEST(Submanifold, NormalLaplacianMatchesTraceTerms) {
    auto imm = generic_surface_cp2();
    Vec p(2);
    p << 0.1, 0.25;
    PointGeometry pg(imm, p);
    auto fd = fundamental_data_at(imm, pg);
    auto t = trace_terms_at(pg, fd);
    Vec l = normal_laplacian(pg, mean_curvature_jets(pg));
    EXPECT_LT(nrm(l - t.lap_perp_H), 1e-10 * (1 + nrm(l)));
}

TEST(Submanifold, HermitianDecompositionIdentities) {
    // j^2 + l k = -I, j l + l m = 0, k j + m k = 0, k l + m^2 = -I
    auto imm = generic_surface_cp2();
    Vec p(2);
    p << 0.3, -0.1;
    auto fd = fundamental_data_at(imm, p, FrameOptions{7});
    auto o = decomposition_operators_at(fd);
    int m = fd.m, q = fd.q;
    EXPECT_LT((o.tt * o.tt + o.nt * o.tn + Mat::Identity(m, m)).norm(), 1e-10);
    EXPECT_LT((o.tt * o.nt + o.nt * o.nn).norm(), 1e-10);
    EXPECT_LT((o.tn * o.tt + o.nn * o.tn).norm(), 1e-10);
    EXPECT_LT((o.tn * o.nt + o.nn * o.nn + Mat::Identity(q, q)).norm(), 1e-10);
    // j and m skew
    EXPECT_LT((o.tt + o.tt.transpose()).norm(), 1e-10);
    EXPECT_LT((o.nn + o.nn.transpose()).norm(), 1e-10);
    EXPECT_LT((o.tn + o.nt.transpose()).norm(), 1e-10);
}

TEST(Submanifold, ContactDecompositionIdentities) {
    // P^2 X + t N X = -X + eta(X) xi^T and N P X + s N X = eta(X) xi^perp (tangent X), etc.
    for (auto imm : {generic_3fold_s5(), generic_surface_kenmotsu()}) {
        Vec p = Vec::Constant(imm.m(), 0.12);
        PointGeometry pg(imm, p);
        auto fd = fundamental_data_at(imm, pg, FrameOptions{3});
        auto t = trace_terms_at(pg, fd);
        auto o = decomposition_operators_at(fd);
        for (int i = 0; i < fd.m; ++i) {
            Vec X = fd.e.col(i);
            double eX = fd.structure.eta.dot(X);
            EXPECT_LT(nrm(o.j(o.j(X)) + o.l(o.k(X)) + X - eX * t.xiT), 1e-10);
            EXPECT_LT(nrm(o.k(o.j(X)) + o.mm(o.k(X)) - eX * t.xiN), 1e-10);
        }
        for (int a = 0; a < fd.q; ++a) {
            Vec n = fd.nu.col(a);
            double en = fd.structure.eta.dot(n);
            EXPECT_LT(nrm(o.j(o.l(n)) + o.l(o.mm(n)) - en * t.xiT), 1e-10);
            EXPECT_LT(nrm(o.k(o.l(n)) + o.mm(o.mm(n)) + n - en * t.xiN), 1e-10);
        }
        // phi xi = 0 split
        EXPECT_LT(nrm(o.j(t.xiT) + o.l(t.xiN)), 1e-10);
        EXPECT_LT(nrm(o.k(t.xiT) + o.mm(t.xiN)), 1e-10);
    }
}

TEST(Submanifold, FrameInvariance) {
    auto imm = generic_3fold_s5();
    Vec p(3);
    p << 0.2, 0.1, -0.15;
    PointGeometry pg(imm, p);
    auto a = trace_terms_at(pg, fundamental_data_at(imm, pg));
    for (uint64_t seed : {1u, 2u, 3u}) {
        auto fd = fundamental_data_at(imm, pg, FrameOptions{seed});
        auto b = trace_terms_at(pg, fd);
        EXPECT_LT(nrm(a.trB_AH - b.trB_AH), 1e-10);
        EXPECT_LT(nrm(a.trA_DperpH - b.trA_DperpH), 1e-10);
        EXPECT_LT(nrm(a.trA_Bgradf - b.trA_Bgradf), 1e-10);
        EXPECT_LT(nrm(a.trB_Dgradf - b.trB_Dgradf), 1e-10);
        EXPECT_NEAR(a.B2, b.B2, 1e-10);
        EXPECT_NEAR(a.AH2, b.AH2, 1e-10);
        EXPECT_NEAR(a.DperpH2, b.DperpH2, 1e-10);
        Vec ta = fundamental_data_at(imm, pg).curvature_trace(a.grad_f, CurvatureBackend::model);
        Vec tb = fd.curvature_trace(a.grad_f, CurvatureBackend::model);
        EXPECT_LT(nrm(ta - tb), 1e-10);
    }
}

TEST(Submanifold, RankDeficiencyIsReported) {
    auto imm = make_immersion(space("cosymplectic_flat", 1), {"u", "v"}, {"u + v", "2*u + 2*v", "0"});
    Vec p(2);
    p << 0.1, 0.2;
    EXPECT_THROW(PointGeometry(imm, p), GeometryError);
}

TEST(Submanifold, AbstractAmbientGivesAlgebraicData) {
    AmbientSpec s;
    s.kind = "abstract_gssf";
    s.n = 1;
    s.coefficients = {"1 + x1^2", "0.5", "x2"};
    auto imm = make_immersion(make_space(s), {"u", "v"}, {"u", "v", "0.3*u*v"});
    Vec p(2);
    p << 0.2, 0.4;
    PointGeometry pg(imm, p);
    auto fd = fundamental_data_at(imm, pg);
    EXPECT_FALSE(pg.has_connection);
    EXPECT_THROW(fd.curvature_trace(fd.H, CurvatureBackend::concrete), SpaceError);
    EXPECT_NO_THROW(fd.curvature_trace(fd.H, CurvatureBackend::model));
}
