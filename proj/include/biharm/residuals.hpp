#ifndef BIHARM_RESIDUALS_HPP
#define BIHARM_RESIDUALS_HPP

// Characterization equations as evaluable residuals.
//
// Direct mode evaluates the Euler-Lagrange fields straight from ambient jets:
//   tau    = tr B
//   tau2   = Lap tau - tr Rbar(., tau).            (Lap = trace of second covariant derivative)
//   tau2f  = f tau2 + (Lap f) tau + 2 D_{grad f} tau
//   tauf   = f tau + dpsi(grad f)
//   bif    = -f [Lap tauf - tr Rbar(., tauf).] - D_{grad f} tauf
//
// Theorem mode stores each published equation as a list of terms (quantity, printed
// coefficient, optional correction). Laplacians in theorem mode are positive.
// The comparison layer relates the two by a fixed factor kappa per family:
//   tau2f = -m f (N + T)      for the f-biharmonic equations
//   bif   = N + T             for the bi-f-harmonic equations

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "biharm/submanifold.hpp"

namespace biharm {

struct ResidualError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// direct oracles

namespace detail {

inline void require_connection(const PointGeometry& pg, const char* what) {
    if (!pg.has_connection || !pg.Rbar)
        throw SpaceError(std::string(what) + " needs a concrete ambient (abstract ambients carry no connection)");
}

// sum_ab g^ab Rbar(d_a psi, X) d_b psi
inline Vec curvature_trace_coords(const PointGeometry& pg, const Vec& X) {
    Vec r = Vec::Zero(pg.N);
    for (int a = 0; a < pg.m; ++a)
        for (int b = 0; b < pg.m; ++b) {
            double gab = pg.ginv[a * pg.m + b].value();
            if (gab == 0) continue;
            r += gab * pg.Rbar->apply(jet_values(pg.dpsi[a]), X, jet_values(pg.dpsi[b]));
        }
    return r;
}

// D_{grad f} V at the point, V given by jets of order >= 1
inline Vec along_grad_f(const PointGeometry& pg, const JetVec& V) {
    JetVec G = pg.gradient_coords(pg.f);
    Vec r = Vec::Zero(pg.N);
    for (int a = 0; a < pg.m; ++a) r += G[a].value() * jet_values(pg.cov(V, a));
    return r;
}

}  // namespace detail

inline Vec tension(const PointGeometry& pg) { return jet_values(pg.tension()); }

inline Vec bitension_direct(const PointGeometry& pg) {
    detail::require_connection(pg, "bitension_direct");
    JetVec tau = pg.tension();
    return jet_values(pg.rough_laplacian(tau)) - detail::curvature_trace_coords(pg, jet_values(tau));
}

inline Vec f_bitension_direct(const PointGeometry& pg) {
    detail::require_connection(pg, "f_bitension_direct");
    JetVec tau = pg.tension();
    Vec t0 = jet_values(tau);
    Vec tau2 = jet_values(pg.rough_laplacian(tau)) - detail::curvature_trace_coords(pg, t0);
    double lap = pg.laplacian_neg(pg.f).value();
    return pg.f.value() * tau2 + lap * t0 + 2.0 * detail::along_grad_f(pg, tau);
}

inline JetVec f_tension_jets(const PointGeometry& pg) {
    JetVec tau = pg.tension();
    int k = PointGeometry::order_of(tau);
    JetVec G = pg.push(pg.gradient_coords(pg.f));
    Jet f = pg.f.truncated(k);
    JetVec r(pg.N);
    for (int i = 0; i < pg.N; ++i) r[i] = f * tau[i] + G[i].truncated(k);
    return r;
}

inline Vec f_tension(const PointGeometry& pg) { return jet_values(f_tension_jets(pg)); }

inline Vec bi_f_tension_direct(const PointGeometry& pg) {
    detail::require_connection(pg, "bi_f_tension_direct");
    JetVec tf = f_tension_jets(pg);
    Vec tf0 = jet_values(tf);
    Vec J = -(jet_values(pg.rough_laplacian(tf)) - detail::curvature_trace_coords(pg, tf0));
    return pg.f.value() * J - detail::along_grad_f(pg, tf);
}

// ---------------------------------------------------------------------------
// quantities shared by theorem-mode equations

struct Ctx {
    double m = 0;    // submanifold dimension (p, n, q in the published statements)
    double f = 1;
    double lapf = 0; // positive Laplacian of f
    double gradf2 = 0;
    double alpha = 0, beta = 0;
    double c = 0;    // ambient parameter as given (holomorphic or phi-sectional curvature)
    double f1 = 0, f2 = 0, f3 = 0;
    double xiT2 = 0, etaH = 0, etag = 0;
    double B2 = 0;
    int N = 0;
};

struct PointQuantities {
    Ctx ctx;
    std::map<std::string, Vec> v;
    FundamentalData fd;
    TraceTerms tt;
    DecompositionOps ops;

    const Vec& at(const std::string& k) const {
        auto it = v.find(k);
        if (it == v.end()) throw ResidualError("internal: unknown quantity '" + k + "'");
        return it->second;
    }
};

inline PointQuantities point_quantities(const PointGeometry& pg, const FundamentalData& fd) {
    PointQuantities q;
    q.fd = fd;
    q.tt = trace_terms_at(pg, fd);
    q.ops = decomposition_operators_at(fd);
    const auto& t = q.tt;
    const auto& o = q.ops;
    Ctx& c = q.ctx;
    c.m = fd.m;
    c.f = fd.f;
    c.N = fd.N;
    c.lapf = t.lap_f;
    c.gradf2 = fd.inner(t.grad_f, t.grad_f);
    c.B2 = t.B2;
    const auto& model = fd.ambient->model();
    auto coeff = model.at(fd.x);
    c.c = fd.ambient->parameter();
    if (fd.structure.kind == StructureKind::hermitian) {
        auto [a, b] = model.alpha_beta(fd.x);
        c.alpha = a;
        c.beta = b;
    } else {
        c.f1 = coeff[0];
        c.f2 = coeff[1];
        c.f3 = coeff[2];
        c.xiT2 = t.xiT2;
        c.etaH = t.eta_H;
        c.etag = fd.structure.eta.dot(t.grad_f);
    }
    auto& v = q.v;
    const Vec& H = fd.H;
    v["H"] = H;
    v["lapperpH"] = t.lap_perp_H;
    v["trB_AH"] = t.trB_AH;
    v["DgH"] = t.Dperp_gradf_H;
    v["DglnfH"] = t.Dperp_gradf_H / fd.f;
    v["AHg"] = t.AH_gradf;
    v["AHglnf"] = t.AH_gradf / fd.f;
    v["gradH2"] = t.grad_H2;
    v["trADH"] = t.trA_DperpH;
    v["g"] = t.grad_f;
    v["trBDg"] = t.trB_Dgradf;
    v["trDBg"] = t.trDB_gradf;
    v["Bgg"] = t.B_gradf_gradf;
    v["ricg"] = t.ric_grad_f;
    v["gradlapf"] = t.grad_lap_f;
    v["trABg"] = t.trA_Bgradf;
    v["gradgf2"] = t.grad_gradf2;
    // hermitian j,k,l,m and contact P,N,s,t share the same four blocks
    v["klH"] = o.k(o.l(H));
    v["jlH"] = o.j(o.l(H));
    v["m2H"] = o.mm(o.mm(H));
    v["kjg"] = o.k(o.j(t.grad_f));
    v["j2g"] = o.j(o.j(t.grad_f));
    v["NsH"] = v["klH"];
    v["PsH"] = v["jlH"];
    v["NPg"] = v["kjg"];
    v["P2g"] = v["j2g"];
    v["xiT"] = t.xiT;
    v["xiN"] = t.xiN;
    v["xi"] = fd.structure.kind == StructureKind::contact ? fd.structure.xi : Vec(Vec::Zero(fd.N));
    Vec trH = fd.curvature_trace(H, CurvatureBackend::model);
    Vec trG = fd.curvature_trace(t.grad_f, CurvatureBackend::model);
    v["trRH_T"] = fd.tangent(trH);
    v["trRH_N"] = fd.normal(trH);
    v["trRg_T"] = fd.tangent(trG);
    v["trRg_N"] = fd.normal(trG);
    return q;
}

// ---------------------------------------------------------------------------
// errata

struct Erratum {
    std::string id;
    std::string where;
    std::string printed;
    std::string corrected;
    std::string evidence;
};

inline const std::vector<Erratum>& errata_list() {
    static const std::vector<Erratum> list = {
        {"E01", "f-biharmonic normal equations (Thm 3.1, Cor 3.2, Thm 3.6 and corollaries)", "-Lap_perp H",
         "+Lap_perp H (positive normal Laplacian)", "normal projection of f_bitension_direct"},
        {"E02", "f-biharmonic normal equations", "+2 Dperp_{grad ln f} H", "-2 Dperp_{grad ln f} H",
         "normal projection of f_bitension_direct"},
        {"E03", "f-biharmonic tangent equations", "-2 A_H grad ln f", "+2 A_H grad ln f",
         "tangent projection of f_bitension_direct"},
        {"E04", "Cor cor2 item 5 tangent", "-(2(2n-1) f1 + 6 f3) eta(H) xi^T", "-(2(2n-1) f2 + 6 f3) eta(H) xi^T",
         "parent Thm 3.6 with PsH = eta(H) xi^T; f_bitension_direct"},
        {"E05", "bi-f normal equations (Thm thmgene, thm1b, thm2b, thm3b and corollaries)", "-n f (Lap f) H",
         "+n f (Lap f) H (positive Laplacian)", "normal projection of bi_f_tension_direct"},
        {"E06", "bi-f normal equations", "-3n Dperp_{grad f} H", "-3n f Dperp_{grad f} H",
         "open question on the missing f factor; bi_f_tension_direct"},
        {"E07", "bi-f tangent equations", "2 n^2 f^2 tr A_{Dperp H}", "2 n f^2 tr A_{Dperp H}",
         "tangent projection of bi_f_tension_direct"},
        {"E08", "bi-f tangent equations", "+f Ric_M(grad f)", "-f Ric_M(grad f)",
         "tangent projection of bi_f_tension_direct; Bochner identity audit"},
        {"E09", "Thm thm1b/thm2b tangent and Cor corlag (bi-f)", "2 f (n-1) alpha grad f", "f (n-1) alpha grad f",
         "GCSF trace lemma audit; bi_f_tension_direct"},
        {"E10", "Thm thm1b/thm2b tangent and Cor corlag (bi-f)", "-6 f beta j^2 grad f", "-3 f beta j^2 grad f",
         "GCSF trace lemma audit; bi_f_tension_direct"},
        {"E11", "Thm thm2b", "c (holomorphic sectional curvature c) used as alpha = beta",
         "alpha = beta = c/4", "curvature_model vs curvature_concrete on fubini_study"},
        {"E12", "Thm thm3b normal and Lemma lem3b2", "3 f NP grad f / 3 NP grad f", "3 f f3 NP grad f",
         "GSSF trace lemma audit; bi_f_tension_direct"},
        {"E13", "Thm thm3b tangent", "-2n(n-1) f f2 eta(H) xi^T", "-2n(n-1) f^2 f2 eta(H) xi^T",
         "bi_f_tension_direct"},
        {"E14", "Thm thm3b tangent", "-6n f f3 PsH", "-6n f^2 f3 PsH", "bi_f_tension_direct"},
        {"E15", "Thm thm3b tangent and Lemma lem3b2", "-f f3 P^2 grad f / f3 P^2 grad f", "-3 f f3 P^2 grad f",
         "GSSF trace lemma audit; bi_f_tension_direct"},
        {"E16", "Cor corlag (bi-f) item 1 normal", "term -3 f beta kj grad f dropped", "term kept (kj grad f need not vanish on a hypersurface)",
         "parent Thm thm1b; bi_f_tension_direct"},
        {"E17", "Cor cor2b tangent, all items", "term 3 n f A_H grad f missing", "term kept", "parent Thm thm3b"},
        {"E18", "Cor cor2b item 2 tangent", "term -(n-1) f f1 grad f missing", "term kept", "parent Thm thm3b"},
        {"E19", "Cor cor2b item 5", "sH = 0 used for hypersurfaces", "tH = 0, so NsH = -H + eta(H) xi^perp and PsH = eta(H) xi^T; terms kept",
         "decomposition audit; parent Thm thm3b"},
    };
    return list;
}

inline const Erratum* find_erratum(const std::string& id) {
    for (const auto& e : errata_list())
        if (e.id == id) return &e;
    return nullptr;
}

// ---------------------------------------------------------------------------
// term-list equations

using Coef = std::function<double(const Ctx&)>;

struct Term {
    std::string label;
    std::string q;
    Coef printed;
    std::string erratum;  // comma separated ids, empty if printed as correct
    Coef corrected;
};

inline Term T(std::string label, std::string q, Coef printed) {
    return {std::move(label), std::move(q), printed, "", printed};
}

inline Term TE(std::string label, std::string q, Coef printed, std::string erratum, Coef corrected) {
    return {std::move(label), std::move(q), std::move(printed), std::move(erratum), std::move(corrected)};
}

enum class Part { normal, tangent };

struct Equation {
    std::vector<Term> terms;
    Coef scale;  // corollary equation times scale compares to the parent equation
};

enum class Family { f_biharmonic, bi_f };

enum class Needs { hermitian, contact, any };

struct TheoremSpec {
    std::string id;
    std::string title;
    Family family;
    Needs needs;
    std::string parent;              // empty for theorems
    std::vector<Flag> hypotheses;    // verified numerically before use
    int ambient_dim = 0;             // 0 = any
    Equation normal, tangent;
};

struct TermValue {
    std::string label;
    Part part;
    double printed = 0, corrected = 0;
    std::string erratum;
    Vec value;            // quantity vector
    Vec printed_contrib;  // printed * value
    Vec corrected_contrib;
};

struct TheoremEval {
    std::string id;
    Vec normal_printed, normal_corrected, tangent_printed, tangent_corrected;
    std::vector<TermValue> terms;

    Vec normal(bool errata) const { return errata ? normal_corrected : normal_printed; }
    Vec tangent(bool errata) const { return errata ? tangent_corrected : tangent_printed; }
};

inline TheoremEval evaluate(const TheoremSpec& spec, const PointQuantities& q) {
    TheoremEval ev;
    ev.id = spec.id;
    const int N = q.fd.N;
    auto run = [&](const Equation& eq, Part part, Vec& pr, Vec& co) {
        pr = Vec::Zero(N);
        co = Vec::Zero(N);
        for (const auto& t : eq.terms) {
            TermValue tv;
            tv.label = t.label;
            tv.part = part;
            tv.printed = t.printed(q.ctx);
            tv.corrected = t.corrected(q.ctx);
            tv.erratum = t.erratum;
            tv.value = q.at(t.q);
            tv.printed_contrib = tv.printed * tv.value;
            tv.corrected_contrib = tv.corrected * tv.value;
            pr += tv.printed_contrib;
            co += tv.corrected_contrib;
            ev.terms.push_back(std::move(tv));
        }
    };
    run(spec.normal, Part::normal, ev.normal_printed, ev.normal_corrected);
    run(spec.tangent, Part::tangent, ev.tangent_printed, ev.tangent_corrected);
    return ev;
}

// ---------------------------------------------------------------------------
// the catalog

namespace eqs {

inline Coef K(double v) {
    return [v](const Ctx&) { return v; };
}

// f-biharmonic pieces shared by Thm 3.1, Thm 3.6 and their corollaries
inline Term fb_lapperp() {
    return TE("-Lap_perp H", "lapperpH", K(-1), "E01", K(1));
}
inline Term fb_trBAH() { return T("tr B(., A_H .)", "trB_AH", K(1)); }
inline Term fb_lapf() {
    return T("(Lap f / f) H", "H", [](const Ctx& c) { return c.lapf / c.f; });
}
inline Term fb_dperp() { return TE("2 Dperp_{grad ln f} H", "DglnfH", K(2), "E02", K(-2)); }
inline Term fb_gradH2(double k) {
    return T(k == 0.5 ? "1/2 grad|H|^2" : (k == 1 ? "grad|H|^2" : "p/2 grad|H|^2"), "gradH2",
             k > 0 ? K(k) : Coef([](const Ctx& c) { return c.m / 2; }));
}
inline Term fb_AH() { return TE("-2 A_H grad ln f", "AHglnf", K(-2), "E03", K(2)); }
inline Term fb_trA() { return T("2 tr A_{Dperp H}", "trADH", K(2)); }

inline std::vector<Term> fb_normal_head() { return {fb_lapperp(), fb_trBAH(), fb_lapf(), fb_dperp()}; }

// bi-f left-hand sides
inline std::vector<Term> bif_normal_lhs(bool with_lap_perp, bool with_trB, bool with_dperp) {
    std::vector<Term> t;
    auto mf2 = [](const Ctx& c) { return c.m * c.f * c.f; };
    if (with_lap_perp) t.push_back(T("n f^2 Lap_perp H", "lapperpH", mf2));
    if (with_trB) t.push_back(T("n f^2 tr B(., A_H .)", "trB_AH", mf2));
    t.push_back(TE("-n f (Lap f) H", "H", [](const Ctx& c) { return -c.m * c.f * c.lapf; }, "E05",
                   [](const Ctx& c) { return c.m * c.f * c.lapf; }));
    if (with_dperp)
        t.push_back(TE("-3n Dperp_{grad f} H", "DgH", [](const Ctx& c) { return -3 * c.m; }, "E06",
                       [](const Ctx& c) { return -3 * c.m * c.f; }));
    t.push_back(T("-f tr B(., nabla grad f)", "trBDg", [](const Ctx& c) { return -c.f; }));
    t.push_back(T("-f tr nabla-perp B(., grad f)", "trDBg", [](const Ctx& c) { return -c.f; }));
    t.push_back(T("-n |grad f|^2 H", "H", [](const Ctx& c) { return -c.m * c.gradf2; }));
    t.push_back(T("-B(grad f, grad f)", "Bgg", K(-1)));
    return t;
}

inline std::vector<Term> bif_tangent_lhs(bool with_H_terms, bool with_AH) {
    std::vector<Term> t;
    if (with_H_terms) {
        t.push_back(T("n^2 f^2/2 grad|H|^2", "gradH2", [](const Ctx& c) { return c.m * c.m * c.f * c.f / 2; }));
        t.push_back(TE("2 n^2 f^2 tr A_{Dperp H}", "trADH", [](const Ctx& c) { return 2 * c.m * c.m * c.f * c.f; },
                       "E07", [](const Ctx& c) { return 2 * c.m * c.f * c.f; }));
    }
    if (with_AH) t.push_back(T("3 n f A_H grad f", "AHg", [](const Ctx& c) { return 3 * c.m * c.f; }));
    t.push_back(TE("f Ric_M(grad f)", "ricg", [](const Ctx& c) { return c.f; }, "E08",
                   [](const Ctx& c) { return -c.f; }));
    t.push_back(T("f grad(Lap f)", "gradlapf", [](const Ctx& c) { return c.f; }));
    t.push_back(T("f tr A_{B(., grad f)}", "trABg", [](const Ctx& c) { return c.f; }));
    t.push_back(T("-1/2 grad|grad f|^2", "gradgf2", K(-0.5)));
    return t;
}

inline std::vector<Term> cat(std::vector<Term> a, const std::vector<Term>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

inline Coef one() { return K(1); }

// GCSF right-hand sides of thm1b (moved to the left), with alpha/beta selectors
inline std::vector<Term> gcsf_bif_normal_rhs(bool csf) {
    auto al = [csf](const Ctx& c) { return csf ? c.c : c.alpha; };
    auto alc = [csf](const Ctx& c) { return csf ? c.c / 4 : c.alpha; };
    auto be = [csf](const Ctx& c) { return csf ? c.c : c.beta; };
    auto bec = [csf](const Ctx& c) { return csf ? c.c / 4 : c.beta; };
    std::string e = csf ? "E11" : "";
    auto mk = [&](std::string label, std::string q, Coef p, Coef cc) {
        return csf ? TE(label, q, p, e, cc) : T(label, q, p);
    };
    return {
        mk("-n^2 f^2 alpha H", "H", [al](const Ctx& c) { return -c.m * c.m * c.f * c.f * al(c); },
           [alc](const Ctx& c) { return -c.m * c.m * c.f * c.f * alc(c); }),
        mk("+3 n f^2 beta klH", "klH", [be](const Ctx& c) { return 3 * c.m * c.f * c.f * be(c); },
           [bec](const Ctx& c) { return 3 * c.m * c.f * c.f * bec(c); }),
        mk("+3 f beta kj grad f", "kjg", [be](const Ctx& c) { return 3 * c.f * be(c); },
           [bec](const Ctx& c) { return 3 * c.f * bec(c); }),
    };
}

inline std::vector<Term> gcsf_bif_tangent_rhs(bool csf, bool with_jlH, bool with_j2) {
    auto al = [csf](const Ctx& c) { return csf ? c.c : c.alpha; };
    auto alc = [csf](const Ctx& c) { return csf ? c.c / 4 : c.alpha; };
    auto be = [csf](const Ctx& c) { return csf ? c.c : c.beta; };
    auto bec = [csf](const Ctx& c) { return csf ? c.c / 4 : c.beta; };
    std::vector<Term> t;
    std::string e11 = csf ? "E11" : "";
    auto join = [](std::string a, std::string b) { return a.empty() ? b : (b.empty() ? a : a + "," + b); };
    if (with_jlH) {
        Coef p = [be](const Ctx& c) { return 6 * c.m * c.f * c.f * be(c); };
        Coef cc = [bec](const Ctx& c) { return 6 * c.m * c.f * c.f * bec(c); };
        t.push_back(csf ? TE("+6 n f^2 beta jlH", "jlH", p, e11, cc) : T("+6 n f^2 beta jlH", "jlH", p));
    }
    t.push_back(TE("-2 f (n-1) alpha grad f", "g", [al](const Ctx& c) { return -2 * c.f * (c.m - 1) * al(c); },
                   join("E09", e11), [alc](const Ctx& c) { return -c.f * (c.m - 1) * alc(c); }));
    if (with_j2)
        t.push_back(TE("+6 f beta j^2 grad f", "j2g", [be](const Ctx& c) { return 6 * c.f * be(c); },
                       join("E10", e11), [bec](const Ctx& c) { return 3 * c.f * bec(c); }));
    return t;
}

}  // namespace eqs

inline const std::vector<TheoremSpec>& theorem_catalog() {
    using namespace eqs;
    static const std::vector<TheoremSpec> cat_ = [] {
        std::vector<TheoremSpec> s;
        auto kappa_one = K(1);
        // ---- f-biharmonic, GCSF (Thm 3.1; for CSF ambients alpha = beta = c0)
        {
            TheoremSpec t{"thm3.1", "f-biharmonic in a generalized complex space form", Family::f_biharmonic,
                          Needs::hermitian, "", {}, 0, {}, {}};
            t.normal.terms = cat(fb_normal_head(),
                                 {T("-p alpha H", "H", [](const Ctx& c) { return -c.m * c.alpha; }),
                                  T("3 beta klH", "klH", [](const Ctx& c) { return 3 * c.beta; })});
            t.tangent.terms = {fb_gradH2(-1), fb_AH(), fb_trA(),
                               T("6 beta jlH", "jlH", [](const Ctx& c) { return 6 * c.beta; })};
            s.push_back(t);
        }
        // Cor 3.3 items
        {
            TheoremSpec t{"cor3.3:hypersurface", "hypersurface", Family::f_biharmonic, Needs::hermitian, "thm3.1",
                          {Flag::hypersurface}, 4, {}, {}};
            t.normal.terms = cat(fb_normal_head(), {T("-3(alpha+beta) H", "H", [](const Ctx& c) {
                                     return -3 * (c.alpha + c.beta);
                                 })});
            t.tangent.terms = {T("3/2 grad|H|^2", "gradH2", K(1.5)), fb_AH(), fb_trA()};
            s.push_back(t);
        }
        {
            TheoremSpec t{"cor3.3:complex-surface", "complex surface", Family::f_biharmonic, Needs::hermitian,
                          "thm3.1", {Flag::complex}, 0, {}, {}};
            t.normal.terms = cat(fb_normal_head(), {T("-2 alpha H", "H", [](const Ctx& c) { return -2 * c.alpha; })});
            t.tangent.terms = {fb_gradH2(1), fb_AH(), fb_trA()};
            s.push_back(t);
        }
        {
            TheoremSpec t{"cor3.3:lagrangian-surface", "Lagrangian surface", Family::f_biharmonic, Needs::hermitian,
                          "thm3.1", {Flag::lagrangian}, 4, {}, {}};
            t.normal.terms = cat(fb_normal_head(), {T("-2 alpha H", "H", [](const Ctx& c) { return -2 * c.alpha; }),
                                                    T("-3 beta H", "H", [](const Ctx& c) { return -3 * c.beta; })});
            t.tangent.terms = {fb_gradH2(1), fb_AH(), fb_trA()};
            s.push_back(t);
        }
        {
            TheoremSpec t{"cor3.3:curve", "curve", Family::f_biharmonic, Needs::hermitian, "thm3.1",
                          {Flag::curve}, 0, {}, {}};
            t.normal.terms = cat(fb_normal_head(), {T("-alpha H", "H", [](const Ctx& c) { return -c.alpha; }),
                                                    T("-3 beta H", "H", [](const Ctx& c) { return -3 * c.beta; }),
                                                    T("-3 beta m^2 H", "m2H", [](const Ctx& c) { return -3 * c.beta; })});
            t.tangent.terms = {fb_gradH2(0.5), fb_AH(), fb_trA()};
            s.push_back(t);
        }
        // Cor corlag (f-biharmonic, parallel H)
        auto ahg_scaled = [] {
            Equation e;
            e.terms = {T("A_H grad f", "AHg", K(1))};
            e.scale = [](const Ctx& c) { return 2 / c.f; };
            return e;
        };
        {
            TheoremSpec t{"corlag:lagrangian-parallel", "Lagrangian surface, parallel H", Family::f_biharmonic,
                          Needs::hermitian, "thm3.1", {Flag::lagrangian, Flag::parallel_H}, 4, {}, {}};
            t.normal.terms = {fb_trBAH(), T("-2 alpha H", "H", [](const Ctx& c) { return -2 * c.alpha; }),
                              T("-3 beta H", "H", [](const Ctx& c) { return -3 * c.beta; }), fb_lapf()};
            t.tangent = ahg_scaled();
            s.push_back(t);
        }
        {
            TheoremSpec t{"corlag:complex-parallel", "complex surface, parallel H", Family::f_biharmonic,
                          Needs::hermitian, "thm3.1", {Flag::complex, Flag::parallel_H}, 0, {}, {}};
            t.normal.terms = {fb_trBAH(), T("-2 alpha H", "H", [](const Ctx& c) { return -2 * c.alpha; }), fb_lapf()};
            t.tangent = ahg_scaled();
            s.push_back(t);
        }
        {
            TheoremSpec t{"corlag:curve-parallel", "curve, parallel H", Family::f_biharmonic, Needs::hermitian,
                          "thm3.1", {Flag::curve, Flag::parallel_H}, 0, {}, {}};
            t.normal.terms = {fb_trBAH(), T("-alpha H", "H", [](const Ctx& c) { return -c.alpha; }),
                              T("-3 beta H", "H", [](const Ctx& c) { return -3 * c.beta; }),
                              T("-3 beta m^2 H", "m2H", [](const Ctx& c) { return -3 * c.beta; }), fb_lapf()};
            t.tangent = ahg_scaled();
            s.push_back(t);
        }
        // ---- f-biharmonic, GSSF (Thm 3.6)
        auto gssf_normal_rhs = [](bool xiT2, bool xiN, bool Ns) {
            std::vector<Term> t = {T("-p f1 H", "H", [](const Ctx& c) { return -c.m * c.f1; })};
            if (xiT2) t.push_back(T("+f2 |xi^T|^2 H", "H", [](const Ctx& c) { return c.f2 * c.xiT2; }));
            if (xiN) t.push_back(T("+p f2 eta(H) xi^perp", "xiN", [](const Ctx& c) { return c.m * c.f2 * c.etaH; }));
            if (Ns) t.push_back(T("+3 f3 NsH", "NsH", [](const Ctx& c) { return 3 * c.f3; }));
            return t;
        };
        auto gssf_tangent = [](bool eta, bool Ps) {
            std::vector<Term> t = {fb_gradH2(-1), fb_trA(), fb_AH()};
            if (eta)
                t.push_back(T("+2 f2 (p-1) eta(H) xi^T", "xiT", [](const Ctx& c) { return 2 * c.f2 * (c.m - 1) * c.etaH; }));
            if (Ps) t.push_back(T("+6 f3 PsH", "PsH", [](const Ctx& c) { return 6 * c.f3; }));
            return t;
        };
        {
            TheoremSpec t{"thm3.6", "f-biharmonic in a generalized Sasakian space form", Family::f_biharmonic,
                          Needs::contact, "", {}, 0, {}, {}};
            t.normal.terms = cat(fb_normal_head(), gssf_normal_rhs(true, true, true));
            t.tangent.terms = gssf_tangent(true, true);
            s.push_back(t);
        }
        {
            TheoremSpec t{"cor2:invariant", "invariant", Family::f_biharmonic, Needs::contact, "thm3.6",
                          {Flag::invariant}, 0, {}, {}};
            t.normal.terms = cat(fb_normal_head(), gssf_normal_rhs(true, true, false));
            t.tangent.terms = gssf_tangent(true, true);
            s.push_back(t);
        }
        {
            TheoremSpec t{"cor2:anti-invariant", "anti-invariant", Family::f_biharmonic, Needs::contact, "thm3.6",
                          {Flag::anti_invariant}, 0, {}, {}};
            t.normal.terms = cat(fb_normal_head(), gssf_normal_rhs(true, true, true));
            t.tangent.terms = gssf_tangent(true, false);
            s.push_back(t);
        }
        {
            TheoremSpec t{"cor2:xi-normal", "xi normal", Family::f_biharmonic, Needs::contact, "thm3.6",
                          {Flag::xi_normal, Flag::anti_invariant}, 0, {}, {}};
            t.normal.terms = cat(fb_normal_head(),
                                 {T("-p f1 H", "H", [](const Ctx& c) { return -c.m * c.f1; }),
                                  T("+p f2 eta(H) xi", "xi", [](const Ctx& c) { return c.m * c.f2 * c.etaH; }),
                                  T("+3 f3 NsH", "NsH", [](const Ctx& c) { return 3 * c.f3; })});
            t.tangent.terms = gssf_tangent(false, false);
            s.push_back(t);
        }
        {
            TheoremSpec t{"cor2:xi-tangent", "xi tangent", Family::f_biharmonic, Needs::contact, "thm3.6",
                          {Flag::xi_tangent}, 0, {}, {}};
            t.normal.terms = cat(fb_normal_head(), {T("-p f1 H", "H", [](const Ctx& c) { return -c.m * c.f1; }),
                                                    T("+f2 H", "H", [](const Ctx& c) { return c.f2; }),
                                                    T("+3 f3 NsH", "NsH", [](const Ctx& c) { return 3 * c.f3; })});
            t.tangent.terms = gssf_tangent(false, true);
            s.push_back(t);
        }
        {
            TheoremSpec t{"cor2:hypersurface", "hypersurface", Family::f_biharmonic, Needs::contact, "thm3.6",
                          {Flag::hypersurface}, 0, {}, {}};
            // p = 2n for a hypersurface of a (2n+1)-manifold
            t.normal.terms = cat(
                fb_normal_head(),
                {T("-(2n f1 + 3 f3) H", "H", [](const Ctx& c) { return -(c.m * c.f1 + 3 * c.f3); }),
                 T("+f2 |xi^T|^2 H", "H", [](const Ctx& c) { return c.f2 * c.xiT2; }),
                 T("+(2n f2 + 3 f3) eta(H) xi^perp", "xiN", [](const Ctx& c) { return (c.m * c.f2 + 3 * c.f3) * c.etaH; })});
            t.tangent.terms = {T("n grad|H|^2", "gradH2", [](const Ctx& c) { return c.m / 2; }), fb_trA(), fb_AH(),
                               TE("+(2(2n-1) f1 + 6 f3) eta(H) xi^T", "xiT",
                                  [](const Ctx& c) { return (2 * (c.m - 1) * c.f1 + 6 * c.f3) * c.etaH; }, "E04",
                                  [](const Ctx& c) { return (2 * (c.m - 1) * c.f2 + 6 * c.f3) * c.etaH; })};
            s.push_back(t);
        }
        // ---- bi-f general (Thm thmgene)
        {
            TheoremSpec t{"thmgene", "bi-f-harmonic, general ambient", Family::bi_f, Needs::any, "", {}, 0, {}, {}};
            t.normal.terms = cat(bif_normal_lhs(true, true, true),
                                 {T("+n f^2 tr(Rbar(., H).)^perp", "trRH_N", [](const Ctx& c) { return c.m * c.f * c.f; }),
                                  T("+f tr(Rbar(., grad f).)^perp", "trRg_N", [](const Ctx& c) { return c.f; })});
            t.tangent.terms =
                cat(bif_tangent_lhs(true, true),
                    {T("+2n f^2 tr(Rbar(., H).)^T", "trRH_T", [](const Ctx& c) { return 2 * c.m * c.f * c.f; }),
                     T("+f tr(Rbar(., grad f).)^T", "trRg_T", [](const Ctx& c) { return c.f; })});
            s.push_back(t);
        }
        // ---- bi-f GCSF (thm1b) and CSF (thm2b)
        for (bool csf : {false, true}) {
            TheoremSpec t{csf ? "thm2b" : "thm1b",
                          csf ? "bi-f-harmonic in a complex space form" : "bi-f-harmonic in a generalized complex space form",
                          Family::bi_f, Needs::hermitian, "", {}, 0, {}, {}};
            t.normal.terms = cat(bif_normal_lhs(true, true, true), gcsf_bif_normal_rhs(csf));
            t.tangent.terms = cat(bif_tangent_lhs(true, true), gcsf_bif_tangent_rhs(csf, true, true));
            s.push_back(t);
        }
        // Cor corlag (bi-f)
        {
            TheoremSpec t{"corlagb:hypersurface-cmc", "hypersurface, constant mean curvature", Family::bi_f,
                          Needs::hermitian, "thm1b", {Flag::hypersurface, Flag::cmc}, 4, {}, {}};
            t.normal.terms = cat(bif_normal_lhs(false, false, false),
                                 {T("-n^2 f^2 alpha H", "H", [](const Ctx& c) { return -c.m * c.m * c.f * c.f * c.alpha; }),
                                  T("-3 n f^2 beta H", "H", [](const Ctx& c) { return -3 * c.m * c.f * c.f * c.beta; }),
                                  T("+n f^2 |B|^2 H", "H", [](const Ctx& c) { return c.m * c.f * c.f * c.B2; }),
                                  TE("+3 f beta kj grad f", "kjg", K(0), "E16", [](const Ctx& c) { return 3 * c.f * c.beta; })});
            t.tangent.terms = cat(bif_tangent_lhs(false, true), gcsf_bif_tangent_rhs(false, false, true));
            s.push_back(t);
        }
        {
            TheoremSpec t{"corlagb:complex-parallel", "complex surface, parallel H", Family::bi_f, Needs::hermitian,
                          "thm1b", {Flag::complex, Flag::parallel_H}, 0, {}, {}};
            t.normal.terms = cat(bif_normal_lhs(false, true, false),
                                 {T("-n^2 f^2 alpha H", "H", [](const Ctx& c) { return -c.m * c.m * c.f * c.f * c.alpha; })});
            t.tangent.terms = cat(bif_tangent_lhs(false, true), gcsf_bif_tangent_rhs(false, false, true));
            s.push_back(t);
        }
        {
            TheoremSpec t{"corlagb:lagrangian-parallel", "Lagrangian surface, parallel H", Family::bi_f,
                          Needs::hermitian, "thm1b", {Flag::lagrangian, Flag::parallel_H}, 4, {}, {}};
            t.normal.terms = cat(bif_normal_lhs(false, true, false),
                                 {T("-n^2 f^2 alpha H", "H", [](const Ctx& c) { return -c.m * c.m * c.f * c.f * c.alpha; }),
                                  T("-3 n f^2 beta H", "H", [](const Ctx& c) { return -3 * c.m * c.f * c.f * c.beta; })});
            t.tangent.terms = cat(bif_tangent_lhs(false, true), gcsf_bif_tangent_rhs(false, false, false));
            s.push_back(t);
        }
        {
            TheoremSpec t{"corlagb:curve-parallel", "curve, parallel H", Family::bi_f, Needs::hermitian, "thm1b",
                          {Flag::curve, Flag::parallel_H}, 0, {}, {}};
            t.normal.terms = cat(bif_normal_lhs(false, true, false),
                                 {T("-n^2 f^2 alpha H", "H", [](const Ctx& c) { return -c.m * c.m * c.f * c.f * c.alpha; }),
                                  T("+3 n f^2 beta klH", "klH", [](const Ctx& c) { return 3 * c.m * c.f * c.f * c.beta; })});
            t.tangent.terms = cat(bif_tangent_lhs(false, true), gcsf_bif_tangent_rhs(false, false, false));
            s.push_back(t);
        }
        // ---- bi-f GSSF (thm3b)
        auto f2n = [](const Ctx& c) { return c.m * c.f * c.f; };
        auto b3_n_f1 = T("-n^2 f^2 f1 H", "H", [](const Ctx& c) { return -c.m * c.m * c.f * c.f * c.f1; });
        auto b3_n_xiT2 = T("+n f^2 f2 |xi^T|^2 H", "H", [](const Ctx& c) { return c.m * c.f * c.f * c.f2 * c.xiT2; });
        auto b3_n_etaH = T("+n^2 f^2 f2 eta(H) xi^perp", "xiN",
                           [](const Ctx& c) { return c.m * c.m * c.f * c.f * c.f2 * c.etaH; });
        auto b3_n_Ns = T("+3 n f^2 f3 NsH", "NsH", [](const Ctx& c) { return 3 * c.m * c.f * c.f * c.f3; });
        auto b3_n_etag = T("+(n-1) f f2 eta(grad f) xi^perp", "xiN",
                           [](const Ctx& c) { return (c.m - 1) * c.f * c.f2 * c.etag; });
        auto b3_n_NP = TE("+3 f NP grad f", "NPg", [](const Ctx& c) { return 3 * c.f; }, "E12",
                          [](const Ctx& c) { return 3 * c.f * c.f3; });
        auto b3_t_etaH = TE("+2n(n-1) f f2 eta(H) xi^T", "xiT",
                            [](const Ctx& c) { return 2 * c.m * (c.m - 1) * c.f * c.f2 * c.etaH; }, "E13",
                            [](const Ctx& c) { return 2 * c.m * (c.m - 1) * c.f * c.f * c.f2 * c.etaH; });
        auto b3_t_Ps = TE("+6n f f3 PsH", "PsH", [](const Ctx& c) { return 6 * c.m * c.f * c.f3; }, "E14",
                          [](const Ctx& c) { return 6 * c.m * c.f * c.f * c.f3; });
        auto b3_t_f1 = T("-(n-1) f f1 grad f", "g", [](const Ctx& c) { return -(c.m - 1) * c.f * c.f1; });
        auto b3_t_xiT2 = T("+f f2 |xi^T|^2 grad f", "g", [](const Ctx& c) { return c.f * c.f2 * c.xiT2; });
        auto b3_t_etag = T("+(n-2) f f2 eta(grad f) xi^T", "xiT",
                           [](const Ctx& c) { return (c.m - 2) * c.f * c.f2 * c.etag; });
        auto b3_t_P2 = TE("+f f3 P^2 grad f", "P2g", [](const Ctx& c) { return c.f * c.f3; }, "E15",
                          [](const Ctx& c) { return 3 * c.f * c.f3; });
        // parallel-H corollaries print the trace term on the right; moved it reads the same
        auto b3_t_trA = TE("+2 n^2 f^2 tr A_{Dperp H}", "trADH", [](const Ctx& c) { return 2 * c.m * c.m * c.f * c.f; },
                           "E07", [](const Ctx& c) { return 2 * c.m * c.f * c.f; });
        auto b3_t_AH_missing =
            TE("+3 n f A_H grad f (missing)", "AHg", K(0), "E17", [](const Ctx& c) { return 3 * c.m * c.f; });
        {
            TheoremSpec t{"thm3b", "bi-f-harmonic in a generalized Sasakian space form", Family::bi_f, Needs::contact,
                          "", {}, 0, {}, {}};
            t.normal.terms = cat(bif_normal_lhs(true, true, true),
                                 {b3_n_f1, b3_n_xiT2, b3_n_etaH, b3_n_Ns, b3_n_etag, b3_n_NP});
            t.tangent.terms =
                cat(bif_tangent_lhs(true, true), {b3_t_etaH, b3_t_Ps, b3_t_f1, b3_t_xiT2, b3_t_etag, b3_t_P2});
            s.push_back(t);
        }
        (void)f2n;
        {
            TheoremSpec t{"cor2b:invariant", "invariant, parallel H", Family::bi_f, Needs::contact, "thm3b",
                          {Flag::invariant, Flag::parallel_H}, 0, {}, {}};
            t.normal.terms = cat(bif_normal_lhs(false, true, false), {b3_n_f1, b3_n_xiT2, b3_n_etaH, b3_n_etag});
            t.tangent.terms = cat(bif_tangent_lhs(false, false),
                                  {b3_t_etaH, b3_t_Ps, b3_t_f1, b3_t_xiT2, b3_t_etag, b3_t_P2, b3_t_trA, b3_t_AH_missing});
            s.push_back(t);
        }
        {
            TheoremSpec t{"cor2b:anti-invariant", "anti-invariant, parallel H", Family::bi_f, Needs::contact, "thm3b",
                          {Flag::anti_invariant, Flag::parallel_H}, 0, {}, {}};
            t.normal.terms =
                cat(bif_normal_lhs(false, true, false), {b3_n_f1, b3_n_xiT2, b3_n_etaH, b3_n_Ns, b3_n_etag});
            t.tangent.terms = cat(bif_tangent_lhs(false, false),
                                  {b3_t_etaH, b3_t_trA, b3_t_xiT2, b3_t_etag, b3_t_AH_missing,
                                   TE("-(n-1) f f1 grad f (missing)", "g", K(0), "E18",
                                      [](const Ctx& c) { return -(c.m - 1) * c.f * c.f1; })});
            s.push_back(t);
        }
        {
            TheoremSpec t{"cor2b:xi-normal", "xi normal, parallel H", Family::bi_f, Needs::contact, "thm3b",
                          {Flag::xi_normal, Flag::anti_invariant, Flag::parallel_H}, 0, {}, {}};
            t.normal.terms =
                cat(bif_normal_lhs(false, true, false),
                    {b3_n_f1,
                     T("+n^2 f^2 f2 eta(H) xi", "xi", [](const Ctx& c) { return c.m * c.m * c.f * c.f * c.f2 * c.etaH; }),
                     b3_n_Ns,
                     T("+(n-1) f f2 eta(grad f) xi", "xi", [](const Ctx& c) { return (c.m - 1) * c.f * c.f2 * c.etag; })});
            t.tangent.terms = cat(bif_tangent_lhs(false, false), {b3_t_f1, b3_t_trA, b3_t_AH_missing});
            s.push_back(t);
        }
        {
            TheoremSpec t{"cor2b:xi-tangent", "xi tangent, parallel H", Family::bi_f, Needs::contact, "thm3b",
                          {Flag::xi_tangent, Flag::parallel_H}, 0, {}, {}};
            t.normal.terms = cat(bif_normal_lhs(false, true, false),
                                 {b3_n_f1, T("+n f^2 f2 H", "H", [](const Ctx& c) { return c.m * c.f * c.f * c.f2; }),
                                  b3_n_Ns, b3_n_NP});
            t.tangent.terms = cat(bif_tangent_lhs(false, false),
                                  {b3_t_Ps, b3_t_f1, b3_t_trA, b3_t_xiT2, b3_t_etag, b3_t_P2, b3_t_AH_missing});
            s.push_back(t);
        }
        {
            TheoremSpec t{"cor2b:hypersurface", "hypersurface, parallel H", Family::bi_f, Needs::contact, "thm3b",
                          {Flag::hypersurface, Flag::parallel_H}, 0, {}, {}};
            t.normal.terms = cat(bif_normal_lhs(false, true, false),
                                 {b3_n_f1, b3_n_xiT2, b3_n_etaH, b3_n_etag, b3_n_NP,
                                  TE("+3 n f^2 f3 NsH (dropped)", "NsH", K(0), "E19",
                                     [](const Ctx& c) { return 3 * c.m * c.f * c.f * c.f3; })});
            t.tangent.terms = cat(bif_tangent_lhs(false, false),
                                  {b3_t_etaH, b3_t_f1, b3_t_trA, b3_t_xiT2, b3_t_etag, b3_t_P2, b3_t_AH_missing,
                                   TE("+6 n f^2 f3 PsH (dropped)", "PsH", K(0), "E19",
                                      [](const Ctx& c) { return 6 * c.m * c.f * c.f * c.f3; })});
            s.push_back(t);
        }
        (void)kappa_one;
        for (auto& t : s) {
            if (!t.normal.scale) t.normal.scale = K(1);
            if (!t.tangent.scale) t.tangent.scale = K(1);
        }
        return s;
    }();
    return cat_;
}

inline const TheoremSpec& find_theorem(const std::string& id) {
    for (const auto& t : theorem_catalog())
        if (t.id == id) return t;
    throw ResidualError("unknown theorem or corollary '" + id + "'");
}

inline std::vector<std::string> corollary_ids() {
    std::vector<std::string> r;
    for (const auto& t : theorem_catalog())
        if (!t.parent.empty()) r.push_back(t.id);
    return r;
}

inline double kappa(Family fam, const Ctx& c) { return fam == Family::f_biharmonic ? -c.m * c.f : 1.0; }

// ---------------------------------------------------------------------------
// hypotheses (flags) checked at a point

struct FlagCheck {
    Flag flag;
    double value = 0;  // the quantity that must vanish
    std::string what;
    bool holds = false;
};

inline FlagCheck check_flag(Flag fl, const PointGeometry& pg, const PointQuantities& q, double tol) {
    const auto& fd = q.fd;
    const auto& o = q.ops;
    FlagCheck r;
    r.flag = fl;
    switch (fl) {
        case Flag::hypersurface:
            r.value = std::abs(fd.q - 1);
            r.what = "codimension - 1";
            break;
        case Flag::curve:
            r.value = std::abs(fd.m - 1);
            r.what = "dimension - 1";
            break;
        case Flag::complex:
        case Flag::invariant:
            r.value = o.tn.norm() + o.nt.norm();
            r.what = fl == Flag::complex ? "|k| + |l|" : "|N| + |s|";
            if (fl == Flag::invariant) {
                // phi TM in TM; with xi tangent the normal block s vanishes too, otherwise only N is required
                r.value = o.tn.norm();
                r.what = "|N|";
            }
            break;
        case Flag::lagrangian:
            r.value = o.tt.norm() + o.nn.norm() + std::abs(fd.m - fd.q);
            r.what = "|j| + |m| + |dim - codim|";
            break;
        case Flag::anti_invariant:
            r.value = o.tt.norm();
            r.what = "|P|";
            break;
        case Flag::xi_tangent:
            if (fd.structure.kind != StructureKind::contact) throw ResidualError("xi_tangent needs a contact ambient");
            r.value = fd.norm(q.tt.xiN);
            r.what = "|xi^perp|";
            break;
        case Flag::xi_normal:
            if (fd.structure.kind != StructureKind::contact) throw ResidualError("xi_normal needs a contact ambient");
            r.value = fd.norm(q.tt.xiT);
            r.what = "|xi^T|";
            break;
        case Flag::parallel_H: {
            double s = 0;
            for (const auto& d : q.tt.DperpH) s += fd.inner(d, d);
            r.value = std::sqrt(s) + fd.norm(q.tt.lap_perp_H);
            r.what = "|Dperp H| + |Lap_perp H|";
            break;
        }
        case Flag::cmc: {
            JetVec H = mean_curvature_jets(pg);
            Jet h2 = pg.inner(H, H);
            r.value = fd.norm(q.tt.grad_H2) + std::abs(pg.laplacian_neg(h2).value());
            r.what = "|grad |H|^2| + |Lap |H|^2|";
            break;
        }
        case Flag::phiH_tangent: {
            const Mat& S = fd.structure.kind == StructureKind::contact ? fd.structure.phi : fd.structure.J;
            r.value = fd.norm(fd.normal(S * fd.H));
            r.what = "|(phi H)^perp|";
            break;
        }
        case Flag::phiH_normal: {
            const Mat& S = fd.structure.kind == StructureKind::contact ? fd.structure.phi : fd.structure.J;
            r.value = fd.norm(fd.tangent(S * fd.H));
            r.what = "|(phi H)^T|";
            break;
        }
    }
    r.holds = r.value <= tol;
    return r;
}

// ---------------------------------------------------------------------------
// per-point comparison

struct ModeComparison {
    std::string theorem;
    std::string parent;
    bool applicable = true;
    std::string reason;           // when not applicable
    TheoremEval eval;
    double kappa = 1;
    Vec direct_normal, direct_tangent;  // projected oracle, divided by kappa
    double agree_normal = 0, agree_tangent = 0;          // errata applied
    double printed_normal = 0, printed_tangent = 0;      // as printed
    double coherence = -1;        // corollaries: corrected vs parent corrected (-1 if n/a)
    double coherence_printed = -1;
    struct Discrepancy {
        std::string label;
        std::string erratum;
        Part part;
        double size = 0;
    };
    std::vector<Discrepancy> itemized;  // printed vs corrected differences above tolerance
    double scale = 1;
};

inline bool family_matches(const TheoremSpec& s, const AmbientSpace& amb) {
    if (s.needs == Needs::hermitian && amb.structure_kind() != StructureKind::hermitian) return false;
    if (s.needs == Needs::contact && amb.structure_kind() != StructureKind::contact) return false;
    if (s.ambient_dim && amb.dim() != s.ambient_dim) return false;
    if (s.id == "thm2b" && amb.model().family != CurvatureModel::Family::csf) return false;
    return true;
}

struct ModeInputs {
    Vec tau2f, bif;
};

inline ModeInputs direct_fields(const PointGeometry& pg) { return {f_bitension_direct(pg), bi_f_tension_direct(pg)}; }

inline ModeComparison compare_mode(const TheoremSpec& spec, const PointGeometry& pg, const PointQuantities& q,
                                   const ModeInputs& direct, double tol) {
    ModeComparison mc;
    mc.theorem = spec.id;
    mc.parent = spec.parent;
    const auto& fd = q.fd;
    if (!family_matches(spec, *fd.ambient)) {
        mc.applicable = false;
        mc.reason = "ambient structure or dimension does not match";
        return mc;
    }
    for (Flag fl : spec.hypotheses) {
        auto fc = check_flag(fl, pg, q, tol);
        if (!fc.holds) {
            mc.applicable = false;
            mc.reason = std::string("hypothesis ") + to_string(fl) + " fails: " + fc.what + " = " + std::to_string(fc.value);
            return mc;
        }
    }
    mc.eval = evaluate(spec, q);
    mc.kappa = kappa(spec.family, q.ctx);
    const Vec& D = spec.family == Family::f_biharmonic ? direct.tau2f : direct.bif;
    mc.direct_normal = fd.normal(D) / mc.kappa;
    mc.direct_tangent = fd.tangent(D) / mc.kappa;
    mc.scale = 1 + fd.norm(fd.H) + fd.norm(q.tt.grad_f);
    double sn = spec.normal.scale(q.ctx), st = spec.tangent.scale(q.ctx);
    auto nrm = [&](const Vec& v) { return fd.norm(v) / mc.scale; };
    mc.agree_normal = nrm(mc.direct_normal - sn * mc.eval.normal_corrected);
    mc.agree_tangent = nrm(mc.direct_tangent - st * mc.eval.tangent_corrected);
    mc.printed_normal = nrm(mc.direct_normal - sn * mc.eval.normal_printed);
    mc.printed_tangent = nrm(mc.direct_tangent - st * mc.eval.tangent_printed);
    for (const auto& tv : mc.eval.terms) {
        double d = fd.norm(tv.printed_contrib - tv.corrected_contrib) / mc.scale;
        if (d > tol) mc.itemized.push_back({tv.label, tv.erratum, tv.part, d});
    }
    if (!spec.parent.empty()) {
        const auto& par = find_theorem(spec.parent);
        auto pe = evaluate(par, q);
        mc.coherence = std::max(nrm(sn * mc.eval.normal_corrected - pe.normal_corrected),
                                nrm(st * mc.eval.tangent_corrected - pe.tangent_corrected));
        mc.coherence_printed = std::max(nrm(sn * mc.eval.normal_printed - pe.normal_printed),
                                        nrm(st * mc.eval.tangent_printed - pe.tangent_printed));
    }
    return mc;
}

// ---------------------------------------------------------------------------
// propositions

struct PropSample {
    double B2 = 0, H2 = 0, AH2 = 0, scal = 0, lapf_over_f = 0;
    double alpha = 0, beta = 0, f1 = 0, f2 = 0, f3 = 0;
    double A_gradf = 0;       // |A grad f| with A the shape operator of the unit normal (hypersurfaces)
    double fb_residual = 0;   // |tau2f| / scale
    double b_residual = 0;    // |tau2| / scale
    double H = 0;
    std::map<Flag, bool> flags;
};

inline PropSample prop_sample(const PointGeometry& pg, const PointQuantities& q, double tol) {
    PropSample s;
    const auto& fd = q.fd;
    s.B2 = q.tt.B2;
    s.H2 = q.tt.H2;
    s.H = std::sqrt(s.H2);
    s.AH2 = q.tt.AH2;
    s.scal = q.tt.scal;
    s.lapf_over_f = q.ctx.lapf / q.ctx.f;
    s.alpha = q.ctx.alpha;
    s.beta = q.ctx.beta;
    s.f1 = q.ctx.f1;
    s.f2 = q.ctx.f2;
    s.f3 = q.ctx.f3;
    if (fd.q == 1) s.A_gradf = fd.norm(fd.shape(fd.nu.col(0), q.tt.grad_f));
    double scale = 1 + fd.norm(fd.H) + fd.norm(q.tt.grad_f);
    s.fb_residual = fd.norm(f_bitension_direct(pg)) / scale;
    s.b_residual = fd.norm(bitension_direct(pg)) / scale;
    for (const auto& [fl, name] : flag_names()) {
        (void)name;
        bool ok = false;
        try {
            ok = check_flag(fl, pg, q, tol).holds;
        } catch (const ResidualError&) {
            ok = false;
        }
        s.flags[fl] = ok;
    }
    return s;
}

struct PropResult {
    std::string id;
    std::string statement;
    std::vector<Flag> hypotheses;
    bool hypotheses_hold = false;
    std::string verdict;  // consistent | violated | hypotheses-unverifiable
    std::map<std::string, double> values;
    std::vector<std::string> notes;
};

// ambient data needed by the space-form reductions
struct PropAmbient {
    StructureKind structure = StructureKind::hermitian;
    ContactClass contact = ContactClass::none;
    bool is_csf = false;
    double c = 0;   // parameter as given
    int n = 0;      // complex dimension or (dim-1)/2
    int m = 0, N = 0;
};

inline std::vector<PropResult> proposition_checkers(const PropAmbient& amb, const std::vector<PropSample>& S,
                                                    double tol, bool errata) {
    std::vector<PropResult> out;
    if (S.empty()) return out;
    auto all_flags = [&](const std::vector<Flag>& fl) {
        for (const auto& s : S)
            for (Flag f : fl)
                if (!s.flags.at(f)) return false;
        return true;
    };
    double max_fb = 0, max_b = 0, minH = 1e300, maxH = 0;
    for (const auto& s : S) {
        max_fb = std::max(max_fb, s.fb_residual);
        max_b = std::max(max_b, s.b_residual);
        minH = std::min(minH, s.H);
        maxH = std::max(maxH, s.H);
    }
    bool is_fb = max_fb <= tol;
    bool proper = is_fb && max_b > tol && minH > tol;
    auto base = [&](std::string id, std::string st, std::vector<Flag> hyp) {
        PropResult r;
        r.id = std::move(id);
        r.statement = std::move(st);
        r.hypotheses = std::move(hyp);
        r.hypotheses_hold = all_flags(r.hypotheses);
        r.values["f_biharmonic_max_residual"] = max_fb;
        r.values["biharmonic_max_residual"] = max_b;
        return r;
    };
    auto inf_over = [&](const std::function<double(const PropSample&)>& g) {
        double v = 1e300;
        for (const auto& s : S) v = std::min(v, g(s));
        return v;
    };
    auto max_over = [&](const std::function<double(const PropSample&)>& g) {
        double v = 0;
        for (const auto& s : S) v = std::max(v, std::abs(g(s)));
        return v;
    };
    auto finish_char = [&](PropResult& r, bool characterization_holds) {
        // an if-and-only-if: consistent when both sides agree
        if (!r.hypotheses_hold) {
            r.verdict = "hypotheses-unverifiable";
            return;
        }
        // the characterization is about H != 0; a minimal point is f-biharmonic for any f
        if (minH <= tol) {
            r.notes.push_back("H vanishes at a sample point; the characterization concerns H != 0");
            r.verdict = "hypotheses-unverifiable";
            return;
        }
        r.verdict = (characterization_holds == is_fb) ? "consistent" : "violated";
    };
    auto finish_bound = [&](PropResult& r, double inf, double q) {
        r.values["inf_estimate"] = inf;
        r.values["H2_max"] = maxH * maxH;
        r.notes.push_back("infimum estimated over the sample set, not proved");
        if (!r.hypotheses_hold) {
            r.verdict = "hypotheses-unverifiable";
            return;
        }
        bool ok = true;
        if (inf <= 0 && is_fb) ok = false;
        if (proper && maxH * maxH > inf / q + tol) ok = false;
        r.verdict = ok ? "consistent" : "violated";
    };

    if (amb.structure == StructureKind::hermitian) {
        // Prop propB
        {
            auto r = base("propB", "|B|^2 = 3(alpha+beta) - Lap f/f and A grad f = 0; Scal_M = 3(alpha+beta) + 9H^2 + Lap f/f",
                          {Flag::hypersurface, Flag::cmc});
            if (amb.N != 4) r.hypotheses_hold = false, r.notes.push_back("stated for 3-dimensional hypersurfaces of a 4-dimensional ambient");
            double idB = max_over([](const PropSample& s) { return s.B2 - (3 * (s.alpha + s.beta) - s.lapf_over_f); });
            double idA = max_over([](const PropSample& s) { return s.A_gradf; });
            double idS = max_over([](const PropSample& s) {
                return s.scal - (3 * (s.alpha + s.beta) + 9 * s.H2 + s.lapf_over_f);
            });
            double gauss = max_over([](const PropSample& s) { return s.scal - (6 * (s.alpha + s.beta) - s.B2 + 9 * s.H2); });
            r.values["B2_identity_residual"] = idB;
            r.values["A_gradf_max"] = idA;
            r.values["scal_identity_residual"] = idS;
            r.values["gauss_identity_residual"] = gauss;
            finish_char(r, idB <= tol && idA <= tol);
            out.push_back(r);
        }
        {
            auto r = base("proplag", "0 < |H|^2 <= inf((2 alpha + 3 beta - Lap f/f)/2)",
                          {Flag::lagrangian, Flag::cmc});
            finish_bound(r, inf_over([](const PropSample& s) { return 2 * s.alpha + 3 * s.beta - s.lapf_over_f; }), 2);
            out.push_back(r);
        }
        {
            auto r = base("propcomp", "0 < |H|^2 <= inf((2 alpha - Lap f/f)/2)", {Flag::complex, Flag::cmc});
            finish_bound(r, inf_over([](const PropSample& s) { return 2 * s.alpha - s.lapf_over_f; }), 2);
            out.push_back(r);
        }
        return out;
    }

    const double n = amb.n;
    const double q = amb.m;
    // Prop propscal
    {
        auto r = base("propscal", "|B|^2 = 2n f1 - f2 + 3 f3 - Lap f/f and A grad f = 0",
                      {Flag::hypersurface, Flag::cmc, Flag::xi_tangent});
        double idB = max_over([&](const PropSample& s) { return s.B2 - (2 * n * s.f1 - s.f2 + 3 * s.f3 - s.lapf_over_f); });
        double idA = max_over([](const PropSample& s) { return s.A_gradf; });
        // Gauss equation, printed intermediate and as derived
        double gauss_printed = max_over([&](const PropSample& s) {
            return s.scal - (2 * n * (2 * n - 1) * s.f1 + 2 * (2 * n - 1) * s.f2 - (2 * n - 1) * s.f3 - s.B2 - 2 * n * s.H2);
        });
        double gauss = max_over([&](const PropSample& s) {
            return s.scal - (2 * n * (2 * n - 1) * s.f1 - 2 * (2 * n - 1) * s.f2 + 6 * (n - 1) * s.f3 - s.B2 + 4 * n * n * s.H2);
        });
        // Scal_M formula; the trailing (Lap f/f)H is read as the scalar Lap f/f
        double scal_printed = max_over([&](const PropSample& s) {
            return s.scal - (2 * n * (2 * n - 2) * s.f1 + (4 * n - 1) * s.f2 - (2 * n - 4) * s.f3 + (2 * n - 1) * s.H2 +
                             s.lapf_over_f);
        });
        double scal_corr = max_over([&](const PropSample& s) {
            return s.scal - (2 * n * (2 * n - 2) * s.f1 - (4 * n - 3) * s.f2 + (6 * n - 9) * s.f3 + 4 * n * n * s.H2 +
                             s.lapf_over_f);
        });
        r.values["B2_identity_residual"] = idB;
        r.values["A_gradf_max"] = idA;
        r.values["gauss_identity_residual_printed"] = gauss_printed;
        r.values["gauss_identity_residual"] = gauss;
        r.values["scal_identity_residual_printed"] = scal_printed;
        r.values["scal_identity_residual_corrected"] = scal_corr;
        r.values["scal_identity_residual"] = errata ? scal_corr : scal_printed;
        r.notes.push_back("trailing (Lap f/f)H in the Scal_M formula read as the scalar Lap f/f");
        r.notes.push_back("printed Scal_M formula compared against intrinsic Scal_M; corrected form "
                          "2n(2n-2)f1 - (4n-3)f2 + (6n-9)f3 + 4n^2 H^2 + Lap f/f also reported");
        finish_char(r, idB <= tol && idA <= tol);
        out.push_back(r);
    }
    // non-existence corollary with the three space-form reductions
    {
        auto r = base("nonexistence", "2n f1 - f2 + 3 f3 <= Lap f/f on M rules out f-biharmonic CMC hypersurfaces with xi tangent",
                      {Flag::hypersurface, Flag::cmc, Flag::xi_tangent});
        bool cond = true;
        double worst_reduction = 0;
        for (const auto& s : S) {
            double lhs = 2 * n * s.f1 - s.f2 + 3 * s.f3;
            if (lhs > s.lapf_over_f) cond = false;
            if (amb.contact != ContactClass::none) {
                double bound = 0;
                if (amb.contact == ContactClass::sasaki) bound = 4 / (2 * n + 2) * (s.lapf_over_f - (6 * n - 2) / 4);
                if (amb.contact == ContactClass::kenmotsu) bound = 4 / (2 * n + 2) * (s.lapf_over_f + (6 * n - 2) / 4);
                if (amb.contact == ContactClass::cosymplectic) bound = 4 / (2 * n + 2) * s.lapf_over_f;
                // the reduced inequality c <= bound must be equivalent to lhs <= Lap f/f
                double lhs_from_c = (2 * n + 2) / 4 * (amb.c - bound) + s.lapf_over_f;
                worst_reduction = std::max(worst_reduction, std::abs(lhs_from_c - lhs));
                r.values["c_bound_min"] = r.values.count("c_bound_min") ? std::min(r.values["c_bound_min"], bound) : bound;
            }
        }
        r.values["inequality_holds_everywhere"] = cond ? 1 : 0;
        r.values["space_form_reduction_residual"] = worst_reduction;
        if (cond && std::abs(inf_over([&](const PropSample& s) { return 2 * n * s.f1 - s.f2 + 3 * s.f3 - s.lapf_over_f; })) <= tol)
            r.notes.push_back("boundary case: 2n f1 - f2 + 3 f3 = Lap f/f");
        if (!r.hypotheses_hold)
            r.verdict = "hypotheses-unverifiable";
        else
            r.verdict = (cond && is_fb && minH > tol) ? "violated" : "consistent";
        out.push_back(r);
    }
    auto table_check = [&](PropResult& r, const std::function<double(const PropSample&)>& general,
                           const std::function<double(double, double)>& table) {
        if (amb.contact == ContactClass::none) return;
        double worst = 0;
        for (const auto& s : S) worst = std::max(worst, std::abs(general(s) - table(q, s.lapf_over_f)));
        r.values["table_residual"] = worst;
    };
    {
        auto r = base("thmSKC", "0 < |H|^2 <= (1/q) inf F, F = q f1 - f2 + 3 f3 - Lap f/f",
                      {Flag::cmc, Flag::xi_tangent, Flag::phiH_tangent});
        auto F = [&](const PropSample& s) { return q * s.f1 - s.f2 + 3 * s.f3 - s.lapf_over_f; };
        double cc = amb.c;
        table_check(r, F, [&](double qq, double lf) {
            if (amb.contact == ContactClass::sasaki) return (qq + 2) * cc / 4 + (3 * qq - 2) / 4 - lf;
            if (amb.contact == ContactClass::kenmotsu) return (qq + 2) * cc / 4 - (3 * qq - 2) / 4 - lf;
            return (qq + 2) * cc / 4 - lf;
        });
        finish_bound(r, inf_over(F), q);
        out.push_back(r);
    }
    {
        auto r = base("propG", "0 < |H|^2 <= (1/q) inf G, G = q f1 - f2 - Lap f/f",
                      {Flag::cmc, Flag::xi_tangent, Flag::phiH_normal});
        auto G = [&](const PropSample& s) { return q * s.f1 - s.f2 - s.lapf_over_f; };
        double cc = amb.c;
        table_check(r, G, [&](double qq, double lf) {
            if (amb.contact == ContactClass::sasaki) return (qq - 1) * cc / 4 + (3 * qq + 1) / 4 - lf;
            if (amb.contact == ContactClass::kenmotsu) return (qq - 1) * cc / 4 - (3 * qq + 1) / 4 - lf;
            return (qq - 1) * cc / 4 - lf;
        });
        finish_bound(r, inf_over(G), q);
        out.push_back(r);
    }
    return out;
}

}  // namespace biharm

#endif
