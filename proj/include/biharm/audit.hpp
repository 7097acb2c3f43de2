#ifndef BIHARM_AUDIT_HPP
#define BIHARM_AUDIT_HPP

// Lemma audits: each identity is evaluated as two independently computed sides.
// Left sides come from raw jets along the map (PointGeometry), right sides from
// trace_terms_at / decomposition operators. Where the published form and the derived
// form differ, both deltas are reported with the erratum id.

#include "biharm/residuals.hpp"

namespace biharm {

struct AuditResult {
    std::string name;
    std::string identity;
    bool applicable = true;
    std::string reason;
    double lhs_norm = 0;
    double printed_delta = 0;
    double corrected_delta = 0;
    std::string erratum;  // empty when the printed form is already correct
    std::map<std::string, double> variants;  // alternative readings
    std::string matches;                      // which reading matched, for open questions
    bool pass(double tol) const { return !applicable || corrected_delta <= tol; }
    bool explained(double tol) const { return printed_delta <= tol || !erratum.empty(); }
};

inline const std::vector<Erratum>& audit_errata() {
    static const std::vector<Erratum> list = {
        {"E20", "Lemma lemgene1", "+tr(Rbar(., H).)^T", "-tr(Rbar(., H).)^T", "rough Laplacian of H by raw jets"},
        {"E21", "identity for Delta H in the proof of Thm 3.1", "no curvature term",
         "+tr(Rbar(., H).)^T (vanishes for flat ambients and whenever jlH = 0 in a CSF)",
         "rough Laplacian of H by raw jets"},
        {"E22", "Lemma lemgene2", "grad(Lap f) + 2 Ric_M(grad f) - tr(Rbar(., grad f).)",
         "grad(Lap_neg f) + Ric_M(grad f); no reading of the printed curvature symbol matches",
         "rough Laplacian of grad f by raw jets, ambient and intrinsic variants"},
        {"E23", "proofs of Thm thmSKC and Thm 3.6", "tH for the tangential part of phi H",
         "s and t swapped relative to -nu = Ps nu + Ns nu + st nu + t^2 nu", "decomposition audit"},
    };
    return list;
}

namespace audit_detail {

inline JetVec mean_curvature(const PointGeometry& pg) {
    JetVec H = pg.tension();
    for (auto& h : H) h *= 1.0 / pg.m;
    return H;
}

// intrinsic rough Laplacian of the tangent field G^c d_c (coords of order >= 2), as coords at the point
inline Vec intrinsic_rough_laplacian(const PointGeometry& pg, const JetVec& G) {
    const int m = pg.m;
    int k1 = PointGeometry::order_of(G) - 1;
    // first covariant derivative: DG[b][c] = d_b G^c + Gamma^c_bd G^d
    std::vector<JetVec> DG(m, JetVec(m));
    for (int b = 0; b < m; ++b)
        for (int c = 0; c < m; ++c) {
            Jet s = G[c].derivative(b);
            for (int d = 0; d < m; ++d) s.add_product(pg.gamma_at(c, b, d, k1), G[d].truncated(k1));
            DG[b][c] = s;
        }
    Vec r = Vec::Zero(m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            double gab = pg.ginv[a * m + b].value();
            for (int c = 0; c < m; ++c) {
                double v = DG[b][c].d(a);
                for (int e = 0; e < m; ++e) v -= pg.gamma[(e * m + a) * m + b].value() * DG[e][c].value();
                for (int d = 0; d < m; ++d) v += pg.gamma[(c * m + a) * m + d].value() * DG[b][d].value();
                r[c] += gab * v;
            }
        }
    return r;
}

inline Vec push_value(const PointGeometry& pg, const Vec& coords) {
    Vec r = Vec::Zero(pg.N);
    for (int a = 0; a < pg.m; ++a) r += coords[a] * jet_values(pg.dpsi[a]);
    return r;
}

}  // namespace audit_detail

// ---- Delta H expansion (positive rough Laplacian)
inline AuditResult audit_deltaH_expansion(const PointGeometry& pg, const FundamentalData& fd, const TraceTerms& t) {
    AuditResult r;
    r.name = "deltaH";
    r.identity = "Lap H = p/2 grad|H|^2 + tr B(., A_H .) + 2 tr A_{Dperp H} + Lap_perp H";
    detail::require_connection(pg, "audit_deltaH_expansion");
    Vec lhs = -jet_values(pg.rough_laplacian(audit_detail::mean_curvature(pg)));
    Vec printed = fd.m / 2.0 * t.grad_H2 + t.trB_AH + 2 * t.trA_DperpH + t.lap_perp_H;
    Vec curv = fd.tangent(fd.curvature_trace(fd.H, CurvatureBackend::concrete));
    r.lhs_norm = fd.norm(lhs);
    r.printed_delta = fd.norm(lhs - printed);
    r.corrected_delta = fd.norm(lhs - printed - curv);
    r.erratum = "E21";
    return r;
}

// ---- lemgene1: trace rough Laplacian of H
inline AuditResult audit_lemgene1(const PointGeometry& pg, const FundamentalData& fd, const TraceTerms& t) {
    AuditResult r;
    r.name = "lemgene1";
    r.identity = "sum D_ei D_ei H = -(n/2) grad|H|^2 - tr B(., A_H .) - 2 tr A_{Dperp H} - Lap_perp H + tr(Rbar(., H).)^T";
    detail::require_connection(pg, "audit_lemgene1");
    Vec lhs = jet_values(pg.rough_laplacian(audit_detail::mean_curvature(pg)));
    Vec base = -fd.m / 2.0 * t.grad_H2 - t.trB_AH - 2 * t.trA_DperpH - t.lap_perp_H;
    Vec curv = fd.tangent(fd.curvature_trace(fd.H, CurvatureBackend::concrete));
    r.lhs_norm = fd.norm(lhs);
    r.printed_delta = fd.norm(lhs - (base + curv));
    r.corrected_delta = fd.norm(lhs - (base - curv));
    r.erratum = "E20";
    return r;
}

// ---- lemgene2: rough Laplacian of grad f, ambient and intrinsic readings
inline AuditResult audit_lemgene2(const PointGeometry& pg, const FundamentalData& fd, const TraceTerms& t) {
    AuditResult r;
    r.name = "lemgene2";
    r.identity = "sum D_ei D_ei grad f = grad(Lap f) + 2 Ric_M(grad f) - tr(Rbar(., grad f).) + tr B(., nabla grad f) "
                 "+ tr Dperp B(., grad f) - tr A_{B(., grad f)}";
    detail::require_connection(pg, "audit_lemgene2");
    JetVec Gc = pg.gradient_coords(pg.f);
    Vec lhs = jet_values(pg.rough_laplacian(pg.push(Gc)));
    Vec ext = t.trB_Dgradf + t.trDB_gradf - t.trA_Bgradf;
    Vec grad_lap_neg = -t.grad_lap_f;
    Vec ambient_tr = fd.curvature_trace(t.grad_f, CurvatureBackend::concrete);
    Vec intrinsic_tr = -t.ric_grad_f;  // sum_i R_M(e_i, X) e_i = -Ric_M(X)
    auto d = [&](const Vec& rhs) { return fd.norm(lhs - rhs); };
    r.lhs_norm = fd.norm(lhs);
    for (int sgn : {-1, 1}) {
        std::string lap = sgn < 0 ? "Lap_neg" : "Lap_pos";
        Vec gl = sgn < 0 ? grad_lap_neg : Vec(t.grad_lap_f);
        r.variants["ambient/" + lap] = d(gl + 2 * t.ric_grad_f - ambient_tr + ext);
        r.variants["ambient-tangent/" + lap] = d(gl + 2 * t.ric_grad_f - fd.tangent(ambient_tr) + ext);
        r.variants["intrinsic/" + lap] = d(gl + 2 * t.ric_grad_f - intrinsic_tr + ext);
    }
    r.printed_delta = r.variants["ambient/Lap_pos"];
    for (const auto& [k, v] : r.variants) r.printed_delta = std::min(r.printed_delta, v);
    r.corrected_delta = d(grad_lap_neg + t.ric_grad_f + ext);
    r.variants["derived: grad(Lap_neg f) + Ric_M(grad f)"] = r.corrected_delta;
    r.erratum = "E22";
    return r;
}

// inner intrinsic identity of lemgene2: sum nabla_ei nabla_ei grad f = grad(Lap f) + 2 Ric - tr R_M(., grad f).
inline AuditResult audit_lemgene2_intrinsic(const PointGeometry& pg, const FundamentalData& fd, const TraceTerms& t) {
    AuditResult r;
    r.name = "lemgene2-intrinsic";
    r.identity = "sum nabla_ei nabla_ei grad f = grad(Lap f) + 2 Ric_M(grad f) - tr(R(., grad f).)";
    Vec lhs = audit_detail::push_value(pg, audit_detail::intrinsic_rough_laplacian(pg, pg.gradient_coords(pg.f)));
    Vec intrinsic_tr = -t.ric_grad_f;
    Vec ambient_tr = pg.Rbar ? fd.tangent(fd.curvature_trace(t.grad_f, CurvatureBackend::concrete)) : Vec(Vec::Zero(fd.N));
    auto d = [&](const Vec& rhs) { return fd.norm(lhs - rhs); };
    r.lhs_norm = fd.norm(lhs);
    r.variants["intrinsic/Lap_neg"] = d(-t.grad_lap_f + 2 * t.ric_grad_f - intrinsic_tr);
    r.variants["intrinsic/Lap_pos"] = d(t.grad_lap_f + 2 * t.ric_grad_f - intrinsic_tr);
    if (pg.Rbar) {
        r.variants["ambient/Lap_neg"] = d(-t.grad_lap_f + 2 * t.ric_grad_f - ambient_tr);
        r.variants["ambient/Lap_pos"] = d(t.grad_lap_f + 2 * t.ric_grad_f - ambient_tr);
    }
    r.printed_delta = 1e300;
    for (const auto& [k, v] : r.variants) r.printed_delta = std::min(r.printed_delta, v);
    r.corrected_delta = d(-t.grad_lap_f + t.ric_grad_f);
    r.variants["derived: grad(Lap_neg f) + Ric_M(grad f)"] = r.corrected_delta;
    r.erratum = "E22";
    return r;
}

// picks the reading(s) that match within tol
inline std::string matching_readings(const AuditResult& r, double tol) {
    std::string s;
    for (const auto& [k, v] : r.variants)
        if (v <= tol) s += (s.empty() ? "" : ", ") + k;
    return s.empty() ? "none" : s;
}

// ---- lemgene3: D_{grad f} (m f H + grad f)
inline AuditResult audit_lemgene3(const PointGeometry& pg, const FundamentalData& fd, const TraceTerms& t) {
    AuditResult r;
    r.name = "lemgene3";
    r.identity = "D_{grad f} tau_f = n|grad f|^2 H - n f A_H grad f + n f Dperp_{grad f} H + 1/2 grad|grad f|^2 + B(grad f, grad f)";
    detail::require_connection(pg, "audit_lemgene3");
    Vec lhs = detail::along_grad_f(pg, f_tension_jets(pg));
    double n = fd.m, f = fd.f, g2 = fd.inner(t.grad_f, t.grad_f);
    Vec rhs = n * g2 * fd.H - n * f * t.AH_gradf + n * f * t.Dperp_gradf_H + 0.5 * t.grad_gradf2 + t.B_gradf_gradf;
    r.lhs_norm = fd.norm(lhs);
    r.printed_delta = r.corrected_delta = fd.norm(lhs - rhs);
    return r;
}

// ---- curvature-trace lemmas inside the bi-f proofs, model traces as the independent side
inline std::vector<AuditResult> audit_trace_lemmas(const PointQuantities& q) {
    std::vector<AuditResult> out;
    const auto& fd = q.fd;
    const auto& c = q.ctx;
    const Vec& g = q.tt.grad_f;
    Vec trH = fd.curvature_trace(fd.H, CurvatureBackend::model);
    Vec trG = fd.curvature_trace(g, CurvatureBackend::model);
    auto mk = [&](std::string name, std::string id, const Vec& lhs, const Vec& printed, const Vec& corr, std::string err) {
        AuditResult r;
        r.name = std::move(name);
        r.identity = std::move(id);
        r.lhs_norm = fd.norm(lhs);
        r.printed_delta = fd.norm(lhs - printed);
        r.corrected_delta = fd.norm(lhs - corr);
        r.erratum = std::move(err);
        out.push_back(r);
    };
    if (fd.structure.kind == StructureKind::hermitian) {
        Vec a = -c.m * c.alpha * fd.H + 3 * c.beta * q.at("klH") + 3 * c.beta * q.at("jlH");
        mk("gcsf-trace-H", "tr Rbar(., H). = -n alpha H + 3 beta (jlH + klH)", trH, a, a, "");
        Vec tp = -(c.m - 1) * c.alpha * g + 3 * c.beta * q.at("j2g");
        mk("gcsf-trace-gradf-T", "tr(Rbar(., grad f).)^T = -(n-1) alpha grad f + 3 beta j^2 grad f", fd.tangent(trG), tp, tp, "");
        Vec np = 3 * c.beta * q.at("kjg");
        mk("gcsf-trace-gradf-N", "tr(Rbar(., grad f).)^perp = 3 beta kj grad f", fd.normal(trG), np, np, "");
    } else {
        Vec t0 = c.f2 * (c.m - 1) * c.etaH * q.at("xiT") + 3 * c.f3 * q.at("PsH");
        mk("eq3b0", "tr(Rbar(., H).)^T = f2 (n-1) eta(H) xi^T + 3 f3 PsH", fd.tangent(trH), t0, t0, "");
        Vec t1 = -c.f1 * c.m * fd.H + c.f2 * (c.xiT2 * fd.H + c.m * c.etaH * q.at("xiN")) + 3 * c.f3 * q.at("NsH");
        mk("eq3b1", "tr(Rbar(., H).)^perp = -f1 n H + f2 (|xi^T|^2 H + n eta(H) xi^perp) + 3 f3 NsH", fd.normal(trH), t1, t1, "");
        Vec base = -(c.m - 1) * c.f1 * g + c.f2 * (c.xiT2 * g + (c.m - 2) * c.etag * q.at("xiT"));
        mk("lem3b2-T", "tr(Rbar(., grad f).)^T = -(n-1) f1 grad f + f2 (|xi^T|^2 grad f + (n-2) eta(grad f) xi^T) + f3 P^2 grad f",
           fd.tangent(trG), base + c.f3 * q.at("P2g"), base + 3 * c.f3 * q.at("P2g"), "E15");
        Vec nb = c.f2 * (c.m - 1) * c.etag * q.at("xiN");
        mk("lem3b2-N", "tr(Rbar(., grad f).)^perp = f2 (n-1) eta(grad f) xi^perp + 3 NP grad f", fd.normal(trG),
           nb + 3 * q.at("NPg"), nb + 3 * c.f3 * q.at("NPg"), "E12");
    }
    return out;
}

// ---- decomposition identities
inline std::vector<AuditResult> audit_phi_decompositions(const PointGeometry& pg, const PointQuantities& q, double tol) {
    std::vector<AuditResult> out;
    const auto& fd = q.fd;
    const auto& o = q.ops;
    auto flag = [&](Flag f) { return check_flag(f, pg, q, tol); };
    if (fd.structure.kind == StructureKind::hermitian) {
        // (2.7): g(kX, xi) = -g(X, l xi) for X tangent, xi normal
        AuditResult r;
        r.name = "adjoint-k-l";
        r.identity = "g(kX, xi) = -g(X, l xi)";
        double worst = 0;
        for (int i = 0; i < fd.m; ++i)
            for (int a = 0; a < fd.q; ++a)
                worst = std::max(worst, std::abs(fd.inner(o.k(fd.e.col(i)), fd.nu.col(a)) + fd.inner(fd.e.col(i), o.l(fd.nu.col(a)))));
        r.printed_delta = r.corrected_delta = worst;
        out.push_back(r);
        return out;
    }
    {
        AuditResult r;
        r.name = "trace-P";
        r.identity = "tr(P) = 0";
        r.printed_delta = r.corrected_delta = std::abs(o.tt.trace());
        out.push_back(r);
    }
    {
        AuditResult r;
        r.name = "adjoint-N-s";
        r.identity = "g(NX, nu) = -g(X, s nu)";
        double worst = 0;
        for (int i = 0; i < fd.m; ++i)
            for (int a = 0; a < fd.q; ++a)
                worst = std::max(worst, std::abs(fd.inner(o.k(fd.e.col(i)), fd.nu.col(a)) + fd.inner(fd.e.col(i), o.l(fd.nu.col(a)))));
        r.printed_delta = r.corrected_delta = worst;
        out.push_back(r);
    }
    {
        AuditResult r;
        r.name = "minusnu";
        r.identity = "-nu = Ps nu + Ns nu + st nu + t^2 nu (xi tangent)";
        auto fc = flag(Flag::xi_tangent);
        if (!fc.holds) {
            r.applicable = false;
            r.reason = "needs xi tangent: " + fc.what + " = " + std::to_string(fc.value);
        } else {
            double worst = 0;
            for (int a = 0; a < fd.q; ++a) {
                Vec nu = fd.nu.col(a);
                Vec rhs = o.j(o.l(nu)) + o.k(o.l(nu)) + o.l(o.mm(nu)) + o.mm(o.mm(nu));
                worst = std::max(worst, fd.norm(rhs + nu));
            }
            r.printed_delta = r.corrected_delta = worst;
        }
        out.push_back(r);
    }
    {
        AuditResult r;
        r.name = "thmSKC-PtH-NtH";
        r.identity = "PtH = 0 and NtH = -H (xi tangent, phi H tangent)";
        auto f1 = flag(Flag::xi_tangent), f2 = flag(Flag::phiH_tangent);
        if (!f1.holds || !f2.holds) {
            r.applicable = false;
            r.reason = "needs xi tangent and phi H tangent";
        } else {
            const Vec& H = fd.H;
            // literal reading: t = normal part of phi on normals
            r.printed_delta = fd.norm(o.j(o.mm(H))) + fd.norm(o.k(o.mm(H)) + H);
            // swapped reading: the tangential part s
            r.corrected_delta = fd.norm(o.j(o.l(H))) + fd.norm(o.k(o.l(H)) + H);
            r.erratum = "E23";
        }
        out.push_back(r);
    }
    {
        AuditResult r;
        r.name = "thm3.6-H-Ne";
        r.identity = "g(H, N e_i) = -g(tH, e_i)";
        const Vec& H = fd.H;
        double lit = 0, sw = 0;
        for (int i = 0; i < fd.m; ++i) {
            Vec ei = fd.e.col(i);
            double lhs = fd.inner(H, o.k(ei));
            lit = std::max(lit, std::abs(lhs + fd.inner(o.mm(H), ei)));
            sw = std::max(sw, std::abs(lhs + fd.inner(o.l(H), ei)));
        }
        r.printed_delta = lit;
        r.corrected_delta = sw;
        r.erratum = "E23";
        out.push_back(r);
    }
    return out;
}

// decomposition identities for j, k, l, m (Hermitian) or P, N, s, t (contact), each as a max
// deviation over the tangent frame X = e_i and normal frame nu_a
inline std::vector<std::pair<std::string, double>> operator_identities(const PointQuantities& q) {
    const auto& fd = q.fd;
    const auto& o = q.ops;
    std::vector<std::pair<std::string, double>> out;
    auto put = [&](const std::string& k, double v) {
        for (auto& [n, d] : out)
            if (n == k) {
                d = std::max(d, v);
                return;
            }
        out.push_back({k, v});
    };
    const bool contact = fd.structure.kind == StructureKind::contact;
    Vec xiT = contact ? q.tt.xiT : Vec::Zero(fd.N), xiN = contact ? q.tt.xiN : Vec::Zero(fd.N);
    const char* names[5] = {"j^2 X + l k X = -X", "m^2 nu + k l nu = -nu", "j l nu + l m nu = 0", "k j X + m k X = 0",
                            "g(k X, nu) = -g(X, l nu)"};
    if (contact) {
        names[0] = "P^2 X + t N X = -X + eta(X) xi^T";
        names[1] = "N s nu + t^2 nu = -nu + eta(nu) xi^perp";
        names[2] = "P s nu + s t nu = eta(nu) xi^T";
        names[3] = "N P X + t N X = eta(X) xi^perp";
        names[4] = "g(N X, nu) = -g(X, s nu)";
    }
    for (int i = 0; i < fd.m; ++i) {
        Vec X = fd.e.col(i);
        double eX = contact ? fd.structure.eta.dot(X) : 0;
        put(names[0], fd.norm(o.j(o.j(X)) + o.l(o.k(X)) + X - eX * xiT));
        put(names[3], fd.norm(o.k(o.j(X)) + o.mm(o.k(X)) - eX * xiN));
        for (int a = 0; a < fd.q; ++a) {
            Vec n = fd.nu.col(a);
            put(names[4], std::abs(fd.inner(o.k(X), n) + fd.inner(X, o.l(n))));
        }
    }
    for (int a = 0; a < fd.q; ++a) {
        Vec n = fd.nu.col(a);
        double en = contact ? fd.structure.eta.dot(n) : 0;
        put(names[1], fd.norm(o.mm(o.mm(n)) + o.k(o.l(n)) + n - en * xiN));
        put(names[2], fd.norm(o.j(o.l(n)) + o.l(o.mm(n)) - en * xiT));
    }
    if (contact) {
        put("phi xi = 0, tangent part", fd.norm(o.j(xiT) + o.l(xiN)));
        put("phi xi = 0, normal part", fd.norm(o.k(xiT) + o.mm(xiN)));
        put("tr P = 0", std::abs(o.tt.trace()));
    }
    return out;
}

// all audits at one point
inline std::vector<AuditResult> run_audits(const PointGeometry& pg, const PointQuantities& q, double tol) {
    std::vector<AuditResult> out;
    const auto& fd = q.fd;
    const auto& t = q.tt;
    if (pg.has_connection) {
        out.push_back(audit_deltaH_expansion(pg, fd, t));
        out.push_back(audit_lemgene1(pg, fd, t));
        out.push_back(audit_lemgene2(pg, fd, t));
        out.push_back(audit_lemgene3(pg, fd, t));
    }
    out.push_back(audit_lemgene2_intrinsic(pg, fd, t));
    for (auto& r : audit_trace_lemmas(q)) out.push_back(r);
    for (auto& r : audit_phi_decompositions(pg, q, tol)) out.push_back(r);
    for (auto& r : out)
        if (!r.variants.empty()) r.matches = matching_readings(r, tol);
    return out;
}

}  // namespace biharm

#endif
