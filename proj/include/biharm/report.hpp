#ifndef BIHARM_REPORT_HPP
#define BIHARM_REPORT_HPP

// Commands behind the CLI and the JSON run report.
// Per-point work may run on several threads; results are stored by sample index and
// assembled in sample order, so the report does not depend on scheduling.

#include <chrono>
#include <json.hpp>

#include "biharm/audit.hpp"
#include "biharm/scenario.hpp"

namespace biharm {

inline constexpr const char* kToolVersion = "1.0.0";

using json = nlohmann::ordered_json;

// command cannot run on this scenario (exit code 3)
struct IncompatibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunOptions {
    std::string mode;            // empty: scenario's mode
    int errata = -1;             // -1: scenario's setting
    double tol = -1;             // overrides the residual/agreement/identity/audit tolerances
    std::uint64_t seed = 0;      // 0: scenario's seed
    bool has_seed = false;
    std::string sweep_of = "check";
    int threads = 0;
};

struct CommandResult {
    json body;
    bool pass = true;
    std::vector<std::string> csv_header;
    std::vector<std::vector<std::string>> csv_rows;
    std::vector<std::string> summary;  // human lines
};

namespace rep_detail {

inline json vec(const Vec& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

inline std::string num(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.17g", v);
    return b;
}

inline std::string sci(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3e", v);
    return b;
}

template <class R>
std::vector<R> parallel_map(size_t n, int threads, const std::function<R(size_t)>& fn) {
    std::vector<R> out(n);
    if (threads <= 0) threads = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    threads = static_cast<int>(std::max<size_t>(1, std::min<size_t>(threads, n)));
    std::vector<std::exception_ptr> errs(threads);
    auto work = [&](int tid) {
        try {
            for (size_t i = tid; i < n; i += threads) out[i] = fn(i);
        } catch (...) {
            errs[tid] = std::current_exception();
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
    return out;
}

inline const char* tri_name(Tri t) {
    return t == Tri::asserted ? "true" : t == Tri::denied ? "false" : "unknown";
}

}  // namespace rep_detail

// effective settings after command-line overrides
struct Settings {
    std::string mode;
    bool errata = true;
    Tolerances tol;
};

inline Settings settings_for(const Scenario& sc, const RunOptions& o) {
    Settings s;
    s.mode = o.mode.empty() ? sc.mode : o.mode;
    s.errata = o.errata < 0 ? sc.errata : o.errata == 1;
    s.tol = sc.tol;
    if (o.tol > 0) {
        s.tol.residual = s.tol.agreement = s.tol.identity = s.tol.audit = o.tol;
    }
    bool ok = s.mode == "direct" || s.mode == "theorem" || s.mode == "both";
    for (const auto& t : theorem_catalog()) ok = ok || t.id == s.mode;
    if (!ok) throw IncompatibleError("unknown mode '" + s.mode + "'");
    return s;
}

inline json errata_state(bool on) {
    json j;
    j["applied"] = on;
    json ids = json::array();
    for (const auto& e : errata_list()) ids.push_back(e.id);
    for (const auto& e : audit_errata()) ids.push_back(e.id);
    j["ids"] = ids;
    json open = json::array();
    open.push_back("E06: f factor on 3n Dperp_{grad f} H, adjudicated by the oracle");
    open.push_back("propscal: trailing (Lap f/f)H read as the scalar Lap f/f");
    j["open_questions"] = open;
    return j;
}

inline json sign_ledger() {
    json j;
    j["direct_mode"] = "rough Laplacian tr(nabla^2) (negative convention); curvature trace sum Rbar(e_i, X) e_i";
    j["theorem_mode"] = "positive Laplacians: Lap_perp = -tr(nabla_perp)^2, Lap f = -tr Hess f";
    j["f_biharmonic_comparison"] = "normal/tangent of tau_{2,f} divided by (-m f)";
    j["bi_f_comparison"] = "normal/tangent of tau^2_f divided by 1";
    j["normalization"] = "residual norms divided by (1 + |H| + |grad f|)";
    j["variation_signs"] = {{"E", -1}, {"Ef", -1}, {"E2", 1}, {"E2f", 1}, {"Ef2", -2}};
    return j;
}

// ---------------------------------------------------------------------------
// check

inline CommandResult run_check(const Scenario& sc, const RunOptions& o) {
    using namespace rep_detail;
    Settings st = settings_for(sc, o);
    const AmbientSpace& amb = *sc.imm.ambient;
    if (!amb.concrete())
        throw IncompatibleError("check needs a concrete ambient: " + amb.label() +
                                " is a curvature model only (use audit for the curvature-trace identities)");
    const bool want_direct = st.mode != "theorem";
    const bool want_theorems = st.mode != "direct";
    std::vector<const TheoremSpec*> specs;
    if (want_theorems) {
        for (const auto& t : theorem_catalog()) {
            bool take = true;
            if (st.mode != "theorem" && st.mode != "both") {
                // a single theorem or corollary plus its parent
                const auto& sel = find_theorem(st.mode);
                take = t.id == sel.id || t.id == sel.parent;
            }
            if (take && family_matches(t, amb)) specs.push_back(&t);
        }
        if (specs.empty()) throw IncompatibleError("no theorem of mode '" + st.mode + "' applies to " + amb.label());
    }
    const bool agreement = st.mode != "theorem";

    struct PointOut {
        json j;
        double tau2 = 0, tau2f = 0, bif = 0, tau = 0, scale = 1;
        std::map<std::string, std::array<double, 4>> th;  // agree, coherence, bookkeeping, applicable
        std::vector<std::string> csv;
    };
    auto one = [&](size_t i) -> PointOut {
        PointOut po;
        const Vec& p = sc.samples[i];
        PointGeometry pg(sc.imm, p);
        auto fd = fundamental_data_at(sc.imm, pg);
        auto q = point_quantities(pg, fd);
        po.scale = 1 + fd.norm(fd.H) + fd.norm(q.tt.grad_f);
        po.j["point"] = vec(p);
        po.j["scale"] = po.scale;
        ModeInputs d = direct_fields(pg);
        Vec t2 = bitension_direct(pg);
        po.tau = fd.norm(tension(pg));
        po.tau2 = fd.norm(t2) / po.scale;
        po.tau2f = fd.norm(d.tau2f) / po.scale;
        po.bif = fd.norm(d.bif) / po.scale;
        if (want_direct) {
            auto field = [&](const Vec& v) {
                json f;
                Vec n = fd.normal(v), t = fd.tangent(v);
                f["normal"] = vec(n);
                f["normal_norm"] = fd.norm(n) / po.scale;
                f["tangent"] = vec(t);
                f["tangent_norm"] = fd.norm(t) / po.scale;
                f["pass"] = fd.norm(v) / po.scale <= st.tol.residual;
                return f;
            };
            json dj;
            dj["tension_norm"] = po.tau;
            dj["bitension"] = field(t2);
            dj["f_bitension"] = field(d.tau2f);
            dj["bi_f_tension"] = field(d.bif);
            po.j["direct"] = dj;
        }
        po.csv = {std::to_string(i), num(po.tau), num(po.tau2), num(po.tau2f), num(po.bif)};
        if (want_theorems) {
            json arr = json::array();
            double worst_agree = 0;
            for (const auto* spec : specs) {
                auto mc = compare_mode(*spec, pg, q, d, st.tol.flag);
                json tj;
                tj["id"] = spec->id;
                tj["applicable"] = mc.applicable;
                if (!mc.applicable) {
                    tj["reason"] = mc.reason;
                    arr.push_back(tj);
                    po.th[spec->id] = {0, 0, 0, 0};
                    continue;
                }
                Vec nr = mc.eval.normal(st.errata), tr = mc.eval.tangent(st.errata);
                tj["normal"] = vec(nr);
                tj["normal_norm"] = fd.norm(nr) / po.scale;
                tj["tangent"] = vec(tr);
                tj["tangent_norm"] = fd.norm(tr) / po.scale;
                json terms = json::array();
                Vec sn = Vec::Zero(fd.N), stt = Vec::Zero(fd.N);
                for (const auto& tv : mc.eval.terms) {
                    json x;
                    x["label"] = tv.label;
                    x["part"] = tv.part == Part::normal ? "normal" : "tangent";
                    double cf = st.errata ? tv.corrected : tv.printed;
                    const Vec& c = st.errata ? tv.corrected_contrib : tv.printed_contrib;
                    x["coefficient"] = cf;
                    if (!tv.erratum.empty()) x["erratum"] = tv.erratum;
                    x["value"] = vec(c);
                    x["norm"] = fd.norm(c) / po.scale;
                    (tv.part == Part::normal ? sn : stt) += c;
                    terms.push_back(x);
                }
                tj["terms"] = terms;
                double book = std::max(fd.norm(sn - nr), fd.norm(stt - tr));
                tj["breakdown_residual"] = book;
                double agree = 0;
                if (agreement) {
                    double an = st.errata ? mc.agree_normal : mc.printed_normal;
                    double at = st.errata ? mc.agree_tangent : mc.printed_tangent;
                    agree = std::max(an, at);
                    tj["kappa"] = mc.kappa;
                    tj["agreement_normal"] = an;
                    tj["agreement_tangent"] = at;
                    tj["agreement_as_printed"] = std::max(mc.printed_normal, mc.printed_tangent);
                    tj["agreement_corrected"] = std::max(mc.agree_normal, mc.agree_tangent);
                    json it = json::array();
                    for (const auto& dsc : mc.itemized)
                        it.push_back({{"term", dsc.label},
                                      {"part", dsc.part == Part::normal ? "normal" : "tangent"},
                                      {"erratum", dsc.erratum},
                                      {"size", dsc.size}});
                    tj["itemized"] = it;
                    tj["pass"] = agree <= st.tol.agreement;
                }
                double coh = -1;
                if (!spec->parent.empty()) {
                    coh = st.errata ? mc.coherence : mc.coherence_printed;
                    tj["parent"] = spec->parent;
                    tj["coherence"] = coh;
                    tj["coherence_as_printed"] = mc.coherence_printed;
                }
                po.th[spec->id] = {agree, coh, book, 1};
                worst_agree = std::max(worst_agree, agree);
                arr.push_back(tj);
            }
            po.j["theorems"] = arr;
            po.csv.push_back(num(worst_agree));
        }
        return po;
    };
    auto pts = parallel_map<PointOut>(sc.samples.size(), o.threads, one);

    CommandResult r;
    r.csv_header = {"sample", "tension", "bitension", "f_bitension", "bi_f_tension"};
    if (want_theorems) r.csv_header.push_back("max_agreement");
    json points = json::array();
    double m_t2 = 0, m_t2f = 0, m_bif = 0, m_tau = 0;
    std::map<std::string, std::array<double, 5>> agg;  // max agree, max coherence, max bookkeeping, count applicable, points
    for (size_t i = 0; i < pts.size(); ++i) {
        auto& po = pts[i];
        m_t2 = std::max(m_t2, po.tau2);
        m_t2f = std::max(m_t2f, po.tau2f);
        m_bif = std::max(m_bif, po.bif);
        m_tau = std::max(m_tau, po.tau);
        for (const auto& [id, v] : po.th) {
            auto& a = agg[id];
            a[4] += 1;
            if (v[3] == 0) continue;
            a[0] = std::max(a[0], v[0]);
            a[1] = std::max(a[1], v[1]);
            a[2] = std::max(a[2], v[2]);
            a[3] += 1;
        }
        points.push_back(std::move(po.j));
        // sample index, coordinates
        std::vector<std::string> row = po.csv;
        for (int a = 0; a < sc.samples[i].size(); ++a) row.push_back(num(sc.samples[i][a]));
        r.csv_rows.push_back(row);
    }
    for (const auto& p : sc.params) r.csv_header.push_back(p);

    json agg_j;
    agg_j["max_tension"] = m_tau;
    agg_j["max_bitension"] = m_t2;
    agg_j["max_f_bitension"] = m_t2f;
    agg_j["max_bi_f_tension"] = m_bif;
    std::vector<std::string> classes;
    if (m_tau <= st.tol.residual) classes.push_back("harmonic");
    if (m_t2 <= st.tol.residual) classes.push_back("biharmonic");
    if (m_t2f <= st.tol.residual) classes.push_back("f-biharmonic");
    if (m_bif <= st.tol.residual) classes.push_back("bi-f-harmonic");
    std::string verdict;
    for (const auto& c : classes) verdict += (verdict.empty() ? "" : ", ") + c;
    verdict = verdict.empty() ? "none of harmonic, biharmonic, f-biharmonic, bi-f-harmonic (within tol)"
                              : verdict + " (within tol)";
    agg_j["verdict"] = verdict;

    bool pass = true;
    json th_j = json::array();
    for (const auto* spec : specs) {
        const auto& a = agg[spec->id];
        json x;
        x["id"] = spec->id;
        x["title"] = spec->title;
        x["applicable_points"] = static_cast<int>(a[3]);
        x["points"] = static_cast<int>(a[4]);
        if (a[3] > 0) {
            if (agreement) {
                x["max_agreement"] = a[0];
                bool ok = a[0] <= st.tol.agreement;
                x["agreement_pass"] = ok;
                pass = pass && ok;
            }
            if (!spec->parent.empty()) {
                x["max_coherence"] = a[1];
                bool ok = a[1] <= st.tol.coherence;
                x["coherence_pass"] = ok;
                pass = pass && ok;
            }
            x["max_breakdown_residual"] = a[2];
            pass = pass && a[2] <= 1e-12 * std::max(1.0, a[0]);
        }
        th_j.push_back(x);
        if (a[3] > 0)
            r.summary.push_back("  " + spec->id + ": " + std::to_string(static_cast<int>(a[3])) + "/" +
                                std::to_string(static_cast<int>(a[4])) + " points" +
                                (agreement ? ", max agreement " + sci(a[0]) : "") +
                                (!spec->parent.empty() ? ", coherence " + sci(a[1]) : ""));
        else
            r.summary.push_back("  " + spec->id + ": not applicable");
    }
    if (want_theorems) agg_j["theorems"] = th_j;

    // expectations
    json ex = json::object();
    auto expect_tri = [&](const char* name, Tri t, double v) {
        if (t == Tri::unknown) return;
        bool ok = t == Tri::asserted ? v <= st.tol.residual : v > st.tol.residual;
        ex[name] = {{"expected", t == Tri::asserted}, {"max_residual", v}, {"pass", ok}};
        pass = pass && ok;
    };
    expect_tri("biharmonic", sc.expect.biharmonic, m_t2);
    expect_tri("f_biharmonic", sc.expect.f_biharmonic, m_t2f);
    expect_tri("bi_f_harmonic", sc.expect.bi_f_harmonic, m_bif);
    if (sc.expect.min_biharmonic_residual >= 0) {
        bool ok = m_t2 >= sc.expect.min_biharmonic_residual;
        ex["min_biharmonic_residual"] = {{"expected", sc.expect.min_biharmonic_residual}, {"max_residual", m_t2}, {"pass", ok}};
        pass = pass && ok;
    }
    agg_j["expectations"] = ex;

    r.body["mode"] = st.mode;
    r.body["aggregate"] = agg_j;
    r.body["points"] = points;
    r.pass = pass;
    r.summary.insert(r.summary.begin(), "max |tau2| " + sci(m_t2) + "  |tau2f| " + sci(m_t2f) + "  |bif| " + sci(m_bif) +
                                            "  -> " + verdict);
    return r;
}

// ---------------------------------------------------------------------------
// audit

inline CommandResult run_audit(const Scenario& sc, const RunOptions& o) {
    using namespace rep_detail;
    Settings st = settings_for(sc, o);
    auto per = parallel_map<std::vector<AuditResult>>(sc.samples.size(), o.threads, [&](size_t i) {
        PointGeometry pg(sc.imm, sc.samples[i]);
        auto fd = fundamental_data_at(sc.imm, pg);
        auto q = point_quantities(pg, fd);
        return run_audits(pg, q, st.tol.audit);
    });
    struct Agg {
        std::string identity, erratum;
        int applicable = 0, points = 0;
        double printed = 0, corrected = 0, lhs = 0;
        std::map<std::string, double> variants;
        std::string reason;
        std::map<std::string, int> matches;
    };
    std::vector<std::string> order;
    std::map<std::string, Agg> agg;
    CommandResult r;
    r.csv_header = {"sample", "audit", "printed_delta", "corrected_delta"};
    for (size_t i = 0; i < per.size(); ++i) {
        for (const auto& a : per[i]) {
            if (!agg.count(a.name)) order.push_back(a.name);
            auto& g = agg[a.name];
            g.identity = a.identity;
            if (!a.erratum.empty()) g.erratum = a.erratum;
            g.points++;
            if (!a.applicable) {
                g.reason = a.reason;
                continue;
            }
            g.applicable++;
            g.printed = std::max(g.printed, a.printed_delta);
            g.corrected = std::max(g.corrected, a.corrected_delta);
            g.lhs = std::max(g.lhs, a.lhs_norm);
            for (const auto& [k, v] : a.variants) g.variants[k] = std::max(g.variants[k], v);
            if (!a.matches.empty()) g.matches[a.matches]++;
            r.csv_rows.push_back({std::to_string(i), a.name, num(a.printed_delta), num(a.corrected_delta)});
        }
    }
    bool pass = true;
    json arr = json::array();
    for (const auto& name : order) {
        const auto& g = agg[name];
        json x;
        x["name"] = name;
        x["identity"] = g.identity;
        x["applicable_points"] = g.applicable;
        x["points"] = g.points;
        if (g.applicable == 0) {
            x["reason"] = g.reason;
            arr.push_back(x);
            r.summary.push_back("  " + name + ": not applicable (" + g.reason + ")");
            continue;
        }
        x["max_lhs_norm"] = g.lhs;
        x["max_printed_delta"] = g.printed;
        x["max_corrected_delta"] = g.corrected;
        if (!g.erratum.empty()) x["erratum"] = g.erratum;
        if (!g.variants.empty()) {
            json v;
            for (const auto& [k, d] : g.variants) v[k] = d;
            x["variants"] = v;
            json mm;
            for (const auto& [k, c] : g.matches) mm[k] = c;
            x["matching_readings"] = mm;
        }
        double used = st.errata ? g.corrected : g.printed;
        bool ok = used <= st.tol.audit && (g.printed <= st.tol.audit || !g.erratum.empty());
        x["pass"] = ok;
        pass = pass && ok;
        arr.push_back(x);
        r.summary.push_back("  " + name + ": printed " + sci(g.printed) + " corrected " + sci(g.corrected) +
                            (g.erratum.empty() ? "" : " [" + g.erratum + "]") + (ok ? "" : "  FAIL"));
    }
    r.body["audits"] = arr;
    if (agg.count("lemgene2")) {
        const auto& g = agg["lemgene2"];
        json res;
        res["question"] = "which curvature (ambient or intrinsic) and which Laplacian sign the grad f lemma uses";
        json mm;
        for (const auto& [k, c] : g.matches) mm[k] = c;
        res["matching_readings"] = mm;
        json v;
        for (const auto& [k, d] : g.variants) v[k] = d;
        res["variant_max_deltas"] = v;
        res["resolution"] =
            "grad(Lap_neg f) + Ric_M(grad f) (Bochner form); printed readings match only where the ambient or M is flat";
        r.body["lemgene2_resolution"] = res;
    }
    r.pass = pass;
    return r;
}

// ---------------------------------------------------------------------------
// variation and energy

inline std::vector<Axis> quadrature_axes(const Scenario& sc, const std::vector<int>& nodes) {
    std::vector<Axis> ax = sc.ranges;
    for (size_t a = 0; a < ax.size(); ++a) ax[a].nodes = nodes[a];
    return ax;
}

inline CommandResult run_variation(const Scenario& sc, const RunOptions& o, int factor = 1) {
    using namespace rep_detail;
    Settings st = settings_for(sc, o);
    if (!sc.imm.ambient->concrete()) throw IncompatibleError("variation needs a concrete ambient");
    if (!sc.variation.present) throw IncompatibleError("variation needs a [variation] block");
    auto V = parse_variation(sc.imm, sc.variation.field);
    std::vector<int> nodes = sc.variation.nodes;
    for (auto& n : nodes) n *= factor;
    auto G = make_grid(quadrature_axes(sc, nodes));
    CommandResult r;
    r.csv_header = {"functional", "h", "lhs", "rhs", "delta"};
    json arr = json::array();
    bool pass = true;
    double tol = o.tol > 0 ? o.tol : sc.variation.tol;
    for (const auto& fname : sc.variation.functionals) {
        Functional w = functional_from_string(fname);
        auto vc = first_variation_check(sc.imm, G, w, V, sc.variation.steps, tol);
        json x;
        x["functional"] = fname;
        x["sign"] = vc.sign;
        x["rhs"] = vc.rhs;
        json steps = json::array();
        for (const auto& s : vc.steps) {
            steps.push_back({{"h", s.h}, {"lhs", s.lhs}, {"delta", s.delta}});
            r.csv_rows.push_back({fname, num(s.h), num(s.lhs), num(s.rhs), num(s.delta)});
        }
        x["steps"] = steps;
        x["plateau"] = vc.plateau;
        x["observed_order"] = vc.observed_order;
        x["decay_ok"] = vc.decay_ok;
        x["pass"] = vc.pass;
        pass = pass && vc.pass;
        arr.push_back(x);
        r.summary.push_back("  " + fname + ": rhs " + sci(vc.rhs) + " plateau " + sci(vc.plateau) + " order " +
                            sci(vc.observed_order) + (vc.pass ? "" : "  FAIL"));
    }
    (void)st;
    r.body["nodes"] = nodes;
    r.body["functionals"] = arr;
    r.pass = pass;
    return r;
}

inline std::vector<int> energy_nodes(const Scenario& sc) {
    if (sc.variation.present) return sc.variation.nodes;
    std::vector<int> n;
    for (int g : sc.grid) n.push_back(4 * g);
    return n;
}

inline CommandResult run_energy(const Scenario& sc, const RunOptions& o, int factor = 1) {
    using namespace rep_detail;
    if (!sc.imm.ambient->concrete()) throw IncompatibleError("energy needs a concrete ambient");
    auto nodes = energy_nodes(sc);
    for (auto& n : nodes) n *= factor;
    auto G = make_grid(quadrature_axes(sc, nodes));
    auto nodes2 = nodes;
    for (auto& n : nodes2) n *= 2;
    auto G2 = make_grid(quadrature_axes(sc, nodes2));
    CommandResult r;
    r.csv_header = {"functional", "value", "refined", "drift"};
    json e;
    double worst = 0;
    for (const auto& [w, name] : functional_names()) {
        double v = energy(sc.imm, G, w);
        double v2 = energy(sc.imm, G2, w);
        double drift = std::abs(v - v2);
        worst = std::max(worst, drift / std::max(1.0, std::abs(v2)));
        e[name] = {{"value", v}, {"refined", v2}, {"drift", drift}};
        r.csv_rows.push_back({name, num(v), num(v2), num(drift)});
        r.summary.push_back(std::string("  ") + name + " = " + num(v) + "  (drift under doubling " + sci(drift) + ")");
    }
    r.body["nodes"] = nodes;
    r.body["energies"] = e;
    r.body["max_relative_drift"] = worst;
    (void)o;
    r.pass = true;
    return r;
}

// ---------------------------------------------------------------------------
// propositions

inline PropAmbient prop_ambient(const Scenario& sc) {
    const AmbientSpace& a = *sc.imm.ambient;
    PropAmbient pa;
    pa.structure = a.structure_kind();
    pa.contact = a.contact_class();
    pa.is_csf = a.model().family == CurvatureModel::Family::csf;
    pa.c = a.parameter();
    pa.n = a.structure_kind() == StructureKind::contact ? (a.dim() - 1) / 2 : a.complex_dim();
    pa.m = sc.imm.m();
    pa.N = a.dim();
    return pa;
}

inline CommandResult run_props(const Scenario& sc, const RunOptions& o) {
    using namespace rep_detail;
    Settings st = settings_for(sc, o);
    if (!sc.imm.ambient->concrete()) throw IncompatibleError("props needs a concrete ambient");
    auto S = parallel_map<PropSample>(sc.samples.size(), o.threads, [&](size_t i) {
        PointGeometry pg(sc.imm, sc.samples[i]);
        auto fd = fundamental_data_at(sc.imm, pg);
        auto q = point_quantities(pg, fd);
        return prop_sample(pg, q, st.tol.flag);
    });
    auto res = proposition_checkers(prop_ambient(sc), S, st.tol.identity, st.errata);
    CommandResult r;
    r.csv_header = {"sample", "B2", "H2", "scal", "lapf_over_f", "f1", "f2", "f3", "alpha", "beta"};
    for (size_t i = 0; i < S.size(); ++i) {
        const auto& s = S[i];
        r.csv_rows.push_back({std::to_string(i), num(s.B2), num(s.H2), num(s.scal), num(s.lapf_over_f), num(s.f1),
                              num(s.f2), num(s.f3), num(s.alpha), num(s.beta)});
    }
    json arr = json::array();
    bool pass = true;
    for (const auto& p : res) {
        json x;
        x["id"] = p.id;
        x["statement"] = p.statement;
        json h = json::array();
        for (Flag f : p.hypotheses) h.push_back(to_string(f));
        x["hypotheses"] = h;
        x["hypotheses_hold"] = p.hypotheses_hold;
        x["verdict"] = p.verdict;
        json v;
        for (const auto& [k, d] : p.values) v[k] = d;
        x["values"] = v;
        x["notes"] = p.notes;
        arr.push_back(x);
        pass = pass && p.verdict != "violated";
        r.summary.push_back("  " + p.id + ": " + p.verdict);
    }
    r.body["propositions"] = arr;
    r.pass = pass;
    return r;
}

// ---------------------------------------------------------------------------
// sweep: refine the sample grid (pointwise commands) or the quadrature (integral commands)

inline CommandResult run_command(const std::string& cmd, const Scenario& sc, const RunOptions& o);

inline Scenario with_grid_factor(const Scenario& sc, int factor) {
    Scenario s = sc;
    for (auto& g : s.grid) g *= factor;
    s.samples = sample_points(s);
    return s;
}

inline CommandResult run_sweep(const Scenario& sc, const RunOptions& o) {
    using namespace rep_detail;
    const std::string& of = o.sweep_of;
    if (of == "sweep") throw IncompatibleError("sweep of sweep");
    CommandResult r;
    r.csv_header = {"factor", "metric", "value"};
    json levels = json::array();
    bool pass = true;
    std::map<std::string, std::vector<double>> series;
    for (int factor : {1, 2, 3}) {
        CommandResult c;
        json lv;
        lv["factor"] = factor;
        std::map<std::string, double> metrics;
        if (of == "check" || of == "audit" || of == "props") {
            Scenario s = with_grid_factor(sc, factor);
            lv["samples"] = s.samples.size();
            c = run_command(of, s, o);
            if (of == "check") {
                const auto& a = c.body["aggregate"];
                for (const char* k : {"max_bitension", "max_f_bitension", "max_bi_f_tension"}) metrics[k] = a[k];
                if (a.contains("theorems"))
                    for (const auto& t : a["theorems"])
                        if (t.contains("max_agreement")) metrics["agreement:" + t["id"].get<std::string>()] = t["max_agreement"];
            } else if (of == "audit") {
                for (const auto& a : c.body["audits"])
                    if (a.contains("max_corrected_delta")) metrics[a["name"].get<std::string>()] = a["max_corrected_delta"];
            } else {
                for (const auto& p : c.body["propositions"])
                    for (auto it = p["values"].begin(); it != p["values"].end(); ++it)
                        if (it.key().find("residual") != std::string::npos)
                            metrics[p["id"].get<std::string>() + ":" + it.key()] = it.value();
            }
        } else if (of == "energy") {
            c = run_energy(sc, o, factor);
            for (auto it = c.body["energies"].begin(); it != c.body["energies"].end(); ++it)
                metrics[it.key()] = it.value()["value"];
        } else if (of == "variation") {
            c = run_variation(sc, o, factor);
            for (const auto& f : c.body["functionals"]) metrics[f["functional"].get<std::string>()] = f["plateau"];
        } else {
            throw IncompatibleError("sweep: unknown command '" + of + "'");
        }
        json mj;
        for (const auto& [k, v] : metrics) {
            mj[k] = v;
            series[k].push_back(v);
            r.csv_rows.push_back({std::to_string(factor), k, num(v)});
        }
        lv["metrics"] = mj;
        lv["pass"] = c.pass;
        pass = pass && c.pass;
        levels.push_back(lv);
    }
    json drift;
    for (const auto& [k, v] : series) {
        double lo = *std::min_element(v.begin(), v.end()), hi = *std::max_element(v.begin(), v.end());
        drift[k] = hi - lo;
        r.summary.push_back("  " + k + ": " + sci(v.front()) + " -> " + sci(v.back()) + " (drift " + sci(hi - lo) + ")");
    }
    r.body["of"] = of;
    r.body["levels"] = levels;
    r.body["drift"] = drift;
    r.pass = pass;
    return r;
}

inline CommandResult run_command(const std::string& cmd, const Scenario& sc, const RunOptions& o) {
    if (cmd == "check") return run_check(sc, o);
    if (cmd == "audit") return run_audit(sc, o);
    if (cmd == "variation") return run_variation(sc, o);
    if (cmd == "props") return run_props(sc, o);
    if (cmd == "energy") return run_energy(sc, o);
    if (cmd == "sweep") return run_sweep(sc, o);
    throw IncompatibleError("unknown command '" + cmd + "'");
}

// the whole report; wall time is the only field that changes between identical runs
inline json make_report(const std::string& cmd, const Scenario& sc, const RunOptions& o, const CommandResult& res,
                        double wall_seconds) {
    Settings st = settings_for(sc, o);
    json j;
    j["tool"] = "biharm";
    j["version"] = kToolVersion;
    j["command"] = cmd;
    j["scenario"] = {{"path", sc.path}, {"name", sc.name}, {"digest", sc.digest}, {"ambient", sc.imm.ambient->label()}};
    json flags;
    for (const auto& [f, t] : sc.flags) flags[to_string(f)] = rep_detail::tri_name(t);
    j["scenario"]["flags"] = flags;
    j["settings"] = {{"mode", st.mode},
                     {"errata", st.errata},
                     {"seed", sc.seed},
                     {"samples", sc.samples.size()},
                     {"tolerances",
                      {{"residual", st.tol.residual},
                       {"agreement", st.tol.agreement},
                       {"coherence", st.tol.coherence},
                       {"flag", st.tol.flag},
                       {"identity", st.tol.identity},
                       {"audit", st.tol.audit},
                       {"periodicity", st.tol.periodicity}}}};
    j["errata"] = errata_state(st.errata);
    j["sign_ledger"] = sign_ledger();
    j["result"] = res.body;
    j["pass"] = res.pass;
    j["wall_time_s"] = wall_seconds;
    return j;
}

inline std::string csv_text(const CommandResult& r) {
    std::string s;
    for (size_t i = 0; i < r.csv_header.size(); ++i) s += (i ? "," : "") + r.csv_header[i];
    s += "\n";
    for (const auto& row : r.csv_rows) {
        for (size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + row[i];
        s += "\n";
    }
    return s;
}

}  // namespace biharm

#endif
