#ifndef BIHARM_SUBMANIFOLD_HPP
#define BIHARM_SUBMANIFOLD_HPP

// Immersions and everything extrinsic/intrinsic about them at one parameter point.
//
// PointGeometry holds jets in the parameter variables of the map, the ambient
// metric and connection pulled back along it, and the induced metric. Frames and
// all theorem ingredients are read off those jets into FundamentalData/TraceTerms.
//
// Laplacians here: lap_f and lap_perp_H are positive (minus the trace); the rough
// Laplacian along the map is the trace of the second covariant derivative.

#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "biharm/expression.hpp"
#include "biharm/jet_linalg.hpp"
#include "biharm/model_space.hpp"

namespace biharm {

struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Flag {
    hypersurface,
    curve,
    complex,
    lagrangian,
    invariant,
    anti_invariant,
    xi_tangent,
    xi_normal,
    parallel_H,
    cmc,
    phiH_tangent,
    phiH_normal
};

inline const std::vector<std::pair<Flag, const char*>>& flag_names() {
    static const std::vector<std::pair<Flag, const char*>> names = {
        {Flag::hypersurface, "hypersurface"}, {Flag::curve, "curve"},
        {Flag::complex, "complex"},           {Flag::lagrangian, "lagrangian"},
        {Flag::invariant, "invariant"},       {Flag::anti_invariant, "anti_invariant"},
        {Flag::xi_tangent, "xi_tangent"},     {Flag::xi_normal, "xi_normal"},
        {Flag::parallel_H, "parallel_H"},     {Flag::cmc, "cmc"},
        {Flag::phiH_tangent, "phiH_tangent"}, {Flag::phiH_normal, "phiH_normal"}};
    return names;
}

inline const char* to_string(Flag f) {
    for (const auto& [k, n] : flag_names())
        if (k == f) return n;
    return "?";
}

enum class Tri { unknown, asserted, denied };

struct Immersion {
    std::shared_ptr<const AmbientSpace> ambient;
    std::vector<std::string> params;
    std::vector<Expression> components;
    Expression weight;  // f
    std::map<Flag, Tri> flags;

    int m() const { return static_cast<int>(params.size()); }
    int N() const { return ambient->dim(); }
    int codim() const { return N() - m(); }
    Tri flag(Flag f) const {
        auto it = flags.find(f);
        return it == flags.end() ? Tri::unknown : it->second;
    }
    bool asserted(Flag f) const { return flag(f) == Tri::asserted; }
};

inline Immersion make_immersion(std::shared_ptr<const AmbientSpace> ambient, std::vector<std::string> params,
                                const std::vector<std::string>& components, const std::string& weight = "1") {
    Immersion imm;
    imm.ambient = std::move(ambient);
    imm.params = std::move(params);
    if (static_cast<int>(components.size()) != imm.ambient->dim())
        throw GeometryError("immersion needs " + std::to_string(imm.ambient->dim()) + " components, got " +
                            std::to_string(components.size()));
    for (const auto& c : components) imm.components.push_back(parse(c, imm.params));
    imm.weight = parse(weight, imm.params);
    return imm;
}

// ---------------------------------------------------------------------------

// Optional chart-coordinate variation psi + t V. The domain metric (g, ginv, gamma) stays
// the induced metric of the unvaried immersion, so the map energies are those of maps
// from a fixed Riemannian manifold.
struct MapVariation {
    const std::vector<Expression>* V = nullptr;
    double t = 0;
};

class PointGeometry {
public:
    int m = 0, N = 0, K = 0;
    Vec p, x;
    JetVec psi;                 // N, order K
    std::vector<JetVec> dpsi;   // [a]: N, order K-1
    JetVec gt;                  // ambient metric along the map, N*N, order K
    std::vector<JetVec> conn;   // [a]: (k, j) -> Gamma^k_ij d_a psi^i, N*N, order K-1
    JetVec g, ginv;             // induced metric, m*m, order K-1
    JetVec gamma;               // induced Gamma^c_ab at (c*m + a)*m + b, order K-2
    Jet f;                      // weight, order K
    bool has_connection = true;
    std::optional<CurvatureTensor> Rbar;

    PointGeometry(const Immersion& imm, const Vec& point, int order = kMaxJetOrder, MapVariation var = {}) {
        m = imm.m();
        N = imm.N();
        K = order;
        p = point;
        if (p.size() != m) throw GeometryError("parameter point has wrong dimension");
        if (K < 2) throw GeometryError("point geometry needs jets of order >= 2");
        JetVec u;
        for (int a = 0; a < m; ++a) u.push_back(seed_variable(a, p[a], m, K));
        for (const auto& c : imm.components) psi.push_back(eval_on_jets(c, u, u[0]));
        f = eval_on_jets(imm.weight, u, u[0]);
        const AmbientSpace& amb = *imm.ambient;
        has_connection = amb.concrete();
        JetVec psi0 = psi;
        if (var.V) {
            if (static_cast<int>(var.V->size()) != N) throw GeometryError("variation field has wrong dimension");
            for (int i = 0; i < N; ++i) psi[i] += var.t * eval_on_jets((*var.V)[i], u, u[0]);
            amb.check_point(jet_values(psi0));
        }
        x = jet_values(psi);
        amb.check_point(x);

        JetVec gamma_bar;
        if (has_connection) {
            auto aj = ambient_jets(amb, x, K);
            for (const auto& gij : aj.g) gt.push_back(compose(gij, psi));
            for (const auto& G : aj.gamma) gamma_bar.push_back(compose(G, psi));
            Rbar = curvature_from_gamma(truncate_all(aj.gamma, 1), N);
        } else {
            // algebraic model: identity metric, no connection
            gt.assign(N * N, u[0].constant_like(0.0));
            for (int i = 0; i < N; ++i) gt[i * N + i] = u[0].constant_like(1.0);
            gamma_bar.assign(N * N * N, u[0].constant_like(0.0).truncated(K - 1));
        }
        for (int a = 0; a < m; ++a) dpsi.push_back(differentiate_all(psi, a));

        for (int a = 0; a < m; ++a) {
            JetVec A(N * N, dpsi[a][0].constant_like(0.0));
            for (int k = 0; k < N; ++k)
                for (int j = 0; j < N; ++j)
                    for (int i = 0; i < N; ++i) A[k * N + j].add_product(gamma_bar[(k * N + i) * N + j], dpsi[a][i]);
            conn.push_back(std::move(A));
        }

        JetVec gt1 = truncate_all(gt, K - 1);
        std::vector<JetVec> dpsi0 = dpsi;
        if (var.V) {
            if (has_connection) {
                auto aj0 = ambient_jets(amb, jet_values(psi0), K - 1);
                gt1.clear();
                JetVec p0 = truncate_all(psi0, K - 1);
                for (const auto& gij : aj0.g) gt1.push_back(compose(gij, p0));
            }
            for (int a = 0; a < m; ++a) dpsi0[a] = differentiate_all(psi0, a);
        }
        g.assign(m * m, dpsi[0][0].constant_like(0.0));
        for (int a = 0; a < m; ++a)
            for (int b = a; b < m; ++b) {
                Jet s = inner_impl(gt1, dpsi0[a], dpsi0[b]);
                g[a * m + b] = s;
                g[b * m + a] = s;
            }
        double det = jet_values(g, m, m).determinant();
        if (!(det > 1e-10)) throw GeometryError("rank deficiency: Gram determinant " + std::to_string(det));
        ginv = jet_inverse(g, m);

        std::vector<JetVec> dg;
        for (int a = 0; a < m; ++a) dg.push_back(differentiate_all(g, a));
        JetVec gi = truncate_all(ginv, K - 2);
        gamma.assign(m * m * m, gi[0].constant_like(0.0));
        for (int c = 0; c < m; ++c)
            for (int a = 0; a < m; ++a)
                for (int b = a; b < m; ++b) {
                    Jet s = gi[0].constant_like(0.0);
                    for (int l = 0; l < m; ++l) {
                        Jet low = 0.5 * (dg[a][b * m + l] + dg[b][a * m + l] - dg[l][a * m + b]);
                        s.add_product(gi[c * m + l], low);
                    }
                    gamma[(c * m + a) * m + b] = s;
                    gamma[(c * m + b) * m + a] = s;
                }
    }

    static int order_of(const JetVec& v) { return v[0].order(); }

    Jet ginv_at(int a, int b, int k) const { return ginv[a * m + b].truncated(k); }
    Jet gamma_at(int c, int a, int b, int k) const { return gamma[(c * m + a) * m + b].truncated(k); }

    Jet inner(const JetVec& V, const JetVec& W) const {
        int k = std::min(order_of(V), order_of(W));
        return inner_impl(truncate_all(gt, k), truncate_all(V, k), truncate_all(W, k));
    }

    // D_a V along the map
    JetVec cov(const JetVec& V, int a) const {
        int k = order_of(V) - 1;
        JetVec r = differentiate_all(V, a);
        JetVec Vt = truncate_all(V, k);
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) r[i].add_product(conn[a][i * N + j].truncated(k), Vt[j]);
        return r;
    }

    // sum_ab g^ab (D_a D_b V - Gamma^c_ab D_c V)
    JetVec rough_laplacian(const JetVec& V) const {
        int k = order_of(V) - 2;
        std::vector<JetVec> W;
        for (int a = 0; a < m; ++a) W.push_back(cov(V, a));
        JetVec r(N, V[0].constant_like(0.0).truncated(k));
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                JetVec DW = cov(W[b], a);
                for (int c = 0; c < m; ++c) {
                    Jet G = gamma_at(c, a, b, k);
                    for (int i = 0; i < N; ++i) DW[i] -= G * W[c][i].truncated(k);
                }
                Jet gab = ginv_at(a, b, k);
                for (int i = 0; i < N; ++i) r[i].add_product(gab, DW[i]);
            }
        return r;
    }

    // sum_a comps[a] d_a psi
    JetVec push(const JetVec& comps) const {
        int k = order_of(comps);
        JetVec r(N, comps[0].constant_like(0.0));
        for (int a = 0; a < m; ++a)
            for (int i = 0; i < N; ++i) r[i].add_product(comps[a], dpsi[a][i].truncated(k));
        return r;
    }

    // components t^a with V^T = t^a d_a psi
    JetVec tangent_coords(const JetVec& V) const {
        int k = std::min(order_of(V), K - 1);
        JetVec low(m);
        for (int b = 0; b < m; ++b) low[b] = inner(truncate_all(dpsi[b], k), truncate_all(V, k));
        JetVec t(m, low[0].constant_like(0.0));
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) t[a].add_product(ginv_at(a, b, k), low[b]);
        return t;
    }

    JetVec tangent_part(const JetVec& V) const { return push(tangent_coords(V)); }

    JetVec normal_part(const JetVec& V) const {
        JetVec t = tangent_part(V);
        JetVec r = truncate_all(V, order_of(t));
        for (int i = 0; i < N; ++i) r[i] -= t[i];
        return r;
    }

    // second fundamental form of the map, B_ab = D_a d_b psi - Gamma^c_ab d_c psi, order K-2
    JetVec second_fundamental(int a, int b) const {
        JetVec r = cov(dpsi[b], a);
        int k = order_of(r);
        for (int c = 0; c < m; ++c) {
            Jet G = gamma_at(c, a, b, k);
            for (int i = 0; i < N; ++i) r[i] -= G * dpsi[c][i].truncated(k);
        }
        return r;
    }

    // tension field tr B, order K-2
    JetVec tension() const {
        JetVec r(N, psi[0].constant_like(0.0).truncated(K - 2));
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                JetVec B = second_fundamental(a, b);
                Jet gab = ginv_at(a, b, K - 2);
                for (int i = 0; i < N; ++i) r[i].add_product(gab, B[i]);
            }
        return r;
    }

    // gradient components G^a = g^ab d_b phi of a scalar jet
    JetVec gradient_coords(const Jet& phi) const {
        int k = std::min(phi.order() - 1, K - 1);
        JetVec G(m, phi.constant_like(0.0).truncated(k));
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) G[a].add_product(ginv_at(a, b, k), phi.derivative(b).truncated(k));
        return G;
    }

    // negative (trace) Laplacian of a scalar jet
    Jet laplacian_neg(const Jet& phi) const {
        int k = phi.order() - 2;
        Jet r = phi.constant_like(0.0).truncated(k);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                Jet h = phi.derivative(b).derivative(a);
                for (int c = 0; c < m; ++c) h -= gamma_at(c, a, b, k) * phi.derivative(c).truncated(k);
                r.add_product(ginv_at(a, b, k), h);
            }
        return r;
    }

private:
    Jet inner_impl(const JetVec& G, const JetVec& V, const JetVec& W) const {
        Jet s = V[0].constant_like(0.0);
        for (int i = 0; i < N; ++i) {
            Jet gv = V[0].constant_like(0.0);
            for (int j = 0; j < N; ++j) gv.add_product(G[i * N + j], W[j]);
            s.add_product(V[i], gv);
        }
        return s;
    }
};

// ---------------------------------------------------------------------------

enum class CurvatureBackend { concrete, model };

struct FundamentalData {
    int m = 0, N = 0, q = 0;
    Vec p, x;
    Mat gbar;             // ambient metric
    Mat dpsi;             // N x m
    Mat g;                // induced metric (coordinate basis)
    Mat E;                // m x m, e_i = dpsi * E.col(i)
    Mat e;                // N x m orthonormal tangent frame
    Mat nu;               // N x q orthonormal normal frame
    std::vector<Vec> B;   // B(e_i, e_j) at i*m + j
    Vec H;
    double f = 1;
    Structure structure;
    std::shared_ptr<const AmbientSpace> ambient;
    std::optional<CurvatureTensor> Rbar;

    double inner(const Vec& a, const Vec& b) const { return a.dot(gbar * b); }
    double norm(const Vec& a) const { return std::sqrt(std::max(0.0, inner(a, a))); }
    Mat tangent_projector() const { return e * e.transpose() * gbar; }
    Mat normal_projector() const { return nu * nu.transpose() * gbar; }
    Vec tangent(const Vec& v) const { return tangent_projector() * v; }
    Vec normal(const Vec& v) const { return normal_projector() * v; }
    Vec frame_coords(const Vec& X) const { return e.transpose() * gbar * X; }

    Vec Bof(const Vec& X, const Vec& Y) const {
        Vec a = frame_coords(X), b = frame_coords(Y);
        Vec r = Vec::Zero(N);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) r += a[i] * b[j] * B[i * m + j];
        return r;
    }

    // A_nu as an m x m matrix in the tangent frame
    Mat shape_matrix(const Vec& n) const {
        Mat A(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) A(i, j) = inner(B[i * m + j], n);
        return A;
    }

    Vec shape(const Vec& n, const Vec& X) const { return e * (shape_matrix(n) * frame_coords(X)); }

    Vec curvature(const Vec& X, const Vec& Y, const Vec& Z, CurvatureBackend backend) const {
        if (backend == CurvatureBackend::concrete) {
            if (!Rbar) throw SpaceError("concrete curvature unavailable for an abstract ambient");
            return Rbar->apply(X, Y, Z);
        }
        return curvature_model(ambient->model(), structure, gbar, x, X, Y, Z);
    }

    // sum_i Rbar(e_i, X) e_i
    Vec curvature_trace(const Vec& X, CurvatureBackend backend) const {
        Vec r = Vec::Zero(N);
        for (int i = 0; i < m; ++i) r += curvature(e.col(i), X, e.col(i), backend);
        return r;
    }
};

namespace detail {

inline Mat gram_schmidt_coords(const Mat& g, double tol) {
    // columns: coordinates of orthonormal tangent vectors in the d_a psi basis
    int m = g.rows();
    Mat E = Mat::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        Vec v = Vec::Unit(m, i);
        for (int pass = 0; pass < 2; ++pass)
            for (int j = 0; j < i; ++j) v -= (E.col(j).dot(g * v)) * E.col(j);
        double n2 = v.dot(g * v);
        if (!(n2 > tol)) throw GeometryError("degenerate tangent frame");
        E.col(i) = v / std::sqrt(n2);
    }
    return E;
}

inline Mat random_orthogonal(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> Nd;
    Mat a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = Nd(rng);
    Eigen::HouseholderQR<Mat> qr(a);
    Mat Q = qr.householderQ();
    return Q;
}

}  // namespace detail

struct FrameOptions {
    std::optional<uint64_t> remix_seed;  // random orthonormal re-mixing of both frames
};

inline FundamentalData fundamental_data_at(const Immersion& imm, const PointGeometry& pg, FrameOptions opt = {}) {
    FundamentalData fd;
    fd.m = pg.m;
    fd.N = pg.N;
    fd.q = pg.N - pg.m;
    fd.p = pg.p;
    fd.x = pg.x;
    fd.ambient = imm.ambient;
    fd.Rbar = pg.Rbar;
    fd.gbar = jet_values(pg.gt, pg.N, pg.N);
    fd.dpsi = Mat(pg.N, pg.m);
    for (int a = 0; a < pg.m; ++a) fd.dpsi.col(a) = jet_values(pg.dpsi[a]);
    fd.g = jet_values(pg.g, pg.m, pg.m);
    fd.E = detail::gram_schmidt_coords(fd.g, 1e-10);
    fd.e = fd.dpsi * fd.E;
    // normal completion from chart axes
    std::vector<Vec> normals;
    Mat basis = fd.e;
    for (int k = 0; k < pg.N && static_cast<int>(normals.size()) < fd.q; ++k) {
        Vec v = Vec::Unit(pg.N, k);
        for (int pass = 0; pass < 2; ++pass) {
            for (int i = 0; i < pg.m; ++i) v -= fd.inner(fd.e.col(i), v) * fd.e.col(i);
            for (const auto& n : normals) v -= fd.inner(n, v) * n;
        }
        double len = fd.norm(v);
        if (len < 1e-6) continue;
        normals.push_back(v / len);
    }
    if (static_cast<int>(normals.size()) != fd.q) throw GeometryError("normal frame completion failed");
    fd.nu = Mat(pg.N, fd.q);
    for (int k = 0; k < fd.q; ++k) fd.nu.col(k) = normals[k];
    if (opt.remix_seed) {
        std::mt19937_64 rng(*opt.remix_seed);
        Mat Qt = detail::random_orthogonal(pg.m, rng);
        fd.E = fd.E * Qt;
        fd.e = fd.dpsi * fd.E;
        if (fd.q > 0) fd.nu = fd.nu * detail::random_orthogonal(fd.q, rng);
    }
    // B(e_i, e_j)
    std::vector<Vec> Bab(pg.m * pg.m);
    for (int a = 0; a < pg.m; ++a)
        for (int b = 0; b < pg.m; ++b) Bab[a * pg.m + b] = jet_values(pg.second_fundamental(a, b));
    fd.B.assign(pg.m * pg.m, Vec::Zero(pg.N));
    for (int i = 0; i < pg.m; ++i)
        for (int j = 0; j < pg.m; ++j)
            for (int a = 0; a < pg.m; ++a)
                for (int b = 0; b < pg.m; ++b) fd.B[i * pg.m + j] += fd.E(a, i) * fd.E(b, j) * Bab[a * pg.m + b];
    fd.H = Vec::Zero(pg.N);
    for (int i = 0; i < pg.m; ++i) fd.H += fd.B[i * pg.m + i];
    fd.H /= pg.m;
    fd.f = pg.f.value();
    fd.structure = imm.ambient->structure_at(pg.x);
    return fd;
}

inline FundamentalData fundamental_data_at(const Immersion& imm, const Vec& p, FrameOptions opt = {}) {
    PointGeometry pg(imm, p);
    return fundamental_data_at(imm, pg, opt);
}

// ---------------------------------------------------------------------------
// Decomposition of J (or phi) along TM + NM.

struct DecompositionOps {
    StructureKind kind = StructureKind::hermitian;
    // frame matrices: tt (m x m), tn (q x m), nt (m x q), nn (q x q)
    // hermitian: j, k, l, m; contact: P, N, s, t
    Mat tt, tn, nt, nn;
    // the same operators acting on ambient chart vectors
    Mat TT, TN, NT, NN;

    Vec j(const Vec& v) const { return TT * v; }
    Vec k(const Vec& v) const { return TN * v; }
    Vec l(const Vec& v) const { return NT * v; }
    Vec mm(const Vec& v) const { return NN * v; }
};

inline DecompositionOps decomposition_operators_at(const FundamentalData& fd) {
    DecompositionOps ops;
    ops.kind = fd.structure.kind;
    const Mat& S = fd.structure.kind == StructureKind::hermitian ? fd.structure.J : fd.structure.phi;
    Mat Pt = fd.tangent_projector(), Pn = fd.normal_projector();
    ops.TT = Pt * S * Pt;
    ops.TN = Pn * S * Pt;
    ops.NT = Pt * S * Pn;
    ops.NN = Pn * S * Pn;
    Mat et = fd.e.transpose() * fd.gbar, nt = fd.nu.transpose() * fd.gbar;
    ops.tt = et * S * fd.e;
    ops.tn = nt * S * fd.e;
    ops.nt = et * S * fd.nu;
    ops.nn = nt * S * fd.nu;
    return ops;
}

// ---------------------------------------------------------------------------

struct TraceTerms {
    // mean curvature package
    Vec trB_AH;          // tr B(., A_H .)                  normal
    Vec trA_DperpH;      // tr A_{Dperp H}(.)               tangent
    Vec grad_H2;         // grad |H|^2                      tangent
    Vec lap_perp_H;      // positive normal Laplacian of H  normal
    std::vector<Vec> DperpH;  // Dperp_{e_i} H
    // weight package
    Vec grad_f;
    double lap_f = 0;    // positive
    Mat hess_f;          // frame components
    Vec grad_lap_f;      // grad of the positive Laplacian
    Vec grad_gradf2;     // grad |grad f|^2
    Vec ric_grad_f;      // Ric_M(grad f)
    double scal = 0;     // Scal_M
    std::vector<Vec> D_grad_f;  // nabla_{e_i} grad f (intrinsic)
    Vec trB_Dgradf;      // tr B(., nabla_. grad f)          normal
    Vec trDB_gradf;      // tr nabla-perp_. B(., grad f)     normal
    Vec trA_Bgradf;      // tr A_{B(., grad f)}(.)           tangent
    Vec B_gradf_gradf;   // normal
    Vec AH_gradf;        // tangent
    Vec Dperp_gradf_H;   // normal
    // scalars
    double B2 = 0, H2 = 0, AH2 = 0, DperpH2 = 0;
    // contact
    double eta_H = 0, xiT2 = 0;
    Vec xiT, xiN;
};

inline TraceTerms trace_terms_at(const PointGeometry& pg, const FundamentalData& fd) {
    TraceTerms t;
    const int m = pg.m, N = pg.N;
    Vec zero = Vec::Zero(N);
    auto vals = [](const JetVec& v) { return jet_values(v); };

    // H and its normal derivatives as jets
    JetVec H = pg.tension();
    for (auto& h : H) h *= 1.0 / m;
    std::vector<JetVec> DH;  // Dperp_a H, order K-3
    for (int a = 0; a < m; ++a) DH.push_back(pg.normal_part(pg.cov(H, a)));
    Vec lap = zero;
    {
        int k = PointGeometry::order_of(DH[0]) - 1;
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                JetVec D2 = pg.normal_part(pg.cov(DH[b], a));
                Vec v = vals(D2);
                for (int c = 0; c < m; ++c) v -= pg.gamma_at(c, a, b, k).value() * vals(DH[c]);
                lap += pg.ginv[a * m + b].value() * v;
            }
    }
    t.lap_perp_H = -lap;

    t.DperpH.assign(m, zero);
    for (int i = 0; i < m; ++i)
        for (int a = 0; a < m; ++a) t.DperpH[i] += fd.E(a, i) * vals(DH[a]);

    auto tangent_from_coords = [&](const Vec& c) { return Vec(fd.dpsi * c); };
    auto grad_of = [&](const Jet& phi) {
        JetVec G = pg.gradient_coords(phi);
        return tangent_from_coords(vals(G));
    };

    t.trB_AH = zero;
    t.trA_DperpH = zero;
    for (int i = 0; i < m; ++i) {
        t.trB_AH += fd.Bof(fd.e.col(i), fd.shape(fd.H, fd.e.col(i)));
        t.trA_DperpH += fd.shape(t.DperpH[i], fd.e.col(i));
        t.DperpH2 += fd.inner(t.DperpH[i], t.DperpH[i]);
    }
    t.grad_H2 = grad_of(pg.inner(H, H));
    for (const auto& b : fd.B) t.B2 += fd.inner(b, b);
    t.H2 = fd.inner(fd.H, fd.H);
    t.AH2 = fd.shape_matrix(fd.H).squaredNorm();

    // weight
    JetVec Gc = pg.gradient_coords(pg.f);  // order K-1
    t.grad_f = tangent_from_coords(vals(Gc));
    Jet lap_neg = pg.laplacian_neg(pg.f);   // order K-2
    t.lap_f = -lap_neg.value();
    t.grad_lap_f = grad_of(-1.0 * lap_neg);
    {
        Jet gf2 = pg.f.constant_like(0.0).truncated(pg.K - 1);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                gf2 += pg.ginv_at(a, b, pg.K - 1) * pg.f.derivative(a) * pg.f.derivative(b);
        t.grad_gradf2 = grad_of(gf2);
    }
    // Hessian in the frame
    Mat hc(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            double h = pg.f.derivative(b).derivative(a).value();
            for (int c = 0; c < m; ++c) h -= pg.gamma[(c * m + a) * m + b].value() * pg.f.derivative(c).value();
            hc(a, b) = h;
        }
    t.hess_f = fd.E.transpose() * hc * fd.E;

    // intrinsic covariant derivative of grad f: (nabla_a G)^c = d_a G^c + Gamma^c_ad G^d
    std::vector<Vec> DGc(m, Vec::Zero(m));
    for (int a = 0; a < m; ++a)
        for (int c = 0; c < m; ++c) {
            double v = Gc[c].derivative(a).value();
            for (int d = 0; d < m; ++d) v += pg.gamma[(c * m + a) * m + d].value() * Gc[d].value();
            DGc[a][c] = v;
        }
    t.D_grad_f.assign(m, zero);
    for (int i = 0; i < m; ++i)
        for (int a = 0; a < m; ++a) t.D_grad_f[i] += fd.E(a, i) * tangent_from_coords(DGc[a]);

    t.trB_Dgradf = zero;
    t.trA_Bgradf = zero;
    for (int i = 0; i < m; ++i) {
        t.trB_Dgradf += fd.Bof(fd.e.col(i), t.D_grad_f[i]);
        t.trA_Bgradf += fd.shape(fd.Bof(fd.e.col(i), t.grad_f), fd.e.col(i));
    }

    // tr nabla-perp_. B(., grad f) = g^ab (Dperp_a W_b - Gamma^c_ab W_c), W_b = B(d_b, grad f)
    {
        std::vector<JetVec> Bab;
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) Bab.push_back(pg.second_fundamental(a, b));
        int kb = PointGeometry::order_of(Bab[0]);
        std::vector<JetVec> W(m, JetVec(N, pg.f.constant_like(0.0).truncated(kb)));
        for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c)
                for (int i = 0; i < N; ++i) W[b][i].add_product(Bab[b * m + c][i], Gc[c].truncated(kb));
        Vec acc = zero;
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                Vec v = vals(pg.normal_part(pg.cov(W[b], a)));
                for (int c = 0; c < m; ++c) v -= pg.gamma[(c * m + a) * m + b].value() * vals(W[c]);
                acc += pg.ginv[a * m + b].value() * v;
            }
        t.trDB_gradf = acc;
    }

    t.B_gradf_gradf = fd.Bof(t.grad_f, t.grad_f);
    t.AH_gradf = fd.shape(fd.H, t.grad_f);
    t.Dperp_gradf_H = zero;
    for (int a = 0; a < m; ++a) t.Dperp_gradf_H += Gc[a].value() * vals(DH[a]);

    // intrinsic curvature: R(d_c, d_d) d_b = R^a_bcd d_a
    {
        auto G = [&](int c, int a, int b) -> const Jet& { return pg.gamma[(c * m + a) * m + b]; };
        auto R = [&](int a, int b, int c, int d) {
            double v = G(a, d, b).d(c) - G(a, c, b).d(d);
            for (int e2 = 0; e2 < m; ++e2)
                v += G(a, c, e2).value() * G(e2, d, b).value() - G(a, d, e2).value() * G(e2, c, b).value();
            return v;
        };
        Mat ric = Mat::Zero(m, m);  // Ric_yz = sum_a R^a_{z a y}
        for (int y = 0; y < m; ++y)
            for (int z = 0; z < m; ++z)
                for (int a = 0; a < m; ++a) ric(y, z) += R(a, z, a, y);
        Mat gi = jet_values(pg.ginv, m, m);
        t.scal = (gi * ric).trace();
        Vec Gv = vals(Gc);
        t.ric_grad_f = tangent_from_coords(gi * ric * Gv);
    }

    if (fd.structure.kind == StructureKind::contact) {
        const Vec& xi = fd.structure.xi;
        t.eta_H = fd.structure.eta.dot(fd.H);
        t.xiT = fd.tangent(xi);
        t.xiN = fd.normal(xi);
        t.xiT2 = fd.inner(t.xiT, t.xiT);
    } else {
        t.xiT = zero;
        t.xiN = zero;
    }
    return t;
}

// ---------------------------------------------------------------------------
// Generic normal-field calculus used by the spec-level operations.

struct NormalDerivative {
    std::vector<Vec> perp;   // Dperp_{e_i} V
    std::vector<Vec> shape;  // A_V e_i, from the tangential part -A_V e_i
};

// `field` holds jets (order >= 1) of a normal field along the map
inline NormalDerivative normal_derivative(const PointGeometry& pg, const FundamentalData& fd, const JetVec& field) {
    NormalDerivative nd;
    std::vector<Vec> Dn, Dt;
    for (int a = 0; a < pg.m; ++a) {
        JetVec D = pg.cov(field, a);
        Dn.push_back(jet_values(pg.normal_part(D)));
        Dt.push_back(jet_values(pg.tangent_part(D)));
    }
    for (int i = 0; i < pg.m; ++i) {
        Vec p = Vec::Zero(pg.N), s = Vec::Zero(pg.N);
        for (int a = 0; a < pg.m; ++a) {
            p += fd.E(a, i) * Dn[a];
            s -= fd.E(a, i) * Dt[a];
        }
        nd.perp.push_back(p);
        nd.shape.push_back(s);
    }
    return nd;
}

// positive normal Laplacian of a normal field given by jets of order >= 2
inline Vec normal_laplacian(const PointGeometry& pg, const JetVec& field) {
    const int m = pg.m;
    std::vector<JetVec> D;
    for (int a = 0; a < m; ++a) D.push_back(pg.normal_part(pg.cov(field, a)));
    int k = PointGeometry::order_of(D[0]) - 1;
    Vec acc = Vec::Zero(pg.N);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            Vec v = jet_values(pg.normal_part(pg.cov(D[b], a)));
            for (int c = 0; c < m; ++c) v -= pg.gamma_at(c, a, b, k).value() * jet_values(D[c]);
            acc += pg.ginv[a * m + b].value() * v;
        }
    return -acc;
}

inline JetVec mean_curvature_jets(const PointGeometry& pg) {
    JetVec H = pg.tension();
    for (auto& h : H) h *= 1.0 / pg.m;
    return H;
}

}  // namespace biharm

#endif
