#ifndef BIHARM_MODEL_SPACE_HPP
#define BIHARM_MODEL_SPACE_HPP

// Ambient model spaces: metric, structure tensors, connection and both curvature
// backends (differentiated metric, and the algebraic space-form formulas).
//
// Curvature convention: R(X,Y) = [D_X, D_Y] - D_[X,Y].

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "biharm/expression.hpp"
#include "biharm/jet.hpp"
#include "biharm/jet_linalg.hpp"

namespace biharm {

struct SpaceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SpaceKind {
    euclidean_complex,
    fubini_study,
    complex_hyperbolic,
    sasakian_sphere,
    cosymplectic_flat,
    kenmotsu_hyperbolic,
    abstract_gcsf,
    abstract_gssf
};

enum class StructureKind { hermitian, contact };
enum class ContactClass { none, sasaki, kenmotsu, cosymplectic };

inline const char* to_string(SpaceKind k) {
    switch (k) {
        case SpaceKind::euclidean_complex: return "euclidean_complex";
        case SpaceKind::fubini_study: return "fubini_study";
        case SpaceKind::complex_hyperbolic: return "complex_hyperbolic";
        case SpaceKind::sasakian_sphere: return "sasakian_sphere";
        case SpaceKind::cosymplectic_flat: return "cosymplectic_flat";
        case SpaceKind::kenmotsu_hyperbolic: return "kenmotsu_hyperbolic";
        case SpaceKind::abstract_gcsf: return "abstract_gcsf";
        case SpaceKind::abstract_gssf: return "abstract_gssf";
    }
    return "?";
}

// A scalar coefficient field: a constant or an expression over chart coordinates.
struct Coefficient {
    double constant = 0.0;
    Expression expr;

    double at(const Vec& x) const {
        if (expr.empty()) return constant;
        return eval(expr, std::vector<double>(x.data(), x.data() + x.size()));
    }
};

struct CurvatureModel {
    enum class Family { csf, gcsf, gssf } family = Family::gcsf;
    // csf: {c0} with holomorphic sectional curvature 4*c0; gcsf: {alpha, beta}; gssf: {f1, f2, f3}
    std::vector<Coefficient> coeffs;

    std::vector<double> at(const Vec& x) const {
        std::vector<double> r;
        for (const auto& c : coeffs) r.push_back(c.at(x));
        return r;
    }
    // (alpha, beta) for the Hermitian families
    std::pair<double, double> alpha_beta(const Vec& x) const {
        if (family == Family::gssf) throw SpaceError("curvature model is not Hermitian");
        auto v = at(x);
        return family == Family::csf ? std::pair{v[0], v[0]} : std::pair{v[0], v[1]};
    }
};

// Structure tensors at a point, as matrices acting on chart components.
struct Structure {
    StructureKind kind = StructureKind::hermitian;
    Mat J;     // hermitian
    Mat phi;   // contact
    Vec xi;    // contact, vector
    Vec eta;   // contact, covector components
};

template <class T>
struct StructureFields {
    std::vector<T> J, phi, xi, eta;
};

// sasaki: ((c+3)/4, (c-1)/4, (c-1)/4); kenmotsu: ((c-3)/4, (c+1)/4, (c+1)/4); cosymplectic: c/4 each
inline std::array<double, 3> space_form_coefficients(ContactClass kind, double c) {
    switch (kind) {
        case ContactClass::sasaki: return {(c + 3) / 4, (c - 1) / 4, (c - 1) / 4};
        case ContactClass::kenmotsu: return {(c - 3) / 4, (c + 1) / 4, (c + 1) / 4};
        case ContactClass::cosymplectic: return {c / 4, c / 4, c / 4};
        case ContactClass::none: break;
    }
    throw SpaceError("space_form_coefficients: not a contact space-form class");
}

class AmbientSpace {
public:
    virtual ~AmbientSpace() = default;

    SpaceKind kind() const { return kind_; }
    int dim() const { return dim_; }
    int complex_dim() const { return n_; }
    StructureKind structure_kind() const { return structure_; }
    ContactClass contact_class() const { return contact_; }
    bool concrete() const { return concrete_; }
    double parameter() const { return c_; }
    const CurvatureModel& model() const { return model_; }
    std::string label() const { return label_; }

    void require_concrete(const char* what) const {
        if (!concrete_)
            throw SpaceError(std::string(what) + ": abstract ambient '" + label_ +
                             "' has no metric connection");
    }

    virtual void check_point(const Vec& x) const {
        if (x.size() != dim_) throw SpaceError("point has wrong dimension");
        for (int i = 0; i < x.size(); ++i)
            if (!std::isfinite(x[i])) throw SpaceError("point is not finite");
    }

    virtual JetVec metric_jet(const JetVec& x) const = 0;
    virtual Mat metric_at(const Vec& x) const = 0;
    virtual StructureFields<Jet> structure_jet(const JetVec& x) const = 0;
    virtual Structure structure_at(const Vec& x) const = 0;

protected:
    SpaceKind kind_{};
    int dim_ = 0;
    int n_ = 0;
    double c_ = 0;
    StructureKind structure_ = StructureKind::hermitian;
    ContactClass contact_ = ContactClass::none;
    bool concrete_ = true;
    CurvatureModel model_;
    std::string label_;
};

namespace detail {

inline double konst(double, double v) { return v; }
inline Jet konst(const Jet& proto, double v) { return proto.constant_like(v); }

template <class T>
std::vector<T> standard_J(const T& proto, int n, int dim) {
    std::vector<T> J(dim * dim, konst(proto, 0.0));
    for (int k = 0; k < n; ++k) {
        J[(2 * k + 1) * dim + 2 * k] = konst(proto, 1.0);   // J d/dx = d/dy
        J[(2 * k) * dim + 2 * k + 1] = konst(proto, -1.0);  // J d/dy = -d/dx
    }
    return J;
}

template <class D>
class SpaceImpl : public AmbientSpace {
public:
    JetVec metric_jet(const JetVec& x) const override { return self().metric_t(x); }

    Mat metric_at(const Vec& x) const override {
        check_point(x);
        auto g = self().metric_t(std::vector<double>(x.data(), x.data() + x.size()));
        Mat m(dim_, dim_);
        for (int i = 0; i < dim_ * dim_; ++i) m(i / dim_, i % dim_) = g[i];
        return m;
    }

    StructureFields<Jet> structure_jet(const JetVec& x) const override { return self().structure_t(x); }

    Structure structure_at(const Vec& x) const override {
        check_point(x);
        auto s = self().structure_t(std::vector<double>(x.data(), x.data() + x.size()));
        Structure out;
        out.kind = structure_;
        auto mat = [&](const std::vector<double>& v) {
            Mat m(dim_, dim_);
            for (int i = 0; i < dim_ * dim_; ++i) m(i / dim_, i % dim_) = v[i];
            return m;
        };
        if (structure_ == StructureKind::hermitian) {
            out.J = mat(s.J);
        } else {
            out.phi = mat(s.phi);
            out.xi = Eigen::Map<const Vec>(s.xi.data(), dim_);
            out.eta = Eigen::Map<const Vec>(s.eta.data(), dim_);
        }
        return out;
    }

private:
    const D& self() const { return static_cast<const D&>(*this); }
};

inline Coefficient constant_coefficient(double v) { return Coefficient{v, {}}; }

}  // namespace detail

// C^n with the flat metric, coordinates (x1, y1, ..., xn, yn).
class EuclideanComplex : public detail::SpaceImpl<EuclideanComplex> {
public:
    explicit EuclideanComplex(int n) {
        if (n < 1) throw SpaceError("euclidean_complex: n must be >= 1");
        kind_ = SpaceKind::euclidean_complex;
        n_ = n;
        dim_ = 2 * n;
        model_.family = CurvatureModel::Family::csf;
        model_.coeffs = {detail::constant_coefficient(0.0)};
        label_ = "euclidean_complex(" + std::to_string(n) + ")";
    }
    template <class T>
    std::vector<T> metric_t(const std::vector<T>& x) const {
        std::vector<T> g(dim_ * dim_, detail::konst(x[0], 0.0));
        for (int i = 0; i < dim_; ++i) g[i * dim_ + i] = detail::konst(x[0], 1.0);
        return g;
    }
    template <class T>
    StructureFields<T> structure_t(const std::vector<T>& x) const {
        return {detail::standard_J(x[0], n_, dim_), {}, {}, {}};
    }
};

// Fubini-Study (c > 0) or complex hyperbolic (c < 0) metric of holomorphic sectional
// curvature c, in inhomogeneous coordinates (x1, y1, ..., xn, yn).
class ComplexSpaceForm : public detail::SpaceImpl<ComplexSpaceForm> {
public:
    ComplexSpaceForm(int n, double c) {
        if (n < 1) throw SpaceError("complex space form: n must be >= 1");
        if (c == 0) throw SpaceError("complex space form: c must be nonzero (use euclidean_complex)");
        kind_ = c > 0 ? SpaceKind::fubini_study : SpaceKind::complex_hyperbolic;
        n_ = n;
        dim_ = 2 * n;
        c_ = c;
        model_.family = CurvatureModel::Family::csf;
        model_.coeffs = {detail::constant_coefficient(c / 4)};
        label_ = std::string(to_string(kind_)) + "(" + std::to_string(n) + ", " + detail::format_number(c) + ")";
    }

    void check_point(const Vec& x) const override {
        AmbientSpace::check_point(x);
        if (c_ < 0 && x.squaredNorm() >= 1.0) throw SpaceError("point outside the complex hyperbolic ball chart");
    }

    template <class T>
    std::vector<T> metric_t(const std::vector<T>& x) const {
        const T zero = detail::konst(x[0], 0.0);
        double sgn = c_ > 0 ? 1.0 : -1.0;
        double inv_kappa = 4.0 / std::abs(c_);
        T r2 = zero;
        for (int i = 0; i < dim_; ++i) r2 = r2 + x[i] * x[i];
        T w = 1.0 + sgn * r2;
        T s = inv_kappa / (w * w);
        std::vector<T> b(dim_, zero);
        for (int k = 0; k < n_; ++k) {
            b[2 * k] = -x[2 * k + 1];
            b[2 * k + 1] = x[2 * k];
        }
        std::vector<T> g(dim_ * dim_, zero);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) {
                T v = -sgn * (x[i] * x[j] + b[i] * b[j]);
                if (i == j) v = v + w;
                g[i * dim_ + j] = s * v;
            }
        return g;
    }
    template <class T>
    StructureFields<T> structure_t(const std::vector<T>& x) const {
        return {detail::standard_J(x[0], n_, dim_), {}, {}, {}};
    }
};

// Unit sphere S^(2n+1) in C^(n+1) with xi = J x, phi X = -(J X)^T, pulled into the
// stereographic chart from the south pole (the excluded point). For c != 1 the
// structure is D-homothetically deformed with a = 4/(c+3).
class SasakianSphere : public detail::SpaceImpl<SasakianSphere> {
public:
    SasakianSphere(int n, double c) {
        if (n < 1) throw SpaceError("sasakian_sphere: n must be >= 1");
        if (!(c > -3)) throw SpaceError("sasakian_sphere: requires c > -3");
        kind_ = SpaceKind::sasakian_sphere;
        structure_ = StructureKind::contact;
        contact_ = ContactClass::sasaki;
        n_ = n;
        dim_ = 2 * n + 1;
        c_ = c;
        a_ = 4.0 / (c + 3.0);
        auto f = space_form_coefficients(ContactClass::sasaki, c);
        model_.family = CurvatureModel::Family::gssf;
        model_.coeffs = {detail::constant_coefficient(f[0]), detail::constant_coefficient(f[1]),
                         detail::constant_coefficient(f[2])};
        label_ = "sasakian_sphere(" + std::to_string(n) + ", " + detail::format_number(c) + ")";
    }

    double deformation() const { return a_; }

    // embedding X(y) and its chart derivatives dX[a][b] = d X_b / d y_a
    template <class T>
    void embedding(const std::vector<T>& y, std::vector<T>& X, std::vector<T>& dX, T& lambda2) const {
        const int N = dim_, E = dim_ + 1;
        T r2 = detail::konst(y[0], 0.0);
        for (int i = 0; i < N; ++i) r2 = r2 + y[i] * y[i];
        T q = 1.0 / (1.0 + r2);
        X.assign(E, detail::konst(y[0], 0.0));
        dX.assign(N * E, detail::konst(y[0], 0.0));
        for (int b = 0; b < N; ++b) X[b] = 2.0 * y[b] * q;
        X[N] = (1.0 - r2) * q;
        T q2 = q * q;
        for (int a = 0; a < N; ++a) {
            for (int b = 0; b < N; ++b) {
                T v = -4.0 * y[a] * y[b] * q2;
                if (a == b) v = v + 2.0 * q;
                dX[a * E + b] = v;
            }
            dX[a * E + N] = -4.0 * y[a] * q2;
        }
        lambda2 = 4.0 * q2;
    }

    template <class T>
    static std::vector<T> apply_J(const std::vector<T>& v) {
        std::vector<T> r(v.size(), v[0] * 0.0);
        for (size_t k = 0; k + 1 < v.size(); k += 2) {
            r[k] = -v[k + 1];
            r[k + 1] = v[k];
        }
        return r;
    }

    template <class T>
    std::vector<T> round_eta(const std::vector<T>& X, const std::vector<T>& dX) const {
        const int N = dim_, E = dim_ + 1;
        auto JX = apply_J(X);
        std::vector<T> eta(N, X[0] * 0.0);
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < E; ++b) eta[a] = eta[a] + JX[b] * dX[a * E + b];
        return eta;
    }

    template <class T>
    std::vector<T> metric_t(const std::vector<T>& y) const {
        std::vector<T> X, dX;
        T l2;
        embedding(y, X, dX, l2);
        auto eta = round_eta(X, dX);
        const int N = dim_;
        std::vector<T> g(N * N, detail::konst(y[0], 0.0));
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                T v = a_ * (a_ - 1.0) * eta[i] * eta[j];
                if (i == j) v = v + a_ * l2;
                g[i * N + j] = v;
            }
        return g;
    }

    template <class T>
    StructureFields<T> structure_t(const std::vector<T>& y) const {
        std::vector<T> X, dX;
        T l2;
        embedding(y, X, dX, l2);
        const int N = dim_, E = dim_ + 1;
        auto eta = round_eta(X, dX);
        StructureFields<T> s;
        s.xi.resize(N, detail::konst(y[0], 0.0));
        s.eta.resize(N, detail::konst(y[0], 0.0));
        for (int i = 0; i < N; ++i) {
            s.xi[i] = eta[i] / (l2 * a_);
            s.eta[i] = a_ * eta[i];
        }
        s.phi.assign(N * N, detail::konst(y[0], 0.0));
        for (int b = 0; b < N; ++b) {
            std::vector<T> col(dX.begin() + b * E, dX.begin() + (b + 1) * E);
            auto Jcol = apply_J(col);
            for (int a = 0; a < N; ++a) {
                T v = detail::konst(y[0], 0.0);
                for (int k = 0; k < E; ++k) v = v + dX[a * E + k] * Jcol[k];
                s.phi[a * N + b] = -v / l2;
            }
        }
        return s;
    }

private:
    double a_ = 1.0;
};

// Flat R^(2n+1), coordinates (x1, y1, ..., xn, yn, z), xi = d/dz.
class CosymplecticFlat : public detail::SpaceImpl<CosymplecticFlat> {
public:
    explicit CosymplecticFlat(int n) {
        if (n < 1) throw SpaceError("cosymplectic_flat: n must be >= 1");
        kind_ = SpaceKind::cosymplectic_flat;
        structure_ = StructureKind::contact;
        contact_ = ContactClass::cosymplectic;
        n_ = n;
        dim_ = 2 * n + 1;
        model_.family = CurvatureModel::Family::gssf;
        model_.coeffs = {detail::constant_coefficient(0), detail::constant_coefficient(0),
                         detail::constant_coefficient(0)};
        label_ = "cosymplectic_flat(" + std::to_string(n) + ")";
    }
    template <class T>
    std::vector<T> metric_t(const std::vector<T>& x) const {
        std::vector<T> g(dim_ * dim_, detail::konst(x[0], 0.0));
        for (int i = 0; i < dim_; ++i) g[i * dim_ + i] = detail::konst(x[0], 1.0);
        return g;
    }
    template <class T>
    StructureFields<T> structure_t(const std::vector<T>& x) const {
        StructureFields<T> s;
        s.phi = detail::standard_J(x[0], n_, dim_);
        s.xi.assign(dim_, detail::konst(x[0], 0.0));
        s.eta = s.xi;
        s.xi[dim_ - 1] = detail::konst(x[0], 1.0);
        s.eta[dim_ - 1] = detail::konst(x[0], 1.0);
        return s;
    }
};

// Hyperbolic space as the warped product dt^2 + e^(2t) (flat C^n),
// coordinates (x1, y1, ..., xn, yn, t), xi = d/dt.
class KenmotsuHyperbolic : public detail::SpaceImpl<KenmotsuHyperbolic> {
public:
    explicit KenmotsuHyperbolic(int n) {
        if (n < 1) throw SpaceError("kenmotsu_hyperbolic: n must be >= 1");
        kind_ = SpaceKind::kenmotsu_hyperbolic;
        structure_ = StructureKind::contact;
        contact_ = ContactClass::kenmotsu;
        n_ = n;
        dim_ = 2 * n + 1;
        c_ = -1;
        auto f = space_form_coefficients(ContactClass::kenmotsu, -1);
        model_.family = CurvatureModel::Family::gssf;
        model_.coeffs = {detail::constant_coefficient(f[0]), detail::constant_coefficient(f[1]),
                         detail::constant_coefficient(f[2])};
        label_ = "kenmotsu_hyperbolic(" + std::to_string(n) + ")";
    }
    template <class T>
    std::vector<T> metric_t(const std::vector<T>& x) const {
        using std::exp;
        std::vector<T> g(dim_ * dim_, detail::konst(x[0], 0.0));
        T w = exp(2.0 * x[dim_ - 1]);
        for (int i = 0; i + 1 < dim_; ++i) g[i * dim_ + i] = w;
        g[dim_ * dim_ - 1] = detail::konst(x[0], 1.0);
        return g;
    }
    template <class T>
    StructureFields<T> structure_t(const std::vector<T>& x) const {
        StructureFields<T> s;
        s.phi = detail::standard_J(x[0], n_, dim_);
        s.xi.assign(dim_, detail::konst(x[0], 0.0));
        s.eta = s.xi;
        s.xi[dim_ - 1] = detail::konst(x[0], 1.0);
        s.eta[dim_ - 1] = detail::konst(x[0], 1.0);
        return s;
    }
};

// Curvature-model-only spaces. The chart carries the identity metric and the
// standard structure as an algebraic model of one tangent space; no connection.
class AbstractSpaceForm : public detail::SpaceImpl<AbstractSpaceForm> {
public:
    // gcsf: dim 4, coefficient names {alpha, beta}; gssf: dim 2n+1, {f1, f2, f3}
    AbstractSpaceForm(bool contact, int n, std::vector<Coefficient> coeffs) {
        concrete_ = false;
        if (contact) {
            if (n < 1) throw SpaceError("abstract_gssf: n must be >= 1");
            if (coeffs.size() != 3) throw SpaceError("abstract_gssf needs f1, f2, f3");
            kind_ = SpaceKind::abstract_gssf;
            structure_ = StructureKind::contact;
            n_ = n;
            dim_ = 2 * n + 1;
            model_.family = CurvatureModel::Family::gssf;
        } else {
            if (coeffs.size() != 2) throw SpaceError("abstract_gcsf needs alpha, beta");
            kind_ = SpaceKind::abstract_gcsf;
            n_ = 2;
            dim_ = 4;
            model_.family = CurvatureModel::Family::gcsf;
        }
        model_.coeffs = std::move(coeffs);
        label_ = std::string(to_string(kind_)) + "(" + std::to_string(dim_) + ")";
    }
    template <class T>
    std::vector<T> metric_t(const std::vector<T>& x) const {
        std::vector<T> g(dim_ * dim_, detail::konst(x[0], 0.0));
        for (int i = 0; i < dim_; ++i) g[i * dim_ + i] = detail::konst(x[0], 1.0);
        return g;
    }
    template <class T>
    StructureFields<T> structure_t(const std::vector<T>& x) const {
        if (structure_ == StructureKind::hermitian) return {detail::standard_J(x[0], n_, dim_), {}, {}, {}};
        StructureFields<T> s;
        s.phi = detail::standard_J(x[0], n_, dim_);
        s.xi.assign(dim_, detail::konst(x[0], 0.0));
        s.eta = s.xi;
        s.xi[dim_ - 1] = detail::konst(x[0], 1.0);
        s.eta[dim_ - 1] = detail::konst(x[0], 1.0);
        return s;
    }
};

// ---------------------------------------------------------------------------
// Connection and curvature from metric jets

// Taylor data of the ambient metric about x0 in the chart variables.
struct AmbientJets {
    int N = 0;
    Vec x0;
    JetVec g;      // N*N, order k
    JetVec ginv;   // N*N, order k
    JetVec gamma;  // Gamma^c_{ab} at (c*N + a)*N + b, order k-1
};

inline AmbientJets ambient_jets(const AmbientSpace& space, const Vec& x0, int order) {
    space.require_concrete("ambient connection");
    space.check_point(x0);
    const int N = space.dim();
    AmbientJets aj;
    aj.N = N;
    aj.x0 = x0;
    JetVec x;
    for (int i = 0; i < N; ++i) x.push_back(seed_variable(i, x0[i], N, order));
    aj.g = space.metric_jet(x);
    aj.ginv = jet_inverse(aj.g, N);
    if (order == 0) return aj;
    std::vector<JetVec> dg;
    for (int l = 0; l < N; ++l) dg.push_back(differentiate_all(aj.g, l));
    JetVec gi = truncate_all(aj.ginv, order - 1);
    // lowered symbols Gamma_{l,ab} = (d_a g_bl + d_b g_al - d_l g_ab)/2
    JetVec low(N * N * N);
    for (int l = 0; l < N; ++l)
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b)
                low[(l * N + a) * N + b] = 0.5 * (dg[a][b * N + l] + dg[b][a * N + l] - dg[l][a * N + b]);
    aj.gamma.assign(N * N * N, gi[0].constant_like(0.0));
    for (int c = 0; c < N; ++c)
        for (int a = 0; a < N; ++a)
            for (int b = a; b < N; ++b) {
                Jet s = gi[0].constant_like(0.0);
                for (int l = 0; l < N; ++l) s.add_product(gi[c * N + l], low[(l * N + a) * N + b]);
                aj.gamma[(c * N + a) * N + b] = s;
                aj.gamma[(c * N + b) * N + a] = s;
            }
    return aj;
}

// Gamma^c_{ab} at a point, index (c*N + a)*N + b
inline std::vector<double> christoffels_at(const AmbientSpace& space, const Vec& x) {
    auto aj = ambient_jets(space, x, 1);
    std::vector<double> r;
    for (const auto& j : aj.gamma) r.push_back(j.value());
    return r;
}

// R^k_{l i j} with R(d_i, d_j) d_l = R^k_{lij} d_k, stored at ((k*N + l)*N + i)*N + j
struct CurvatureTensor {
    int N = 0;
    std::vector<double> R;

    Vec apply(const Vec& X, const Vec& Y, const Vec& Z) const {
        Vec out = Vec::Zero(N);
        for (int k = 0; k < N; ++k) {
            double s = 0;
            for (int l = 0; l < N; ++l) {
                if (Z[l] == 0) continue;
                for (int i = 0; i < N; ++i) {
                    if (X[i] == 0) continue;
                    for (int j = 0; j < N; ++j) s += R[((k * N + l) * N + i) * N + j] * X[i] * Y[j] * Z[l];
                }
            }
            out[k] = s;
        }
        return out;
    }
};

inline CurvatureTensor curvature_from_gamma(const JetVec& gamma, int N) {
    CurvatureTensor t;
    t.N = N;
    t.R.assign(N * N * N * N, 0.0);
    auto G = [&](int c, int a, int b) -> const Jet& { return gamma[(c * N + a) * N + b]; };
    for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l)
            for (int i = 0; i < N; ++i)
                for (int j = 0; j < N; ++j) {
                    double v = G(k, j, l).d(i) - G(k, i, l).d(j);
                    for (int m = 0; m < N; ++m)
                        v += G(k, i, m).value() * G(m, j, l).value() - G(k, j, m).value() * G(m, i, l).value();
                    t.R[((k * N + l) * N + i) * N + j] = v;
                }
    return t;
}

inline CurvatureTensor curvature_tensor_at(const AmbientSpace& space, const Vec& x) {
    auto aj = ambient_jets(space, x, 2);
    return curvature_from_gamma(aj.gamma, space.dim());
}

inline Vec curvature_concrete(const AmbientSpace& space, const Vec& x, const Vec& X, const Vec& Y, const Vec& Z) {
    return curvature_tensor_at(space, x).apply(X, Y, Z);
}

// Algebraic curvature of the space-form families at a point with metric g.
inline Vec curvature_model(const CurvatureModel& model, const Structure& s, const Mat& g, const Vec& x,
                           const Vec& X, const Vec& Y, const Vec& Z) {
    auto ip = [&](const Vec& a, const Vec& b) { return a.dot(g * b); };
    auto coeff = model.at(x);
    Vec R1 = ip(Y, Z) * X - ip(X, Z) * Y;
    if (model.family == CurvatureModel::Family::gssf) {
        if (s.kind != StructureKind::contact) throw SpaceError("curvature_model: GSSF needs a contact structure");
        double ex = s.eta.dot(X), ey = s.eta.dot(Y), ez = s.eta.dot(Z);
        Vec R2 = ex * ez * Y - ey * ez * X + ip(X, Z) * ey * s.xi - ip(Y, Z) * ex * s.xi;
        auto Om = [&](const Vec& a, const Vec& b) { return ip(a, s.phi * b); };
        Vec R3 = Om(Z, Y) * (s.phi * X) - Om(Z, X) * (s.phi * Y) + 2 * Om(X, Y) * (s.phi * Z);
        return coeff[0] * R1 + coeff[1] * R2 + coeff[2] * R3;
    }
    if (s.kind != StructureKind::hermitian) throw SpaceError("curvature_model: GCSF/CSF needs a Hermitian structure");
    Vec JX = s.J * X, JY = s.J * Y, JZ = s.J * Z;
    Vec R2 = ip(JY, Z) * JX - ip(JX, Z) * JY + 2 * ip(JY, X) * JZ;
    auto [alpha, beta] = model.alpha_beta(x);
    return alpha * R1 + beta * R2;
}

inline Structure structure_tensors_at(const AmbientSpace& space, const Vec& x) { return space.structure_at(x); }

inline Mat metric_at(const AmbientSpace& space, const Vec& x) { return space.metric_at(x); }

// ---------------------------------------------------------------------------

struct AmbientSpec {
    std::string kind;
    int n = 1;
    double c = 0;
    bool has_c = false;
    std::vector<std::string> coefficients;  // abstract families
};

inline std::shared_ptr<AmbientSpace> make_space(const AmbientSpec& spec) {
    const std::string& k = spec.kind;
    if (k == "euclidean_complex") return std::make_shared<EuclideanComplex>(spec.n);
    if (k == "fubini_study") {
        if (!(spec.c > 0)) throw SpaceError("fubini_study needs c > 0");
        return std::make_shared<ComplexSpaceForm>(spec.n, spec.c);
    }
    if (k == "complex_hyperbolic") {
        if (!(spec.c < 0)) throw SpaceError("complex_hyperbolic needs c < 0");
        return std::make_shared<ComplexSpaceForm>(spec.n, spec.c);
    }
    if (k == "sasakian_sphere") return std::make_shared<SasakianSphere>(spec.n, spec.has_c ? spec.c : 1.0);
    if (k == "cosymplectic_flat") {
        if (spec.has_c && spec.c != 0) throw SpaceError("cosymplectic_flat has c = 0");
        return std::make_shared<CosymplecticFlat>(spec.n);
    }
    if (k == "kenmotsu_hyperbolic") {
        if (spec.has_c && spec.c != -1) throw SpaceError("kenmotsu_hyperbolic has c = -1");
        return std::make_shared<KenmotsuHyperbolic>(spec.n);
    }
    if (k == "abstract_gcsf" || k == "abstract_gssf") {
        bool contact = k == "abstract_gssf";
        int dim = contact ? 2 * spec.n + 1 : 4;
        std::vector<std::string> names;
        for (int i = 1; i <= dim; ++i) names.push_back("x" + std::to_string(i));
        std::vector<Coefficient> cs;
        for (const auto& src : spec.coefficients) cs.push_back(Coefficient{0.0, parse(src, names)});
        return std::make_shared<AbstractSpaceForm>(contact, spec.n, std::move(cs));
    }
    throw SpaceError("unknown ambient kind '" + k + "'");
}

}  // namespace biharm

#endif
