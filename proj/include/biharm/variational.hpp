#ifndef BIHARM_VARIATIONAL_HPP
#define BIHARM_VARIATIONAL_HPP

// Energies over compact parameter domains and the first-variation oracle.
//
// The variation is applied componentwise in the ambient chart, psi_t = psi + t V, and the
// domain metric stays the induced metric g0 of psi. With tension and bitension as in
// residuals.hpp the first variations are
//   dE/dt     = -  int <tau,   V>        dE_f/dt  = -  int <tau_f, V>
//   dE2/dt    = +  int <tau2,  V>        dE2f/dt  = +  int <tau2f, V>
//   dEf2/dt   = -2 int <bif,   V>
// The sign factor is part of the check output.

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <thread>

#include "biharm/residuals.hpp"

namespace biharm {

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Axis {
    double lo = 0, hi = 1;
    bool periodic = false;
    int nodes = 16;
};

struct QuadratureGrid {
    std::vector<Axis> axes;
    std::vector<Vec> points;
    std::vector<double> weights;
};

inline QuadratureGrid make_grid(const std::vector<Axis>& axes) {
    QuadratureGrid G;
    G.axes = axes;
    std::vector<std::vector<double>> X, W;
    for (const auto& ax : axes) {
        if (ax.nodes < 1) throw QuadratureError("quadrature axis needs at least one node");
        if (!(ax.hi > ax.lo)) throw QuadratureError("quadrature axis has an empty range");
        std::vector<double> x(ax.nodes), w(ax.nodes);
        if (ax.periodic) {
            double h = (ax.hi - ax.lo) / ax.nodes;
            for (int i = 0; i < ax.nodes; ++i) {
                x[i] = ax.lo + i * h;
                w[i] = h;
            }
        } else {
            gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(ax.nodes);
            if (!t) throw QuadratureError("Gauss-Legendre table allocation failed");
            for (int i = 0; i < ax.nodes; ++i) gsl_integration_glfixed_point(ax.lo, ax.hi, i, &x[i], &w[i], t);
            gsl_integration_glfixed_table_free(t);
        }
        X.push_back(std::move(x));
        W.push_back(std::move(w));
    }
    const int m = static_cast<int>(axes.size());
    std::vector<int> idx(m, 0);
    while (true) {
        Vec p(m);
        double w = 1;
        for (int a = 0; a < m; ++a) {
            p[a] = X[a][idx[a]];
            w *= W[a][idx[a]];
        }
        G.points.push_back(p);
        G.weights.push_back(w);
        int a = m - 1;
        while (a >= 0 && ++idx[a] == axes[a].nodes) idx[a--] = 0;
        if (a < 0) break;
    }
    return G;
}

inline QuadratureGrid refined(const QuadratureGrid& g, int factor) {
    auto ax = g.axes;
    for (auto& a : ax) a.nodes *= factor;
    return make_grid(ax);
}

inline double pairwise_sum(const double* v, size_t n) {
    if (n <= 8) {
        double s = 0;
        for (size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

// evaluates fn at every node in parallel, then reduces in a fixed order
inline double integrate(const QuadratureGrid& G, const std::function<double(const Vec&)>& fn, int threads = 0) {
    const size_t n = G.points.size();
    std::vector<double> vals(n, 0.0);
    if (threads <= 0) threads = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    threads = static_cast<int>(std::min<size_t>(threads, n));
    std::vector<std::exception_ptr> errs(threads);
    auto work = [&](int tid) {
        try {
            for (size_t i = tid; i < n; i += threads) vals[i] = G.weights[i] * fn(G.points[i]);
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
    return pairwise_sum(vals.data(), n);
}

enum class Functional { E, E2, E2f, Ef, Ef2 };

inline const std::vector<std::pair<Functional, const char*>>& functional_names() {
    static const std::vector<std::pair<Functional, const char*>> v = {
        {Functional::E, "E"}, {Functional::E2, "E2"}, {Functional::E2f, "E2f"}, {Functional::Ef, "Ef"}, {Functional::Ef2, "Ef2"}};
    return v;
}

inline const char* to_string(Functional w) {
    for (const auto& [k, n] : functional_names())
        if (k == w) return n;
    return "?";
}

inline Functional functional_from_string(const std::string& s) {
    for (const auto& [k, n] : functional_names())
        if (s == n) return k;
    throw QuadratureError("unknown functional '" + s + "' (E, E2, E2f, Ef, Ef2)");
}

inline double sign_factor(Functional w) {
    switch (w) {
        case Functional::E:
        case Functional::Ef: return -1;
        case Functional::E2:
        case Functional::E2f: return 1;
        case Functional::Ef2: return -2;
    }
    return 0;
}

inline double volume_element(const PointGeometry& pg) { return std::sqrt(jet_values(pg.g, pg.m, pg.m).determinant()); }

// integrand (without the volume element) of a functional at a point of a possibly varied map
inline double energy_density(const PointGeometry& pg, Functional w) {
    auto norm2 = [&](const Vec& v) { return v.dot(jet_values(pg.gt, pg.N, pg.N) * v); };
    switch (w) {
        case Functional::E:
        case Functional::Ef: {
            double s = 0;
            Mat gt = jet_values(pg.gt, pg.N, pg.N);
            for (int a = 0; a < pg.m; ++a)
                for (int b = 0; b < pg.m; ++b)
                    s += pg.ginv[a * pg.m + b].value() * jet_values(pg.dpsi[a]).dot(gt * jet_values(pg.dpsi[b]));
            return 0.5 * s * (w == Functional::Ef ? pg.f.value() : 1.0);
        }
        case Functional::E2: return 0.5 * norm2(tension(pg));
        case Functional::E2f: return 0.5 * pg.f.value() * norm2(tension(pg));
        case Functional::Ef2: return norm2(f_tension(pg));
    }
    return 0;
}

inline double energy(const Immersion& imm, const QuadratureGrid& G, Functional w, const std::vector<Expression>* V = nullptr,
                     double t = 0) {
    return integrate(G, [&](const Vec& p) {
        PointGeometry pg(imm, p, 2, {V, t});
        return energy_density(pg, w) * volume_element(pg);
    });
}

inline Vec euler_lagrange(const PointGeometry& pg, Functional w) {
    switch (w) {
        case Functional::E: return tension(pg);
        case Functional::Ef: return f_tension(pg);
        case Functional::E2: return bitension_direct(pg);
        case Functional::E2f: return f_bitension_direct(pg);
        case Functional::Ef2: return bi_f_tension_direct(pg);
    }
    return {};
}

struct VariationStep {
    double h = 0, lhs = 0, rhs = 0, delta = 0;
};

struct VariationCheck {
    Functional which = Functional::E;
    double sign = 0;
    double rhs = 0;
    std::vector<VariationStep> steps;
    double plateau = 0;           // delta at the smallest step
    double observed_order = 0;    // log10 ratio between the two largest steps
    bool decay_ok = false;
    bool pass = false;
};

inline std::vector<Expression> parse_variation(const Immersion& imm, const std::vector<std::string>& V) {
    if (static_cast<int>(V.size()) != imm.N())
        throw QuadratureError("variation needs " + std::to_string(imm.N()) + " components");
    std::vector<Expression> r;
    for (const auto& s : V) r.push_back(parse(s, imm.params));
    return r;
}

inline VariationCheck first_variation_check(const Immersion& imm, const QuadratureGrid& G, Functional w,
                                            const std::vector<Expression>& V,
                                            const std::vector<double>& hs = {1e-2, 1e-3, 1e-4}, double tol = 1e-5) {
    VariationCheck vc;
    vc.which = w;
    vc.sign = sign_factor(w);
    vc.rhs = vc.sign * integrate(G, [&](const Vec& p) {
        PointGeometry pg(imm, p);
        Vec Vv(imm.N());
        std::vector<double> pv(p.data(), p.data() + p.size());
        for (int i = 0; i < imm.N(); ++i) Vv[i] = eval(V[i], pv);
        Vec el = euler_lagrange(pg, w);
        return el.dot(jet_values(pg.gt, pg.N, pg.N) * Vv) * volume_element(pg);
    });
    for (double h : hs) {
        VariationStep st;
        st.h = h;
        double ep, em;
        try {
            ep = energy(imm, G, w, &V, h);
            em = energy(imm, G, w, &V, -h);
        } catch (const SpaceError& e) {
            throw QuadratureError(std::string("variation exits the ambient chart: ") + e.what());
        }
        st.lhs = (ep - em) / (2 * h);
        st.rhs = vc.rhs;
        st.delta = std::abs(st.lhs - st.rhs);
        vc.steps.push_back(st);
    }
    vc.plateau = vc.steps.back().delta;
    // O(h^2) while truncation dominates; once at the floor the sequence may stall
    const double floor_ = 1e-9;
    vc.decay_ok = true;
    if (vc.steps.size() >= 2) {
        const auto& a = vc.steps[0];
        const auto& b = vc.steps[1];
        double ratio_h = a.h / b.h;
        vc.observed_order = (a.delta > 0 && b.delta > 0) ? std::log(a.delta / b.delta) / std::log(ratio_h) : 0;
        if (b.delta > floor_) vc.decay_ok = vc.observed_order >= 1.5;
    }
    vc.pass = vc.plateau <= tol && vc.decay_ok;
    return vc;
}

}  // namespace biharm

#endif
