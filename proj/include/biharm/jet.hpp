#ifndef BIHARM_JET_HPP
#define BIHARM_JET_HPP

// Truncated multivariate Taylor jets, total order <= 4.
// Coefficients are stored densely, one per multi-index, as d^g f / g!.

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace biharm {

inline constexpr int kMaxJetOrder = 4;

struct JetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shared multi-index tables for one (num_vars, order) pair.
class JetLayout {
public:
    int nvars;
    int order;
    std::vector<std::vector<int>> index;  // graded order: degree 0, 1, 2, ...
    std::vector<int> degree;
    std::vector<double> factorial;        // g! for each multi-index
    std::vector<std::array<int, 3>> products;
    std::vector<int> up;                  // up[i*nvars+v]: index of g+e_v, -1 if too high
    std::vector<int> down;                // down[i*nvars+v]: index of g-e_v, -1 if g_v == 0

    int size() const { return static_cast<int>(index.size()); }

    int find(const std::vector<int>& g) const {
        auto it = lookup_.find(g);
        return it == lookup_.end() ? -1 : it->second;
    }

    static std::shared_ptr<const JetLayout> get(int nvars, int order) {
        if (nvars < 0 || nvars > 16) throw JetError("jet: num_vars out of range");
        if (order < 0 || order > kMaxJetOrder) throw JetError("jet: order out of range");
        static std::mutex mu;
        static std::map<std::pair<int, int>, std::shared_ptr<const JetLayout>> cache;
        std::lock_guard<std::mutex> lock(mu);
        auto& slot = cache[{nvars, order}];
        if (!slot) slot = std::shared_ptr<const JetLayout>(new JetLayout(nvars, order));
        return slot;
    }

private:
    std::map<std::vector<int>, int> lookup_;

    JetLayout(int n, int k) : nvars(n), order(k) {
        std::vector<int> g(n, 0);
        for (int d = 0; d <= k; ++d) enumerate(g, 0, d);
        for (int i = 0; i < size(); ++i) lookup_[index[i]] = i;
        up.assign(size() * n, -1);
        down.assign(size() * n, -1);
        for (int i = 0; i < size(); ++i) {
            double fac = 1;
            for (int v = 0; v < n; ++v)
                for (int t = 2; t <= index[i][v]; ++t) fac *= t;
            factorial.push_back(fac);
            for (int v = 0; v < n; ++v) {
                auto h = index[i];
                ++h[v];
                up[i * n + v] = find(h);
                if (index[i][v] > 0) {
                    h[v] -= 2;
                    down[i * n + v] = find(h);
                }
            }
        }
        for (int i = 0; i < size(); ++i)
            for (int j = 0; j < size(); ++j) {
                if (degree[i] + degree[j] > k) continue;
                std::vector<int> h(n);
                for (int v = 0; v < n; ++v) h[v] = index[i][v] + index[j][v];
                products.push_back({i, j, find(h)});
            }
    }

    void enumerate(std::vector<int>& g, int v, int remaining) {
        if (v == nvars) {
            if (remaining == 0) {
                index.push_back(g);
                degree.push_back(sum(g));
            }
            return;
        }
        if (v == nvars - 1) {
            g[v] = remaining;
            enumerate(g, v + 1, 0);
            g[v] = 0;
            return;
        }
        for (int a = remaining; a >= 0; --a) {
            g[v] = a;
            enumerate(g, v + 1, remaining - a);
        }
        g[v] = 0;
    }

    static int sum(const std::vector<int>& g) {
        int s = 0;
        for (int x : g) s += x;
        return s;
    }
};

class Jet {
public:
    Jet() = default;

    Jet(int nvars, int order, double value = 0.0)
        : layout_(JetLayout::get(nvars, order)), c_(layout_->size(), 0.0) {
        c_[0] = value;
    }

    explicit Jet(std::shared_ptr<const JetLayout> layout, double value = 0.0)
        : layout_(std::move(layout)), c_(layout_->size(), 0.0) {
        c_[0] = value;
    }

    static Jet variable(int index, double value, int nvars, int order) {
        if (index < 0 || index >= nvars) throw JetError("seed_variable: index out of range");
        Jet j(nvars, order, value);
        if (order >= 1) j.c_[1 + index] = 1.0;
        return j;
    }

    bool valid() const { return static_cast<bool>(layout_); }
    int num_vars() const { return layout_->nvars; }
    int order() const { return layout_->order; }
    const JetLayout& layout() const { return *layout_; }
    const std::shared_ptr<const JetLayout>& layout_ptr() const { return layout_; }
    double value() const { return c_[0]; }
    const std::vector<double>& coeffs() const { return c_; }
    std::vector<double>& coeffs() { return c_; }

    double coeff(const std::vector<int>& g) const {
        int i = checked_index(g);
        return c_[i];
    }

    // d^g f at the base point
    double partial(const std::vector<int>& g) const {
        int i = checked_index(g);
        return c_[i] * layout_->factorial[i];
    }

    // first partial along one variable, convenience
    double d(int v) const { return layout_->order >= 1 ? c_[1 + v] : throw JetError("jet: order 0"); }

    Jet derivative(int v) const {
        if (order() == 0) throw JetError("jet: cannot differentiate an order-0 jet");
        if (v < 0 || v >= num_vars()) throw JetError("jet: variable out of range");
        Jet r(num_vars(), order() - 1);
        const auto& L = *layout_;
        for (int i = 0; i < r.layout_->size(); ++i) {
            int src = L.up[L.find(r.layout_->index[i]) * L.nvars + v];
            r.c_[i] = c_[src] * (r.layout_->index[i][v] + 1);
        }
        return r;
    }

    Jet truncated(int k) const {
        if (k > order()) throw JetError("jet: cannot raise order by truncation");
        if (k == order()) return *this;
        Jet r(num_vars(), k);
        for (int i = 0; i < r.layout_->size(); ++i) r.c_[i] = c_[i];
        return r;
    }

    Jet constant_like(double v) const { return Jet(layout_, v); }

    Jet& operator+=(const Jet& o) {
        check_same(o);
        for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        check_same(o);
        for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
        return *this;
    }
    Jet& operator*=(double s) {
        for (double& x : c_) x *= s;
        return *this;
    }
    Jet& operator+=(double s) {
        c_[0] += s;
        return *this;
    }

    // r += a*b without temporaries
    void add_product(const Jet& a, const Jet& b) {
        check_same(a);
        check_same(b);
        for (const auto& t : layout_->products) c_[t[2]] += a.c_[t[0]] * b.c_[t[1]];
    }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r(a.layout_);
        r.c_[0] = 0.0;
        r.add_product(a, b);
        return r;
    }
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator+(Jet a, double s) { return a += s; }
    friend Jet operator+(double s, Jet a) { return a += s; }
    friend Jet operator-(Jet a, double s) { return a += -s; }
    friend Jet operator-(double s, const Jet& a) { return -a + s; }
    friend Jet operator-(Jet a) { return a *= -1.0; }
    friend Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
    friend Jet operator/(Jet a, double s) { return a *= 1.0 / s; }
    friend Jet operator/(double s, const Jet& a) { return reciprocal(a) * s; }

    // sum_k d[k] * (x - x0)^k, d[k] = f^(k)(x0)/k!
    static Jet compose_univariate(const Jet& x, const std::array<double, kMaxJetOrder + 1>& d) {
        Jet dx = x;
        dx.c_[0] = 0.0;
        Jet r(x.layout_, d[x.order()]);
        for (int k = x.order() - 1; k >= 0; --k) {
            r = r * dx;
            r.c_[0] += d[k];
        }
        return r;
    }

    friend Jet reciprocal(const Jet& a) {
        double a0 = a.value();
        if (a0 == 0.0) throw JetError("jet: division by a jet with zero constant term");
        std::array<double, kMaxJetOrder + 1> d{};
        double p = 1.0 / a0;
        for (int k = 0; k <= kMaxJetOrder; ++k) {
            d[k] = (k % 2 ? -p : p);
            p /= a0;
        }
        return compose_univariate(a, d);
    }

private:
    std::shared_ptr<const JetLayout> layout_;
    std::vector<double> c_;

    int checked_index(const std::vector<int>& g) const {
        if (static_cast<int>(g.size()) != num_vars()) throw JetError("jet: multi-index size mismatch");
        int s = 0;
        for (int x : g) {
            if (x < 0) throw JetError("jet: negative multi-index entry");
            s += x;
        }
        if (s > order()) throw JetError("jet: multi-index exceeds order");
        return layout_->find(g);
    }

    void check_same(const Jet& o) const {
        if (layout_ != o.layout_) {
            if (!layout_ || !o.layout_) throw JetError("jet: uninitialised operand");
            throw JetError("jet: num_vars/order mismatch (" + std::to_string(num_vars()) + "," +
                           std::to_string(order()) + ") vs (" + std::to_string(o.num_vars()) + "," +
                           std::to_string(o.order()) + ")");
        }
    }
};

inline Jet seed_variable(int index, double value, int nvars, int order) {
    return Jet::variable(index, value, nvars, order);
}

inline double extract_partial(const Jet& j, const std::vector<int>& g) { return j.partial(g); }

inline Jet exp(const Jet& a) {
    std::array<double, kMaxJetOrder + 1> d{};
    double e = std::exp(a.value()), fac = 1;
    for (int k = 0; k <= kMaxJetOrder; ++k) {
        if (k > 0) fac *= k;
        d[k] = e / fac;
    }
    return Jet::compose_univariate(a, d);
}

inline Jet log(const Jet& a) {
    double a0 = a.value();
    if (!(a0 > 0)) throw JetError("jet: log of nonpositive value");
    std::array<double, kMaxJetOrder + 1> d{};
    d[0] = std::log(a0);
    double p = 1.0;
    for (int k = 1; k <= kMaxJetOrder; ++k) {
        p /= a0;
        d[k] = (k % 2 ? 1.0 : -1.0) * p / k;
    }
    return Jet::compose_univariate(a, d);
}

inline Jet sin(const Jet& a) {
    double s = std::sin(a.value()), c = std::cos(a.value());
    return Jet::compose_univariate(a, {s, c, -s / 2, -c / 6, s / 24});
}

inline Jet cos(const Jet& a) {
    double s = std::sin(a.value()), c = std::cos(a.value());
    return Jet::compose_univariate(a, {c, -s, -c / 2, s / 6, c / 24});
}

inline Jet tan(const Jet& a) {
    double c = std::cos(a.value());
    if (c == 0.0) throw JetError("jet: tan at a pole");
    double t = std::tan(a.value()), s = 1 + t * t;
    return Jet::compose_univariate(a, {t, s, 2 * t * s / 2, s * (2 + 6 * t * t) / 6,
                                       s * (16 * t + 24 * t * t * t) / 24});
}

inline Jet atan(const Jet& a) {
    double x = a.value(), q = 1 + x * x;
    return Jet::compose_univariate(a, {std::atan(x), 1 / q, -2 * x / (q * q) / 2,
                                       (6 * x * x - 2) / (q * q * q) / 6,
                                       24 * x * (1 - x * x) / (q * q * q * q) / 24});
}

inline Jet pow(const Jet& a, double p) {
    if (p == std::floor(p) && std::abs(p) <= 64) {
        int n = static_cast<int>(std::abs(p));
        Jet r = a.constant_like(1.0), b = a;
        while (n) {
            if (n & 1) r = r * b;
            n >>= 1;
            if (n) b = b * b;
        }
        return p < 0 ? reciprocal(r) : r;
    }
    double a0 = a.value();
    if (!(a0 > 0)) throw JetError("jet: non-integer power of nonpositive value");
    std::array<double, kMaxJetOrder + 1> d{};
    double binom = 1.0;
    for (int k = 0; k <= kMaxJetOrder; ++k) {
        d[k] = binom * std::pow(a0, p - k);
        binom *= (p - k) / (k + 1);
    }
    return Jet::compose_univariate(a, d);
}

inline Jet sqrt(const Jet& a) {
    if (!(a.value() > 0)) throw JetError("jet: sqrt of nonpositive value");
    return pow(a, 0.5);
}

enum class JetOp { add, sub, mul, div, neg, pow, sin, cos, tan, exp, log, sqrt, atan };

// pow takes its exponent as the constant term of args[1]
inline Jet jet_apply(JetOp op, const std::vector<Jet>& args) {
    auto need = [&](size_t n) {
        if (args.size() != n) throw JetError("jet_apply: wrong number of arguments");
    };
    switch (op) {
        case JetOp::add: need(2); return args[0] + args[1];
        case JetOp::sub: need(2); return args[0] - args[1];
        case JetOp::mul: need(2); return args[0] * args[1];
        case JetOp::div: need(2); return args[0] / args[1];
        case JetOp::neg: need(1); return -args[0];
        case JetOp::pow: need(2); return pow(args[0], args[1].value());
        case JetOp::sin: need(1); return sin(args[0]);
        case JetOp::cos: need(1); return cos(args[0]);
        case JetOp::tan: need(1); return tan(args[0]);
        case JetOp::exp: need(1); return exp(args[0]);
        case JetOp::log: need(1); return log(args[0]);
        case JetOp::sqrt: need(1); return sqrt(args[0]);
        case JetOp::atan: need(1); return atan(args[0]);
    }
    throw JetError("jet_apply: unknown op");
}

// Substitute inner jets (all sharing one layout) into the Taylor polynomial `outer`,
// which is expanded about the constant terms of `inner`. Exact through
// min(outer.order, inner order).
inline Jet compose(const Jet& outer, const std::vector<Jet>& inner) {
    if (static_cast<int>(inner.size()) != outer.num_vars()) throw JetError("compose: arity mismatch");
    if (inner.empty()) throw JetError("compose: no inner jets");
    int k = std::min(outer.order(), inner[0].order());
    std::vector<Jet> dx;
    for (const auto& j : inner) {
        Jet t = j.truncated(k);
        t.coeffs()[0] = 0.0;
        dx.push_back(std::move(t));
    }
    const auto& L = outer.layout();
    // monomials dx^g in graded order, built from lower-degree ones
    std::vector<Jet> mono(L.size());
    Jet r(dx[0].layout_ptr(), 0.0);
    for (int i = 0; i < L.size(); ++i) {
        if (L.degree[i] > k) break;
        if (i == 0) {
            mono[0] = dx[0].constant_like(1.0);
        } else {
            int v = 0;
            while (L.index[i][v] == 0) ++v;
            mono[i] = mono[L.down[i * L.nvars + v]] * dx[v];
        }
        double c = outer.coeffs()[i];
        if (c != 0.0) {
            Jet t = mono[i];
            t *= c;
            r += t;
        }
    }
    return r;
}

}  // namespace biharm

#endif
