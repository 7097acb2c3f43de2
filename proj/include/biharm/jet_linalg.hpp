#ifndef BIHARM_JET_LINALG_HPP
#define BIHARM_JET_LINALG_HPP

// Dense row-major matrices whose entries are jets.

#include <Eigen/Dense>
#include <vector>

#include "biharm/jet.hpp"

namespace biharm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using JetVec = std::vector<Jet>;

inline JetVec truncate_all(const JetVec& v, int k) {
    JetVec r;
    r.reserve(v.size());
    for (const auto& j : v) r.push_back(j.truncated(k));
    return r;
}

inline JetVec differentiate_all(const JetVec& v, int var) {
    JetVec r;
    r.reserve(v.size());
    for (const auto& j : v) r.push_back(j.derivative(var));
    return r;
}

inline Mat jet_values(const JetVec& a, int rows, int cols) {
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = a[i * cols + j].value();
    return m;
}

inline Vec jet_values(const JetVec& a) {
    Vec v(a.size());
    for (size_t i = 0; i < a.size(); ++i) v[i] = a[i].value();
    return v;
}

// (n x k) * (k x m)
inline JetVec jet_matmul(const JetVec& a, const JetVec& b, int n, int k, int m) {
    JetVec r(n * m, a[0].constant_like(0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            for (int t = 0; t < k; ++t) r[i * m + j].add_product(a[i * k + t], b[t * m + j]);
    return r;
}

// Neumann series about the constant part; exact through the jet order.
inline JetVec jet_inverse(const JetVec& a, int n) {
    Mat a0 = jet_values(a, n, n);
    Eigen::FullPivLU<Mat> lu(a0);
    if (!lu.isInvertible() || std::abs(lu.determinant()) < 1e-300) throw JetError("jet_inverse: singular matrix");
    Mat inv0 = lu.inverse();
    const Jet& proto = a[0];
    JetVec i0(n * n), e(n * n);
    for (int i = 0; i < n * n; ++i) i0[i] = proto.constant_like(inv0(i / n, i % n));
    // e = -inv0 * (a - a0)
    JetVec hat = a;
    for (auto& j : hat) j.coeffs()[0] = 0.0;
    e = jet_matmul(i0, hat, n, n, n);
    for (auto& j : e) j *= -1.0;
    JetVec result = i0, term = i0;
    for (int k = 1; k <= proto.order(); ++k) {
        term = jet_matmul(e, term, n, n, n);
        for (int i = 0; i < n * n; ++i) result[i] += term[i];
    }
    return result;
}

}  // namespace biharm

#endif
