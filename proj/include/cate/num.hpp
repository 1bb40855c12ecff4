#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace cate {

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// y += alpha * x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// Projects a row back onto the unit sphere. No-op for the zero vector.
inline void normalize(std::span<double> a) {
    const double n = norm(a);
    if (n <= 0.0) return;
    const double inv = 1.0 / n;
    for (double& x : a) x *= inv;
}

inline double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// log(1 + exp(x)), overflow-safe. softplus(-s) == -log(sigmoid(s)).
inline double softplus(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

// Max-shifted softmax; entries positive, sum exactly normalized.
inline std::vector<double> softmax(std::span<const double> logits) {
    double m = logits[0];
    for (double x : logits) m = std::max(m, x);
    std::vector<double> p(logits.size());
    double z = 0.0;
    for (std::size_t j = 0; j < logits.size(); ++j) {
        p[j] = std::exp(logits[j] - m);
        z += p[j];
    }
    for (double& x : p) x /= z;
    return p;
}

}  // namespace cate
