#include "udseg/tensor.hpp"

#include <cmath>
#include <limits>

namespace udseg {

void matmul_into(const Tensor& a, const Tensor& b, Tensor& c, bool accumulate) {
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    if (b.rows() != k) throw std::invalid_argument("matmul: inner dimensions disagree");
    if (c.rows() != m || c.cols() != n) throw std::invalid_argument("matmul: bad output shape");
    const double* pa = a.data();
    const double* pb = b.data();
    double* pc = c.data();
    if (!accumulate) c.fill(0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = pa + i * k;
        double* crow = pc + i * n;
        for (std::size_t kk = 0; kk < k; ++kk) {
            const double av = arow[kk];
            if (av == 0.0) continue;
            const double* brow = pb + kk * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void matmul_nt_into(const Tensor& a, const Tensor& b, Tensor& c) {
    const std::size_t m = a.rows(), n = a.cols(), k = b.rows();
    if (b.cols() != n) throw std::invalid_argument("matmul_nt: shapes disagree");
    if (c.rows() != m || c.cols() != k) throw std::invalid_argument("matmul_nt: bad output shape");
    const double* pa = a.data();
    const double* pb = b.data();
    double* pc = c.data();
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = pa + i * n;
        double* crow = pc + i * k;
        for (std::size_t kk = 0; kk < k; ++kk) {
            const double* brow = pb + kk * n;
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += arow[j] * brow[j];
            crow[kk] += acc;
        }
    }
}

void matmul_tn_into(const Tensor& a, const Tensor& b, Tensor& c) {
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    if (b.rows() != m) throw std::invalid_argument("matmul_tn: shapes disagree");
    if (c.rows() != k || c.cols() != n) throw std::invalid_argument("matmul_tn: bad output shape");
    const double* pa = a.data();
    const double* pb = b.data();
    double* pc = c.data();
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = pa + i * k;
        const double* brow = pb + i * n;
        for (std::size_t kk = 0; kk < k; ++kk) {
            const double av = arow[kk];
            if (av == 0.0) continue;
            double* crow = pc + kk * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    Tensor c({a.rows(), b.cols()});
    matmul_into(a, b, c);
    return c;
}

void add_inplace(Tensor& a, const Tensor& b) {
    if (a.numel() != b.numel()) throw std::invalid_argument("add: shape mismatch");
    double* pa = a.data();
    const double* pb = b.data();
    for (std::size_t i = 0; i < a.numel(); ++i) pa[i] += pb[i];
}

void add_rowvec_inplace(Tensor& a, const Tensor& v) {
    const std::size_t n = a.cols();
    if (v.numel() != n) throw std::invalid_argument("add_rowvec: width mismatch");
    double* pa = a.data();
    const double* pv = v.data();
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < n; ++j) pa[i * n + j] += pv[j];
}

void mul_inplace(Tensor& a, const Tensor& b) {
    if (a.numel() != b.numel()) throw std::invalid_argument("mul: shape mismatch");
    double* pa = a.data();
    const double* pb = b.data();
    for (std::size_t i = 0; i < a.numel(); ++i) pa[i] *= pb[i];
}

void scale_inplace(Tensor& a, double k) {
    for (std::size_t i = 0; i < a.numel(); ++i) a[i] *= k;
}

void sigmoid_inplace(Tensor& a) {
    for (std::size_t i = 0; i < a.numel(); ++i) a[i] = 1.0 / (1.0 + std::exp(-a[i]));
}

void tanh_inplace(Tensor& a) {
    for (std::size_t i = 0; i < a.numel(); ++i) a[i] = std::tanh(a[i]);
}

double l2_norm_squared(const Tensor& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.numel(); ++i) s += a[i] * a[i];
    return s;
}

double log_sum_exp(const double* xs, std::size_t n) {
    if (n == 0) return -std::numeric_limits<double>::infinity();
    double mx = xs[0];
    for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, xs[i]);
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::exp(xs[i] - mx);
    return mx + std::log(s);
}

}  // namespace udseg
