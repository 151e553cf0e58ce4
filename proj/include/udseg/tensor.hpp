#ifndef UDSEG_TENSOR_HPP
#define UDSEG_TENSOR_HPP

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace udseg {

// Dense row-major tensor of 64-bit floats. Rank is usually 1 or 2; the
// helpers below treat rank-1 tensors as row vectors where a matrix is
// expected.
class Tensor {
  public:
    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape)
        : shape_(std::move(shape)), data_(numel_of(shape_), 0.0) {}
    Tensor(std::vector<std::size_t> shape, std::vector<double> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        if (data_.size() != numel_of(shape_)) throw std::invalid_argument("tensor: shape/data mismatch");
    }

    static Tensor zeros(std::size_t rows, std::size_t cols) { return Tensor({rows, cols}); }
    static Tensor zeros_like(const Tensor& t) { return Tensor(t.shape_); }

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t numel() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    // Matrix view: rank-2 as is, rank-1 as (1 x n), scalar as (1 x 1).
    std::size_t rows() const { return shape_.size() >= 2 ? shape_[0] : 1; }
    std::size_t cols() const {
        if (shape_.empty()) return numel();
        return shape_.size() >= 2 ? shape_[1] : shape_[0];
    }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& vec() { return data_; }
    const std::vector<double>& vec() const { return data_; }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }
    double& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

    void fill(double v) { data_.assign(data_.size(), v); }

    bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  private:
    static std::size_t numel_of(const std::vector<std::size_t>& shape) {
        std::size_t n = 1;
        for (std::size_t d : shape) n *= d;
        return shape.empty() ? 0 : n;
    }

    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

// c = a * b, (m x k)(k x n). Accumulates when `accumulate` is set.
void matmul_into(const Tensor& a, const Tensor& b, Tensor& c, bool accumulate = false);
// c += a * b^T, (m x n)(k x n)^T -> (m x k)
void matmul_nt_into(const Tensor& a, const Tensor& b, Tensor& c);
// c += a^T * b, (m x k)^T (m x n) -> (k x n)
void matmul_tn_into(const Tensor& a, const Tensor& b, Tensor& c);

Tensor matmul(const Tensor& a, const Tensor& b);

void add_inplace(Tensor& a, const Tensor& b);
void add_rowvec_inplace(Tensor& a, const Tensor& v);
void mul_inplace(Tensor& a, const Tensor& b);
void scale_inplace(Tensor& a, double k);
void sigmoid_inplace(Tensor& a);
void tanh_inplace(Tensor& a);

double l2_norm_squared(const Tensor& a);

// log(sum(exp(xs))) with max subtraction; -inf for an empty range.
double log_sum_exp(const double* xs, std::size_t n);

}  // namespace udseg

#endif
