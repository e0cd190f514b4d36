#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ontograph/errors.hpp"

namespace ontograph {

/// Dense row-major tensor of doubles, rank 0..3. Everything trained or
/// differentiated in this project is carried by one of these; the autodiff
/// tape only ever manipulates rank-1/2 views (vectors are 1 x n).
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<std::size_t> shape) : shape_(std::move(shape)) {
        check_shape();
        data_.assign(count(shape_), 0.0);
    }

    Tensor(std::vector<std::size_t> shape, std::vector<double> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        check_shape();
        if (data_.size() != count(shape_)) throw InputError("tensor: data length does not match shape");
    }

    static Tensor zeros(std::size_t r, std::size_t c) { return Tensor({r, c}); }

    static Tensor scalar(double v) { return Tensor({1, 1}, {v}); }

    /// 1 x n row vector.
    static Tensor row(std::vector<double> v) {
        const std::size_t n = v.size();
        return Tensor({1, n}, std::move(v));
    }

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    std::size_t rows() const { return rank() >= 1 ? shape_[0] : 1; }
    std::size_t cols() const { return rank() >= 2 ? shape_[1] : 1; }

    double& at(std::size_t i) { return data_[i]; }
    double at(std::size_t i) const { return data_[i]; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& buffer() { return data_; }
    const std::vector<double>& buffer() const { return data_; }

    void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

    bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

    bool all_finite() const {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    double sum() const {
        double s = 0.0;
        for (double v : data_) s += v;
        return s;
    }

    std::string shape_str() const {
        std::string s = "[";
        for (std::size_t i = 0; i < shape_.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(shape_[i]);
        }
        return s + "]";
    }

private:
    static std::size_t count(const std::vector<std::size_t>& shape) {
        std::size_t n = 1;
        for (std::size_t d : shape) n *= d;
        return shape.empty() ? 0 : n;
    }

    void check_shape() const {
        if (shape_.size() > 3) throw InputError("tensor: rank > 3 not supported");
        for (std::size_t d : shape_)
            if (d == 0) throw InputError("tensor: zero-sized dimension");
    }

    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

} // namespace ontograph
