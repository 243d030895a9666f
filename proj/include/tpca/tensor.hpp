#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tpca/labeling.hpp"

namespace tpca {

inline constexpr std::size_t kDefaultEntryCap = std::size_t{1} << 24;

// d^k, throwing SizeCapExceeded above the cap.
std::size_t entry_count(int d, int k, std::size_t cap = kDefaultEntryCap);

// Row-major multi-index helpers; indices are 0-based.
std::size_t flat_index(const std::vector<int>& idx, int d);
void unflat_index(std::size_t flat, int d, int k, int* out);

class Tensor {
public:
    Tensor() = default;
    Tensor(int d, int k, double fill = 0.0, std::size_t cap = kDefaultEntryCap);

    int d() const { return d_; }
    int k() const { return k_; }
    std::size_t size() const { return data_.size(); }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }
    double& at(const std::vector<int>& idx) { return data_[flat_index(idx, d_)]; }
    double at(const std::vector<int>& idx) const { return data_[flat_index(idx, d_)]; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    double norm() const;
    double dot(const Tensor& other) const;
    Tensor& operator+=(const Tensor& other);
    Tensor& operator-=(const Tensor& other);
    Tensor& operator*=(double a);

private:
    int d_ = 0;
    int k_ = 0;
    std::vector<double> data_;
};

Tensor operator-(const Tensor& a, const Tensor& b);
Tensor operator+(const Tensor& a, const Tensor& b);
Tensor operator*(double a, const Tensor& t);

// Reorders modes: result mode p is the original mode perm[p] (1-based).
Tensor permute_modes(const Tensor& t, const std::vector<int>& perm);

// Inverse of permute_modes with the same perm.
Tensor unpermute_modes(const Tensor& t, const std::vector<int>& perm);

class CountTensor {
public:
    CountTensor() = default;
    CountTensor(int d, int k, std::size_t cap = kDefaultEntryCap);

    int d() const { return d_; }
    int k() const { return k_; }
    std::size_t size() const { return data_.size(); }
    std::int64_t operator[](std::size_t i) const { return data_[i]; }
    void set(std::size_t i, std::int64_t value);
    void add(std::size_t i, std::int64_t delta) { set(i, data_[i] + delta); }
    std::int64_t l1() const { return l1_; }
    std::vector<std::size_t> support() const;
    const std::vector<std::int64_t>& data() const { return data_; }

private:
    int d_ = 0;
    int k_ = 0;
    std::vector<std::int64_t> data_;
    std::int64_t l1_ = 0;
};

// Entry (j_1..j_k) = prod_l factors[pi(l)-1][j_l].
Tensor rank_one(const std::vector<std::vector<double>>& factors, const LabelingFunction& lf);

// mode and label are 1-based.
std::vector<std::int64_t> partial_sum(const CountTensor& c, int mode);
std::vector<std::uint8_t> partial_parity(const CountTensor& c, int mode);
std::vector<std::int64_t> labeled_sum(const CountTensor& c, const LabelingFunction& lf, int label);
std::vector<std::uint8_t> labeled_parity(const CountTensor& c, const LabelingFunction& lf, int label);

struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;  // row-major

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), a(r * c, fill) {}
    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
    double frobenius() const;
};

// row_modes are 1-based, nonempty and a proper subset of [k]. Row and column
// multi-indices keep the original relative order of their modes.
Matrix flatten(const Tensor& t, const std::vector<int>& row_modes);
Tensor unflatten(const Matrix& m, int d, int k, const std::vector<int>& row_modes);

}  // namespace tpca
