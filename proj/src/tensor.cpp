#include "tpca/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tpca/errors.hpp"

namespace tpca {

std::size_t entry_count(int d, int k, std::size_t cap) {
    if (d < 1) throw DimensionMismatch("side length must be positive");
    if (k < 1) throw BadOrder("order must be positive");
    std::size_t n = 1;
    for (int i = 0; i < k; ++i) {
        if (n > cap / static_cast<std::size_t>(d))
            throw SizeCapExceeded("d^k exceeds the entry cap of " + std::to_string(cap));
        n *= static_cast<std::size_t>(d);
    }
    if (n > cap) throw SizeCapExceeded("d^k exceeds the entry cap of " + std::to_string(cap));
    return n;
}

std::size_t flat_index(const std::vector<int>& idx, int d) {
    std::size_t f = 0;
    for (int j : idx) f = f * static_cast<std::size_t>(d) + static_cast<std::size_t>(j);
    return f;
}

void unflat_index(std::size_t flat, int d, int k, int* out) {
    for (int l = k - 1; l >= 0; --l) {
        out[l] = static_cast<int>(flat % static_cast<std::size_t>(d));
        flat /= static_cast<std::size_t>(d);
    }
}

Tensor::Tensor(int d, int k, double fill, std::size_t cap)
    : d_(d), k_(k), data_(entry_count(d, k, cap), fill) {}

double Tensor::norm() const { return std::sqrt(dot(*this)); }

double Tensor::dot(const Tensor& other) const {
    if (other.d_ != d_ || other.k_ != k_) throw DimensionMismatch("dot of differently shaped tensors");
    double s = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i) s += data_[i] * other.data_[i];
    return s;
}

Tensor& Tensor::operator+=(const Tensor& other) {
    if (other.d_ != d_ || other.k_ != k_) throw DimensionMismatch("sum of differently shaped tensors");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

Tensor& Tensor::operator-=(const Tensor& other) {
    if (other.d_ != d_ || other.k_ != k_) throw DimensionMismatch("difference of differently shaped tensors");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

Tensor& Tensor::operator*=(double a) {
    for (double& x : data_) x *= a;
    return *this;
}

Tensor operator-(const Tensor& a, const Tensor& b) {
    Tensor r = a;
    r -= b;
    return r;
}

Tensor operator+(const Tensor& a, const Tensor& b) {
    Tensor r = a;
    r += b;
    return r;
}

Tensor operator*(double a, const Tensor& t) {
    Tensor r = t;
    r *= a;
    return r;
}

Tensor permute_modes(const Tensor& t, const std::vector<int>& perm) {
    const int d = t.d(), k = t.k();
    if (static_cast<int>(perm.size()) != k) throw DimensionMismatch("permutation length differs from order");
    Tensor out(d, k);
    std::vector<int> src(k), dst(k);
    for (std::size_t f = 0; f < out.size(); ++f) {
        unflat_index(f, d, k, dst.data());
        for (int p = 0; p < k; ++p) src[perm[p] - 1] = dst[p];
        out[f] = t[flat_index(src, d)];
    }
    return out;
}

Tensor unpermute_modes(const Tensor& t, const std::vector<int>& perm) {
    const int d = t.d(), k = t.k();
    if (static_cast<int>(perm.size()) != k) throw DimensionMismatch("permutation length differs from order");
    Tensor out(d, k);
    std::vector<int> src(k), dst(k);
    for (std::size_t f = 0; f < t.size(); ++f) {
        unflat_index(f, d, k, src.data());
        for (int p = 0; p < k; ++p) dst[perm[p] - 1] = src[p];
        out[flat_index(dst, d)] = t[f];
    }
    return out;
}

CountTensor::CountTensor(int d, int k, std::size_t cap) : d_(d), k_(k), data_(entry_count(d, k, cap), 0) {}

void CountTensor::set(std::size_t i, std::int64_t value) {
    if (value < 0) throw DimensionMismatch("count tensor entries are nonnegative");
    l1_ += value - data_[i];
    data_[i] = value;
}

std::vector<std::size_t> CountTensor::support() const {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < data_.size(); ++i)
        if (data_[i] != 0) s.push_back(i);
    return s;
}

Tensor rank_one(const std::vector<std::vector<double>>& factors, const LabelingFunction& lf) {
    if (static_cast<int>(factors.size()) != lf.K)
        throw DimensionMismatch("expected " + std::to_string(lf.K) + " factors");
    const int d = static_cast<int>(factors.front().size());
    for (const auto& v : factors)
        if (static_cast<int>(v.size()) != d) throw DimensionMismatch("factors differ in length");
    Tensor t(d, lf.k);
    std::vector<int> idx(lf.k);
    for (std::size_t f = 0; f < t.size(); ++f) {
        unflat_index(f, d, lf.k, idx.data());
        double p = 1.0;
        for (int l = 0; l < lf.k; ++l) p *= factors[lf.label0(l)][idx[l]];
        t[f] = p;
    }
    return t;
}

std::vector<std::int64_t> partial_sum(const CountTensor& c, int mode) {
    if (mode < 1 || mode > c.k()) throw ModeOutOfRange("mode " + std::to_string(mode));
    std::vector<std::int64_t> out(c.d(), 0);
    std::vector<int> idx(c.k());
    for (std::size_t f : c.support()) {
        unflat_index(f, c.d(), c.k(), idx.data());
        out[idx[mode - 1]] += c[f];
    }
    return out;
}

std::vector<std::uint8_t> partial_parity(const CountTensor& c, int mode) {
    auto s = partial_sum(c, mode);
    std::vector<std::uint8_t> out(s.size());
    for (std::size_t j = 0; j < s.size(); ++j) out[j] = static_cast<std::uint8_t>(s[j] & 1);
    return out;
}

std::vector<std::int64_t> labeled_sum(const CountTensor& c, const LabelingFunction& lf, int label) {
    if (label < 1 || label > lf.K) throw ModeOutOfRange("label " + std::to_string(label));
    if (lf.k != c.k()) throw DimensionMismatch("labelling order differs from tensor order");
    std::vector<std::int64_t> out(c.d(), 0);
    for (int l = 1; l <= lf.k; ++l) {
        if (lf.assignment[l - 1] != label) continue;
        auto s = partial_sum(c, l);
        for (int j = 0; j < c.d(); ++j) out[j] += s[j];
    }
    return out;
}

std::vector<std::uint8_t> labeled_parity(const CountTensor& c, const LabelingFunction& lf, int label) {
    auto s = labeled_sum(c, lf, label);
    std::vector<std::uint8_t> out(s.size());
    for (std::size_t j = 0; j < s.size(); ++j) out[j] = static_cast<std::uint8_t>(s[j] & 1);
    return out;
}

double Matrix::frobenius() const {
    double s = 0.0;
    for (double x : a) s += x * x;
    return std::sqrt(s);
}

namespace {

std::vector<int> check_split(int k, const std::vector<int>& row_modes, std::vector<int>& col_modes) {
    if (row_modes.empty() || static_cast<int>(row_modes.size()) >= k)
        throw BadSplit("row modes must be a nonempty proper subset");
    std::vector<int> rows = row_modes;
    std::sort(rows.begin(), rows.end());
    if (std::adjacent_find(rows.begin(), rows.end()) != rows.end()) throw BadSplit("repeated mode");
    if (rows.front() < 1 || rows.back() > k) throw BadSplit("mode out of range");
    col_modes.clear();
    for (int m = 1; m <= k; ++m)
        if (!std::binary_search(rows.begin(), rows.end(), m)) col_modes.push_back(m);
    return rows;
}

}  // namespace

Matrix flatten(const Tensor& t, const std::vector<int>& row_modes) {
    std::vector<int> cols;
    std::vector<int> rows = check_split(t.k(), row_modes, cols);
    const int d = t.d(), k = t.k();
    std::size_t nr = 1, nc = 1;
    for (std::size_t i = 0; i < rows.size(); ++i) nr *= d;
    for (std::size_t i = 0; i < cols.size(); ++i) nc *= d;
    Matrix m(nr, nc);
    std::vector<int> idx(k), ri(rows.size()), ci(cols.size());
    for (std::size_t f = 0; f < t.size(); ++f) {
        unflat_index(f, d, k, idx.data());
        for (std::size_t i = 0; i < rows.size(); ++i) ri[i] = idx[rows[i] - 1];
        for (std::size_t i = 0; i < cols.size(); ++i) ci[i] = idx[cols[i] - 1];
        m(flat_index(ri, d), flat_index(ci, d)) = t[f];
    }
    return m;
}

Tensor unflatten(const Matrix& m, int d, int k, const std::vector<int>& row_modes) {
    std::vector<int> cols;
    std::vector<int> rows = check_split(k, row_modes, cols);
    Tensor t(d, k);
    if (m.rows * m.cols != t.size()) throw DimensionMismatch("matrix size differs from d^k");
    std::vector<int> idx(k), ri(rows.size()), ci(cols.size());
    for (std::size_t f = 0; f < t.size(); ++f) {
        unflat_index(f, d, k, idx.data());
        for (std::size_t i = 0; i < rows.size(); ++i) ri[i] = idx[rows[i] - 1];
        for (std::size_t i = 0; i < cols.size(); ++i) ci[i] = idx[cols[i] - 1];
        t[f] = m(flat_index(ri, d), flat_index(ci, d));
    }
    return t;
}

}  // namespace tpca
