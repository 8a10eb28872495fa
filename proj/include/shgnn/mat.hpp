#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "shgnn/error.hpp"

namespace shgnn {

// Dense row-major matrix of doubles. Vectors are stored as n x 1.
struct Mat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}
    Mat(std::size_t r, std::size_t c, std::vector<double> data)
        : rows(r), cols(c), a(std::move(data)) {
        if (a.size() != rows * cols) throw ShapeError("Mat: data size does not match shape");
    }

    static Mat zeros(std::size_t r, std::size_t c) { return Mat(r, c); }
    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
    static Mat col_vec(std::vector<double> v) {
        std::size_t n = v.size();
        return Mat(n, 1, std::move(v));
    }

    double& operator()(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return a[r * cols + c]; }

    std::size_t size() const { return a.size(); }
    bool is_vector() const { return cols == 1; }
    bool is_scalar() const { return rows == 1 && cols == 1; }
    bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }

    std::string shape_str() const {
        return "(" + std::to_string(rows) + "x" + std::to_string(cols) + ")";
    }
};

inline Mat operator+(const Mat& x, const Mat& y) {
    if (!x.same_shape(y)) throw ShapeError("Mat add: " + x.shape_str() + " vs " + y.shape_str());
    Mat out = x;
    for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] += y.a[i];
    return out;
}

inline Mat operator*(const Mat& x, double s) {
    Mat out = x;
    for (double& v : out.a) v *= s;
    return out;
}

// C = A * B.
inline Mat matmul(const Mat& A, const Mat& B) {
    if (A.cols != B.rows)
        throw ShapeError("matmul: " + A.shape_str() + " * " + B.shape_str());
    Mat C(A.rows, B.cols);
    for (std::size_t i = 0; i < A.rows; ++i)
        for (std::size_t k = 0; k < A.cols; ++k) {
            double aik = A(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < B.cols; ++j) C(i, j) += aik * B(k, j);
        }
    return C;
}

inline double dot(const Mat& x, const Mat& y) {
    if (!x.same_shape(y) || !x.is_vector())
        throw ShapeError("dot: " + x.shape_str() + " vs " + y.shape_str());
    double s = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) s += x.a[i] * y.a[i];
    return s;
}

inline double norm2(const Mat& x) { return dot(x, x); }

}  // namespace shgnn
