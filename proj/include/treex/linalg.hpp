#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "treex/errors.hpp"

namespace treex {

using Vec = std::vector<double>;

// Row-major dense matrix. Deliberately minimal: the model dimensions here are
// tiny (tens of rows/columns), so plain loops beat pulling in a BLAS.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

    double& operator()(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }

    double* row(int r) { return a.data() + static_cast<std::size_t>(r) * cols; }
    const double* row(int r) const { return a.data() + static_cast<std::size_t>(r) * cols; }

    void fill(double v) { std::fill(a.begin(), a.end(), v); }
    std::size_t size() const { return a.size(); }
};

// out = A * B
inline void matmul(const Matrix& A, const Matrix& B, Matrix& out) {
    if (A.cols != B.rows) throw InputError("matmul: inner dimensions differ");
    out.rows = A.rows;
    out.cols = B.cols;
    out.a.assign(static_cast<std::size_t>(A.rows) * B.cols, 0.0);
    for (int i = 0; i < A.rows; ++i) {
        const double* arow = A.row(i);
        double* orow = out.row(i);
        for (int k = 0; k < A.cols; ++k) {
            double aik = arow[k];
            if (aik == 0.0) continue;
            const double* brow = B.row(k);
            for (int j = 0; j < B.cols; ++j) orow[j] += aik * brow[j];
        }
    }
}

// out = A^T * B
inline void matmul_transA(const Matrix& A, const Matrix& B, Matrix& out) {
    if (A.rows != B.rows) throw InputError("matmul_transA: row counts differ");
    out.rows = A.cols;
    out.cols = B.cols;
    out.a.assign(static_cast<std::size_t>(A.cols) * B.cols, 0.0);
    for (int k = 0; k < A.rows; ++k) {
        const double* arow = A.row(k);
        const double* brow = B.row(k);
        for (int i = 0; i < A.cols; ++i) {
            double aki = arow[i];
            if (aki == 0.0) continue;
            double* orow = out.row(i);
            for (int j = 0; j < B.cols; ++j) orow[j] += aki * brow[j];
        }
    }
}

// out = A * B^T
inline void matmul_transB(const Matrix& A, const Matrix& B, Matrix& out) {
    if (A.cols != B.cols) throw InputError("matmul_transB: column counts differ");
    out.rows = A.rows;
    out.cols = B.rows;
    out.a.assign(static_cast<std::size_t>(A.rows) * B.rows, 0.0);
    for (int i = 0; i < A.rows; ++i) {
        const double* arow = A.row(i);
        double* orow = out.row(i);
        for (int j = 0; j < B.rows; ++j) {
            const double* brow = B.row(j);
            double s = 0.0;
            for (int k = 0; k < A.cols; ++k) s += arow[k] * brow[k];
            orow[j] = s;
        }
    }
}

inline void add_row_vector(Matrix& m, const Vec& v) {
    if (static_cast<int>(v.size()) != m.cols) throw InputError("add_row_vector: size mismatch");
    for (int i = 0; i < m.rows; ++i) {
        double* row = m.row(i);
        for (int j = 0; j < m.cols; ++j) row[j] += v[j];
    }
}

inline Vec column_sums(const Matrix& m) {
    Vec s(m.cols, 0.0);
    for (int i = 0; i < m.rows; ++i) {
        const double* row = m.row(i);
        for (int j = 0; j < m.cols; ++j) s[j] += row[j];
    }
    return s;
}

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double squared_distance(const double* a, const double* b, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

// Numerically stable log(sum(exp(logits))).
inline double log_sum_exp(const Vec& logits) {
    double mx = logits[0];
    for (double v : logits) mx = std::max(mx, v);
    double s = 0.0;
    for (double v : logits) s += std::exp(v - mx);
    return mx + std::log(s);
}

inline Vec softmax(const Vec& logits) {
    double lse = log_sum_exp(logits);
    Vec p(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) p[i] = std::exp(logits[i] - lse);
    return p;
}

inline int argmax(const Vec& v) {
    int best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = static_cast<int>(i);
    return best;
}

}  // namespace treex
