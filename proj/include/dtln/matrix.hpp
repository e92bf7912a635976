// Copyright 2026  dtln-cpp authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef DTLN_MATRIX_HPP
#define DTLN_MATRIX_HPP

#include <cstddef>
#include <vector>

#include "dtln/errors.hpp"

namespace dtln {

// Dense row-major matrix. Deliberately minimal: the model needs storage,
// matrix-vector products and rank-1 updates, nothing more.
template <typename T>
struct Matrix {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<T> data;

    Matrix() = default;
    Matrix(size_t r, size_t c) : rows(r), cols(c), data(r * c, T(0)) {}
    Matrix(size_t r, size_t c, std::vector<T> d) : rows(r), cols(c), data(std::move(d)) {
        if (data.size() != rows * cols) throw ShapeError("Matrix: data length != rows*cols");
    }

    T& operator()(size_t i, size_t j) { return data[i * cols + j]; }
    const T& operator()(size_t i, size_t j) const { return data[i * cols + j]; }
    const T* row(size_t i) const { return data.data() + i * cols; }
    T* row(size_t i) { return data.data() + i * cols; }
    size_t size() const { return data.size(); }

    static Matrix identity(size_t n) {
        Matrix m(n, n);
        for (size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }
};

// y = A x (A: rows x cols, x: cols, y: rows)
template <typename T>
void matvec(const T* a, size_t rows, size_t cols, const T* x, T* y) {
    for (size_t i = 0; i < rows; ++i) {
        const T* arow = a + i * cols;
        T acc = T(0);
        for (size_t j = 0; j < cols; ++j) acc += arow[j] * x[j];
        y[i] = acc;
    }
}

// y += A x
template <typename T>
void matvec_acc(const T* a, size_t rows, size_t cols, const T* x, T* y) {
    for (size_t i = 0; i < rows; ++i) {
        const T* arow = a + i * cols;
        T acc = T(0);
        for (size_t j = 0; j < cols; ++j) acc += arow[j] * x[j];
        y[i] += acc;
    }
}

// y = A^T x (A: rows x cols, x: rows, y: cols); accumulating variant below.
template <typename T>
void matvec_t(const T* a, size_t rows, size_t cols, const T* x, T* y) {
    for (size_t j = 0; j < cols; ++j) y[j] = T(0);
    for (size_t i = 0; i < rows; ++i) {
        const T* arow = a + i * cols;
        const T xi = x[i];
        for (size_t j = 0; j < cols; ++j) y[j] += xi * arow[j];
    }
}

template <typename T>
void matvec_t_acc(const T* a, size_t rows, size_t cols, const T* x, T* y) {
    for (size_t i = 0; i < rows; ++i) {
        const T* arow = a + i * cols;
        const T xi = x[i];
        for (size_t j = 0; j < cols; ++j) y[j] += xi * arow[j];
    }
}

// A += u v^T (u: rows, v: cols)
template <typename T>
void outer_acc(T* a, size_t rows, size_t cols, const T* u, const T* v) {
    for (size_t i = 0; i < rows; ++i) {
        T* arow = a + i * cols;
        const T ui = u[i];
        for (size_t j = 0; j < cols; ++j) arow[j] += ui * v[j];
    }
}

template <typename T>
std::vector<T> matvec(const Matrix<T>& a, const std::vector<T>& x) {
    if (x.size() != a.cols) throw ShapeError("matvec: vector length != matrix cols");
    std::vector<T> y(a.rows);
    matvec(a.data.data(), a.rows, a.cols, x.data(), y.data());
    return y;
}

template <typename T>
std::vector<T> matvec_transposed(const Matrix<T>& a, const std::vector<T>& x) {
    if (x.size() != a.rows) throw ShapeError("matvec_transposed: vector length != matrix rows");
    std::vector<T> y(a.cols);
    matvec_t(a.data.data(), a.rows, a.cols, x.data(), y.data());
    return y;
}

}  // namespace dtln

#endif  // DTLN_MATRIX_HPP
