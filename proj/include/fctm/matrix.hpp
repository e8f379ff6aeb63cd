#pragma once

#include <cstddef>
#include <vector>

namespace fctm {

using Vec = std::vector<double>;

// Dense rectangular matrix, row-major.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    // y = A x
    Vec multiply(const Vec& x) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Vec data_;
};

// Dense symmetric matrix. All writes go through set()/add(), which update
// both triangles, so entries(i,j) == entries(j,i) holds exactly at all times.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(std::size_t dim, double fill = 0.0)
        : n_(dim), data_(dim * dim, fill) {}

    static SymMatrix identity(std::size_t dim);
    static SymMatrix diagonal(const Vec& d);

    std::size_t dim() const { return n_; }

    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

    void set(std::size_t i, std::size_t j, double v) {
        data_[i * n_ + j] = v;
        data_[j * n_ + i] = v;
    }
    void add(std::size_t i, std::size_t j, double v) { set(i, j, data_[i * n_ + j] + v); }

    Vec multiply(const Vec& x) const;
    double quad_form(const Vec& x) const;  // x' A x
    double trace() const;
    double max_abs() const;
    double frobenius() const;
    bool all_finite() const;

private:
    std::size_t n_ = 0;
    Vec data_;
};

struct SpectralData {
    Vec eigenvalues;      // sorted non-increasing
    Matrix eigenvectors;  // column j pairs with eigenvalues[j]; orthonormal
};

// Full spectrum of a symmetric matrix by cyclic Jacobi rotations.
// Deterministic; converges when the off-diagonal Frobenius norm drops
// below 1e-12 * ||A||_F. Throws InvalidMatrix on non-finite entries.
SpectralData eig_sym(const SymMatrix& a);

// Lower-triangular L with L L' = a. Throws NotPositiveDefinite when any
// pivot is <= 0, i.e. the caller's SPD precondition failed.
Matrix cholesky_spd(const SymMatrix& a);

struct SpdInverse {
    SymMatrix inverse;
    double log_det;  // log det of the input, 2 * sum(log L_ii)
};

// Inverse of an SPD matrix via its Cholesky factor.
SpdInverse inverse_spd(const SymMatrix& a);

// True iff lambda_1(a) <= tol * max(1, ||a||_max). The tolerance is relative
// to the entry scale so the verdict is invariant under matrix rescaling.
bool is_nsd(const SymMatrix& a, double tol);

// Columns form an orthonormal basis of the hyperplane orthogonal to v
// (dim x (dim-1), from a Householder reflector; deterministic).
Matrix orthonormal_complement(const Vec& v);

// NSD verdict for the quadratic form of `a` restricted to {w : normal.w = 0}.
bool is_nsd_restricted(const SymMatrix& a, const Vec& normal, double tol);

}  // namespace fctm
