#include "fctm/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fctm/errors.hpp"

namespace fctm {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Vec Matrix::multiply(const Vec& x) const {
    Vec y(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        double acc = 0.0;
        const double* row = &data_[i * cols_];
        for (std::size_t j = 0; j < cols_; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
    return y;
}

SymMatrix SymMatrix::identity(std::size_t dim) {
    SymMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m.set(i, i, 1.0);
    return m;
}

SymMatrix SymMatrix::diagonal(const Vec& d) {
    SymMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m.set(i, i, d[i]);
    return m;
}

Vec SymMatrix::multiply(const Vec& x) const {
    Vec y(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        double acc = 0.0;
        const double* row = &data_[i * n_];
        for (std::size_t j = 0; j < n_; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
    return y;
}

double SymMatrix::quad_form(const Vec& x) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        const double* row = &data_[i * n_];
        double r = 0.0;
        for (std::size_t j = 0; j < n_; ++j) r += row[j] * x[j];
        acc += x[i] * r;
    }
    return acc;
}

double SymMatrix::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
}

double SymMatrix::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

double SymMatrix::frobenius() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
}

bool SymMatrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

namespace {

double off_diagonal_frobenius(const std::vector<Vec>& a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a[i][j] * a[i][j];
    return std::sqrt(s);
}

}  // namespace

SpectralData eig_sym(const SymMatrix& a_in) {
    if (!a_in.all_finite()) throw InvalidMatrix("eig_sym: non-finite entries");
    const std::size_t n = a_in.dim();
    if (n == 0) throw InvalidMatrix("eig_sym: empty matrix");

    std::vector<Vec> a(n, Vec(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i][j] = a_in(i, j);
    std::vector<Vec> v(n, Vec(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;

    const double norm = a_in.frobenius();
    const double threshold = 1e-12 * norm;
    const int max_sweeps = 100;

    for (int sweep = 0; sweep < max_sweeps && norm > 0.0; ++sweep) {
        if (off_diagonal_frobenius(a, n) <= threshold) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p][q];
                if (apq == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                double t;
                if (std::abs(theta) > 1e150) {
                    // Asymptotic root of t^2 + 2 t theta - 1; avoids theta^2 overflow.
                    t = 1.0 / (2.0 * theta);
                } else {
                    t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                const double app = a[p][p];
                const double aqq = a[q][q];
                a[p][p] = app - t * apq;
                a[q][q] = aqq + t * apq;
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (i == p || i == q) continue;
                    const double aip = a[i][p];
                    const double aiq = a[i][q];
                    a[i][p] = aip - s * (aiq + tau * aip);
                    a[p][i] = a[i][p];
                    a[i][q] = aiq + s * (aip - tau * aiq);
                    a[q][i] = a[i][q];
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = v[i][p];
                    const double viq = v[i][q];
                    v[i][p] = vip - s * (viq + tau * vip);
                    v[i][q] = viq + s * (vip - tau * viq);
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (a[x][x] != a[y][y]) return a[x][x] > a[y][y];
        return x < y;
    });

    SpectralData out;
    out.eigenvalues.resize(n);
    out.eigenvectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.eigenvalues[j] = a[order[j]][order[j]];
        for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, j) = v[i][order[j]];
    }
    return out;
}

Matrix cholesky_spd(const SymMatrix& a) {
    if (!a.all_finite()) throw InvalidMatrix("cholesky_spd: non-finite entries");
    const std::size_t n = a.dim();
    Matrix l(n, n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (d <= 0.0 || !std::isfinite(d))
            throw NotPositiveDefinite("cholesky_spd: pivot " + std::to_string(j) +
                                      " is not positive");
        l(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

SpdInverse inverse_spd(const SymMatrix& a) {
    const std::size_t n = a.dim();
    const Matrix l = cholesky_spd(a);

    double log_det = 0.0;
    for (std::size_t i = 0; i < n; ++i) log_det += std::log(l(i, i));
    log_det *= 2.0;

    // Column c of the inverse solves L L' x = e_c.
    SymMatrix inv(n);
    Vec y(n), x(n);
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = (i == c) ? 1.0 : 0.0;
            for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
            y[i] = s / l(i, i);
        }
        for (std::size_t ii = n; ii-- > 0;) {
            double s = y[ii];
            for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
            x[ii] = s / l(ii, ii);
        }
        // Writing row c after column c keeps the stored matrix exactly symmetric.
        for (std::size_t i = c; i < n; ++i) inv.set(i, c, x[i]);
    }
    return {inv, log_det};
}

bool is_nsd(const SymMatrix& a, double tol) {
    if (tol < 0.0) throw InvalidArgument("is_nsd: tol must be >= 0");
    const SpectralData s = eig_sym(a);
    return s.eigenvalues.front() <= tol * std::max(1.0, a.max_abs());
}

Matrix orthonormal_complement(const Vec& v) {
    const std::size_t n = v.size();
    if (n < 2) throw InvalidArgument("orthonormal_complement: need dim >= 2");
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0 || !std::isfinite(norm))
        throw InvalidArgument("orthonormal_complement: zero or non-finite vector");

    // Householder reflector H with H e_1 = u maps e_2..e_n to a basis of u-perp.
    Vec u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = v[i] / norm;
    Vec w(n);
    w[0] = u[0] - 1.0;
    for (std::size_t i = 1; i < n; ++i) w[i] = u[i];
    double wn = 0.0;
    for (double x : w) wn += x * x;

    Matrix b(n, n - 1);
    if (wn < 1e-30) {
        // u is (numerically) e_1 already.
        for (std::size_t j = 0; j < n - 1; ++j) b(j + 1, j) = 1.0;
        return b;
    }
    for (std::size_t j = 0; j < n - 1; ++j) {
        const std::size_t col = j + 1;
        for (std::size_t i = 0; i < n; ++i) {
            const double id = (i == col) ? 1.0 : 0.0;
            b(i, j) = id - 2.0 * w[i] * w[col] / wn;
        }
    }
    return b;
}

bool is_nsd_restricted(const SymMatrix& a, const Vec& normal, double tol) {
    if (a.dim() != normal.size())
        throw InvalidArgument("is_nsd_restricted: dimension mismatch");
    const Matrix b = orthonormal_complement(normal);
    const std::size_t m = b.cols();
    const std::size_t n = a.dim();

    // T = B' A B, symmetrized against rounding.
    Matrix ab(n, m, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < m; ++j) ab(i, j) += aik * b(k, j);
        }
    SymMatrix t(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            double s1 = 0.0;
            double s2 = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                s1 += b(k, i) * ab(k, j);
                s2 += b(k, j) * ab(k, i);
            }
            t.set(i, j, 0.5 * (s1 + s2));
        }
    return is_nsd(t, tol);
}

}  // namespace fctm
