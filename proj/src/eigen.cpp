#include "carpet/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "carpet/errors.hpp"

namespace carpet {

namespace {

constexpr int kMaxSweeps = 100;

double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j) s += a(i, j) * a(i, j);
    return std::sqrt(2.0 * s);
}

void canonical_sign(Matrix& vectors, std::size_t col) {
    for (std::size_t i = 0; i < vectors.rows(); ++i) {
        const double v = vectors(i, col);
        if (std::fabs(v) > 1e-12) {
            if (v < 0.0)
                for (std::size_t r = 0; r < vectors.rows(); ++r) vectors(r, col) = -vectors(r, col);
            return;
        }
    }
}

} // namespace

EigenSystem eigh(const SymmetricMatrix& sym) {
    const std::size_t n = sym.order();
    Matrix a = sym.matrix();
    for (double v : a.data())
        if (!std::isfinite(v)) throw PreconditionError("eigh requires finite entries");

    Matrix v(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scale += a(i, j) * a(i, j);
    scale = std::sqrt(scale);
    const double target = (scale > 0.0 ? scale : 1.0) * 1e-15;

    int sweep = 0;
    while (off_diagonal_norm(a) > target) {
        if (++sweep > kMaxSweeps) throw NumericalError("Jacobi eigensolver did not converge");
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::fabs(apq) <= target / (n * n)) continue;
                const double app = a(p, p), aqq = a(q, q);
                const double theta = (aqq - app) / (2.0 * apq);
                double t;
                if (std::fabs(theta) > 1e154) {
                    t = 1.0 / (2.0 * theta); // avoid theta^2 overflow
                } else {
                    t = (theta >= 0.0 ? 1.0 : -1.0) /
                        (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = a(q, p) = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    if (r != p && r != q) {
                        const double arp = a(r, p), arq = a(r, q);
                        a(r, p) = a(p, r) = arp - s * (arq + tau * arp);
                        a(r, q) = a(q, r) = arq + s * (arp - tau * arq);
                    }
                    const double vrp = v(r, p), vrq = v(r, q);
                    v(r, p) = vrp - s * (vrq + tau * vrp);
                    v(r, q) = vrq + s * (vrp - tau * vrq);
                }
            }
        }
    }

    for (std::size_t j = 0; j < n; ++j) canonical_sign(v, j);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (a(x, x) != a(y, y)) return a(x, x) < a(y, y);
        for (std::size_t r = 0; r < n; ++r)
            if (v(r, x) != v(r, y)) return v(r, x) < v(r, y);
        return false;
    });

    EigenSystem out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = a(order[j], order[j]);
        for (std::size_t r = 0; r < n; ++r) out.vectors(r, j) = v(r, order[j]);
    }
    return out;
}

namespace {

// Modified Gram-Schmidt over the columns, in place, preserving column order.
void orthonormalize_columns(Matrix& m) {
    const std::size_t rows = m.rows(), cols = m.cols();
    for (std::size_t j = 0; j < cols; ++j) {
        for (std::size_t k = 0; k < j; ++k) {
            double d = 0.0;
            for (std::size_t r = 0; r < rows; ++r) d += m(r, k) * m(r, j);
            for (std::size_t r = 0; r < rows; ++r) m(r, j) -= d * m(r, k);
        }
        double nrm = 0.0;
        for (std::size_t r = 0; r < rows; ++r) nrm += m(r, j) * m(r, j);
        nrm = std::sqrt(nrm);
        if (nrm > 0.0)
            for (std::size_t r = 0; r < rows; ++r) m(r, j) /= nrm;
    }
}

} // namespace

SvdSystem svd(const Matrix& c) {
    const std::size_t m = c.rows(), n = c.cols();
    const bool rows_smaller = m <= n;
    const std::size_t small = rows_smaller ? m : n;

    // Gram matrix on the smaller side.
    SymmetricMatrix g(small);
    for (std::size_t i = 0; i < small; ++i)
        for (std::size_t j = i; j < small; ++j) {
            double s = 0.0;
            if (rows_smaller)
                for (std::size_t k = 0; k < n; ++k) s += c(i, k) * c(j, k);
            else
                for (std::size_t k = 0; k < m; ++k) s += c(k, i) * c(k, j);
            g.set(i, j, s);
        }

    EigenSystem es = eigh(g);

    double smax = 0.0;
    for (double lam : es.values) smax = std::max(smax, std::sqrt(std::max(0.0, lam)));
    const double threshold = 1e-12 * std::max(1.0, smax);

    std::vector<std::size_t> keep; // descending singular value order
    for (std::size_t j = es.values.size(); j-- > 0;) {
        const double s = std::sqrt(std::max(0.0, es.values[j]));
        if (s > threshold) keep.push_back(j);
    }

    const std::size_t r = keep.size();
    SvdSystem out;
    out.singulars.resize(r);
    out.left = Matrix(m, r);
    out.right = Matrix(n, r);

    Matrix primary(small, r); // eigenvectors of the Gram side
    for (std::size_t t = 0; t < r; ++t) {
        out.singulars[t] = std::sqrt(std::max(0.0, es.values[keep[t]]));
        for (std::size_t i = 0; i < small; ++i) primary(i, t) = es.vectors(i, keep[t]);
    }

    // Back-substitute the other factor and restore its orthonormality, which the
    // division by small singular values can erode.
    const std::size_t large = rows_smaller ? n : m;
    Matrix secondary(large, r);
    for (std::size_t t = 0; t < r; ++t) {
        const double inv = 1.0 / out.singulars[t];
        for (std::size_t i = 0; i < large; ++i) {
            double s = 0.0;
            if (rows_smaller)
                for (std::size_t k = 0; k < m; ++k) s += c(k, i) * primary(k, t);
            else
                for (std::size_t k = 0; k < n; ++k) s += c(i, k) * primary(k, t);
            secondary(i, t) = s * inv;
        }
    }
    orthonormalize_columns(secondary);

    if (rows_smaller) {
        out.left = std::move(primary);
        out.right = std::move(secondary);
    } else {
        out.left = std::move(secondary);
        out.right = std::move(primary);
    }

    // Canonical sign on the left factor, right factor slaved.
    for (std::size_t t = 0; t < r; ++t) {
        for (std::size_t i = 0; i < m; ++i) {
            const double v = out.left(i, t);
            if (std::fabs(v) > 1e-12) {
                if (v < 0.0) {
                    for (std::size_t x = 0; x < m; ++x) out.left(x, t) = -out.left(x, t);
                    for (std::size_t x = 0; x < n; ++x) out.right(x, t) = -out.right(x, t);
                }
                break;
            }
        }
    }
    return out;
}

} // namespace carpet
