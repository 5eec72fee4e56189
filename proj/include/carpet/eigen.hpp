#pragma once

#include "carpet/matrix.hpp"

namespace carpet {

/// Full spectrum of a symmetric matrix, eigenvalues ascending.
/// Vectors are the orthonormal columns of `vectors`, aligned with `values`.
/// Sign convention: in each vector the first coordinate of absolute value
/// > 1e-12 is positive. Exactly equal eigenvalues are ordered by the first
/// differing eigenvector coordinate, so identical inputs always produce
/// bitwise-identical output.
struct EigenSystem {
    Vec values;
    Matrix vectors;
};

/// Singular triplets with s above 1e-12 relative to the largest singular value,
/// nonincreasing. Columns of `left` (m-dim) and `right` (n-dim) are aligned with
/// `singulars`. The canonical sign rule is applied to the left vectors with the
/// right vectors sign-slaved.
struct SvdSystem {
    Vec singulars;
    Matrix left;
    Matrix right;
};

/// Cyclic Jacobi rotations to machine precision; iteration cap 100 sweeps.
/// Results are unique only up to rotations inside eigenspaces of multiple
/// eigenvalues; tests that pin coordinates must use gap-separated instances.
EigenSystem eigh(const SymmetricMatrix& a);

/// SVD via eigendecomposition of the smaller Gram matrix, with the other factor
/// recovered by back-substitution and re-orthonormalized.
SvdSystem svd(const Matrix& c);

} // namespace carpet
