#pragma once

#include <cstddef>
#include <vector>

#include "cafe/matrix.hpp"

namespace cafe::linalg {

/// Thin QR with column dropping. Q has orthonormal columns, R is upper
/// triangular with a nonnegative diagonal, and A(:, kept) = Q R.
struct ThinQR {
    Matrix q;
    Matrix r;
    std::vector<std::size_t> kept;     ///< columns of A that survived
    std::vector<std::size_t> dropped;  ///< columns found linearly dependent
};

/// Gram-Schmidt with one round of reorthogonalization. Column j is dropped
/// when its component orthogonal to the earlier kept columns is at most
/// rel_tol times its own norm.
ThinQR thin_qr(const Matrix& a, double rel_tol = 1e-10);

/// Symmetric eigendecomposition, eigenvalues sorted descending and each
/// eigenvector's largest-magnitude entry made positive.
struct SymmetricEigen {
    Vector values;
    Matrix vectors;  ///< column i pairs with values(i)
};

/// Cyclic Jacobi rotations; meant for n up to a few hundred.
SymmetricEigen jacobi_eigen(const Matrix& a, double tol = 1e-15, std::size_t max_sweeps = 100);

/// Householder tridiagonalization followed by implicit QL.
SymmetricEigen tridiagonal_eigen(const Matrix& a);

/// Sorts descending and applies the sign convention in place.
void canonicalize(SymmetricEigen& e);

}  // namespace cafe::linalg
