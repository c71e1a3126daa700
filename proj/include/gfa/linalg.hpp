#pragma once

#include "gfa/data_model.hpp"

namespace gfa::linalg {

/// Inverse of a symmetric positive-definite matrix via Cholesky. Throws
/// NumericalError naming `what` when the factorization fails.
Matrix spd_inverse(const Matrix& a, const char* what);

/// log det of a symmetric positive-definite matrix via Cholesky.
double spd_logdet(const Matrix& a, const char* what);

inline Matrix symmetrized(const Matrix& a) { return 0.5 * (a + a.transpose()); }

}  // namespace gfa::linalg
