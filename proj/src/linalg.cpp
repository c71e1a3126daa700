#include "gfa/linalg.hpp"

#include <string>

#include "gfa/error.hpp"

namespace gfa::linalg {

Matrix spd_inverse(const Matrix& a, const char* what) {
    Eigen::LLT<Matrix> llt(symmetrized(a));
    if (llt.info() != Eigen::Success || !a.allFinite())
        throw NumericalError(std::string(what) + ": matrix is not positive definite");
    Matrix inv = llt.solve(Matrix::Identity(a.rows(), a.cols()));
    return symmetrized(inv);
}

double spd_logdet(const Matrix& a, const char* what) {
    Eigen::LLT<Matrix> llt(symmetrized(a));
    if (llt.info() != Eigen::Success || !a.allFinite())
        throw NumericalError(std::string(what) + ": matrix is not positive definite");
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace gfa::linalg
