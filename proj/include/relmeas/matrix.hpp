#pragma once

#include <complex>

#include <Eigen/Dense>

namespace relmeas {

using cplx = std::complex<double>;

// Dense row-major complex matrices; column vectors for states.
using Matrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;

inline double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace relmeas
