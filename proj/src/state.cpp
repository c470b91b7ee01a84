#include "relmeas/state.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace relmeas {

StateVector::StateVector(SubsystemLayout layout, Vector amplitudes)
    : layout_(std::move(layout)), amplitudes_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amplitudes_.size()) != layout_.total_dim()) {
        throw std::invalid_argument("amplitude count does not match layout dimension");
    }
    if (layout_.total_dim() > kMaxStateDim) {
        throw std::invalid_argument("state dimension cap exceeded");
    }
    if (!amplitudes_.allFinite()) {
        throw std::invalid_argument("state amplitudes must be finite");
    }
}

StateVector StateVector::basis(SubsystemLayout layout, std::size_t flat_index) {
    if (flat_index >= layout.total_dim()) {
        throw std::invalid_argument("basis index out of range");
    }
    Vector amps = Vector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
    amps[static_cast<Eigen::Index>(flat_index)] = cplx(1.0, 0.0);
    return StateVector(std::move(layout), std::move(amps));
}

StateVector StateVector::normalized() const {
    const double n = norm();
    if (n < 1e-300) {
        throw std::runtime_error("cannot normalize a zero state");
    }
    return StateVector(layout_, amplitudes_ / n);
}

cplx StateVector::inner_product(const StateVector& other) const {
    if (layout_ != other.layout_) {
        throw std::invalid_argument("layout mismatch in inner product");
    }
    return amplitudes_.dot(other.amplitudes_);
}

DensityMatrix DensityMatrix::validated(SubsystemLayout layout, Matrix entries) {
    const auto dim = static_cast<Eigen::Index>(layout.total_dim());
    if (entries.rows() != dim || entries.cols() != dim) {
        throw std::invalid_argument("density matrix shape does not match layout");
    }
    if (layout.total_dim() > kMaxDensityDim) {
        throw std::invalid_argument("density matrix dimension cap exceeded");
    }
    if (!entries.allFinite()) {
        throw std::invalid_argument("density matrix entries must be finite");
    }
    const double herm_defect = max_abs(Matrix(entries - entries.adjoint()));
    if (herm_defect > kAlgebraTol) {
        throw std::runtime_error("density matrix is not Hermitian (defect " +
                                 std::to_string(herm_defect) + ")");
    }
    const double trace_defect = std::abs(entries.trace() - cplx(1.0, 0.0));
    if (trace_defect > kAlgebraTol) {
        throw std::runtime_error("density matrix trace differs from 1 by " +
                                 std::to_string(trace_defect));
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(entries, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eigenvalue computation failed");
    }
    if (solver.eigenvalues().minCoeff() < kEigenvalueFloor) {
        throw std::runtime_error("density matrix has a negative eigenvalue: " +
                                 std::to_string(solver.eigenvalues().minCoeff()));
    }
    return DensityMatrix(std::move(layout), std::move(entries));
}

double DensityMatrix::purity() const {
    return (entries_ * entries_).trace().real();
}

}  // namespace relmeas
