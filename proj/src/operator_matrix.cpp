#include "relmeas/operator_matrix.hpp"

#include <stdexcept>

namespace relmeas {

OperatorMatrix::OperatorMatrix(SubsystemLayout layout, Matrix entries, bool hermitian_hint)
    : layout_(std::move(layout)), entries_(std::move(entries)), hermitian_hint_(hermitian_hint) {
    const auto dim = static_cast<Eigen::Index>(layout_.total_dim());
    if (entries_.rows() != dim || entries_.cols() != dim) {
        throw std::invalid_argument("operator shape does not match layout");
    }
    if (layout_.total_dim() > kMaxOperatorDim) {
        throw std::invalid_argument("operator dimension cap exceeded");
    }
    if (!entries_.allFinite()) {
        throw std::invalid_argument("operator entries must be finite");
    }
}

OperatorMatrix OperatorMatrix::identity(SubsystemLayout layout) {
    const auto dim = static_cast<Eigen::Index>(layout.total_dim());
    return OperatorMatrix(std::move(layout), Matrix::Identity(dim, dim), true);
}

OperatorMatrix OperatorMatrix::single_factor(const std::string& label, std::size_t dim,
                                             Matrix entries, bool hermitian_hint) {
    return OperatorMatrix(SubsystemLayout({{label, dim}}), std::move(entries), hermitian_hint);
}

OperatorMatrix OperatorMatrix::adjoint() const {
    return OperatorMatrix(layout_, entries_.adjoint(), hermitian_hint_);
}

bool OperatorMatrix::is_unitary(double tol) const {
    const Matrix gram = entries_.adjoint() * entries_;
    return max_abs(Matrix(gram - Matrix::Identity(gram.rows(), gram.cols()))) <= tol;
}

double OperatorMatrix::hermiticity_defect() const {
    return max_abs(Matrix(entries_ - entries_.adjoint()));
}

namespace {

OperatorMatrix make_pauli(const std::string& label, std::initializer_list<cplx> values) {
    Matrix m(2, 2);
    auto it = values.begin();
    m(0, 0) = *it++;
    m(0, 1) = *it++;
    m(1, 0) = *it++;
    m(1, 1) = *it++;
    return OperatorMatrix::single_factor(label, 2, std::move(m), true);
}

}  // namespace

OperatorMatrix pauli_x(const std::string& label) {
    return make_pauli(label, {0.0, 1.0, 1.0, 0.0});
}

OperatorMatrix pauli_y(const std::string& label) {
    return make_pauli(label, {0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0});
}

OperatorMatrix pauli_z(const std::string& label) {
    return make_pauli(label, {1.0, 0.0, 0.0, -1.0});
}

}  // namespace relmeas
