#pragma once

#include <cstddef>
#include <string>

#include "relmeas/layout.hpp"
#include "relmeas/matrix.hpp"

namespace relmeas {

inline constexpr std::size_t kMaxOperatorDim = std::size_t{1} << 12;

/// Square matrix acting on a labeled layout. `hermitian_hint` marks
/// operators meant to be used as observables; expectation values of hinted
/// operators are checked to be real within 1e-10.
class OperatorMatrix {
public:
    OperatorMatrix(SubsystemLayout layout, Matrix entries, bool hermitian_hint = false);

    static OperatorMatrix identity(SubsystemLayout layout);
    /// Operator on a fresh single-factor layout.
    static OperatorMatrix single_factor(const std::string& label, std::size_t dim,
                                        Matrix entries, bool hermitian_hint = false);

    const SubsystemLayout& layout() const { return layout_; }
    const Matrix& entries() const { return entries_; }
    bool hermitian_hint() const { return hermitian_hint_; }
    std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }

    OperatorMatrix adjoint() const;
    bool is_unitary(double tol) const;
    double hermiticity_defect() const;  // max |A - A^dagger|

private:
    SubsystemLayout layout_;
    Matrix entries_;
    bool hermitian_hint_ = false;
};

OperatorMatrix pauli_x(const std::string& label);
OperatorMatrix pauli_y(const std::string& label);
OperatorMatrix pauli_z(const std::string& label);

}  // namespace relmeas
