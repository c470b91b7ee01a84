#pragma once

#include <cstddef>

#include "relmeas/layout.hpp"
#include "relmeas/matrix.hpp"

namespace relmeas {

inline constexpr std::size_t kMaxStateDim = std::size_t{1} << 20;
inline constexpr std::size_t kMaxDensityDim = std::size_t{1} << 9;

inline constexpr double kNormTol = 1e-8;        // normalization gate
inline constexpr double kAlgebraTol = 1e-10;    // algebraic identity gate
inline constexpr double kEigenvalueFloor = -1e-8;

/// Complex amplitudes over a labeled tensor-product space.
class StateVector {
public:
    StateVector(SubsystemLayout layout, Vector amplitudes);

    static StateVector basis(SubsystemLayout layout, std::size_t flat_index);

    const SubsystemLayout& layout() const { return layout_; }
    const Vector& amplitudes() const { return amplitudes_; }
    std::size_t dim() const { return static_cast<std::size_t>(amplitudes_.size()); }

    double norm() const { return amplitudes_.norm(); }
    /// Rescaled copy with unit norm; throws on (near-)zero input.
    StateVector normalized() const;
    /// <this|other>
    cplx inner_product(const StateVector& other) const;

private:
    SubsystemLayout layout_;
    Vector amplitudes_;
};

/// Positive-semidefinite, unit-trace Hermitian matrix over a labeled layout.
/// Construction goes through `validated`, which enforces Hermiticity within
/// 1e-10, unit trace within 1e-10 and eigenvalues above -1e-8.
class DensityMatrix {
public:
    static DensityMatrix validated(SubsystemLayout layout, Matrix entries);

    const SubsystemLayout& layout() const { return layout_; }
    const Matrix& entries() const { return entries_; }
    std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }

    double trace_real() const { return entries_.trace().real(); }
    /// Tr(rho^2)
    double purity() const;

private:
    DensityMatrix(SubsystemLayout layout, Matrix entries)
        : layout_(std::move(layout)), entries_(std::move(entries)) {}

    SubsystemLayout layout_;
    Matrix entries_;
};

}  // namespace relmeas
