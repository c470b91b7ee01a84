#pragma once

#include <string>
#include <utility>
#include <vector>

#include "relmeas/operator_matrix.hpp"
#include "relmeas/state.hpp"

namespace relmeas {

/// Kronecker product of states; layouts must have disjoint labels.
StateVector tensor_product(const StateVector& a, const StateVector& b);
/// Kronecker product of operators in layout order.
OperatorMatrix tensor_product(const OperatorMatrix& a, const OperatorMatrix& b);

/// Embed a single-factor operator into `layout`, identity on all other
/// factors. Throws on unknown label or dimension mismatch.
OperatorMatrix lift_op(const OperatorMatrix& op, const std::string& target_label,
                       const SubsystemLayout& layout);

/// Embed an operator on a sub-layout into `layout` (identity elsewhere).
/// The operator's factors may appear anywhere in `layout`.
OperatorMatrix embed_op(const OperatorMatrix& op, const SubsystemLayout& layout);

/// Matrix-vector product; no implicit normalization.
StateVector apply_operator(const OperatorMatrix& op, const StateVector& s);

/// rho -> U rho U^dagger for unitary U (checked within 1e-10).
DensityMatrix evolve_density(const OperatorMatrix& u, const DensityMatrix& rho);

/// Trace out all factors not in `keep_labels`; kept factors stay in their
/// original order. Throws on unknown label or empty keep set.
DensityMatrix partial_trace(const DensityMatrix& rho,
                            const std::vector<std::string>& keep_labels);

/// <psi|A|psi> or Tr(rho A). For operators with hermitian_hint the
/// imaginary part must vanish within 1e-10.
cplx expectation(const OperatorMatrix& op, const StateVector& s);
cplx expectation(const OperatorMatrix& op, const DensityMatrix& rho);

/// AB - BA.
OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b);

/// Rank-1 projector |psi><psi|; requires unit norm within 1e-8.
DensityMatrix density_from_pure(const StateVector& s);

/// Convex combination; weights nonnegative, summing to 1 within 1e-12.
DensityMatrix mix(const std::vector<std::pair<double, DensityMatrix>>& components);

}  // namespace relmeas
