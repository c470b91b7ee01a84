#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "relmeas/matrix.hpp"

namespace relmeas {

/// Complete orthogonal projector decomposition on one observer factor.
/// Each projector is Hermitian and idempotent within 1e-10, pairwise
/// orthogonal, and the set sums to the identity within 1e-10.
class ProjectorSet {
public:
    ProjectorSet() = default;

    static ProjectorSet validated(std::string observer_label,
                                  std::vector<Matrix> projectors);
    /// Basis projectors |j><j| for j = 0..dim-1.
    static ProjectorSet computational(std::string observer_label, std::size_t dim);

    const std::string& observer_label() const { return observer_label_; }
    const std::vector<Matrix>& projectors() const { return projectors_; }
    const Matrix& projector(std::size_t j) const { return projectors_[j]; }
    std::size_t size() const { return projectors_.size(); }
    std::size_t factor_dim() const {
        return projectors_.empty() ? 0 : static_cast<std::size_t>(projectors_[0].rows());
    }

private:
    std::string observer_label_;
    std::vector<Matrix> projectors_;
};

/// Nonnegative entries summing to one. Construction clamps round-off
/// negativity down to -1e-12 and renormalizes; anything worse throws.
class ProbabilityVector {
public:
    static ProbabilityVector validated(std::vector<double> entries);

    const std::vector<double>& entries() const { return entries_; }
    double operator[](std::size_t i) const { return entries_[i]; }
    std::size_t size() const { return entries_.size(); }

private:
    explicit ProbabilityVector(std::vector<double> entries) : entries_(std::move(entries)) {}
    std::vector<double> entries_;
};

}  // namespace relmeas
