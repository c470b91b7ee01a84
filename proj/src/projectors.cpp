#include "relmeas/projectors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace relmeas {

namespace {
constexpr double kProjectorTol = 1e-10;
constexpr double kClampFloor = -1e-12;
constexpr double kSumTol = 1e-9;
}  // namespace

ProjectorSet ProjectorSet::validated(std::string observer_label,
                                     std::vector<Matrix> projectors) {
    if (observer_label.empty()) {
        throw std::invalid_argument("projector set needs an observer label");
    }
    if (projectors.empty()) {
        throw std::invalid_argument("projector set must be non-empty");
    }
    const Eigen::Index dim = projectors.front().rows();
    for (const auto& p : projectors) {
        if (p.rows() != dim || p.cols() != dim) {
            throw std::invalid_argument("projectors must be square with a common dimension");
        }
        if (max_abs(Matrix(p - p.adjoint())) > kProjectorTol) {
            throw std::invalid_argument("projector is not Hermitian");
        }
        if (max_abs(Matrix(p * p - p)) > kProjectorTol) {
            throw std::invalid_argument("projector is not idempotent");
        }
    }
    Matrix sum = Matrix::Zero(dim, dim);
    for (std::size_t i = 0; i < projectors.size(); ++i) {
        for (std::size_t j = i + 1; j < projectors.size(); ++j) {
            if (max_abs(Matrix(projectors[i] * projectors[j])) > kProjectorTol) {
                throw std::invalid_argument("projectors are not pairwise orthogonal");
            }
        }
        sum += projectors[i];
    }
    if (max_abs(Matrix(sum - Matrix::Identity(dim, dim))) > kProjectorTol) {
        throw std::invalid_argument("projectors do not sum to the identity");
    }
    ProjectorSet set;
    set.observer_label_ = std::move(observer_label);
    set.projectors_ = std::move(projectors);
    return set;
}

ProjectorSet ProjectorSet::computational(std::string observer_label, std::size_t dim) {
    std::vector<Matrix> projectors;
    projectors.reserve(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        Matrix p = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
        p(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = cplx(1.0, 0.0);
        projectors.push_back(std::move(p));
    }
    return validated(std::move(observer_label), std::move(projectors));
}

ProbabilityVector ProbabilityVector::validated(std::vector<double> entries) {
    if (entries.empty()) {
        throw std::invalid_argument("probability vector must be non-empty");
    }
    double sum = 0.0;
    for (double& p : entries) {
        if (!std::isfinite(p)) {
            throw std::invalid_argument("probability entry is not finite");
        }
        if (p < kClampFloor) {
            throw std::invalid_argument("probability entry below clamp floor: " +
                                        std::to_string(p));
        }
        if (p < 0.0) p = 0.0;  // round-off only
        sum += p;
    }
    if (std::abs(sum - 1.0) > kSumTol) {
        throw std::invalid_argument("probabilities sum to " + std::to_string(sum));
    }
    for (double& p : entries) p /= sum;
    return ProbabilityVector(std::move(entries));
}

}  // namespace relmeas
