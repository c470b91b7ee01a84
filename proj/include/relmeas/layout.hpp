#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace relmeas {

struct Factor {
    std::string label;
    std::size_t dim = 0;
    bool operator==(const Factor&) const = default;
};

/// Ordered list of labeled tensor factors. The first factor is the most
/// significant digit of a flat basis index (row-major convention); the
/// ordering is fixed at construction and all embeddings are explicit.
class SubsystemLayout {
public:
    SubsystemLayout() = default;
    explicit SubsystemLayout(std::vector<Factor> factors);

    std::size_t total_dim() const { return total_dim_; }
    std::size_t num_factors() const { return factors_.size(); }
    const Factor& factor(std::size_t k) const { return factors_[k]; }
    const std::vector<Factor>& factors() const { return factors_; }

    bool has_label(const std::string& label) const;
    /// Position of a factor; throws std::invalid_argument on unknown label.
    std::size_t index_of(const std::string& label) const;
    std::size_t dim_of(const std::string& label) const;
    std::size_t stride(std::size_t k) const { return strides_[k]; }

    /// Digit of factor k in the flat basis index.
    std::size_t digit(std::size_t flat, std::size_t k) const {
        return (flat / strides_[k]) % factors_[k].dim;
    }
    /// Flat index with factor k's digit replaced by `value`.
    std::size_t with_digit(std::size_t flat, std::size_t k, std::size_t value) const {
        return flat - digit(flat, k) * strides_[k] + value * strides_[k];
    }

    /// Concatenation; throws on duplicate labels.
    SubsystemLayout concat(const SubsystemLayout& other) const;
    /// Layout of a subset of factors, in the given order.
    SubsystemLayout subset(const std::vector<std::size_t>& factor_indices) const;

    bool operator==(const SubsystemLayout&) const = default;

private:
    std::vector<Factor> factors_;
    std::vector<std::size_t> strides_;
    std::size_t total_dim_ = 1;
};

}  // namespace relmeas
