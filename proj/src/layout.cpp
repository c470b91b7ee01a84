#include "relmeas/layout.hpp"

#include <set>
#include <stdexcept>

namespace relmeas {

SubsystemLayout::SubsystemLayout(std::vector<Factor> factors)
    : factors_(std::move(factors)) {
    std::set<std::string> seen;
    total_dim_ = 1;
    for (const auto& f : factors_) {
        if (f.label.empty()) {
            throw std::invalid_argument("subsystem label must be non-empty");
        }
        if (!seen.insert(f.label).second) {
            throw std::invalid_argument("duplicate subsystem label: " + f.label);
        }
        if (f.dim == 0) {
            throw std::invalid_argument("subsystem dimension must be positive: " + f.label);
        }
        if (total_dim_ > (std::size_t{1} << 32) / f.dim) {
            throw std::invalid_argument("layout dimension too large");
        }
        total_dim_ *= f.dim;
    }
    strides_.resize(factors_.size());
    std::size_t s = 1;
    for (std::size_t k = factors_.size(); k-- > 0;) {
        strides_[k] = s;
        s *= factors_[k].dim;
    }
}

bool SubsystemLayout::has_label(const std::string& label) const {
    for (const auto& f : factors_) {
        if (f.label == label) return true;
    }
    return false;
}

std::size_t SubsystemLayout::index_of(const std::string& label) const {
    for (std::size_t k = 0; k < factors_.size(); ++k) {
        if (factors_[k].label == label) return k;
    }
    throw std::invalid_argument("unknown subsystem label: " + label);
}

std::size_t SubsystemLayout::dim_of(const std::string& label) const {
    return factors_[index_of(label)].dim;
}

SubsystemLayout SubsystemLayout::concat(const SubsystemLayout& other) const {
    std::vector<Factor> combined = factors_;
    combined.insert(combined.end(), other.factors_.begin(), other.factors_.end());
    return SubsystemLayout(std::move(combined));
}

SubsystemLayout SubsystemLayout::subset(const std::vector<std::size_t>& factor_indices) const {
    std::vector<Factor> picked;
    picked.reserve(factor_indices.size());
    for (std::size_t k : factor_indices) {
        if (k >= factors_.size()) {
            throw std::invalid_argument("factor index out of range");
        }
        picked.push_back(factors_[k]);
    }
    return SubsystemLayout(std::move(picked));
}

}  // namespace relmeas
