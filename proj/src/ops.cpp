#include "relmeas/ops.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace relmeas {

StateVector tensor_product(const StateVector& a, const StateVector& b) {
    SubsystemLayout combined = a.layout().concat(b.layout());
    const auto da = static_cast<Eigen::Index>(a.dim());
    const auto db = static_cast<Eigen::Index>(b.dim());
    Vector amps(da * db);
    for (Eigen::Index i = 0; i < da; ++i) {
        for (Eigen::Index j = 0; j < db; ++j) {
            amps[i * db + j] = a.amplitudes()[i] * b.amplitudes()[j];
        }
    }
    return StateVector(std::move(combined), std::move(amps));
}

OperatorMatrix tensor_product(const OperatorMatrix& a, const OperatorMatrix& b) {
    SubsystemLayout combined = a.layout().concat(b.layout());
    const auto da = static_cast<Eigen::Index>(a.dim());
    const auto db = static_cast<Eigen::Index>(b.dim());
    Matrix m(da * db, da * db);
    for (Eigen::Index i = 0; i < da; ++i) {
        for (Eigen::Index j = 0; j < da; ++j) {
            m.block(i * db, j * db, db, db) = a.entries()(i, j) * b.entries();
        }
    }
    return OperatorMatrix(std::move(combined), std::move(m),
                          a.hermitian_hint() && b.hermitian_hint());
}

OperatorMatrix embed_op(const OperatorMatrix& op, const SubsystemLayout& layout) {
    const auto& sub = op.layout();
    std::vector<std::size_t> positions(sub.num_factors());
    for (std::size_t k = 0; k < sub.num_factors(); ++k) {
        const auto pos = layout.index_of(sub.factor(k).label);
        if (layout.factor(pos).dim != sub.factor(k).dim) {
            throw std::invalid_argument("factor dimension mismatch for label " +
                                        sub.factor(k).label);
        }
        positions[k] = pos;
    }

    const std::size_t full_dim = layout.total_dim();
    const std::size_t sub_dim = sub.total_dim();
    Matrix result = Matrix::Zero(static_cast<Eigen::Index>(full_dim),
                                 static_cast<Eigen::Index>(full_dim));
    for (std::size_t r = 0; r < full_dim; ++r) {
        // digits of r on the embedded factors, flattened in sub order
        std::size_t sub_row = 0;
        for (std::size_t k = 0; k < positions.size(); ++k) {
            sub_row = sub_row * sub.factor(k).dim + layout.digit(r, positions[k]);
        }
        for (std::size_t sub_col = 0; sub_col < sub_dim; ++sub_col) {
            const cplx value = op.entries()(static_cast<Eigen::Index>(sub_row),
                                            static_cast<Eigen::Index>(sub_col));
            if (value == cplx(0.0, 0.0)) continue;
            std::size_t c = r;
            for (std::size_t k = 0; k < positions.size(); ++k) {
                c = layout.with_digit(c, positions[k], sub.digit(sub_col, k));
            }
            result(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = value;
        }
    }
    return OperatorMatrix(layout, std::move(result), op.hermitian_hint());
}

OperatorMatrix lift_op(const OperatorMatrix& op, const std::string& target_label,
                       const SubsystemLayout& layout) {
    if (op.layout().num_factors() != 1) {
        throw std::invalid_argument("lift_op expects a single-factor operator");
    }
    const auto pos = layout.index_of(target_label);
    if (layout.factor(pos).dim != op.dim()) {
        throw std::invalid_argument("factor dimension mismatch for label " + target_label);
    }
    OperatorMatrix relabeled = OperatorMatrix::single_factor(
        target_label, op.dim(), op.entries(), op.hermitian_hint());
    return embed_op(relabeled, layout);
}

StateVector apply_operator(const OperatorMatrix& op, const StateVector& s) {
    if (op.layout() != s.layout()) {
        throw std::invalid_argument("layout mismatch between operator and state");
    }
    return StateVector(s.layout(), op.entries() * s.amplitudes());
}

DensityMatrix evolve_density(const OperatorMatrix& u, const DensityMatrix& rho) {
    if (u.layout() != rho.layout()) {
        throw std::invalid_argument("layout mismatch between unitary and density matrix");
    }
    if (!u.is_unitary(kAlgebraTol)) {
        throw std::invalid_argument("evolution operator is not unitary within 1e-10");
    }
    Matrix evolved = u.entries() * rho.entries() * u.entries().adjoint();
    const double trace_shift = std::abs(evolved.trace() - rho.entries().trace());
    if (trace_shift > 1e-12) {
        throw std::runtime_error("conjugation failed to preserve trace");
    }
    return DensityMatrix::validated(rho.layout(), std::move(evolved));
}

DensityMatrix partial_trace(const DensityMatrix& rho,
                            const std::vector<std::string>& keep_labels) {
    if (keep_labels.empty()) {
        throw std::invalid_argument("partial trace needs a non-empty keep set");
    }
    const auto& layout = rho.layout();
    std::set<std::size_t> kept_set;
    for (const auto& label : keep_labels) {
        kept_set.insert(layout.index_of(label));
    }
    std::vector<std::size_t> kept(kept_set.begin(), kept_set.end());  // original order
    std::vector<std::size_t> traced;
    for (std::size_t k = 0; k < layout.num_factors(); ++k) {
        if (!kept_set.contains(k)) traced.push_back(k);
    }

    auto enumerate_offsets = [&](const std::vector<std::size_t>& factors) {
        std::vector<std::size_t> offsets{0};
        for (std::size_t k : factors) {
            std::vector<std::size_t> next;
            next.reserve(offsets.size() * layout.factor(k).dim);
            for (std::size_t base : offsets) {
                for (std::size_t d = 0; d < layout.factor(k).dim; ++d) {
                    next.push_back(base + d * layout.stride(k));
                }
            }
            offsets = std::move(next);
        }
        return offsets;
    };
    const std::vector<std::size_t> kept_offsets = enumerate_offsets(kept);
    const std::vector<std::size_t> traced_offsets = enumerate_offsets(traced);

    const auto kept_dim = static_cast<Eigen::Index>(kept_offsets.size());
    Matrix reduced = Matrix::Zero(kept_dim, kept_dim);
    for (Eigen::Index r = 0; r < kept_dim; ++r) {
        for (Eigen::Index c = 0; c < kept_dim; ++c) {
            cplx sum(0.0, 0.0);
            for (std::size_t t : traced_offsets) {
                sum += rho.entries()(
                    static_cast<Eigen::Index>(kept_offsets[static_cast<std::size_t>(r)] + t),
                    static_cast<Eigen::Index>(kept_offsets[static_cast<std::size_t>(c)] + t));
            }
            reduced(r, c) = sum;
        }
    }
    if (std::abs(reduced.trace() - rho.entries().trace()) > 1e-12) {
        throw std::runtime_error("partial trace failed to preserve trace");
    }
    return DensityMatrix::validated(layout.subset(kept), std::move(reduced));
}

namespace {

cplx checked_expectation(const OperatorMatrix& op, cplx value) {
    if (op.hermitian_hint() && std::abs(value.imag()) >= kAlgebraTol) {
        throw std::runtime_error("expectation of a Hermitian observable has imaginary part " +
                                 std::to_string(value.imag()));
    }
    return value;
}

}  // namespace

cplx expectation(const OperatorMatrix& op, const StateVector& s) {
    if (op.layout() != s.layout()) {
        throw std::invalid_argument("layout mismatch in expectation");
    }
    return checked_expectation(op, s.amplitudes().dot(op.entries() * s.amplitudes()));
}

cplx expectation(const OperatorMatrix& op, const DensityMatrix& rho) {
    if (op.layout() != rho.layout()) {
        throw std::invalid_argument("layout mismatch in expectation");
    }
    return checked_expectation(op, (rho.entries() * op.entries()).trace());
}

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b) {
    if (a.layout() != b.layout()) {
        throw std::invalid_argument("layout mismatch in commutator");
    }
    return OperatorMatrix(a.layout(), a.entries() * b.entries() - b.entries() * a.entries(),
                          false);
}

DensityMatrix density_from_pure(const StateVector& s) {
    const double norm_sq = s.amplitudes().squaredNorm();
    if (std::abs(norm_sq - 1.0) > kNormTol) {
        throw std::invalid_argument("state is not normalized within 1e-8");
    }
    Matrix rho = s.amplitudes() * s.amplitudes().adjoint();
    return DensityMatrix::validated(s.layout(), std::move(rho));
}

DensityMatrix mix(const std::vector<std::pair<double, DensityMatrix>>& components) {
    if (components.empty()) {
        throw std::invalid_argument("mix needs at least one component");
    }
    double weight_sum = 0.0;
    for (const auto& [w, rho] : components) {
        if (w < 0.0) {
            throw std::invalid_argument("mixture weight is negative");
        }
        if (rho.layout() != components.front().second.layout()) {
            throw std::invalid_argument("mixture components have different layouts");
        }
        weight_sum += w;
    }
    if (std::abs(weight_sum - 1.0) > 1e-12) {
        throw std::invalid_argument("mixture weights sum to " + std::to_string(weight_sum));
    }
    const auto dim = static_cast<Eigen::Index>(components.front().second.dim());
    Matrix combined = Matrix::Zero(dim, dim);
    for (const auto& [w, rho] : components) {
        combined += w * rho.entries();
    }
    return DensityMatrix::validated(components.front().second.layout(), std::move(combined));
}

}  // namespace relmeas
