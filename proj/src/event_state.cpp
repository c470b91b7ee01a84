#include "relmeas/event_state.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace relmeas {

namespace {

constexpr double kSupportTol = 1e-24;   // occupancy below this is empty
constexpr double kCouplingTol = 1e-10;  // cross-branch block gate

const SubsystemLayout& layout_of(const std::variant<StateVector, DensityMatrix>& dyn) {
    return std::visit([](const auto& s) -> const SubsystemLayout& { return s.layout(); }, dyn);
}

/// Contract one factor's index with a small matrix: out = (small on factor k) v.
Vector apply_on_factor(const Vector& v, const SubsystemLayout& layout, std::size_t k,
                       const Matrix& small) {
    const std::size_t d = layout.factor(k).dim;
    const std::size_t stride = layout.stride(k);
    const std::size_t dim = layout.total_dim();
    const std::size_t block = stride * d;
    Vector out = Vector::Zero(v.size());
    for (std::size_t base = 0; base < dim; base += block) {
        for (std::size_t off = 0; off < stride; ++off) {
            for (std::size_t a = 0; a < d; ++a) {
                cplx sum(0.0, 0.0);
                for (std::size_t b = 0; b < d; ++b) {
                    sum += small(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) *
                           v[static_cast<Eigen::Index>(base + b * stride + off)];
                }
                out[static_cast<Eigen::Index>(base + a * stride + off)] = sum;
            }
        }
    }
    return out;
}

/// Left multiplication by a factor-local matrix: out = (small on factor k) m.
Matrix apply_on_factor_left(const Matrix& m, const SubsystemLayout& layout, std::size_t k,
                            const Matrix& small) {
    Matrix out(m.rows(), m.cols());
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        out.col(c) = apply_on_factor(m.col(c), layout, k, small);
    }
    return out;
}

std::vector<double> occupancy(const std::variant<StateVector, DensityMatrix>& dyn) {
    if (const auto* s = std::get_if<StateVector>(&dyn)) {
        std::vector<double> occ(s->dim());
        for (std::size_t i = 0; i < occ.size(); ++i) {
            occ[i] = std::norm(s->amplitudes()[static_cast<Eigen::Index>(i)]);
        }
        return occ;
    }
    const auto& rho = std::get<DensityMatrix>(dyn);
    std::vector<double> occ(rho.dim());
    for (std::size_t i = 0; i < occ.size(); ++i) {
        occ[i] = rho.entries()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
    }
    return occ;
}

std::size_t checked_factor(const SubsystemLayout& layout, const ProjectorSet& pset) {
    const std::size_t pos = layout.index_of(pset.observer_label());
    if (layout.factor(pos).dim != pset.factor_dim()) {
        throw std::invalid_argument("projector set dimension does not match factor " +
                                    pset.observer_label());
    }
    return pos;
}

/// P_j = Tr(rho . prod(conditions) . P_j), normalized over j. With no
/// conditions this is the plain outcome distribution.
ProbabilityVector conditional_distribution(
    const std::variant<StateVector, DensityMatrix>& dyn, const SubsystemLayout& layout,
    const ProjectorSet& pset,
    const std::vector<std::pair<const ProjectorSet*, int>>& conditions) {
    const std::size_t pos = checked_factor(layout, pset);
    std::vector<double> raw(pset.size(), 0.0);

    if (const auto* s = std::get_if<StateVector>(&dyn)) {
        Vector constrained = s->amplitudes();
        for (const auto& [cset, idx] : conditions) {
            constrained = apply_on_factor(constrained, layout, checked_factor(layout, *cset),
                                          cset->projector(static_cast<std::size_t>(idx)));
        }
        for (std::size_t j = 0; j < pset.size(); ++j) {
            raw[j] = apply_on_factor(constrained, layout, pos, pset.projector(j)).squaredNorm();
        }
    } else {
        const auto& rho = std::get<DensityMatrix>(dyn);
        Matrix constrained = rho.entries();
        for (const auto& [cset, idx] : conditions) {
            constrained = apply_on_factor_left(constrained, layout, checked_factor(layout, *cset),
                                               cset->projector(static_cast<std::size_t>(idx)));
        }
        for (std::size_t j = 0; j < pset.size(); ++j) {
            raw[j] = apply_on_factor_left(constrained, layout, pos, pset.projector(j))
                         .trace()
                         .real();
        }
    }

    double total = 0.0;
    for (double p : raw) total += p;
    if (total < 1e-30) {
        throw std::runtime_error("conditioning on a zero-probability branch combination");
    }
    for (double& p : raw) p /= total;
    return ProbabilityVector::validated(std::move(raw));
}

}  // namespace

const SubsystemLayout& EventState::layout() const { return layout_of(dynamical); }

void EventState::validate() const {
    const auto& lay = layout();
    for (const auto& [label, reg] : registers) {
        if (label != reg.observer_label) {
            throw std::invalid_argument("register key does not match its observer label");
        }
        const std::size_t pos = lay.index_of(label);
        if (lay.factor(pos).dim != reg.projector_set.factor_dim()) {
            throw std::invalid_argument("register projector set does not match factor " + label);
        }
        if (reg.outcome &&
            (*reg.outcome < 0 ||
             static_cast<std::size_t>(*reg.outcome) >= reg.projector_set.size())) {
            throw std::invalid_argument("register outcome index out of range for " + label);
        }
    }
}

DensityMatrix restricted_state(const EventState& phi, const std::string& observer_label) {
    const auto& lay = phi.layout();
    const std::size_t pos = lay.index_of(observer_label);
    const std::size_t d = lay.factor(pos).dim;

    if (const auto* s = std::get_if<StateVector>(&phi.dynamical)) {
        // Direct reduction: R(a, b) = sum over the rest of psi(.., a) psi*(.., b).
        Matrix reduced = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
        for (std::size_t i = 0; i < lay.total_dim(); ++i) {
            const std::size_t a = lay.digit(i, pos);
            const cplx amp = s->amplitudes()[static_cast<Eigen::Index>(i)];
            if (amp == cplx(0.0, 0.0)) continue;
            for (std::size_t b = 0; b < d; ++b) {
                const std::size_t j = lay.with_digit(i, pos, b);
                reduced(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +=
                    amp * std::conj(s->amplitudes()[static_cast<Eigen::Index>(j)]);
            }
        }
        return DensityMatrix::validated(lay.subset({pos}), std::move(reduced));
    }
    return partial_trace(std::get<DensityMatrix>(phi.dynamical), {observer_label});
}

ProbabilityVector outcome_distribution(const EventState& phi, const ProjectorSet& pset) {
    const DensityMatrix reduced = restricted_state(phi, pset.observer_label());
    if (reduced.dim() != pset.factor_dim()) {
        throw std::invalid_argument("projector set dimension does not match observer factor");
    }
    std::vector<double> weights(pset.size());
    for (std::size_t j = 0; j < pset.size(); ++j) {
        weights[j] = (pset.projector(j) * reduced.entries()).trace().real();
    }
    return ProbabilityVector::validated(std::move(weights));
}

Eigen::MatrixXd joint_distribution(const EventState& phi,
                                   const std::vector<ProjectorSet>& psets) {
    if (psets.size() != 2) {
        throw std::invalid_argument("joint distribution takes exactly two projector sets");
    }
    if (psets[0].observer_label() == psets[1].observer_label()) {
        throw std::invalid_argument("joint distribution needs distinct observer labels");
    }
    const auto& lay = phi.layout();
    const std::size_t pos1 = checked_factor(lay, psets[0]);
    const std::size_t pos2 = checked_factor(lay, psets[1]);

    Eigen::MatrixXd joint(static_cast<Eigen::Index>(psets[0].size()),
                          static_cast<Eigen::Index>(psets[1].size()));
    double total = 0.0;
    for (std::size_t i = 0; i < psets[0].size(); ++i) {
        for (std::size_t j = 0; j < psets[1].size(); ++j) {
            double p = 0.0;
            if (const auto* s = std::get_if<StateVector>(&phi.dynamical)) {
                Vector v = apply_on_factor(s->amplitudes(), lay, pos1, psets[0].projector(i));
                v = apply_on_factor(v, lay, pos2, psets[1].projector(j));
                p = v.squaredNorm();
            } else {
                const auto& rho = std::get<DensityMatrix>(phi.dynamical);
                Matrix m = apply_on_factor_left(rho.entries(), lay, pos1, psets[0].projector(i));
                m = apply_on_factor_left(m, lay, pos2, psets[1].projector(j));
                p = m.trace().real();
            }
            if (p < -1e-12) {
                throw std::runtime_error("joint probability is negative beyond round-off");
            }
            joint(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::max(p, 0.0);
            total += std::max(p, 0.0);
        }
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::runtime_error("joint distribution sums to " + std::to_string(total));
    }
    return joint;
}

int sample_outcome(const ProbabilityVector& dist, RngStream& rng) {
    const double u = rng.next_double();
    double cumulative = 0.0;
    int last_positive = 0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        const double p = dist[i];
        if (p <= 0.0) continue;
        last_positive = static_cast<int>(i);
        cumulative += p;
        if (u < cumulative) return static_cast<int>(i);
    }
    return last_positive;  // u landed in the rounding gap at the top
}

bool branches_intersect(const OperatorMatrix& u, const ProjectorSet& pset,
                        const EventState& phi) {
    const auto& lay = phi.layout();
    if (u.layout() != lay) {
        throw std::invalid_argument("unitary layout does not match event state");
    }
    const std::size_t pos = checked_factor(lay, pset);
    const std::size_t d = lay.factor(pos).dim;
    const std::vector<double> occ = occupancy(phi.dynamical);

    for (std::size_t c = 0; c < occ.size(); ++c) {
        if (occ[c] <= kSupportTol) continue;
        const std::size_t c_digit = lay.digit(c, pos);
        for (std::size_t j = 0; j < pset.size(); ++j) {
            // y = U (P_j e_c); P_j e_c lives on the d indices differing from
            // c only in the observer digit.
            Vector y = Vector::Zero(static_cast<Eigen::Index>(lay.total_dim()));
            bool nonzero = false;
            for (std::size_t b = 0; b < d; ++b) {
                const cplx w = pset.projector(j)(static_cast<Eigen::Index>(b),
                                                 static_cast<Eigen::Index>(c_digit));
                if (w == cplx(0.0, 0.0)) continue;
                y += w * u.entries().col(static_cast<Eigen::Index>(lay.with_digit(c, pos, b)));
                nonzero = true;
            }
            if (!nonzero) continue;
            for (std::size_t i = 0; i < pset.size(); ++i) {
                if (i == j) continue;
                const Vector z = apply_on_factor(y, lay, pos, pset.projector(i));
                if (z.size() > 0 && z.cwiseAbs().maxCoeff() > kCouplingTol) {
                    return true;
                }
            }
        }
    }
    return false;
}

StepResult step_event_state(const EventState& phi, const OperatorMatrix& u, RngStream& rng) {
    phi.validate();
    if (!u.is_unitary(kAlgebraTol)) {
        throw std::invalid_argument("step unitary is not unitary within 1e-10");
    }

    // Register processing order follows the layout, not the map.
    std::vector<std::string> ordered;
    for (const auto& f : phi.layout().factors()) {
        if (phi.registers.contains(f.label)) ordered.push_back(f.label);
    }

    std::map<std::string, bool> intersects;
    for (const auto& label : ordered) {
        intersects[label] = branches_intersect(u, phi.registers.at(label).projector_set, phi);
    }

    EventState next = phi;
    if (const auto* s = std::get_if<StateVector>(&phi.dynamical)) {
        next.dynamical = apply_operator(u, *s);
    } else {
        next.dynamical = evolve_density(u, std::get<DensityMatrix>(phi.dynamical));
    }

    std::vector<RegisterChange> changes;
    for (std::size_t n = 0; n < ordered.size(); ++n) {
        const std::string& label = ordered[n];
        if (!intersects.at(label)) continue;
        auto& reg = next.registers.at(label);

        // Condition on registers that persist through this step (or were
        // already resampled above) and hold an outcome.
        std::vector<std::pair<const ProjectorSet*, int>> conditions;
        for (std::size_t m = 0; m < ordered.size(); ++m) {
            if (m == n) continue;
            const auto& other = next.registers.at(ordered[m]);
            if (!other.outcome) continue;
            const bool resamples_later = intersects.at(ordered[m]) && m > n;
            if (resamples_later) continue;  // its pre-step value is stale
            conditions.emplace_back(&other.projector_set, *other.outcome);
        }

        const ProbabilityVector dist = conditional_distribution(
            next.dynamical, next.layout(), reg.projector_set, conditions);
        const int outcome = sample_outcome(dist, rng);
        reg.outcome = outcome;
        changes.push_back({label, outcome});
    }
    return {std::move(next), std::move(changes)};
}

OperatorMatrix subjective_ms_component(const EventState& phi,
                                       const std::string& observer_label,
                                       const std::string& s_label) {
    const auto it = phi.registers.find(observer_label);
    if (it == phi.registers.end()) {
        throw std::invalid_argument("no register for observer " + observer_label);
    }
    if (!it->second.outcome) {
        throw std::invalid_argument("register for " + observer_label + " is unset");
    }
    const auto j = static_cast<std::size_t>(*it->second.outcome);

    const auto& lay = phi.layout();
    const std::size_t pos_o = lay.index_of(observer_label);
    const std::size_t pos_s = lay.index_of(s_label);
    if (pos_o == pos_s) {
        throw std::invalid_argument("observer and measured factors must differ");
    }
    const std::size_t s_dim = lay.factor(pos_s).dim;
    if (j >= s_dim) {
        throw std::invalid_argument("outcome index exceeds measured factor dimension");
    }

    Matrix s_proj = Matrix::Zero(static_cast<Eigen::Index>(s_dim),
                                 static_cast<Eigen::Index>(s_dim));
    s_proj(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = cplx(1.0, 0.0);
    const Matrix& o_proj = it->second.projector_set.projector(j);

    const bool s_first = pos_s < pos_o;
    const SubsystemLayout pair_layout =
        lay.subset(s_first ? std::vector<std::size_t>{pos_s, pos_o}
                           : std::vector<std::size_t>{pos_o, pos_s});
    const Matrix& first = s_first ? s_proj : o_proj;
    const Matrix& second = s_first ? o_proj : s_proj;

    Matrix combined(first.rows() * second.rows(), first.cols() * second.cols());
    for (Eigen::Index r = 0; r < first.rows(); ++r) {
        for (Eigen::Index c = 0; c < first.cols(); ++c) {
            combined.block(r * second.rows(), c * second.cols(), second.rows(), second.cols()) =
                first(r, c) * second;
        }
    }
    return OperatorMatrix(pair_layout, std::move(combined), true);
}

double selected_information(const ProbabilityVector& dist, const std::vector<double>& values) {
    if (values.size() != dist.size()) {
        throw std::invalid_argument("value list length does not match distribution");
    }
    double mean = 0.0;
    double second = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        mean += dist[i] * values[i];
        second += dist[i] * values[i] * values[i];
    }
    const double variance = std::max(second - mean * mean, 0.0);
    if (variance < 1e-300) {
        return std::numeric_limits<double>::infinity();
    }
    return -std::log(variance);
}

}  // namespace relmeas
