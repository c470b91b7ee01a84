#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "relmeas/operator_matrix.hpp"
#include "relmeas/ops.hpp"
#include "relmeas/projectors.hpp"
#include "relmeas/rng.hpp"
#include "relmeas/state.hpp"

namespace relmeas {

/// One observer's subjective record: a sampled outcome index (or unset,
/// before any interaction) together with the projector decomposition it
/// refers to.
struct OutcomeRegister {
    std::string observer_label;
    std::optional<int> outcome;  // nullopt = not yet realized
    ProjectorSet projector_set;
};

/// The central dual object: a linearly evolving dynamical component plus
/// per-observer outcome registers. The dynamical component is shared,
/// objective data; registers are what each observer holds in one event.
struct EventState {
    std::variant<StateVector, DensityMatrix> dynamical;
    std::map<std::string, OutcomeRegister> registers;
    std::uint64_t rng_stream_id = 0;

    const SubsystemLayout& layout() const;
    /// Checks that every register names a layout factor whose dimension
    /// matches its projector set.
    void validate() const;
};

/// Partial trace of the dynamical component onto the observer's factor.
DensityMatrix restricted_state(const EventState& phi, const std::string& observer_label);

/// P_j = Tr(P_j R_O), clamped and renormalized.
ProbabilityVector outcome_distribution(const EventState& phi, const ProjectorSet& pset);

/// Two-observer distribution P_ij = Tr(rho P1_i P2_j). Requires exactly two
/// projector sets on distinct factors.
Eigen::MatrixXd joint_distribution(const EventState& phi,
                                   const std::vector<ProjectorSet>& psets);

/// Inverse-CDF draw over ascending index order; deterministic for a fixed
/// stream position.
int sample_outcome(const ProbabilityVector& dist, RngStream& rng);

/// Whether `u` couples distinct outcome branches of the observer on the
/// occupied support of the dynamical state: true iff some cross block
/// P_i U P_j (i != j), with columns restricted to basis states the current
/// state occupies, has an entry of modulus above 1e-10.
bool branches_intersect(const OperatorMatrix& u, const ProjectorSet& pset,
                        const EventState& phi);

struct RegisterChange {
    std::string observer_label;
    int outcome = 0;
};

struct StepResult {
    EventState state;
    std::vector<RegisterChange> changes;  // registers resampled in this step
};

/// One evolution step of the event-state. The dynamical component is
/// advanced by the unitary; each register whose branches intersect under
/// `u` is resampled (memorylessly) from the post-step outcome
/// distribution, conditioned on the registers that persist through the
/// step; all other registers are preserved, including unset ones.
/// Registers are processed in layout factor order, consuming one draw per
/// resampled register.
StepResult step_event_state(const EventState& phi, const OperatorMatrix& u, RngStream& rng);

/// Projector |O_j><O_j| (x) |s_j><s_j| on the observer and measured
/// factors, ordered as in the dynamical layout. Requires a set register.
OperatorMatrix subjective_ms_component(const EventState& phi,
                                       const std::string& observer_label,
                                       const std::string& s_label);

/// Selected information -ln(sigma^2) of the value distribution; returns
/// +infinity when the dispersion underflows (below 1e-300).
double selected_information(const ProbabilityVector& dist, const std::vector<double>& values);

}  // namespace relmeas
