#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "relmeas/models.hpp"
#include "relmeas/projectors.hpp"

namespace relmeas {

enum class ScenarioId { ensemble, undoing, sequential, discrimination };

std::string to_string(ScenarioId id);
ScenarioId scenario_from_string(const std::string& name);

struct ScenarioConfig {
    ScenarioId scenario = ScenarioId::ensemble;
    std::variant<VonNeumannSpec, ColemanHeppSpec> model;
    std::int64_t n_events = 1;
    std::uint64_t seed = 0;
    double sigma_bound = 4.0;

    void validate() const;
};

/// Per-event log: every register assignment as (step index, outcome index),
/// plus the final register content. Step indices are 1-based and strictly
/// increasing per observer.
struct EventRecord {
    std::int64_t event_index = 0;
    std::uint64_t rng_stream_id = 0;
    std::map<std::string, std::vector<std::pair<int, int>>> outcomes;
    std::map<std::string, std::optional<int>> final_registers;
};

struct SummaryStats {
    /// Empirical outcome frequencies, keyed by observer label (with
    /// suffixes such as "_mixed", "_first", "_second" where one observer
    /// yields several distributions).
    std::map<std::string, std::vector<double>> frequencies;
    std::optional<double> pure_mixed_max_diff;
    std::optional<double> correlation;
    std::optional<double> coincidence_rate;
    std::optional<double> expectation_b_pure;
    std::optional<double> expectation_b_mixed;
    std::vector<std::vector<double>> joint_frequencies;  // empty when n/a
    bool excluded_configuration = false;
    std::map<std::string, bool> pass_flags;

    bool all_pass() const;
};

struct ScenarioResult {
    std::vector<EventRecord> events;
    SummaryStats summary;
    std::vector<std::string> observer_labels;  // layout order
};

/// n independent measurement events on the pure initial state and on its
/// mixed counterpart; reports per-branch frequencies for both runs. Pure
/// events use streams [0, n), mixed events [n, 2n).
ScenarioResult run_ensemble(const ScenarioConfig& config);

/// Measure, reverse the measurement, measure again. Checks that the
/// dynamical state returns to the initial product state, that the register
/// reverts to the initial-information index, and that pre- and post-undo
/// outcomes are uncorrelated.
ScenarioResult run_undoing(const ScenarioConfig& config);

/// A second observer measures the same observable after the first; their
/// outcomes coincide event by event and the joint frequencies are diagonal.
ScenarioResult run_sequential(const ScenarioConfig& config);

/// External-observer view: expectation of the coherence observable on the
/// pure final state versus the mixed counterpart. No sampling.
SummaryStats run_discrimination(const ScenarioConfig& config);

ScenarioResult run_scenario(const ScenarioConfig& config);

/// Pearson coefficient; nullopt when either marginal is constant.
std::optional<double> correlation_coefficient(std::span<const std::pair<int, int>> pairs);

/// True iff every |counts_i/n - p_i| <= sigma * sqrt(p_i(1-p_i)/n).
bool frequency_test(std::span<const std::int64_t> counts, const ProbabilityVector& expected,
                    std::int64_t n, double sigma);

}  // namespace relmeas
