#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "relmeas/scenarios.hpp"

namespace relmeas {

inline constexpr std::string_view kToolVersion = "relmeas 1.0.0";

enum class OutputFormat { json, csv };

OutputFormat format_from_string(const std::string& name);

struct OutputDocument {
    ScenarioConfig config;
    std::vector<std::string> observer_labels;
    SummaryStats summary;
    std::vector<EventRecord> events;
    bool include_events = false;
    std::string tool_version = std::string(kToolVersion);
};

/// Shortest-of-17-significant-digits decimal rendering used for every
/// float in the output documents.
std::string format_double(double value);

/// One JSON document with keys in fixed order (version, config, observers,
/// summary, events); complex numbers as [re, im] pairs; the events key is
/// present only when `include_events` is set.
void emit_json(const OutputDocument& doc, std::ostream& out);

/// Event rows only: header `event,stream,observer,step,outcome`, all fields
/// numeric; observers are encoded by their index in `observer_labels`.
void emit_csv_events(const OutputDocument& doc, std::ostream& out);

/// The JSON document without events (companion of the CSV event table).
void emit_summary_json(const OutputDocument& doc, std::ostream& out);

}  // namespace relmeas
