#include "relmeas/io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace relmeas {

OutputFormat format_from_string(const std::string& name) {
    if (name == "json") return OutputFormat::json;
    if (name == "csv") return OutputFormat::csv;
    throw std::invalid_argument("unknown output format: " + name);
}

std::string format_double(double value) {
    if (!std::isfinite(value)) {
        throw std::invalid_argument("cannot serialize a non-finite float");
    }
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

namespace {

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (const char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            default: out += c;
        }
    }
    out += '"';
    return out;
}

/// Minimal JSON emitter with explicit structure; keys come out in call
/// order, so documents are byte-stable.
class JsonWriter {
public:
    explicit JsonWriter(std::ostream& out) : out_(out) {}

    void open_object() { item(); out_ << '{'; fresh_ = true; depth_++; }
    void close_object() { out_ << '}'; fresh_ = false; depth_--; }
    void open_array() { item(); out_ << '['; fresh_ = true; depth_++; }
    void close_array() { out_ << ']'; fresh_ = false; depth_--; }

    void key(const std::string& name) { item(); out_ << quoted(name) << ':'; pending_value_ = true; }

    void value(const std::string& s) { item(); out_ << quoted(s); }
    void value(double d) { item(); out_ << format_double(d); }
    void value(std::int64_t i) { item(); out_ << i; }
    void value(std::uint64_t u) { item(); out_ << u; }
    void value(int i) { item(); out_ << i; }
    void value(bool b) { item(); out_ << (b ? "true" : "false"); }
    void null() { item(); out_ << "null"; }

private:
    void item() {
        if (pending_value_) {
            pending_value_ = false;
            return;
        }
        if (!fresh_) out_ << ',';
        fresh_ = false;
    }

    std::ostream& out_;
    bool fresh_ = true;
    bool pending_value_ = false;
    int depth_ = 0;
};

void write_complex(JsonWriter& w, const cplx& z) {
    w.open_array();
    w.value(z.real());
    w.value(z.imag());
    w.close_array();
}

void write_config(JsonWriter& w, const ScenarioConfig& config) {
    w.open_object();
    w.key("scenario");
    w.value(to_string(config.scenario));
    const bool is_vn = std::holds_alternative<VonNeumannSpec>(config.model);
    w.key("model");
    w.value(std::string(is_vn ? "vn" : "ch"));
    cplx a1, a2;
    if (is_vn) {
        const auto& spec = std::get<VonNeumannSpec>(config.model);
        a1 = spec.a1;
        a2 = spec.a2;
    } else {
        const auto& spec = std::get<ColemanHeppSpec>(config.model);
        a1 = spec.a1;
        a2 = spec.a2;
    }
    w.key("a1");
    write_complex(w, a1);
    w.key("a2");
    write_complex(w, a2);
    w.key("n_atoms");
    if (is_vn) {
        w.null();
    } else {
        w.value(std::get<ColemanHeppSpec>(config.model).n_atoms);
    }
    w.key("events");
    w.value(config.n_events);
    w.key("seed");
    w.value(config.seed);
    w.key("sigma");
    w.value(config.sigma_bound);
    w.close_object();
}

void write_observers(JsonWriter& w, const std::vector<std::string>& labels) {
    w.open_object();
    for (std::size_t i = 0; i < labels.size(); ++i) {
        w.key(labels[i]);
        w.value(static_cast<std::int64_t>(i));
    }
    w.close_object();
}

void write_optional(JsonWriter& w, const std::optional<double>& v) {
    if (v) {
        w.value(*v);
    } else {
        w.null();
    }
}

void write_summary(JsonWriter& w, const SummaryStats& summary) {
    w.open_object();
    w.key("frequencies");
    w.open_object();
    for (const auto& [name, freq] : summary.frequencies) {
        w.key(name);
        w.open_array();
        for (const double f : freq) w.value(f);
        w.close_array();
    }
    w.close_object();
    w.key("pure_mixed_max_diff");
    write_optional(w, summary.pure_mixed_max_diff);
    w.key("correlation");
    write_optional(w, summary.correlation);
    w.key("coincidence_rate");
    write_optional(w, summary.coincidence_rate);
    w.key("expectation_b_pure");
    write_optional(w, summary.expectation_b_pure);
    w.key("expectation_b_mixed");
    write_optional(w, summary.expectation_b_mixed);
    w.key("joint_frequencies");
    if (summary.joint_frequencies.empty()) {
        w.null();
    } else {
        w.open_array();
        for (const auto& row : summary.joint_frequencies) {
            w.open_array();
            for (const double p : row) w.value(p);
            w.close_array();
        }
        w.close_array();
    }
    w.key("excluded_configuration");
    w.value(summary.excluded_configuration);
    w.key("pass_flags");
    w.open_object();
    for (const auto& [name, ok] : summary.pass_flags) {
        w.key(name);
        w.value(ok);
    }
    w.close_object();
    w.close_object();
}

void write_event(JsonWriter& w, const EventRecord& record) {
    w.open_object();
    w.key("event");
    w.value(record.event_index);
    w.key("stream");
    w.value(record.rng_stream_id);
    w.key("outcomes");
    w.open_object();
    for (const auto& [label, entries] : record.outcomes) {
        w.key(label);
        w.open_array();
        for (const auto& [step, outcome] : entries) {
            w.open_array();
            w.value(step);
            w.value(outcome);
            w.close_array();
        }
        w.close_array();
    }
    w.close_object();
    w.key("final");
    w.open_object();
    for (const auto& [label, outcome] : record.final_registers) {
        w.key(label);
        if (outcome) {
            w.value(*outcome);
        } else {
            w.null();
        }
    }
    w.close_object();
    w.close_object();
}

void write_document(JsonWriter& w, const OutputDocument& doc, bool with_events) {
    w.open_object();
    w.key("version");
    w.value(doc.tool_version);
    w.key("config");
    write_config(w, doc.config);
    w.key("observers");
    write_observers(w, doc.observer_labels);
    w.key("summary");
    write_summary(w, doc.summary);
    if (with_events) {
        w.key("events");
        w.open_array();
        for (const auto& record : doc.events) write_event(w, record);
        w.close_array();
    }
    w.close_object();
}

std::size_t observer_id(const OutputDocument& doc, const std::string& label) {
    for (std::size_t i = 0; i < doc.observer_labels.size(); ++i) {
        if (doc.observer_labels[i] == label) return i;
    }
    throw std::runtime_error("event references unknown observer: " + label);
}

}  // namespace

void emit_json(const OutputDocument& doc, std::ostream& out) {
    JsonWriter w(out);
    write_document(w, doc, doc.include_events);
    out << '\n';
}

void emit_summary_json(const OutputDocument& doc, std::ostream& out) {
    JsonWriter w(out);
    write_document(w, doc, false);
    out << '\n';
}

void emit_csv_events(const OutputDocument& doc, std::ostream& out) {
    out << "event,stream,observer,step,outcome\n";
    for (const auto& record : doc.events) {
        for (const auto& [label, entries] : record.outcomes) {
            const std::size_t id = observer_id(doc, label);
            for (const auto& [step, outcome] : entries) {
                out << record.event_index << ',' << record.rng_stream_id << ',' << id << ','
                    << step << ',' << outcome << '\n';
            }
        }
    }
}

}  // namespace relmeas
