#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relmeas/io.hpp"
#include "relmeas/scenarios.hpp"

namespace {

constexpr int kExitGateFailure = 1;
constexpr int kExitConfigError = 2;

struct CliOptions {
    std::string scenario;
    std::string model = "vn";
    std::vector<double> a1{0.6, 0.0};
    std::vector<double> a2{0.8, 0.0};
    int n_atoms = 4;
    std::int64_t events = 10000;
    std::optional<std::uint64_t> seed;
    double sigma = 4.0;
    std::string format = "json";
    bool emit_events = false;
    std::string out_path;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag_seed) {
    if (flag_seed) return *flag_seed;
    if (const char* env = std::getenv("RELMEAS_SEED")) {
        char* end = nullptr;
        const unsigned long long parsed = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0') {
            throw std::invalid_argument("RELMEAS_SEED is not an unsigned integer");
        }
        return parsed;
    }
    return 42;
}

relmeas::ScenarioConfig build_config(const CliOptions& opt) {
    using relmeas::cplx;
    cplx a1(opt.a1[0], opt.a1[1]);
    cplx a2(opt.a2[0], opt.a2[1]);
    const double total = std::norm(a1) + std::norm(a2);
    if (std::abs(total - 1.0) > 1e-6) {
        throw std::invalid_argument("amplitudes are not normalized: |a1|^2 + |a2|^2 = " +
                                    std::to_string(total));
    }
    // Absorb command-line rounding so the model invariants hold exactly.
    const double scale = std::sqrt(total);
    a1 /= scale;
    a2 /= scale;

    relmeas::ScenarioConfig config;
    config.scenario = relmeas::scenario_from_string(opt.scenario);
    if (opt.model == "vn") {
        config.model = relmeas::VonNeumannSpec{a1, a2, false};
    } else if (opt.model == "ch") {
        config.model = relmeas::ColemanHeppSpec{a1, a2, opt.n_atoms};
    } else {
        throw std::invalid_argument("unknown model: " + opt.model);
    }
    config.n_events = opt.events;
    config.seed = resolve_seed(opt.seed);
    config.sigma_bound = opt.sigma;
    config.validate();
    return config;
}

int run(const CliOptions& opt) {
    relmeas::ScenarioConfig config;
    relmeas::OutputFormat format{};
    try {
        config = build_config(opt);
        format = relmeas::format_from_string(opt.format);
        if (format == relmeas::OutputFormat::csv && opt.out_path.empty()) {
            throw std::invalid_argument("--format csv requires --out PATH");
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfigError;
    }

    relmeas::OutputDocument doc;
    doc.config = config;
    doc.include_events = opt.emit_events;
    try {
        relmeas::ScenarioResult result = relmeas::run_scenario(config);
        doc.observer_labels = std::move(result.observer_labels);
        doc.summary = std::move(result.summary);
        doc.events = std::move(result.events);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitGateFailure;
    }

    try {
        if (format == relmeas::OutputFormat::json) {
            if (opt.out_path.empty()) {
                relmeas::emit_json(doc, std::cout);
            } else {
                std::ofstream out(opt.out_path, std::ios::binary);
                if (!out) throw std::invalid_argument("cannot open " + opt.out_path);
                relmeas::emit_json(doc, out);
                if (!out) throw std::invalid_argument("write failed for " + opt.out_path);
            }
        } else {
            std::ofstream out(opt.out_path, std::ios::binary);
            if (!out) throw std::invalid_argument("cannot open " + opt.out_path);
            relmeas::emit_csv_events(doc, out);
            if (!out) throw std::invalid_argument("write failed for " + opt.out_path);

            std::filesystem::path summary_path(opt.out_path);
            summary_path.replace_extension(".summary.json");
            std::ofstream summary_out(summary_path, std::ios::binary);
            if (!summary_out) {
                throw std::invalid_argument("cannot open " + summary_path.string());
            }
            relmeas::emit_summary_json(doc, summary_out);
            if (!summary_out) {
                throw std::invalid_argument("write failed for " + summary_path.string());
            }
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfigError;
    }

    return doc.summary.all_pass() ? 0 : kExitGateFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"relmeas: measurement-event simulator over unitary quantum dynamics"};

    CliOptions opt;
    app.add_option("--scenario", opt.scenario,
                   "Scenario: ensemble|undoing|sequential|discrimination")
        ->required();
    app.add_option("--model", opt.model, "Model: vn (binary chain) or ch (spin chain)");
    app.add_option("--a1", opt.a1, "First amplitude as RE IM")->expected(2);
    app.add_option("--a2", opt.a2, "Second amplitude as RE IM")->expected(2);
    app.add_option("--n-atoms", opt.n_atoms, "Chain length for the ch model");
    app.add_option("--events", opt.events, "Number of measurement events");
    app.add_option("--seed", opt.seed, "RNG seed (fallback: env RELMEAS_SEED, then 42)");
    app.add_option("--sigma", opt.sigma, "Statistical gate width in standard deviations");
    app.add_option("--format", opt.format, "Output format: json or csv");
    app.add_flag("--emit-events", opt.emit_events, "Include per-event records in JSON output");
    app.add_option("--out", opt.out_path, "Output path (required for csv; default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfigError;
    }

    return run(opt);
}
