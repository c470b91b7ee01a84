#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "relmeas/io.hpp"
#include "relmeas/scenarios.hpp"

using namespace relmeas;

namespace {

namespace fs = std::filesystem;

std::string cli_path() { return RELMEAS_CLI_PATH; }

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "relmeas_cli_test";
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args) {
    const std::string command = cli_path() + " " + args + " >/dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

OutputDocument sample_document(bool include_events) {
    ScenarioConfig config;
    config.scenario = ScenarioId::ensemble;
    config.model = VonNeumannSpec{0.6, 0.8, false};
    config.n_events = 50;
    config.seed = 21;
    const ScenarioResult result = run_ensemble(config);
    OutputDocument doc;
    doc.config = config;
    doc.observer_labels = result.observer_labels;
    doc.summary = result.summary;
    doc.events = result.events;
    doc.include_events = include_events;
    return doc;
}

}  // namespace

TEST_CASE("double formatting carries 17 significant digits") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(0.36) == "0.35999999999999999");
    CHECK(format_double(4.0) == "4");
    CHECK_THROWS_AS(format_double(std::numeric_limits<double>::infinity()),
                    std::invalid_argument);
}

TEST_CASE("json emission is deterministic and structurally fixed") {
    const OutputDocument doc = sample_document(true);
    std::ostringstream first;
    std::ostringstream second;
    emit_json(doc, first);
    emit_json(doc, second);
    CHECK(first.str() == second.str());
    CHECK(first.str().starts_with(
        "{\"version\":\"relmeas 1.0.0\",\"config\":{\"scenario\":\"ensemble\","
        "\"model\":\"vn\",\"a1\":["));
    CHECK(first.str().find("\"summary\":{\"frequencies\":") != std::string::npos);
    CHECK(first.str().find("\"events\":[{\"event\":0,\"stream\":0,") != std::string::npos);

    // events omitted when not requested
    const OutputDocument quiet = sample_document(false);
    std::ostringstream out;
    emit_json(quiet, out);
    CHECK(out.str().find("\"events\"") == std::string::npos);
}

TEST_CASE("empty event list still serializes when requested") {
    ScenarioConfig config;
    config.scenario = ScenarioId::discrimination;
    config.model = VonNeumannSpec{0.6, 0.8, false};
    config.n_events = 1;
    OutputDocument doc;
    doc.config = config;
    doc.summary = run_discrimination(config);
    doc.include_events = true;
    std::ostringstream out;
    emit_json(doc, out);
    CHECK(out.str().find("\"events\":[]") != std::string::npos);
}

TEST_CASE("csv rows are purely numeric and re-aggregate to the summary") {
    const OutputDocument doc = sample_document(true);
    std::ostringstream out;
    emit_csv_events(doc, out);
    std::istringstream in(out.str());
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "event,stream,observer,step,outcome");

    std::vector<std::int64_t> counts{0, 0};
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        std::istringstream fields(line);
        std::string field;
        std::vector<long long> values;
        while (std::getline(fields, field, ',')) {
            std::size_t consumed = 0;
            values.push_back(std::stoll(field, &consumed));
            CHECK(consumed == field.size());  // numeric, no quoting
        }
        REQUIRE(values.size() == 5);
        CHECK(values[2] == 0);  // single observer
        CHECK(values[3] == 1);
        ++counts[static_cast<std::size_t>(values[4])];
    }
    // pure run [0, n) and mixed run [n, 2n), one outcome row per event
    CHECK(rows == 100);
    const auto& pure = doc.summary.frequencies.at("O");
    const auto& mixed = doc.summary.frequencies.at("O_mixed");
    CHECK(static_cast<double>(counts[0]) == doctest::Approx(50.0 * (pure[0] + mixed[0])));
}

TEST_CASE("cli parses a valid ensemble run and exits cleanly") {
    const fs::path out = temp_dir() / "ensemble.json";
    const int code = run_cli("--scenario ensemble --model vn --a1 0.6 0 --a2 0.8 0 "
                             "--events 5000 --seed 42 --out " + out.string());
    CHECK(code == 0);
    const std::string text = slurp(out);
    CHECK(text.find("\"scenario\":\"ensemble\"") != std::string::npos);
    CHECK(text.find("\"pass_flags\"") != std::string::npos);
}

TEST_CASE("cli rejects non-normalized amplitudes with exit code 2") {
    CHECK(run_cli("--scenario ensemble --model vn --a1 1 0 --a2 1 0 --events 10") == 2);
}

TEST_CASE("cli rejects unknown values with exit code 2") {
    CHECK(run_cli("--scenario warp --events 10") == 2);
    CHECK(run_cli("--scenario ensemble --model xx --events 10") == 2);
    CHECK(run_cli("--scenario ensemble --model ch --n-atoms 99 --events 10") == 2);
    CHECK(run_cli("--scenario ensemble --events 0") == 2);
    CHECK(run_cli("--format csv --scenario ensemble --events 10") == 2);
}

TEST_CASE("cli runs the chain undoing configuration") {
    const fs::path out = temp_dir() / "undo_ch.json";
    const int code = run_cli("--scenario undoing --model ch --n-atoms 4 --a1 0.6 0 --a2 0.8 0 "
                             "--events 2000 --seed 7 --out " + out.string());
    CHECK(code == 0);
    const std::string text = slurp(out);
    CHECK(text.find("\"model\":\"ch\"") != std::string::npos);
    CHECK(text.find("\"n_atoms\":4") != std::string::npos);
    CHECK(text.find("\"register_reset_all_events\":true") != std::string::npos);
}

TEST_CASE("cli output bytes are reproducible for a fixed seed") {
    const fs::path out1 = temp_dir() / "rep1.json";
    const fs::path out2 = temp_dir() / "rep2.json";
    const std::string flags = "--scenario sequential --model vn --a1 0.6 0 --a2 0.8 0 "
                              "--events 500 --seed 9 --emit-events --out ";
    CHECK(run_cli(flags + out1.string()) == 0);
    CHECK(run_cli(flags + out2.string()) == 0);
    CHECK(slurp(out1) == slurp(out2));
}

TEST_CASE("cli honors the seed environment fallback") {
    const fs::path out1 = temp_dir() / "env1.json";
    const fs::path out2 = temp_dir() / "env2.json";
    const std::string base = "--scenario ensemble --model vn --events 200 --emit-events --out ";
    const std::string command1 = "RELMEAS_SEED=123 " + cli_path() + " " + base + out1.string() +
                                 " >/dev/null 2>&1";
    REQUIRE(WEXITSTATUS(std::system(command1.c_str())) == 0);
    CHECK(run_cli("--seed 123 " + base + out2.string()) == 0);
    CHECK(slurp(out1) == slurp(out2));
}

TEST_CASE("cli writes csv events with a summary sidecar") {
    const fs::path out = temp_dir() / "events.csv";
    const int code = run_cli("--scenario ensemble --model vn --a1 0.6 0 --a2 0.8 0 "
                             "--events 300 --seed 4 --format csv --out " + out.string());
    CHECK(code == 0);
    const std::string csv = slurp(out);
    CHECK(csv.starts_with("event,stream,observer,step,outcome\n"));
    const std::string summary = slurp(temp_dir() / "events.summary.json");
    CHECK(summary.find("\"pass_flags\"") != std::string::npos);
    CHECK(summary.find("\"events\"") == std::string::npos);
}
