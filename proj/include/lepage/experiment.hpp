#pragma once

#include "lepage/epsilon.hpp"
#include "lepage/io.hpp"
#include "lepage/levy_bridge.hpp"
#include "lepage/processes.hpp"
#include "lepage/series.hpp"
#include "lepage/stats.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lepage {

/// Malformed or incomplete experiment document.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TestBlock {
    std::string type;
    json params;
};

struct OutputOptions {
    std::string dir = "out";
    bool paths_csv = true;
    bool jumps_csv = true;
    bool trace = false;  // per-r traces in meta.json
};

struct ExperimentConfig {
    json construction;
    std::optional<json> epsilon;  // ε for cumulant queries when the root is not a LePage node
    std::vector<double> grid;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
    LePageConfig engine;
    std::vector<TestBlock> tests;
    OutputOptions output;
};

ScalarLaw parse_law(const json& j);
LePageConfig parse_engine(const json& j, LePageConfig base = {});
DiscretizedLevyMeasure parse_levy_measure(const json& j);
/// `engine` is used by Composed inner constructions.
EpsilonSpec parse_epsilon(const json& j, const LePageConfig& engine = {});
std::vector<double> parse_grid(const json& j);

/// `seed` overrides (or supplies) the document seed.
ExperimentConfig parse_config(const json& doc, std::optional<std::uint64_t> seed = std::nullopt);
ExperimentConfig load_config(const std::filesystem::path& file, std::optional<std::uint64_t> seed = std::nullopt);

struct BuiltNode {
    ProcessSampler sampler;
    std::optional<EpsilonSpec> epsilon;  // set for LePage-series nodes
    std::vector<BuiltNode> children;
};

BuiltNode build_construction(const json& node, const LePageConfig& engine);

/// ε addressed by cumulant-type queries: the config's `epsilon`, else the root LePage node.
std::optional<EpsilonSpec> query_epsilon(const ExperimentConfig& cfg, const BuiltNode& root);

struct RunResult {
    std::vector<PathSample> paths;
    std::vector<TestReport> reports;
    json meta;
    bool all_passed() const;
};

/// Paths i use RandomStream(seed).child(0).child(i); test block j uses
/// RandomStream(seed).child(1).child(j).
RunResult run_experiment(const ExperimentConfig& cfg, bool run_tests, int threads = 1);
TestReport run_test(const TestBlock& block, const BuiltNode& root, const ExperimentConfig& cfg,
                    const RandomStream& stream, int threads);
void write_artifacts(const RunResult& r, const std::filesystem::path& dir, const OutputOptions& out,
                     bool with_report);

/// Construction tree, claims, integrability verdicts and configured tests.
std::string describe(const ExperimentConfig& cfg, const QuadratureBudget& budget = {});

}  // namespace lepage
