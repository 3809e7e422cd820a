#pragma once

#include "dift/analytic.hpp"
#include "dift/game.hpp"
#include "dift/ifg.hpp"
#include "dift/rlarne.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dift::exp {

/// Library version with the git description captured at configure time.
std::string version_string();

struct GraphSource {
    /// JSON graph file; run through the pruning pipeline unless already a valid Ifg.
    std::optional<std::filesystem::path> file;
    ifg::SyntheticParams synthetic;
    std::vector<ifg::DirectoryGroup> merge;
};

struct ExperimentConfig {
    GraphSource graph;
    RewardParams params = RewardParams::reference(3);
    FnRates fn;
    TrainConfig train;
    std::filesystem::path out = "out";
    double tolerance = 0.5;

    /// Relative file paths resolve against base_dir. Throws ParseError / ValidationError.
    static ExperimentConfig parse(const std::string& json_text, const std::filesystem::path& base_dir = ".");
    static ExperimentConfig load(const std::filesystem::path& path);
    std::string to_json() const;
};

ifg::Ifg build_graph(const ExperimentConfig& cfg);
Game build_game(const ExperimentConfig& cfg);

struct ComparisonRow {
    std::string policy;
    double rho_D = 0.0;
    double rho_A = 0.0;
};

/// ARNE, uniform and cut defender policies, each against the ARNE attacker.
std::vector<ComparisonRow> compare_policies(const Game& g, const PolicyPair& arne);
std::string comparison_csv(const std::vector<ComparisonRow>& rows);
std::vector<ComparisonRow> parse_comparison_csv(const std::string& text);

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> iterations;
    std::optional<std::filesystem::path> out;
};

void apply(ExperimentConfig& cfg, const Overrides& o);

// --- commands; each returns a process exit code and logs to `log` -----------

int cmd_gen_graph(const ifg::SyntheticParams& params, const std::filesystem::path& out, std::ostream& log);

struct PruneArgs {
    std::filesystem::path input;
    std::filesystem::path output;
    std::optional<std::vector<ifg::NodeId>> entries;
    std::optional<std::vector<std::vector<ifg::NodeId>>> destinations;
    std::vector<ifg::DirectoryGroup> merge;
};
int cmd_prune(const PruneArgs& args, std::ostream& log);

/// Writes history.csv, policy_D.json, policy_A.json and manifest.json to cfg.out.
int cmd_train(const ExperimentConfig& cfg, std::ostream& log);

/// Writes certificate.json to cfg.out; 0 on pass, 1 on fail.
int cmd_certify(const ExperimentConfig& cfg, const std::filesystem::path& policy_D,
                const std::filesystem::path& policy_A, std::ostream& log);

/// Writes comparison.csv to cfg.out.
int cmd_compare(const ExperimentConfig& cfg, const std::filesystem::path& policy_D,
                const std::filesystem::path& policy_A, std::ostream& log);

} // namespace dift::exp
