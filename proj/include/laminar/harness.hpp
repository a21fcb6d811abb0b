#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "laminar/fullvcmin.hpp"
#include "laminar/setsystem.hpp"

namespace laminar {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitUsage = 2, kExitResource = 3 };

/// Worker count: LAMINAR_VC_THREADS if set and positive, else the hardware count.
std::size_t worker_threads();

// ---------------------------------------------------------------------------
// Growth experiments

struct ExperimentConfig {
    std::optional<std::filesystem::path> model_path;
    /// Leaves of generated ultrametric models; 0 picks a size that fits the
    /// largest parameter set.
    std::size_t leaves = 0;
    std::size_t branching = 3;
    /// single-ball, lca-ball, twin-ball-k, twin-ball-<k>, boolean-mix, eq-witness
    std::string formula = "single-ball";
    std::size_t arity = 1;
    std::vector<std::size_t> sizes{8, 16, 32, 64};
    std::size_t trials = 5;
    std::uint64_t seed = 1;
    double tol = 0.15;
    std::uint64_t eval_cap = std::uint64_t{1} << 26;
    bool allow_duplicates = false;
    bool timing = true;

    double ceiling() const { return static_cast<double>(arity) + tol; }
};

/// Throws DomainError naming the offending field.
void validate(const ExperimentConfig& config);

struct GrowthRow {
    std::string model;
    std::string formula;
    std::size_t arity = 0;
    std::size_t m = 0;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    std::uint64_t type_count = 0;
    double ms = 0;
};

struct TrialFit {
    std::size_t trial = 0;
    GrowthSeries series;
    std::optional<ExponentFit> fit;
};

struct GrowthReport {
    ExperimentConfig config;
    std::vector<GrowthRow> rows;  // sorted by (trial, m)
    std::vector<TrialFit> fits;   // sorted by trial
    double median_exponent = 0;
    double ceiling = 0;
    bool pass = false;
    bool cap_exceeded = false;
    std::string error;

    int exit_code() const { return cap_exceeded ? kExitResource : pass ? kExitPass : kExitFail; }
};

GrowthReport run_growth(const ExperimentConfig& config);

inline constexpr const char* kGrowthCsvHeader = "model,formula,arity,m,trial,seed,type_count,ms";

std::string growth_csv(const GrowthReport& report);
nlohmann::json growth_json(const GrowthReport& report);

double median(std::vector<double> values);

// ---------------------------------------------------------------------------
// Lemma suites

struct LemmaResult {
    std::string id;
    std::size_t trials = 0;
    std::size_t failures = 0;
    double ms = 0;
    std::string first_failure;

    bool ok() const noexcept { return failures == 0; }
};

/// Default per-lemma trial counts; `trials` overrides all of them.
struct VerifyConfig {
    std::uint64_t seed = 1;
    std::optional<std::size_t> trials;
};

LemmaResult verify_directed_linear_bound(std::uint64_t seed, std::size_t trials);
LemmaResult verify_convexity(std::uint64_t seed, std::size_t trials);
LemmaResult verify_sum_dist(std::uint64_t seed, std::size_t trials);
LemmaResult verify_sauer_shelah(std::uint64_t seed, std::size_t trials);
LemmaResult verify_components(std::uint64_t seed, std::size_t trials);
LemmaResult verify_forest_determination(std::uint64_t seed, std::size_t trials);
LemmaResult verify_type_determination(std::uint64_t seed, std::size_t trials);
LemmaResult verify_incremental_count(std::uint64_t seed, std::size_t trials);

std::vector<LemmaResult> verify_lemmas(const VerifyConfig& config);
nlohmann::json lemmas_json(const std::vector<LemmaResult>& results, std::uint64_t seed);

/// Smallest-length cover of `target` by at most `max_len` pool balls, by
/// exhaustive search; nullopt when none exists.
std::optional<std::size_t> brute_force_cover_length(const BitSet& target, std::span<const BitSet> pool,
                                                    std::size_t max_len);

// ---------------------------------------------------------------------------
// Incremental-count demo

/// Built-in DLO instance on 4|B| points with B drawn from `seed`.
DloInstance demo_instance(std::size_t b_size, std::uint64_t seed);
nlohmann::json incremental_json(const IncrementalReport& report);

} // namespace laminar
