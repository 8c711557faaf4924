#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "getf/analysis.hpp"
#include "getf/grouping.hpp"
#include "getf/model.hpp"
#include "getf/scheduler.hpp"

namespace getf {

enum class Algorithm { GetfMakespan, GetfWeighted, Etf, Sls };

Algorithm parse_algorithm(const std::string& text);
const char* to_string(Algorithm a);

struct SolveOptions {
    Algorithm algorithm = Algorithm::GetfMakespan;
    TieBreakRule tie;
    GroupingOptions grouping;
};

struct SolveResult {
    Schedule schedule;
    GroupAssignment assignment;
    ScheduleMetadata meta;
    FeasibilityReport feasibility;
    BoundReport separation;
    std::optional<BoundReport> theorem; // LP-based report for the GETF pipelines
    std::vector<std::string> warnings;

    /// Feasible, and for the GETF variants every bound report passes.
    bool ok() const;
};

/// getf-makespan and sls use the makespan relaxation groups (sls with the
/// topological order as priority); etf uses one group; getf-weighted groups
/// come from the time-indexed relaxation of the demand-normalized instance.
SolveResult solve(const Instance& inst, const SolveOptions& opts);

bool is_greedy(Algorithm a);

struct CompareOptions {
    std::vector<Algorithm> algorithms;
    std::vector<TieBreakRule> ties{TieBreakRule{}};
    bool timing = false; // runtime_ms column; off keeps the output byte-stable
};

/// CSV with columns
/// instance,algorithm,tie,makespan,weighted_completion,P,sum_D,C,bound_slack,runtime_ms,status
/// over the *.json files of `dir` in name order, then one SUMMARY row per algorithm.
std::string compare_batch(const std::filesystem::path& dir, const CompareOptions& opts);

inline constexpr const char* kCompareHeader =
    "instance,algorithm,tie,makespan,weighted_completion,P,sum_D,C,bound_slack,runtime_ms,status";

/// Shortest round-trip decimal form of x.
std::string format_number(double x);

} // namespace getf
