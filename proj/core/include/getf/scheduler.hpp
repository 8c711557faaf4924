#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "getf/grouping.hpp"
#include "getf/model.hpp"

namespace getf {

class SchedulingError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr MachineId kUnassigned = std::numeric_limits<MachineId>::max();

/// Machine assignment and start/finish times, plus the order in which the
/// scheduler placed tasks and each machine's tasks in placement order.
struct Schedule {
    std::vector<MachineId> machine;
    std::vector<double> start;
    std::vector<double> finish;
    std::vector<TaskId> iteration_order;
    std::vector<std::vector<TaskId>> timelines;

    Schedule() = default;
    Schedule(std::size_t tasks, std::size_t machines)
        : machine(tasks, kUnassigned), start(tasks, 0.0), finish(tasks, 0.0), timelines(machines) {}

    std::size_t num_tasks() const { return machine.size(); }
    bool scheduled(TaskId j) const { return machine[j] != kUnassigned; }

    /// Finish of the last task appended to machine i (0 when idle).
    double available(MachineId i) const { return timelines[i].empty() ? 0.0 : finish[timelines[i].back()]; }
    double makespan() const;
    double weighted_completion(const TaskGraph& g) const;

    /// Appends task j to machine i at time t.
    void place(TaskId j, MachineId i, double t, const Instance& inst);
};

struct TieBreakRule {
    enum class Kind { ByIndex, Random, LargestDemand, MostSuccessors };
    Kind kind = Kind::ByIndex;
    std::uint64_t seed = 0;

    static TieBreakRule by_index() { return {}; }
    static TieBreakRule random(std::uint64_t seed) { return {Kind::Random, seed}; }
    static TieBreakRule largest_demand() { return {Kind::LargestDemand, 0}; }
    static TieBreakRule most_successors() { return {Kind::MostSuccessors, 0}; }

    /// Parses by-index | random:<seed> | largest-demand | most-succ.
    static TieBreakRule parse(const std::string& text);
    std::string to_string() const;
};

/// Stateful chooser for one run of a rule (the Random variant owns its RNG).
class TieBreaker {
  public:
    explicit TieBreaker(TieBreakRule rule) : rule_(rule), rng_(rule.seed) {}

    /// Picks one of `candidates` (ascending ids, nonempty).
    TaskId choose(std::span<const TaskId> candidates, const TaskGraph& g);

  private:
    TieBreakRule rule_;
    std::mt19937_64 rng_;
};

/// max(machine available time, max over predecessors of finish + data / comm speed).
/// Throws SchedulingError if a predecessor is unscheduled.
double earliest_start(TaskId j, MachineId i, const Schedule& partial, const Instance& inst);

/// Generalized Earliest Time First: repeatedly schedules, among tasks whose
/// predecessors are all placed, one with the smallest achievable start on a
/// machine of its group. Machine ties go to the fastest, then lowest id.
Schedule getf_schedule(const Instance& inst, const GroupAssignment& f, const TieBreakRule& tie = {});

/// GETF with every machine in one group.
Schedule etf_schedule(const Instance& inst, const TieBreakRule& tie = {});

/// Fixed-priority list scheduling: the first unscheduled task of `priority`
/// goes to its earliest start within its group (machine ties: lowest id).
Schedule sls_schedule(const Instance& inst, const GroupAssignment& f, std::span<const TaskId> priority);

struct Violation {
    enum class Kind { Unscheduled, Overlap, Precedence, Duration, Group };
    Kind kind = Kind::Unscheduled;
    TaskId task = 0;
    std::optional<TaskId> other;
    double time = 0.0;
    std::string message;
};

struct FeasibilityReport {
    std::vector<Violation> violations; // ordered by time, earliest first

    bool feasible() const { return violations.empty(); }
    const Violation* first() const { return violations.empty() ? nullptr : &violations.front(); }
};

FeasibilityReport verify_schedule(const Instance& inst, const Schedule& s, const GroupAssignment* f = nullptr);

/// Re-runs the greedy decisions in iteration order and checks that each chosen
/// task started at the minimum achievable start over the ready set.
/// Returns a description of the first mismatch, or nullopt.
std::optional<std::string> check_greedy_replay(const Instance& inst, const Schedule& s, const GroupAssignment& f);

const char* to_string(Violation::Kind kind);

struct ScheduleMetadata {
    std::string algorithm;
    std::string tie;
    std::optional<GroupAssignment> assignment;
};

std::string serialize_schedule(const Schedule& s, const Instance& inst, const ScheduleMetadata& meta = {},
                               int indent = 2);

struct ParsedSchedule {
    Schedule schedule;
    ScheduleMetadata meta;
};

ParsedSchedule parse_schedule(const std::string& text, const Instance& inst);

} // namespace getf
