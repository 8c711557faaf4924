#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "getf/grouping.hpp"
#include "getf/model.hpp"
#include "getf/scheduler.hpp"

namespace getf {

class AnalysisError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// c_1 < c_2 < ... < c_N, walked backwards from the anchor c_N through
/// latest-finishing immediate predecessors until a source task.
struct TerminalChain {
    std::vector<TaskId> tasks;

    TaskId anchor() const { return tasks.back(); }
    std::size_t size() const { return tasks.size(); }
};

/// Immediate predecessors of j whose finish is within tolerance of the latest one.
std::vector<TaskId> latest_predecessors(TaskId j, const Schedule& s, const TaskGraph& g);

/// Backward walk with ties resolved by `tie`. The anchor defaults to a
/// latest-finishing task. Throws AnalysisError if the anchor is not scheduled.
TerminalChain terminal_chain(const Schedule& s, const TaskGraph& g, std::optional<TaskId> anchor = std::nullopt,
                             const TieBreakRule& tie = {});

/// Slowest link speed from the machine of `from` into the group of `to`.
double slowest_link(TaskId from, TaskId to, const Schedule& s, const GroupAssignment& f, const Instance& inst);

/// Sum over chain links of w / (slowest link speed into the successor's group).
double chain_comm_time(const TerminalChain& chain, const Schedule& s, const GroupAssignment& f, const Instance& inst);

/// Terminal chain minimizing chain_comm_time, by dynamic programming over the
/// latest-finishing-predecessor relation; anchors range over the last finishers.
std::pair<TerminalChain, double> min_comm_terminal_chain(const Schedule& s, const Instance& inst,
                                                          const GroupAssignment& f);

/// Minimum over terminal chains ending at `anchor` (or at any last finisher when
/// unset) of sum of node_cost over chain tasks plus edge_cost over its links.
std::pair<TerminalChain, double> best_terminal_chain(const Schedule& s, const TaskGraph& g,
                                                     const std::function<double(TaskId)>& node_cost,
                                                     const std::function<double(TaskId, TaskId)>& edge_cost,
                                                     std::optional<TaskId> anchor = std::nullopt);

struct Inequality {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    bool pass = true;
};

/// slack = rhs - lhs; passes when slack >= -1e-6 * max(1, |rhs|).
Inequality make_inequality(std::string name, double lhs, double rhs);

struct BoundReport {
    std::string kind;
    double objective = 0.0; // makespan or weighted completion
    double chain_processing = 0.0;        // P
    std::vector<double> group_load;       // D_1..D_K
    double chain_comm = 0.0;              // C, C' or sum_j w_j C(S,j)
    double gamma = 0.0;
    std::size_t K = 0;
    std::optional<double> lp_value;       // T* or sum_j w_j C*_j
    TerminalChain chain;
    std::vector<Inequality> checks;
    std::vector<std::string> notes;

    bool pass() const;
    double total_group_load() const;
    const Inequality* find(const std::string& name) const;
    /// Check with the smallest slack.
    const Inequality* tightest() const;
};

/// makespan <= P + sum_k D_k + C over the min-C terminal chain, plus an
/// idle-time replay per chain link: idle on every machine of the successor's
/// group between the two tasks is at most w over the slowest link into it.
BoundReport separation_report(const Schedule& s, const Instance& inst, const GroupAssignment& f);

/// P <= 2 gamma T*, sum_k D_k <= 2 K T*, makespan <= 2 (gamma + K) T* + C.
BoundReport makespan_theorem_report(const Schedule& s, const Instance& inst, const GroupAssignment& f,
                                    double horizon);

/// Identical machines: makespan <= (1/m) sum p + ((m-1)/m) chain P + C', and
/// with a known zero-communication optimum, makespan <= (2 - 1/m) OPT + C'.
BoundReport identical_report(const Schedule& s, const Instance& inst, std::optional<double> optimum = std::nullopt);

/// C(S, j) for every task: min-C terminal chain anchored at j in the prefix of
/// the iteration order ending with j.
std::vector<double> per_task_chain_comm(const Schedule& s, const Instance& inst, const GroupAssignment& f);

/// Per-task P(S,j) + sum_k D_k(S,j) <= 32 (gamma + K) C*_j, the aggregate
/// weighted-completion inequality, and 2^{q(j)-1} <= 2 C*_j.
BoundReport weighted_theorem_report(const Schedule& s, const Instance& inst, const GroupAssignment& f,
                                    const WeightedFractional& relaxation);

std::string serialize_report(const BoundReport& r, int indent = 2);

} // namespace getf
