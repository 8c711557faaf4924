#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "getf/lp.hpp"
#include "getf/model.hpp"

namespace getf {

class GroupingError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct GroupingOptions {
    std::optional<double> gamma; // band ratio override; must be > 1
    double theta = 0.5;          // tail-mass threshold for l_j, in (0, 1)
};

/// Speed-band partition of the machines. Machines slower than s_max / m are
/// discarded; the rest are rescaled so the fastest has speed m and placed in
/// band k (1-based) when gamma^(k-1) <= speed < gamma^k, the top band closed.
class MachineGroups {
  public:
    MachineGroups() = default;
    MachineGroups(double gamma, std::size_t k, double normalization, std::vector<std::size_t> group_of,
                  std::vector<double> rescaled_speed, bool single = false);

    double gamma() const { return gamma_; }
    /// True for the one-group partition built by single_group().
    bool single() const { return single_; }
    std::size_t K() const { return k_; }
    /// Factor applied to original speeds (fastest retained becomes m).
    double normalization() const { return normalization_; }

    bool retained(MachineId i) const { return group_of_[i] != 0; }
    /// Group index 1..K, or 0 for a discarded machine.
    std::size_t group_of(MachineId i) const { return group_of_[i]; }
    std::size_t num_machines() const { return group_of_.size(); }
    std::vector<MachineId> retained_machines() const;
    const std::vector<MachineId>& machines_in(std::size_t k) const { return members_.at(k - 1); }

    double rescaled_speed(MachineId i) const { return rescaled_[i]; }
    /// s(M_k) in rescaled units.
    double group_speed(std::size_t k) const { return group_speed_.at(k - 1); }
    /// s(M_k) in the instance's own speed units.
    double original_group_speed(std::size_t k) const { return group_speed(k) / normalization_; }

  private:
    double gamma_ = 2.0;
    std::size_t k_ = 1;
    double normalization_ = 1.0;
    bool single_ = false;
    std::vector<std::size_t> group_of_;
    std::vector<double> rescaled_;
    std::vector<std::vector<MachineId>> members_;
    std::vector<double> group_speed_;
};

/// Task -> group mapping f(j) together with the partition it refers to.
struct GroupAssignment {
    MachineGroups groups;
    std::vector<std::size_t> task_group;      // 1..K
    std::vector<std::size_t> threshold_index; // l_j (empty for hand-built assignments)

    const std::vector<MachineId>& machines_for(TaskId j) const { return groups.machines_in(task_group[j]); }
    bool allows(TaskId j, MachineId i) const {
        return groups.retained(i) && groups.group_of(i) == task_group[j];
    }
};

double default_gamma(std::size_t m);

MachineGroups partition_machines(const Platform& p, std::optional<double> gamma_override = std::nullopt);

/// All machines in one group (K = 1, nothing discarded). ETF runs on this.
MachineGroups single_group(const Platform& p);

/// Every task mapped to the single group of single_group(p).
GroupAssignment trivial_assignment(const Instance& inst);

// ---- makespan relaxation -------------------------------------------------

/// Relaxed assignment LP over retained machines: variables x_{i,j} (retained i),
/// C_j, T; minimize T.
struct MakespanModel {
    LinearProgram lp;
    std::vector<MachineId> machines; // retained machines in column order
    std::size_t num_tasks = 0;

    std::size_t x(std::size_t machine_slot, TaskId j) const { return j * machines.size() + machine_slot; }
    std::size_t completion(TaskId j) const { return num_tasks * machines.size() + j; }
    std::size_t horizon() const { return num_tasks * machines.size() + num_tasks; }
};

struct MakespanFractional {
    std::vector<std::vector<double>> x; // [task][machine id]; zero on discarded machines
    std::vector<double> completion;     // C*_j
    double horizon = 0.0;               // T*
};

MakespanModel build_makespan_lp(const Instance& inst, const MachineGroups& groups);
MakespanFractional extract_makespan(const MakespanModel& model, const LpSolution& sol);

/// l_j = max{l : sum_{k >= l} x*_{M_k, j} >= theta}; f(j) = argmax_{k in [l_j, K]} s(M_k),
/// ties toward the larger k.
GroupAssignment assign_groups_makespan(const MakespanFractional& sol, const MachineGroups& groups,
                                       double theta = 0.5);

// ---- weighted completion relaxation --------------------------------------

/// Time-indexed LP: x_{i,j,q} for retained i and intervals q = 1..Q with
/// tau_q = 2^q, plus C_j; minimize sum_j w_j C_j.
struct WeightedModel {
    LinearProgram lp;
    std::vector<MachineId> machines;
    std::size_t num_tasks = 0;
    std::size_t intervals = 1; // Q

    std::size_t x(std::size_t machine_slot, TaskId j, std::size_t q) const {
        return (j * machines.size() + machine_slot) * intervals + (q - 1);
    }
    std::size_t completion(TaskId j) const { return num_tasks * machines.size() * intervals + j; }
};

struct WeightedFractional {
    std::size_t intervals = 1;               // Q
    std::vector<double> tau;                 // tau_q = 2^q, q = 0..Q
    std::vector<std::vector<std::vector<double>>> x; // [task][machine id][q-1]
    std::vector<double> completion;          // C*_j
    // Filled by collapse_time_indexed:
    std::vector<std::size_t> interval_of;    // q(j)
    std::vector<double> alpha;               // captured mass
    std::vector<std::vector<double>> x_tilde; // [task][machine id]
    std::vector<std::string> warnings;

    double interval_mass(TaskId j, std::size_t q) const;
};

std::size_t weighted_interval_count(const Instance& inst, const MachineGroups& groups);
WeightedModel build_weighted_lp(const Instance& inst, const MachineGroups& groups);
WeightedFractional extract_weighted(const WeightedModel& model, const LpSolution& sol);

/// Fills q(j), alpha_j and x~ from the raw time-indexed solution.
WeightedFractional collapse_time_indexed(WeightedFractional sol);

GroupAssignment assign_groups_weighted(const WeightedFractional& sol, const MachineGroups& groups,
                                       double theta = 0.5);

/// Substitution check of (x~, 2C*, 2^{q+1}) into the makespan relaxation built
/// over the tasks with q(j) = q.
struct SliceFeasibility {
    std::size_t interval = 0;
    std::vector<TaskId> tasks;
    double max_violation = 0.0;
    bool feasible = true;
};

std::vector<SliceFeasibility> check_slice_feasibility(const Instance& inst, const MachineGroups& groups,
                                                      const WeightedFractional& sol, double tol = 1e-6);

// ---- end-to-end pipelines ------------------------------------------------

struct MakespanPipeline {
    MachineGroups groups;
    MakespanFractional fractional;
    GroupAssignment assignment;
};

MakespanPipeline run_makespan_pipeline(const Instance& inst, const GroupingOptions& opts = {});

/// Runs on the demand-normalized instance (stored in `instance`).
struct WeightedPipeline {
    Instance instance;
    double demand_scale = 1.0;
    MachineGroups groups;
    WeightedFractional fractional;
    GroupAssignment assignment;
};

WeightedPipeline run_weighted_pipeline(const Instance& inst, const GroupingOptions& opts = {});

// ---- serialization -------------------------------------------------------

std::string serialize_assignment(const GroupAssignment& a, int indent = 2);

/// Rebuilds the partition from the platform and the stored gamma, then checks
/// the stored machine -> group map against it.
GroupAssignment parse_assignment(const std::string& text, const Instance& inst);

} // namespace getf
