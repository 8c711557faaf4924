#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace getf {

using TaskId = std::size_t;
using MachineId = std::size_t;

/// Absolute tolerance used for time and quantity comparisons across the library.
inline constexpr double kEps = 1e-9;

/// Communication speed meaning "no delay" (w / inf == 0).
inline constexpr double kInfiniteSpeed = std::numeric_limits<double>::infinity();

/// Raised for malformed documents, schema violations and unusable instances.
class ModelError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Raised when an operation requires an acyclic graph and finds a cycle.
class CycleError : public ModelError {
  public:
    using ModelError::ModelError;
};

struct Task {
    TaskId id = 0;
    double demand = 1.0; // processing units p_j
    double weight = 0.0; // objective weight
};

struct Edge {
    TaskId src = 0;
    TaskId dst = 0;
    double data = 0.0; // units of data shipped from src to dst
};

/// Predecessor/successor entry in the adjacency lists.
struct Arc {
    TaskId task = 0;
    double data = 0.0;
};

/// Precedence DAG. Adjacency is built on construction; endpoints that do not
/// reference existing tasks are skipped there and reported by validate_instance.
class TaskGraph {
  public:
    TaskGraph() = default;
    TaskGraph(std::vector<Task> tasks, std::vector<Edge> edges);

    std::size_t size() const { return tasks_.size(); }
    const std::vector<Task>& tasks() const { return tasks_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const Task& task(TaskId j) const { return tasks_.at(j); }
    double demand(TaskId j) const { return tasks_[j].demand; }
    double weight(TaskId j) const { return tasks_[j].weight; }

    std::span<const Arc> predecessors(TaskId j) const { return preds_[j]; }
    std::span<const Arc> successors(TaskId j) const { return succs_[j]; }

    std::optional<double> edge_data(TaskId from, TaskId to) const;

  private:
    std::vector<Task> tasks_;
    std::vector<Edge> edges_;
    std::vector<std::vector<Arc>> preds_;
    std::vector<std::vector<Arc>> succs_;
};

struct Machine {
    MachineId id = 0;
    double speed = 1.0;
};

/// Related machines plus a full communication-speed matrix
/// (row = sending machine, column = receiving machine).
class Platform {
  public:
    Platform() = default;
    Platform(std::vector<Machine> machines, std::vector<std::vector<double>> comm_speed);

    std::size_t size() const { return machines_.size(); }
    const std::vector<Machine>& machines() const { return machines_; }
    double speed(MachineId i) const { return machines_[i].speed; }
    double comm_speed(MachineId from, MachineId to) const { return comm_[from][to]; }
    const std::vector<std::vector<double>>& comm_matrix() const { return comm_; }

    /// Time to ship `data` units from machine `from` to machine `to`.
    double comm_time(double data, MachineId from, MachineId to) const;

    double max_speed() const;
    double min_speed() const;
    double total_speed() const;

  private:
    std::vector<Machine> machines_;
    std::vector<std::vector<double>> comm_;
};

struct Instance {
    TaskGraph graph;
    Platform platform;

    std::size_t num_tasks() const { return graph.size(); }
    std::size_t num_machines() const { return platform.size(); }

    /// Processing time of task j on machine i.
    double processing_time(TaskId j, MachineId i) const {
        return graph.demand(j) / platform.speed(i);
    }
};

struct ValidationReport {
    std::vector<std::string> violations;
    std::vector<std::string> warnings;

    bool ok() const { return violations.empty(); }
};

/// Parses an instance document; throws ModelError (or CycleError) naming the
/// offending field when the document is malformed or the instance unusable.
Instance parse_instance(const std::string& text);

/// Serializes to the instance schema. Infinite communication speed becomes null.
std::string serialize_instance(const Instance& inst, int indent = 2);

ValidationReport validate_instance(const Instance& inst);

/// Kahn's algorithm, lowest id first among available tasks. Throws CycleError.
std::vector<TaskId> topological_order(const TaskGraph& g);

/// Multiplies every demand so that min over tasks and machines of p_j / s_i is at
/// least 1. Returns the rescaled instance and the factor used (1 when unchanged).
std::pair<Instance, double> normalize_demands(const Instance& inst);

/// Same instance with every communication speed set to infinite.
Instance without_communication(const Instance& inst);

} // namespace getf
