#include "getf/oracle.hpp"

#include <algorithm>
#include <limits>

namespace getf {

namespace {

class Enumerator {
  public:
    Enumerator(const Instance& inst, Objective objective, const OracleLimits& limits)
        : inst_(inst), objective_(objective), limits_(limits), partial_(inst.num_tasks(), inst.num_machines()),
          waiting_(inst.num_tasks()) {
        for (TaskId j = 0; j < inst.num_tasks(); ++j) waiting_[j] = inst.graph.predecessors(j).size();
    }

    OracleResult run() {
        search(0.0);
        OracleResult r;
        r.value = best_;
        r.schedule = std::move(best_schedule_);
        r.states = states_;
        return r;
    }

  private:
    void search(double value) {
        if (++states_ > limits_.max_states) {
            throw LimitsExceeded("brute force exceeded " + std::to_string(limits_.max_states) + " states");
        }
        if (value >= best_) return;
        const std::size_t n = inst_.num_tasks();
        if (partial_.iteration_order.size() == n) {
            best_ = value;
            best_schedule_ = partial_;
            return;
        }
        for (TaskId j = 0; j < n; ++j) {
            if (partial_.scheduled(j) || waiting_[j] != 0) continue;
            for (MachineId i = 0; i < inst_.num_machines(); ++i) {
                const double t = earliest_start(j, i, partial_, inst_);
                partial_.place(j, i, t, inst_);
                for (const Arc& a : inst_.graph.successors(j)) --waiting_[a.task];
                const double finish = partial_.finish[j];
                const double next = objective_ == Objective::Makespan ? std::max(value, finish)
                                                                      : value + inst_.graph.weight(j) * finish;
                search(next);
                for (const Arc& a : inst_.graph.successors(j)) ++waiting_[a.task];
                partial_.machine[j] = kUnassigned;
                partial_.timelines[i].pop_back();
                partial_.iteration_order.pop_back();
            }
        }
    }

    const Instance& inst_;
    Objective objective_;
    OracleLimits limits_;
    Schedule partial_;
    std::vector<std::size_t> waiting_;
    double best_ = std::numeric_limits<double>::infinity();
    Schedule best_schedule_;
    std::uint64_t states_ = 0;
};

} // namespace

OracleResult brute_force_schedule(const Instance& inst, bool ignore_comm, Objective objective,
                                  const OracleLimits& limits) {
    if (inst.num_tasks() > limits.max_tasks || inst.num_machines() > limits.max_machines) {
        throw LimitsExceeded("instance with " + std::to_string(inst.num_tasks()) + " tasks and " +
                             std::to_string(inst.num_machines()) + " machines exceeds the oracle limits");
    }
    if (inst.num_machines() == 0) throw ModelError("instance has no machines");
    if (ignore_comm) {
        const Instance relaxed = without_communication(inst);
        return Enumerator(relaxed, objective, limits).run();
    }
    return Enumerator(inst, objective, limits).run();
}

LowerBounds lower_bounds(const Instance& inst) {
    LowerBounds b;
    double total = 0.0;
    for (const Task& t : inst.graph.tasks()) total += t.demand;
    b.work = total / inst.platform.total_speed();

    std::vector<double> path(inst.num_tasks(), 0.0);
    double longest = 0.0;
    for (TaskId j : topological_order(inst.graph)) {
        double before = 0.0;
        for (const Arc& p : inst.graph.predecessors(j)) before = std::max(before, path[p.task]);
        path[j] = before + inst.graph.demand(j);
        longest = std::max(longest, path[j]);
    }
    b.chain = longest / inst.platform.max_speed();
    return b;
}

} // namespace getf
