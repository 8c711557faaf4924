#include "getf/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace getf {

using nlohmann::json;

double Schedule::makespan() const {
    double m = 0.0;
    for (TaskId j = 0; j < finish.size(); ++j) {
        if (scheduled(j)) m = std::max(m, finish[j]);
    }
    return m;
}

double Schedule::weighted_completion(const TaskGraph& g) const {
    double s = 0.0;
    for (TaskId j = 0; j < finish.size(); ++j) s += g.weight(j) * finish[j];
    return s;
}

void Schedule::place(TaskId j, MachineId i, double t, const Instance& inst) {
    machine[j] = i;
    start[j] = t;
    finish[j] = t + inst.processing_time(j, i);
    timelines[i].push_back(j);
    iteration_order.push_back(j);
}

TieBreakRule TieBreakRule::parse(const std::string& text) {
    if (text == "by-index") return by_index();
    if (text == "largest-demand") return largest_demand();
    if (text == "most-succ") return most_successors();
    const std::string prefix = "random:";
    if (text.rfind(prefix, 0) == 0) {
        const std::string num = text.substr(prefix.size());
        std::size_t pos = 0;
        std::uint64_t seed = 0;
        try {
            seed = std::stoull(num, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (num.empty() || pos != num.size()) throw SchedulingError("bad random tie-break seed '" + num + "'");
        return random(seed);
    }
    throw SchedulingError("unknown tie-break rule '" + text + "'");
}

std::string TieBreakRule::to_string() const {
    switch (kind) {
    case Kind::ByIndex: return "by-index";
    case Kind::Random: return "random:" + std::to_string(seed);
    case Kind::LargestDemand: return "largest-demand";
    case Kind::MostSuccessors: return "most-succ";
    }
    return "by-index";
}

TaskId TieBreaker::choose(std::span<const TaskId> candidates, const TaskGraph& g) {
    if (candidates.empty()) throw SchedulingError("tie-break over an empty candidate set");
    if (candidates.size() == 1) return candidates.front();
    switch (rule_.kind) {
    case TieBreakRule::Kind::ByIndex: return candidates.front();
    case TieBreakRule::Kind::Random: return candidates[rng_() % candidates.size()];
    case TieBreakRule::Kind::LargestDemand: {
        TaskId best = candidates.front();
        for (TaskId j : candidates) {
            if (g.demand(j) > g.demand(best)) best = j;
        }
        return best;
    }
    case TieBreakRule::Kind::MostSuccessors: {
        TaskId best = candidates.front();
        for (TaskId j : candidates) {
            if (g.successors(j).size() > g.successors(best).size()) best = j;
        }
        return best;
    }
    }
    return candidates.front();
}

double earliest_start(TaskId j, MachineId i, const Schedule& partial, const Instance& inst) {
    double t = partial.available(i);
    for (const Arc& p : inst.graph.predecessors(j)) {
        if (!partial.scheduled(p.task)) {
            throw SchedulingError("task " + std::to_string(j) + " has unscheduled predecessor " + std::to_string(p.task));
        }
        t = std::max(t, partial.finish[p.task] + inst.platform.comm_time(p.data, partial.machine[p.task], i));
    }
    return t;
}

namespace {

struct Placement {
    MachineId machine = kUnassigned;
    double start = std::numeric_limits<double>::infinity();
};

bool time_less(double a, double b) { return a < b - kEps * std::max(1.0, std::abs(b)); }
bool time_close(double a, double b) { return std::abs(a - b) <= kEps * std::max({1.0, std::abs(a), std::abs(b)}); }

// Earliest placement of j over `machines`. Equal starts prefer the fastest
// machine, then the lowest id (fastest_first) or just the lowest id.
Placement best_placement(TaskId j, const std::vector<MachineId>& machines, const Schedule& s, const Instance& inst,
                         bool fastest_first) {
    Placement best;
    for (MachineId i : machines) {
        const double t = earliest_start(j, i, s, inst);
        if (best.machine == kUnassigned || time_less(t, best.start)) {
            best = {i, t};
        } else if (time_close(t, best.start)) {
            const double si = inst.platform.speed(i);
            const double sb = inst.platform.speed(best.machine);
            if (fastest_first && si > sb) {
                best = {i, t};
            } else if ((!fastest_first || si == sb) && i < best.machine) {
                best = {i, t};
            }
        }
    }
    return best;
}

void check_assignment(const Instance& inst, const GroupAssignment& f) {
    if (f.task_group.size() != inst.num_tasks()) throw SchedulingError("group assignment does not cover every task");
    if (f.groups.num_machines() != inst.num_machines()) throw SchedulingError("group assignment refers to another platform");
    for (TaskId j = 0; j < inst.num_tasks(); ++j) {
        const std::size_t k = f.task_group[j];
        if (k < 1 || k > f.groups.K() || f.groups.machines_in(k).empty()) {
            throw SchedulingError("task " + std::to_string(j) + " is mapped to an empty or invalid group");
        }
    }
}

} // namespace

Schedule getf_schedule(const Instance& inst, const GroupAssignment& f, const TieBreakRule& tie) {
    check_assignment(inst, f);
    const std::size_t n = inst.num_tasks();
    Schedule s(n, inst.num_machines());
    std::vector<std::size_t> waiting(n);
    for (TaskId j = 0; j < n; ++j) waiting[j] = inst.graph.predecessors(j).size();
    std::vector<TaskId> ready;
    for (TaskId j = 0; j < n; ++j) {
        if (waiting[j] == 0) ready.push_back(j);
    }
    TieBreaker breaker(tie);
    std::vector<Placement> best(n);
    std::vector<TaskId> candidates;

    while (!ready.empty()) {
        double t_min = std::numeric_limits<double>::infinity();
        for (TaskId j : ready) {
            best[j] = best_placement(j, f.machines_for(j), s, inst, true);
            t_min = std::min(t_min, best[j].start);
        }
        candidates.clear();
        for (TaskId j : ready) {
            if (time_close(best[j].start, t_min)) candidates.push_back(j);
        }
        const TaskId chosen = breaker.choose(candidates, inst.graph);
        s.place(chosen, best[chosen].machine, best[chosen].start, inst);

        ready.erase(std::find(ready.begin(), ready.end(), chosen));
        for (const Arc& a : inst.graph.successors(chosen)) {
            if (--waiting[a.task] == 0) ready.insert(std::lower_bound(ready.begin(), ready.end(), a.task), a.task);
        }
    }
    if (s.iteration_order.size() != n) throw SchedulingError("precedence graph has a cycle");
    return s;
}

Schedule etf_schedule(const Instance& inst, const TieBreakRule& tie) {
    return getf_schedule(inst, trivial_assignment(inst), tie);
}

Schedule sls_schedule(const Instance& inst, const GroupAssignment& f, std::span<const TaskId> priority) {
    check_assignment(inst, f);
    const std::size_t n = inst.num_tasks();
    if (priority.size() != n) throw SchedulingError("priority list must contain every task exactly once");
    std::vector<std::size_t> pos(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        if (priority[k] >= n || pos[priority[k]] != n) throw SchedulingError("priority list must be a permutation of the tasks");
        pos[priority[k]] = k;
    }
    for (const Edge& e : inst.graph.edges()) {
        if (pos[e.src] > pos[e.dst]) {
            throw SchedulingError("priority list is not topological: " + std::to_string(e.src) + " must precede " +
                                  std::to_string(e.dst));
        }
    }
    Schedule s(n, inst.num_machines());
    for (TaskId j : priority) {
        const Placement p = best_placement(j, f.machines_for(j), s, inst, false);
        s.place(j, p.machine, p.start, inst);
    }
    return s;
}

const char* to_string(Violation::Kind kind) {
    switch (kind) {
    case Violation::Kind::Unscheduled: return "unscheduled";
    case Violation::Kind::Overlap: return "overlap";
    case Violation::Kind::Precedence: return "precedence";
    case Violation::Kind::Duration: return "duration";
    case Violation::Kind::Group: return "group";
    }
    return "unknown";
}

FeasibilityReport verify_schedule(const Instance& inst, const Schedule& s, const GroupAssignment* f) {
    FeasibilityReport report;
    const std::size_t n = inst.num_tasks();
    const std::size_t m = inst.num_machines();
    auto tol = [](double t) { return kEps * std::max(1.0, std::abs(t)); };
    auto add = [&](Violation::Kind kind, TaskId j, std::optional<TaskId> other, double time, std::string msg) {
        report.violations.push_back({kind, j, other, time, std::move(msg)});
    };

    if (s.num_tasks() != n || s.start.size() != n || s.finish.size() != n) {
        add(Violation::Kind::Unscheduled, 0, std::nullopt, 0.0, "schedule covers a different number of tasks");
        return report;
    }
    std::vector<std::vector<TaskId>> per_machine(m);
    for (TaskId j = 0; j < n; ++j) {
        if (!s.scheduled(j) || s.machine[j] >= m) {
            add(Violation::Kind::Unscheduled, j, std::nullopt, 0.0, "task " + std::to_string(j) + " has no valid machine");
            continue;
        }
        per_machine[s.machine[j]].push_back(j);
        const double expected = inst.processing_time(j, s.machine[j]);
        if (std::abs((s.finish[j] - s.start[j]) - expected) > tol(s.finish[j]) || s.start[j] < -tol(0.0)) {
            std::ostringstream os;
            os << "task " << j << " runs [" << s.start[j] << ", " << s.finish[j] << "] but needs " << expected;
            add(Violation::Kind::Duration, j, std::nullopt, s.start[j], os.str());
        }
        if (f != nullptr && !f->allows(j, s.machine[j])) {
            std::ostringstream os;
            os << "task " << j << " on machine " << s.machine[j] << " outside its group " << f->task_group[j];
            add(Violation::Kind::Group, j, std::nullopt, s.start[j], os.str());
        }
    }
    for (MachineId i = 0; i < m; ++i) {
        auto& tasks = per_machine[i];
        std::sort(tasks.begin(), tasks.end(), [&](TaskId a, TaskId b) {
            return s.start[a] != s.start[b] ? s.start[a] < s.start[b] : a < b;
        });
        for (std::size_t k = 1; k < tasks.size(); ++k) {
            const TaskId prev = tasks[k - 1];
            const TaskId cur = tasks[k];
            if (s.start[cur] < s.finish[prev] - tol(s.finish[prev])) {
                std::ostringstream os;
                os << "tasks " << prev << " and " << cur << " overlap on machine " << i;
                add(Violation::Kind::Overlap, cur, prev, s.start[cur], os.str());
            }
        }
    }
    for (TaskId j = 0; j < n; ++j) {
        if (!s.scheduled(j) || s.machine[j] >= m) continue;
        for (const Arc& p : inst.graph.predecessors(j)) {
            if (!s.scheduled(p.task) || s.machine[p.task] >= m) continue;
            const double ready = s.finish[p.task] + inst.platform.comm_time(p.data, s.machine[p.task], s.machine[j]);
            if (s.start[j] < ready - tol(ready)) {
                std::ostringstream os;
                os << "task " << j << " starts at " << s.start[j] << " before data from " << p.task << " arrives at " << ready;
                add(Violation::Kind::Precedence, j, p.task, s.start[j], os.str());
            }
        }
    }
    std::stable_sort(report.violations.begin(), report.violations.end(),
                     [](const Violation& a, const Violation& b) { return a.time < b.time; });
    return report;
}

std::optional<std::string> check_greedy_replay(const Instance& inst, const Schedule& s, const GroupAssignment& f) {
    const std::size_t n = inst.num_tasks();
    if (s.iteration_order.size() != n) return "iteration order does not cover every task";
    Schedule partial(n, inst.num_machines());
    std::vector<std::size_t> waiting(n);
    for (TaskId j = 0; j < n; ++j) waiting[j] = inst.graph.predecessors(j).size();
    std::vector<bool> done(n, false);
    for (std::size_t step = 0; step < n; ++step) {
        const TaskId chosen = s.iteration_order[step];
        if (chosen >= n || done[chosen] || waiting[chosen] != 0) {
            return "step " + std::to_string(step) + ": task " + std::to_string(chosen) + " was not ready";
        }
        double t_min = std::numeric_limits<double>::infinity();
        for (TaskId j = 0; j < n; ++j) {
            if (done[j] || waiting[j] != 0) continue;
            t_min = std::min(t_min, best_placement(j, f.machines_for(j), partial, inst, true).start);
        }
        const double own = earliest_start(chosen, s.machine[chosen], partial, inst);
        if (!time_close(own, s.start[chosen]) || !time_close(s.start[chosen], t_min)) {
            std::ostringstream os;
            os << "step " << step << ": task " << chosen << " started at " << s.start[chosen] << ", ready-set minimum "
               << t_min << ", earliest on its machine " << own;
            return os.str();
        }
        partial.place(chosen, s.machine[chosen], s.start[chosen], inst);
        done[chosen] = true;
        for (const Arc& a : inst.graph.successors(chosen)) --waiting[a.task];
    }
    return std::nullopt;
}

std::string serialize_schedule(const Schedule& s, const Instance& inst, const ScheduleMetadata& meta, int indent) {
    json doc;
    if (!meta.algorithm.empty()) doc["algorithm"] = meta.algorithm;
    if (!meta.tie.empty()) doc["tie"] = meta.tie;
    json rows = json::array();
    for (TaskId j = 0; j < s.num_tasks(); ++j) {
        rows.push_back({{"task", j}, {"machine", s.machine[j]}, {"start", s.start[j]}, {"end", s.finish[j]}});
    }
    doc["assignments"] = std::move(rows);
    doc["iteration_order"] = s.iteration_order;
    doc["makespan"] = s.makespan();
    doc["weighted_completion"] = s.weighted_completion(inst.graph);
    if (meta.assignment) doc["group_assignment"] = json::parse(serialize_assignment(*meta.assignment, -1));
    return doc.dump(indent);
}

ParsedSchedule parse_schedule(const std::string& text, const Instance& inst) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchedulingError(std::string("malformed schedule JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("assignments") || !doc["assignments"].is_array()) {
        throw SchedulingError("schedule document lacks an assignments array");
    }
    const std::size_t n = inst.num_tasks();
    ParsedSchedule out;
    Schedule& s = out.schedule;
    s = Schedule(n, inst.num_machines());
    try {
        for (const json& row : doc["assignments"]) {
            const TaskId j = row.at("task").get<TaskId>();
            const MachineId i = row.at("machine").get<MachineId>();
            if (j >= n) throw SchedulingError("schedule references unknown task " + std::to_string(j));
            if (i >= inst.num_machines()) throw SchedulingError("schedule references unknown machine " + std::to_string(i));
            if (s.scheduled(j)) throw SchedulingError("task " + std::to_string(j) + " assigned twice");
            s.machine[j] = i;
            s.start[j] = row.at("start").get<double>();
            s.finish[j] = row.at("end").get<double>();
        }
        if (doc.contains("iteration_order")) s.iteration_order = doc["iteration_order"].get<std::vector<TaskId>>();
    } catch (const json::exception& e) {
        throw SchedulingError(std::string("schedule schema violation: ") + e.what());
    }
    for (MachineId i = 0; i < inst.num_machines(); ++i) {
        for (TaskId j = 0; j < n; ++j) {
            if (s.machine[j] == i) s.timelines[i].push_back(j);
        }
        std::sort(s.timelines[i].begin(), s.timelines[i].end(), [&](TaskId a, TaskId b) {
            return s.start[a] != s.start[b] ? s.start[a] < s.start[b] : a < b;
        });
    }
    out.meta.algorithm = doc.value("algorithm", std::string());
    out.meta.tie = doc.value("tie", std::string());
    if (doc.contains("group_assignment")) out.meta.assignment = parse_assignment(doc["group_assignment"].dump(), inst);
    return out;
}

} // namespace getf
