#include "getf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace getf {

using nlohmann::json;

namespace {

constexpr double kReportTol = 1e-6;

bool tied(double a, double b) { return std::abs(a - b) <= kEps * std::max(1.0, std::abs(b)); }

void require_complete(const Schedule& s, const Instance& inst) {
    if (s.num_tasks() != inst.num_tasks()) throw AnalysisError("schedule and instance differ in task count");
    for (TaskId j = 0; j < s.num_tasks(); ++j) {
        if (!s.scheduled(j)) throw AnalysisError("task " + std::to_string(j) + " is not scheduled");
    }
}

std::vector<TaskId> last_finishers(const Schedule& s) {
    const double cmax = s.makespan();
    std::vector<TaskId> out;
    for (TaskId j = 0; j < s.num_tasks(); ++j) {
        if (s.scheduled(j) && tied(s.finish[j], cmax)) out.push_back(j);
    }
    return out;
}

// Idle time on machine i inside [from, to] in the final schedule.
double idle_on(MachineId i, double from, double to, const Schedule& s) {
    if (to <= from) return 0.0;
    double busy = 0.0;
    for (TaskId j : s.timelines[i]) {
        const double lo = std::max(from, s.start[j]);
        const double hi = std::min(to, s.finish[j]);
        if (hi > lo) busy += hi - lo;
    }
    return std::max(0.0, (to - from) - busy);
}

double chain_processing(const TerminalChain& chain, const Schedule& s) {
    double p = 0.0;
    for (TaskId c : chain.tasks) p += s.finish[c] - s.start[c];
    return p;
}

std::vector<double> group_loads(const std::vector<TaskId>& tasks, const Instance& inst, const GroupAssignment& f) {
    std::vector<double> demand(f.groups.K(), 0.0);
    for (TaskId j : tasks) demand[f.task_group[j] - 1] += inst.graph.demand(j);
    std::vector<double> d(f.groups.K(), 0.0);
    for (std::size_t k = 1; k <= f.groups.K(); ++k) {
        if (demand[k - 1] > 0.0) d[k - 1] = demand[k - 1] / f.groups.original_group_speed(k);
    }
    return d;
}

std::string chain_string(const TerminalChain& c) {
    std::ostringstream os;
    for (std::size_t k = 0; k < c.tasks.size(); ++k) os << (k ? "->" : "") << c.tasks[k];
    return os.str();
}

} // namespace

std::vector<TaskId> latest_predecessors(TaskId j, const Schedule& s, const TaskGraph& g) {
    double latest = -std::numeric_limits<double>::infinity();
    for (const Arc& p : g.predecessors(j)) latest = std::max(latest, s.finish[p.task]);
    std::vector<TaskId> out;
    for (const Arc& p : g.predecessors(j)) {
        if (tied(s.finish[p.task], latest)) out.push_back(p.task);
    }
    return out;
}

TerminalChain terminal_chain(const Schedule& s, const TaskGraph& g, std::optional<TaskId> anchor,
                             const TieBreakRule& tie) {
    TieBreaker breaker(tie);
    TaskId cur = 0;
    if (anchor) {
        if (*anchor >= s.num_tasks() || !s.scheduled(*anchor)) {
            throw AnalysisError("anchor task " + std::to_string(*anchor) + " is not in the schedule");
        }
        cur = *anchor;
    } else {
        const std::vector<TaskId> last = last_finishers(s);
        if (last.empty()) throw AnalysisError("empty schedule has no terminal chain");
        cur = breaker.choose(last, g);
    }
    std::vector<TaskId> rev{cur};
    while (!g.predecessors(cur).empty()) {
        const std::vector<TaskId> latest = latest_predecessors(cur, s, g);
        cur = breaker.choose(latest, g);
        rev.push_back(cur);
    }
    return TerminalChain{{rev.rbegin(), rev.rend()}};
}

double slowest_link(TaskId from, TaskId to, const Schedule& s, const GroupAssignment& f, const Instance& inst) {
    double slowest = kInfiniteSpeed;
    for (MachineId i : f.machines_for(to)) slowest = std::min(slowest, inst.platform.comm_speed(s.machine[from], i));
    return slowest;
}

namespace {

double link_cost(TaskId from, TaskId to, const Schedule& s, const GroupAssignment& f, const Instance& inst) {
    const double w = inst.graph.edge_data(from, to).value_or(0.0);
    if (w == 0.0) return 0.0;
    const double sbar = slowest_link(from, to, s, f, inst);
    return std::isinf(sbar) ? 0.0 : w / sbar;
}

} // namespace

double chain_comm_time(const TerminalChain& chain, const Schedule& s, const GroupAssignment& f, const Instance& inst) {
    double c = 0.0;
    for (std::size_t k = 1; k < chain.tasks.size(); ++k) c += link_cost(chain.tasks[k - 1], chain.tasks[k], s, f, inst);
    return c;
}

std::pair<TerminalChain, double> best_terminal_chain(const Schedule& s, const TaskGraph& g,
                                                     const std::function<double(TaskId)>& node_cost,
                                                     const std::function<double(TaskId, TaskId)>& edge_cost,
                                                     std::optional<TaskId> anchor) {
    const std::size_t n = g.size();
    std::vector<double> cost(n, 0.0);
    std::vector<TaskId> via(n, n);
    for (TaskId j : topological_order(g)) {
        if (!s.scheduled(j)) continue;
        cost[j] = node_cost(j);
        if (g.predecessors(j).empty()) continue;
        double best = std::numeric_limits<double>::infinity();
        for (TaskId p : latest_predecessors(j, s, g)) {
            const double c = cost[p] + edge_cost(p, j);
            if (c < best) {
                best = c;
                via[j] = p;
            }
        }
        cost[j] += best;
    }

    std::vector<TaskId> anchors;
    if (anchor) {
        if (*anchor >= n || !s.scheduled(*anchor)) {
            throw AnalysisError("anchor task " + std::to_string(*anchor) + " is not in the schedule");
        }
        anchors.push_back(*anchor);
    } else {
        anchors = last_finishers(s);
    }
    if (anchors.empty()) throw AnalysisError("empty schedule has no terminal chain");
    TaskId end = anchors.front();
    for (TaskId a : anchors) {
        if (cost[a] < cost[end]) end = a;
    }
    std::vector<TaskId> rev;
    for (TaskId cur = end; cur != n; cur = via[cur]) rev.push_back(cur);
    return {TerminalChain{{rev.rbegin(), rev.rend()}}, cost[end]};
}

std::pair<TerminalChain, double> min_comm_terminal_chain(const Schedule& s, const Instance& inst,
                                                          const GroupAssignment& f) {
    require_complete(s, inst);
    auto [chain, c] = best_terminal_chain(
        s, inst.graph, [](TaskId) { return 0.0; },
        [&](TaskId a, TaskId b) { return link_cost(a, b, s, f, inst); });
    return {std::move(chain), c};
}

Inequality make_inequality(std::string name, double lhs, double rhs) {
    Inequality q;
    q.name = std::move(name);
    q.lhs = lhs;
    q.rhs = rhs;
    q.slack = rhs - lhs;
    q.pass = q.slack >= -kReportTol * std::max(1.0, std::abs(rhs));
    return q;
}

bool BoundReport::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Inequality& q) { return q.pass; });
}

double BoundReport::total_group_load() const { return std::accumulate(group_load.begin(), group_load.end(), 0.0); }

const Inequality* BoundReport::find(const std::string& name) const {
    for (const Inequality& q : checks) {
        if (q.name == name) return &q;
    }
    return nullptr;
}

const Inequality* BoundReport::tightest() const {
    const Inequality* best = nullptr;
    for (const Inequality& q : checks) {
        if (best == nullptr || q.slack < best->slack) best = &q;
    }
    return best;
}

BoundReport separation_report(const Schedule& s, const Instance& inst, const GroupAssignment& f) {
    require_complete(s, inst);
    BoundReport r;
    r.kind = "separation";
    r.objective = s.makespan();
    r.gamma = f.groups.gamma();
    r.K = f.groups.K();
    auto [chain, c] = min_comm_terminal_chain(s, inst, f);
    r.chain = std::move(chain);
    r.chain_comm = c;
    r.chain_processing = chain_processing(r.chain, s);
    std::vector<TaskId> all(inst.num_tasks());
    std::iota(all.begin(), all.end(), TaskId{0});
    r.group_load = group_loads(all, inst, f);
    r.checks.push_back(
        make_inequality("separation", r.objective, r.chain_processing + r.total_group_load() + r.chain_comm));

    // Idle time on the machines of the successor's group between consecutive
    // chain tasks, against the link's share of C (w over the slowest link).
    for (std::size_t k = 1; k < r.chain.tasks.size(); ++k) {
        const TaskId a = r.chain.tasks[k - 1];
        const TaskId b = r.chain.tasks[k];
        const double w = inst.graph.edge_data(a, b).value_or(0.0);
        double worst = 0.0;
        for (MachineId i : f.machines_for(b)) {
            const double idle = idle_on(i, s.finish[a], s.start[b], s);
            worst = std::max(worst, idle);
            const double direct = inst.platform.comm_time(w, s.machine[a], i);
            if (idle > direct + kReportTol * std::max(1.0, direct)) {
                r.notes.push_back("idle on machine " + std::to_string(i) + " between " + std::to_string(a) + " and " +
                                  std::to_string(b) + " exceeds that machine's own link delay");
            }
        }
        r.checks.push_back(make_inequality("idle[" + std::to_string(a) + "->" + std::to_string(b) + "]", worst,
                                           link_cost(a, b, s, f, inst)));
    }
    r.notes.push_back("chain " + chain_string(r.chain));
    return r;
}

BoundReport makespan_theorem_report(const Schedule& s, const Instance& inst, const GroupAssignment& f, double horizon) {
    BoundReport r = separation_report(s, inst, f);
    r.kind = "makespan";
    r.lp_value = horizon;
    r.checks.clear();
    const double g = r.gamma;
    const double k = static_cast<double>(r.K);
    r.checks.push_back(make_inequality("chain_processing", r.chain_processing, 2.0 * g * horizon));
    r.checks.push_back(make_inequality("group_load", r.total_group_load(), 2.0 * k * horizon));
    r.checks.push_back(make_inequality("makespan", r.objective, 2.0 * (g + k) * horizon + r.chain_comm));
    return r;
}

BoundReport identical_report(const Schedule& s, const Instance& inst, std::optional<double> optimum) {
    require_complete(s, inst);
    const std::size_t m = inst.num_machines();
    const double speed = inst.platform.speed(0);
    for (const Machine& mc : inst.platform.machines()) {
        if (std::abs(mc.speed - speed) > 1e-12 * speed) throw AnalysisError("identical_report requires identical machine speeds");
    }
    const double md = static_cast<double>(m);
    auto avg_comm = [&](TaskId a, TaskId b) {
        const double w = inst.graph.edge_data(a, b).value_or(0.0);
        double sum = 0.0;
        for (MachineId i = 0; i < m; ++i) sum += inst.platform.comm_time(w, s.machine[a], i);
        return sum / md;
    };
    auto [chain, cost] = best_terminal_chain(
        s, inst.graph, [&](TaskId j) { return (md - 1.0) / md * (s.finish[j] - s.start[j]); }, avg_comm);

    BoundReport r;
    r.kind = "identical";
    r.objective = s.makespan();
    r.gamma = 0.0;
    r.K = 1;
    r.chain = std::move(chain);
    r.chain_processing = chain_processing(r.chain, s);
    double c_prime = 0.0;
    for (std::size_t k = 1; k < r.chain.tasks.size(); ++k) c_prime += avg_comm(r.chain.tasks[k - 1], r.chain.tasks[k]);
    r.chain_comm = c_prime;
    double work = 0.0;
    for (TaskId j = 0; j < inst.num_tasks(); ++j) work += inst.graph.demand(j) / speed;
    r.group_load = {work / md};
    r.checks.push_back(
        make_inequality("intermediate", r.objective, work / md + (md - 1.0) / md * r.chain_processing + c_prime));
    if (optimum) {
        r.lp_value = *optimum;
        r.checks.push_back(make_inequality("optimum", r.objective, (2.0 - 1.0 / md) * *optimum + c_prime));
    }
    r.notes.push_back("chain " + chain_string(r.chain));
    return r;
}

std::vector<double> per_task_chain_comm(const Schedule& s, const Instance& inst, const GroupAssignment& f) {
    require_complete(s, inst);
    // Every ancestor of j precedes j in the iteration order, so the chain DP over
    // the full schedule restricted to anchor j equals the DP over the prefix.
    const std::size_t n = inst.num_tasks();
    std::vector<double> out(n, 0.0);
    for (TaskId j = 0; j < n; ++j) {
        out[j] = best_terminal_chain(
                     s, inst.graph, [](TaskId) { return 0.0; },
                     [&](TaskId a, TaskId b) { return link_cost(a, b, s, f, inst); }, j)
                     .second;
    }
    return out;
}

BoundReport weighted_theorem_report(const Schedule& s, const Instance& inst, const GroupAssignment& f,
                                    const WeightedFractional& relaxation) {
    require_complete(s, inst);
    const std::size_t n = inst.num_tasks();
    if (s.iteration_order.size() != n) throw AnalysisError("weighted report needs the full iteration order");
    if (relaxation.completion.size() != n || relaxation.interval_of.size() != n) {
        throw AnalysisError("weighted relaxation does not match the instance (collapse_time_indexed not run?)");
    }
    BoundReport r;
    r.kind = "weighted";
    r.objective = s.weighted_completion(inst.graph);
    r.gamma = f.groups.gamma();
    r.K = f.groups.K();
    const double factor = 32.0 * (r.gamma + static_cast<double>(r.K));

    double lp_value = 0.0;
    double comm_sum = 0.0;
    double prefix_finish = 0.0;
    std::vector<TaskId> prefix;
    for (TaskId j : s.iteration_order) {
        prefix.push_back(j);
        prefix_finish = std::max(prefix_finish, s.finish[j]);
        if (!tied(s.finish[j], prefix_finish)) {
            r.notes.push_back("task " + std::to_string(j) + " is not a last finisher of its prefix");
        }
        auto [chain, c] = best_terminal_chain(
            s, inst.graph, [](TaskId) { return 0.0; },
            [&](TaskId a, TaskId b) { return link_cost(a, b, s, f, inst); }, j);
        const double p = chain_processing(chain, s);
        const std::vector<double> d = group_loads(prefix, inst, f);
        const double dsum = std::accumulate(d.begin(), d.end(), 0.0);
        const double cstar = relaxation.completion[j];
        const std::string tag = "[" + std::to_string(j) + "]";
        r.checks.push_back(make_inequality("per_task" + tag, p + dsum, factor * cstar));
        const double left = std::ldexp(1.0, static_cast<int>(relaxation.interval_of[j]) - 1);
        r.checks.push_back(make_inequality("interval" + tag, left, 2.0 * cstar));
        lp_value += inst.graph.weight(j) * cstar;
        comm_sum += inst.graph.weight(j) * c;
        if (j == s.iteration_order.back()) {
            r.chain = chain;
            r.chain_processing = p;
            r.group_load = d;
        }
    }
    r.lp_value = lp_value;
    r.chain_comm = comm_sum;
    r.checks.push_back(make_inequality("aggregate", r.objective, factor * lp_value + comm_sum));
    return r;
}

std::string serialize_report(const BoundReport& r, int indent) {
    json doc;
    doc["kind"] = r.kind;
    doc["objective"] = r.objective;
    doc["P"] = r.chain_processing;
    doc["D"] = r.group_load;
    doc["C"] = r.chain_comm;
    doc["gamma"] = r.gamma;
    doc["K"] = r.K;
    if (r.lp_value) doc["lp_value"] = *r.lp_value;
    doc["chain"] = r.chain.tasks;
    json checks = json::array();
    for (const Inequality& q : r.checks) {
        checks.push_back({{"name", q.name}, {"lhs", q.lhs}, {"rhs", q.rhs}, {"slack", q.slack}, {"pass", q.pass}});
    }
    doc["inequalities"] = std::move(checks);
    doc["notes"] = r.notes;
    doc["pass"] = r.pass();
    return doc.dump(indent);
}

} // namespace getf
