#include "getf/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

#include <json.hpp>

namespace getf {

using nlohmann::json;

TaskGraph::TaskGraph(std::vector<Task> tasks, std::vector<Edge> edges)
    : tasks_(std::move(tasks)), edges_(std::move(edges)), preds_(tasks_.size()), succs_(tasks_.size()) {
    const std::size_t n = tasks_.size();
    for (const Edge& e : edges_) {
        if (e.src >= n || e.dst >= n) continue;
        preds_[e.dst].push_back({e.src, e.data});
        succs_[e.src].push_back({e.dst, e.data});
    }
    for (auto& v : preds_) std::sort(v.begin(), v.end(), [](const Arc& a, const Arc& b) { return a.task < b.task; });
    for (auto& v : succs_) std::sort(v.begin(), v.end(), [](const Arc& a, const Arc& b) { return a.task < b.task; });
}

std::optional<double> TaskGraph::edge_data(TaskId from, TaskId to) const {
    if (to >= preds_.size()) return std::nullopt;
    for (const Arc& a : preds_[to]) {
        if (a.task == from) return a.data;
    }
    return std::nullopt;
}

Platform::Platform(std::vector<Machine> machines, std::vector<std::vector<double>> comm_speed)
    : machines_(std::move(machines)), comm_(std::move(comm_speed)) {}

double Platform::comm_time(double data, MachineId from, MachineId to) const {
    if (data == 0.0) return 0.0;
    const double s = comm_[from][to];
    if (std::isinf(s)) return 0.0;
    return data / s;
}

double Platform::max_speed() const {
    double s = 0.0;
    for (const Machine& m : machines_) s = std::max(s, m.speed);
    return s;
}

double Platform::min_speed() const {
    double s = std::numeric_limits<double>::infinity();
    for (const Machine& m : machines_) s = std::min(s, m.speed);
    return s;
}

double Platform::total_speed() const {
    double s = 0.0;
    for (const Machine& m : machines_) s += m.speed;
    return s;
}

namespace {

std::string field(const std::string& array, std::size_t idx, const std::string& name) {
    std::ostringstream os;
    os << array << "[" << idx << "]";
    if (!name.empty()) os << "." << name;
    return os.str();
}

double require_number(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) throw ModelError("missing field " + where);
    const json& v = obj.at(key);
    if (!v.is_number()) throw ModelError("field " + where + " must be a number");
    return v.get<double>();
}

std::size_t require_index(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) throw ModelError("missing field " + where);
    const json& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ModelError("field " + where + " must be a nonnegative integer");
    }
    return v.get<std::size_t>();
}

const json& require_array(const json& doc, const std::string& key) {
    if (!doc.contains(key)) throw ModelError("missing field " + key);
    const json& v = doc.at(key);
    if (!v.is_array()) throw ModelError("field " + key + " must be an array");
    return v;
}

// Weakly connected components over valid edges.
std::size_t component_count(const TaskGraph& g) {
    const std::size_t n = g.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const Edge& e : g.edges()) {
        if (e.src < n && e.dst < n) parent[find(e.src)] = find(e.dst);
    }
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) count += find(i) == i ? 1 : 0;
    return count;
}

} // namespace

Instance parse_instance(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ModelError(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ModelError("instance document must be a JSON object");

    const json& jt = require_array(doc, "tasks");
    std::vector<Task> tasks(jt.size());
    std::vector<bool> seen(jt.size(), false);
    for (std::size_t k = 0; k < jt.size(); ++k) {
        const json& t = jt[k];
        if (!t.is_object()) throw ModelError("field " + field("tasks", k, "") + " must be an object");
        const std::size_t id = require_index(t, "id", field("tasks", k, "id"));
        if (id >= jt.size() || seen[id]) {
            throw ModelError("field " + field("tasks", k, "id") + ": ids must be unique and within 0..n-1");
        }
        seen[id] = true;
        Task task;
        task.id = id;
        task.demand = require_number(t, "demand", field("tasks", k, "demand"));
        task.weight = t.contains("weight") ? require_number(t, "weight", field("tasks", k, "weight")) : 0.0;
        if (!(task.demand > 0.0) || !std::isfinite(task.demand)) {
            throw ModelError("field " + field("tasks", k, "demand") + ": nonpositive demand, task " + std::to_string(id));
        }
        if (!(task.weight >= 0.0) || !std::isfinite(task.weight)) {
            throw ModelError("field " + field("tasks", k, "weight") + ": negative weight, task " + std::to_string(id));
        }
        tasks[id] = task;
    }

    std::vector<Edge> edges;
    if (doc.contains("edges")) {
        const json& je = require_array(doc, "edges");
        for (std::size_t k = 0; k < je.size(); ++k) {
            const json& e = je[k];
            if (!e.is_object()) throw ModelError("field " + field("edges", k, "") + " must be an object");
            Edge edge;
            edge.src = require_index(e, "src", field("edges", k, "src"));
            edge.dst = require_index(e, "dst", field("edges", k, "dst"));
            edge.data = e.contains("data") ? require_number(e, "data", field("edges", k, "data")) : 0.0;
            edges.push_back(edge);
        }
    }

    const json& jm = require_array(doc, "machines");
    std::vector<Machine> machines(jm.size());
    std::vector<bool> mseen(jm.size(), false);
    for (std::size_t k = 0; k < jm.size(); ++k) {
        const json& m = jm[k];
        if (!m.is_object()) throw ModelError("field " + field("machines", k, "") + " must be an object");
        const std::size_t id = require_index(m, "id", field("machines", k, "id"));
        if (id >= jm.size() || mseen[id]) {
            throw ModelError("field " + field("machines", k, "id") + ": ids must be unique and within 0..m-1");
        }
        mseen[id] = true;
        const double speed = require_number(m, "speed", field("machines", k, "speed"));
        if (!(speed > 0.0) || !std::isfinite(speed)) {
            throw ModelError("field " + field("machines", k, "speed") + ": nonpositive speed, machine " + std::to_string(id));
        }
        machines[id] = {id, speed};
    }

    const json& jc = require_array(doc, "comm_speed");
    if (jc.size() != machines.size()) throw ModelError("field comm_speed must have one row per machine");
    std::vector<std::vector<double>> comm(machines.size(), std::vector<double>(machines.size()));
    for (std::size_t r = 0; r < jc.size(); ++r) {
        const std::string row = field("comm_speed", r, "");
        if (!jc[r].is_array() || jc[r].size() != machines.size()) {
            throw ModelError("field " + row + " must have one entry per machine");
        }
        for (std::size_t c = 0; c < jc[r].size(); ++c) {
            const json& v = jc[r][c];
            const std::string where = row + "[" + std::to_string(c) + "]";
            if (v.is_null()) {
                comm[r][c] = kInfiniteSpeed;
            } else if (v.is_number()) {
                comm[r][c] = v.get<double>();
                if (!(comm[r][c] > 0.0)) throw ModelError("field " + where + ": nonpositive communication speed");
            } else {
                throw ModelError("field " + where + " must be a number or null");
            }
        }
    }

    Instance inst{TaskGraph(std::move(tasks), std::move(edges)), Platform(std::move(machines), std::move(comm))};
    ValidationReport report = validate_instance(inst);
    if (!report.ok()) {
        const std::string& first = report.violations.front();
        if (first.find("cycle") != std::string::npos) throw CycleError(first);
        throw ModelError(first);
    }
    return inst;
}

std::string serialize_instance(const Instance& inst, int indent) {
    json doc = json::object();
    json tasks = json::array();
    for (const Task& t : inst.graph.tasks()) tasks.push_back({{"id", t.id}, {"demand", t.demand}, {"weight", t.weight}});
    json edges = json::array();
    for (const Edge& e : inst.graph.edges()) edges.push_back({{"src", e.src}, {"dst", e.dst}, {"data", e.data}});
    json machines = json::array();
    for (const Machine& m : inst.platform.machines()) machines.push_back({{"id", m.id}, {"speed", m.speed}});
    json comm = json::array();
    for (const auto& row : inst.platform.comm_matrix()) {
        json r = json::array();
        for (double v : row) {
            if (std::isinf(v)) {
                r.push_back(nullptr);
            } else {
                r.push_back(v);
            }
        }
        comm.push_back(std::move(r));
    }
    doc["tasks"] = std::move(tasks);
    doc["edges"] = std::move(edges);
    doc["machines"] = std::move(machines);
    doc["comm_speed"] = std::move(comm);
    return doc.dump(indent);
}

ValidationReport validate_instance(const Instance& inst) {
    ValidationReport report;
    const TaskGraph& g = inst.graph;
    const std::size_t n = g.size();
    const std::size_t m = inst.platform.size();

    for (std::size_t k = 0; k < n; ++k) {
        const Task& t = g.tasks()[k];
        if (t.id != k) report.violations.push_back("bad task id " + std::to_string(t.id) + " at position " + std::to_string(k));
        if (!(t.demand > 0.0) || !std::isfinite(t.demand)) {
            report.violations.push_back("nonpositive demand, task " + std::to_string(k));
        }
        if (!(t.weight >= 0.0) || !std::isfinite(t.weight)) {
            report.violations.push_back("negative weight, task " + std::to_string(k));
        }
    }

    if (m == 0) report.violations.push_back("no machines");
    for (std::size_t k = 0; k < m; ++k) {
        const Machine& mc = inst.platform.machines()[k];
        if (mc.id != k) report.violations.push_back("bad machine id " + std::to_string(mc.id) + " at position " + std::to_string(k));
        if (!(mc.speed > 0.0) || !std::isfinite(mc.speed)) {
            report.violations.push_back("nonpositive speed, machine " + std::to_string(k));
        }
    }
    const auto& comm = inst.platform.comm_matrix();
    if (comm.size() != m) {
        report.violations.push_back("comm_speed must be " + std::to_string(m) + "x" + std::to_string(m));
    } else {
        for (std::size_t r = 0; r < m; ++r) {
            if (comm[r].size() != m) {
                report.violations.push_back("comm_speed row " + std::to_string(r) + " has wrong length");
                continue;
            }
            for (std::size_t c = 0; c < m; ++c) {
                if (!(comm[r][c] > 0.0)) {
                    report.violations.push_back("nonpositive communication speed, machines " + std::to_string(r) + "->" +
                                                std::to_string(c));
                }
            }
        }
    }

    std::set<std::pair<TaskId, TaskId>> pairs;
    bool zero_data = false;
    bool edges_ok = true;
    for (std::size_t k = 0; k < g.edges().size(); ++k) {
        const Edge& e = g.edges()[k];
        const std::string tag = "edge " + std::to_string(k) + " (" + std::to_string(e.src) + "->" + std::to_string(e.dst) + ")";
        if (e.src >= n || e.dst >= n) {
            report.violations.push_back("unknown task in " + tag);
            edges_ok = false;
            continue;
        }
        if (e.src == e.dst) report.violations.push_back("self edge " + tag);
        if (!pairs.insert({e.src, e.dst}).second) report.violations.push_back("parallel edge " + tag);
        if (!(e.data >= 0.0) || !std::isfinite(e.data)) report.violations.push_back("negative data on " + tag);
        if (e.data == 0.0) zero_data = true;
    }

    if (edges_ok) {
        try {
            (void)topological_order(g);
        } catch (const CycleError& e) {
            report.violations.emplace_back(e.what());
        }
    }

    if (n > 1 && component_count(g) > 1) report.warnings.emplace_back("disconnected DAG");
    if (zero_data) report.warnings.emplace_back("zero-data edges present");
    return report;
}

std::vector<TaskId> topological_order(const TaskGraph& g) {
    const std::size_t n = g.size();
    std::vector<std::size_t> indeg(n, 0);
    for (TaskId j = 0; j < n; ++j) indeg[j] = g.predecessors(j).size();
    std::priority_queue<TaskId, std::vector<TaskId>, std::greater<>> ready;
    for (TaskId j = 0; j < n; ++j) {
        if (indeg[j] == 0) ready.push(j);
    }
    std::vector<TaskId> order;
    order.reserve(n);
    while (!ready.empty()) {
        const TaskId j = ready.top();
        ready.pop();
        order.push_back(j);
        for (const Arc& a : g.successors(j)) {
            if (--indeg[a.task] == 0) ready.push(a.task);
        }
    }
    if (order.size() != n) {
        for (TaskId j = 0; j < n; ++j) {
            if (indeg[j] > 0) throw CycleError("cycle detected through task " + std::to_string(j));
        }
    }
    return order;
}

std::pair<Instance, double> normalize_demands(const Instance& inst) {
    const double s_max = inst.platform.max_speed();
    double min_ratio = std::numeric_limits<double>::infinity();
    for (const Task& t : inst.graph.tasks()) min_ratio = std::min(min_ratio, t.demand / s_max);
    double scale = 1.0;
    // Ratios within rounding of 1 count as normalized so the operation is idempotent.
    if (std::isfinite(min_ratio) && min_ratio < 1.0 - 1e-12) scale = 1.0 / min_ratio;
    if (scale == 1.0) return {inst, 1.0};

    std::vector<Task> tasks = inst.graph.tasks();
    for (Task& t : tasks) t.demand *= scale;
    return {Instance{TaskGraph(std::move(tasks), inst.graph.edges()), inst.platform}, scale};
}

Instance without_communication(const Instance& inst) {
    const std::size_t m = inst.platform.size();
    std::vector<std::vector<double>> comm(m, std::vector<double>(m, kInfiniteSpeed));
    return Instance{inst.graph, Platform(inst.platform.machines(), std::move(comm))};
}

} // namespace getf
