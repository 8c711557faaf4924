#include "getf/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "getf/log.hpp"

namespace getf {

using nlohmann::json;

MachineGroups::MachineGroups(double gamma, std::size_t k, double normalization, std::vector<std::size_t> group_of,
                             std::vector<double> rescaled_speed, bool single)
    : gamma_(gamma), k_(k), normalization_(normalization), single_(single), group_of_(std::move(group_of)),
      rescaled_(std::move(rescaled_speed)), members_(k), group_speed_(k, 0.0) {
    for (MachineId i = 0; i < group_of_.size(); ++i) {
        const std::size_t g = group_of_[i];
        if (g == 0) continue;
        if (g > k_) throw GroupingError("machine " + std::to_string(i) + " has group index beyond K");
        members_[g - 1].push_back(i);
        group_speed_[g - 1] += rescaled_[i];
    }
}

std::vector<MachineId> MachineGroups::retained_machines() const {
    std::vector<MachineId> out;
    for (MachineId i = 0; i < group_of_.size(); ++i) {
        if (group_of_[i] != 0) out.push_back(i);
    }
    return out;
}

double default_gamma(std::size_t m) {
    if (m <= 2) return 2.0;
    const double l = std::log2(static_cast<double>(m));
    const double ll = std::log2(l);
    if (!(ll > 0.0)) return 2.0;
    return std::max(2.0, l / ll);
}

MachineGroups partition_machines(const Platform& p, std::optional<double> gamma_override) {
    const std::size_t m = p.size();
    if (m == 0) throw GroupingError("platform has no machines");
    const double gamma = gamma_override.value_or(default_gamma(m));
    if (!(gamma > 1.0) || !std::isfinite(gamma)) throw GroupingError("gamma must be a finite value above 1");

    const double s_max = p.max_speed();
    const double cutoff = s_max / static_cast<double>(m);
    const double norm = static_cast<double>(m) / s_max;
    const auto k = static_cast<std::size_t>(
        std::max(1.0, std::ceil(std::log(static_cast<double>(m)) / std::log(gamma) - 1e-9)));

    std::vector<std::size_t> group_of(m, 0);
    std::vector<double> rescaled(m);
    for (MachineId i = 0; i < m; ++i) {
        rescaled[i] = p.speed(i) * norm;
        if (p.speed(i) < cutoff * (1.0 - 1e-12)) continue;
        std::size_t band = 1;
        while (band < k && rescaled[i] >= std::pow(gamma, static_cast<double>(band)) * (1.0 - 1e-12)) ++band;
        group_of[i] = band;
    }
    return MachineGroups(gamma, k, norm, std::move(group_of), std::move(rescaled));
}

MachineGroups single_group(const Platform& p) {
    const std::size_t m = p.size();
    if (m == 0) throw GroupingError("platform has no machines");
    const double norm = static_cast<double>(m) / p.max_speed();
    std::vector<double> rescaled(m);
    for (MachineId i = 0; i < m; ++i) rescaled[i] = p.speed(i) * norm;
    return MachineGroups(default_gamma(m), 1, norm, std::vector<std::size_t>(m, 1), std::move(rescaled), true);
}

GroupAssignment trivial_assignment(const Instance& inst) {
    GroupAssignment a;
    a.groups = single_group(inst.platform);
    a.task_group.assign(inst.num_tasks(), 1);
    return a;
}

// ---- makespan relaxation -------------------------------------------------

MakespanModel build_makespan_lp(const Instance& inst, const MachineGroups& groups) {
    MakespanModel model;
    model.machines = groups.retained_machines();
    model.num_tasks = inst.num_tasks();
    const std::size_t n = model.num_tasks;
    const std::size_t r_count = model.machines.size();
    LinearProgram lp(n * r_count + n + 1);
    lp.names.resize(lp.num_vars());
    for (TaskId j = 0; j < n; ++j) {
        for (std::size_t r = 0; r < r_count; ++r) {
            lp.names[model.x(r, j)] = "x_" + std::to_string(model.machines[r]) + "_" + std::to_string(j);
        }
        lp.names[model.completion(j)] = "C_" + std::to_string(j);
    }
    lp.names[model.horizon()] = "T";
    lp.objective[model.horizon()] = 1.0;

    auto proc_terms = [&](TaskId j) {
        std::vector<std::pair<std::size_t, double>> t;
        for (std::size_t r = 0; r < r_count; ++r) t.emplace_back(model.x(r, j), inst.graph.demand(j) / inst.platform.speed(model.machines[r]));
        return t;
    };

    for (TaskId j = 0; j < n; ++j) {
        std::vector<std::pair<std::size_t, double>> t;
        for (std::size_t r = 0; r < r_count; ++r) t.emplace_back(model.x(r, j), 1.0);
        lp.add(t, Relation::Equal, 1.0, "assign_" + std::to_string(j));
    }
    for (TaskId j = 0; j < n; ++j) {
        auto t = proc_terms(j);
        t.emplace_back(model.completion(j), -1.0);
        lp.add(t, Relation::LessEqual, 0.0, "proc_" + std::to_string(j));
    }
    for (const Edge& e : inst.graph.edges()) {
        auto t = proc_terms(e.dst);
        t.emplace_back(model.completion(e.src), 1.0);
        t.emplace_back(model.completion(e.dst), -1.0);
        lp.add(t, Relation::LessEqual, 0.0, "prec_" + std::to_string(e.src) + "_" + std::to_string(e.dst));
    }
    for (std::size_t r = 0; r < r_count; ++r) {
        std::vector<std::pair<std::size_t, double>> t;
        for (TaskId j = 0; j < n; ++j) t.emplace_back(model.x(r, j), inst.graph.demand(j) / inst.platform.speed(model.machines[r]));
        t.emplace_back(model.horizon(), -1.0);
        lp.add(t, Relation::LessEqual, 0.0, "load_" + std::to_string(model.machines[r]));
    }
    for (TaskId j = 0; j < n; ++j) {
        lp.add({{model.completion(j), 1.0}, {model.horizon(), -1.0}}, Relation::LessEqual, 0.0, "horizon_" + std::to_string(j));
    }
    model.lp = std::move(lp);
    return model;
}

MakespanFractional extract_makespan(const MakespanModel& model, const LpSolution& sol) {
    if (sol.status != LpStatus::Optimal) {
        throw GroupingError(std::string("makespan relaxation is ") + to_string(sol.status));
    }
    const std::size_t m = model.machines.empty() ? 0 : *std::max_element(model.machines.begin(), model.machines.end()) + 1;
    MakespanFractional f;
    f.x.assign(model.num_tasks, std::vector<double>(m, 0.0));
    f.completion.assign(model.num_tasks, 0.0);
    for (TaskId j = 0; j < model.num_tasks; ++j) {
        for (std::size_t r = 0; r < model.machines.size(); ++r) f.x[j][model.machines[r]] = sol.x[model.x(r, j)];
        f.completion[j] = sol.x[model.completion(j)];
    }
    f.horizon = sol.x[model.horizon()];
    return f;
}

namespace {

GroupAssignment assign_by_tail(const std::vector<std::vector<double>>& x, const MachineGroups& groups, double theta,
                               const char* what) {
    if (!(theta > 0.0 && theta < 1.0)) throw GroupingError("theta must lie in (0, 1)");
    const std::size_t k_count = groups.K();
    GroupAssignment a;
    a.groups = groups;
    a.task_group.resize(x.size());
    a.threshold_index.resize(x.size());
    for (TaskId j = 0; j < x.size(); ++j) {
        std::vector<double> mass(k_count + 1, 0.0);
        for (MachineId i = 0; i < x[j].size() && i < groups.num_machines(); ++i) {
            if (groups.retained(i)) mass[groups.group_of(i)] += x[j][i];
        }
        std::size_t ell = 0;
        double tail = 0.0;
        for (std::size_t k = k_count; k >= 1; --k) {
            tail += mass[k];
            if (tail >= theta - kEps) {
                ell = k;
                break;
            }
        }
        if (ell == 0) {
            std::ostringstream os;
            os << "no group index meets the tail threshold for task " << j << " (" << what << ", mass " << tail << ")";
            throw GroupingError(os.str());
        }
        std::size_t best = ell;
        for (std::size_t k = ell + 1; k <= k_count; ++k) {
            if (groups.group_speed(k) >= groups.group_speed(best)) best = k;
        }
        a.threshold_index[j] = ell;
        a.task_group[j] = best;
    }
    return a;
}

} // namespace

GroupAssignment assign_groups_makespan(const MakespanFractional& sol, const MachineGroups& groups, double theta) {
    return assign_by_tail(sol.x, groups, theta, "x*");
}

// ---- weighted completion relaxation --------------------------------------

double WeightedFractional::interval_mass(TaskId j, std::size_t q) const {
    double s = 0.0;
    for (const auto& per_machine : x[j]) s += per_machine[q - 1];
    return s;
}

std::size_t weighted_interval_count(const Instance& inst, const MachineGroups& groups) {
    double total = 0.0;
    for (const Task& t : inst.graph.tasks()) total += t.demand;
    double s_min = std::numeric_limits<double>::infinity();
    for (MachineId i : groups.retained_machines()) s_min = std::min(s_min, inst.platform.speed(i));
    if (!(total > 0.0) || !std::isfinite(s_min)) return 1;
    const double q = std::ceil(std::log2(total / s_min) - 1e-9);
    return static_cast<std::size_t>(std::max(1.0, q));
}

WeightedModel build_weighted_lp(const Instance& inst, const MachineGroups& groups) {
    WeightedModel model;
    model.machines = groups.retained_machines();
    model.num_tasks = inst.num_tasks();
    model.intervals = weighted_interval_count(inst, groups);
    const std::size_t n = model.num_tasks;
    const std::size_t r_count = model.machines.size();
    const std::size_t qn = model.intervals;
    auto tau = [](std::size_t q) { return std::ldexp(1.0, static_cast<int>(q)); };

    LinearProgram lp(n * r_count * qn + n);
    lp.names.resize(lp.num_vars());
    for (TaskId j = 0; j < n; ++j) {
        for (std::size_t r = 0; r < r_count; ++r) {
            for (std::size_t q = 1; q <= qn; ++q) {
                lp.names[model.x(r, j, q)] =
                    "x_" + std::to_string(model.machines[r]) + "_" + std::to_string(j) + "_" + std::to_string(q);
            }
        }
        lp.names[model.completion(j)] = "C_" + std::to_string(j);
        lp.objective[model.completion(j)] = inst.graph.weight(j);
    }

    auto ptime = [&](TaskId j, std::size_t r) { return inst.graph.demand(j) / inst.platform.speed(model.machines[r]); };
    auto proc_terms = [&](TaskId j) {
        std::vector<std::pair<std::size_t, double>> t;
        for (std::size_t r = 0; r < r_count; ++r) {
            for (std::size_t q = 1; q <= qn; ++q) t.emplace_back(model.x(r, j, q), ptime(j, r));
        }
        return t;
    };
    // sum_{t <= q} sum_i x_{i,j,t} with the given sign
    auto cumulative = [&](TaskId j, std::size_t q, double sign, std::vector<std::pair<std::size_t, double>>& t) {
        for (std::size_t r = 0; r < r_count; ++r) {
            for (std::size_t s = 1; s <= q; ++s) t.emplace_back(model.x(r, j, s), sign);
        }
    };

    for (TaskId j = 0; j < n; ++j) {
        std::vector<std::pair<std::size_t, double>> t;
        cumulative(j, qn, 1.0, t);
        lp.add(t, Relation::Equal, 1.0, "assign_" + std::to_string(j));
    }
    for (TaskId j = 0; j < n; ++j) {
        auto t = proc_terms(j);
        t.emplace_back(model.completion(j), -1.0);
        lp.add(t, Relation::LessEqual, 0.0, "proc_" + std::to_string(j));
    }
    for (const Edge& e : inst.graph.edges()) {
        auto t = proc_terms(e.dst);
        t.emplace_back(model.completion(e.src), 1.0);
        t.emplace_back(model.completion(e.dst), -1.0);
        lp.add(t, Relation::LessEqual, 0.0, "prec_" + std::to_string(e.src) + "_" + std::to_string(e.dst));
    }
    for (const Edge& e : inst.graph.edges()) {
        for (std::size_t q = 1; q <= qn; ++q) {
            std::vector<std::pair<std::size_t, double>> t;
            cumulative(e.dst, q, 1.0, t);
            cumulative(e.src, q, -1.0, t);
            lp.add(t, Relation::LessEqual, 0.0,
                   "order_" + std::to_string(e.src) + "_" + std::to_string(e.dst) + "_" + std::to_string(q));
        }
    }
    // Strict "<" in the integer model is relaxed to "<=".
    for (TaskId j = 0; j < n; ++j) {
        std::vector<std::pair<std::size_t, double>> t;
        for (std::size_t r = 0; r < r_count; ++r) {
            for (std::size_t q = 1; q <= qn; ++q) t.emplace_back(model.x(r, j, q), tau(q - 1));
        }
        t.emplace_back(model.completion(j), -1.0);
        lp.add(t, Relation::LessEqual, 0.0, "left_" + std::to_string(j));
    }
    for (std::size_t r = 0; r < r_count; ++r) {
        for (std::size_t q = 1; q <= qn; ++q) {
            std::vector<std::pair<std::size_t, double>> t;
            for (TaskId j = 0; j < n; ++j) {
                for (std::size_t s = 1; s <= q; ++s) t.emplace_back(model.x(r, j, s), ptime(j, r));
            }
            lp.add(t, Relation::LessEqual, tau(q),
                   "load_" + std::to_string(model.machines[r]) + "_" + std::to_string(q));
        }
    }
    model.lp = std::move(lp);
    return model;
}

WeightedFractional extract_weighted(const WeightedModel& model, const LpSolution& sol) {
    if (sol.status != LpStatus::Optimal) {
        throw GroupingError(std::string("weighted relaxation is ") + to_string(sol.status));
    }
    const std::size_t m = model.machines.empty() ? 0 : *std::max_element(model.machines.begin(), model.machines.end()) + 1;
    WeightedFractional f;
    f.intervals = model.intervals;
    for (std::size_t q = 0; q <= model.intervals; ++q) f.tau.push_back(std::ldexp(1.0, static_cast<int>(q)));
    f.x.assign(model.num_tasks, std::vector<std::vector<double>>(m, std::vector<double>(model.intervals, 0.0)));
    f.completion.assign(model.num_tasks, 0.0);
    for (TaskId j = 0; j < model.num_tasks; ++j) {
        for (std::size_t r = 0; r < model.machines.size(); ++r) {
            for (std::size_t q = 1; q <= model.intervals; ++q) f.x[j][model.machines[r]][q - 1] = sol.x[model.x(r, j, q)];
        }
        f.completion[j] = sol.x[model.completion(j)];
    }
    return f;
}

WeightedFractional collapse_time_indexed(WeightedFractional sol) {
    const std::size_t n = sol.x.size();
    const std::size_t qn = sol.intervals;
    if (sol.tau.size() != qn + 1) {
        sol.tau.clear();
        for (std::size_t q = 0; q <= qn; ++q) sol.tau.push_back(std::ldexp(1.0, static_cast<int>(q)));
    }
    sol.interval_of.assign(n, qn);
    sol.alpha.assign(n, 0.0);
    sol.x_tilde.assign(n, {});
    for (TaskId j = 0; j < n; ++j) {
        double cum = 0.0;
        bool found = false;
        for (std::size_t q = 1; q <= qn; ++q) {
            cum += sol.interval_mass(j, q);
            if (cum >= 0.5 - kEps && sol.completion[j] <= sol.tau[q] * (1.0 + kEps)) {
                sol.interval_of[j] = q;
                found = true;
                break;
            }
        }
        if (!found) {
            std::ostringstream os;
            os << "q(" << j << ") clamped to Q=" << qn << " (C*=" << sol.completion[j] << ")";
            sol.warnings.push_back(os.str());
            log_info(os.str());
        }
        const std::size_t qj = sol.interval_of[j];
        double alpha = 0.0;
        for (std::size_t q = 1; q <= qj; ++q) alpha += sol.interval_mass(j, q);
        if (alpha < 1e-9) throw GroupingError("captured mass of task " + std::to_string(j) + " is zero");
        sol.alpha[j] = alpha;
        sol.x_tilde[j].assign(sol.x[j].size(), 0.0);
        for (MachineId i = 0; i < sol.x[j].size(); ++i) {
            double s = 0.0;
            for (std::size_t q = 1; q <= qj; ++q) s += sol.x[j][i][q - 1];
            sol.x_tilde[j][i] = s / alpha;
        }
    }
    return sol;
}

GroupAssignment assign_groups_weighted(const WeightedFractional& sol, const MachineGroups& groups, double theta) {
    if (sol.x_tilde.size() != sol.x.size()) throw GroupingError("collapsed assignment x~ is not filled");
    return assign_by_tail(sol.x_tilde, groups, theta, "x~");
}

std::vector<SliceFeasibility> check_slice_feasibility(const Instance& inst, const MachineGroups& groups,
                                                      const WeightedFractional& sol, double tol) {
    std::vector<SliceFeasibility> out;
    const std::size_t n = inst.num_tasks();
    for (std::size_t q = 1; q <= sol.intervals; ++q) {
        SliceFeasibility slice;
        slice.interval = q;
        std::vector<std::size_t> local(n, n);
        for (TaskId j = 0; j < n; ++j) {
            if (sol.interval_of[j] == q) {
                local[j] = slice.tasks.size();
                slice.tasks.push_back(j);
            }
        }
        if (slice.tasks.empty()) continue;

        std::vector<Task> tasks;
        for (TaskId j : slice.tasks) tasks.push_back({local[j], inst.graph.demand(j), inst.graph.weight(j)});
        std::vector<Edge> edges;
        for (const Edge& e : inst.graph.edges()) {
            if (local[e.src] < n && local[e.dst] < n) edges.push_back({local[e.src], local[e.dst], e.data});
        }
        const Instance sub{TaskGraph(std::move(tasks), std::move(edges)), inst.platform};
        const MakespanModel model = build_makespan_lp(sub, groups);

        std::vector<double> point(model.lp.num_vars(), 0.0);
        for (std::size_t lj = 0; lj < slice.tasks.size(); ++lj) {
            const TaskId j = slice.tasks[lj];
            for (std::size_t r = 0; r < model.machines.size(); ++r) point[model.x(r, lj)] = sol.x_tilde[j][model.machines[r]];
            point[model.completion(lj)] = 2.0 * sol.completion[j];
        }
        point[model.horizon()] = std::ldexp(1.0, static_cast<int>(q + 1));
        slice.max_violation = max_violation(model.lp, point);
        slice.feasible = slice.max_violation <= tol * std::max(1.0, point[model.horizon()]);
        out.push_back(std::move(slice));
    }
    return out;
}

// ---- pipelines -----------------------------------------------------------

MakespanPipeline run_makespan_pipeline(const Instance& inst, const GroupingOptions& opts) {
    MakespanPipeline p;
    p.groups = partition_machines(inst.platform, opts.gamma);
    const MakespanModel model = build_makespan_lp(inst, p.groups);
    const LpSolution sol = solve_lp(model.lp);
    log_debug("makespan relaxation solved in " + std::to_string(sol.pivots) + " pivots");
    p.fractional = extract_makespan(model, sol);
    p.assignment = assign_groups_makespan(p.fractional, p.groups, opts.theta);
    return p;
}

WeightedPipeline run_weighted_pipeline(const Instance& inst, const GroupingOptions& opts) {
    WeightedPipeline p;
    auto [normalized, scale] = normalize_demands(inst);
    p.instance = std::move(normalized);
    p.demand_scale = scale;
    p.groups = partition_machines(p.instance.platform, opts.gamma);
    const WeightedModel model = build_weighted_lp(p.instance, p.groups);
    const LpSolution sol = solve_lp(model.lp);
    log_debug("weighted relaxation solved in " + std::to_string(sol.pivots) + " pivots");
    p.fractional = collapse_time_indexed(extract_weighted(model, sol));
    p.assignment = assign_groups_weighted(p.fractional, p.groups, opts.theta);
    return p;
}

// ---- serialization -------------------------------------------------------

std::string serialize_assignment(const GroupAssignment& a, int indent) {
    json doc;
    doc["partition"] = a.groups.single() ? "single" : "bands";
    doc["gamma"] = a.groups.gamma();
    doc["K"] = a.groups.K();
    json groups = json::object();
    for (MachineId i = 0; i < a.groups.num_machines(); ++i) {
        if (a.groups.retained(i)) groups[std::to_string(i)] = a.groups.group_of(i);
    }
    json tasks = json::object();
    for (TaskId j = 0; j < a.task_group.size(); ++j) tasks[std::to_string(j)] = a.task_group[j];
    doc["groups"] = std::move(groups);
    doc["tasks"] = std::move(tasks);
    return doc.dump(indent);
}

GroupAssignment parse_assignment(const std::string& text, const Instance& inst) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw GroupingError(std::string("malformed group assignment JSON: ") + e.what());
    }
    GroupAssignment a;
    const bool single = doc.value("partition", std::string("bands")) == "single";
    if (single) {
        a.groups = single_group(inst.platform);
    } else {
        if (!doc.contains("gamma") || !doc["gamma"].is_number()) throw GroupingError("group assignment lacks gamma");
        a.groups = partition_machines(inst.platform, doc["gamma"].get<double>());
    }
    if (doc.contains("K") && doc["K"].get<std::size_t>() != a.groups.K()) {
        throw GroupingError("group assignment K does not match the platform partition");
    }
    if (doc.contains("groups")) {
        for (const auto& [key, value] : doc["groups"].items()) {
            const MachineId i = std::stoul(key);
            if (i >= a.groups.num_machines() || a.groups.group_of(i) != value.get<std::size_t>()) {
                throw GroupingError("machine " + key + " group does not match the platform partition");
            }
        }
    }
    a.task_group.assign(inst.num_tasks(), 0);
    if (!doc.contains("tasks") || !doc["tasks"].is_object()) throw GroupingError("group assignment lacks tasks");
    for (const auto& [key, value] : doc["tasks"].items()) {
        const TaskId j = std::stoul(key);
        const std::size_t k = value.get<std::size_t>();
        if (j >= inst.num_tasks()) throw GroupingError("task " + key + " out of range");
        if (k < 1 || k > a.groups.K()) throw GroupingError("task " + key + " mapped outside 1..K");
        a.task_group[j] = k;
    }
    for (TaskId j = 0; j < inst.num_tasks(); ++j) {
        if (a.task_group[j] == 0) throw GroupingError("task " + std::to_string(j) + " has no group");
    }
    return a;
}

} // namespace getf
