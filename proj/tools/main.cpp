#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "getf/analysis.hpp"
#include "getf/generator.hpp"
#include "getf/grouping.hpp"
#include "getf/log.hpp"
#include "getf/lp.hpp"
#include "getf/model.hpp"
#include "getf/runner.hpp"
#include "getf/scheduler.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kInvalid = 2, kBoundViolation = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_text(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write " + path);
    out << text;
}

std::string with_newline(std::string s) {
    if (s.empty() || s.back() != '\n') s += '\n';
    return s;
}

void print_report(const getf::BoundReport& r) {
    std::cerr << r.kind << ": " << (r.pass() ? "pass" : "FAIL");
    if (const auto* q = r.tightest()) std::cerr << " (tightest " << q->name << ", slack " << q->slack << ")";
    std::cerr << "\n";
    for (const auto& q : r.checks) {
        if (!q.pass) std::cerr << "  violated " << q.name << ": " << q.lhs << " > " << q.rhs << "\n";
    }
}

int report_feasibility(const getf::FeasibilityReport& f) {
    if (f.feasible()) return kOk;
    for (const auto& v : f.violations) std::cerr << "infeasible: " << v.message << "\n";
    return kInvalid;
}

struct GenerateArgs {
    std::string family = "random_dag";
    std::size_t tasks = 10;
    std::size_t machines = 2;
    double density = 0.3;
    std::string demand = "1:10";
    std::string speed = "1:4";
    std::string comm = "1:4";
    std::string data = "0:5";
    std::string self_comm = "matrix";
    bool zero_comm = false;
    std::string weights = "zero";
    std::uint64_t seed = 0;
    std::string output;
};

int run_generate(const GenerateArgs& a) {
    getf::GeneratorSpec spec;
    try {
        spec.family = getf::parse_family(a.family);
        spec.demand = getf::parse_range(a.demand);
        spec.speed = getf::parse_range(a.speed);
        spec.comm = getf::parse_range(a.comm);
        spec.data = getf::parse_range(a.data);
        spec.self_comm = getf::parse_self_comm(a.self_comm);
        spec.weights = getf::parse_weight_mode(a.weights);
        spec.tasks = a.tasks;
        spec.machines = a.machines;
        spec.density = a.density;
        spec.zero_comm = a.zero_comm;
        spec.seed = a.seed;
        getf::validate_spec(spec);
    } catch (const getf::ModelError& e) {
        throw UsageError(e.what());
    }
    write_text(a.output, with_newline(getf::serialize_instance(getf::generate_instance(spec))));
    return kOk;
}

struct SolveArgs {
    std::string instance;
    std::string algo = "getf-makespan";
    std::string tie = "by-index";
    std::optional<double> theta;
    std::optional<double> gamma;
    std::string output;
    std::string report;
    std::string dump_lp;
};

int run_solve(const SolveArgs& a) {
    getf::SolveOptions opts;
    try {
        opts.algorithm = getf::parse_algorithm(a.algo);
        opts.tie = getf::TieBreakRule::parse(a.tie);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    if (a.theta) {
        if (!(*a.theta > 0.0 && *a.theta < 1.0)) throw UsageError("--theta must lie in (0, 1)");
        opts.grouping.theta = *a.theta;
    }
    if (a.gamma) {
        if (!(*a.gamma > 1.0)) throw UsageError("--gamma must exceed 1");
        opts.grouping.gamma = a.gamma;
    }
    const getf::Instance inst = getf::parse_instance(read_text(a.instance));
    for (const auto& w : getf::validate_instance(inst).warnings) getf::log_info("instance: " + w);

    if (!a.dump_lp.empty()) {
        const getf::MachineGroups groups = getf::partition_machines(inst.platform, opts.grouping.gamma);
        std::ofstream out(a.dump_lp);
        if (!out) throw UsageError("cannot write " + a.dump_lp);
        if (opts.algorithm == getf::Algorithm::GetfWeighted) {
            getf::write_lp_format(getf::build_weighted_lp(getf::normalize_demands(inst).first, groups).lp, out);
        } else {
            getf::write_lp_format(getf::build_makespan_lp(inst, groups).lp, out);
        }
    }

    const getf::SolveResult r = getf::solve(inst, opts);
    getf::log_info(std::string(getf::to_string(opts.algorithm)) + ": makespan " +
                   getf::format_number(r.schedule.makespan()) + ", weighted completion " +
                   getf::format_number(r.schedule.weighted_completion(inst.graph)));
    if (const int code = report_feasibility(r.feasibility); code != kOk) return code;

    print_report(r.separation);
    if (r.theorem) print_report(*r.theorem);
    if (!a.report.empty()) {
        nlohmann::json doc = nlohmann::json::array();
        doc.push_back(nlohmann::json::parse(getf::serialize_report(r.separation)));
        if (r.theorem) doc.push_back(nlohmann::json::parse(getf::serialize_report(*r.theorem)));
        write_text(a.report, with_newline(doc.dump(2)));
    }
    if (!r.ok()) {
        std::cerr << "bound report violated; schedule not written\n";
        return kBoundViolation;
    }
    write_text(a.output, with_newline(getf::serialize_schedule(r.schedule, inst, r.meta)));
    return kOk;
}

int run_verify(const std::string& instance_path, const std::string& schedule_path, const std::string& report) {
    const getf::Instance inst = getf::parse_instance(read_text(instance_path));
    const getf::ParsedSchedule parsed = getf::parse_schedule(read_text(schedule_path), inst);
    const getf::GroupAssignment f = parsed.meta.assignment.value_or(getf::trivial_assignment(inst));
    const getf::FeasibilityReport feas = getf::verify_schedule(inst, parsed.schedule, &f);
    if (const int code = report_feasibility(feas); code != kOk) return code;
    std::cerr << "feasible: makespan " << parsed.schedule.makespan() << "\n";

    const getf::BoundReport sep = getf::separation_report(parsed.schedule, inst, f);
    print_report(sep);
    if (!report.empty()) write_text(report, with_newline(getf::serialize_report(sep)));
    bool greedy = true;
    try {
        greedy = getf::is_greedy(getf::parse_algorithm(parsed.meta.algorithm));
    } catch (const std::invalid_argument&) {
    }
    return greedy && !sep.pass() ? kBoundViolation : kOk;
}

struct CompareArgs {
    std::string dir;
    std::vector<std::string> algos{"getf-makespan", "etf", "sls"};
    std::vector<std::string> ties{"by-index"};
    std::vector<std::uint64_t> seeds;
    bool timing = false;
    std::string output;
};

int run_compare(const CompareArgs& a) {
    getf::CompareOptions opts;
    opts.timing = a.timing;
    opts.ties.clear();
    try {
        for (const auto& s : a.algos) opts.algorithms.push_back(getf::parse_algorithm(s));
        for (const auto& t : a.ties) opts.ties.push_back(getf::TieBreakRule::parse(t));
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    for (std::uint64_t s : a.seeds) opts.ties.push_back(getf::TieBreakRule::random(s));
    if (opts.ties.empty()) opts.ties.push_back({});
    if (!std::filesystem::is_directory(a.dir)) throw UsageError(a.dir + " is not a directory");
    write_text(a.output, getf::compare_batch(a.dir, opts));
    return kOk;
}

int run_gantt(const std::string& schedule_path, const std::string& output) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_text(schedule_path));
    } catch (const nlohmann::json::exception& e) {
        throw getf::ModelError(std::string("malformed schedule JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("assignments") || !doc["assignments"].is_array()) {
        throw getf::ModelError("schedule document lacks an assignments array");
    }
    std::ostringstream csv;
    csv << "task,machine,start,end\n";
    try {
        for (const auto& row : doc["assignments"]) {
            csv << row.at("task").get<std::size_t>() << "," << row.at("machine").get<std::size_t>() << ","
                << getf::format_number(row.at("start").get<double>()) << ","
                << getf::format_number(row.at("end").get<double>()) << "\n";
        }
    } catch (const nlohmann::json::exception& e) {
        throw getf::ModelError(std::string("schedule schema violation: ") + e.what());
    }
    write_text(output, csv.str());
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"GETF scheduler for DAGs on related machines with communication delays"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Write a random instance");
    generate->add_option("--family", gen.family, "layered | fork_join | random_dag")->capture_default_str();
    generate->add_option("-n,--tasks", gen.tasks, "Number of tasks")->capture_default_str();
    generate->add_option("-m,--machines", gen.machines, "Number of machines")->capture_default_str();
    generate->add_option("--density", gen.density, "Edge probability")->capture_default_str();
    generate->add_option("--demand", gen.demand, "Demand range lo:hi")->capture_default_str();
    generate->add_option("--speed", gen.speed, "Speed range lo:hi")->capture_default_str();
    generate->add_option("--comm", gen.comm, "Communication speed range lo:hi")->capture_default_str();
    generate->add_option("--data", gen.data, "Edge data range lo:hi")->capture_default_str();
    generate->add_option("--self-comm", gen.self_comm, "matrix | infinite")->capture_default_str();
    generate->add_flag("--zero-comm", gen.zero_comm, "All communication speeds infinite");
    generate->add_option("--weights", gen.weights, "zero | uniform | sink_only")->capture_default_str();
    generate->add_option("--seed", gen.seed, "RNG seed")->capture_default_str();
    generate->add_option("-o,--output", gen.output, "Output file (default stdout)");

    SolveArgs sol;
    auto* solve = app.add_subcommand("solve", "Schedule an instance");
    solve->add_option("instance", sol.instance, "Instance JSON (- for stdin)")->required();
    solve->add_option("--algo", sol.algo, "getf-makespan | getf-weighted | etf | sls")->capture_default_str();
    solve->add_option("--tie", sol.tie, "by-index | random:<seed> | largest-demand | most-succ")->capture_default_str();
    solve->add_option("--theta", sol.theta, "Tail-mass threshold in (0, 1)");
    solve->add_option("--gamma", sol.gamma, "Speed band ratio (> 1)");
    solve->add_option("-o,--output", sol.output, "Schedule JSON output (default stdout)");
    solve->add_option("--report", sol.report, "Write bound reports as JSON");
    solve->add_option("--dump-lp", sol.dump_lp, "Write the relaxation in LP format");

    std::string v_instance, v_schedule, v_report;
    auto* verify = app.add_subcommand("verify", "Check a schedule and its bound report");
    verify->add_option("instance", v_instance, "Instance JSON")->required();
    verify->add_option("schedule", v_schedule, "Schedule JSON")->required();
    verify->add_option("--report", v_report, "Write the bound report as JSON");

    CompareArgs cmp;
    auto* compare = app.add_subcommand("compare", "Run algorithms over a directory of instances");
    compare->add_option("dir", cmp.dir, "Directory of instance JSON files")->required();
    compare->add_option("--algos", cmp.algos, "Algorithms")->delimiter(',')->capture_default_str();
    compare->add_option("--ties", cmp.ties, "Tie-break rules")->delimiter(',')->capture_default_str();
    compare->add_option("--seeds", cmp.seeds, "Random tie-break seeds")->delimiter(',');
    compare->add_flag("--timing", cmp.timing, "Fill the runtime_ms column");
    compare->add_option("-o,--output", cmp.output, "CSV output (default stdout)");

    std::string g_schedule, g_output;
    auto* gantt = app.add_subcommand("gantt", "Export a schedule as task,machine,start,end CSV");
    gantt->add_option("schedule", g_schedule, "Schedule JSON")->required();
    gantt->add_option("-o,--output", g_output, "CSV output (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        if (*generate) return run_generate(gen);
        if (*solve) return run_solve(sol);
        if (*verify) return run_verify(v_instance, v_schedule, v_report);
        if (*compare) return run_compare(cmp);
        if (*gantt) return run_gantt(g_schedule, g_output);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    }
    return kUsage;
}
