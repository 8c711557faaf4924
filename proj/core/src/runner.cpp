#include "getf/runner.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <map>
#include <sstream>

#include "getf/log.hpp"

namespace getf {

Algorithm parse_algorithm(const std::string& text) {
    if (text == "getf-makespan") return Algorithm::GetfMakespan;
    if (text == "getf-weighted") return Algorithm::GetfWeighted;
    if (text == "etf") return Algorithm::Etf;
    if (text == "sls") return Algorithm::Sls;
    throw std::invalid_argument("unknown algorithm '" + text + "'");
}

const char* to_string(Algorithm a) {
    switch (a) {
    case Algorithm::GetfMakespan: return "getf-makespan";
    case Algorithm::GetfWeighted: return "getf-weighted";
    case Algorithm::Etf: return "etf";
    case Algorithm::Sls: return "sls";
    }
    return "?";
}

bool is_greedy(Algorithm a) { return a != Algorithm::Sls; }

bool SolveResult::ok() const {
    if (!feasibility.feasible()) return false;
    if (!is_greedy(parse_algorithm(meta.algorithm))) return true;
    return separation.pass() && (!theorem || theorem->pass());
}

SolveResult solve(const Instance& inst, const SolveOptions& opts) {
    SolveResult r;
    r.meta.algorithm = to_string(opts.algorithm);
    r.meta.tie = opts.algorithm == Algorithm::Sls ? "-" : opts.tie.to_string();
    switch (opts.algorithm) {
    case Algorithm::GetfMakespan: {
        MakespanPipeline p = run_makespan_pipeline(inst, opts.grouping);
        r.assignment = p.assignment;
        r.schedule = getf_schedule(inst, r.assignment, opts.tie);
        r.theorem = makespan_theorem_report(r.schedule, inst, r.assignment, p.fractional.horizon);
        break;
    }
    case Algorithm::GetfWeighted: {
        WeightedPipeline p = run_weighted_pipeline(inst, opts.grouping);
        r.assignment = p.assignment;
        r.warnings = p.fractional.warnings;
        r.schedule = getf_schedule(inst, r.assignment, opts.tie);
        const Schedule normalized = getf_schedule(p.instance, r.assignment, opts.tie);
        r.theorem = weighted_theorem_report(normalized, p.instance, r.assignment, p.fractional);
        if (p.demand_scale != 1.0) {
            r.warnings.push_back("demands scaled by " + format_number(p.demand_scale) +
                                 " for the relaxation; weighted bounds refer to the scaled instance");
        }
        break;
    }
    case Algorithm::Etf:
        r.assignment = trivial_assignment(inst);
        r.schedule = etf_schedule(inst, opts.tie);
        break;
    case Algorithm::Sls: {
        MakespanPipeline p = run_makespan_pipeline(inst, opts.grouping);
        r.assignment = p.assignment;
        const std::vector<TaskId> priority = topological_order(inst.graph);
        r.schedule = sls_schedule(inst, r.assignment, priority);
        break;
    }
    }
    r.meta.assignment = r.assignment;
    r.feasibility = verify_schedule(inst, r.schedule, &r.assignment);
    r.separation = separation_report(r.schedule, inst, r.assignment);
    for (const std::string& w : r.warnings) log_info(w);
    return r;
}

std::string format_number(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Totals {
    std::size_t ok = 0;
    std::size_t failed = 0;
    double makespan = 0.0;
    double weighted = 0.0;
    double min_slack = std::numeric_limits<double>::infinity();
    double runtime = 0.0;
};

} // namespace

std::string compare_batch(const std::filesystem::path& dir, const CompareOptions& opts) {
    if (!std::filesystem::is_directory(dir)) throw std::invalid_argument(dir.string() + " is not a directory");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    std::ostringstream out;
    out << kCompareHeader << "\n";
    std::map<Algorithm, Totals> totals;
    for (Algorithm a : opts.algorithms) totals[a];

    for (const auto& file : files) {
        const std::string name = file.filename().string();
        std::optional<Instance> inst;
        std::string load_error;
        try {
            inst = parse_instance(read_file(file));
        } catch (const std::exception& e) {
            load_error = e.what();
        }
        for (Algorithm algo : opts.algorithms) {
            std::vector<TieBreakRule> ties = opts.ties;
            if (algo == Algorithm::Sls) ties.resize(1);
            for (const TieBreakRule& tie : ties) {
                const std::string tie_name = algo == Algorithm::Sls ? "-" : tie.to_string();
                Totals& t = totals[algo];
                auto error_row = [&](const std::string& msg) {
                    ++t.failed;
                    out << csv_field(name) << "," << to_string(algo) << "," << tie_name
                        << ",-,-,-,-,-,-,-," << csv_field("error: " + msg) << "\n";
                };
                if (!inst) {
                    error_row(load_error);
                    continue;
                }
                try {
                    const auto t0 = std::chrono::steady_clock::now();
                    const SolveResult r = solve(*inst, {algo, tie, {}});
                    const double ms =
                        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
                    const double slack = r.separation.tightest() ? r.separation.tightest()->slack : 0.0;
                    const double makespan = r.schedule.makespan();
                    const double weighted = r.schedule.weighted_completion(inst->graph);
                    ++t.ok;
                    t.makespan += makespan;
                    t.weighted += weighted;
                    t.min_slack = std::min(t.min_slack, slack);
                    t.runtime += ms;
                    std::string status = "ok";
                    if (!r.feasibility.feasible()) {
                        status = "infeasible";
                    } else if (!r.ok()) {
                        status = "bound-violation";
                    }
                    out << csv_field(name) << "," << to_string(algo) << "," << tie_name << ","
                        << format_number(makespan) << "," << format_number(weighted) << ","
                        << format_number(r.separation.chain_processing) << ","
                        << format_number(r.separation.total_group_load()) << ","
                        << format_number(r.separation.chain_comm) << "," << format_number(slack) << ","
                        << (opts.timing ? format_number(ms) : "-") << "," << status << "\n";
                } catch (const std::exception& e) {
                    error_row(e.what());
                }
            }
        }
    }

    if (!files.empty()) {
        for (Algorithm algo : opts.algorithms) {
            const Totals& t = totals[algo];
            const auto mean = [&](double v) { return t.ok ? format_number(v / static_cast<double>(t.ok)) : "-"; };
            out << "SUMMARY," << to_string(algo) << ",-," << mean(t.makespan) << "," << mean(t.weighted)
                << ",-,-,-," << (t.ok ? format_number(t.min_slack) : "-") << ","
                << (opts.timing ? format_number(t.runtime) : "-") << ",ok=" << t.ok << " error=" << t.failed
                << "\n";
        }
    }
    return out.str();
}

} // namespace getf
