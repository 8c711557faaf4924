// Acceptance criteria, one line per criterion. Exit status is nonzero when any
// criterion fails that was not passed as a known gap.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "getf/analysis.hpp"
#include "getf/generator.hpp"
#include "getf/grouping.hpp"
#include "getf/log.hpp"
#include "getf/lp.hpp"
#include "getf/oracle.hpp"
#include "getf/runner.hpp"
#include "getf/scheduler.hpp"
#include "support/oracles.hpp"

namespace {

using namespace getf;

struct Outcome {
    std::size_t checked = 0;
    std::size_t failed = 0;
    std::string first_failure;
    std::string detail;
    std::map<std::string, std::pair<std::size_t, std::size_t>> tally; // kind -> (failed, total)

    void expect(bool ok, const std::string& what) {
        ++checked;
        if (ok) return;
        if (failed++ == 0) first_failure = what;
    }

    void expect(const Inequality& q, const std::string& where) {
        auto& t = tally[q.name.substr(0, q.name.find('['))];
        ++t.second;
        if (!q.pass) ++t.first;
        expect(q.pass, where + " " + q.name + ": " + format_number(q.lhs) + " > " + format_number(q.rhs));
    }

    std::string tally_text() const {
        std::string out;
        for (const auto& [kind, t] : tally) {
            out += (out.empty() ? "" : ", ") + kind + " " + std::to_string(t.second - t.first) + "/" +
                   std::to_string(t.second);
        }
        return out;
    }
};

// Feasibility of every schedule produced anywhere in the suites (criterion 8).
Outcome g_feasibility;

void check_feasible(const Instance& inst, const Schedule& s, const GroupAssignment* f, const std::string& label) {
    const FeasibilityReport r = verify_schedule(inst, s, f);
    g_feasibility.expect(r.feasible(), label + (r.feasible() ? "" : ": " + r.first()->message));
}

const std::vector<TieBreakRule> kTieRules(std::uint64_t seed) {
    return {TieBreakRule::by_index(), TieBreakRule::random(seed), TieBreakRule::largest_demand(),
            TieBreakRule::most_successors()};
}

std::string label(const char* suite, std::uint64_t seed) { return std::string(suite) + " seed " + std::to_string(seed); }

GeneratorSpec random_spec(std::mt19937_64& rng, std::size_t max_tasks, std::size_t max_machines, std::uint64_t seed) {
    auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
    GeneratorSpec spec;
    spec.family = static_cast<DagFamily>(pick(0, 2));
    spec.tasks = pick(1, max_tasks);
    spec.machines = pick(1, max_machines);
    spec.density = std::uniform_real_distribution<double>(0.0, 0.6)(rng);
    spec.demand = {1.0, static_cast<double>(pick(1, 20))};
    spec.speed = {0.5, static_cast<double>(pick(1, 32))};
    spec.comm = {0.5, static_cast<double>(pick(1, 8))};
    spec.data = {0.0, static_cast<double>(pick(0, 10))};
    spec.self_comm = pick(0, 1) ? SelfComm::Matrix : SelfComm::Infinite;
    spec.zero_comm = pick(0, 9) == 0;
    spec.seed = seed;
    return spec;
}

// Arbitrary group assignment over the band partition (the separation bound holds for any f).
GroupAssignment arbitrary_assignment(const Instance& inst, std::mt19937_64& rng) {
    const MachineGroups g = partition_machines(inst.platform);
    std::vector<std::size_t> nonempty;
    for (std::size_t k = 1; k <= g.K(); ++k) {
        if (!g.machines_in(k).empty()) nonempty.push_back(k);
    }
    GroupAssignment f{g, std::vector<std::size_t>(inst.num_tasks()), {}};
    for (std::size_t& k : f.task_group) k = nonempty[rng() % nonempty.size()];
    return f;
}

Outcome criterion_example() {
    Outcome o;
    const Instance inst = testing::example1();
    const GroupAssignment f = trivial_assignment(inst);
    const Schedule g = getf_schedule(inst, f, TieBreakRule::by_index());
    check_feasible(inst, g, &f, "example getf");
    o.expect(std::abs(g.makespan() - 5.0) <= 1e-9, "GETF makespan " + format_number(g.makespan()));
    o.expect(g.machine[3] == 0 && std::abs(g.start[3] - 2.0) <= 1e-9, "GETF task 3 placement");
    const std::vector<TaskId> priority{0, 1, 2, 3};
    const Schedule s = sls_schedule(inst, f, priority);
    check_feasible(inst, s, &f, "example sls");
    o.expect(std::abs(s.makespan() - 6.0) <= 1e-9, "SLS makespan " + format_number(s.makespan()));
    double busy = 0.0;
    for (TaskId j : s.timelines[1]) busy += std::max(0.0, std::min(3.0, s.finish[j]) - std::max(1.0, s.start[j]));
    o.expect(std::abs((2.0 - busy) - 2.0) <= 1e-9, "SLS idle on m1 in [1,3] is " + format_number(2.0 - busy));
    o.detail = "GETF 5, SLS 6, idle 2";
    return o;
}

Outcome criterion_separation() {
    Outcome o;
    std::mt19937_64 rng(20240601);
    double worst = std::numeric_limits<double>::infinity();
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const Instance inst = generate_instance(random_spec(rng, 50, 16, seed));
        const GroupAssignment f = seed % 2 ? arbitrary_assignment(inst, rng) : trivial_assignment(inst);
        for (const TieBreakRule& tie : kTieRules(seed)) {
            const Schedule s = getf_schedule(inst, f, tie);
            check_feasible(inst, s, &f, label("separation", seed));
            const BoundReport r = separation_report(s, inst, f);
            worst = std::min(worst, r.find("separation")->slack);
            for (const Inequality& q : r.checks) o.expect(q, label("separation", seed) + " tie " + tie.to_string());
        }
    }
    o.detail = "4000 runs; passed " + o.tally_text() + "; min separation slack " + format_number(worst);
    return o;
}

Outcome criterion_lemmas() {
    Outcome o;
    std::mt19937_64 rng(7001);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const Instance inst = generate_instance(random_spec(rng, 20, 8, seed));
        const MakespanPipeline p = run_makespan_pipeline(inst);
        const Schedule s = getf_schedule(inst, p.assignment);
        check_feasible(inst, s, &p.assignment, label("lemmas", seed));
        const BoundReport r = makespan_theorem_report(s, inst, p.assignment, p.fractional.horizon);
        for (const Inequality& q : r.checks) o.expect(q, label("lemmas", seed));
    }
    o.detail = "200 instances; passed " + o.tally_text();
    return o;
}

// The relaxation ranges over the retained machines, so its optimum is compared
// with the zero-communication optimum on those machines.
Instance retained_only(const Instance& inst, const MachineGroups& g) {
    std::vector<Machine> kept;
    for (MachineId i : g.retained_machines()) kept.push_back({kept.size(), inst.platform.speed(i)});
    const std::size_t r = kept.size();
    return Instance{inst.graph, Platform(kept, std::vector<std::vector<double>>(r, std::vector<double>(r, kInfiniteSpeed)))};
}

Outcome criterion_lp_lower_bound() {
    Outcome o;
    std::mt19937_64 rng(4242);
    double worst = 0.0;
    std::size_t below_full = 0;
    std::size_t discarding = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        GeneratorSpec spec = random_spec(rng, 6, 3, seed);
        spec.zero_comm = true;
        const Instance inst = generate_instance(spec);
        const MakespanPipeline p = run_makespan_pipeline(inst);
        const double t_star = p.fractional.horizon;
        const OracleResult opt = brute_force_schedule(retained_only(inst, p.groups), true);
        const OracleResult full = brute_force_schedule(inst, true);
        check_feasible(without_communication(inst), full.schedule, nullptr, label("oracle", seed));
        worst = std::max(worst, t_star / opt.value);
        if (p.groups.retained_machines().size() < inst.num_machines()) ++discarding;
        if (t_star <= full.value * (1.0 + 1e-6)) ++below_full;
        o.expect(t_star <= opt.value * (1.0 + 1e-6),
                 label("lp bound", seed) + ": T* " + format_number(t_star) + " > OPT " + format_number(opt.value));
        o.expect(t_star <= 2.0 * full.value * (1.0 + 1e-6),
                 label("lp bound", seed) + ": T* " + format_number(t_star) + " > 2 OPT(all machines) " +
                     format_number(full.value));
    }
    o.detail = "max T*/OPT(retained) " + format_number(worst) + "; T* <= OPT(all machines) on " +
               std::to_string(below_full) + "/50 (" + std::to_string(discarding) + " instances discard machines)";
    return o;
}

Outcome criterion_identical() {
    Outcome o;
    std::mt19937_64 rng(515);
    std::size_t tiny = 0;
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        GeneratorSpec spec = random_spec(rng, seed % 5 == 0 ? 6 : 40, seed % 5 == 0 ? 3 : 8, seed);
        const double speed = std::uniform_real_distribution<double>(0.5, 4.0)(rng);
        spec.speed = {speed, speed};
        const Instance inst = generate_instance(spec);
        const GroupAssignment f = trivial_assignment(inst);
        const Schedule s = etf_schedule(inst);
        check_feasible(inst, s, &f, label("identical", seed));
        std::optional<double> opt;
        if (inst.num_tasks() <= 6 && inst.num_machines() <= 3) {
            opt = brute_force_schedule(inst, true).value;
            ++tiny;
        }
        const BoundReport r = identical_report(s, inst, opt);
        for (const Inequality& q : r.checks) o.expect(q, label("identical", seed));
    }
    const Instance ex = testing::example1();
    const BoundReport r = identical_report(etf_schedule(ex), ex, brute_force_schedule(ex, true).value);
    o.expect(std::abs(r.chain_comm - 0.75) <= 1e-9, "Example 1 C' = " + format_number(r.chain_comm));
    o.expect(std::abs(r.find("optimum")->rhs - 6.75) <= 1e-9, "Example 1 bound " + format_number(r.find("optimum")->rhs));
    o.detail = "500 instances, " + std::to_string(tiny) + " with brute-force OPT; passed " + o.tally_text() +
               "; Example 1 C'=0.75, bound 6.75";
    return o;
}

Outcome criterion_weighted() {
    Outcome o;
    std::mt19937_64 rng(9090);
    std::size_t clamped = 0;
    std::size_t slices = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        GeneratorSpec spec = random_spec(rng, 11, 4, seed);
        spec.weights = seed % 2 ? WeightMode::Uniform : WeightMode::SinkOnly;
        const Instance inst = generate_instance(spec);
        const WeightedPipeline p = run_weighted_pipeline(inst);
        clamped += p.fractional.warnings.size();
        const Schedule s = getf_schedule(p.instance, p.assignment);
        check_feasible(p.instance, s, &p.assignment, label("weighted", seed));
        const BoundReport r = weighted_theorem_report(s, p.instance, p.assignment, p.fractional);
        for (const Inequality& q : r.checks) o.expect(q, label("weighted", seed));
        for (const SliceFeasibility& sl : check_slice_feasibility(p.instance, p.groups, p.fractional)) {
            ++slices;
            o.expect(sl.feasible, label("weighted", seed) + " slice q=" + std::to_string(sl.interval) +
                                      " violation " + format_number(sl.max_violation));
        }
    }
    o.detail = "200 instances; passed " + o.tally_text() + ", slices " + std::to_string(slices) + "; " +
               std::to_string(clamped) + " clamped q(j)";
    return o;
}

Outcome criterion_lp_oracle() {
    Outcome o;
    std::mt19937_64 rng(77);
    std::size_t optimal = 0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
        const std::size_t rows = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
        std::uniform_real_distribution<double> coef(-3.0, 3.0);
        LinearProgram lp(n);
        for (double& c : lp.objective) c = coef(rng);
        std::vector<std::pair<std::size_t, double>> budget;
        for (std::size_t v = 0; v < n; ++v) budget.emplace_back(v, 1.0);
        lp.add(budget, Relation::LessEqual, 10.0);
        for (std::size_t r = 1; r < rows; ++r) {
            std::vector<std::pair<std::size_t, double>> terms;
            for (std::size_t v = 0; v < n; ++v) terms.emplace_back(v, coef(rng));
            const auto rel = static_cast<Relation>(rng() % 3);
            lp.add(terms, rel, std::uniform_real_distribution<double>(-2.0, 6.0)(rng));
        }
        const LpSolution s = solve_lp(lp);
        const std::optional<double> ref = testing::vertex_enumeration_minimum(lp);
        if (!ref) {
            o.expect(s.status == LpStatus::Infeasible, "LP " + std::to_string(t) + " should be infeasible");
            continue;
        }
        ++optimal;
        o.expect(s.status == LpStatus::Optimal && std::abs(s.objective - *ref) <= 1e-7,
                 "LP " + std::to_string(t) + ": " + format_number(s.objective) + " vs " + format_number(*ref));
    }
    const Instance ex = testing::example1();
    const MachineGroups g = partition_machines(ex.platform);
    const LpSolution mk = solve_lp(build_makespan_lp(ex, g).lp);
    o.expect(mk.status == LpStatus::Optimal && std::abs(mk.objective - 4.0) <= 1e-7,
             "Example 1 T* = " + format_number(mk.objective));
    const LpSolution wt = solve_lp(build_weighted_lp(ex, g).lp);
    o.expect(wt.status == LpStatus::Optimal && std::abs(wt.objective - 4.0) <= 1e-7,
             "Example 1 weighted LP = " + format_number(wt.objective));
    o.detail = std::to_string(optimal) + " feasible LPs matched; T* = " + format_number(mk.objective) +
               ", weighted = " + format_number(wt.objective);
    return o;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome criterion_determinism(const char* cli) {
    Outcome o = g_feasibility;
    const std::size_t before = o.checked;
    std::mt19937_64 rng(31337);
    const Algorithm algos[] = {Algorithm::GetfMakespan, Algorithm::GetfWeighted, Algorithm::Etf, Algorithm::Sls};
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        GeneratorSpec spec = random_spec(rng, 10, 4, seed);
        spec.weights = WeightMode::Uniform;
        const Instance inst = generate_instance(spec);
        const Instance reparsed = parse_instance(serialize_instance(generate_instance(spec)));
        for (Algorithm a : algos) {
            const SolveOptions opts{a, TieBreakRule::random(seed), {}};
            const SolveResult x = solve(inst, opts);
            const SolveResult y = solve(reparsed, opts);
            o.expect(x.feasibility.feasible(), label(to_string(a), seed) + " infeasible");
            o.expect(serialize_schedule(x.schedule, inst, x.meta) == serialize_schedule(y.schedule, reparsed, y.meta),
                     label(to_string(a), seed) + " schedule JSON differs between runs");
        }
    }
    // Across processes: the CLI run twice on the same triple.
    std::size_t cli_runs = 0;
    if (cli != nullptr) {
        const auto dir = std::filesystem::temp_directory_path() / ("getf_accept_" + std::to_string(::getpid()));
        std::filesystem::create_directories(dir);
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            GeneratorSpec spec = random_spec(rng, 10, 4, seed);
            spec.weights = WeightMode::Uniform;
            std::ofstream(dir / "inst.json") << serialize_instance(generate_instance(spec));
            for (const char* a : {"getf-makespan", "getf-weighted", "etf", "sls"}) {
                std::string outputs[2];
                for (int k = 0; k < 2; ++k) {
                    const auto out = dir / ("s" + std::to_string(k) + ".json");
                    const std::string cmd = std::string(cli) + " solve " + (dir / "inst.json").string() + " --algo " +
                                            a + " --tie random:" + std::to_string(seed) + " -o " + out.string() +
                                            " >/dev/null 2>&1";
                    const int status = std::system(cmd.c_str());
                    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
                    // Exit 3 (bound violation) writes no schedule; that outcome must also repeat.
                    outputs[k] = std::to_string(code) + "\n" + (code == 0 ? read_file(out) : "");
                    std::filesystem::remove(out);
                }
                ++cli_runs;
                o.expect(outputs[0] == outputs[1], "CLI " + std::string(a) + " seed " + std::to_string(seed) +
                                                       " output differs between processes");
            }
        }
        std::filesystem::remove_all(dir);
    }
    o.detail = std::to_string(g_feasibility.checked) + " schedules verified, " + std::to_string(o.checked - before) +
               " determinism checks (" + std::to_string(cli_runs) + " via separate CLI processes)";
    return o;
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv) {
    getf::set_log_level(getf::LogLevel::Quiet);
    // Usage: getf_acceptance [cli-path] [--known-gap N]...
    // A known gap still prints FAIL but does not set the exit status.
    const char* cli = nullptr;
    std::set<int> known_gaps;
    for (int a = 1; a < argc; ++a) {
        const std::string arg = argv[a];
        if (arg == "--known-gap" && a + 1 < argc) {
            known_gaps.insert(std::stoi(argv[++a]));
        } else {
            cli = argv[a];
        }
    }
    const std::vector<Criterion> criteria{
        {1, "Example 1 golden schedules", 1.0, criterion_example},
        {2, "Separation Principle suite", 120.0, criterion_separation},
        {3, "Lemma suite (makespan pipeline)", 120.0, criterion_lemmas},
        {4, "LP lower bound vs brute-force OPT", 60.0, criterion_lp_lower_bound},
        {5, "Identical-machine suite", 120.0, criterion_identical},
        {6, "Weighted suite", 300.0, criterion_weighted},
        {7, "LP solver vs vertex enumeration", 60.0, criterion_lp_oracle},
        {8, "Feasibility and determinism", 120.0, [cli] { return criterion_determinism(cli); }},
    };
    int failures = 0;
    int tolerated = 0;
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.expect(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.budget_s;
        const bool pass = o.failed == 0 && in_time;
        failures += pass ? 0 : 1;
        if (!pass && known_gaps.count(c.id) != 0) ++tolerated;
        std::printf("[%s] criterion %d: %s: %zu/%zu checks passed, %.2fs (budget %.0fs)%s%s\n", pass ? "PASS" : "FAIL",
                    c.id, c.name, o.checked - o.failed, o.checked, secs, c.budget_s,
                    o.detail.empty() ? "" : "; ", o.detail.c_str());
        if (o.failed > 0) std::printf("    first failure: %s\n", o.first_failure.c_str());
        if (!in_time) std::printf("    over time budget\n");
        if (!pass && known_gaps.count(c.id) != 0) std::printf("    known gap: not counted in the exit status\n");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == tolerated ? 0 : 1;
}
