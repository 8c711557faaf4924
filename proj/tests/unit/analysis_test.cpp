#include <gtest/gtest.h>

#include "getf/analysis.hpp"
#include "getf/generator.hpp"
#include "getf/grouping.hpp"
#include "getf/oracle.hpp"
#include "support/oracles.hpp"

namespace getf {
namespace {

using testing::example1;
using testing::make_instance;

struct Example1Fixture : ::testing::Test {
    Instance inst = example1();
    GroupAssignment f = trivial_assignment(inst);
    Schedule s = getf_schedule(inst, f);
};

TEST_F(Example1Fixture, TerminalChainByIndex) {
    EXPECT_EQ(terminal_chain(s, inst.graph).tasks, (std::vector<TaskId>{0, 3}));
    EXPECT_EQ(terminal_chain(s, inst.graph, TaskId{3}).anchor(), 3u);
    EXPECT_EQ(latest_predecessors(3, s, inst.graph), (std::vector<TaskId>{0, 1}));
}

TEST_F(Example1Fixture, ChainCommTimes) {
    EXPECT_DOUBLE_EQ(chain_comm_time({{1, 3}}, s, f, inst), 1.0);
    EXPECT_DOUBLE_EQ(chain_comm_time({{0, 3}}, s, f, inst), 2.0);
    const auto [chain, c] = min_comm_terminal_chain(s, inst, f);
    EXPECT_EQ(chain.tasks, (std::vector<TaskId>{1, 3}));
    EXPECT_DOUBLE_EQ(c, 1.0);
}

// The chain follows the latest-finishing predecessor, but an earlier-finishing
// predecessor with heavy data can set the start time. The bound then fails.
TEST(SeparationReport, SideDataBreaksChainBound) {
    const Instance inst = make_instance({1, 5, 1}, {{0, 2, 100.0}, {1, 2, 0.0}}, {1.0}, 1.0);
    const GroupAssignment f = trivial_assignment(inst);
    const Schedule s = getf_schedule(inst, f);
    EXPECT_DOUBLE_EQ(s.makespan(), 102.0);
    const BoundReport r = separation_report(s, inst, f);
    EXPECT_EQ(r.chain.tasks, (std::vector<TaskId>{1, 2}));
    EXPECT_DOUBLE_EQ(r.find("separation")->rhs, 13.0);
    EXPECT_FALSE(r.find("separation")->pass);
}

TEST_F(Example1Fixture, SeparationReport) {
    const BoundReport r = separation_report(s, inst, f);
    EXPECT_DOUBLE_EQ(r.chain_processing, 4.0);
    EXPECT_DOUBLE_EQ(r.total_group_load(), 3.0);
    EXPECT_DOUBLE_EQ(r.chain_comm, 1.0);
    ASSERT_NE(r.find("separation"), nullptr);
    EXPECT_DOUBLE_EQ(r.find("separation")->slack, 3.0);
    EXPECT_TRUE(r.pass());
}

TEST_F(Example1Fixture, MakespanTheoremReport) {
    const BoundReport r = makespan_theorem_report(s, inst, f, 4.0);
    EXPECT_DOUBLE_EQ(r.find("chain_processing")->rhs, 16.0);
    EXPECT_DOUBLE_EQ(r.find("group_load")->rhs, 8.0);
    EXPECT_DOUBLE_EQ(r.find("makespan")->rhs, 25.0);
    EXPECT_TRUE(r.pass());
}

TEST_F(Example1Fixture, IdenticalReport) {
    const BoundReport r = identical_report(s, inst);
    EXPECT_DOUBLE_EQ(r.chain_comm, 0.75);
    EXPECT_DOUBLE_EQ(r.find("intermediate")->rhs, 5.75);
    const double opt = brute_force_schedule(inst, true).value;
    EXPECT_DOUBLE_EQ(opt, 4.0);
    const BoundReport withopt = identical_report(s, inst, opt);
    EXPECT_DOUBLE_EQ(withopt.find("optimum")->rhs, 6.75);
    EXPECT_TRUE(withopt.pass());
}

TEST_F(Example1Fixture, PerTaskChainComm) {
    const std::vector<double> c = per_task_chain_comm(s, inst, f);
    EXPECT_DOUBLE_EQ(c[0], 0.0);
    EXPECT_DOUBLE_EQ(c[1], 0.0);
    EXPECT_DOUBLE_EQ(c[3], 1.0);
}

TEST_F(Example1Fixture, WeightedReportEndToEnd) {
    const WeightedPipeline p = run_weighted_pipeline(inst);
    const Schedule ws = getf_schedule(p.instance, p.assignment);
    const BoundReport r = weighted_theorem_report(ws, p.instance, p.assignment, p.fractional);
    EXPECT_NEAR(*r.lp_value, 4.0, 1e-7);
    EXPECT_DOUBLE_EQ(r.objective, 5.0);
    EXPECT_TRUE(r.pass());
}

TEST(Reports, SingleTask) {
    Instance inst = make_instance({1.0}, {}, {1.0});
    inst = Instance{TaskGraph({{0, 1.0, 1.0}}, {}), inst.platform};
    const GroupAssignment f = trivial_assignment(inst);
    const Schedule s = getf_schedule(inst, f);
    EXPECT_EQ(terminal_chain(s, inst.graph).size(), 1u);
    const BoundReport sep = separation_report(s, inst, f);
    EXPECT_DOUBLE_EQ(sep.find("separation")->rhs, 2.0);

    const WeightedPipeline p = run_weighted_pipeline(inst);
    const BoundReport w = weighted_theorem_report(getf_schedule(p.instance, p.assignment), p.instance,
                                                  p.assignment, p.fractional);
    EXPECT_DOUBLE_EQ(w.find("aggregate")->rhs, 32.0 * 3.0 * 1.0);
    EXPECT_TRUE(w.pass());
}

TEST(Reports, PathDagHasUniqueChain) {
    const Instance inst = make_instance({1, 2, 3}, {{0, 1, 2.0}, {1, 2, 1.0}}, {1.0, 2.0}, 2.0);
    const GroupAssignment f = trivial_assignment(inst);
    const Schedule s = getf_schedule(inst, f);
    const TerminalChain chain = terminal_chain(s, inst.graph);
    EXPECT_EQ(chain.tasks, (std::vector<TaskId>{0, 1, 2}));
    EXPECT_DOUBLE_EQ(min_comm_terminal_chain(s, inst, f).second, chain_comm_time(chain, s, f, inst));
}

TEST(Reports, SingleMachineZeroDataIsTight) {
    const Instance inst = make_instance({1, 2, 3}, {{0, 1, 0.0}, {0, 2, 0.0}}, {1.0});
    const Schedule s = etf_schedule(inst);
    const BoundReport r = identical_report(s, inst, brute_force_schedule(inst, true).value);
    EXPECT_DOUBLE_EQ(r.find("optimum")->slack, 0.0);
    EXPECT_DOUBLE_EQ(r.chain_comm, 0.0);
}

TEST(Reports, IdenticalReportRejectsMixedSpeeds) {
    const Instance inst = make_instance({1.0}, {}, {1.0, 2.0});
    EXPECT_THROW(identical_report(etf_schedule(inst), inst), AnalysisError);
}

TEST(Reports, ZeroCommunicationGivesZeroC) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        GeneratorSpec spec;
        spec.tasks = 15;
        spec.machines = 4;
        spec.zero_comm = true;
        spec.seed = seed;
        const Instance inst = generate_instance(spec);
        const GroupAssignment f = run_makespan_pipeline(inst).assignment;
        const Schedule s = getf_schedule(inst, f);
        EXPECT_EQ(separation_report(s, inst, f).chain_comm, 0.0);
        for (double c : per_task_chain_comm(s, inst, f)) EXPECT_EQ(c, 0.0);
    }
}

TEST(Reports, MinCommChainMatchesEnumeration) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        GeneratorSpec spec;
        spec.family = static_cast<DagFamily>(seed % 3);
        spec.tasks = 4 + seed % 7;
        spec.machines = 1 + seed % 4;
        spec.density = 0.5;
        spec.demand = {1.0, 3.0};
        spec.seed = seed;
        const Instance inst = generate_instance(spec);
        const GroupAssignment f = trivial_assignment(inst);
        const Schedule s = etf_schedule(inst);
        const auto [chain, c] = min_comm_terminal_chain(s, inst, f);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& tasks : testing::all_terminal_chains(s, inst.graph)) {
            best = std::min(best, chain_comm_time({tasks}, s, f, inst));
        }
        EXPECT_NEAR(c, best, 1e-9) << "seed " << seed;
        EXPECT_NEAR(chain_comm_time(chain, s, f, inst), c, 1e-9);
        // Backward-walk invariant.
        for (std::size_t k = 1; k < chain.size(); ++k) {
            const auto latest = latest_predecessors(chain.tasks[k], s, inst.graph);
            EXPECT_NE(std::find(latest.begin(), latest.end(), chain.tasks[k - 1]), latest.end());
        }
        EXPECT_TRUE(inst.graph.predecessors(chain.tasks.front()).empty());
    }
}

TEST(Reports, InequalityTolerance) {
    EXPECT_TRUE(make_inequality("a", 1.0 + 1e-7, 1.0).pass);
    EXPECT_FALSE(make_inequality("a", 1.0 + 1e-5, 1.0).pass);
    EXPECT_TRUE(make_inequality("a", 1000.0 + 1e-4, 1000.0).pass);
}

TEST(Reports, JsonHasNamedInequalities) {
    const Instance inst = example1();
    const GroupAssignment f = trivial_assignment(inst);
    const std::string text = serialize_report(separation_report(getf_schedule(inst, f), inst, f));
    for (const char* key : {"\"inequalities\"", "\"name\"", "\"lhs\"", "\"rhs\"", "\"slack\"", "\"pass\""}) {
        EXPECT_NE(text.find(key), std::string::npos) << key;
    }
}

TEST(Reports, IncompleteScheduleIsRejected) {
    const Instance inst = example1();
    Schedule s(4, 2);
    s.place(0, 0, 0.0, inst);
    EXPECT_THROW(separation_report(s, inst, trivial_assignment(inst)), AnalysisError);
}

} // namespace
} // namespace getf
