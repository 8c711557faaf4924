#include "getf/generator.hpp"

#include <cmath>
#include <random>

namespace getf {

namespace {

class Sampler {
  public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}

    // 53 random bits in [0, 1); std distributions are not portable across libraries.
    double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
    bool coin(double p) { return unit() < p; }

    double value(const Range& r) {
        const double v = r.lo + (r.hi - r.lo) * unit();
        return std::round(v * 1000.0) / 1000.0;
    }

    // Rounded, but never below the smallest positive value of the range.
    double positive(const Range& r) { return std::max(value(r), std::max(r.lo, 0.001)); }

  private:
    std::mt19937_64 rng_;
};

void check_range(const Range& r, const std::string& name, bool allow_zero) {
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi) {
        throw ModelError(name + " range must be finite with lo <= hi");
    }
    if (allow_zero ? r.lo < 0.0 : r.lo <= 0.0) {
        throw ModelError(name + " range must be " + (allow_zero ? "nonnegative" : "positive"));
    }
}

std::vector<Edge> make_edges(const GeneratorSpec& spec, Sampler& rng) {
    const std::size_t n = spec.tasks;
    std::vector<std::pair<TaskId, TaskId>> pairs;
    switch (spec.family) {
    case DagFamily::Layered: {
        const auto layers = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(std::sqrt(n))));
        std::vector<std::size_t> layer(n);
        for (TaskId j = 0; j < n; ++j) layer[j] = j * layers / n;
        for (TaskId a = 0; a < n; ++a) {
            for (TaskId b = a + 1; b < n; ++b) {
                if (layer[b] == layer[a] + 1 && rng.coin(spec.density)) pairs.emplace_back(a, b);
            }
        }
        break;
    }
    case DagFamily::ForkJoin:
        if (n == 2) pairs.emplace_back(0, 1);
        for (TaskId j = 1; j + 1 < n; ++j) {
            pairs.emplace_back(0, j);
            pairs.emplace_back(j, n - 1);
        }
        break;
    case DagFamily::RandomDag:
        for (TaskId a = 0; a < n; ++a) {
            for (TaskId b = a + 1; b < n; ++b) {
                if (rng.coin(spec.density)) pairs.emplace_back(a, b);
            }
        }
        break;
    }
    std::vector<Edge> edges;
    edges.reserve(pairs.size());
    for (auto [a, b] : pairs) edges.push_back({a, b, rng.value(spec.data)});
    return edges;
}

} // namespace

void validate_spec(const GeneratorSpec& spec) {
    if (spec.tasks == 0) throw ModelError("tasks must be at least 1");
    if (spec.machines == 0) throw ModelError("machines must be at least 1");
    if (!(spec.density >= 0.0 && spec.density <= 1.0)) throw ModelError("density must lie in [0, 1]");
    check_range(spec.demand, "demand", false);
    check_range(spec.speed, "speed", false);
    check_range(spec.comm, "comm", false);
    check_range(spec.data, "data", true);
}

Instance generate_instance(const GeneratorSpec& spec) {
    validate_spec(spec);
    Sampler rng(spec.seed);
    const std::size_t n = spec.tasks;
    const std::size_t m = spec.machines;

    std::vector<Task> tasks(n);
    for (TaskId j = 0; j < n; ++j) tasks[j] = {j, rng.positive(spec.demand), 0.0};
    std::vector<Edge> edges = make_edges(spec, rng);

    std::vector<Machine> machines(m);
    for (MachineId i = 0; i < m; ++i) machines[i] = {i, rng.positive(spec.speed)};
    std::vector<std::vector<double>> comm(m, std::vector<double>(m, kInfiniteSpeed));
    for (MachineId a = 0; a < m; ++a) {
        for (MachineId b = 0; b < m; ++b) {
            if (a == b && spec.self_comm == SelfComm::Infinite) continue;
            const double s = rng.positive(spec.comm);
            if (!spec.zero_comm) comm[a][b] = s;
        }
    }

    switch (spec.weights) {
    case WeightMode::Zero:
        break;
    case WeightMode::Uniform:
        for (Task& t : tasks) t.weight = 1.0;
        break;
    case WeightMode::SinkOnly: {
        std::vector<bool> has_succ(n, false);
        for (const Edge& e : edges) has_succ[e.src] = true;
        const TaskId dummy = n;
        for (TaskId j = 0; j < n; ++j) {
            if (!has_succ[j]) edges.push_back({j, dummy, 0.0});
        }
        tasks.push_back({dummy, 1.0, 1.0});
        break;
    }
    }
    return Instance{TaskGraph(std::move(tasks), std::move(edges)), Platform(std::move(machines), std::move(comm))};
}

DagFamily parse_family(const std::string& text) {
    if (text == "layered") return DagFamily::Layered;
    if (text == "fork_join" || text == "fork-join") return DagFamily::ForkJoin;
    if (text == "random_dag" || text == "random-dag") return DagFamily::RandomDag;
    throw ModelError("unknown DAG family '" + text + "'");
}

SelfComm parse_self_comm(const std::string& text) {
    if (text == "matrix") return SelfComm::Matrix;
    if (text == "infinite") return SelfComm::Infinite;
    throw ModelError("unknown self-comm mode '" + text + "'");
}

WeightMode parse_weight_mode(const std::string& text) {
    if (text == "zero") return WeightMode::Zero;
    if (text == "uniform") return WeightMode::Uniform;
    if (text == "sink_only" || text == "sink-only") return WeightMode::SinkOnly;
    throw ModelError("unknown weight mode '" + text + "'");
}

Range parse_range(const std::string& text) {
    try {
        const auto colon = text.find(':');
        if (colon == std::string::npos) {
            const double v = std::stod(text);
            return {v, v};
        }
        return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
    } catch (const std::logic_error&) {
        throw ModelError("malformed range '" + text + "' (expected lo:hi)");
    }
}

const char* to_string(DagFamily f) {
    switch (f) {
    case DagFamily::Layered: return "layered";
    case DagFamily::ForkJoin: return "fork_join";
    case DagFamily::RandomDag: return "random_dag";
    }
    return "?";
}

const char* to_string(SelfComm s) { return s == SelfComm::Matrix ? "matrix" : "infinite"; }

const char* to_string(WeightMode w) {
    switch (w) {
    case WeightMode::Zero: return "zero";
    case WeightMode::Uniform: return "uniform";
    case WeightMode::SinkOnly: return "sink_only";
    }
    return "?";
}

} // namespace getf
