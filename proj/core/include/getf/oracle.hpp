#pragma once

#include <cstdint>
#include <stdexcept>

#include "getf/model.hpp"
#include "getf/scheduler.hpp"

namespace getf {

class LimitsExceeded : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct OracleLimits {
    std::size_t max_tasks = 7;
    std::size_t max_machines = 3;
    std::uint64_t max_states = 100'000'000;
};

enum class Objective { Makespan, WeightedCompletion };

struct OracleResult {
    double value = 0.0;
    Schedule schedule;
    std::uint64_t states = 0; // partial schedules visited
};

/// Exact optimum by enumerating every (machine assignment, topological order)
/// pair with earliest-start placement. Fixing the assignment and the order on
/// each machine, earliest starts are componentwise minimal, so no schedule with
/// inserted idle time does better. Partial schedules that already reach the
/// incumbent are cut off.
OracleResult brute_force_schedule(const Instance& inst, bool ignore_comm = false,
                                  Objective objective = Objective::Makespan, const OracleLimits& limits = {});

struct LowerBounds {
    double work = 0.0;  // sum p_j / sum s_i
    double chain = 0.0; // longest demand path / s_max
};

/// Both are lower bounds on the zero-communication optimum.
LowerBounds lower_bounds(const Instance& inst);

} // namespace getf
