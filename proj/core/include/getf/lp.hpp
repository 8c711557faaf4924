#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace getf {

enum class Relation { LessEqual, Equal, GreaterEqual };

struct LinearConstraint {
    std::vector<double> coeffs; // dense, one entry per variable
    Relation relation = Relation::LessEqual;
    double rhs = 0.0;
    std::string name;
};

/// Minimize objective . x subject to the constraints and x >= 0.
struct LinearProgram {
    std::vector<double> objective;
    std::vector<LinearConstraint> constraints;
    std::vector<std::string> names; // optional variable labels

    LinearProgram() = default;
    explicit LinearProgram(std::size_t num_vars) : objective(num_vars, 0.0) {}

    std::size_t num_vars() const { return objective.size(); }

    /// Appends a constraint given as sparse (variable, coefficient) terms.
    /// Repeated variables accumulate.
    void add(const std::vector<std::pair<std::size_t, double>>& terms, Relation rel, double rhs,
             std::string name = {});
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> x;
    double objective = 0.0;
    std::size_t pivots = 0;
};

class LpError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr double kPivotTol = 1e-9;
inline constexpr double kFeasibilityTol = 1e-7;

/// Dense two-phase primal simplex with Bland's rule. Deterministic.
/// Throws LpError on dimension mismatch or non-finite data.
LpSolution solve_lp(const LinearProgram& lp);

/// Largest violation of any constraint (or of x >= 0) at the point x.
double max_violation(const LinearProgram& lp, const std::vector<double>& x);

/// Writes the program in CPLEX LP text format for cross-checking with external solvers.
void write_lp_format(const LinearProgram& lp, std::ostream& os);

const char* to_string(LpStatus status);

} // namespace getf
