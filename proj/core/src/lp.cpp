#include "getf/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace getf {

void LinearProgram::add(const std::vector<std::pair<std::size_t, double>>& terms, Relation rel, double rhs,
                        std::string name) {
    LinearConstraint c;
    c.coeffs.assign(num_vars(), 0.0);
    for (const auto& [var, coef] : terms) {
        if (var >= num_vars()) throw LpError("constraint references variable " + std::to_string(var) + " out of range");
        c.coeffs[var] += coef;
    }
    c.relation = rel;
    c.rhs = rhs;
    c.name = std::move(name);
    constraints.push_back(std::move(c));
}

const char* to_string(LpStatus status) {
    switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    }
    return "unknown";
}

namespace {

constexpr double kCostTol = 1e-9;

// Row-major dense tableau. Column `cols` holds the right-hand side.
class Tableau {
  public:
    Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * (cols + 1), 0.0) {}

    double& at(std::size_t r, std::size_t c) { return a_[r * (cols_ + 1) + c]; }
    double at(std::size_t r, std::size_t c) const { return a_[r * (cols_ + 1) + c]; }
    double& rhs(std::size_t r) { return at(r, cols_); }
    double rhs(std::size_t r) const { return at(r, cols_); }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    void pivot(std::size_t pr, std::size_t pc, std::vector<double>& cost, double& cost_rhs) {
        const std::size_t w = cols_ + 1;
        double* prow = &a_[pr * w];
        const double inv = 1.0 / prow[pc];
        for (std::size_t c = 0; c < w; ++c) prow[c] *= inv;
        prow[pc] = 1.0;
        for (std::size_t r = 0; r < rows_; ++r) {
            if (r == pr) continue;
            double* row = &a_[r * w];
            const double f = row[pc];
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < w; ++c) row[c] -= f * prow[c];
            row[pc] = 0.0;
        }
        const double f = cost[pc];
        if (f != 0.0) {
            for (std::size_t c = 0; c < cols_; ++c) cost[c] -= f * prow[c];
            cost_rhs -= f * prow[cols_];
            cost[pc] = 0.0;
        }
    }

    void drop_row(std::size_t r) {
        const std::size_t w = cols_ + 1;
        a_.erase(a_.begin() + static_cast<std::ptrdiff_t>(r * w), a_.begin() + static_cast<std::ptrdiff_t>((r + 1) * w));
        --rows_;
    }

  private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> a_;
};

enum class Outcome { Optimal, Unbounded };

// Bland's rule: lowest-index improving column enters; among minimum-ratio rows the
// one whose basic variable has the lowest index leaves.
Outcome run_simplex(Tableau& t, std::vector<std::size_t>& basis, std::vector<double>& cost, double& cost_rhs,
                    const std::vector<bool>& allowed, std::size_t& pivots) {
    for (;;) {
        std::size_t enter = t.cols();
        for (std::size_t c = 0; c < t.cols(); ++c) {
            if (allowed[c] && cost[c] < -kCostTol) {
                enter = c;
                break;
            }
        }
        if (enter == t.cols()) return Outcome::Optimal;

        std::size_t leave = t.rows();
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < t.rows(); ++r) {
            const double a = t.at(r, enter);
            if (a <= kPivotTol) continue;
            const double ratio = std::max(0.0, t.rhs(r)) / a;
            const double tie = 1e-12 * std::max(1.0, std::abs(best));
            if (leave == t.rows() || ratio < best - tie) {
                best = ratio;
                leave = r;
            } else if (ratio <= best + tie && basis[r] < basis[leave]) {
                best = std::min(best, ratio);
                leave = r;
            }
        }
        if (leave == t.rows()) return Outcome::Unbounded;
        t.pivot(leave, enter, cost, cost_rhs);
        basis[leave] = enter;
        ++pivots;
    }
}

} // namespace

LpSolution solve_lp(const LinearProgram& lp) {
    const std::size_t n = lp.num_vars();
    for (double c : lp.objective) {
        if (!std::isfinite(c)) throw LpError("non-finite objective coefficient");
    }
    for (const LinearConstraint& c : lp.constraints) {
        if (c.coeffs.size() != n) {
            throw LpError("constraint '" + c.name + "' has " + std::to_string(c.coeffs.size()) +
                          " coefficients, expected " + std::to_string(n));
        }
        if (!std::isfinite(c.rhs)) throw LpError("non-finite bound in constraint '" + c.name + "'");
        for (double v : c.coeffs) {
            if (!std::isfinite(v)) throw LpError("non-finite coefficient in constraint '" + c.name + "'");
        }
    }

    // Normalize to nonnegative right-hand sides.
    struct Row {
        const LinearConstraint* src;
        double sign;
        Relation rel;
    };
    std::vector<Row> rows;
    rows.reserve(lp.constraints.size());
    std::size_t n_slack = 0;
    std::size_t n_art = 0;
    for (const LinearConstraint& c : lp.constraints) {
        Row r{&c, 1.0, c.relation};
        if (c.rhs < 0.0) {
            r.sign = -1.0;
            if (c.relation == Relation::LessEqual) r.rel = Relation::GreaterEqual;
            if (c.relation == Relation::GreaterEqual) r.rel = Relation::LessEqual;
        }
        if (r.rel != Relation::Equal) ++n_slack;
        if (r.rel != Relation::LessEqual) ++n_art;
        rows.push_back(r);
    }

    const std::size_t m = rows.size();
    const std::size_t art_begin = n + n_slack;
    const std::size_t total = art_begin + n_art;
    Tableau t(m, total);
    std::vector<std::size_t> basis(m);
    std::size_t slack_col = n;
    std::size_t art_col = art_begin;
    for (std::size_t r = 0; r < m; ++r) {
        const Row& row = rows[r];
        for (std::size_t c = 0; c < n; ++c) t.at(r, c) = row.sign * row.src->coeffs[c];
        t.rhs(r) = row.sign * row.src->rhs;
        if (row.rel == Relation::LessEqual) {
            t.at(r, slack_col) = 1.0;
            basis[r] = slack_col++;
        } else {
            if (row.rel == Relation::GreaterEqual) t.at(r, slack_col++) = -1.0;
            t.at(r, art_col) = 1.0;
            basis[r] = art_col++;
        }
    }

    LpSolution sol;
    std::vector<bool> allowed(total, true);

    // Phase 1: minimize the sum of artificials.
    std::vector<double> cost(total, 0.0);
    double cost_rhs = 0.0;
    if (n_art > 0) {
        for (std::size_t c = art_begin; c < total; ++c) cost[c] = 1.0;
        for (std::size_t r = 0; r < m; ++r) {
            if (basis[r] < art_begin) continue;
            for (std::size_t c = 0; c < total; ++c) cost[c] -= t.at(r, c);
            cost_rhs -= t.rhs(r);
        }
        run_simplex(t, basis, cost, cost_rhs, allowed, sol.pivots);
        if (-cost_rhs > kFeasibilityTol) {
            sol.status = LpStatus::Infeasible;
            return sol;
        }
        // Drive zero-level artificials out of the basis; rows with no usable pivot are redundant.
        for (std::size_t r = 0; r < t.rows();) {
            if (basis[r] < art_begin) {
                ++r;
                continue;
            }
            std::size_t col = art_begin;
            for (std::size_t c = 0; c < art_begin; ++c) {
                if (std::abs(t.at(r, c)) > kPivotTol) {
                    col = c;
                    break;
                }
            }
            if (col == art_begin) {
                t.drop_row(r);
                basis.erase(basis.begin() + static_cast<std::ptrdiff_t>(r));
                continue;
            }
            t.pivot(r, col, cost, cost_rhs);
            basis[r] = col;
            ++sol.pivots;
            ++r;
        }
        for (std::size_t c = art_begin; c < total; ++c) allowed[c] = false;
    }

    // Phase 2: original objective expressed in the current basis.
    std::fill(cost.begin(), cost.end(), 0.0);
    cost_rhs = 0.0;
    for (std::size_t c = 0; c < n; ++c) cost[c] = lp.objective[c];
    for (std::size_t r = 0; r < t.rows(); ++r) {
        const double cb = basis[r] < n ? lp.objective[basis[r]] : 0.0;
        if (cb == 0.0) continue;
        for (std::size_t c = 0; c < total; ++c) cost[c] -= cb * t.at(r, c);
        cost_rhs -= cb * t.rhs(r);
    }
    if (run_simplex(t, basis, cost, cost_rhs, allowed, sol.pivots) == Outcome::Unbounded) {
        sol.status = LpStatus::Unbounded;
        return sol;
    }

    sol.status = LpStatus::Optimal;
    sol.x.assign(n, 0.0);
    for (std::size_t r = 0; r < t.rows(); ++r) {
        if (basis[r] < n) sol.x[basis[r]] = std::max(0.0, t.rhs(r));
    }
    sol.objective = 0.0;
    for (std::size_t c = 0; c < n; ++c) sol.objective += lp.objective[c] * sol.x[c];
    return sol;
}

double max_violation(const LinearProgram& lp, const std::vector<double>& x) {
    double worst = 0.0;
    for (double v : x) worst = std::max(worst, -v);
    for (const LinearConstraint& c : lp.constraints) {
        double lhs = 0.0;
        for (std::size_t k = 0; k < c.coeffs.size() && k < x.size(); ++k) lhs += c.coeffs[k] * x[k];
        switch (c.relation) {
        case Relation::LessEqual: worst = std::max(worst, lhs - c.rhs); break;
        case Relation::GreaterEqual: worst = std::max(worst, c.rhs - lhs); break;
        case Relation::Equal: worst = std::max(worst, std::abs(lhs - c.rhs)); break;
        }
    }
    return worst;
}

void write_lp_format(const LinearProgram& lp, std::ostream& os) {
    auto name = [&](std::size_t k) { return k < lp.names.size() && !lp.names[k].empty() ? lp.names[k] : "x" + std::to_string(k); };
    auto write_terms = [&](const std::vector<double>& coeffs) {
        bool any = false;
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            if (coeffs[k] == 0.0) continue;
            os << (coeffs[k] < 0 ? " - " : (any ? " + " : " ")) << std::abs(coeffs[k]) << " " << name(k);
            any = true;
        }
        if (!any) os << " 0 " << name(0);
    };
    auto prev = os.precision(17);
    os << "\\ generated by getf\nMinimize\n obj:";
    write_terms(lp.objective);
    os << "\nSubject To\n";
    for (std::size_t r = 0; r < lp.constraints.size(); ++r) {
        const LinearConstraint& c = lp.constraints[r];
        os << " " << (c.name.empty() ? "c" + std::to_string(r) : c.name) << ":";
        write_terms(c.coeffs);
        switch (c.relation) {
        case Relation::LessEqual: os << " <= "; break;
        case Relation::GreaterEqual: os << " >= "; break;
        case Relation::Equal: os << " = "; break;
        }
        os << c.rhs << "\n";
    }
    os << "End\n";
    os.precision(prev);
}

} // namespace getf
