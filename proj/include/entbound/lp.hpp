#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "error.hpp"
#include "rational.hpp"
#include "setfunction.hpp"

namespace entbound {

enum class Relation { GreaterEqual, LessEqual, Equal };

inline const char* to_string(Relation r)
{
    switch (r) {
    case Relation::GreaterEqual: return ">=";
    case Relation::LessEqual: return "<=";
    case Relation::Equal: return "=";
    }
    return "?";
}

/// sum_j coefficients[j] * x_j  (relation)  rhs
struct LinearConstraint {
    std::map<std::size_t, Rational> coefficients;
    Relation relation = Relation::GreaterEqual;
    Rational rhs;
    std::string tag;

    Rational evaluate(const std::vector<Rational>& x) const
    {
        Rational s;
        for (const auto& [j, a] : coefficients)
            s += a * x.at(j);
        return s;
    }

    bool holds(const Rational& lhs) const
    {
        switch (relation) {
        case Relation::GreaterEqual: return lhs >= rhs;
        case Relation::LessEqual: return lhs <= rhs;
        case Relation::Equal: return lhs == rhs;
        }
        return false;
    }
};

enum class Sense { Minimize, Maximize };

struct Objective {
    std::map<std::size_t, Rational> coefficients;
    Sense sense = Sense::Minimize;
};

/// Columns 0 .. 2^|ground|-2 are the subset variables h(mask) (column = mask - 1);
/// `extra_columns` follow. Every column is nonnegative unless listed in `free_columns`.
struct LinearProgram {
    std::vector<std::string> ground;
    std::vector<std::string> extra_columns;
    std::set<std::size_t> free_columns;
    std::vector<LinearConstraint> constraints;
    std::optional<Objective> objective;

    std::size_t subset_columns() const { return ground.empty() ? 0 : subset_count(ground.size()); }
    std::size_t num_columns() const { return subset_columns() + extra_columns.size(); }
    static std::size_t column_of(SubsetMask m) { return static_cast<std::size_t>(m) - 1; }
    std::size_t extra_column(std::size_t k) const { return subset_columns() + k; }

    std::string column_name(std::size_t j) const
    {
        if (j < subset_columns()) {
            std::string s = "h(";
            SubsetMask m = static_cast<SubsetMask>(j + 1);
            bool first = true;
            for (std::size_t i = 0; i < ground.size(); ++i)
                if (m & (SubsetMask{1} << i)) {
                    s += (first ? "" : ",") + ground[i];
                    first = false;
                }
            return s + ")";
        }
        return extra_columns.at(j - subset_columns());
    }

    /// Throws MalformedProgram if any row is empty or indexes past the last column.
    void validate() const
    {
        const std::size_t n = num_columns();
        for (std::size_t i = 0; i < constraints.size(); ++i) {
            const auto& c = constraints[i];
            bool any = false;
            for (const auto& [j, a] : c.coefficients) {
                if (j >= n)
                    throw Error(ErrorKind::MalformedProgram,
                                "row " + std::to_string(i) + " references column " + std::to_string(j));
                any = any || !a.is_zero();
            }
            if (!any)
                throw Error(ErrorKind::MalformedProgram, "row " + std::to_string(i) + " has no nonzero coefficient");
        }
        if (objective)
            for (const auto& [j, a] : objective->coefficients)
                if (j >= n)
                    throw Error(ErrorKind::MalformedProgram, "objective references column " + std::to_string(j));
        for (std::size_t j : free_columns)
            if (j >= n)
                throw Error(ErrorKind::MalformedProgram, "free column out of range");
    }
};

enum class LpStatus { Feasible, Infeasible, Unbounded };

inline const char* to_string(LpStatus s)
{
    switch (s) {
    case LpStatus::Feasible: return "FEASIBLE";
    case LpStatus::Infeasible: return "INFEASIBLE";
    case LpStatus::Unbounded: return "UNBOUNDED";
    }
    return "?";
}

/// Farkas multipliers refer to each row written in ">=" orientation
/// (a "<=" row a.x <= b is read as -a.x >= -b): they are nonnegative on
/// inequality rows and free on equality rows.
struct LpOutcome {
    LpStatus status = LpStatus::Infeasible;
    std::vector<Rational> witness;       // Feasible: one value per column
    std::vector<Rational> certificate;   // Infeasible: one multiplier per row
    std::optional<Rational> optimum;     // Feasible with an objective
    std::vector<Rational> dual;          // Feasible with an objective: per-row multipliers
    std::vector<Rational> ray;           // Unbounded: improving direction from `witness`
    std::size_t pivots = 0;
};

namespace detail {

inline Rational oriented_sign(Relation r) { return r == Relation::LessEqual ? Rational(-1) : Rational(1); }

} // namespace detail

/// Exact substitution check of a full column assignment.
inline bool verify_assignment(const LinearProgram& lp, const std::vector<Rational>& x)
{
    if (x.size() != lp.num_columns())
        throw Error(ErrorKind::DimensionMismatch, "assignment has " + std::to_string(x.size()) + " values, program has "
                                                      + std::to_string(lp.num_columns()) + " columns");
    for (std::size_t j = 0; j < x.size(); ++j)
        if (!lp.free_columns.count(j) && x[j].sign() < 0)
            return false;
    for (const auto& c : lp.constraints)
        if (!c.holds(c.evaluate(x)))
            return false;
    return true;
}

/// Exact check of a rational entropy function against a program without extra columns.
inline bool verify_witness(const LinearProgram& lp, const RationalSetFunction& h)
{
    if (!lp.extra_columns.empty() || h.ground.size() != lp.ground.size())
        throw Error(ErrorKind::DimensionMismatch, "witness ground set does not match program");
    return verify_assignment(lp, h.values);
}

/// Floating-point check within `tol` (for entropy vectors of real distributions).
inline bool verify_witness(const LinearProgram& lp, const SetFunction& h, double tol = 1e-9)
{
    if (!lp.extra_columns.empty() || h.ground.size() != lp.ground.size())
        throw Error(ErrorKind::DimensionMismatch, "witness ground set does not match program");
    for (double v : h.values)
        if (v < -tol)
            return false;
    for (const auto& c : lp.constraints) {
        double lhs = 0;
        for (const auto& [j, a] : c.coefficients)
            lhs += a.to_double() * h.values.at(j);
        double rhs = c.rhs.to_double();
        switch (c.relation) {
        case Relation::GreaterEqual:
            if (lhs < rhs - tol)
                return false;
            break;
        case Relation::LessEqual:
            if (lhs > rhs + tol)
                return false;
            break;
        case Relation::Equal:
            if (std::abs(lhs - rhs) > tol)
                return false;
            break;
        }
    }
    return true;
}

/// Checks that the multipliers derive 0 >= positive from the rows.
inline bool verify_certificate(const LinearProgram& lp, const std::vector<Rational>& lambda)
{
    if (lambda.size() != lp.constraints.size())
        throw Error(ErrorKind::DimensionMismatch, "certificate length does not match row count");
    std::vector<Rational> combo(lp.num_columns());
    Rational bound;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        const auto& c = lp.constraints[i];
        if (lambda[i].is_zero())
            continue;
        if (c.relation != Relation::Equal && lambda[i].sign() < 0)
            return false;
        Rational m = lambda[i] * detail::oriented_sign(c.relation);
        for (const auto& [j, a] : c.coefficients)
            combo[j] += m * a;
        bound += m * c.rhs;
    }
    for (std::size_t j = 0; j < combo.size(); ++j) {
        if (lp.free_columns.count(j) ? !combo[j].is_zero() : combo[j].sign() > 0)
            return false;
    }
    return bound.sign() > 0;
}

/// For a minimization (or maximization) program: checks that the row
/// multipliers prove `bound` is a valid lower (upper) bound on the objective.
inline bool verify_dual_bound(const LinearProgram& lp, const std::vector<Rational>& lambda, const Rational& bound)
{
    if (!lp.objective || lambda.size() != lp.constraints.size())
        return false;
    Rational flip = lp.objective->sense == Sense::Minimize ? Rational(1) : Rational(-1);
    std::vector<Rational> combo(lp.num_columns());
    Rational b;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        const auto& c = lp.constraints[i];
        if (c.relation != Relation::Equal && lambda[i].sign() < 0)
            return false;
        Rational m = lambda[i] * detail::oriented_sign(c.relation);
        for (const auto& [j, a] : c.coefficients)
            combo[j] += m * a;
        b += m * c.rhs;
    }
    for (std::size_t j = 0; j < combo.size(); ++j) {
        Rational cj;
        if (auto it = lp.objective->coefficients.find(j); it != lp.objective->coefficients.end())
            cj = it->second * flip;
        if (lp.free_columns.count(j) ? combo[j] != cj : combo[j] > cj)
            return false;
    }
    return b * flip == bound;
}

/// Checks that `d` is a recession direction of the feasible region along
/// which the objective strictly improves.
inline bool verify_ray(const LinearProgram& lp, const std::vector<Rational>& d)
{
    if (!lp.objective || d.size() != lp.num_columns())
        return false;
    for (std::size_t j = 0; j < d.size(); ++j)
        if (!lp.free_columns.count(j) && d[j].sign() < 0)
            return false;
    for (const auto& c : lp.constraints) {
        int s = c.evaluate(d).sign();
        if ((c.relation == Relation::GreaterEqual && s < 0) || (c.relation == Relation::LessEqual && s > 0)
            || (c.relation == Relation::Equal && s != 0))
            return false;
    }
    Rational slope;
    for (const auto& [j, a] : lp.objective->coefficients)
        slope += a * d[j];
    return lp.objective->sense == Sense::Minimize ? slope.sign() < 0 : slope.sign() > 0;
}

} // namespace entbound
