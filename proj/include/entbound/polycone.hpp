#pragma once

// The Shannon outer cone (polymatroids) via elemental inequalities, plus the
// exact LP machinery that decides membership queries over it.

#include <cstddef>
#include <string>
#include <vector>

#include "lp.hpp"
#include "setfunction.hpp"
#include "solve.hpp"

namespace entbound {

inline constexpr std::size_t kDefaultLpGroundCap = 12;

/// Number of elemental inequalities on n variables: n + C(n,2) 2^(n-2).
inline std::size_t elemental_count(std::size_t n)
{
    if (n == 0)
        return 0;
    if (n == 1)
        return 1;
    return n + n * (n - 1) / 2 * (std::size_t{1} << (n - 2));
}

/// H(X_i | X_rest) >= 0 for every i, and I(X_i; X_j | X_K) >= 0 for i < j, K
/// ranging over subsets of the remaining variables. Coefficients are keyed by
/// LinearProgram subset columns (mask - 1).
inline std::vector<LinearConstraint> elemental_inequalities(std::size_t n, std::size_t cap = kDefaultLpGroundCap)
{
    if (n < 1 || n > cap)
        throw Error(ErrorKind::GroundSetTooLarge,
                    "elemental inequalities need 1 <= n <= " + std::to_string(cap) + ", got " + std::to_string(n));
    std::vector<LinearConstraint> rows;
    rows.reserve(elemental_count(n));
    const SubsetMask all = full_mask(n);
    auto add = [](LinearConstraint& c, SubsetMask m, int v) {
        if (m == 0)
            return;
        auto& slot = c.coefficients[LinearProgram::column_of(m)];
        slot += Rational(v);
        if (slot.is_zero())
            c.coefficients.erase(LinearProgram::column_of(m));
    };
    for (std::size_t i = 0; i < n; ++i) {
        LinearConstraint c;
        c.tag = "elemental";
        add(c, all, 1);
        add(c, all & ~(SubsetMask{1} << i), -1);
        rows.push_back(std::move(c));
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const SubsetMask a = SubsetMask{1} << i;
            const SubsetMask b = SubsetMask{1} << j;
            const SubsetMask rest = all & ~(a | b);
            // enumerate all subsets K of rest, including the empty set
            SubsetMask k = 0;
            do {
                LinearConstraint c;
                c.tag = "elemental";
                add(c, a | k, 1);
                add(c, b | k, 1);
                add(c, a | b | k, -1);
                add(c, k, -1);
                rows.push_back(std::move(c));
                k = (k - rest) & rest;
            } while (k != 0);
        }
    return rows;
}

/// A program whose ground set is `ground` and whose rows are the elemental inequalities.
inline LinearProgram polymatroid_program(std::vector<std::string> ground, std::size_t cap = kDefaultLpGroundCap)
{
    LinearProgram lp;
    lp.constraints = elemental_inequalities(ground.size(), cap);
    lp.ground = std::move(ground);
    return lp;
}

/// Exact polymatroid test: every elemental inequality holds.
inline bool is_polymatroid(const RationalSetFunction& h)
{
    auto rows = elemental_inequalities(h.size(), 20);
    for (const auto& r : rows)
        if (!r.holds(r.evaluate(h.values)))
            return false;
    return true;
}

} // namespace entbound
