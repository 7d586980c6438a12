#pragma once

// lp_solve: exact answers for feasibility and optimization programs.
//
// A floating-point simplex proposes a basis; the basic solution, the row
// duals and (if needed) an improving ray are then recomputed exactly and
// checked by substitution. Programs with many more rows than columns are
// attacked through their Farkas system or their dual, whose bases are only as
// large as the column count. If the proposal does not check out, the exact
// Bland's-rule tableau solves the program from scratch.

#include <cstdint>
#include <optional>
#include <vector>

#include "guide_simplex.hpp"
#include "simplex.hpp"
#include "sparse_solve.hpp"

namespace entbound {

enum class LpMethod {
    Auto,   // guided, falling back to the exact tableau
    Exact,  // exact tableau only
    Guided, // guided only; throws NumIterationsExceeded if the proposal fails
};

struct LpOptions {
    LpMethod method = LpMethod::Auto;
    SimplexOptions simplex;
    std::uint64_t seed = 0x5eed;
    std::size_t guide_iterations = 200'000;
};

namespace detail {

inline std::optional<LpOutcome> check_proposal(const LinearProgram& lp, const StandardForm& sf, const GuideResult& g,
                                               const std::vector<Rational>& c2_exact);

inline std::optional<LpOutcome> guided_direct(const LinearProgram& lp, const LpOptions& opts)
{
    StandardForm sf(lp);
    std::optional<std::vector<double>> c2;
    std::vector<Rational> c2_exact;
    if (lp.objective) {
        c2_exact = sf.phase2_costs(lp);
        std::vector<double> c(c2_exact.size());
        for (std::size_t j = 0; j < c.size(); ++j)
            c[j] = c2_exact[j].to_double();
        c2 = std::move(c);
    }
    // a proposal can fail the exact check when the perturbation hides a
    // degenerate vertex; retry with a different perturbation before giving up
    const double perturbation[] = {1e-7, 1e-9, 1e-5};
    for (int attempt = 0; attempt < 3; ++attempt) {
        GuideResult g = GuideSimplex(sf, c2, opts.seed + static_cast<std::uint64_t>(attempt),
                                     opts.guide_iterations, perturbation[attempt])
                            .run();
        if (g.status == GuideResult::Status::Failed)
            continue;
        if (auto out = check_proposal(lp, sf, g, c2_exact))
            return out;
    }
    return std::nullopt;
}

inline std::optional<LpOutcome> check_proposal(const LinearProgram& lp, const StandardForm& sf, const GuideResult& g,
                                               const std::vector<Rational>& c2_exact)
{
    try {
        BasisSystem bs(sf, g.basis);
        LpOutcome out;
        out.pivots = g.iterations;
        if (g.status == GuideResult::Status::Infeasible) {
            out.status = LpStatus::Infeasible;
            out.certificate = sf.program_multipliers(lp, bs.dual(sf.phase1_costs()));
            if (!verify_certificate(lp, out.certificate))
                return std::nullopt;
            return out;
        }
        std::vector<Rational> xb = bs.primal();
        out.witness = sf.program_values(lp, g.basis, xb);
        if (!verify_assignment(lp, out.witness))
            return std::nullopt;
        if (g.status == GuideResult::Status::Unbounded) {
            std::vector<Rational> z = bs.column(g.entering);
            std::vector<Rational> d(sf.num_columns());
            d[g.entering] = Rational(1);
            for (std::size_t k = 0; k < z.size(); ++k)
                d[g.basis[k]] -= z[k];
            out.status = LpStatus::Unbounded;
            out.ray = sf.program_direction(lp, d);
            if (!verify_ray(lp, out.ray))
                return std::nullopt;
            return out;
        }
        out.status = LpStatus::Feasible;
        if (lp.objective) {
            Rational v;
            for (const auto& [j, a] : lp.objective->coefficients)
                v += a * out.witness[j];
            out.optimum = v;
            out.dual = sf.program_multipliers(lp, bs.dual(c2_exact));
            if (!verify_dual_bound(lp, out.dual, v))
                return std::nullopt;
        }
        return out;
    } catch (const Error&) {
        return std::nullopt; // singular basis proposal
    }
}

// Rows of `lp` read as a'.x >= b' (a "<=" row is negated).
struct OrientedRows {
    std::vector<std::vector<std::pair<std::size_t, Rational>>> by_column; // column -> (row, a'_ij)
    std::vector<Rational> rhs;

    explicit OrientedRows(const LinearProgram& lp) : by_column(lp.num_columns()), rhs(lp.constraints.size())
    {
        for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
            const auto& c = lp.constraints[i];
            Rational s = c.relation == Relation::LessEqual ? Rational(-1) : Rational(1);
            for (const auto& [j, a] : c.coefficients)
                if (!a.is_zero())
                    by_column[j].push_back({i, a * s});
            rhs[i] = c.rhs * s;
        }
    }
};

// One column per row of `lp`; one ">=" row per column of `lp` reading
// -sum_i a'_ij y_i >= -c_j ("=" for free columns). Returns the row index
// used for each column of `lp` (or -1 when the column has no entries).
inline LinearProgram transposed_program(const LinearProgram& lp, const OrientedRows& o,
                                        const std::vector<Rational>& c, std::vector<long>& row_of_column)
{
    LinearProgram t;
    for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
        t.extra_columns.push_back("y" + std::to_string(i));
        if (lp.constraints[i].relation == Relation::Equal)
            t.free_columns.insert(i);
    }
    row_of_column.assign(lp.num_columns(), -1);
    for (std::size_t j = 0; j < lp.num_columns(); ++j) {
        if (o.by_column[j].empty())
            continue;
        LinearConstraint row;
        for (const auto& [i, a] : o.by_column[j])
            row.coefficients[i] = -a;
        row.relation = lp.free_columns.count(j) ? Relation::Equal : Relation::GreaterEqual;
        row.rhs = -c[j];
        row_of_column[j] = static_cast<long>(t.constraints.size());
        t.constraints.push_back(std::move(row));
    }
    return t;
}

inline std::optional<LpOutcome> solve_checked(const LinearProgram& lp, const LpOptions& opts);

// Feasibility through the Farkas system:  y >= 0 (free on "=" rows),
// a'^T y <= 0 (= 0 on free columns), b'.y = 1.
inline std::optional<LpOutcome> via_farkas(const LinearProgram& lp, const OrientedRows& o, const LpOptions& opts)
{
    std::vector<long> row_of;
    LinearProgram f = transposed_program(lp, o, std::vector<Rational>(lp.num_columns()), row_of);
    LinearConstraint norm;
    for (std::size_t i = 0; i < o.rhs.size(); ++i)
        if (!o.rhs[i].is_zero())
            norm.coefficients[i] = o.rhs[i];
    LpOutcome out;
    if (norm.coefficients.empty()) {
        out.status = LpStatus::Feasible;
        out.witness.assign(lp.num_columns(), Rational());
        return out;
    }
    norm.relation = Relation::Equal;
    norm.rhs = Rational(1);
    f.constraints.push_back(std::move(norm));
    auto fr = solve_checked(f, opts);
    if (!fr)
        return std::nullopt;
    out.pivots = fr->pivots;
    if (fr->status == LpStatus::Feasible) {
        out.status = LpStatus::Infeasible;
        out.certificate = fr->witness;
        return out;
    }
    const Rational mu0 = fr->certificate.back();
    if (mu0.sign() <= 0)
        return std::nullopt;
    out.status = LpStatus::Feasible;
    out.witness.assign(lp.num_columns(), Rational());
    for (std::size_t j = 0; j < lp.num_columns(); ++j)
        if (row_of[j] >= 0)
            out.witness[j] = fr->certificate[static_cast<std::size_t>(row_of[j])] / mu0;
    return out;
}

// Optimization through the dual:  max b'.y  subject to  a'^T y <= c.
inline std::optional<LpOutcome> via_dual(const LinearProgram& lp, const OrientedRows& o, const LpOptions& opts)
{
    const auto& obj = *lp.objective;
    const Rational sigma = obj.sense == Sense::Minimize ? Rational(1) : Rational(-1);
    std::vector<Rational> c(lp.num_columns());
    for (const auto& [j, a] : obj.coefficients)
        c[j] = a * sigma;
    bool dual_infeasible = false;
    for (std::size_t j = 0; j < lp.num_columns(); ++j)
        if (o.by_column[j].empty() && (lp.free_columns.count(j) ? !c[j].is_zero() : c[j].sign() < 0))
            dual_infeasible = true;
    if (!dual_infeasible) {
        std::vector<long> row_of;
        LinearProgram d = transposed_program(lp, o, c, row_of);
        Objective dobj;
        dobj.sense = Sense::Maximize;
        for (std::size_t i = 0; i < o.rhs.size(); ++i)
            if (!o.rhs[i].is_zero())
                dobj.coefficients[i] = o.rhs[i];
        d.objective = std::move(dobj);
        if (d.constraints.empty())
            return std::nullopt;
        auto dr = solve_checked(d, opts);
        if (!dr)
            return std::nullopt;
        if (dr->status == LpStatus::Feasible) {
            LpOutcome out;
            out.status = LpStatus::Feasible;
            out.pivots = dr->pivots;
            out.witness.assign(lp.num_columns(), Rational());
            for (std::size_t j = 0; j < lp.num_columns(); ++j)
                if (row_of[j] >= 0)
                    out.witness[j] = dr->dual[static_cast<std::size_t>(row_of[j])];
            out.optimum = *dr->optimum * sigma;
            out.dual = dr->witness;
            return out;
        }
        if (dr->status == LpStatus::Unbounded)
            return via_farkas(lp, o, opts); // no primal point at all
    }
    // dual infeasible: primal is infeasible or unbounded
    auto fr = via_farkas(lp, o, opts);
    if (!fr || fr->status == LpStatus::Infeasible)
        return fr;
    return std::nullopt; // feasible and unbounded: a ray is needed, solve directly
}

inline bool checks_out(const LinearProgram& lp, const LpOutcome& out)
{
    switch (out.status) {
    case LpStatus::Infeasible: return verify_certificate(lp, out.certificate);
    case LpStatus::Unbounded: return verify_assignment(lp, out.witness) && verify_ray(lp, out.ray);
    case LpStatus::Feasible:
        if (!verify_assignment(lp, out.witness))
            return false;
        return !lp.objective || (out.optimum && verify_dual_bound(lp, out.dual, *out.optimum));
    }
    return false;
}

inline constexpr std::size_t kGuideRowCap = 4096;

inline bool prefer_transposed(const LinearProgram& lp)
{
    return lp.constraints.size() > 2 * lp.num_columns() + 16;
}

inline std::optional<LpOutcome> solve_checked(const LinearProgram& lp, const LpOptions& opts)
{
    std::optional<LpOutcome> out;
    if (opts.method != LpMethod::Exact) {
        if (prefer_transposed(lp)) {
            OrientedRows o(lp);
            out = lp.objective ? via_dual(lp, o, opts) : via_farkas(lp, o, opts);
        }
        // the guide keeps a dense inverse of the basis
        if ((!out || !checks_out(lp, *out)) && lp.constraints.size() <= kGuideRowCap)
            out = guided_direct(lp, opts);
        if (out && !checks_out(lp, *out))
            out.reset();
    }
    if (!out && opts.method != LpMethod::Guided) {
        out = exact_simplex(lp, opts.simplex);
        if (!checks_out(lp, *out))
            out.reset();
    }
    return out;
}

} // namespace detail

/// Solves `lp` exactly. Every answer comes with evidence that has been
/// checked by substitution: a witness (and dual multipliers proving the
/// optimum), a Farkas certificate, or a witness plus an improving ray.
inline LpOutcome lp_solve(const LinearProgram& lp, const LpOptions& opts = {})
{
    lp.validate();
    auto out = detail::solve_checked(lp, opts);
    if (!out) {
        if (opts.method == LpMethod::Guided)
            throw Error(ErrorKind::NumIterationsExceeded, "guided simplex did not produce a checkable answer");
        throw Error(ErrorKind::MalformedProgram, "internal: simplex result failed verification");
    }
    return *out;
}

} // namespace entbound
