#pragma once

// Two-phase primal simplex over exact rationals with Bland's rule.
//
// The tableau keeps one sparse row per constraint over the nonbasic columns;
// basic columns are implicit unit vectors. Entering column: lowest index with
// negative reduced cost. Leaving row: minimum ratio, ties to the lowest basic
// column index. Bland's rule guarantees termination on degenerate programs.

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "lp.hpp"

namespace entbound {

struct SimplexOptions {
    std::size_t max_pivots = 10'000'000;
};

namespace detail {

enum class ColKind : std::uint8_t { Structural, Slack, Artificial };

struct SparseEntry {
    std::uint32_t col;
    Rational val;
};
using SparseRow = std::vector<SparseEntry>;

// min c.x, rows.x = rhs, x >= 0, rhs >= 0. Free program columns are split in
// two; "<=" rows get a slack, ">=" rows a surplus and an artificial, "=" rows an
// artificial. unit[i] is the column forming the identity start basis in row i.
struct StandardForm {
    std::vector<ColKind> kind;
    std::vector<std::pair<std::uint32_t, int>> origin; // program column and sign (structural only)
    std::vector<SparseRow> rows;
    std::vector<Rational> rhs;
    std::vector<int> flip; // row i of the form is flip[i] * (program row i) in "<=" or "=" reading
    std::vector<std::uint32_t> unit;

    std::size_t num_columns() const { return kind.size(); }

    explicit StandardForm(const LinearProgram& lp)
    {
        lp.validate();
        const std::size_t ncols = lp.num_columns();
        std::vector<std::pair<std::uint32_t, int>> map(ncols);
        for (std::size_t j = 0; j < ncols; ++j) {
            bool is_free = lp.free_columns.count(j) > 0;
            map[j] = {static_cast<std::uint32_t>(kind.size()), is_free ? 2 : 1};
            for (int k = 0; k < (is_free ? 2 : 1); ++k) {
                origin.push_back({static_cast<std::uint32_t>(j), k == 0 ? 1 : -1});
                kind.push_back(ColKind::Structural);
            }
        }
        const std::size_t m = lp.constraints.size();
        rows.resize(m);
        rhs.resize(m);
        flip.resize(m);
        unit.resize(m);
        std::vector<int> needs_artificial(m, 0);
        for (std::size_t i = 0; i < m; ++i) {
            const auto& c = lp.constraints[i];
            int f = c.relation == Relation::GreaterEqual ? -1 : 1;
            Rational b = c.rhs * f;
            Relation rel = c.relation == Relation::Equal ? Relation::Equal : Relation::LessEqual;
            if (b.sign() < 0) {
                f = -f;
                b = -b;
                if (rel == Relation::LessEqual)
                    rel = Relation::GreaterEqual;
            }
            flip[i] = f;
            rhs[i] = b;
            SparseRow row;
            for (const auto& [j, a] : c.coefficients) {
                if (a.is_zero())
                    continue;
                Rational v = a * f;
                row.push_back({map[j].first, v});
                if (map[j].second == 2)
                    row.push_back({map[j].first + 1, -v});
            }
            rows[i] = std::move(row);
            if (rel == Relation::LessEqual) {
                unit[i] = add_column(ColKind::Slack);
            } else {
                if (rel == Relation::GreaterEqual)
                    rows[i].push_back({add_column(ColKind::Slack), Rational(-1)});
                needs_artificial[i] = 1;
            }
        }
        for (std::size_t i = 0; i < m; ++i)
            if (needs_artificial[i])
                unit[i] = add_column(ColKind::Artificial);
    }

    std::vector<Rational> phase1_costs() const
    {
        std::vector<Rational> c(kind.size());
        for (std::size_t j = 0; j < kind.size(); ++j)
            if (kind[j] == ColKind::Artificial)
                c[j] = Rational(1);
        return c;
    }

    std::vector<Rational> phase2_costs(const LinearProgram& lp) const
    {
        std::vector<Rational> c(kind.size());
        const auto& obj = *lp.objective;
        for (std::size_t j = 0; j < kind.size(); ++j) {
            if (kind[j] != ColKind::Structural)
                continue;
            auto it = obj.coefficients.find(origin[j].first);
            if (it == obj.coefficients.end())
                continue;
            Rational v = it->second * origin[j].second;
            c[j] = obj.sense == Sense::Minimize ? v : -v;
        }
        return c;
    }

    /// Values of the form's columns back to program columns.
    std::vector<Rational> program_values(const LinearProgram& lp, const std::vector<std::uint32_t>& basis,
                                         const std::vector<Rational>& xb) const
    {
        std::vector<Rational> x(lp.num_columns());
        for (std::size_t i = 0; i < basis.size(); ++i) {
            std::uint32_t b = basis[i];
            if (kind[b] != ColKind::Structural || xb[i].is_zero())
                continue;
            const auto& [orig, sgn] = origin[b];
            if (sgn > 0)
                x[orig] += xb[i];
            else
                x[orig] -= xb[i];
        }
        return x;
    }

    /// Per-row duals y of the form to multipliers on program rows in ">=" reading.
    std::vector<Rational> program_multipliers(const LinearProgram& lp, const std::vector<Rational>& y) const
    {
        std::vector<Rational> lambda(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) {
            Rational mu = flip[i] > 0 ? y[i] : -y[i];
            lambda[i] = lp.constraints[i].relation == Relation::LessEqual ? -mu : mu;
        }
        return lambda;
    }

    /// A direction in form columns back to program columns.
    std::vector<Rational> program_direction(const LinearProgram& lp, const std::vector<Rational>& d) const
    {
        std::vector<Rational> x(lp.num_columns());
        for (std::size_t j = 0; j < d.size(); ++j) {
            if (kind[j] != ColKind::Structural || d[j].is_zero())
                continue;
            const auto& [orig, sgn] = origin[j];
            if (sgn > 0)
                x[orig] += d[j];
            else
                x[orig] -= d[j];
        }
        return x;
    }

private:
    std::uint32_t add_column(ColKind k)
    {
        kind.push_back(k);
        origin.push_back({std::numeric_limits<std::uint32_t>::max(), 0});
        return static_cast<std::uint32_t>(kind.size() - 1);
    }
};

class TableauSimplex {
    using Entry = SparseEntry;
    using Row = SparseRow;

public:
    TableauSimplex(const LinearProgram& lp, SimplexOptions opts) : lp_(lp), sf_(lp), opts_(opts)
    {
        rows_ = sf_.rows;
        rhs_ = sf_.rhs;
        const std::size_t m = rows_.size();
        basis_ = sf_.unit;
        basic_row_.assign(sf_.num_columns(), -1);
        for (std::size_t i = 0; i < m; ++i)
            basic_row_[basis_[i]] = static_cast<int>(i);
        reduced_.assign(sf_.num_columns(), Rational());
        cost_.assign(sf_.num_columns(), Rational());
    }

    LpOutcome solve()
    {
        LpOutcome out;
        cost_ = sf_.phase1_costs();
        recompute_reduced_costs();
        run();
        if (objective_value_.sign() > 0) {
            out.status = LpStatus::Infeasible;
            out.certificate = sf_.program_multipliers(lp_, duals());
            out.pivots = pivots_;
            return out;
        }
        drive_out_artificials();
        banned_artificials_ = true;
        if (lp_.objective) {
            cost_ = sf_.phase2_costs(lp_);
            recompute_reduced_costs();
            if (!run()) {
                out.status = LpStatus::Unbounded;
                out.witness = sf_.program_values(lp_, basis_, rhs_);
                out.ray = sf_.program_direction(lp_, ray());
                out.pivots = pivots_;
                return out;
            }
        }
        out.status = LpStatus::Feasible;
        out.witness = sf_.program_values(lp_, basis_, rhs_);
        if (lp_.objective) {
            Rational v = objective_value_;
            out.optimum = lp_.objective->sense == Sense::Minimize ? v : -v;
            out.dual = sf_.program_multipliers(lp_, duals());
        }
        out.pivots = pivots_;
        return out;
    }

private:
    using ColKind = detail::ColKind;

    void recompute_reduced_costs()
    {
        reduced_ = cost_;
        objective_value_ = Rational();
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const Rational& cb = cost_[basis_[i]];
            if (cb.is_zero())
                continue;
            for (const auto& e : rows_[i])
                reduced_[e.col] -= cb * e.val;
            objective_value_ += cb * rhs_[i];
        }
        for (std::uint32_t b : basis_)
            reduced_[b] = Rational();
    }

    const Rational* find(const Row& row, std::uint32_t col) const
    {
        auto it = std::lower_bound(row.begin(), row.end(), col, [](const Entry& e, std::uint32_t c) { return e.col < c; });
        if (it != row.end() && it->col == col)
            return &it->val;
        return nullptr;
    }

    bool may_enter(std::size_t j) const
    {
        return basic_row_[j] < 0 && !(banned_artificials_ && sf_.kind[j] == ColKind::Artificial);
    }

    // Returns false if the program is unbounded.
    bool run()
    {
        for (;;) {
            std::size_t enter = sf_.num_columns();
            for (std::size_t j = 0; j < sf_.num_columns(); ++j)
                if (may_enter(j) && reduced_[j].sign() < 0) {
                    enter = j;
                    break;
                }
            if (enter == sf_.num_columns())
                return true;
            int leave = -1;
            const Rational* best_coef = nullptr;
            for (std::size_t i = 0; i < rows_.size(); ++i) {
                const Rational* a = find(rows_[i], static_cast<std::uint32_t>(enter));
                if (!a || a->sign() <= 0)
                    continue;
                if (leave < 0) {
                    leave = static_cast<int>(i);
                    best_coef = a;
                    continue;
                }
                // compare rhs_i / a  with  rhs_leave / best_coef
                int c;
                if (rhs_[i].is_zero() || rhs_[leave].is_zero())
                    c = (rhs_[i].is_zero() ? 0 : 1) - (rhs_[leave].is_zero() ? 0 : 1);
                else {
                    auto cmp = rhs_[i] * *best_coef <=> rhs_[leave] * *a;
                    c = cmp < 0 ? -1 : (cmp > 0 ? 1 : 0);
                }
                if (c < 0 || (c == 0 && basis_[i] < basis_[leave])) {
                    leave = static_cast<int>(i);
                    best_coef = a;
                }
            }
            if (leave < 0) {
                unbounded_col_ = static_cast<std::uint32_t>(enter);
                return false;
            }
            pivot(static_cast<std::size_t>(leave), static_cast<std::uint32_t>(enter));
        }
    }

    void pivot(std::size_t r, std::uint32_t j)
    {
        if (++pivots_ > opts_.max_pivots)
            throw Error(ErrorKind::NumIterationsExceeded,
                        "simplex exceeded " + std::to_string(opts_.max_pivots) + " pivots");
        Row& prow = rows_[r];
        const Rational piv = *find(prow, j);
        const Rational inv = piv.reciprocal();
        const std::uint32_t leaving = basis_[r];

        // normalized pivot row, entering column dropped, leaving column made explicit
        Row pr;
        pr.reserve(prow.size() + 1);
        bool placed = false;
        for (auto& e : prow) {
            if (!placed && leaving < e.col) {
                pr.push_back({leaving, inv});
                placed = true;
            }
            if (e.col == j)
                continue;
            pr.push_back({e.col, e.val * inv});
        }
        if (!placed)
            pr.push_back({leaving, inv});
        rhs_[r] *= inv;

        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if (i == r)
                continue;
            const Rational* a = find(rows_[i], j);
            if (!a)
                continue;
            Rational f = *a;
            rows_[i] = axpy(rows_[i], f, pr, j);
            rhs_[i] -= f * rhs_[r];
        }
        if (!reduced_[j].is_zero()) {
            Rational f = reduced_[j];
            for (const auto& e : pr)
                reduced_[e.col] -= f * e.val;
            objective_value_ += f * rhs_[r];
            reduced_[j] = Rational();
        }
        prow = std::move(pr);
        basis_[r] = j;
        basic_row_[leaving] = -1;
        basic_row_[j] = static_cast<int>(r);
    }

    // row - f * pr, with column `drop` removed from row.
    static Row axpy(const Row& row, const Rational& f, const Row& pr, std::uint32_t drop)
    {
        Row out;
        out.reserve(row.size() + pr.size());
        std::size_t a = 0, b = 0;
        while (a < row.size() || b < pr.size()) {
            if (a < row.size() && row[a].col == drop) {
                ++a;
                continue;
            }
            if (b == pr.size() || (a < row.size() && row[a].col < pr[b].col)) {
                out.push_back(row[a++]);
            } else if (a == row.size() || pr[b].col < row[a].col) {
                out.push_back({pr[b].col, -(f * pr[b].val)});
                ++b;
            } else {
                Rational v = row[a].val - f * pr[b].val;
                if (!v.is_zero())
                    out.push_back({row[a].col, std::move(v)});
                ++a;
                ++b;
            }
        }
        return out;
    }

    void drive_out_artificials()
    {
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if (sf_.kind[basis_[i]] != ColKind::Artificial)
                continue;
            for (const auto& e : rows_[i])
                if (sf_.kind[e.col] != ColKind::Artificial) {
                    pivot(i, e.col);
                    break;
                }
        }
    }

    // y_i = c(u_i) - d(u_i)
    std::vector<Rational> duals() const
    {
        std::vector<Rational> y(rows_.size());
        for (std::size_t i = 0; i < rows_.size(); ++i)
            y[i] = cost_[sf_.unit[i]] - reduced_[sf_.unit[i]];
        return y;
    }

    std::vector<Rational> ray() const
    {
        std::vector<Rational> d(sf_.num_columns());
        d[unbounded_col_] = Rational(1);
        for (std::size_t i = 0; i < rows_.size(); ++i)
            if (const Rational* a = find(rows_[i], unbounded_col_))
                d[basis_[i]] = -*a;
        return d;
    }

    const LinearProgram& lp_;
    StandardForm sf_;
    SimplexOptions opts_;
    std::vector<Row> rows_;
    std::vector<Rational> rhs_;
    std::vector<std::uint32_t> basis_;
    std::vector<int> basic_row_;
    std::vector<Rational> cost_;
    std::vector<Rational> reduced_;
    Rational objective_value_;
    bool banned_artificials_ = false;
    std::size_t pivots_ = 0;
    std::uint32_t unbounded_col_ = 0;
};

} // namespace detail

/// Plain Bland's-rule solve over the whole program; results are unchecked.
inline LpOutcome exact_simplex(const LinearProgram& lp, SimplexOptions opts = {})
{
    return detail::TableauSimplex(lp, opts).solve();
}

} // namespace entbound
