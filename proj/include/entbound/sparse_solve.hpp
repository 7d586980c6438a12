#pragma once

// Exact solves with square sparse rational matrices and basis matrices of a
// standard form. Gaussian elimination picks the shortest remaining row and,
// inside it, the column with the fewest remaining entries.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "simplex.hpp"

namespace entbound::detail {

class SparseElimination {
public:
    /// rows[i] sorted by column; n x n. Throws DimensionMismatch if singular.
    static std::vector<Rational> solve(std::vector<SparseRow> rows, std::vector<Rational> rhs)
    {
        const std::size_t n = rows.size();
        std::vector<std::vector<std::uint32_t>> col_rows(n);
        std::vector<int> col_count(n, 0);
        for (std::size_t i = 0; i < n; ++i)
            for (const auto& e : rows[i]) {
                if (e.col >= n)
                    throw Error(ErrorKind::DimensionMismatch, "matrix is not square");
                col_rows[e.col].push_back(static_cast<std::uint32_t>(i));
                ++col_count[e.col];
            }
        std::vector<char> active(n, 1);
        std::vector<std::pair<std::uint32_t, std::uint32_t>> order;
        order.reserve(n);

        for (std::size_t step = 0; step < n; ++step) {
            std::size_t r = n;
            for (std::size_t i = 0; i < n; ++i)
                if (active[i] && (r == n || rows[i].size() < rows[r].size()))
                    r = i;
            if (rows[r].empty())
                throw Error(ErrorKind::DimensionMismatch, "singular matrix");
            const SparseEntry* piv = &rows[r].front();
            for (const auto& e : rows[r])
                if (col_count[e.col] < col_count[piv->col])
                    piv = &e;
            const std::uint32_t c = piv->col;
            const Rational p = piv->val;
            active[r] = 0;
            for (const auto& e : rows[r])
                --col_count[e.col];

            std::vector<std::uint32_t> touched;
            touched.swap(col_rows[c]);
            for (std::uint32_t i : touched) {
                if (!active[i])
                    continue;
                const Rational* a = find(rows[i], c);
                if (!a)
                    continue;
                Rational f = *a / p;
                rows[i] = subtract(rows[i], f, rows[r], col_rows, col_count, i);
                rhs[i] -= f * rhs[r];
            }
            order.push_back({static_cast<std::uint32_t>(r), c});
        }

        std::vector<Rational> z(n);
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const auto [r, c] = *it;
            Rational s = rhs[r];
            Rational p;
            for (const auto& e : rows[r]) {
                if (e.col == c)
                    p = e.val;
                else if (!z[e.col].is_zero())
                    s -= e.val * z[e.col];
            }
            z[c] = s / p;
        }
        return z;
    }

private:
    static const Rational* find(const SparseRow& row, std::uint32_t col)
    {
        auto it = std::lower_bound(row.begin(), row.end(), col,
                                   [](const SparseEntry& e, std::uint32_t c) { return e.col < c; });
        return it != row.end() && it->col == col ? &it->val : nullptr;
    }

    // row - f * pr; keeps the column bookkeeping of active rows current
    static SparseRow subtract(const SparseRow& row, const Rational& f, const SparseRow& pr,
                              std::vector<std::vector<std::uint32_t>>& col_rows, std::vector<int>& col_count,
                              std::uint32_t self)
    {
        SparseRow out;
        out.reserve(row.size() + pr.size());
        std::size_t a = 0, b = 0;
        while (a < row.size() || b < pr.size()) {
            if (b == pr.size() || (a < row.size() && row[a].col < pr[b].col)) {
                out.push_back(row[a++]);
            } else if (a == row.size() || pr[b].col < row[a].col) {
                out.push_back({pr[b].col, -(f * pr[b].val)});
                col_rows[pr[b].col].push_back(self);
                ++col_count[pr[b].col];
                ++b;
            } else {
                Rational v = row[a].val - f * pr[b].val;
                if (v.is_zero())
                    --col_count[row[a].col];
                else
                    out.push_back({row[a].col, std::move(v)});
                ++a;
                ++b;
            }
        }
        return out;
    }
};

/// Exact quantities attached to a basis of a standard form.
class BasisSystem {
public:
    BasisSystem(const StandardForm& sf, std::vector<std::uint32_t> basis) : sf_(sf), basis_(std::move(basis))
    {
        if (basis_.size() != sf_.rows.size())
            throw Error(ErrorKind::DimensionMismatch, "basis size differs from row count");
        pos_.assign(sf_.num_columns(), -1);
        for (std::size_t k = 0; k < basis_.size(); ++k) {
            if (pos_[basis_[k]] >= 0)
                throw Error(ErrorKind::DimensionMismatch, "repeated basis column");
            pos_[basis_[k]] = static_cast<int>(k);
        }
    }

    const std::vector<std::uint32_t>& basis() const { return basis_; }

    /// x_B with B x_B = rhs
    std::vector<Rational> primal() const { return SparseElimination::solve(basis_rows(), sf_.rhs); }

    /// y with B^T y = c_B
    std::vector<Rational> dual(const std::vector<Rational>& cost) const
    {
        std::vector<Rational> cb(basis_.size());
        for (std::size_t k = 0; k < basis_.size(); ++k)
            cb[k] = cost[basis_[k]];
        return SparseElimination::solve(basis_columns(), std::move(cb));
    }

    /// B z = column j of the form
    std::vector<Rational> column(std::uint32_t j) const
    {
        std::vector<Rational> a(sf_.rows.size());
        for (std::size_t i = 0; i < sf_.rows.size(); ++i) {
            if (sf_.unit[i] == j)
                a[i] = Rational(1);
            for (const auto& e : sf_.rows[i])
                if (e.col == j)
                    a[i] = e.val;
        }
        return SparseElimination::solve(basis_rows(), std::move(a));
    }

private:
    std::vector<SparseRow> basis_rows() const
    {
        std::vector<SparseRow> rows(sf_.rows.size());
        for (std::size_t i = 0; i < sf_.rows.size(); ++i) {
            auto& r = rows[i];
            if (int k = pos_[sf_.unit[i]]; k >= 0)
                r.push_back({static_cast<std::uint32_t>(k), Rational(1)});
            for (const auto& e : sf_.rows[i])
                if (int k = pos_[e.col]; k >= 0)
                    r.push_back({static_cast<std::uint32_t>(k), e.val});
            std::sort(r.begin(), r.end(), [](const SparseEntry& x, const SparseEntry& y) { return x.col < y.col; });
        }
        return rows;
    }

    std::vector<SparseRow> basis_columns() const
    {
        std::vector<SparseRow> cols(basis_.size());
        for (std::size_t i = 0; i < sf_.rows.size(); ++i) {
            if (int k = pos_[sf_.unit[i]]; k >= 0)
                cols[k].push_back({static_cast<std::uint32_t>(i), Rational(1)});
            for (const auto& e : sf_.rows[i])
                if (int k = pos_[e.col]; k >= 0)
                    cols[k].push_back({static_cast<std::uint32_t>(i), e.val});
        }
        return cols; // rows visited in order, so already sorted
    }

    const StandardForm& sf_;
    std::vector<std::uint32_t> basis_;
    std::vector<int> pos_;
};

} // namespace entbound::detail
