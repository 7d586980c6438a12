#pragma once

// Floating-point revised simplex used only to pick a basis. Nothing it
// reports is trusted: the caller recomputes the basic solution in exact
// arithmetic and checks it by substitution.
//
// Dense explicit inverse (row-major, updated only on rows the entering column
// touches), refactored through a sparse LU every so often; Devex pricing;
// Harris ratio test; right-hand sides perturbed by small random amounts so
// degenerate vertices do not stall the search.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "simplex.hpp"

namespace entbound::detail {

struct GuideResult {
    enum class Status { Optimal, Infeasible, Unbounded, Failed };
    Status status = Status::Failed;
    std::vector<std::uint32_t> basis;
    std::uint32_t entering = 0; // Unbounded: the improving column
    std::size_t iterations = 0;
};

class GuideSimplex {
    using Column = std::vector<std::pair<std::uint32_t, double>>;
    using Inverse = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

public:
    GuideSimplex(const StandardForm& sf, std::optional<std::vector<double>> cost, std::uint64_t seed,
                 std::size_t max_iterations, double perturbation = 1e-7)
        : sf_(sf), phase2_(std::move(cost)), rng_(seed), max_iterations_(max_iterations)
    {
        m_ = sf.rows.size();
        n_ = sf.num_columns();
        cols_.resize(n_);
        for (std::size_t i = 0; i < m_; ++i) {
            cols_[sf.unit[i]].push_back({static_cast<std::uint32_t>(i), 1.0});
            for (const auto& e : sf.rows[i])
                cols_[e.col].push_back({static_cast<std::uint32_t>(i), e.val.to_double()});
        }
        b_ = Eigen::VectorXd(static_cast<Eigen::Index>(m_));
        for (std::size_t i = 0; i < m_; ++i)
            b_[i] = sf.rhs[i].to_double();
        basis_ = sf.unit;
        pos_.assign(n_, -1);
        for (std::size_t i = 0; i < m_; ++i)
            pos_[basis_[i]] = static_cast<int>(i);
        std::uniform_real_distribution<double> u(1.0, 2.0);
        bp_ = b_;
        for (std::size_t i = 0; i < m_; ++i)
            bp_[i] += u(rng_) * perturbation * (1 + std::abs(b_[i]));
    }

    GuideResult run()
    {
        GuideResult out;
        if (!refactor())
            return out;
        std::vector<double> c1(n_, 0.0);
        for (std::size_t j = 0; j < n_; ++j)
            if (sf_.kind[j] == ColKind::Artificial)
                c1[j] = 1.0;
        auto st = iterate(c1);
        out.iterations = iterations_;
        if (st != Step::Optimal || !refactor())
            return out;
        Eigen::VectorXd xt = binv_ * b_;
        double w = 0, bmax = 1;
        for (std::size_t i = 0; i < m_; ++i) {
            if (sf_.kind[basis_[i]] == ColKind::Artificial)
                w += xt[i];
            bmax = std::max(bmax, std::abs(b_[i]));
        }
        if (w > 1e-6 * bmax) {
            out.status = GuideResult::Status::Infeasible;
            out.basis = basis_;
            return out;
        }
        drive_out_artificials();
        banned_ = true;
        if (broken_)
            return out;
        if (phase2_) {
            st = iterate(*phase2_);
            out.iterations = iterations_;
            if (st == Step::Failed)
                return out;
            if (st == Step::Unbounded) {
                out.status = GuideResult::Status::Unbounded;
                out.entering = entering_;
                out.basis = basis_;
                return out;
            }
        }
        out.status = GuideResult::Status::Optimal;
        out.basis = basis_;
        return out;
    }

private:
    static constexpr double kPivotTol = 1e-9;
    static constexpr double kCostTol = 1e-9;
    static constexpr double kPrimalTol = 1e-9;
    static constexpr double kDropTol = 1e-14;
    static constexpr std::size_t kRefactorEvery = 200;

    enum class Step { Optimal, Unbounded, Failed };

    bool refactor()
    {
        const auto m = static_cast<Eigen::Index>(m_);
        Eigen::SparseMatrix<double> B(m, m);
        std::vector<Eigen::Triplet<double>> t;
        for (std::size_t k = 0; k < m_; ++k)
            for (const auto& [i, v] : cols_[basis_[k]])
                t.emplace_back(static_cast<int>(i), static_cast<int>(k), v);
        B.setFromTriplets(t.begin(), t.end());
        B.makeCompressed();
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(B);
        if (lu.info() != Eigen::Success)
            return false;
        Eigen::MatrixXd inv = lu.solve(Eigen::MatrixXd::Identity(m, m));
        if (lu.info() != Eigen::Success || !inv.allFinite())
            return false;
        binv_ = inv;
        xb_ = binv_ * bp_;
        since_refactor_ = 0;
        return true;
    }

    // B^-1 a_j
    Eigen::VectorXd column_image(std::uint32_t j) const
    {
        Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
        for (const auto& [i, v] : cols_[j])
            a += v * binv_.col(i);
        return a;
    }

    double dot(const Eigen::RowVectorXd& row, std::size_t j) const
    {
        double s = 0;
        for (const auto& [i, v] : cols_[j])
            s += row[i] * v;
        return s;
    }

    void pivot(std::size_t r, std::uint32_t q, const Eigen::VectorXd& alpha)
    {
        const double ar = alpha[r];
        const double theta = xb_[r] / ar;
        xb_ -= theta * alpha;
        xb_[r] = theta;
        Eigen::RowVectorXd prow = binv_.row(r) / ar;

        // Devex reference weights, updated along the pivot row
        if (!weights_.empty()) {
            const double wq = std::max(weights_[q], 1.0);
            for (std::size_t j = 0; j < n_; ++j) {
                if (pos_[j] >= 0 || j == q)
                    continue;
                double arj = dot(prow, j);
                if (arj != 0)
                    weights_[j] = std::max(weights_[j], arj * arj * wq);
            }
            weights_[basis_[r]] = std::max(wq / (ar * ar), 1.0);
        }

        for (std::size_t i = 0; i < m_; ++i)
            if (i != r && std::abs(alpha[i]) > kDropTol)
                binv_.row(i) -= alpha[i] * prow;
        binv_.row(r) = prow;
        pos_[basis_[r]] = -1;
        basis_[r] = q;
        pos_[q] = static_cast<int>(r);
        ++iterations_;
        if (++since_refactor_ >= kRefactorEvery && !refactor())
            broken_ = true;
    }

    Step iterate(const std::vector<double>& cost)
    {
        weights_.assign(n_, 1.0);
        for (;;) {
            if (broken_ || iterations_ > max_iterations_)
                return Step::Failed;
            Eigen::RowVectorXd y = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(m_));
            for (std::size_t i = 0; i < m_; ++i)
                if (double c = cost[basis_[i]]; c != 0)
                    y += c * binv_.row(i);
            std::uint32_t enter = 0;
            double best = 0;
            bool found = false;
            for (std::size_t j = 0; j < n_; ++j) {
                if (pos_[j] >= 0 || (banned_ && sf_.kind[j] == ColKind::Artificial))
                    continue;
                double d = cost[j] - dot(y, j);
                if (d >= -kCostTol)
                    continue;
                double score = d * d / weights_[j];
                if (!found || score > best) {
                    best = score;
                    enter = static_cast<std::uint32_t>(j);
                    found = true;
                }
            }
            if (!found)
                return Step::Optimal;
            Eigen::VectorXd alpha = column_image(enter);
            // Harris: loosest bound first, then the largest pivot inside it
            double bound = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m_; ++i)
                if (alpha[i] > kPivotTol)
                    bound = std::min(bound, (std::max(xb_[i], 0.0) + kPrimalTol) / alpha[i]);
            if (!std::isfinite(bound)) {
                entering_ = enter;
                return Step::Unbounded;
            }
            std::size_t leave = m_;
            for (std::size_t i = 0; i < m_; ++i)
                if (alpha[i] > kPivotTol && std::max(xb_[i], 0.0) / alpha[i] <= bound
                    && (leave == m_ || alpha[i] > alpha[leave]))
                    leave = i;
            pivot(leave, enter, alpha);
        }
    }

    void drive_out_artificials()
    {
        weights_.clear();
        for (std::size_t r = 0; r < m_ && !broken_; ++r) {
            if (sf_.kind[basis_[r]] != ColKind::Artificial)
                continue;
            Eigen::RowVectorXd row = binv_.row(r);
            std::uint32_t best = 0;
            double mag = 1e-7;
            bool found = false;
            for (std::size_t j = 0; j < n_; ++j) {
                if (pos_[j] >= 0 || sf_.kind[j] == ColKind::Artificial)
                    continue;
                double v = std::abs(dot(row, j));
                if (v > mag) {
                    mag = v;
                    best = static_cast<std::uint32_t>(j);
                    found = true;
                }
            }
            if (found)
                pivot(r, best, column_image(best));
        }
    }

    const StandardForm& sf_;
    std::optional<std::vector<double>> phase2_;
    std::mt19937_64 rng_;
    std::size_t max_iterations_;
    std::size_t m_ = 0, n_ = 0;
    std::vector<Column> cols_;
    Eigen::VectorXd b_, bp_, xb_;
    Inverse binv_;
    std::vector<double> weights_;
    std::vector<std::uint32_t> basis_;
    std::vector<int> pos_;
    bool banned_ = false;
    bool broken_ = false;
    std::size_t iterations_ = 0;
    std::size_t since_refactor_ = 0;
    std::uint32_t entering_ = 0;
};

} // namespace entbound::detail
