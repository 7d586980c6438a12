#pragma once

// Finite joint distributions with exact rational masses, and the entropy
// measures computed from them (bits throughout).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "rational.hpp"
#include "setfunction.hpp"

namespace entbound {

/// Zero test for entropy values.
inline constexpr double kEntropyEps = 1e-9;

class EntropyMeasure {
public:
    enum class Kind { Shannon, Renyi, Tsallis };

    EntropyMeasure() = default;

    static EntropyMeasure shannon() { return {}; }
    static EntropyMeasure renyi(double alpha) { return EntropyMeasure(Kind::Renyi, alpha); }
    static EntropyMeasure tsallis(double q) { return EntropyMeasure(Kind::Tsallis, q); }

    Kind kind() const { return kind_; }
    double parameter() const { return param_; }

    std::string name() const
    {
        switch (kind_) {
        case Kind::Shannon: return "shannon";
        case Kind::Renyi: return "renyi(" + format(param_) + ")";
        case Kind::Tsallis: return "tsallis(" + format(param_) + ")";
        }
        return "?";
    }

    /// Entropy of a mass vector; zero masses are skipped.
    template <class Range>
    double of_masses(const Range& masses) const
    {
        double acc = 0;
        switch (kind_) {
        case Kind::Shannon:
            for (double p : masses)
                if (p > 0)
                    acc -= p * std::log2(p);
            return std::max(acc, 0.0);
        case Kind::Renyi:
            for (double p : masses)
                if (p > 0)
                    acc += std::pow(p, param_);
            return std::max(std::log2(acc) / (1 - param_), 0.0);
        case Kind::Tsallis:
            for (double p : masses)
                if (p > 0)
                    acc += std::pow(p, param_);
            return std::max((1 - acc) / (param_ - 1), 0.0);
        }
        return 0;
    }

    double binary(double p) const
    {
        if (!(p >= 0 && p <= 1))
            throw Error(ErrorKind::OutOfRange, "binary mass " + format(p) + " outside [0,1]");
        const double m[2] = {p, 1 - p};
        return of_masses(m);
    }

    /// The p in [0, 1/2] with binary(p) = v, by bisection to 1e-12.
    double invert_binary(double v) const
    {
        const double top = binary(0.5);
        if (!(v >= -1e-12 && v <= top + 1e-12))
            throw Error(ErrorKind::OutOfRange, "value " + format(v) + " outside [0, " + format(top) + "]");
        if (v <= 0)
            return 0;
        if (v >= top)
            return 0.5;
        double lo = 0, hi = 0.5;
        while (hi - lo > 1e-13) {
            double mid = 0.5 * (lo + hi);
            (binary(mid) < v ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

private:
    EntropyMeasure(Kind k, double param) : kind_(k), param_(param)
    {
        if (!(std::isfinite(param) && param > 0) || param == 1)
            throw Error(ErrorKind::InvalidMeasure, "order must be positive and different from 1");
    }

    static std::string format(double v)
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", v);
        return buf;
    }

    Kind kind_ = Kind::Shannon;
    double param_ = 1;
};

inline double binary_entropy(double p) { return EntropyMeasure::shannon().binary(p); }
inline double invert_binary_entropy(double v) { return EntropyMeasure::shannon().invert_binary(v); }

/// An outcome: one symbol index per variable.
using Outcome = std::vector<std::uint32_t>;

class JointDistribution {
public:
    JointDistribution() = default;

    /// Validates everything; see joint_from_table for the error kinds.
    JointDistribution(std::vector<std::string> variables, std::vector<std::vector<std::string>> alphabets,
                      std::map<Outcome, Rational> pmf)
        : variables_(std::move(variables)), alphabets_(std::move(alphabets)), pmf_(std::move(pmf))
    {
        if (variables_.empty())
            throw Error(ErrorKind::UnknownVariable, "a distribution needs at least one variable");
        if (alphabets_.size() != variables_.size())
            throw Error(ErrorKind::UnknownSymbol, "one alphabet per variable is required");
        std::set<std::string> seen;
        for (const auto& v : variables_)
            if (!seen.insert(v).second)
                throw Error(ErrorKind::ParseError, "variable '" + v + "' declared twice");
        for (std::size_t k = 0; k < alphabets_.size(); ++k) {
            std::set<std::string> syms(alphabets_[k].begin(), alphabets_[k].end());
            if (syms.size() != alphabets_[k].size())
                throw Error(ErrorKind::ParseError, "alphabet of '" + variables_[k] + "' repeats a symbol");
        }
        if (pmf_.empty())
            throw Error(ErrorKind::NonUnitMass, "empty pmf");
        Rational total;
        for (const auto& [o, p] : pmf_) {
            if (o.size() != variables_.size())
                throw Error(ErrorKind::UnknownSymbol, "outcome has " + std::to_string(o.size()) + " symbols, expected "
                                                          + std::to_string(variables_.size()));
            for (std::size_t k = 0; k < o.size(); ++k)
                if (o[k] >= alphabets_[k].size())
                    throw Error(ErrorKind::UnknownSymbol, "symbol index out of range for '" + variables_[k] + "'");
            if (p.sign() < 0)
                throw Error(ErrorKind::NegativeProbability, "probability " + p.str());
            if (p.is_zero())
                throw Error(ErrorKind::NegativeProbability, "zero-probability outcomes are not stored");
            total += p;
        }
        if (total != Rational(1))
            throw Error(ErrorKind::NonUnitMass, "probabilities sum to " + total.str());
    }

    const std::vector<std::string>& variables() const { return variables_; }
    const std::vector<std::vector<std::string>>& alphabets() const { return alphabets_; }
    const std::map<Outcome, Rational>& pmf() const { return pmf_; }
    std::size_t support_size() const { return pmf_.size(); }

    std::size_t index_of(const std::string& name) const
    {
        auto it = std::find(variables_.begin(), variables_.end(), name);
        if (it == variables_.end())
            throw Error(ErrorKind::UnknownVariable, "'" + name + "' is not a variable of this distribution");
        return static_cast<std::size_t>(it - variables_.begin());
    }

    std::vector<std::size_t> indices_of(const std::vector<std::string>& names) const
    {
        std::vector<std::size_t> out;
        for (const auto& n : names) {
            std::size_t k = index_of(n);
            if (std::find(out.begin(), out.end(), k) == out.end())
                out.push_back(k);
        }
        return out;
    }

    const std::string& symbol(std::size_t var, std::uint32_t idx) const { return alphabets_.at(var).at(idx); }

    /// Masses of the marginal on the given variable indices.
    std::map<Outcome, Rational> marginal(const std::vector<std::size_t>& vars) const
    {
        std::map<Outcome, Rational> out;
        Outcome key(vars.size());
        for (const auto& [o, p] : pmf_) {
            for (std::size_t k = 0; k < vars.size(); ++k)
                key[k] = o[vars[k]];
            out[key] += p;
        }
        return out;
    }

    friend bool operator==(const JointDistribution&, const JointDistribution&) = default;

private:
    std::vector<std::string> variables_;
    std::vector<std::vector<std::string>> alphabets_;
    std::map<Outcome, Rational> pmf_;
};

struct TableEntry {
    std::vector<std::string> outcome;
    Rational p;
};

/// Builds a validated distribution from symbol-level entries.
/// Errors: NonUnitMass, NegativeProbability, UnknownSymbol, DuplicateOutcome.
inline JointDistribution joint_from_table(std::vector<std::string> names, std::vector<std::vector<std::string>> alphabets,
                                          const std::vector<TableEntry>& entries)
{
    if (entries.empty())
        throw Error(ErrorKind::NonUnitMass, "no entries");
    if (alphabets.size() != names.size())
        throw Error(ErrorKind::UnknownSymbol, "one alphabet per variable is required");
    std::vector<std::map<std::string, std::uint32_t>> lookup(names.size());
    for (std::size_t k = 0; k < names.size(); ++k)
        for (std::size_t s = 0; s < alphabets[k].size(); ++s)
            lookup[k][alphabets[k][s]] = static_cast<std::uint32_t>(s);
    std::map<Outcome, Rational> pmf;
    for (const auto& e : entries) {
        if (e.outcome.size() != names.size())
            throw Error(ErrorKind::UnknownSymbol, "outcome arity does not match variable count");
        Outcome o(names.size());
        for (std::size_t k = 0; k < names.size(); ++k) {
            auto it = lookup[k].find(e.outcome[k]);
            if (it == lookup[k].end())
                throw Error(ErrorKind::UnknownSymbol, "'" + e.outcome[k] + "' not in alphabet of '" + names[k] + "'");
            o[k] = it->second;
        }
        if (e.p.sign() < 0)
            throw Error(ErrorKind::NegativeProbability, "probability " + e.p.str());
        if (!pmf.emplace(o, e.p).second)
            throw Error(ErrorKind::DuplicateOutcome, "outcome listed twice");
    }
    return JointDistribution(std::move(names), std::move(alphabets), std::move(pmf));
}

inline JointDistribution marginalize(const JointDistribution& d, const std::vector<std::string>& vars)
{
    if (vars.empty())
        throw Error(ErrorKind::UnknownVariable, "empty variable subset");
    auto idx = d.indices_of(vars);
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> alpha;
    for (std::size_t k : idx) {
        names.push_back(d.variables()[k]);
        alpha.push_back(d.alphabets()[k]);
    }
    return JointDistribution(std::move(names), std::move(alpha), d.marginal(idx));
}

namespace detail {

inline std::vector<double> to_doubles(const std::map<Outcome, Rational>& m)
{
    std::vector<double> out;
    out.reserve(m.size());
    for (const auto& [o, p] : m)
        out.push_back(p.to_double());
    return out;
}

} // namespace detail

inline double entropy(const JointDistribution& d, const EntropyMeasure& m = {})
{
    return m.of_masses(detail::to_doubles(d.pmf()));
}

/// Entropy of the marginal on `vars` (0 for the empty set).
inline double entropy_of(const JointDistribution& d, const std::vector<std::string>& vars, const EntropyMeasure& m = {})
{
    if (vars.empty())
        return 0;
    return m.of_masses(detail::to_doubles(d.marginal(d.indices_of(vars))));
}

inline double conditional_entropy(const JointDistribution& d, const std::vector<std::string>& a,
                                  const std::vector<std::string>& b, const EntropyMeasure& m = {})
{
    if (a.empty())
        throw Error(ErrorKind::UnknownVariable, "conditioned set must be nonempty");
    std::vector<std::string> ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    return entropy_of(d, ab, m) - entropy_of(d, b, m);
}

/// Structural test on the support: the `given` symbols determine the `target` symbols.
inline bool is_function_of(const JointDistribution& d, const std::vector<std::string>& target,
                           const std::vector<std::string>& given)
{
    auto t = d.indices_of(target);
    auto g = d.indices_of(given);
    std::map<Outcome, Outcome> seen;
    Outcome kg(g.size()), kt(t.size());
    for (const auto& [o, p] : d.pmf()) {
        for (std::size_t k = 0; k < g.size(); ++k)
            kg[k] = o[g[k]];
        for (std::size_t k = 0; k < t.size(); ++k)
            kt[k] = o[t[k]];
        auto [it, fresh] = seen.emplace(kg, kt);
        if (!fresh && it->second != kt)
            return false;
    }
    return true;
}

inline constexpr std::size_t kDefaultEntropyGroundCap = 20;

/// h(mask) = entropy of the marginal on the ground variables selected by mask.
inline SetFunction entropy_vector(const JointDistribution& d, const std::vector<std::string>& ground,
                                  const EntropyMeasure& m = {}, std::size_t cap = kDefaultEntropyGroundCap)
{
    if (ground.size() > cap)
        throw Error(ErrorKind::GroundSetTooLarge,
                    std::to_string(ground.size()) + " variables exceed the cap of " + std::to_string(cap));
    std::vector<std::size_t> idx;
    for (const auto& g : ground)
        idx.push_back(d.index_of(g));
    SetFunction h(ground);
    for (SubsetMask mask = 1; mask <= full_mask(ground.size()); ++mask) {
        std::vector<std::size_t> vars;
        for (std::size_t k = 0; k < ground.size(); ++k)
            if (mask & (SubsetMask{1} << k))
                vars.push_back(idx[k]);
        h[mask] = m.of_masses(detail::to_doubles(d.marginal(vars)));
    }
    return h;
}

/// Exact Shannon entropy when every mass is a power of 1/2; nullopt otherwise.
template <class Masses>
std::optional<Rational> exact_shannon(const Masses& masses)
{
    Rational h;
    for (const auto& p : masses) {
        mpq_class q = p.to_mpq();
        if (q.get_num() != 1)
            return std::nullopt;
        const mpz_class& den = q.get_den();
        std::size_t bits = mpz_sizeinbase(den.get_mpz_t(), 2) - 1;
        if (mpz_scan1(den.get_mpz_t(), 0) != bits)
            return std::nullopt;
        h += p * Rational(static_cast<long long>(bits));
    }
    return h;
}

/// Shannon entropy vector as rationals. Exact when every marginal mass is a
/// power of 1/2; otherwise each value is rounded to a multiple of 2^-bits and
/// `exact` is cleared.
inline RationalSetFunction rational_entropy_vector(const JointDistribution& d, const std::vector<std::string>& ground,
                                                   bool& exact, int bits = 20)
{
    if (ground.size() > kDefaultEntropyGroundCap)
        throw Error(ErrorKind::GroundSetTooLarge, "ground set too large");
    std::vector<std::size_t> idx;
    for (const auto& g : ground)
        idx.push_back(d.index_of(g));
    exact = true;
    RationalSetFunction h(ground);
    for (SubsetMask mask = 1; mask <= full_mask(ground.size()); ++mask) {
        std::vector<std::size_t> vars;
        for (std::size_t k = 0; k < ground.size(); ++k)
            if (mask & (SubsetMask{1} << k))
                vars.push_back(idx[k]);
        auto marg = d.marginal(vars);
        std::vector<Rational> ps;
        for (const auto& [o, p] : marg)
            ps.push_back(p);
        if (auto e = exact_shannon(ps)) {
            h[mask] = *e;
        } else {
            exact = false;
            h[mask] = Rational::round_dyadic(EntropyMeasure::shannon().of_masses(detail::to_doubles(marg)), bits);
        }
    }
    return h;
}

} // namespace entbound
