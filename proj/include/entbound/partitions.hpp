#pragma once

// Binary partition variables of a finite distribution, entropy oracles over
// them, and recovery of a distribution (scalar or vector) from such oracles.
//
// Atoms of the support are ranked by decreasing mass (ties keep pmf order);
// rank 1 is atom index 0. A label is a two-block partition of the atoms,
// stored as the block that leaves atom 0 out, as a bit mask over atoms.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "probdist.hpp"
#include "rational.hpp"

namespace entbound {

inline constexpr std::size_t kMaxPartitionSupport = 20;
inline constexpr std::size_t kDefaultRecoverySupportCap = 12;

struct PartitionLabel {
    std::uint32_t block = 0; // atoms in the block; never contains atom 0

    static PartitionLabel canonical(std::uint32_t block, std::size_t n)
    {
        const std::uint32_t all = n >= 32 ? ~0u : ((1u << n) - 1);
        block &= all;
        if (block == 0 || block == all)
            throw Error(ErrorKind::OutOfRange, "partition block must be a nonempty proper subset");
        return {(block & 1u) ? (all & ~block) : block};
    }

    bool contains(std::size_t atom) const { return (block >> atom) & 1u; }

    /// 1-based atom ranks, e.g. "{2,3}"
    std::string name() const
    {
        std::string s = "{";
        bool first = true;
        for (std::size_t k = 0; k < 32; ++k)
            if (contains(k)) {
                if (!first)
                    s += ",";
                s += std::to_string(k + 1);
                first = false;
            }
        return s + "}";
    }

    friend auto operator<=>(const PartitionLabel&, const PartitionLabel&) = default;
};

inline std::vector<PartitionLabel> enumerate_partitions(std::size_t n)
{
    if (n < 2)
        throw Error(ErrorKind::SupportTooSmall, "need at least two atoms, got " + std::to_string(n));
    if (n > kMaxPartitionSupport)
        throw Error(ErrorKind::SupportTooLarge, "support of " + std::to_string(n) + " atoms exceeds "
                                                   + std::to_string(kMaxPartitionSupport));
    std::vector<PartitionLabel> out;
    const std::uint32_t count = (1u << (n - 1)) - 1;
    out.reserve(count);
    for (std::uint32_t k = 1; k <= count; ++k)
        out.push_back({k << 1});
    return out;
}

/// Atom partition induced by a set of labels and coordinates: class id per atom.
class AtomClasses {
public:
    explicit AtomClasses(std::size_t n) : id_(n, 0), count_(n ? 1 : 0) {}

    template <class Key>
    void refine(const std::vector<Key>& key)
    {
        std::map<std::pair<std::uint32_t, Key>, std::uint32_t> fresh;
        for (std::size_t k = 0; k < id_.size(); ++k) {
            auto [it, ins] = fresh.emplace(std::pair{id_[k], key[k]}, static_cast<std::uint32_t>(fresh.size()));
            id_[k] = it->second;
        }
        count_ = fresh.size();
    }

    void refine_block(std::uint32_t block)
    {
        std::vector<std::uint32_t> key(id_.size());
        for (std::size_t k = 0; k < id_.size(); ++k)
            key[k] = (block >> k) & 1u;
        refine(key);
    }

    const std::vector<std::uint32_t>& ids() const { return id_; }
    std::size_t count() const { return count_; }

    template <class Masses>
    std::vector<double> class_masses(const Masses& atom_mass) const
    {
        std::vector<double> m(count_, 0.0);
        for (std::size_t k = 0; k < id_.size(); ++k)
            m[id_[k]] += atom_mass[k];
        return m;
    }

    /// true if `block` is constant on every class
    bool determines(std::uint32_t block) const
    {
        std::vector<int> side(count_, -1);
        for (std::size_t k = 0; k < id_.size(); ++k) {
            int b = static_cast<int>((block >> k) & 1u);
            int& s = side[id_[k]];
            if (s < 0)
                s = b;
            else if (s != b)
                return false;
        }
        return true;
    }

private:
    std::vector<std::uint32_t> id_;
    std::size_t count_;
};

/// The binary partition variables of a distribution (all of them, or a
/// selected subset).
class PartitionSystem {
public:
    PartitionSystem(JointDistribution base, std::optional<std::vector<PartitionLabel>> selected = std::nullopt)
        : base_(std::move(base))
    {
        std::vector<std::pair<Outcome, Rational>> atoms(base_.pmf().begin(), base_.pmf().end());
        std::stable_sort(atoms.begin(), atoms.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
        for (auto& [o, p] : atoms) {
            atoms_.push_back(o);
            mass_.push_back(p);
            mass_d_.push_back(p.to_double());
        }
        const std::size_t n = atoms_.size();
        if (!selected) {
            labels_ = enumerate_partitions(n);
            complete_ = enumerated_ = true;
        } else {
            if (n < 2)
                throw Error(ErrorKind::SupportTooSmall, "need at least two atoms");
            if (n > kMaxPartitionSupport)
                throw Error(ErrorKind::SupportTooLarge, "support too large for partition variables");
            for (const auto& l : *selected) {
                auto c = PartitionLabel::canonical(l.block, n);
                if (!index_.emplace(c.block, labels_.size()).second)
                    throw Error(ErrorKind::ParseError, "partition " + c.name() + " selected twice");
                labels_.push_back(c);
            }
            complete_ = labels_.size() == (std::size_t{1} << (n - 1)) - 1;
        }
    }

    const JointDistribution& base() const { return base_; }
    std::size_t support_size() const { return atoms_.size(); }
    std::size_t coordinates() const { return base_.variables().size(); }
    bool complete() const { return complete_; }
    const std::vector<PartitionLabel>& labels() const { return labels_; }
    const std::vector<Outcome>& atoms() const { return atoms_; }
    const std::vector<Rational>& masses() const { return mass_; }
    const std::vector<double>& masses_double() const { return mass_d_; }

    /// Index of a label among labels(), if present.
    std::optional<std::size_t> find(PartitionLabel l) const
    {
        if (enumerated_)
            return l.block >= 2 && (l.block & 1u) == 0 && (l.block >> 1) <= labels_.size()
                       ? std::optional<std::size_t>((l.block >> 1) - 1)
                       : std::nullopt;
        auto it = index_.find(l.block);
        if (it == index_.end())
            return std::nullopt;
        return it->second;
    }

    Rational block_mass(std::uint32_t block) const
    {
        Rational s;
        for (std::size_t k = 0; k < atoms_.size(); ++k)
            if ((block >> k) & 1u)
                s += mass_[k];
        return s;
    }

    /// Indicator label of the atom with index k.
    PartitionLabel indicator(std::size_t k) const
    {
        return PartitionLabel::canonical(1u << k, support_size());
    }

    AtomClasses classes(const std::vector<std::size_t>& labels, const std::vector<std::size_t>& coords) const
    {
        AtomClasses c(atoms_.size());
        for (std::size_t i : labels)
            c.refine_block(labels_.at(i).block);
        for (std::size_t m : coords) {
            if (m >= coordinates())
                throw Error(ErrorKind::OutOfRange, "coordinate " + std::to_string(m) + " out of range");
            std::vector<std::uint32_t> key(atoms_.size());
            for (std::size_t k = 0; k < atoms_.size(); ++k)
                key[k] = atoms_[k][m];
            c.refine(key);
        }
        return c;
    }

    /// H(A_l, l in labels, X_m, m in coords)
    double entropy(const std::vector<std::size_t>& labels, const std::vector<std::size_t>& coords,
                   const EntropyMeasure& m = {}) const
    {
        return m.of_masses(classes(labels, coords).class_masses(mass_d_));
    }

    /// Whether A_target is a function of the given labels and coordinates.
    bool determined(std::size_t target, const std::vector<std::size_t>& labels,
                    const std::vector<std::size_t>& coords) const
    {
        return classes(labels, coords).determines(labels_.at(target).block);
    }

    /// Base variables followed by one variable per label, valued by block.
    JointDistribution extended_distribution() const
    {
        auto vars = base_.variables();
        auto alpha = base_.alphabets();
        for (const auto& l : labels_) {
            vars.push_back("A" + l.name());
            alpha.push_back({"~" + l.name(), l.name()});
        }
        std::map<Outcome, Rational> pmf;
        for (std::size_t k = 0; k < atoms_.size(); ++k) {
            Outcome o = atoms_[k];
            for (const auto& l : labels_)
                o.push_back(l.contains(k) ? 1 : 0);
            pmf.emplace(std::move(o), mass_[k]);
        }
        return JointDistribution(std::move(vars), std::move(alpha), std::move(pmf));
    }

private:
    JointDistribution base_;
    std::vector<Outcome> atoms_;
    std::vector<Rational> mass_;
    std::vector<double> mass_d_;
    std::vector<PartitionLabel> labels_;
    bool complete_ = false;
    bool enumerated_ = false; // label i has block (i+1) << 1
    std::map<std::uint32_t, std::size_t> index_;
};

inline PartitionSystem build_partition_system(const JointDistribution& d,
                                              std::optional<std::vector<PartitionLabel>> selected = std::nullopt)
{
    return PartitionSystem(d, std::move(selected));
}

// ---------------------------------------------------------------- oracles

/// Joint entropies of opaque partition labels 0..L-1 together with
/// coordinates 0..M-1.
class EntropyOracle {
public:
    virtual ~EntropyOracle() = default;

    virtual std::size_t label_count() const = 0;
    virtual std::size_t coordinates() const = 0;
    /// H(B_l, l in delta, X*_m, m in tau) in bits; order and repeats do not matter
    virtual double query(const std::vector<std::size_t>& delta, const std::vector<std::size_t>& tau) const = 0;

    /// Exact answer to "is B_target a function of the given variables", when
    /// the oracle knows the structure behind its numbers.
    virtual std::optional<bool> determined(std::size_t, const std::vector<std::size_t>&,
                                           const std::vector<std::size_t>&) const
    {
        return std::nullopt;
    }

    virtual std::string coordinate_name(std::size_t m) const { return "X" + std::to_string(m + 1); }

    /// n with L = 2^(n-1) - 1
    std::size_t support_size() const
    {
        const std::size_t l = label_count() + 1;
        if (!std::has_single_bit(l))
            throw Error(ErrorKind::InconsistentOracle,
                        std::to_string(label_count()) + " labels is not of the form 2^(n-1)-1");
        return static_cast<std::size_t>(std::countr_zero(l)) + 1;
    }
};

/// Oracle backed by a partition system; labels optionally shuffled.
class SystemOracle : public EntropyOracle {
public:
    explicit SystemOracle(PartitionSystem system, EntropyMeasure measure = {},
                          std::optional<std::uint64_t> shuffle_seed = std::nullopt, bool structural = true)
        : sys_(std::move(system)), measure_(measure), structural_(structural)
    {
        perm_.resize(sys_.labels().size());
        std::iota(perm_.begin(), perm_.end(), std::size_t{0});
        if (shuffle_seed) {
            std::mt19937_64 rng(*shuffle_seed);
            std::shuffle(perm_.begin(), perm_.end(), rng);
        }
    }

    std::size_t label_count() const override { return perm_.size(); }
    std::size_t coordinates() const override { return sys_.coordinates(); }

    double query(const std::vector<std::size_t>& delta, const std::vector<std::size_t>& tau) const override
    {
        return sys_.entropy(map(delta), tau, measure_);
    }

    std::optional<bool> determined(std::size_t target, const std::vector<std::size_t>& delta,
                                   const std::vector<std::size_t>& tau) const override
    {
        if (!structural_)
            return std::nullopt;
        return sys_.determined(perm_.at(target), map(delta), tau);
    }

    std::string coordinate_name(std::size_t m) const override { return sys_.base().variables().at(m); }

    const PartitionSystem& system() const { return sys_; }
    /// system label behind oracle label i
    std::size_t system_label(std::size_t i) const { return perm_.at(i); }

private:
    std::vector<std::size_t> map(const std::vector<std::size_t>& delta) const
    {
        std::vector<std::size_t> out;
        out.reserve(delta.size());
        for (std::size_t i : delta)
            out.push_back(perm_.at(i));
        return out;
    }

    PartitionSystem sys_;
    EntropyMeasure measure_;
    bool structural_;
    std::vector<std::size_t> perm_;
};

struct OracleEntry {
    std::vector<std::size_t> delta;
    std::vector<std::size_t> tau;
    double h = 0;
};

namespace detail {

inline std::vector<std::size_t> sorted_unique(std::vector<std::size_t> v)
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

} // namespace detail

/// Oracle answering from a finite table of recorded queries.
class TableOracle : public EntropyOracle {
public:
    TableOracle(std::vector<std::string> labels, std::vector<std::string> coordinate_names,
                const std::vector<OracleEntry>& entries)
        : labels_(std::move(labels)), coords_(std::move(coordinate_names))
    {
        for (const auto& e : entries) {
            auto d = detail::sorted_unique(e.delta);
            auto t = detail::sorted_unique(e.tau);
            if ((!d.empty() && d.back() >= labels_.size()) || (!t.empty() && t.back() >= coords_.size()))
                throw Error(ErrorKind::DanglingReference, "oracle entry refers to an unknown label or coordinate");
            if (!std::isfinite(e.h) || e.h < -kEntropyEps)
                throw Error(ErrorKind::InconsistentOracle, "oracle entry with invalid entropy");
            auto [it, ins] = table_.emplace(std::pair{std::move(d), std::move(t)}, e.h);
            if (!ins && std::abs(it->second - e.h) > kEntropyEps)
                throw Error(ErrorKind::InconsistentOracle, "conflicting entries for one query");
        }
    }

    std::size_t label_count() const override { return labels_.size(); }
    std::size_t coordinates() const override { return coords_.size(); }
    std::string coordinate_name(std::size_t m) const override { return coords_.at(m); }
    const std::vector<std::string>& labels() const { return labels_; }

    double query(const std::vector<std::size_t>& delta, const std::vector<std::size_t>& tau) const override
    {
        auto d = detail::sorted_unique(delta);
        auto t = detail::sorted_unique(tau);
        if (d.empty() && t.empty())
            return 0;
        auto it = table_.find({d, t});
        if (it == table_.end())
            throw Error(ErrorKind::InconsistentOracle, "oracle has no entry for the requested query");
        return it->second;
    }

    std::vector<OracleEntry> entries() const
    {
        std::vector<OracleEntry> out;
        for (const auto& [k, h] : table_)
            out.push_back({k.first, k.second, h});
        return out;
    }

private:
    std::vector<std::string> labels_;
    std::vector<std::string> coords_;
    std::map<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>, double> table_;
};

/// Forwards numeric queries and keeps every answer. Structural answers are
/// deliberately not forwarded, so the recording is enough to replay a run.
class RecordingOracle : public EntropyOracle {
public:
    explicit RecordingOracle(const EntropyOracle& inner) : inner_(inner) {}

    std::size_t label_count() const override { return inner_.label_count(); }
    std::size_t coordinates() const override { return inner_.coordinates(); }
    std::string coordinate_name(std::size_t m) const override { return inner_.coordinate_name(m); }

    double query(const std::vector<std::size_t>& delta, const std::vector<std::size_t>& tau) const override
    {
        auto d = detail::sorted_unique(delta);
        auto t = detail::sorted_unique(tau);
        auto key = std::pair{d, t};
        if (auto it = seen_.find(key); it != seen_.end())
            return it->second;
        double h = inner_.query(d, t);
        seen_.emplace(std::move(key), h);
        return h;
    }

    std::vector<OracleEntry> entries() const
    {
        std::vector<OracleEntry> out;
        for (const auto& [k, h] : seen_)
            if (!k.first.empty() || !k.second.empty())
                out.push_back({k.first, k.second, h});
        return out;
    }

private:
    const EntropyOracle& inner_;
    mutable std::map<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>, double> seen_;
};

namespace detail {

/// H(B_target | B_delta, X*_tau) == 0, structurally when the oracle can tell.
inline bool zero_given(const EntropyOracle& o, std::size_t target, std::vector<std::size_t> delta,
                       const std::vector<std::size_t>& tau)
{
    if (auto s = o.determined(target, delta, tau))
        return *s;
    const double base = o.query(delta, tau);
    delta.push_back(target);
    return o.query(delta, tau) - base <= kEntropyEps;
}

inline std::size_t checked_support(const EntropyOracle& o, std::size_t cap)
{
    const std::size_t n = o.support_size();
    if (n > cap)
        throw Error(ErrorKind::SupportTooLarge,
                    "recovery of " + std::to_string(n) + " atoms exceeds the cap of " + std::to_string(cap));
    return n;
}

} // namespace detail

// ---------------------------------------------------------------- recovery

/// Oracle label of the indicator of each probability rank (index 0 = rank 1).
inline std::vector<std::size_t> find_indicators(const EntropyOracle& o, std::size_t cap = kDefaultRecoverySupportCap)
{
    const std::size_t n = detail::checked_support(o, cap);
    const std::size_t L = o.label_count();
    if (n < 2)
        return {};
    std::vector<std::size_t> ind(n);
    std::vector<std::size_t> found; // ranks n, n-1, ... in discovery order
    std::vector<char> used(L, 0);
    for (std::size_t rank = n; rank >= 2; --rank) {
        std::optional<std::size_t> best;
        double best_h = 0;
        for (std::size_t a = 0; a < L; ++a) {
            if (used[a] || detail::zero_given(o, a, found, {}))
                continue;
            double h = o.query({a}, {});
            if (!best || h < best_h) {
                best = a;
                best_h = h;
            }
        }
        if (!best)
            throw Error(ErrorKind::InconsistentOracle, "no indicator candidate at rank " + std::to_string(rank));
        ind[rank - 1] = *best;
        used[*best] = 1;
        found.push_back(*best);
    }
    if (n == 2) {
        ind[0] = ind[1];
        return ind;
    }
    // rank 1: determined by all indicators found, by none of their proper subsets
    std::optional<std::size_t> first;
    for (std::size_t a = 0; a < L; ++a) {
        if (used[a])
            continue;
        bool ok = detail::zero_given(o, a, found, {});
        for (std::size_t j = 0; ok && j < found.size(); ++j) {
            std::vector<std::size_t> rest = found;
            rest.erase(rest.begin() + static_cast<long>(j));
            ok = !detail::zero_given(o, a, rest, {});
        }
        if (ok) {
            if (first)
                throw Error(ErrorKind::InconsistentOracle, "rank-1 indicator is not unique");
            first = a;
        }
    }
    if (!first)
        throw Error(ErrorKind::InconsistentOracle, "no rank-1 indicator");
    ind[0] = *first;
    return ind;
}

struct RecoveredDistribution {
    std::vector<double> masses;          // by rank: masses[0] >= masses[1] >= ...
    std::vector<std::size_t> indicators; // oracle label of each rank's indicator
    std::vector<std::vector<std::uint32_t>> classes; // [coordinate][rank] -> symbol index
    JointDistribution joint;             // fresh alphabets; masses rounded to 2^-40
};

namespace detail {

inline std::vector<double> masses_from_indicators(const EntropyOracle& o, const std::vector<std::size_t>& ind,
                                                  const EntropyMeasure& m)
{
    const std::size_t n = ind.size();
    std::vector<double> p(n, 0.0);
    if (n == 0)
        return p;
    double rest = 0;
    for (std::size_t i = 1; i < n; ++i) {
        try {
            p[i] = m.invert_binary(o.query({ind[i]}, {}));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::OutOfRange)
                throw;
            throw Error(ErrorKind::NonDistribution, std::string("indicator entropy out of range: ") + e.what());
        }
        rest += p[i];
    }
    p[0] = 1 - rest;
    for (double v : p)
        if (!(v > -1e-9 && v <= 1 + 1e-9))
            throw Error(ErrorKind::NonDistribution, "recovered masses do not form a distribution");
    for (std::size_t i = 1; i < n; ++i)
        if (p[i] <= 0)
            throw Error(ErrorKind::NonDistribution, "recovered a zero mass");
    if (p[0] <= 0)
        throw Error(ErrorKind::NonDistribution, "recovered masses exceed 1");
    return p;
}

inline std::vector<Rational> rational_masses(const std::vector<double>& p)
{
    std::vector<Rational> r(p.size());
    Rational rest;
    for (std::size_t i = 1; i < p.size(); ++i) {
        r[i] = Rational::round_dyadic(p[i], 40);
        if (r[i].sign() <= 0)
            throw Error(ErrorKind::NonDistribution, "mass below 2^-40");
        rest += r[i];
    }
    if (!p.empty())
        r[0] = Rational(1) - rest;
    if (!p.empty() && r[0].sign() <= 0)
        throw Error(ErrorKind::NonDistribution, "recovered masses exceed 1");
    return r;
}

} // namespace detail

/// Masses of the hidden variable from Omega-only queries.
inline RecoveredDistribution recover_scalar(const EntropyOracle& o, const EntropyMeasure& m = {},
                                            std::size_t cap = kDefaultRecoverySupportCap)
{
    const std::size_t n = detail::checked_support(o, cap);
    RecoveredDistribution r;
    r.indicators = find_indicators(o, cap);
    r.masses = n == 1 ? std::vector<double>{1.0} : detail::masses_from_indicators(o, r.indicators, m);
    auto pr = detail::rational_masses(r.masses);
    std::vector<std::string> alpha;
    std::map<Outcome, Rational> pmf;
    for (std::size_t k = 0; k < n; ++k) {
        alpha.push_back("x" + std::to_string(k + 1));
        pmf.emplace(Outcome{static_cast<std::uint32_t>(k)}, pr[k]);
    }
    r.classes = {std::vector<std::uint32_t>(n)};
    std::iota(r.classes[0].begin(), r.classes[0].end(), 0u);
    r.joint = JointDistribution({"X"}, {alpha}, std::move(pmf));
    return r;
}

/// Joint distribution of the hidden vector, up to renaming symbols of each
/// coordinate, from queries that mix partition labels and coordinates.
inline RecoveredDistribution recover_vector(const EntropyOracle& o, const EntropyMeasure& m = {},
                                            std::size_t cap = kDefaultRecoverySupportCap)
{
    const std::size_t n = detail::checked_support(o, cap);
    const std::size_t M = o.coordinates();
    const std::size_t L = o.label_count();
    if (M == 0)
        throw Error(ErrorKind::InconsistentOracle, "oracle has no coordinates");
    RecoveredDistribution r;
    r.indicators = find_indicators(o, cap);
    r.masses = n == 1 ? std::vector<double>{1.0} : detail::masses_from_indicators(o, r.indicators, m);

    // side[l][x]: atom x lies on the same side of label l as atom 0
    auto same_side = [&](std::size_t l, std::size_t x, std::size_t y) {
        std::vector<std::size_t> given;
        for (std::size_t k = 0; k < n; ++k)
            if (k != x && k != y)
                given.push_back(r.indicators[k]);
        given = detail::sorted_unique(given);
        return detail::zero_given(o, l, given, {});
    };

    for (std::size_t c = 0; c < M; ++c) {
        AtomClasses cls(n);
        for (std::size_t l = 0; l < L; ++l) {
            if (!detail::zero_given(o, l, {}, {c}))
                continue;
            std::vector<std::uint32_t> side(n, 0);
            for (std::size_t x = 1; x < n; ++x)
                side[x] = same_side(l, 0, x) ? 0u : 1u;
            cls.refine(side);
        }
        const double h = m.of_masses(cls.class_masses(r.masses));
        const double want = o.query({}, {c});
        if (std::abs(h - want) > 1e-6)
            throw Error(ErrorKind::NonFactorizableCoordinates,
                        "classes of " + o.coordinate_name(c) + " do not reproduce its entropy");
        r.classes.push_back(cls.ids());
    }
    std::set<Outcome> distinct;
    for (std::size_t x = 0; x < n; ++x) {
        Outcome v(M);
        for (std::size_t c = 0; c < M; ++c)
            v[c] = r.classes[c][x];
        if (!distinct.insert(v).second)
            throw Error(ErrorKind::NonFactorizableCoordinates, "two atoms agree on every coordinate");
    }

    auto pr = detail::rational_masses(r.masses);
    std::vector<std::string> vars;
    std::vector<std::vector<std::string>> alpha(M);
    std::map<Outcome, Rational> pmf;
    for (std::size_t c = 0; c < M; ++c) {
        vars.push_back(o.coordinate_name(c));
        std::uint32_t k = 0;
        for (std::uint32_t id : r.classes[c])
            k = std::max(k, id + 1);
        for (std::uint32_t s = 0; s < k; ++s)
            alpha[c].push_back("v" + std::to_string(s + 1));
    }
    for (std::size_t x = 0; x < n; ++x) {
        Outcome v(M);
        for (std::size_t c = 0; c < M; ++c)
            v[c] = r.classes[c][x];
        pmf.emplace(std::move(v), pr[x]);
    }
    r.joint = JointDistribution(std::move(vars), std::move(alpha), std::move(pmf));
    return r;
}

/// Per-coordinate symbol bijections mapping `a` onto `b` (masses within tol),
/// found by backtracking over atom matchings.
inline std::optional<std::vector<std::map<std::uint32_t, std::uint32_t>>>
coordinate_isomorphic(const JointDistribution& a, const JointDistribution& b, double tol = 1e-9)
{
    const std::size_t M = a.variables().size();
    if (M != b.variables().size() || a.support_size() != b.support_size())
        return std::nullopt;
    std::vector<std::pair<Outcome, double>> xa, xb;
    for (const auto& [o, p] : a.pmf())
        xa.push_back({o, p.to_double()});
    for (const auto& [o, p] : b.pmf())
        xb.push_back({o, p.to_double()});
    const std::size_t n = xa.size();
    std::vector<std::map<std::uint32_t, std::uint32_t>> fwd(M), back(M);
    std::vector<char> taken(n, 0);

    auto search = [&](auto&& self, std::size_t i) -> bool {
        if (i == n)
            return true;
        for (std::size_t j = 0; j < n; ++j) {
            if (taken[j] || std::abs(xa[i].second - xb[j].second) > tol)
                continue;
            bool ok = true;
            std::vector<std::size_t> added;
            for (std::size_t c = 0; c < M && ok; ++c) {
                const auto s = xa[i].first[c], t = xb[j].first[c];
                auto f = fwd[c].find(s);
                auto g = back[c].find(t);
                if (f == fwd[c].end() && g == back[c].end()) {
                    fwd[c][s] = t;
                    back[c][t] = s;
                    added.push_back(c);
                } else if (f == fwd[c].end() || g == back[c].end() || f->second != t) {
                    ok = false;
                }
            }
            if (ok) {
                taken[j] = 1;
                if (self(self, i + 1))
                    return true;
                taken[j] = 0;
            }
            for (std::size_t c : added) {
                back[c].erase(xb[j].first[c]);
                fwd[c].erase(xa[i].first[c]);
            }
        }
        return false;
    };
    if (!search(search, 0))
        return std::nullopt;
    return fwd;
}

// ---------------------------------------------------------------- checks

struct PropertyReport {
    std::size_t support = 0;
    std::size_t distinct_pairs = 0;
    std::size_t binary_functions = 0;
    std::size_t basis_chains = 0;
    std::size_t minimality_checks = 0;
    std::size_t equality_cases = 0;
};

/// Distinctness, completeness, basis chains and indicator minimality of a
/// complete system. Throws PropertyViolation naming the first failure.
inline PropertyReport check_lemma2_properties(const PartitionSystem& s, std::size_t cap = kDefaultRecoverySupportCap)
{
    if (!s.complete())
        throw Error(ErrorKind::PropertyViolation, "property checks need every partition label");
    const std::size_t n = s.support_size();
    if (n > cap)
        throw Error(ErrorKind::SupportTooLarge, "property checks capped at " + std::to_string(cap) + " atoms");
    const std::size_t L = s.labels().size();
    const auto& labels = s.labels();
    PropertyReport rep;
    rep.support = n;
    auto fail = [](const std::string& what) { throw Error(ErrorKind::PropertyViolation, what); };

    std::vector<double> h1(L);
    for (std::size_t a = 0; a < L; ++a)
        h1[a] = s.entropy({a}, {});

    // distinctness
    for (std::size_t a = 0; a < L; ++a)
        for (std::size_t b = a + 1; b < L; ++b) {
            const double hab = s.entropy({a, b}, {});
            if (!(hab - h1[b] > kEntropyEps) || !(hab - h1[a] > kEntropyEps))
                fail("labels " + labels[a].name() + " and " + labels[b].name() + " are not distinct");
            ++rep.distinct_pairs;
        }

    // completeness: every nonconstant binary function of X is some label
    const std::uint32_t all = (1u << n) - 1;
    for (std::uint32_t f = 1; f < all; ++f) {
        auto idx = s.find(PartitionLabel::canonical(f, n));
        if (!idx)
            fail("binary function " + std::to_string(f) + " matches no label");
        AtomClasses byf(n);
        byf.refine_block(f);
        AtomClasses bya = s.classes({*idx}, {});
        if (!byf.determines(labels[*idx].block) || !bya.determines(f))
            fail("binary function " + std::to_string(f) + " does not coincide with its label");
        ++rep.binary_functions;
    }

    // basis: indicators of alpha minus one atom and of alpha^c minus atom 0
    for (std::size_t a = 0; a < L; ++a) {
        const std::uint32_t blk = labels[a].block;
        std::vector<std::size_t> chain;
        bool skipped = false;
        for (std::size_t k = 1; k < n; ++k) {
            if ((blk >> k) & 1u) {
                if (!skipped) {
                    skipped = true;
                    continue;
                }
            }
            chain.push_back(*s.find(s.indicator(k)));
        }
        if (chain.size() + 2 != n)
            fail("basis chain for " + labels[a].name() + " has the wrong length");
        std::vector<std::size_t> given{a};
        std::size_t support = s.classes(given, {}).count();
        for (std::size_t b : chain) {
            const double before = s.entropy(given, {});
            given.push_back(b);
            const std::size_t next = s.classes(given, {}).count();
            if (next != support + 1 || !(s.entropy(given, {}) - before > kEntropyEps))
                fail("basis chain for " + labels[a].name() + " stalls at " + labels[b].name());
            support = next;
        }
        if (support != n)
            fail("basis chain for " + labels[a].name() + " does not reach the full support");
        ++rep.basis_chains;
    }

    // indicator minimality: among labels not fixed by the lighter atoms'
    // indicators, the rank-i indicator has the least entropy
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t ind = *s.find(s.indicator(i));
        const Rational& pi = s.masses()[i];
        std::vector<std::size_t> lighter;
        for (std::size_t j = i + 1; j < n; ++j)
            lighter.push_back(*s.find(s.indicator(j)));
        for (std::size_t a = 0; a < L; ++a) {
            if (s.determined(a, lighter, {}))
                continue;
            Rational ma = s.block_mass(labels[a].block);
            Rational low = std::min(ma, Rational(1) - ma);
            if (low < pi || h1[ind] > h1[a] + 1e-12)
                fail("label " + labels[a].name() + " has less entropy than the rank-" + std::to_string(i + 1)
                     + " indicator");
            if (low == pi) {
                const int size = std::popcount(labels[a].block);
                bool indicator = size == 1 || static_cast<std::size_t>(size) == n - 1;
                if (!indicator)
                    fail("label " + labels[a].name() + " ties the rank-" + std::to_string(i + 1)
                         + " indicator without being an indicator");
                ++rep.equality_cases;
            }
            ++rep.minimality_checks;
        }
    }
    return rep;
}

/// Whether oracle b answers like system a (label i of b against label i of
/// a), over every query when n <= 4 and over a seeded sample otherwise.
inline bool check_oracle_consistency(const PartitionSystem& a, const EntropyOracle& b, bool include_coordinates,
                                     std::uint64_t seed = 0, const EntropyMeasure& m = {})
{
    const std::size_t L = a.labels().size();
    if (b.label_count() != L)
        return false;
    const std::size_t M = include_coordinates ? a.coordinates() : 0;
    if (include_coordinates && b.coordinates() != M)
        return false;
    auto agree = [&](const std::vector<std::size_t>& d, const std::vector<std::size_t>& t) {
        return std::abs(a.entropy(d, t, m) - b.query(d, t)) <= kEntropyEps;
    };
    auto bits = [](std::uint64_t mask, std::size_t width) {
        std::vector<std::size_t> v;
        for (std::size_t k = 0; k < width; ++k)
            if ((mask >> k) & 1u)
                v.push_back(k);
        return v;
    };
    if (a.support_size() <= 4 && M <= 16) {
        for (std::uint64_t d = 0; d < (std::uint64_t{1} << L); ++d)
            for (std::uint64_t t = 0; t < (std::uint64_t{1} << M); ++t)
                if (!agree(bits(d, L), bits(t, M)))
                    return false;
        return true;
    }
    for (std::size_t l = 0; l <= L; ++l)
        for (std::size_t c = 0; c <= M; ++c) {
            std::vector<std::size_t> d, t;
            if (l < L)
                d.push_back(l);
            if (c < M)
                t.push_back(c);
            if (!agree(d, t))
                return false;
        }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, L - 1);
    const std::size_t widest = std::min(L, a.support_size());
    std::uniform_int_distribution<std::size_t> size(1, widest);
    for (int q = 0; q < 1000; ++q) {
        std::vector<std::size_t> d, t;
        for (std::size_t k = size(rng); k > 0; --k)
            d.push_back(pick(rng));
        for (std::size_t c = 0; c < M; ++c)
            if (rng() & 1u)
                t.push_back(c);
        if (!agree(detail::sorted_unique(d), t))
            return false;
    }
    return true;
}

} // namespace entbound
