#pragma once

// Networks with correlated sources: validation, compilation of the LP outer
// bounds (basic, with auxiliary variables, with selected partition
// variables), capacity-tuple queries, and a single-symbol code evaluator.
//
// An edge without a capacity is a relay of unlimited capacity. It never
// becomes an LP variable: wherever it appears it is replaced by the inputs
// available at its tail (sources there and incoming edges, recursively), which
// is exactly what a relay of unlimited capacity can forward.

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "error.hpp"
#include "lp.hpp"
#include "partitions.hpp"
#include "polycone.hpp"
#include "probdist.hpp"
#include "rational.hpp"
#include "setfunction.hpp"
#include "solve.hpp"

namespace entbound {

struct Edge {
    std::string label;
    std::string tail;
    std::string head;
    std::optional<Rational> cap; // none: unlimited relay
};

struct SourcePlacement {
    std::string label;
    std::vector<std::string> at;
    std::vector<std::string> demanded_at;
};

struct NetworkSpec {
    std::vector<std::string> nodes;
    std::vector<Edge> edges;
    std::vector<SourcePlacement> sources;
};

/// A validated network with its topological order.
class Network {
public:
    explicit Network(NetworkSpec spec) : spec_(std::move(spec))
    {
        std::set<std::string> names;
        for (const auto& v : spec_.nodes) {
            if (!node_.emplace(v, node_.size()).second)
                throw Error(ErrorKind::ParseError, "node " + v + " listed twice");
        }
        auto node = [&](const std::string& v, const std::string& who) {
            auto it = node_.find(v);
            if (it == node_.end())
                throw Error(ErrorKind::DanglingReference, who + " refers to unknown node " + v);
            return it->second;
        };
        for (std::size_t i = 0; i < spec_.edges.size(); ++i) {
            const auto& e = spec_.edges[i];
            if (!names.insert(e.label).second)
                throw Error(ErrorKind::ParseError, "label " + e.label + " used twice");
            node(e.tail, "edge " + e.label);
            node(e.head, "edge " + e.label);
            if (e.cap && e.cap->sign() <= 0)
                throw Error(ErrorKind::NonPositiveCapacity, "edge " + e.label + " has capacity " + e.cap->str());
            edge_.emplace(e.label, i);
        }
        for (std::size_t s = 0; s < spec_.sources.size(); ++s) {
            const auto& src = spec_.sources[s];
            if (!names.insert(src.label).second)
                throw Error(ErrorKind::ParseError, "label " + src.label + " used twice");
            std::set<std::string> at;
            for (const auto& v : src.at) {
                node(v, "source " + src.label);
                at.insert(v);
            }
            for (const auto& v : src.demanded_at) {
                node(v, "source " + src.label);
                if (at.count(v))
                    throw Error(ErrorKind::SourceDemandOverlap,
                                "source " + src.label + " is both available and demanded at node " + v);
            }
        }
        topo_sort();
        for (std::size_t i = 0; i < spec_.edges.size(); ++i)
            if (spec_.edges[i].cap)
                capacitated_.push_back(i);
    }

    const NetworkSpec& spec() const { return spec_; }
    std::size_t node_index(const std::string& v) const { return node_.at(v); }
    /// nodes in topological order
    const std::vector<std::size_t>& node_order() const { return order_; }
    /// edges sorted by the topological position of their tails
    const std::vector<std::size_t>& edge_order() const { return edge_order_; }
    /// indices of edges with a capacity (LP variables), in spec order
    const std::vector<std::size_t>& capacitated() const { return capacitated_; }

    std::vector<std::size_t> sources_at(std::size_t v) const
    {
        std::vector<std::size_t> out;
        for (std::size_t s = 0; s < spec_.sources.size(); ++s)
            for (const auto& u : spec_.sources[s].at)
                if (node_.at(u) == v) {
                    out.push_back(s);
                    break;
                }
        return out;
    }

    std::vector<std::size_t> edges_into(std::size_t v) const
    {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < spec_.edges.size(); ++i)
            if (node_.at(spec_.edges[i].head) == v)
                out.push_back(i);
        return out;
    }

    /// Sources and capacitated edges that determine what arrives at node v,
    /// with unlimited relays replaced by their tails' inputs.
    struct Inputs {
        std::set<std::size_t> sources;
        std::set<std::size_t> edges; // capacitated only
    };

    Inputs inputs_at(std::size_t v) const
    {
        Inputs in;
        for (std::size_t s : sources_at(v))
            in.sources.insert(s);
        for (std::size_t e : edges_into(v))
            add_edge(in, e);
        return in;
    }

private:
    void add_edge(Inputs& in, std::size_t e) const
    {
        const auto& edge = spec_.edges[e];
        if (edge.cap) {
            in.edges.insert(e);
            return;
        }
        Inputs t = inputs_at(node_.at(edge.tail));
        in.sources.insert(t.sources.begin(), t.sources.end());
        in.edges.insert(t.edges.begin(), t.edges.end());
    }

    void topo_sort()
    {
        const std::size_t n = spec_.nodes.size();
        std::vector<std::size_t> indeg(n, 0);
        std::vector<std::vector<std::size_t>> out(n);
        for (const auto& e : spec_.edges) {
            std::size_t t = node_.at(e.tail), h = node_.at(e.head);
            if (t == h)
                throw Error(ErrorKind::CyclicGraph, "edge " + e.label + " is a self-loop");
            out[t].push_back(h);
            ++indeg[h];
        }
        std::vector<std::size_t> ready;
        for (std::size_t v = n; v-- > 0;)
            if (indeg[v] == 0)
                ready.push_back(v);
        while (!ready.empty()) {
            std::size_t v = ready.back();
            ready.pop_back();
            order_.push_back(v);
            for (std::size_t h : out[v])
                if (--indeg[h] == 0)
                    ready.push_back(h);
        }
        if (order_.size() != n)
            throw Error(ErrorKind::CyclicGraph, "network has a directed cycle");
        std::vector<std::size_t> pos(n);
        for (std::size_t k = 0; k < n; ++k)
            pos[order_[k]] = k;
        edge_order_.resize(spec_.edges.size());
        for (std::size_t i = 0; i < edge_order_.size(); ++i)
            edge_order_[i] = i;
        std::stable_sort(edge_order_.begin(), edge_order_.end(), [&](std::size_t a, std::size_t b) {
            return pos[node_.at(spec_.edges[a].tail)] < pos[node_.at(spec_.edges[b].tail)];
        });
    }

    NetworkSpec spec_;
    std::map<std::string, std::size_t> node_;
    std::map<std::string, std::size_t> edge_;
    std::vector<std::size_t> order_;
    std::vector<std::size_t> edge_order_;
    std::vector<std::size_t> capacitated_;
};

inline Network validate(NetworkSpec spec) { return Network(std::move(spec)); }

// ---------------------------------------------------------------- bounds

/// Joint entropies of the sources: a distribution, or a table h(alpha) over
/// the source labels (must be a polymatroid).
using SourceEntropySpec = std::variant<JointDistribution, RationalSetFunction>;

struct BoundVariant {
    enum class Kind { Basic, Auxiliary, PartitionSubset };
    Kind kind = Kind::Basic;
    std::optional<JointDistribution> auxiliary;  // Auxiliary: sources plus auxiliary variables
    std::vector<PartitionLabel> partitions;      // PartitionSubset: labels over the source support

    static BoundVariant basic() { return {}; }
    static BoundVariant with_auxiliaries(JointDistribution d) { return {Kind::Auxiliary, std::move(d), {}}; }
    static BoundVariant with_partitions(std::vector<PartitionLabel> l) { return {Kind::PartitionSubset, {}, std::move(l)}; }
};

inline const char* to_string(BoundVariant::Kind k)
{
    switch (k) {
    case BoundVariant::Kind::Basic: return "basic";
    case BoundVariant::Kind::Auxiliary: return "auxiliary";
    case BoundVariant::Kind::PartitionSubset: return "partition";
    }
    return "?";
}

/// Capacities per capacitated edge, in the order of Network::capacitated().
using CapacityTuple = std::vector<Rational>;

struct CompiledBound {
    LinearProgram lp;
    bool approximate = false;            // some entropy was rounded to a multiple of 2^-20
    std::vector<std::string> edge_labels; // capacitated edges, LP ground order
};

namespace detail {

inline constexpr int kEntropyBits = 20;

inline std::vector<std::string> source_labels(const Network& net)
{
    std::vector<std::string> out;
    for (const auto& s : net.spec().sources)
        out.push_back(s.label);
    return out;
}

/// Same variables and the same mass on every outcome, compared by symbol.
inline bool same_law(const JointDistribution& a, const JointDistribution& b)
{
    if (a.variables() != b.variables() || a.support_size() != b.support_size())
        return false;
    auto named = [](const JointDistribution& d) {
        std::map<std::vector<std::string>, Rational> m;
        for (const auto& [o, p] : d.pmf()) {
            std::vector<std::string> k;
            for (std::size_t i = 0; i < o.size(); ++i)
                k.push_back(d.symbol(i, o[i]));
            m.emplace(std::move(k), p);
        }
        return m;
    };
    return named(a) == named(b);
}

/// Joint distribution of the sources followed by the auxiliary variables.
inline std::pair<JointDistribution, std::vector<std::string>> entropy_base(const Network& net,
                                                                           const SourceEntropySpec& es,
                                                                           const BoundVariant& v)
{
    const auto src = source_labels(net);
    if (v.kind == BoundVariant::Kind::Basic)
        return {std::get<JointDistribution>(es), {}};
    if (!std::holds_alternative<JointDistribution>(es))
        throw Error(ErrorKind::InvalidEntropyTable, "auxiliary and partition bounds need the source distribution");
    const auto& d = std::get<JointDistribution>(es);
    const auto sd = marginalize(d, src);
    if (v.kind == BoundVariant::Kind::Auxiliary) {
        if (!v.auxiliary)
            throw Error(ErrorKind::InvalidEntropyTable, "auxiliary bound without auxiliary distribution");
        const auto& a = *v.auxiliary;
        if (!same_law(marginalize(a, src), sd))
            throw Error(ErrorKind::InvalidEntropyTable, "auxiliary distribution does not extend the sources");
        std::vector<std::string> aux;
        for (const auto& name : a.variables())
            if (std::find(src.begin(), src.end(), name) == src.end())
                aux.push_back(name);
        return {a, aux};
    }
    // partition variables of the joint source outcome
    PartitionSystem ps(sd, v.partitions);
    auto ext = ps.extended_distribution();
    std::vector<std::string> aux(ext.variables().begin() + static_cast<long>(src.size()), ext.variables().end());
    return {ext, aux};
}

inline LinearConstraint subset_row(SubsetMask target, SubsetMask given, Relation rel, Rational rhs, std::string tag)
{
    // h(target | given) rel rhs
    LinearConstraint c;
    c.coefficients[LinearProgram::column_of(target | given)] += Rational(1);
    if (given)
        c.coefficients[LinearProgram::column_of(given)] += Rational(-1);
    std::erase_if(c.coefficients, [](const auto& kv) { return kv.second.is_zero(); });
    c.relation = rel;
    c.rhs = std::move(rhs);
    c.tag = std::move(tag);
    return c;
}

} // namespace detail

/// Elemental rows over S u E (u auxiliaries), source(/auxiliary) entropy
/// equalities, encoding and decoding equalities and capacity rows. Without a
/// tuple the capacities of the network are used. With `scaling` the capacity
/// rows read h(e) - t C_e <= 0 for an extra column t.
inline CompiledBound compile_bound(const Network& net, const SourceEntropySpec& es, const BoundVariant& v,
                                   const std::optional<CapacityTuple>& tuple = std::nullopt, bool scaling = false,
                                   std::size_t cap = kDefaultLpGroundCap)
{
    const auto& spec = net.spec();
    const auto src = detail::source_labels(net);
    const std::size_t S = src.size();
    const auto& capd = net.capacitated();
    if (tuple && tuple->size() != capd.size())
        throw Error(ErrorKind::DimensionMismatch, "tuple has " + std::to_string(tuple->size()) + " entries for "
                                                      + std::to_string(capd.size()) + " capacitated edges");

    CompiledBound out;
    std::vector<std::string> aux;
    RationalSetFunction srch; // over sources then auxiliaries
    if (std::holds_alternative<RationalSetFunction>(es) && v.kind == BoundVariant::Kind::Basic) {
        const auto& t = std::get<RationalSetFunction>(es);
        if (t.ground != src)
            throw Error(ErrorKind::InvalidEntropyTable, "entropy table ground differs from the network sources");
        if (!is_polymatroid(t))
            throw Error(ErrorKind::InvalidEntropyTable, "entropy table is not a polymatroid");
        srch = t;
    } else {
        auto [base, a] = detail::entropy_base(net, es, v);
        aux = a;
        std::vector<std::string> g = src;
        g.insert(g.end(), aux.begin(), aux.end());
        if (g.size() + capd.size() > cap)
            throw Error(ErrorKind::GroundSetTooLarge, "ground set of " + std::to_string(g.size() + capd.size())
                                                          + " exceeds the cap of " + std::to_string(cap));
        bool exact = true;
        srch = rational_entropy_vector(base, g, exact, detail::kEntropyBits);
        out.approximate = !exact;
    }

    std::vector<std::string> ground = src;
    for (std::size_t e : capd) {
        ground.push_back(spec.edges[e].label);
        out.edge_labels.push_back(spec.edges[e].label);
    }
    ground.insert(ground.end(), aux.begin(), aux.end());
    {
        std::set<std::string> uniq(ground.begin(), ground.end());
        if (uniq.size() != ground.size())
            throw Error(ErrorKind::ParseError, "auxiliary variable name collides with a source or edge");
    }
    out.lp = polymatroid_program(ground, cap);
    auto& lp = out.lp;

    const std::size_t E = capd.size();
    auto bit = [](std::size_t k) { return SubsetMask{1} << k; };
    std::map<std::size_t, std::size_t> edge_pos;
    for (std::size_t k = 0; k < E; ++k)
        edge_pos[capd[k]] = S + k;
    auto mask_of = [&](const Network::Inputs& in) {
        SubsetMask m = 0;
        for (std::size_t s : in.sources)
            m |= bit(s);
        for (std::size_t e : in.edges)
            m |= bit(edge_pos.at(e));
        return m;
    };

    // source (and auxiliary) entropies: every nonempty subset of S u L
    const std::size_t SL = S + aux.size();
    for (SubsetMask m = 1; m <= full_mask(SL); ++m) {
        SubsetMask g = m & full_mask(S);
        for (std::size_t k = 0; k < aux.size(); ++k)
            if (m & bit(S + k))
                g |= bit(S + E + k);
        lp.constraints.push_back(detail::subset_row(g, 0, Relation::Equal, srch[m], "source-entropy"));
    }
    // encoding: an edge is a function of what its tail holds
    for (std::size_t k = 0; k < E; ++k) {
        const auto& e = spec.edges[capd[k]];
        SubsetMask given = mask_of(net.inputs_at(net.node_index(e.tail)));
        lp.constraints.push_back(detail::subset_row(bit(S + k), given, Relation::Equal, Rational(), "encoding"));
    }
    // decoding: a demanded source is a function of what the sink receives
    for (std::size_t s = 0; s < S; ++s)
        for (const auto& u : spec.sources[s].demanded_at) {
            SubsetMask given = mask_of(net.inputs_at(net.node_index(u)));
            lp.constraints.push_back(detail::subset_row(bit(s), given, Relation::Equal, Rational(), "decoding"));
        }
    // capacities
    if (scaling)
        lp.extra_columns.push_back("t");
    for (std::size_t k = 0; k < E; ++k) {
        const Rational c = tuple ? (*tuple)[k] : *spec.edges[capd[k]].cap;
        if (c.sign() < 0)
            throw Error(ErrorKind::OutOfRange, "negative capacity for edge " + out.edge_labels[k]);
        LinearConstraint row;
        row.coefficients[LinearProgram::column_of(bit(S + k))] = Rational(1);
        row.relation = Relation::LessEqual;
        row.tag = "capacity";
        if (scaling) {
            if (c.sign() <= 0)
                throw Error(ErrorKind::OutOfRange, "scaling direction must be positive on edge " + out.edge_labels[k]);
            row.coefficients[lp.extra_column(0)] = -c;
        } else {
            row.rhs = c;
        }
        lp.constraints.push_back(std::move(row));
    }
    if (scaling) {
        Objective obj;
        obj.sense = Sense::Minimize;
        obj.coefficients[lp.extra_column(0)] = Rational(1);
        lp.objective = std::move(obj);
    }
    return out;
}

struct BoundAnswer {
    LpOutcome outcome;
    bool approximate = false;
};

/// Is the tuple inside the outer bound? Infeasible comes with a certificate.
inline BoundAnswer check_tuple(const Network& net, const SourceEntropySpec& es, const BoundVariant& v,
                               const CapacityTuple& tuple, const LpOptions& opts = {})
{
    auto cb = compile_bound(net, es, v, tuple);
    return {lp_solve(cb.lp, opts), cb.approximate};
}

struct ScalingAnswer {
    std::optional<Rational> t; // none when no scaling of the direction is in the bound
    LpOutcome outcome;
    bool approximate = false;
};

/// Least t with t * direction inside the bound.
inline ScalingAnswer min_scaling(const Network& net, const SourceEntropySpec& es, const BoundVariant& v,
                                 const CapacityTuple& direction, const LpOptions& opts = {})
{
    auto cb = compile_bound(net, es, v, direction, true);
    ScalingAnswer a;
    a.outcome = lp_solve(cb.lp, opts);
    a.approximate = cb.approximate;
    if (a.outcome.status == LpStatus::Feasible)
        a.t = a.outcome.optimum;
    return a;
}

// ---------------------------------------------------------------- codes

/// One local function: a table from tuples of input symbols to an output symbol.
struct CodeTable {
    std::vector<std::string> inputs; // source or edge labels available at the node
    std::map<std::vector<std::string>, std::string> table;
};

struct EdgeCode {
    std::vector<std::string> alphabet;
    CodeTable function;
};

struct Decoder {
    std::string node;
    std::string source;
    CodeTable function;
};

struct NetworkCode {
    std::map<std::string, EdgeCode> edges;
    std::vector<Decoder> decoders;
};

struct EdgeReport {
    std::string label;
    double entropy = 0;   // H(U_e), bits
    double rate = 0;      // log2 |alphabet|
    std::optional<Rational> cap;
    bool within_capacity = true;
};

struct DecodeReport {
    std::string node;
    std::string source;
    bool success = false;
    Rational error_mass; // probability of atoms decoded wrongly
};

struct CodeReport {
    std::vector<EdgeReport> edges;                 // in spec order
    std::vector<DecodeReport> decoders;
    bool success = false;                          // every demand decoded on every atom
    JointDistribution joint;                       // sources followed by edge messages
};

/// Runs the code on every support atom of the source distribution (N = 1).
inline CodeReport evaluate_code(const Network& net, const JointDistribution& dist, const NetworkCode& code)
{
    const auto& spec = net.spec();
    const auto src = detail::source_labels(net);
    const auto sd = marginalize(dist, src);
    const std::size_t S = src.size();
    const std::size_t E = spec.edges.size();

    std::map<std::string, std::size_t> edge_index;
    for (std::size_t i = 0; i < E; ++i)
        edge_index[spec.edges[i].label] = i;
    for (const auto& [label, ec] : code.edges)
        if (!edge_index.count(label))
            throw Error(ErrorKind::DanglingReference, "code for unknown edge " + label);

    // what a node may read: its sources and its incoming edges
    auto available = [&](std::size_t v) {
        std::set<std::string> names;
        for (std::size_t s : net.sources_at(v))
            names.insert(src[s]);
        for (std::size_t e : net.edges_into(v))
            names.insert(spec.edges[e].label);
        return names;
    };
    auto check_inputs = [&](const CodeTable& t, std::size_t v, const std::string& who) {
        auto av = available(v);
        for (const auto& in : t.inputs)
            if (!av.count(in))
                throw Error(ErrorKind::DanglingReference, who + " reads " + in + ", which is not available there");
        for (const auto& [key, val] : t.table)
            if (key.size() != t.inputs.size())
                throw Error(ErrorKind::AlphabetMismatch, who + " has a table row of the wrong width");
    };

    std::vector<const EdgeCode*> ecode(E, nullptr);
    for (std::size_t i = 0; i < E; ++i) {
        auto it = code.edges.find(spec.edges[i].label);
        if (it == code.edges.end())
            throw Error(ErrorKind::MissingTableEntry, "no code for edge " + spec.edges[i].label);
        ecode[i] = &it->second;
        check_inputs(it->second.function, net.node_index(spec.edges[i].tail), "edge " + spec.edges[i].label);
        if (it->second.alphabet.empty())
            throw Error(ErrorKind::AlphabetMismatch, "edge " + spec.edges[i].label + " has an empty alphabet");
    }

    CodeReport rep;
    std::vector<std::map<std::string, std::uint32_t>> sym(E);
    for (std::size_t i = 0; i < E; ++i)
        for (std::uint32_t k = 0; k < ecode[i]->alphabet.size(); ++k)
            if (!sym[i].emplace(ecode[i]->alphabet[k], k).second)
                throw Error(ErrorKind::AlphabetMismatch, "edge " + spec.edges[i].label + " repeats a symbol");

    // per-atom values: source symbols then edge symbols, as strings
    std::map<std::string, std::string> value;
    auto lookup = [&](const CodeTable& t, const std::string& who) -> const std::string& {
        std::vector<std::string> key;
        for (const auto& in : t.inputs)
            key.push_back(value.at(in));
        auto it = t.table.find(key);
        if (it == t.table.end()) {
            std::string k;
            for (const auto& s : key)
                k += (k.empty() ? "" : ",") + s;
            throw Error(ErrorKind::MissingTableEntry, who + " has no entry for (" + k + ")");
        }
        return it->second;
    };

    std::vector<std::pair<std::string, std::string>> demands; // (node, source)
    for (std::size_t s = 0; s < S; ++s)
        for (const auto& u : spec.sources[s].demanded_at)
            demands.push_back({u, src[s]});
    std::map<std::pair<std::string, std::string>, const Decoder*> dec;
    for (const auto& d : code.decoders) {
        if (std::find(demands.begin(), demands.end(), std::pair{d.node, d.source}) == demands.end())
            throw Error(ErrorKind::DanglingReference, "decoder for " + d.source + " at " + d.node + " has no demand");
        check_inputs(d.function, net.node_index(d.node), "decoder at " + d.node);
        dec[{d.node, d.source}] = &d;
    }
    for (const auto& dm : demands)
        if (!dec.count(dm))
            throw Error(ErrorKind::MissingTableEntry, "no decoder for " + dm.second + " at node " + dm.first);
    for (const auto& dm : demands)
        rep.decoders.push_back({dm.first, dm.second, true, Rational()});

    std::map<Outcome, Rational> joint;
    for (const auto& [o, p] : sd.pmf()) {
        value.clear();
        for (std::size_t s = 0; s < S; ++s)
            value[src[s]] = sd.symbol(s, o[s]);
        Outcome full = o;
        full.resize(S + E);
        for (std::size_t i : net.edge_order()) {
            const std::string& out = lookup(ecode[i]->function, "edge " + spec.edges[i].label);
            auto it = sym[i].find(out);
            if (it == sym[i].end())
                throw Error(ErrorKind::AlphabetMismatch,
                            "edge " + spec.edges[i].label + " emits " + out + ", outside its alphabet");
            value[spec.edges[i].label] = out;
            full[S + i] = it->second;
        }
        for (std::size_t k = 0; k < demands.size(); ++k) {
            const auto& [u, s] = demands[k];
            const std::string& got = lookup(dec.at(demands[k])->function, "decoder for " + s + " at " + u);
            const auto& alpha = sd.alphabets()[sd.index_of(s)];
            if (std::find(alpha.begin(), alpha.end(), got) == alpha.end())
                throw Error(ErrorKind::AlphabetMismatch, "decoder for " + s + " emits " + got + ", not a symbol of " + s);
            if (got != value.at(s)) {
                rep.decoders[k].success = false;
                rep.decoders[k].error_mass += p;
            }
        }
        joint[full] += p;
    }

    std::vector<std::string> vars = src;
    std::vector<std::vector<std::string>> alpha = sd.alphabets();
    for (std::size_t i = 0; i < E; ++i) {
        vars.push_back(spec.edges[i].label);
        alpha.push_back(ecode[i]->alphabet);
    }
    rep.joint = JointDistribution(vars, alpha, std::move(joint));
    for (std::size_t i = 0; i < E; ++i) {
        EdgeReport er;
        er.label = spec.edges[i].label;
        er.entropy = entropy_of(rep.joint, {er.label});
        er.rate = std::log2(static_cast<double>(ecode[i]->alphabet.size()));
        er.cap = spec.edges[i].cap;
        er.within_capacity = !er.cap || er.rate <= er.cap->to_double() + 1e-12;
        rep.edges.push_back(er);
    }
    rep.success = std::all_of(rep.decoders.begin(), rep.decoders.end(), [](const auto& d) { return d.success; });
    return rep;
}

} // namespace entbound
