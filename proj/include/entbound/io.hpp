#pragma once

// JSON formats. Probabilities, capacities and LP data are rational strings
// "num/den"; LP column j is the subset with bit mask j + 1 over the ground
// list, first label in the least-significant bit.

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "auxgen.hpp"
#include "error.hpp"
#include "lp.hpp"
#include "netmodel.hpp"
#include "partitions.hpp"
#include "probdist.hpp"
#include "rational.hpp"
#include "setfunction.hpp"

namespace entbound::io {

using json = nlohmann::json;

inline json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::ParseError, "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ParseError, path + ": " + e.what());
    }
}

inline void write_json_file(const std::string& path, const json& j)
{
    std::ofstream out(path);
    if (!out)
        throw Error(ErrorKind::ParseError, "cannot write " + path);
    out << j.dump(2) << "\n";
}

namespace detail {

template <class F>
auto guarded(const char* what, F&& f) -> decltype(f())
{
    try {
        return f();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string(what) + ": " + e.what());
    }
}

inline Rational rational(const json& v)
{
    if (v.is_string())
        return Rational::parse(v.get<std::string>());
    if (v.is_number_integer())
        return Rational(v.get<long long>());
    if (v.is_number())
        return Rational::parse(v.dump());
    throw Error(ErrorKind::ParseError, "expected a rational, got " + v.dump());
}

inline std::vector<std::string> strings(const json& v)
{
    std::vector<std::string> out;
    for (const auto& x : v)
        out.push_back(x.is_string() ? x.get<std::string>() : x.dump());
    return out;
}

} // namespace detail

// ---------------------------------------------------------------- distributions

inline JointDistribution distribution_from_json(const json& j)
{
    return detail::guarded("distribution", [&] {
        auto vars = detail::strings(j.at("variables"));
        std::vector<std::vector<std::string>> alpha;
        for (const auto& v : vars)
            alpha.push_back(detail::strings(j.at("alphabets").at(v)));
        std::vector<TableEntry> entries;
        for (const auto& e : j.at("pmf"))
            entries.push_back({detail::strings(e.at("outcome")), detail::rational(e.at("p"))});
        return joint_from_table(vars, alpha, entries);
    });
}

inline json to_json(const JointDistribution& d)
{
    json j;
    j["variables"] = d.variables();
    json alpha = json::object();
    for (std::size_t i = 0; i < d.variables().size(); ++i)
        alpha[d.variables()[i]] = d.alphabets()[i];
    j["alphabets"] = alpha;
    json pmf = json::array();
    for (const auto& [o, p] : d.pmf()) {
        std::vector<std::string> syms;
        for (std::size_t i = 0; i < o.size(); ++i)
            syms.push_back(d.symbol(i, o[i]));
        pmf.push_back({{"outcome", syms}, {"p", p.str()}});
    }
    j["pmf"] = pmf;
    return j;
}

// ---------------------------------------------------------------- entropy vectors

inline std::vector<std::string> subset_names(const std::vector<std::string>& ground, SubsetMask m)
{
    std::vector<std::string> out;
    for (std::size_t i = 0; i < ground.size(); ++i)
        if (m & (SubsetMask{1} << i))
            out.push_back(ground[i]);
    return out;
}

inline SubsetMask subset_mask(const std::vector<std::string>& ground, const std::vector<std::string>& names)
{
    SubsetMask m = 0;
    for (const auto& n : names) {
        auto it = std::find(ground.begin(), ground.end(), n);
        if (it == ground.end())
            throw Error(ErrorKind::UnknownVariable, "unknown element " + n);
        m |= SubsetMask{1} << (it - ground.begin());
    }
    return m;
}

/// `exact` (optional) carries rational values next to the floating ones.
inline json entropy_vector_to_json(const SetFunction& h, const EntropyMeasure& m,
                                   const RationalSetFunction* exact = nullptr)
{
    json j;
    j["ground"] = h.ground;
    j["measure"] = m.name();
    j["encoding"] = "subset mask, first ground label = least-significant bit";
    json vals = json::array();
    for (SubsetMask s = 1; s <= full_mask(h.size()); ++s) {
        json e{{"subset", subset_names(h.ground, s)}, {"mask", s}, {"h", h[s]}};
        if (exact)
            e["exact"] = (*exact)[s].str();
        vals.push_back(e);
    }
    j["values"] = vals;
    return j;
}

/// Entropy table h(alpha) over named elements. Values come from "exact"
/// when present, else from "h" (a rational string, or a number rounded to
/// 2^-20, in which case `approximate` is set).
inline RationalSetFunction entropy_table_from_json(const json& j, bool& approximate)
{
    return detail::guarded("entropy table", [&] {
        RationalSetFunction h(detail::strings(j.at("ground")));
        if (h.size() > kDefaultEntropyGroundCap)
            throw Error(ErrorKind::GroundSetTooLarge, "entropy table ground too large");
        std::vector<char> seen(h.values.size(), 0);
        approximate = false;
        for (const auto& e : j.at("values")) {
            SubsetMask m = subset_mask(h.ground, detail::strings(e.at("subset")));
            if (m == 0)
                throw Error(ErrorKind::InvalidEntropyTable, "entry for the empty set");
            Rational v;
            if (e.contains("exact"))
                v = detail::rational(e.at("exact"));
            else if (e.at("h").is_string() || e.at("h").is_number_integer())
                v = detail::rational(e.at("h"));
            else {
                v = Rational::round_dyadic(e.at("h").get<double>(), 20);
                approximate = approximate || v.to_double() != e.at("h").get<double>();
            }
            h[m] = v;
            seen[m - 1] = 1;
        }
        for (std::size_t k = 0; k < seen.size(); ++k)
            if (!seen[k])
                throw Error(ErrorKind::InvalidEntropyTable, "no value for subset mask " + std::to_string(k + 1));
        return h;
    });
}

// ---------------------------------------------------------------- oracles

inline json oracle_to_json(std::size_t n, const std::vector<std::string>& labels,
                           const std::vector<std::string>& coords, const std::vector<OracleEntry>& entries)
{
    json j;
    j["n"] = n;
    j["M"] = coords.size();
    j["labels"] = labels;
    j["coordinates"] = coords;
    json es = json::array();
    for (const auto& e : entries) {
        std::vector<std::string> d;
        for (std::size_t l : e.delta)
            d.push_back(labels.at(l));
        es.push_back({{"delta", d}, {"tau", e.tau}, {"H", e.h}});
    }
    j["entries"] = es;
    return j;
}

inline TableOracle oracle_from_json(const json& j)
{
    return detail::guarded("oracle", [&] {
        auto labels = detail::strings(j.at("labels"));
        std::map<std::string, std::size_t> idx;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (!idx.emplace(labels[i], i).second)
                throw Error(ErrorKind::ParseError, "label " + labels[i] + " listed twice");
        const std::size_t M = j.at("M").get<std::size_t>();
        std::vector<std::string> coords;
        if (j.contains("coordinates"))
            coords = detail::strings(j.at("coordinates"));
        else
            for (std::size_t m = 0; m < M; ++m)
                coords.push_back("X" + std::to_string(m + 1));
        if (coords.size() != M)
            throw Error(ErrorKind::ParseError, "coordinate names do not match M");
        std::vector<OracleEntry> entries;
        for (const auto& e : j.at("entries")) {
            OracleEntry oe;
            for (const auto& l : e.at("delta")) {
                auto it = idx.find(l.is_string() ? l.get<std::string>() : l.dump());
                if (it == idx.end())
                    throw Error(ErrorKind::DanglingReference, "entry uses unknown label " + l.dump());
                oe.delta.push_back(it->second);
            }
            for (const auto& t : e.at("tau"))
                oe.tau.push_back(t.get<std::size_t>());
            oe.h = e.at("H").get<double>();
            entries.push_back(std::move(oe));
        }
        TableOracle o(labels, coords, entries);
        const std::size_t n = j.at("n").get<std::size_t>();
        if (o.support_size() != n)
            throw Error(ErrorKind::InconsistentOracle, "label count does not match n");
        return o;
    });
}

inline json to_json(const RecoveredDistribution& r, const std::vector<std::string>& label_names)
{
    json j;
    j["masses"] = r.masses;
    std::vector<std::string> ind;
    for (std::size_t l : r.indicators)
        ind.push_back(label_names.empty() ? std::to_string(l) : label_names.at(l));
    j["indicators"] = ind;
    j["distribution"] = to_json(r.joint);
    return j;
}

// ---------------------------------------------------------------- linear programs

inline std::string relation_text(Relation r) { return to_string(r); }

inline Relation relation_from(const std::string& s)
{
    if (s == ">=")
        return Relation::GreaterEqual;
    if (s == "<=")
        return Relation::LessEqual;
    if (s == "=" || s == "==")
        return Relation::Equal;
    throw Error(ErrorKind::ParseError, "unknown relation " + s);
}

inline json coefficients_json(const std::map<std::size_t, Rational>& c)
{
    json o = json::object();
    for (const auto& [k, v] : c)
        o[std::to_string(k)] = v.str();
    return o;
}

inline std::map<std::size_t, Rational> coefficients_from(const json& o)
{
    std::map<std::size_t, Rational> c;
    for (const auto& [k, v] : o.items()) {
        std::size_t pos = 0;
        unsigned long col = 0;
        try {
            col = std::stoul(k, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != k.size())
            throw Error(ErrorKind::ParseError, "bad column key " + k);
        c[col] = detail::rational(v);
    }
    return c;
}

inline json to_json(const LinearProgram& lp)
{
    json j;
    j["ground"] = lp.ground;
    j["extra_columns"] = lp.extra_columns;
    j["free_columns"] = lp.free_columns;
    j["column_encoding"] = "column j < 2^|ground|-1 is h(subset with mask j+1), first ground label = bit 0";
    json rows = json::array();
    for (const auto& c : lp.constraints)
        rows.push_back({{"coefficients", coefficients_json(c.coefficients)},
                        {"relation", relation_text(c.relation)},
                        {"rhs", c.rhs.str()},
                        {"tag", c.tag}});
    j["constraints"] = rows;
    if (lp.objective)
        j["objective"] = {{"sense", lp.objective->sense == Sense::Minimize ? "min" : "max"},
                          {"coefficients", coefficients_json(lp.objective->coefficients)}};
    return j;
}

inline LinearProgram program_from_json(const json& j)
{
    return detail::guarded("linear program", [&] {
        LinearProgram lp;
        lp.ground = detail::strings(j.at("ground"));
        if (lp.ground.size() > 20)
            throw Error(ErrorKind::GroundSetTooLarge, "ground set too large");
        if (j.contains("extra_columns"))
            lp.extra_columns = detail::strings(j.at("extra_columns"));
        if (j.contains("free_columns"))
            for (const auto& f : j.at("free_columns"))
                lp.free_columns.insert(f.get<std::size_t>());
        for (const auto& r : j.at("constraints")) {
            LinearConstraint c;
            c.coefficients = coefficients_from(r.at("coefficients"));
            c.relation = relation_from(r.at("relation").get<std::string>());
            c.rhs = detail::rational(r.at("rhs"));
            if (r.contains("tag"))
                c.tag = r.at("tag").get<std::string>();
            lp.constraints.push_back(std::move(c));
        }
        if (j.contains("objective")) {
            Objective o;
            const auto s = j.at("objective").at("sense").get<std::string>();
            if (s != "min" && s != "max")
                throw Error(ErrorKind::ParseError, "objective sense must be min or max");
            o.sense = s == "min" ? Sense::Minimize : Sense::Maximize;
            o.coefficients = coefficients_from(j.at("objective").at("coefficients"));
            lp.objective = std::move(o);
        }
        lp.validate();
        return lp;
    });
}

inline json witness_json(const LinearProgram& lp, const LpOutcome& out)
{
    json vals = json::array();
    for (std::size_t k = 0; k < out.witness.size(); ++k)
        vals.push_back({{"column", k}, {"name", lp.column_name(k)}, {"value", out.witness[k].str()}});
    json j{{"status", to_string(out.status)}, {"values", vals}};
    if (out.optimum)
        j["optimum"] = out.optimum->str();
    return j;
}

/// Nonzero multipliers only; rows in >= orientation.
inline json certificate_json(const LinearProgram& lp, const std::vector<Rational>& lambda)
{
    json mult = json::array();
    for (std::size_t i = 0; i < lambda.size(); ++i)
        if (!lambda[i].is_zero())
            mult.push_back({{"row", i}, {"tag", lp.constraints[i].tag}, {"value", lambda[i].str()}});
    return {{"status", "INFEASIBLE"},
            {"orientation", "each row read as >= (a <= row is negated); multipliers free on = rows"},
            {"rows", lp.constraints.size()},
            {"multipliers", mult}};
}

inline std::vector<Rational> certificate_from_json(const json& j, std::size_t rows)
{
    return detail::guarded("certificate", [&] {
        std::vector<Rational> lambda(rows);
        for (const auto& m : j.at("multipliers")) {
            std::size_t r = m.at("row").get<std::size_t>();
            if (r >= rows)
                throw Error(ErrorKind::DimensionMismatch, "multiplier for row " + std::to_string(r));
            lambda[r] = detail::rational(m.at("value"));
        }
        return lambda;
    });
}

// ---------------------------------------------------------------- networks and codes

inline NetworkSpec network_from_json(const json& j)
{
    return detail::guarded("network", [&] {
        NetworkSpec s;
        s.nodes = detail::strings(j.at("nodes"));
        for (const auto& e : j.at("edges")) {
            Edge edge;
            edge.label = e.at("label").get<std::string>();
            edge.tail = e.at("tail").is_string() ? e.at("tail").get<std::string>() : e.at("tail").dump();
            edge.head = e.at("head").is_string() ? e.at("head").get<std::string>() : e.at("head").dump();
            if (e.contains("cap") && !e.at("cap").is_null())
                edge.cap = detail::rational(e.at("cap"));
            s.edges.push_back(std::move(edge));
        }
        for (const auto& src : j.at("sources")) {
            SourcePlacement p;
            p.label = src.at("label").get<std::string>();
            p.at = detail::strings(src.at("at"));
            if (src.contains("demanded_at"))
                p.demanded_at = detail::strings(src.at("demanded_at"));
            s.sources.push_back(std::move(p));
        }
        return s;
    });
}

inline json to_json(const NetworkSpec& s)
{
    json edges = json::array();
    for (const auto& e : s.edges) {
        json je{{"label", e.label}, {"tail", e.tail}, {"head", e.head}};
        je["cap"] = e.cap ? json(e.cap->str()) : json(nullptr);
        edges.push_back(je);
    }
    json srcs = json::array();
    for (const auto& p : s.sources)
        srcs.push_back({{"label", p.label}, {"at", p.at}, {"demanded_at", p.demanded_at}});
    return {{"nodes", s.nodes}, {"edges", edges}, {"sources", srcs}};
}

inline CodeTable code_table_from_json(const json& j)
{
    CodeTable t;
    t.inputs = detail::strings(j.at("inputs"));
    for (const auto& row : j.at("table")) {
        auto key = detail::strings(row.at("in"));
        auto out = row.at("out").is_string() ? row.at("out").get<std::string>() : row.at("out").dump();
        if (!t.table.emplace(std::move(key), std::move(out)).second)
            throw Error(ErrorKind::DuplicateOutcome, "repeated table row");
    }
    return t;
}

inline NetworkCode code_from_json(const json& j)
{
    return detail::guarded("code", [&] {
        NetworkCode c;
        for (const auto& [label, e] : j.at("edges").items()) {
            EdgeCode ec;
            ec.alphabet = detail::strings(e.at("alphabet"));
            ec.function = code_table_from_json(e);
            c.edges.emplace(label, std::move(ec));
        }
        for (const auto& d : j.at("decoders")) {
            Decoder dec;
            dec.node = d.at("node").is_string() ? d.at("node").get<std::string>() : d.at("node").dump();
            dec.source = d.at("source").get<std::string>();
            dec.function = code_table_from_json(d);
            c.decoders.push_back(std::move(dec));
        }
        return c;
    });
}

inline json to_json(const CodeReport& r)
{
    json edges = json::array();
    for (const auto& e : r.edges) {
        json je{{"label", e.label}, {"entropy", e.entropy}, {"rate", e.rate}, {"within_capacity", e.within_capacity}};
        je["cap"] = e.cap ? json(e.cap->str()) : json(nullptr);
        edges.push_back(je);
    }
    json dec = json::array();
    for (const auto& d : r.decoders)
        dec.push_back({{"node", d.node}, {"source", d.source}, {"success", d.success}, {"error_mass", d.error_mass.str()}});
    return {{"success", r.success}, {"edges", edges}, {"decoders", dec}, {"joint", to_json(r.joint)}};
}

// ---------------------------------------------------------------- bases and partitions

inline SubspaceBasis basis_from_json(const json& j)
{
    return detail::guarded("basis", [&] {
        SubspaceBasis b;
        b.q = j.contains("q") ? j.at("q").get<std::uint32_t>() : 2u;
        b.m = j.at("m").get<std::size_t>();
        for (const auto& src : j.at("bases")) {
            std::vector<FieldVector> vs;
            for (const auto& v : src) {
                FieldVector f;
                if (v.is_string()) {
                    for (char ch : v.get<std::string>())
                        f.push_back(static_cast<std::uint32_t>(ch - '0'));
                } else {
                    for (const auto& x : v)
                        f.push_back(x.get<std::uint32_t>());
                }
                vs.push_back(std::move(f));
            }
            b.bases.push_back(std::move(vs));
        }
        if (j.contains("names"))
            b.names = detail::strings(j.at("names"));
        return b;
    });
}

/// {"partitions": [block, ...]} where a block lists atoms of the source
/// support, each either a 1-based rank (by decreasing mass) or an outcome
/// (list of symbols, one per source).
inline std::vector<PartitionLabel> partitions_from_json(const json& j, const JointDistribution& sources)
{
    return detail::guarded("partitions", [&] {
        PartitionSystem ps(sources, std::vector<PartitionLabel>{});
        const std::size_t n = ps.support_size();
        std::vector<PartitionLabel> out;
        for (const auto& block : j.at("partitions")) {
            std::uint32_t mask = 0;
            for (const auto& atom : block) {
                std::size_t k = n;
                if (atom.is_number_integer()) {
                    long r = atom.get<long>();
                    if (r < 1 || static_cast<std::size_t>(r) > n)
                        throw Error(ErrorKind::OutOfRange, "atom rank " + std::to_string(r) + " out of range");
                    k = static_cast<std::size_t>(r - 1);
                } else {
                    auto syms = detail::strings(atom);
                    for (std::size_t a = 0; a < n && k == n; ++a) {
                        bool match = syms.size() == ps.atoms()[a].size();
                        for (std::size_t i = 0; match && i < syms.size(); ++i)
                            match = sources.symbol(i, ps.atoms()[a][i]) == syms[i];
                        if (match)
                            k = a;
                    }
                    if (k == n)
                        throw Error(ErrorKind::UnknownSymbol, "outcome " + atom.dump() + " is not in the support");
                }
                mask |= 1u << k;
            }
            out.push_back(PartitionLabel::canonical(mask, n));
        }
        return out;
    });
}

} // namespace entbound::io
