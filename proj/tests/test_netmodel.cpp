#include <gtest/gtest.h>

#include <entbound/netmodel.hpp>

#include "support.hpp"

using namespace entbound;
using testsupport::data;
using testsupport::load;

namespace {

Network load_net(const std::string& name) { return Network(io::network_from_json(io::read_json_file(data(name)))); }

NetworkCode load_code(const std::string& name) { return io::code_from_json(io::read_json_file(data(name))); }

ErrorKind kind_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::ParseError;
}

const CapacityTuple kUnit(4, Rational(1));

// source a at 1 wanted at 2, source b at 1 wanted at 3; e3 relays 2 -> 3
NetworkSpec small_spec()
{
    NetworkSpec s;
    s.nodes = {"1", "2", "3"};
    s.edges = {{"e1", "1", "2", Rational(1)}, {"e2", "1", "3", Rational(1)}, {"e3", "2", "3", Rational(1)}};
    s.sources = {{"a", {"1"}, {"2"}}, {"b", {"1"}, {"3"}}};
    return s;
}

JointDistribution two_bits(bool correlated)
{
    std::vector<TableEntry> es;
    for (auto x : {"0", "1"})
        for (auto y : {"0", "1"})
            if (!correlated || std::string(x) == y)
                es.push_back({{x, y}, correlated ? Rational(1, 2) : Rational(1, 4)});
    return joint_from_table({"a", "b"}, {{"0", "1"}, {"0", "1"}}, es);
}

} // namespace

TEST(Validate, ExampleNetworkAndErrors)
{
    auto net = load_net("fig1_network.json");
    EXPECT_EQ(net.capacitated().size(), 4u);
    EXPECT_EQ(net.edge_order().size(), 7u);

    auto spec = small_spec();
    spec.edges.push_back({"back", "3", "1", Rational(1)});
    EXPECT_EQ(kind_of([&] { validate(spec); }), ErrorKind::CyclicGraph);
    spec = small_spec();
    spec.edges.push_back({"loop", "2", "2", Rational(1)});
    EXPECT_EQ(kind_of([&] { validate(spec); }), ErrorKind::CyclicGraph);
    spec = small_spec();
    spec.edges[0].cap = Rational(0);
    EXPECT_EQ(kind_of([&] { validate(spec); }), ErrorKind::NonPositiveCapacity);
    spec = small_spec();
    spec.sources[0].demanded_at = {"1"};
    EXPECT_EQ(kind_of([&] { validate(spec); }), ErrorKind::SourceDemandOverlap);
    spec = small_spec();
    spec.edges[1].head = "9";
    EXPECT_EQ(kind_of([&] { validate(spec); }), ErrorKind::DanglingReference);
    spec = small_spec();
    spec.edges[1].label = "e1";
    EXPECT_EQ(kind_of([&] { validate(spec); }), ErrorKind::ParseError);
}

TEST(Validate, ParallelEdgesAllowed)
{
    auto spec = small_spec();
    spec.edges.push_back({"e1b", "1", "2", Rational(1, 2)});
    EXPECT_NO_THROW(validate(spec));
}

TEST(CompileBound, ExampleBasicRows)
{
    auto net = load_net("fig1_network.json");
    auto cb = compile_bound(net, load("fig1_sources.json"), BoundVariant::basic(), kUnit);
    EXPECT_EQ(cb.lp.ground, (std::vector<std::string>{"s1", "s2", "s3", "e1", "e2", "e3", "e4"}));
    EXPECT_EQ(cb.lp.num_columns(), 127u);
    EXPECT_FALSE(cb.approximate);
    std::map<std::string, std::size_t> tags;
    for (const auto& c : cb.lp.constraints)
        ++tags[c.tag];
    EXPECT_EQ(tags["elemental"], elemental_count(7));
    EXPECT_EQ(tags["source-entropy"], 7u);
    EXPECT_EQ(tags["encoding"], 4u);
    EXPECT_EQ(tags["decoding"], 3u);
    EXPECT_EQ(tags["capacity"], 4u);
    EXPECT_EQ(cb.lp.constraints.size(), 697u);

    // h(s3 | e1, e4) = 0 at node 5 (e1 arrives through the relay)
    const auto g = cb.lp.ground;
    auto col = [&](std::vector<std::string> names) {
        SubsetMask m = 0;
        for (const auto& n : names)
            m |= SubsetMask{1} << (std::find(g.begin(), g.end(), n) - g.begin());
        return LinearProgram::column_of(m);
    };
    bool found = false;
    for (const auto& c : cb.lp.constraints)
        if (c.tag == "decoding" && c.coefficients.size() == 2 && c.coefficients.count(col({"s3", "e1", "e4"}))
            && c.coefficients.count(col({"e1", "e4"})))
            found = true;
    EXPECT_TRUE(found);
}

TEST(CompileBound, ExampleAuxiliaryRows)
{
    auto net = load_net("fig1_network.json");
    auto cb = compile_bound(net, load("fig1_sources.json"),
                            BoundVariant::with_auxiliaries(load("fig1_auxiliary.json")), kUnit);
    EXPECT_EQ(cb.lp.ground.size(), 10u);
    EXPECT_EQ(cb.lp.num_columns(), 1023u);
    EXPECT_EQ(cb.lp.constraints.size(), elemental_count(10) + 63u + 4u + 3u + 4u);
    // h(k_i, i in beta) = |beta|
    for (const auto& c : cb.lp.constraints) {
        if (c.tag != "source-entropy" || c.coefficients.size() != 1)
            continue;
        SubsetMask m = static_cast<SubsetMask>(c.coefficients.begin()->first + 1);
        if ((m & 0b1111111) == 0)
            EXPECT_EQ(c.rhs, Rational(popcount(m)));
    }
}

TEST(CompileBound, EmptyNetwork)
{
    NetworkSpec s;
    s.nodes = {"u"};
    s.sources = {{"s", {"u"}, {}}};
    Network net(s);
    auto d = joint_from_table({"s"}, {{"0", "1"}}, {{{"0"}, Rational(1, 2)}, {{"1"}, Rational(1, 2)}});
    auto cb = compile_bound(net, d, BoundVariant::basic(), CapacityTuple{});
    ASSERT_EQ(cb.lp.constraints.size(), 2u);
    EXPECT_EQ(cb.lp.constraints[0].tag, "elemental");
    EXPECT_EQ(cb.lp.constraints[1].tag, "source-entropy");
    EXPECT_EQ(lp_solve(cb.lp).status, LpStatus::Feasible);
}

TEST(CompileBound, Errors)
{
    auto net = load_net("fig1_network.json");
    auto src = load("fig1_sources.json");
    EXPECT_EQ(kind_of([&] { compile_bound(net, src, BoundVariant::basic(), CapacityTuple(3, Rational(1))); }),
              ErrorKind::DimensionMismatch);
    EXPECT_EQ(kind_of([&] {
                  compile_bound(net, src, BoundVariant::with_auxiliaries(load("fig1_auxiliary.json")), kUnit, false, 9);
              }),
              ErrorKind::GroundSetTooLarge);
    // an entropy table that is not a polymatroid
    RationalSetFunction t({"s1", "s2", "s3"});
    for (SubsetMask m = 1; m <= 7; ++m)
        t[m] = Rational(popcount(m) == 1 ? 2 : 1);
    EXPECT_EQ(kind_of([&] { compile_bound(net, t, BoundVariant::basic(), kUnit); }), ErrorKind::InvalidEntropyTable);
    // auxiliaries must extend the given sources
    auto other = load("fig1_witness.json");
    EXPECT_EQ(kind_of([&] { compile_bound(net, src, BoundVariant::with_auxiliaries(other), kUnit); }),
              ErrorKind::InvalidEntropyTable);
}

TEST(CompileBound, ApproximateEntropies)
{
    Network net(small_spec());
    std::vector<TableEntry> es = {{{"0", "0"}, Rational(1, 3)}, {{"1", "0"}, Rational(1, 3)}, {{"1", "1"}, Rational(1, 3)}};
    auto d = joint_from_table({"a", "b"}, {{"0", "1"}, {"0", "1"}}, es);
    auto cb = compile_bound(net, d, BoundVariant::basic());
    EXPECT_TRUE(cb.approximate);
    for (const auto& c : cb.lp.constraints)
        if (c.tag == "source-entropy")
            EXPECT_EQ(c.rhs * Rational(1 << 20), Rational::round_dyadic(c.rhs.to_double() * (1 << 20), 0));
}

TEST(CheckTuple, ExampleBasic)
{
    auto net = load_net("fig1_network.json");
    auto a = check_tuple(net, load("fig1_sources.json"), BoundVariant::basic(), kUnit);
    ASSERT_EQ(a.outcome.status, LpStatus::Feasible);
    auto cb = compile_bound(net, load("fig1_sources.json"), BoundVariant::basic(), kUnit);
    EXPECT_TRUE(verify_assignment(cb.lp, a.outcome.witness));
}

TEST(CheckTuple, ZeroTuple)
{
    auto net = load_net("fig1_network.json");
    auto src = load("fig1_sources.json");
    auto a = check_tuple(net, src, BoundVariant::basic(), CapacityTuple(4, Rational(0)));
    ASSERT_EQ(a.outcome.status, LpStatus::Infeasible);
    auto cb = compile_bound(net, src, BoundVariant::basic(), CapacityTuple(4, Rational(0)));
    EXPECT_TRUE(verify_certificate(cb.lp, a.outcome.certificate));
}

TEST(CheckTuple, EntropyTableInput)
{
    auto net = load_net("fig1_network.json");
    RationalSetFunction t({"s1", "s2", "s3"});
    for (SubsetMask m = 1; m <= 7; ++m)
        t[m] = Rational(popcount(m) == 1 ? 2 : 3);
    auto a = check_tuple(net, t, BoundVariant::basic(), kUnit);
    EXPECT_EQ(a.outcome.status, LpStatus::Feasible);
    auto b = check_tuple(net, t, BoundVariant::basic(), CapacityTuple{Rational(1), Rational(1), Rational(1), Rational(1, 2)});
    EXPECT_EQ(b.outcome.status, LpStatus::Infeasible);
}

TEST(CheckTuple, PartitionVariant)
{
    auto net = load_net("fig1_network.json");
    auto src = load("fig1_sources.json");
    // the three single-bit functions b0, b1, b2 as partitions of the 8 atoms
    PartitionSystem ps(src, std::vector<PartitionLabel>{});
    std::vector<PartitionLabel> labels;
    for (int bitpos : {0, 1, 2}) {
        std::uint32_t block = 0;
        for (std::size_t a = 0; a < ps.atoms().size(); ++a) {
            const auto& o = ps.atoms()[a];
            const std::string s1 = src.symbol(0, o[0]), s2 = src.symbol(1, o[1]);
            const char b = bitpos == 0 ? s1[0] : bitpos == 1 ? s1[1] : s2[1];
            if (b == '1')
                block |= 1u << a;
        }
        labels.push_back(PartitionLabel::canonical(block, ps.atoms().size()));
    }
    auto cb = compile_bound(net, src, BoundVariant::with_partitions(labels), kUnit);
    EXPECT_EQ(cb.lp.ground.size(), 10u);
    // same source-entropy data as the explicit auxiliaries, so same row set
    auto aux = compile_bound(net, src, BoundVariant::with_auxiliaries(load("fig1_auxiliary.json")), kUnit);
    std::multiset<std::pair<std::map<std::size_t, Rational>, Rational>> r1, r2;
    for (const auto& c : cb.lp.constraints)
        r1.insert({c.coefficients, c.rhs});
    for (const auto& c : aux.lp.constraints)
        r2.insert({c.coefficients, c.rhs});
    EXPECT_EQ(r1, r2);
}

TEST(MinScaling, ExampleBasic)
{
    auto net = load_net("fig1_network.json");
    auto s = min_scaling(net, load("fig1_sources.json"), BoundVariant::basic(), kUnit);
    ASSERT_TRUE(s.t);
    EXPECT_LE(*s.t, Rational(1));
    EXPECT_EQ(*s.t, Rational(1)); // frozen LP output
}

TEST(MinScaling, ExampleAuxiliaryFrozen)
{
    auto net = load_net("fig1_network.json");
    auto s = min_scaling(net, load("fig1_sources.json"), BoundVariant::with_auxiliaries(load("fig1_auxiliary.json")),
                         kUnit);
    ASSERT_TRUE(s.t);
    EXPECT_GT(*s.t, Rational(1));
    EXPECT_EQ(*s.t, Rational(6, 5)); // frozen LP output
}

TEST(MinScaling, ZeroEntropySources)
{
    Network net(small_spec());
    auto d = joint_from_table({"a", "b"}, {{"0"}, {"0"}}, {{{"0", "0"}, Rational(1)}});
    auto s = min_scaling(net, d, BoundVariant::basic(), CapacityTuple(3, Rational(1)));
    ASSERT_TRUE(s.t);
    EXPECT_EQ(*s.t, Rational(0));
}

TEST(EvaluateCode, DataFiles)
{
    auto bf = evaluate_code(load_net("butterfly_network.json"), load("butterfly_sources.json"),
                            load_code("butterfly_code.json"));
    EXPECT_TRUE(bf.success);
    for (const auto& e : bf.edges)
        if (e.label == "m")
            EXPECT_NEAR(e.entropy, 1.0, 1e-12);

    auto id = evaluate_code(load_net("identity_network.json"), load("identity_sources.json"),
                            load_code("identity_code.json"));
    EXPECT_TRUE(id.success);
    ASSERT_EQ(id.edges.size(), 1u);
    EXPECT_NEAR(id.edges[0].entropy, 1.0, 1e-12);

    auto f1 = evaluate_code(load_net("fig1_network.json"), load("fig1_sources.json"), load_code("fig1_code.json"));
    EXPECT_FALSE(f1.success);
    for (const auto& d : f1.decoders) {
        if (d.source == "s3") {
            EXPECT_EQ(d.node, "5");
            EXPECT_FALSE(d.success);
            EXPECT_GT(d.error_mass, Rational(0));
        } else {
            EXPECT_TRUE(d.success);
        }
    }
    // the same functions on the modified sources decode everything
    auto wit = load("fig1_witness.json");
    auto code = load_code("fig1_code.json");
    auto& e4 = code.edges.at("e4").function;
    e4.table.clear();
    for (auto x : {"0", "1"})
        for (auto y : {"0", "1"})
            e4.table[{std::string(x) + y}] = y;
    auto& dec = code.decoders.back().function;
    for (auto& [k, v] : dec.table)
        v = k[0] + k[1];
    auto ok = evaluate_code(load_net("fig1_network.json"), wit, code);
    EXPECT_TRUE(ok.success);
}

TEST(EvaluateCode, Errors)
{
    auto net = load_net("identity_network.json");
    auto d = load("identity_sources.json");
    auto code = load_code("identity_code.json");
    auto missing = code;
    missing.edges.at("e").function.table.erase({"1"});
    EXPECT_EQ(kind_of([&] { evaluate_code(net, d, missing); }), ErrorKind::MissingTableEntry);
    auto bad = code;
    bad.edges.at("e").function.table[{"1"}] = "7";
    EXPECT_EQ(kind_of([&] { evaluate_code(net, d, bad); }), ErrorKind::AlphabetMismatch);
    auto nodec = code;
    nodec.decoders.clear();
    EXPECT_EQ(kind_of([&] { evaluate_code(net, d, nodec); }), ErrorKind::MissingTableEntry);
}

// ---------------------------------------------------------------- properties

TEST(Properties, CodeEntropiesAreWitnesses)
{
    // random DAGs, independent uniform bit sources, XOR codes: all entropies
    // are integers, so the check is exact
    std::mt19937_64 rng(61);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int trial = 0; trial < 12; ++trial) {
        const int V = 4, S = 2;
        NetworkSpec spec;
        for (int v = 0; v < V; ++v)
            spec.nodes.push_back(std::to_string(v));
        int ecount = 0;
        for (int u = 0; u < V; ++u)
            for (int v = u + 1; v < V; ++v)
                if (coin(rng) && ecount < 5)
                    spec.edges.push_back({"e" + std::to_string(ecount++), std::to_string(u), std::to_string(v), Rational(1)});
        for (int s = 0; s < S; ++s)
            spec.sources.push_back({"s" + std::to_string(s), {std::to_string(s % 2)}, {}});
        Network net0(spec);

        std::vector<TableEntry> es;
        for (int b = 0; b < 4; ++b)
            es.push_back({{std::to_string(b & 1), std::to_string(b >> 1)}, Rational(1, 4)});
        auto dist = joint_from_table({"s0", "s1"}, {{"0", "1"}, {"0", "1"}}, es);

        NetworkCode code;
        for (const auto& e : spec.edges) {
            EdgeCode ec;
            ec.alphabet = {"0", "1"};
            std::vector<std::string> avail;
            auto in = net0.inputs_at(net0.node_index(e.tail));
            for (auto s : in.sources)
                avail.push_back(spec.sources[s].label);
            for (auto k : in.edges)
                avail.push_back(spec.edges[k].label);
            for (const auto& a : avail)
                if (coin(rng))
                    ec.function.inputs.push_back(a);
            const std::size_t w = ec.function.inputs.size();
            for (std::uint32_t x = 0; x < (1u << w); ++x) {
                std::vector<std::string> key;
                for (std::size_t k = 0; k < w; ++k)
                    key.push_back(std::to_string((x >> k) & 1));
                ec.function.table[key] = std::to_string(std::popcount(x) & 1);
            }
            code.edges[e.label] = ec;
        }
        auto rep = evaluate_code(net0, dist, code);

        // demand each source wherever it is decodable
        for (int s = 0; s < S; ++s)
            for (int v = 0; v < V; ++v) {
                const std::string node = std::to_string(v);
                if (std::find(spec.sources[s].at.begin(), spec.sources[s].at.end(), node) != spec.sources[s].at.end())
                    continue;
                auto in = net0.inputs_at(static_cast<std::size_t>(v));
                std::vector<std::string> given;
                for (auto k : in.sources)
                    given.push_back(spec.sources[k].label);
                for (auto k : in.edges)
                    given.push_back(spec.edges[k].label);
                if (!given.empty() && is_function_of(rep.joint, {spec.sources[s].label}, given))
                    spec.sources[s].demanded_at.push_back(node);
            }
        Network net(spec);
        CapacityTuple caps;
        for (auto k : net.capacitated())
            caps.push_back(Rational::round_dyadic(entropy_of(rep.joint, {spec.edges[k].label}), 0));
        auto cb = compile_bound(net, dist, BoundVariant::basic(), caps);
        bool exact = false;
        auto h = rational_entropy_vector(rep.joint, cb.lp.ground, exact);
        ASSERT_TRUE(exact);
        EXPECT_TRUE(verify_witness(cb.lp, h)) << trial;
    }
}

TEST(Properties, MonotoneInTuple)
{
    auto net = load_net("fig1_network.json");
    auto src = load("fig1_sources.json");
    std::mt19937_64 rng(62);
    std::uniform_int_distribution<int> half(0, 4), up(0, 2);
    int feasible = 0;
    for (int trial = 0; trial < 15; ++trial) {
        CapacityTuple c, c2;
        for (int k = 0; k < 4; ++k) {
            c.push_back(Rational(half(rng), 2));
            c2.push_back(c.back() + Rational(up(rng), 2));
        }
        auto a = check_tuple(net, src, BoundVariant::basic(), c);
        if (a.outcome.status != LpStatus::Feasible)
            continue;
        ++feasible;
        EXPECT_EQ(check_tuple(net, src, BoundVariant::basic(), c2).outcome.status, LpStatus::Feasible);
    }
    EXPECT_GT(feasible, 0);
}

TEST(Properties, AuxiliaryFeasibleImpliesBasic)
{
    Network net(small_spec());
    std::mt19937_64 rng(63);
    std::uniform_int_distribution<int> q(0, 4), which(0, 2);
    int aux_feasible = 0;
    for (int trial = 0; trial < 20; ++trial) {
        auto src = two_bits(trial % 4 == 0);
        // K: a, b or a xor b
        const int w = which(rng);
        std::vector<TableEntry> es;
        for (const auto& [o, p] : src.pmf()) {
            const int a = static_cast<int>(o[0]), b = static_cast<int>(o[1]);
            const int k = w == 0 ? a : w == 1 ? b : a ^ b;
            es.push_back({{std::to_string(a), std::to_string(b), std::to_string(k)}, p});
        }
        auto aux = joint_from_table({"a", "b", "K"}, {{"0", "1"}, {"0", "1"}, {"0", "1"}}, es);
        CapacityTuple c{Rational(q(rng), 2), Rational(q(rng), 2), Rational(q(rng), 2)};
        auto ra = check_tuple(net, src, BoundVariant::with_auxiliaries(aux), c);
        auto rb = check_tuple(net, src, BoundVariant::basic(), c);
        if (ra.outcome.status == LpStatus::Feasible) {
            ++aux_feasible;
            EXPECT_EQ(rb.outcome.status, LpStatus::Feasible);
        }
        if (rb.outcome.status == LpStatus::Infeasible)
            EXPECT_EQ(ra.outcome.status, LpStatus::Infeasible);
    }
    EXPECT_GT(aux_feasible, 0);
}

TEST(Properties, RowCounts)
{
    for (const auto& name : {"fig1_network.json", "butterfly_network.json", "identity_network.json"}) {
        auto net = load_net(name);
        const auto& spec = net.spec();
        JointDistribution d;
        std::vector<std::string> vars;
        std::vector<std::vector<std::string>> alpha;
        for (const auto& s : spec.sources) {
            vars.push_back(s.label);
            alpha.push_back({"0"});
        }
        d = joint_from_table(vars, alpha, {{std::vector<std::string>(vars.size(), "0"), Rational(1)}});
        auto cb = compile_bound(net, d, BoundVariant::basic());
        const std::size_t S = spec.sources.size(), E = net.capacitated().size();
        std::size_t demands = 0;
        for (const auto& s : spec.sources)
            demands += s.demanded_at.size();
        EXPECT_EQ(cb.lp.constraints.size(), elemental_count(S + E) + ((1u << S) - 1) + E + demands + E) << name;
    }
}
