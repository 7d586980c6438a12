// One PASS/FAIL line per acceptance criterion; nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sys/wait.h>

#include <entbound/auxgen.hpp>
#include <entbound/io.hpp>
#include <entbound/netmodel.hpp>
#include <entbound/partitions.hpp>
#include <entbound/solve.hpp>

#include "lp_oracle.hpp"
#include "support.hpp"

using namespace entbound;
using testsupport::data;
using testsupport::load;

namespace {

using Clock = std::chrono::steady_clock;

struct Failed {
    std::string why;
};

void require(bool ok, const std::string& why)
{
    if (!ok)
        throw Failed{why};
}

int failures = 0;

void criterion(int id, const std::string& title, double budget_s, const std::function<void()>& body)
{
    const auto t0 = Clock::now();
    std::string why;
    try {
        body();
    } catch (const Failed& f) {
        why = f.why;
    } catch (const std::exception& e) {
        why = std::string("exception: ") + e.what();
    }
    const double s = std::chrono::duration<double>(Clock::now() - t0).count();
    if (why.empty() && s > budget_s)
        why = "took " + std::to_string(s) + " s, budget " + std::to_string(budget_s) + " s";
    if (!why.empty())
        ++failures;
    std::printf("criterion %2d %s  %s (%.2f s)%s%s\n", id, why.empty() ? "PASS" : "FAIL", title.c_str(), s,
                why.empty() ? "" : "  ", why.c_str());
    std::fflush(stdout);
}

Network fig1() { return Network(io::network_from_json(io::read_json_file(data("fig1_network.json")))); }

std::string run_cli(const std::string& args, int& code)
{
    std::string out;
    FILE* p = popen((std::string(ENTBOUND_CLI) + " " + args + " 2>/dev/null").c_str(), "r");
    require(p != nullptr, "cannot start the CLI");
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, p)) > 0)
        out.append(buf, n);
    const int st = pclose(p);
    code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return out;
}

bool masses_match(std::vector<double> got, std::vector<double> want, double tol)
{
    if (got.size() != want.size())
        return false;
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    for (std::size_t k = 0; k < got.size(); ++k)
        if (std::abs(got[k] - want[k]) > tol)
            return false;
    return true;
}

std::size_t rank_gf2(std::vector<unsigned> rows)
{
    std::size_t r = 0;
    for (unsigned bit = 1; bit; bit <<= 1) {
        auto it = std::find_if(rows.begin() + static_cast<long>(r), rows.end(), [&](unsigned v) { return v & bit; });
        if (it == rows.end())
            continue;
        std::iter_swap(rows.begin() + static_cast<long>(r), it);
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (i != r && (rows[i] & bit))
                rows[i] ^= rows[r];
        if (++r == rows.size())
            break;
    }
    return r;
}

std::map<std::vector<std::string>, Rational> named(const JointDistribution& d)
{
    std::map<std::vector<std::string>, Rational> out;
    for (const auto& [o, p] : d.pmf()) {
        std::vector<std::string> s;
        for (std::size_t i = 0; i < o.size(); ++i)
            s.push_back(d.symbol(i, o[i]));
        out[s] += p;
    }
    return out;
}

} // namespace

int main()
{
    const CapacityTuple unit(4, Rational(1));

    criterion(1, "three-source network, basic bound feasible at (1,1,1,1), witness verifies exactly", 10, [&] {
        int code = 0;
        auto out = run_cli("bound --network " + data("fig1_network.json") + " --dist " + data("fig1_sources.json")
                               + " --variant basic --tuple 1,1,1,1",
                           code);
        require(code == 0, "CLI exit code " + std::to_string(code));
        auto rep = io::json::parse(out);
        require(rep["outcome"]["status"] == "FEASIBLE", "CLI status " + rep["outcome"]["status"].dump());
        require(rep["outcome"]["columns"] == 127, "expected 127 columns");

        auto cb = compile_bound(fig1(), load("fig1_sources.json"), BoundVariant::basic(), unit);
        bool exact = false;
        auto h = rational_entropy_vector(load("fig1_witness.json"), cb.lp.ground, exact);
        require(exact, "witness entropies are not exact");
        require(verify_witness(cb.lp, h), "witness fails the compiled system");
    });

    criterion(2, "same tuple infeasible with auxiliaries, Farkas certificate verifies", 600, [&] {
        auto net = fig1();
        auto src = load("fig1_sources.json");
        auto variant = BoundVariant::with_auxiliaries(load("fig1_auxiliary.json"));
        auto cb = compile_bound(net, src, variant, unit);
        require(cb.lp.num_columns() == 1023, "expected 1023 columns");
        auto a = check_tuple(net, src, variant, unit);
        require(a.outcome.status == LpStatus::Infeasible, std::string("status ") + to_string(a.outcome.status));
        require(verify_certificate(cb.lp, a.outcome.certificate), "certificate does not verify");
    });

    criterion(3, "source and auxiliary entropy constants exact", 60, [&] {
        auto cb = compile_bound(fig1(), load("fig1_sources.json"),
                                BoundVariant::with_auxiliaries(load("fig1_auxiliary.json")), unit);
        // generators over F_2^3: s1 = (b0,b1), s2 = (b0,b2), s3 = (b1,b2), k_i = b_i
        const std::vector<std::vector<unsigned>> gen = {{1, 2}, {1, 4}, {2, 4}, {}, {}, {}, {}, {1}, {2}, {4}};
        std::size_t checked = 0;
        for (const auto& c : cb.lp.constraints) {
            if (c.tag != "source-entropy")
                continue;
            require(c.coefficients.size() == 1 && c.relation == Relation::Equal, "malformed source row");
            const SubsetMask m = static_cast<SubsetMask>(c.coefficients.begin()->first + 1);
            std::vector<unsigned> rows;
            for (std::size_t i = 0; i < gen.size(); ++i)
                if (m & (SubsetMask{1} << i))
                    rows.insert(rows.end(), gen[i].begin(), gen[i].end());
            require(c.rhs == Rational(static_cast<long>(rank_gf2(rows))), "wrong constant for mask " + std::to_string(m));
            const auto pc = popcount(m);
            if ((m & 0b1110000000) == 0)
                require(c.rhs == Rational(pc == 1 ? 2 : 3), "source constant");
            if ((m & 0b0000000111) == 0)
                require(c.rhs == Rational(pc), "auxiliary constant");
            ++checked;
        }
        require(checked == 63, "expected 63 source rows, saw " + std::to_string(checked));
    });

    criterion(4, "scalar recovery round trip, 200 shuffled oracles", 60, [&] {
        std::mt19937_64 rng(1004);
        for (int trial = 0; trial < 200; ++trial) {
            PartitionSystem s(testsupport::random_scalar(3 + trial % 4, rng, trial % 5 != 0));
            auto r = recover_scalar(SystemOracle(s, {}, 7000 + trial, trial % 2 == 0));
            require(masses_match(r.masses, s.masses_double(), 1e-6), "trial " + std::to_string(trial));
        }
    });

    criterion(5, "vector recovery separates the two table distributions, scalar oracles do not", 60, [&] {
        auto x = load("table1_x.json"), xs = load("table1_xstar.json");
        PartitionSystem px(x), pxs(xs);
        require(check_oracle_consistency(px, SystemOracle(pxs), false), "scalar-only oracles differ");
        require(!check_oracle_consistency(px, SystemOracle(pxs), true), "coordinate queries do not separate");
        auto rx = recover_vector(SystemOracle(px, {}, 3, false));
        auto rxs = recover_vector(SystemOracle(pxs, {}, 5, false));
        require(coordinate_isomorphic(rx.joint, x).has_value(), "recovery of X");
        require(coordinate_isomorphic(rxs.joint, xs).has_value(), "recovery of X*");
        require(!coordinate_isomorphic(rx.joint, rxs.joint).has_value(), "recovered structures coincide");
    });

    criterion(6, "partition system properties on 100 random distributions", 120, [&] {
        std::mt19937_64 rng(1006);
        std::size_t equality = 0;
        for (int trial = 0; trial < 100; ++trial) {
            PartitionSystem s(testsupport::random_scalar(2 + trial % 5, rng, trial % 3 != 0));
            auto rep = check_lemma2_properties(s);
            const std::size_t n = s.support_size(), L = (std::size_t{1} << (n - 1)) - 1;
            require(rep.distinct_pairs == L * (L - 1) / 2, "distinct pairs");
            require(rep.binary_functions == (std::size_t{1} << n) - 2, "binary functions");
            require(rep.basis_chains == L, "basis chains");
            equality += rep.equality_cases;
        }
        require(equality > 0, "no equality cases exercised");
    });

    criterion(7, "LP solver agrees with vertex enumeration on 500 random programs", 300, [&] {
        std::mt19937_64 rng(1007);
        std::uniform_int_distribution<std::size_t> vars(1, 6), rows(1, 12);
        for (int trial = 0; trial < 500; ++trial) {
            auto lp = lporacle::random_program(rng, vars(rng), rows(rng));
            auto ref = lporacle::solve(lp);
            auto o = lp_solve(lp);
            require(static_cast<int>(o.status) == static_cast<int>(ref.status), "status, trial " + std::to_string(trial));
            require(o.optimum.has_value() == ref.optimum.has_value(), "optimum presence, trial " + std::to_string(trial));
            if (o.optimum)
                require(o.optimum->to_mpq() == *ref.optimum, "optimum, trial " + std::to_string(trial));
        }
    });

    criterion(8, "linear sources reproduce the example and are uniform over subspaces", 120, [&] {
        auto ls = linearly_correlated(io::basis_from_json(io::read_json_file(data("fig1_bases.json"))));
        require(named(ls.sources) == named(load("fig1_sources.json")), "sources differ");
        require(named(ls.with_keys) == named(load("fig1_auxiliary.json")), "sources with keys differ");
        std::mt19937_64 rng(1008);
        const std::uint32_t qs[] = {2, 3, 5};
        int built = 0, drawn = 0;
        while (built < 50) {
            require(++drawn < 10000, "could not draw valid bases");
            SubspaceBasis b;
            b.q = qs[built % 3];
            b.m = 1 + rng() % 4;
            const std::size_t n = 1 + rng() % 3;
            for (std::size_t i = 0; i < n; ++i) {
                b.bases.emplace_back();
                for (std::size_t k = 0, dim = 1 + rng() % b.m; k < dim; ++k) {
                    FieldVector v(b.m);
                    for (auto& x : v)
                        x = static_cast<std::uint32_t>(rng() % b.q);
                    b.bases[i].push_back(v);
                }
            }
            LinearSources out;
            try {
                out = linearly_correlated(b);
            } catch (const Error& e) {
                if (e.kind() == ErrorKind::DependentBasisVectors || e.kind() == ErrorKind::SpanDeficient)
                    continue;
                throw;
            }
            ++built;
            require(uniform_over_subspaces(out.sources, b.q), "draw " + std::to_string(drawn));
        }
    });

    criterion(9, "common information edge cases", 60, [&] {
        std::mt19937_64 rng(1009);
        for (int trial = 0; trial < 20; ++trial) {
            auto x = testsupport::random_scalar(2 + trial % 5, rng, false);
            std::vector<TableEntry> es;
            for (const auto& [o, p] : x.pmf())
                es.push_back({{x.symbol(0, o[0]), x.symbol(0, o[0])}, p});
            auto xx = joint_from_table({"X", "Y"}, {x.alphabets()[0], x.alphabets()[0]}, es);
            auto r = gk_common_information(xx);
            const auto v = r.joint.variables();
            require(is_function_of(r.joint, {v[0]}, {v[2]}) && is_function_of(r.joint, {v[2]}, {v[0]}),
                    "K is not a relabelling of X");
            require(std::abs(r.h_k - entropy_of(x, {"X"})) < 1e-12, "H(K) != H(X)");
        }
        for (int trial = 0; trial < 20; ++trial) {
            auto px = testsupport::random_masses(2 + trial % 3, rng, false);
            auto py = testsupport::random_masses(2 + trial % 4, rng, false);
            std::vector<TableEntry> es;
            std::vector<std::string> ax, ay;
            for (std::size_t i = 0; i < px.size(); ++i)
                ax.push_back(std::to_string(i));
            for (std::size_t j = 0; j < py.size(); ++j)
                ay.push_back(std::to_string(j));
            for (std::size_t i = 0; i < px.size(); ++i)
                for (std::size_t j = 0; j < py.size(); ++j)
                    es.push_back({{ax[i], ay[j]}, px[i] * py[j]});
            auto r = gk_common_information(joint_from_table({"X", "Y"}, {ax, ay}, es));
            require(r.kernel.front().size() == 1 && r.h_k == 0.0, "independent pair has a common part");
        }
        for (const auto& f : {"xor_eps01.json", "xor_eps03.json"}) {
            auto r = gk_common_information(load(f));
            require(r.kernel.front().size() == 1 && r.h_k == 0.0, std::string(f) + " has a common part");
        }
    });

    criterion(10, "scalar recovery with Renyi 0.5, Renyi 2 and Tsallis 2 oracles", 120, [&] {
        std::mt19937_64 rng(1010);
        for (auto m : {EntropyMeasure::renyi(0.5), EntropyMeasure::renyi(2), EntropyMeasure::tsallis(2)})
            for (int trial = 0; trial < 50; ++trial) {
                PartitionSystem s(testsupport::random_scalar(2 + trial % 4, rng, trial % 4 != 0));
                auto r = recover_scalar(SystemOracle(s, m, 9000 + trial, trial % 2 == 0), m);
                require(masses_match(r.masses, s.masses_double(), 1e-6), m.name() + " trial " + std::to_string(trial));
            }
    });

    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
