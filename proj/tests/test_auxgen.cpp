#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include <entbound/auxgen.hpp>

#include "support.hpp"

using namespace entbound;
using testsupport::data;
using testsupport::load;

namespace {

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

// outcomes as symbol strings
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

// plain Gaussian elimination mod a prime, kept separate from the library
std::size_t rank_q(std::vector<std::vector<long>> rows, long q)
{
    std::size_t r = 0;
    const std::size_t cols = rows.empty() ? 0 : rows[0].size();
    for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
        std::size_t p = r;
        while (p < rows.size() && rows[p][c] % q == 0)
            ++p;
        if (p == rows.size())
            continue;
        std::swap(rows[p], rows[r]);
        long inv = 1;
        while ((rows[r][c] * inv) % q != 1)
            ++inv;
        for (auto& x : rows[r])
            x = (x * inv) % q;
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (i != r && rows[i][c] % q) {
                const long f = rows[i][c];
                for (std::size_t k = 0; k < cols; ++k)
                    rows[i][k] = ((rows[i][k] - f * rows[r][k]) % q + q) % q;
            }
        ++r;
    }
    return r;
}

JointDistribution pair(std::vector<TableEntry> es, std::size_t nx, std::size_t ny)
{
    std::vector<std::string> ax, ay;
    for (std::size_t i = 0; i < nx; ++i)
        ax.push_back(std::to_string(i));
    for (std::size_t i = 0; i < ny; ++i)
        ay.push_back(std::to_string(i));
    return joint_from_table({"X", "Y"}, {ax, ay}, std::move(es));
}

double h2(double p) { return p <= 0 || p >= 1 ? 0 : -p * std::log2(p) - (1 - p) * std::log2(1 - p); }

} // namespace

TEST(LinearlyCorrelated, ExampleBases)
{
    auto b = io::basis_from_json(io::read_json_file(data("fig1_bases.json")));
    auto ls = linearly_correlated(b);
    EXPECT_EQ(named(ls.sources), named(load("fig1_sources.json")));
    EXPECT_EQ(ls.with_keys.variables(), (std::vector<std::string>{"s1", "s2", "s3", "K1", "K2", "K3"}));
    EXPECT_EQ(named(ls.with_keys), named(load("fig1_auxiliary.json")));
    EXPECT_TRUE(uniform_over_subspaces(ls.sources, 2));
    // each source is a function of the keys
    for (const auto& s : {"s1", "s2", "s3"})
        EXPECT_TRUE(is_function_of(ls.with_keys, {s}, {"K1", "K2", "K3"}));
}

TEST(LinearlyCorrelated, Errors)
{
    SubspaceBasis b;
    b.q = 4;
    b.m = 1;
    b.bases = {{{1}}};
    EXPECT_EQ(kind_of([&] { linearly_correlated(b); }), ErrorKind::OutOfRange);
    b.q = 3;
    b.bases = {{{3}}};
    EXPECT_EQ(kind_of([&] { linearly_correlated(b); }), ErrorKind::OutOfRange);
    b.bases = {{{1, 0}}};
    EXPECT_EQ(kind_of([&] { linearly_correlated(b); }), ErrorKind::DimensionMismatch);
    b.m = 2;
    b.bases = {{{1, 2}, {2, 1}}};
    EXPECT_EQ(kind_of([&] { linearly_correlated(b); }), ErrorKind::DependentBasisVectors);
    b.bases = {{{1, 0}}, {{2, 0}}};
    EXPECT_EQ(kind_of([&] { linearly_correlated(b); }), ErrorKind::SpanDeficient);
    b.q = 2;
    b.m = 0;
    EXPECT_EQ(kind_of([&] { linearly_correlated(b); }), ErrorKind::OutOfRange);
    b.q = 5;
    b.m = 9; // 5^9 outcomes
    b.bases = {std::vector<FieldVector>{}};
    for (std::size_t i = 0; i < 9; ++i) {
        FieldVector v(9, 0);
        v[i] = 1;
        b.bases[0].push_back(v);
    }
    EXPECT_EQ(kind_of([&] { linearly_correlated(b); }), ErrorKind::SearchSpaceTooLarge);
}

TEST(LinearlyCorrelated, RandomBasesUniform)
{
    std::mt19937_64 rng(71);
    const std::uint32_t qs[] = {2, 3, 5};
    int built = 0;
    while (built < 50) {
        const std::uint32_t q = qs[built % 3];
        const std::size_t m = 1 + rng() % (q == 5 ? 3 : 4);
        const std::size_t n = 1 + rng() % 3;
        SubspaceBasis b;
        b.q = q;
        b.m = m;
        std::vector<std::vector<long>> all;
        for (std::size_t i = 0; i < n; ++i) {
            b.bases.emplace_back();
            const std::size_t dim = 1 + rng() % m;
            for (std::size_t k = 0; k < dim; ++k) {
                FieldVector v(m);
                for (auto& x : v)
                    x = static_cast<std::uint32_t>(rng() % q);
                b.bases[i].push_back(v);
            }
        }
        // keep only inputs the library should accept
        bool ok = true;
        for (const auto& bs : b.bases) {
            std::vector<std::vector<long>> rows;
            for (const auto& v : bs)
                rows.emplace_back(v.begin(), v.end());
            ok = ok && rank_q(rows, q) == bs.size();
            all.insert(all.end(), rows.begin(), rows.end());
        }
        if (!ok || rank_q(all, q) != m)
            continue;
        ++built;
        auto ls = linearly_correlated(b);
        EXPECT_TRUE(uniform_over_subspaces(ls.sources, q));
        // H(Y_A) = dim(sum of V_i, i in A) * log q
        auto names = ls.sources.variables();
        for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
            std::vector<std::vector<long>> rows;
            std::vector<std::string> vars;
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (1u << i)) {
                    vars.push_back(names[i]);
                    for (const auto& v : b.bases[i])
                        rows.emplace_back(v.begin(), v.end());
                }
            const double expect = static_cast<double>(rank_q(rows, q)) * std::log2(static_cast<double>(q));
            EXPECT_NEAR(entropy_of(ls.sources, vars), expect, 1e-9);
        }
    }
}

TEST(LinearlyCorrelated, NonUniformRejected)
{
    auto d = pair({{{"0", "0"}, Rational(1, 2)}, {{"1", "1"}, Rational(1, 4)}, {{"0", "1"}, Rational(1, 4)}}, 2, 2);
    EXPECT_FALSE(uniform_over_subspaces(d, 2));
}

TEST(GacsKorner, EdgeCases)
{
    // X = Y: K = X
    auto same = pair({{{"0", "0"}, Rational(1, 2)}, {{"1", "1"}, Rational(1, 4)}, {{"2", "2"}, Rational(1, 4)}}, 3, 3);
    auto r = gk_common_information(same);
    EXPECT_NEAR(r.h_k, 1.5, 1e-12);
    EXPECT_NEAR(r.delta, 0.0, 1e-12);

    // independent: K constant
    std::vector<TableEntry> es;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 3; ++y)
            es.push_back({{std::to_string(x), std::to_string(y)}, Rational(x ? 1 : 3, 4) * Rational(1, 3)});
    auto ind = gk_common_information(pair(es, 2, 3));
    EXPECT_EQ(ind.h_k, 0.0);
    EXPECT_NEAR(ind.i_xy_given_k, 0.0, 1e-12);

    // XOR examples have full support
    for (const auto& f : {"xor_eps01.json", "xor_eps03.json"}) {
        auto g = gk_common_information(load(f));
        EXPECT_EQ(g.h_k, 0.0) << f;
        EXPECT_GT(g.i_xy_given_k, 0.0) << f;
    }

    // two blocks with masses 1/4 and 3/4
    auto blocks = pair({{{"0", "0"}, Rational(1, 8)}, {{"0", "1"}, Rational(1, 8)}, {{"1", "2"}, Rational(3, 4)}}, 2, 3);
    auto bk = gk_common_information(blocks);
    EXPECT_NEAR(bk.h_k, h2(0.25), 1e-12);
    EXPECT_EQ(bk.joint.variables().back(), "K");

    auto three = joint_from_table({"A", "B", "C"}, {{"0"}, {"0"}, {"0"}}, {{{"0", "0", "0"}, Rational(1)}});
    EXPECT_EQ(kind_of([&] { gk_common_information(three); }), ErrorKind::DimensionMismatch);
}

TEST(GacsKorner, RandomProperties)
{
    std::mt19937_64 rng(72);
    for (int trial = 0; trial < 60; ++trial) {
        auto d = testsupport::random_joint({std::size_t(2 + trial % 3), std::size_t(2 + trial % 4)}, 2 + trial % 7, rng);
        auto r = gk_common_information(d);
        EXPECT_NEAR(r.h_k_given_x, 0.0, 1e-12);
        EXPECT_NEAR(r.h_k_given_y, 0.0, 1e-12);
        EXPECT_LE(r.h_k, std::min(entropy_of(d, {"V0"}), entropy_of(d, {"V1"})) + 1e-12);
        // K is a common function of both sides
        auto names = r.joint.variables();
        EXPECT_TRUE(is_function_of(r.joint, {names[2]}, {names[0]}));
        EXPECT_TRUE(is_function_of(r.joint, {names[2]}, {names[1]}));
        // the exhaustive search over K never does worse than the GK variable
        const std::size_t k = std::max<std::size_t>(2, r.kernel.empty() ? 1 : r.kernel[0].size());
        if (std::pow(double(k), double(d.pmf().size())) < 2e5) {
            auto s = delta_star_search(d, k);
            EXPECT_LE(s.delta, r.delta + 1e-12);
        }
    }
}

TEST(DeltaStar, FrozenExhaustive)
{
    // frozen outputs of the exhaustive search, k = 2
    auto a = delta_star_search(load("xor_eps01.json"), 2);
    EXPECT_NEAR(a.delta, 0.234498, 1e-6);
    EXPECT_NEAR(a.h_k, 0.992774, 1e-6);
    auto b = delta_star_search(load("xor_eps03.json"), 2);
    EXPECT_NEAR(b.delta, 0.118709, 1e-6);
    EXPECT_NEAR(b.h_k, 0.0, 1e-12);
    EXPECT_DOUBLE_EQ(b.delta, std::max({b.h_k_given_x, b.h_k_given_y, b.i_xy_given_k}));
}

TEST(DeltaStar, LocalSearchReproducible)
{
    SearchOptions o;
    o.mode = SearchMode::LocalSearch;
    o.seed = 3;
    auto d = load("xor_eps01.json");
    auto a = delta_star_search(d, 2, o);
    auto b = delta_star_search(d, 2, o);
    EXPECT_EQ(a.delta, b.delta);
    EXPECT_EQ(a.kernel, b.kernel);
    EXPECT_DOUBLE_EQ(a.delta, 0.23449779679464067); // frozen
    for (const auto& row : a.kernel) {
        double s = 0;
        for (double w : row)
            s += w;
        EXPECT_NEAR(s, 1.0, 1e-12);
    }
}

TEST(DeltaStar, Errors)
{
    auto d = load("xor_eps01.json");
    EXPECT_EQ(kind_of([&] { delta_star_search(d, 0); }), ErrorKind::OutOfRange);
    SearchOptions o;
    o.max_maps = 10;
    EXPECT_EQ(kind_of([&] { delta_star_search(d, 2, o); }), ErrorKind::SearchSpaceTooLarge);
    o = {};
    o.mode = SearchMode::LocalSearch;
    o.grid = 0;
    EXPECT_EQ(kind_of([&] { delta_star_search(d, 2, o); }), ErrorKind::OutOfRange);
}

TEST(DeltaStar, SingleValueIsConstant)
{
    auto d = load("xor_eps01.json");
    auto r = delta_star_search(d, 1);
    EXPECT_EQ(r.h_k, 0.0);
    EXPECT_NEAR(r.delta, entropy_of(d, {"X"}) + entropy_of(d, {"Y"}) - entropy_of(d, {"X", "Y"}), 1e-12);
}
