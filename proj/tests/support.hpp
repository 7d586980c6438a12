#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <entbound/io.hpp>
#include <entbound/probdist.hpp>

namespace testsupport {

using namespace entbound;

inline std::string data(const std::string& name) { return std::string(ENTBOUND_DATA_DIR) + "/" + name; }

inline JointDistribution load(const std::string& name) { return io::distribution_from_json(io::read_json_file(data(name))); }

// n distinct positive masses summing to 1 (denominator 2^k * 3 etc. is fine)
inline std::vector<Rational> random_masses(std::size_t n, std::mt19937_64& rng, bool distinct = true)
{
    std::uniform_int_distribution<long long> w(1, 997);
    for (;;) {
        std::vector<long long> ws(n);
        long long total = 0;
        for (auto& x : ws)
            total += (x = w(rng));
        std::vector<Rational> out;
        for (auto x : ws)
            out.push_back(Rational(x, total));
        if (!distinct)
            return out;
        auto s = ws;
        std::sort(s.begin(), s.end());
        if (std::adjacent_find(s.begin(), s.end()) == s.end())
            return out;
    }
}

/// One variable "X" with n atoms.
inline JointDistribution random_scalar(std::size_t n, std::mt19937_64& rng, bool distinct = true)
{
    auto ps = random_masses(n, rng, distinct);
    std::vector<std::string> alpha;
    std::vector<TableEntry> es;
    for (std::size_t k = 0; k < n; ++k) {
        alpha.push_back("a" + std::to_string(k));
        es.push_back({{alpha.back()}, ps[k]});
    }
    return joint_from_table({"X"}, {alpha}, es);
}

/// Variables V0.. with given alphabet sizes, random support of `atoms` outcomes.
inline JointDistribution random_joint(const std::vector<std::size_t>& sizes, std::size_t atoms, std::mt19937_64& rng)
{
    std::size_t total = 1;
    for (auto s : sizes)
        total *= s;
    atoms = std::min(atoms, total);
    std::vector<std::size_t> cells(total);
    std::iota(cells.begin(), cells.end(), std::size_t{0});
    std::shuffle(cells.begin(), cells.end(), rng);
    cells.resize(atoms);
    auto ps = random_masses(atoms, rng, false);
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> alpha;
    for (std::size_t v = 0; v < sizes.size(); ++v) {
        names.push_back("V" + std::to_string(v));
        alpha.emplace_back();
        for (std::size_t s = 0; s < sizes[v]; ++s)
            alpha.back().push_back(std::to_string(s));
    }
    std::vector<TableEntry> es;
    for (std::size_t a = 0; a < atoms; ++a) {
        std::vector<std::string> o;
        std::size_t c = cells[a];
        for (std::size_t v = 0; v < sizes.size(); ++v) {
            o.push_back(std::to_string(c % sizes[v]));
            c /= sizes[v];
        }
        es.push_back({o, ps[a]});
    }
    return joint_from_table(names, alpha, es);
}

} // namespace testsupport
