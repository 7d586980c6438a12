#pragma once

// Auxiliary variables for the improved bounds: sources that are linear
// images of uniform field elements, Gacs-Korner common information, and a
// search for variables that are almost common to two sources.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "error.hpp"
#include "probdist.hpp"
#include "rational.hpp"

namespace entbound {

// ---------------------------------------------------------------- F_q

using FieldVector = std::vector<std::uint32_t>;

struct SubspaceBasis {
    std::uint32_t q = 2;
    std::size_t m = 0;
    std::vector<std::vector<FieldVector>> bases; // per source: basis vectors of length m
    std::vector<std::string> names;              // optional; defaults to Y1, Y2, ...
};

namespace detail {

inline bool is_prime(std::uint32_t q)
{
    if (q < 2)
        return false;
    for (std::uint32_t d = 2; d * d <= q; ++d)
        if (q % d == 0)
            return false;
    return true;
}

inline std::uint32_t inverse_mod(std::uint32_t a, std::uint32_t q)
{
    // a^(q-2) mod q
    std::uint64_t r = 1, b = a % q;
    for (std::uint32_t e = q - 2; e; e >>= 1) {
        if (e & 1u)
            r = r * b % q;
        b = b * b % q;
    }
    return static_cast<std::uint32_t>(r);
}

/// Rank over F_q of a list of equal-length vectors.
inline std::size_t rank_mod(std::vector<FieldVector> rows, std::uint32_t q)
{
    if (rows.empty())
        return 0;
    const std::size_t w = rows.front().size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < w && r < rows.size(); ++c) {
        std::size_t p = r;
        while (p < rows.size() && rows[p][c] % q == 0)
            ++p;
        if (p == rows.size())
            continue;
        std::swap(rows[p], rows[r]);
        const std::uint64_t inv = inverse_mod(rows[r][c] % q, q);
        for (auto& x : rows[r])
            x = static_cast<std::uint32_t>(x * inv % q);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == r || rows[i][c] % q == 0)
                continue;
            const std::uint64_t f = rows[i][c] % q;
            for (std::size_t k = 0; k < w; ++k)
                rows[i][k] = static_cast<std::uint32_t>((rows[i][k] + (q - f) * rows[r][k]) % q);
        }
        ++r;
    }
    return r;
}

inline std::string field_symbol(const FieldVector& v, std::uint32_t q)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (q > 10 && i)
            s += ",";
        s += std::to_string(v[i]);
    }
    return s;
}

inline FieldVector parse_field_symbol(const std::string& s, std::uint32_t q)
{
    FieldVector v;
    if (q > 10) {
        std::size_t start = 0;
        while (start <= s.size() && !s.empty()) {
            std::size_t end = s.find(',', start);
            v.push_back(static_cast<std::uint32_t>(std::stoul(s.substr(start, end - start))));
            if (end == std::string::npos)
                break;
            start = end + 1;
        }
    } else {
        for (char c : s) {
            if (c < '0' || c > '9')
                throw Error(ErrorKind::ParseError, "symbol " + s + " is not a digit string");
            v.push_back(static_cast<std::uint32_t>(c - '0'));
        }
    }
    return v;
}

} // namespace detail

struct LinearSources {
    JointDistribution sources;   // Y_1 .. Y_n
    JointDistribution with_keys; // Y_1 .. Y_n, K1 .. Km
    std::vector<std::vector<FieldVector>> matrices; // A^i as rows: A^i[r][c], m x dim V_i
};

/// Y_i = [K_1 .. K_m] A^i with K uniform on F_q^m and the columns of A^i the
/// basis vectors of V_i. Symbols are digit strings of the field values.
inline LinearSources linearly_correlated(const SubspaceBasis& b)
{
    const std::uint32_t q = b.q;
    const std::size_t m = b.m;
    if (!detail::is_prime(q))
        throw Error(ErrorKind::OutOfRange, "field order " + std::to_string(q) + " is not prime");
    if (m == 0 || m > 16)
        throw Error(ErrorKind::OutOfRange, "ambient dimension must be between 1 and 16");
    double atoms = std::pow(static_cast<double>(q), static_cast<double>(m));
    if (atoms > 1e6)
        throw Error(ErrorKind::SearchSpaceTooLarge, "q^m exceeds 10^6 outcomes");
    const std::size_t n = b.bases.size();
    if (n == 0)
        throw Error(ErrorKind::DimensionMismatch, "no sources");
    if (!b.names.empty() && b.names.size() != n)
        throw Error(ErrorKind::DimensionMismatch, "names do not match the number of sources");
    std::vector<FieldVector> all;
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& v : b.bases[i]) {
            if (v.size() != m)
                throw Error(ErrorKind::DimensionMismatch, "basis vector of length " + std::to_string(v.size())
                                                              + ", expected " + std::to_string(m));
            for (auto x : v)
                if (x >= q)
                    throw Error(ErrorKind::OutOfRange, "entry " + std::to_string(x) + " is not in F_" + std::to_string(q));
            all.push_back(v);
        }
        if (detail::rank_mod(b.bases[i], q) != b.bases[i].size())
            throw Error(ErrorKind::DependentBasisVectors, "basis of source " + std::to_string(i + 1) + " is dependent");
    }
    if (detail::rank_mod(all, q) != m)
        throw Error(ErrorKind::SpanDeficient, "the subspaces do not span F_" + std::to_string(q) + "^" + std::to_string(m));

    LinearSources out;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<FieldVector> a(m, FieldVector(b.bases[i].size()));
        for (std::size_t c = 0; c < b.bases[i].size(); ++c)
            for (std::size_t r = 0; r < m; ++r)
                a[r][c] = b.bases[i][c][r];
        out.matrices.push_back(std::move(a));
    }

    std::vector<std::string> names = b.names;
    if (names.empty())
        for (std::size_t i = 0; i < n; ++i)
            names.push_back("Y" + std::to_string(i + 1));
    std::vector<std::map<std::string, std::uint32_t>> sym(n + m);
    std::vector<std::vector<std::string>> alpha(n + m);
    auto code = [&](std::size_t var, const std::string& s) {
        auto [it, ins] = sym[var].emplace(s, static_cast<std::uint32_t>(alpha[var].size()));
        if (ins)
            alpha[var].push_back(s);
        return it->second;
    };
    for (std::size_t k = 0; k < m; ++k)
        for (std::uint32_t v = 0; v < q; ++v)
            code(n + k, std::to_string(v));

    const Rational p(1, static_cast<long long>(std::llround(atoms)));
    std::map<Outcome, Rational> pmf;
    FieldVector key(m, 0);
    for (;;) {
        Outcome o(n + m);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& a = out.matrices[i];
            FieldVector y(b.bases[i].size(), 0);
            for (std::size_t c = 0; c < y.size(); ++c) {
                std::uint64_t s = 0;
                for (std::size_t r = 0; r < m; ++r)
                    s += std::uint64_t{key[r]} * a[r][c];
                y[c] = static_cast<std::uint32_t>(s % q);
            }
            o[i] = code(i, detail::field_symbol(y, q));
        }
        for (std::size_t k = 0; k < m; ++k)
            o[n + k] = key[k];
        pmf.emplace(std::move(o), p);
        std::size_t k = 0;
        while (k < m && ++key[k] == q)
            key[k++] = 0;
        if (k == m)
            break;
    }
    for (auto& a : alpha)
        if (a.empty())
            a.push_back("");
    std::vector<std::string> vars = names;
    for (std::size_t k = 0; k < m; ++k)
        vars.push_back("K" + std::to_string(k + 1));
    out.with_keys = JointDistribution(vars, alpha, std::move(pmf));
    out.sources = marginalize(out.with_keys, names);
    return out;
}

/// Every marginal of `d` is uniform on its support, and that support is an
/// F_q-subspace (its size is q^rank). Symbols are read as field vectors.
inline bool uniform_over_subspaces(const JointDistribution& d, std::uint32_t q)
{
    const std::size_t n = d.variables().size();
    if (n > 16)
        throw Error(ErrorKind::GroundSetTooLarge, "too many variables");
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        std::vector<std::size_t> vars;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i))
                vars.push_back(i);
        auto marg = d.marginal(vars);
        const Rational first = marg.begin()->second;
        std::vector<FieldVector> support;
        for (const auto& [o, p] : marg) {
            if (p != first)
                return false;
            FieldVector v;
            for (std::size_t k = 0; k < vars.size(); ++k) {
                auto part = detail::parse_field_symbol(d.symbol(vars[k], o[k]), q);
                v.insert(v.end(), part.begin(), part.end());
            }
            support.push_back(std::move(v));
        }
        const std::size_t r = detail::rank_mod(support, q);
        if (std::pow(static_cast<double>(q), static_cast<double>(r)) != static_cast<double>(support.size()))
            return false;
        // contains zero
        if (std::none_of(support.begin(), support.end(),
                         [](const FieldVector& v) { return std::all_of(v.begin(), v.end(), [](auto x) { return x == 0; }); }))
            return false;
    }
    return true;
}

// ---------------------------------------------------------------- common information

struct CommonInfoResult {
    JointDistribution joint;                   // X, Y, K
    std::vector<std::vector<double>> kernel;   // per support atom of (X,Y), P(K = k | x, y)
    double h_k = 0;                            // H(K)
    double h_k_given_x = 0;
    double h_k_given_y = 0;
    double i_xy_given_k = 0;
    double delta = 0;                          // max of the three above
};

namespace detail {

inline std::pair<std::size_t, std::size_t> pair_vars(const JointDistribution& d)
{
    if (d.variables().size() != 2)
        throw Error(ErrorKind::DimensionMismatch, "expected a distribution over exactly two variables");
    return {0, 1};
}

/// Entropies of (X,Y,K) from atom masses of (X,Y) and a kernel P(K|x,y).
struct Triple {
    double hk, hk_x, hk_y, i_xy_k;
};

inline Triple triple_of(const std::vector<std::uint32_t>& xs, const std::vector<std::uint32_t>& ys,
                        const std::vector<double>& p, const std::vector<std::vector<double>>& w, std::size_t k)
{
    std::map<std::uint32_t, double> px, py;
    std::map<std::pair<std::uint32_t, std::size_t>, double> pxk, pyk;
    std::vector<double> pk(k, 0.0), pxyk;
    for (std::size_t a = 0; a < p.size(); ++a) {
        px[xs[a]] += p[a];
        py[ys[a]] += p[a];
        for (std::size_t c = 0; c < k; ++c) {
            const double v = p[a] * w[a][c];
            if (v <= 0)
                continue;
            pk[c] += v;
            pxk[{xs[a], c}] += v;
            pyk[{ys[a], c}] += v;
            pxyk.push_back(v);
        }
    }
    auto H = [](const auto& range) {
        double h = 0;
        for (const auto& v : range) {
            double x;
            if constexpr (std::is_arithmetic_v<std::decay_t<decltype(v)>>)
                x = v;
            else
                x = v.second;
            if (x > 0)
                h -= x * std::log2(x);
        }
        return h;
    };
    const double hx = H(px), hy = H(py), hk = H(pk), hxk = H(pxk), hyk = H(pyk), hxyk = H(pxyk);
    Triple t;
    t.hk = std::max(hk, 0.0);
    t.hk_x = std::max(hxk - hx, 0.0);
    t.hk_y = std::max(hyk - hy, 0.0);
    t.i_xy_k = std::max(hxk + hyk - hxyk - hk, 0.0);
    return t;
}

inline CommonInfoResult finish(const JointDistribution& d, std::vector<std::vector<Rational>> w_exact, std::size_t k)
{
    std::vector<std::uint32_t> xs, ys;
    std::vector<double> p;
    std::map<Outcome, Rational> pmf;
    std::size_t a = 0;
    CommonInfoResult r;
    for (const auto& [o, pr] : d.pmf()) {
        xs.push_back(o[0]);
        ys.push_back(o[1]);
        p.push_back(pr.to_double());
        std::vector<double> row;
        for (std::size_t c = 0; c < k; ++c) {
            row.push_back(w_exact[a][c].to_double());
            if (w_exact[a][c].sign() > 0)
                pmf.emplace(Outcome{o[0], o[1], static_cast<std::uint32_t>(c)}, pr * w_exact[a][c]);
        }
        r.kernel.push_back(std::move(row));
        ++a;
    }
    std::vector<std::string> kal;
    for (std::size_t c = 0; c < k; ++c)
        kal.push_back("k" + std::to_string(c + 1));
    auto alpha = d.alphabets();
    alpha.push_back(kal);
    auto vars = d.variables();
    std::string kname = "K";
    while (std::find(vars.begin(), vars.end(), kname) != vars.end())
        kname += "'";
    vars.push_back(kname);
    r.joint = JointDistribution(vars, alpha, std::move(pmf));
    auto t = triple_of(xs, ys, p, r.kernel, k);
    r.h_k = entropy_of(r.joint, {kname}); // exact masses: a constant K gives exactly 0
    r.h_k_given_x = t.hk_x;
    r.h_k_given_y = t.hk_y;
    r.i_xy_given_k = t.i_xy_k;
    r.delta = std::max({t.hk_x, t.hk_y, t.i_xy_k});
    return r;
}

} // namespace detail

/// K = connected component of the bipartite support graph between values of
/// X and values of Y; components numbered by their smallest X value.
inline CommonInfoResult gk_common_information(const JointDistribution& d)
{
    detail::pair_vars(d);
    const std::size_t nx = d.alphabets()[0].size();
    const std::size_t ny = d.alphabets()[1].size();
    std::vector<std::size_t> parent(nx + ny);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t v) {
        while (parent[v] != v)
            v = parent[v] = parent[parent[v]];
        return v;
    };
    for (const auto& [o, p] : d.pmf()) {
        std::size_t a = find(o[0]), b = find(nx + o[1]);
        if (a != b)
            parent[std::max(a, b)] = std::min(a, b);
    }
    // number components by first appearance over X values in alphabet order
    std::map<std::size_t, std::size_t> comp;
    std::vector<char> used_x(nx, 0);
    for (const auto& [o, p] : d.pmf())
        used_x[o[0]] = 1;
    for (std::size_t x = 0; x < nx; ++x)
        if (used_x[x])
            comp.emplace(find(x), comp.size());
    const std::size_t k = comp.size();
    std::vector<std::vector<Rational>> w;
    for (const auto& [o, p] : d.pmf()) {
        std::vector<Rational> row(k);
        row[comp.at(find(o[0]))] = Rational(1);
        w.push_back(std::move(row));
    }
    return detail::finish(d, std::move(w), k);
}

enum class SearchMode { Exhaustive, LocalSearch };

struct SearchOptions {
    SearchMode mode = SearchMode::Exhaustive;
    std::uint64_t seed = 0;
    int restarts = 20;
    int steps = 2000;
    int grid = 64;                     // kernel masses are multiples of 1/grid
    double max_maps = 1e7;             // exhaustive cap on k^|support|
};

/// Smallest found max(H(K|X), H(K|Y), I(X;Y|K)) over K with at most k values.
/// Exhaustive mode is exact over deterministic K = f(x, y); local search
/// moves kernel mass on a grid and only gives an upper bound.
inline CommonInfoResult delta_star_search(const JointDistribution& d, std::size_t k, const SearchOptions& opt = {})
{
    detail::pair_vars(d);
    if (k < 1)
        throw Error(ErrorKind::OutOfRange, "K needs at least one value");
    std::vector<std::uint32_t> xs, ys;
    std::vector<double> p;
    for (const auto& [o, pr] : d.pmf()) {
        xs.push_back(o[0]);
        ys.push_back(o[1]);
        p.push_back(pr.to_double());
    }
    const std::size_t N = p.size();
    auto score = [&](const std::vector<std::vector<double>>& w) {
        auto t = detail::triple_of(xs, ys, p, w, k);
        return std::max({t.hk_x, t.hk_y, t.i_xy_k});
    };

    if (opt.mode == SearchMode::Exhaustive) {
        if (std::pow(static_cast<double>(k), static_cast<double>(N)) > opt.max_maps)
            throw Error(ErrorKind::SearchSpaceTooLarge, std::to_string(k) + "^" + std::to_string(N) + " maps exceed the cap");
        // restricted growth strings: each labelling of K up to renaming once
        std::vector<std::size_t> f(N, 0), top(N, 0);
        std::vector<std::vector<double>> w(N, std::vector<double>(k, 0.0));
        std::vector<std::size_t> best;
        double best_s = 0;
        for (;;) {
            for (std::size_t a = 0; a < N; ++a) {
                std::fill(w[a].begin(), w[a].end(), 0.0);
                w[a][f[a]] = 1.0;
            }
            const double s = score(w);
            if (best.empty() || s < best_s - 1e-15) {
                best = f;
                best_s = s;
            }
            // next string
            std::size_t i = N;
            while (i-- > 1) {
                const std::size_t limit = std::min(k - 1, top[i - 1] + 1);
                if (f[i] < limit) {
                    ++f[i];
                    top[i] = std::max(top[i - 1], f[i]);
                    for (std::size_t j = i + 1; j < N; ++j) {
                        f[j] = 0;
                        top[j] = top[i];
                    }
                    break;
                }
            }
            if (i == 0 || N <= 1)
                break;
        }
        std::vector<std::vector<Rational>> we(N, std::vector<Rational>(k));
        for (std::size_t a = 0; a < N; ++a)
            we[a][best[a]] = Rational(1);
        return detail::finish(d, std::move(we), k);
    }

    const int G = opt.grid;
    if (G < 1)
        throw Error(ErrorKind::OutOfRange, "grid must be positive");
    std::mt19937_64 rng(opt.seed);
    std::vector<std::vector<int>> best;
    double best_s = 0;
    auto as_kernel = [&](const std::vector<std::vector<int>>& u) {
        std::vector<std::vector<double>> w(N, std::vector<double>(k));
        for (std::size_t a = 0; a < N; ++a)
            for (std::size_t c = 0; c < k; ++c)
                w[a][c] = static_cast<double>(u[a][c]) / G;
        return w;
    };
    std::uniform_int_distribution<std::size_t> atom(0, N - 1), val(0, k - 1);
    for (int r = 0; r < opt.restarts; ++r) {
        std::vector<std::vector<int>> u(N, std::vector<int>(k, 0));
        for (std::size_t a = 0; a < N; ++a)
            for (int g = 0; g < G; ++g)
                ++u[a][val(rng)];
        double s = score(as_kernel(u));
        for (int step = 0; step < opt.steps && k > 1; ++step) {
            std::size_t a = atom(rng), from = val(rng), to = val(rng);
            if (from == to || u[a][from] == 0)
                continue;
            std::uniform_int_distribution<int> amount(1, u[a][from]);
            int m = amount(rng);
            u[a][from] -= m;
            u[a][to] += m;
            double t = score(as_kernel(u));
            if (t <= s)
                s = t;
            else {
                u[a][from] += m;
                u[a][to] -= m;
            }
        }
        if (best.empty() || s < best_s) {
            best = u;
            best_s = s;
        }
    }
    std::vector<std::vector<Rational>> we(N, std::vector<Rational>(k));
    for (std::size_t a = 0; a < N; ++a)
        for (std::size_t c = 0; c < k; ++c)
            we[a][c] = Rational(best[a][c], G);
    return detail::finish(d, std::move(we), k);
}

} // namespace entbound
