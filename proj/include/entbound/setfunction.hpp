#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "error.hpp"
#include "rational.hpp"

namespace entbound {

/// Subsets of an ordered ground set are bit masks; the first label is the
/// least-significant bit. The empty set (mask 0) is never stored.
using SubsetMask = std::uint32_t;

inline std::size_t subset_count(std::size_t ground_size) { return (std::size_t{1} << ground_size) - 1; }

inline SubsetMask full_mask(std::size_t ground_size) { return static_cast<SubsetMask>(subset_count(ground_size)); }

inline int popcount(SubsetMask m) { return std::popcount(m); }

/// Function on the nonempty subsets of `ground`; value of mask m is values[m - 1].
template <class T>
struct BasicSetFunction {
    std::vector<std::string> ground;
    std::vector<T> values;

    BasicSetFunction() = default;
    explicit BasicSetFunction(std::vector<std::string> g)
        : ground(std::move(g)), values(subset_count(ground.size()), T{})
    {
    }

    std::size_t size() const { return ground.size(); }

    T at(SubsetMask m) const
    {
        if (m == 0)
            return T{};
        return values.at(m - 1);
    }
    T& operator[](SubsetMask m) { return values.at(m - 1); }
    const T& operator[](SubsetMask m) const { return values.at(m - 1); }

    /// h(a | b) = h(a ∪ b) - h(b)
    T conditional(SubsetMask a, SubsetMask b) const { return at(a | b) - at(b); }

    SubsetMask mask_of(const std::vector<std::string>& labels) const
    {
        SubsetMask m = 0;
        for (const auto& l : labels) {
            bool found = false;
            for (std::size_t i = 0; i < ground.size(); ++i)
                if (ground[i] == l) {
                    m |= SubsetMask{1} << i;
                    found = true;
                }
            if (!found)
                throw Error(ErrorKind::UnknownVariable, "'" + l + "' not in ground set");
        }
        return m;
    }
};

using SetFunction = BasicSetFunction<double>;
using RationalSetFunction = BasicSetFunction<Rational>;

inline SetFunction to_double(const RationalSetFunction& f)
{
    SetFunction out(f.ground);
    for (std::size_t i = 0; i < f.values.size(); ++i)
        out.values[i] = f.values[i].to_double();
    return out;
}

} // namespace entbound
