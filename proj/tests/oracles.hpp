#pragma once
// Brute-force reference implementations. They share no code with the library
// beyond its value types, and favour obviousness over speed.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <set>
#include <vector>

#include "laminar/bitset.hpp"
#include "laminar/forest.hpp"
#include "laminar/setsystem.hpp"

namespace oracle {

using Set = std::vector<bool>;

inline Set to_set(const laminar::BitSet& b) {
    Set s(b.size());
    for (std::size_t i = 0; i < b.size(); ++i)
        s[i] = b.test(i);
    return s;
}

inline std::vector<Set> sets_of(const laminar::SetFamily& f) {
    std::vector<Set> out;
    for (const auto& b : f.sets())
        out.push_back(to_set(b));
    return out;
}

/// Distinct traces on the probe given as a bitmask.
inline std::size_t trace_count(const std::vector<Set>& family, std::uint32_t probe, std::size_t n) {
    std::set<std::uint32_t> traces;
    for (const auto& s : family) {
        std::uint32_t t = 0;
        for (std::size_t i = 0; i < n; ++i)
            if ((probe >> i & 1U) && s[i])
                t |= 1U << i;
        traces.insert(t);
    }
    return traces.size();
}

inline std::size_t vc_dimension(const std::vector<Set>& family, std::size_t n) {
    std::size_t best = 0;
    for (std::uint32_t a = 0; a < (1U << n); ++a) {
        const auto k = static_cast<std::size_t>(__builtin_popcount(a));
        if (k > best && trace_count(family, a, n) == (std::size_t{1} << k))
            best = k;
    }
    return best;
}

inline std::size_t shatter(const std::vector<Set>& family, std::size_t n, std::size_t k) {
    std::size_t best = 0;
    for (std::uint32_t a = 0; a < (1U << n); ++a)
        if (static_cast<std::size_t>(__builtin_popcount(a)) == k)
            best = std::max(best, trace_count(family, a, n));
    return best;
}

inline bool laminar(const std::vector<Set>& family) {
    for (std::size_t i = 0; i < family.size(); ++i)
        for (std::size_t j = 0; j < family.size(); ++j) {
            bool meet = false, i_out = false, j_out = false;
            for (std::size_t x = 0; x < family[i].size(); ++x) {
                meet |= family[i][x] && family[j][x];
                i_out |= family[i][x] && !family[j][x];
                j_out |= family[j][x] && !family[i][x];
            }
            if (meet && i_out && j_out)
                return false;
        }
    return true;
}

/// Distinct sign vectors of all carrier tuples of the given arity.
inline std::size_t type_count(const std::vector<laminar::ParametrizedFormula>& formulas,
                              const std::vector<laminar::Tuple>& params, std::size_t carrier, std::size_t arity) {
    std::set<std::vector<bool>> seen;
    laminar::Tuple x(arity, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t pos) {
        if (pos == arity) {
            std::vector<bool> v;
            for (const auto& b : params)
                for (const auto& f : formulas)
                    v.push_back(f.eval(x, b));
            seen.insert(v);
            return;
        }
        for (laminar::Element e = 0; e < carrier; ++e) {
            x[pos] = e;
            rec(pos + 1);
        }
    };
    rec(0);
    return seen.size();
}

/// Preorder walk of the type tree, children visited in the given order.
inline std::vector<std::size_t> preorder(const laminar::TypeTree& tree, const laminar::SiblingOrders& siblings) {
    std::vector<std::size_t> out;
    std::function<void(std::size_t)> walk = [&](std::size_t v) {
        out.push_back(v);
        for (auto c : siblings[v])
            walk(c);
    };
    walk(0);
    return out;
}

/// Every χ(t) = {p : t ∈ p} occupies consecutive positions.
inline bool convex(const laminar::TypeTree& tree, const std::vector<std::size_t>& seq) {
    for (std::size_t t = 0; t < tree.forest_size(); ++t) {
        std::vector<std::size_t> pos;
        for (std::size_t i = 0; i < seq.size(); ++i)
            if (tree.members(seq[i]).test(t))
                pos.push_back(i);
        if (!pos.empty() && pos.back() - pos.front() + 1 != pos.size())
            return false;
    }
    return true;
}

} // namespace oracle
