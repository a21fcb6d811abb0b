#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "laminar/bitset.hpp"

namespace laminar {

/// Ground set {0, ..., size-1}.
class Universe {
  public:
    static constexpr std::size_t kDefaultCap = 4096;

    explicit Universe(std::size_t size, std::size_t cap = kDefaultCap);

    /// The zero-element universe a trace over an empty probe lives on.
    static Universe empty() { return Universe(); }

    std::size_t size() const noexcept { return size_; }
    friend bool operator==(const Universe&, const Universe&) = default;

  private:
    Universe() = default;
    std::size_t size_ = 0;
};

/// Indexed list of subsets of a universe. Duplicates are kept; each member
/// keeps its index.
class SetFamily {
  public:
    SetFamily(Universe universe, std::vector<BitSet> sets);

    static SetFamily from_lists(std::size_t universe_size, const std::vector<std::vector<std::size_t>>& sets);

    const Universe& universe() const noexcept { return universe_; }
    const std::vector<BitSet>& sets() const noexcept { return sets_; }
    std::size_t size() const noexcept { return sets_.size(); }
    bool empty() const noexcept { return sets_.empty(); }
    const BitSet& operator[](std::size_t i) const { return sets_[i]; }

    bool has_duplicates() const;
    std::vector<std::vector<std::size_t>> as_lists() const;

    friend bool operator==(const SetFamily&, const SetFamily&) = default;

  private:
    Universe universe_;
    std::vector<BitSet> sets_;
};

/// Distinct traces {S ∩ probe}. The result lives on a universe of |probe|
/// elements, position i standing for probe[i]; sets are sorted.
SetFamily trace(const SetFamily& family, std::span<const std::size_t> probe);

inline constexpr std::size_t kExhaustiveUniverseCap = 24;

/// Brute-force VC dimension; universe limited to `universe_cap` elements.
std::size_t vc_dimension(const SetFamily& family, std::size_t universe_cap = kExhaustiveUniverseCap);

/// max over k-subsets A of |trace(family, A)|.
std::uint64_t shatter_function(const SetFamily& family, std::size_t k,
                               std::size_t universe_cap = kExhaustiveUniverseCap);

/// shatter_function for every k in 0..|universe|, computed in one pass.
std::vector<std::uint64_t> shatter_profile(const SetFamily& family,
                                           std::size_t universe_cap = kExhaustiveUniverseCap);

std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// Σ_{i ≤ d} C(k, i)
std::uint64_t sauer_bound(std::uint64_t k, std::uint64_t d);

/// Checks shatter_function(F, k) ≤ Σ_{i≤d} C(k,i) for every k, d = VC dimension.
bool sauer_check(const SetFamily& family, std::size_t universe_cap = kExhaustiveUniverseCap);

// ---------------------------------------------------------------------------
// Type spaces

using Element = std::uint32_t;
using Tuple = std::vector<Element>;

/// φ(x; y) with |x| = object_arity, |y| = param_arity. Object coordinates
/// range over the carrier, parameter coordinates over [0, param_domain).
struct ParametrizedFormula {
    std::string name;
    std::size_t object_arity = 1;
    std::size_t param_arity = 1;
    std::size_t param_domain = 0;
    std::function<bool(std::span<const Element> x, std::span<const Element> y)> eval;

    bool operator()(std::span<const Element> x, std::span<const Element> y) const { return eval(x, y); }
};

struct TypeSpaceOptions {
    /// Maximum formula evaluations for exact enumeration.
    std::uint64_t eval_cap = std::uint64_t{1} << 26;
    /// Beyond the cap, sample object tuples instead of throwing.
    bool allow_sampling = false;
    std::uint64_t sample_seed = 0;
};

/// Realized Φ-types over B: the distinct sign vectors of carrier tuples.
/// Bit (j * |formulas| + i) of a vector is formula i at parameter B[j].
/// Counts only types realized in the carrier, so it never exceeds the
/// abstract type space.
struct TypeSpace {
    std::vector<Tuple> params;
    std::vector<std::string> formulas;
    std::vector<BitSet> vectors;   // sorted
    std::vector<Tuple> witnesses;  // witnesses[i] realizes vectors[i]
    bool exact = true;             // false: sampled, vectors.size() is a lower bound
    std::uint64_t evaluations = 0;

    std::size_t count() const noexcept { return vectors.size(); }
};

TypeSpace type_space(std::span<const ParametrizedFormula> formulas, std::span<const Tuple> params,
                     std::size_t carrier_size, std::size_t object_arity, const TypeSpaceOptions& options = {});

/// Sign vector of one object tuple, laid out as in TypeSpace.
BitSet sign_vector(std::span<const ParametrizedFormula> formulas, std::span<const Tuple> params,
                   std::span<const Element> object);

// ---------------------------------------------------------------------------
// Growth exponents

struct GrowthPoint {
    std::size_t m = 0;
    std::uint64_t type_count = 0;
    std::uint64_t seed = 0;
};

struct GrowthSeries {
    std::vector<GrowthPoint> points;
};

struct ExponentFit {
    double slope = 0;
    double intercept = 0;
    std::vector<double> residuals;  // log t - (intercept + slope log m), per point
};

/// Least-squares slope of log t against log m.
ExponentFit fit_codensity_exponent(const GrowthSeries& series);

} // namespace laminar
