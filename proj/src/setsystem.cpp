#include "laminar/setsystem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <Eigen/Dense>

#include "laminar/errors.hpp"
#include "laminar/rng.hpp"

namespace laminar {

Universe::Universe(std::size_t size, std::size_t cap) : size_(size) {
    if (size == 0)
        throw DomainError("universe must have at least one element");
    if (size > cap) {
        std::ostringstream os;
        os << "universe of " << size << " elements exceeds cap " << cap;
        throw DomainError(os.str());
    }
}

SetFamily::SetFamily(Universe universe, std::vector<BitSet> sets) : universe_(universe), sets_(std::move(sets)) {
    for (std::size_t i = 0; i < sets_.size(); ++i)
        if (sets_[i].size() != universe_.size())
            throw DomainError("set " + std::to_string(i) + " is not sized to the universe");
}

SetFamily SetFamily::from_lists(std::size_t universe_size, const std::vector<std::vector<std::size_t>>& sets) {
    Universe u(universe_size);
    std::vector<BitSet> out;
    out.reserve(sets.size());
    for (const auto& list : sets) {
        BitSet b(universe_size);
        for (auto e : list) {
            if (e >= universe_size)
                throw DomainError("element " + std::to_string(e) + " outside universe of size " +
                                  std::to_string(universe_size));
            b.set(e);
        }
        out.push_back(std::move(b));
    }
    return SetFamily(u, std::move(out));
}

bool SetFamily::has_duplicates() const {
    std::unordered_set<BitSet, BitSetHash> seen;
    for (const auto& s : sets_)
        if (!seen.insert(s).second)
            return true;
    return false;
}

std::vector<std::vector<std::size_t>> SetFamily::as_lists() const {
    std::vector<std::vector<std::size_t>> out;
    out.reserve(sets_.size());
    for (const auto& s : sets_)
        out.push_back(s.members());
    return out;
}

SetFamily trace(const SetFamily& family, std::span<const std::size_t> probe) {
    const auto n = family.universe().size();
    for (auto p : probe)
        if (p >= n)
            throw DomainError("probe index " + std::to_string(p) + " outside universe of size " + std::to_string(n));

    std::set<BitSet> traces;
    for (const auto& s : family.sets()) {
        BitSet t(probe.size());
        for (std::size_t i = 0; i < probe.size(); ++i)
            if (s.test(probe[i]))
                t.set(i);
        traces.insert(std::move(t));
    }
    Universe u = probe.empty() ? Universe::empty() : Universe(probe.size(), std::max(probe.size(), n));
    return SetFamily(u, std::vector<BitSet>(traces.begin(), traces.end()));
}

namespace {

std::vector<std::uint32_t> as_masks(const SetFamily& family, std::size_t cap, const char* op) {
    const auto n = family.universe().size();
    if (n > cap) {
        std::ostringstream os;
        os << op << ": universe of " << n << " elements exceeds exhaustive cap " << cap
           << "; use a sampled estimate instead";
        throw ResourceError(os.str());
    }
    if (n > 32)
        throw ResourceError(std::string(op) + ": exhaustive mode supports at most 32 elements");
    std::vector<std::uint32_t> masks;
    masks.reserve(family.size());
    for (const auto& s : family.sets())
        masks.push_back(s.words().empty() ? 0U : static_cast<std::uint32_t>(s.words()[0]));
    std::sort(masks.begin(), masks.end());
    masks.erase(std::unique(masks.begin(), masks.end()), masks.end());
    return masks;
}

// Number of distinct traces of `masks` on the subset `probe`.
std::uint64_t trace_count(const std::vector<std::uint32_t>& masks, std::uint32_t probe, std::vector<std::uint32_t>& scratch) {
    scratch.clear();
    for (auto m : masks)
        scratch.push_back(m & probe);
    std::sort(scratch.begin(), scratch.end());
    return static_cast<std::uint64_t>(std::unique(scratch.begin(), scratch.end()) - scratch.begin());
}

} // namespace

std::size_t vc_dimension(const SetFamily& family, std::size_t universe_cap) {
    if (family.empty())
        throw DomainError("vc_dimension: family must be nonempty");
    const auto masks = as_masks(family, universe_cap, "vc_dimension");
    const auto n = family.universe().size();
    std::vector<std::uint32_t> scratch;

    // Shattered sets are closed downward: grow level d+1 from level d.
    std::vector<std::uint32_t> level{0U};
    std::size_t d = 0;
    while (!level.empty()) {
        std::set<std::uint32_t> next;
        const auto want = std::uint64_t{1} << (d + 1);
        if (want > masks.size())
            break;
        for (auto a : level) {
            const auto top = a == 0 ? 0U : 32U - static_cast<unsigned>(std::countl_zero(a));
            for (std::size_t x = top; x < n; ++x) {
                const auto cand = a | (1U << x);
                if (trace_count(masks, cand, scratch) == want)
                    next.insert(cand);
            }
        }
        if (next.empty())
            break;
        level.assign(next.begin(), next.end());
        ++d;
    }
    return d;
}

std::uint64_t shatter_function(const SetFamily& family, std::size_t k, std::size_t universe_cap) {
    const auto n = family.universe().size();
    if (k > n)
        throw DomainError("shatter_function: k=" + std::to_string(k) + " exceeds universe size " + std::to_string(n));
    const auto masks = as_masks(family, universe_cap, "shatter_function");
    if (k == 0)
        return 1;
    std::vector<std::uint32_t> scratch;
    std::uint64_t best = 0;
    // Gosper's hack over k-subsets of n bits.
    std::uint64_t s = (std::uint64_t{1} << k) - 1;
    const std::uint64_t limit = std::uint64_t{1} << n;
    while (s < limit) {
        best = std::max(best, trace_count(masks, static_cast<std::uint32_t>(s), scratch));
        const std::uint64_t c = s & (~s + 1);
        const std::uint64_t r = s + c;
        s = (((r ^ s) >> 2) / c) | r;
    }
    return best;
}

std::vector<std::uint64_t> shatter_profile(const SetFamily& family, std::size_t universe_cap) {
    const auto n = family.universe().size();
    const auto masks = as_masks(family, universe_cap, "shatter_profile");
    std::vector<std::uint64_t> best(n + 1, 0);
    best[0] = 1;
    std::vector<std::uint32_t> scratch;
    for (std::uint64_t a = 1; a < (std::uint64_t{1} << n); ++a) {
        const auto k = static_cast<std::size_t>(std::popcount(a));
        best[k] = std::max(best[k], trace_count(masks, static_cast<std::uint32_t>(a), scratch));
    }
    return best;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n)
        return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return r;
}

std::uint64_t sauer_bound(std::uint64_t k, std::uint64_t d) {
    std::uint64_t s = 0;
    for (std::uint64_t i = 0; i <= std::min(k, d); ++i)
        s += binomial(k, i);
    return s;
}

bool sauer_check(const SetFamily& family, std::size_t universe_cap) {
    const auto d = vc_dimension(family, universe_cap);
    const auto profile = shatter_profile(family, universe_cap);
    for (std::size_t k = 0; k < profile.size(); ++k)
        if (profile[k] > sauer_bound(k, d))
            return false;
    return true;
}

// ---------------------------------------------------------------------------

BitSet sign_vector(std::span<const ParametrizedFormula> formulas, std::span<const Tuple> params,
                   std::span<const Element> object) {
    const auto nf = formulas.size();
    BitSet v(params.size() * nf);
    for (std::size_t j = 0; j < params.size(); ++j)
        for (std::size_t i = 0; i < nf; ++i)
            if (formulas[i].eval(object, params[j]))
                v.set(j * nf + i);
    return v;
}

TypeSpace type_space(std::span<const ParametrizedFormula> formulas, std::span<const Tuple> params,
                     std::size_t carrier_size, std::size_t object_arity, const TypeSpaceOptions& options) {
    if (object_arity == 0)
        throw DomainError("type_space: object arity must be positive");
    if (carrier_size == 0)
        throw DomainError("type_space: empty carrier");
    for (const auto& f : formulas) {
        if (f.object_arity != object_arity)
            throw DomainError("type_space: formula '" + f.name + "' has object arity " +
                              std::to_string(f.object_arity) + ", expected " + std::to_string(object_arity));
        if (!f.eval)
            throw DomainError("type_space: formula '" + f.name + "' has no evaluator");
    }
    for (const auto& f : formulas)
        for (const auto& b : params) {
            if (b.size() != f.param_arity)
                throw DomainError("type_space: parameter tuple arity mismatch for '" + f.name + "'");
            for (auto e : b)
                if (f.param_domain && e >= f.param_domain)
                    throw DomainError("type_space: parameter outside domain of '" + f.name + "'");
        }

    TypeSpace out;
    out.params.assign(params.begin(), params.end());
    for (const auto& f : formulas)
        out.formulas.push_back(f.name);

    // Overflow-safe count of carrier^k.
    std::uint64_t tuples = 1;
    bool huge = false;
    for (std::size_t i = 0; i < object_arity; ++i) {
        if (tuples > (std::uint64_t{1} << 62) / carrier_size) {
            huge = true;
            break;
        }
        tuples *= carrier_size;
    }
    const std::uint64_t per_tuple = std::max<std::uint64_t>(1, params.size() * formulas.size());
    const bool over = huge || tuples > options.eval_cap / per_tuple;

    std::unordered_map<BitSet, Tuple, BitSetHash> seen;
    Tuple x(object_arity, 0);
    auto visit = [&](const Tuple& obj) {
        auto v = sign_vector(formulas, params, obj);
        seen.try_emplace(std::move(v), obj);
        out.evaluations += params.size() * formulas.size();
    };

    if (!over) {
        for (std::uint64_t idx = 0; idx < tuples; ++idx) {
            visit(x);
            for (std::size_t c = object_arity; c-- > 0;) {
                if (++x[c] < carrier_size)
                    break;
                x[c] = 0;
            }
        }
    } else {
        if (!options.allow_sampling) {
            std::ostringstream os;
            os << "type_space: " << carrier_size << "^" << object_arity << " tuples x " << per_tuple
               << " instances exceeds evaluation cap " << options.eval_cap << "; enable sampling mode";
            throw ResourceError(os.str());
        }
        out.exact = false;
        Rng rng(options.sample_seed);
        const std::uint64_t samples = std::max<std::uint64_t>(1, options.eval_cap / per_tuple);
        for (std::uint64_t s = 0; s < samples; ++s) {
            for (auto& c : x)
                c = static_cast<Element>(rng.below(carrier_size));
            visit(x);
        }
    }

    std::vector<std::pair<BitSet, Tuple>> sorted(seen.begin(), seen.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [v, w] : sorted) {
        out.vectors.push_back(std::move(v));
        out.witnesses.push_back(std::move(w));
    }
    return out;
}

// ---------------------------------------------------------------------------

ExponentFit fit_codensity_exponent(const GrowthSeries& series) {
    std::set<std::size_t> distinct;
    for (const auto& p : series.points) {
        if (p.m < 2)
            throw DomainError("fit_codensity_exponent: parameter-set sizes must be at least 2");
        if (p.type_count < 1)
            throw DomainError("fit_codensity_exponent: type counts must be positive");
        distinct.insert(p.m);
    }
    if (distinct.size() < 3)
        throw DomainError("fit_codensity_exponent: need at least 3 distinct sizes, got " +
                          std::to_string(distinct.size()));

    const auto n = static_cast<Eigen::Index>(series.points.size());
    Eigen::MatrixXd design(n, 2);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& p = series.points[static_cast<std::size_t>(i)];
        design(i, 0) = 1.0;
        design(i, 1) = std::log(static_cast<double>(p.m));
        rhs(i) = std::log(static_cast<double>(p.type_count));
    }
    const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);
    const Eigen::VectorXd resid = rhs - design * coef;

    ExponentFit fit;
    fit.intercept = coef(0);
    fit.slope = coef(1);
    fit.residuals.assign(resid.data(), resid.data() + resid.size());
    return fit;
}

} // namespace laminar
