#include <algorithm>
#include <chrono>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "laminar/errors.hpp"
#include "laminar/harness.hpp"
#include "laminar/models.hpp"
#include "laminar/rng.hpp"

namespace laminar {

namespace {

class Timer {
  public:
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void record(LemmaResult& r, std::size_t trial, const std::string& what) {
    ++r.failures;
    if (r.first_failure.empty())
        r.first_failure = "trial " + std::to_string(trial) + ": " + what;
}

/// Random F(C, Δ) with |C||Δ| ≤ max_nodes over a random ultrametric model.
struct ForestInstance {
    std::shared_ptr<const UltrametricModel> model;
    std::vector<Tuple> params;
    std::vector<ParametrizedFormula> delta;
    QuasiForest forest;
};

ForestInstance random_forest(Rng& rng, std::size_t max_nodes) {
    ForestInstance f;
    const auto leaves = static_cast<std::size_t>(rng.between(2, 16));
    const auto branching = static_cast<std::size_t>(rng.between(2, 4));
    f.model = std::make_shared<const UltrametricModel>(random_ultrametric(leaves, branching, rng.next()));
    const auto levels = static_cast<std::size_t>(rng.between(1, 3));
    std::vector<std::size_t> ks{0, 1, 2, 3};
    rng.shuffle(ks);
    for (std::size_t i = 0; i < levels; ++i)
        f.delta.push_back(level_ball_formula(f.model, ks[i]));
    const auto c = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(max_nodes / levels)));
    for (std::size_t i = 0; i < c; ++i)
        f.params.push_back({static_cast<Element>(rng.below(leaves))});
    f.forest = build_forest(f.params, f.delta, leaves);
    return f;
}

SiblingOrders shuffled_siblings(const TypeTree& tree, Rng& rng) {
    auto s = default_sibling_orders(tree);
    for (auto& level : s)
        rng.shuffle(level);
    return s;
}

struct DloCase {
    std::size_t n = 0;
    std::vector<Element> params;
};

DloCase random_dlo(Rng& rng) {
    DloCase c;
    c.n = static_cast<std::size_t>(rng.between(2, 20));
    const auto b = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(std::min<std::size_t>(6, c.n))));
    for (auto v : rng.sample_distinct(b, c.n))
        c.params.push_back(static_cast<Element>(v));
    rng.shuffle(c.params);
    return c;
}

std::string describe(const DloCase& c) {
    std::ostringstream os;
    os << "n=" << c.n << " B={";
    for (std::size_t i = 0; i < c.params.size(); ++i)
        os << (i ? "," : "") << c.params[i];
    os << "}";
    return os.str();
}

} // namespace

LemmaResult verify_directed_linear_bound(std::uint64_t seed, std::size_t trials) {
    Timer timer;
    LemmaResult r{"directed-linear-bound", trials, 0, 0, {}};
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(derive_seed(seed, 1, t));
        const auto leaves = static_cast<std::size_t>(rng.between(2, 64));
        const auto branching = static_cast<std::size_t>(rng.between(2, 5));
        auto model = std::make_shared<const UltrametricModel>(random_ultrametric(leaves, branching, rng.next()));
        if (std::holds_alternative<CrossingPair>(check_directed(designated_family(*model)))) {
            record(r, t, "ball family not directed");
            continue;
        }
        // Level balls parametrized by leaves, and node balls parametrized by nodes.
        std::vector<ParametrizedFormula> delta;
        const auto levels = static_cast<std::size_t>(rng.between(1, 3));
        for (std::size_t k = 0; k < levels; ++k)
            delta.push_back(level_ball_formula(model, k));
        const auto c = static_cast<std::size_t>(rng.between(0, 32));
        std::vector<Tuple> leaf_params, node_params;
        for (std::size_t i = 0; i < c; ++i) {
            leaf_params.push_back({static_cast<Element>(rng.below(leaves))});
            node_params.push_back({static_cast<Element>(rng.below(model->node_count()))});
        }
        const auto a = linear_bound_check(leaf_params, delta, leaves);
        const std::vector<ParametrizedFormula> single{single_ball_formula(model)};
        const auto b = linear_bound_check(node_params, single, leaves);
        if (!a.ok() || !b.ok())
            record(r, t, "realized types " + std::to_string(a.ok() ? b.realized : a.realized) + " vs bound " +
                             std::to_string(a.ok() ? b.bound : a.bound));
    }
    r.ms = timer.ms();
    return r;
}

LemmaResult verify_convexity(std::uint64_t seed, std::size_t trials) {
    Timer timer;
    LemmaResult r{"convexity", trials, 0, 0, {}};
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(derive_seed(seed, 2, t));
        const auto inst = random_forest(rng, 12);
        const TypeTree tree(inst.forest);
        for (const auto& siblings : {default_sibling_orders(tree), shuffled_siblings(tree, rng)}) {
            const auto order = convex_order(tree, siblings);
            bool extends = true;
            for (std::size_t p = 0; p < tree.size(); ++p)
                for (std::size_t q = 0; q < tree.size(); ++q)
                    if (p != q && tree.members(p).is_subset_of(tree.members(q)) && !order.less(p, q))
                        extends = false;
            if (!extends) {
                record(r, t, "order does not extend inclusion");
                break;
            }
            if (!check_convexity(tree, order)) {
                record(r, t, "some χ(t) is not an interval");
                break;
            }
        }
    }
    r.ms = timer.ms();
    return r;
}

LemmaResult verify_sum_dist(std::uint64_t seed, std::size_t trials) {
    Timer timer;
    LemmaResult r{"sum-dist", trials, 0, 0, {}};
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(derive_seed(seed, 3, t));
        const auto inst = random_forest(rng, 12);
        const TypeTree tree(inst.forest);
        const auto order = convex_order(tree);
        const std::pair<std::size_t, std::size_t> counts{inst.params.size(), inst.delta.size()};
        const auto full = sum_dist_check(tree, order, order.sequence(), counts);
        if (!full.ok) {
            record(r, t, "full enumeration sum " + std::to_string(full.sum) + " > " + std::to_string(full.bound));
            continue;
        }
        for (int s = 0; s < 4; ++s) {
            std::vector<std::size_t> sub;
            for (auto v : order.sequence())
                if (rng.coin())
                    sub.push_back(v);
            const auto part = sum_dist_check(tree, order, sub, counts);
            if (!part.ok) {
                record(r, t, "subsequence sum " + std::to_string(part.sum) + " > " + std::to_string(part.bound));
                break;
            }
        }
    }
    r.ms = timer.ms();
    return r;
}

LemmaResult verify_sauer_shelah(std::uint64_t seed, std::size_t trials) {
    Timer timer;
    LemmaResult r{"sauer-shelah", trials, 0, 0, {}};
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(derive_seed(seed, 4, t));
        const auto n = static_cast<std::size_t>(rng.between(1, 14));
        const auto count = static_cast<std::size_t>(rng.between(1, 20));
        const double density = 0.1 + 0.8 * static_cast<double>(rng.below(1000)) / 1000.0;
        std::vector<BitSet> sets;
        for (std::size_t i = 0; i < count; ++i) {
            BitSet s(n);
            for (std::size_t x = 0; x < n; ++x)
                if (rng.coin(density))
                    s.set(x);
            sets.push_back(std::move(s));
        }
        if (!sauer_check(SetFamily(Universe(n), std::move(sets))))
            record(r, t, "shatter function exceeds the binomial bound");
    }
    r.ms = timer.ms();
    return r;
}

std::optional<std::size_t> brute_force_cover_length(const BitSet& target, std::span<const BitSet> pool,
                                                    std::size_t max_len) {
    if (target.none())
        return 0;
    std::vector<BitSet> inside;
    for (const auto& b : pool)
        if (b.any() && b.is_subset_of(target) && std::find(inside.begin(), inside.end(), b) == inside.end())
            inside.push_back(b);
    const auto n = inside.size();
    // Depth-first over index-increasing subsets of size len.
    for (std::size_t len = 1; len <= std::min(max_len, n); ++len) {
        std::vector<std::size_t> idx(len);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        while (true) {
            BitSet u(target.size());
            for (auto i : idx)
                u |= inside[i];
            if (u == target)
                return len;
            std::size_t k = len;
            while (k > 0 && idx[k - 1] == n - len + k - 1)
                --k;
            if (k == 0)
                break;
            ++idx[k - 1];
            for (auto j = k; j < len; ++j)
                idx[j] = idx[j - 1] + 1;
        }
    }
    return std::nullopt;
}

LemmaResult verify_components(std::uint64_t seed, std::size_t trials) {
    Timer timer;
    LemmaResult r{"components", trials, 0, 0, {}};
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(derive_seed(seed, 5, t));
        const auto leaves = static_cast<std::size_t>(rng.between(4, 24));
        const auto model = random_ultrametric(leaves, static_cast<std::size_t>(rng.between(2, 4)), rng.next());
        std::vector<BitSet> pool = ball_family(model).base().sets();
        const auto pieces = static_cast<std::size_t>(rng.between(1, 3));
        BitSet target(leaves);
        for (std::size_t i = 0; i < pieces; ++i)
            target |= model.ball(rng.below(model.node_count()));

        const auto res = components(target, pool);
        const auto* d = std::get_if<Decomposition>(&res);
        if (!d) {
            record(r, t, "target reported uncovered");
            continue;
        }
        BitSet uni(leaves);
        for (const auto& b : d->balls)
            uni |= b;
        if (!(uni == target)) {
            record(r, t, "union of components differs from target");
            continue;
        }
        const auto best = brute_force_cover_length(target, pool, 3);
        if (!best || *best != d->balls.size()) {
            record(r, t, "component count " + std::to_string(d->balls.size()) + " is not minimal");
            continue;
        }
        auto shuffled = pool;
        rng.shuffle(shuffled);
        const auto again = components(target, shuffled);
        const auto* d2 = std::get_if<Decomposition>(&again);
        if (!d2 || d2->balls != d->balls)
            record(r, t, "components changed under pool permutation");
    }
    r.ms = timer.ms();
    return r;
}

LemmaResult verify_forest_determination(std::uint64_t seed, std::size_t trials) {
    Timer timer;
    LemmaResult r{"forest-determination", trials, 0, 0, {}};
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(derive_seed(seed, 6, t));
        const auto c = random_dlo(rng);
        const auto inst = dlo_instance(c.n, c.params);
        const auto rep = check_forest_determination(inst.family, inst.params);
        if (!rep.ok())
            record(r, t, describe(c) + " a1=" + std::to_string(*rep.witness));
    }
    r.ms = timer.ms();
    return r;
}

LemmaResult verify_type_determination(std::uint64_t seed, std::size_t trials) {
    Timer timer;
    LemmaResult r{"type-determination", trials, 0, 0, {}};
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(derive_seed(seed, 7, t));
        const auto c = random_dlo(rng);
        const auto inst = dlo_instance(c.n, c.params);
        const auto rep = check_type_determination(inst.family, inst.params);
        if (!rep.ok())
            record(r, t, describe(c) + " a1=" + std::to_string(*rep.witness));
    }
    r.ms = timer.ms();
    return r;
}

LemmaResult verify_incremental_count(std::uint64_t seed, std::size_t trials) {
    Timer timer;
    LemmaResult r{"incremental-count", trials, 0, 0, {}};
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(derive_seed(seed, 8, t));
        const auto c = random_dlo(rng);
        const auto inst = dlo_instance(c.n, c.params);
        try {
            const auto rep = incremental_count_check(inst.family, inst.params, inst.certificate);
            if (!rep.ok())
                record(r, t, describe(c) + " inequality failed");
        } catch (const ValidationError& e) {
            record(r, t, describe(c) + " " + e.what());
        }
    }
    r.ms = timer.ms();
    return r;
}

std::vector<LemmaResult> verify_lemmas(const VerifyConfig& config) {
    if (config.trials && *config.trials == 0)
        throw DomainError("trials must be at least 1");
    auto n = [&](std::size_t fallback) { return config.trials.value_or(fallback); };
    const auto s = config.seed;
    return {
        verify_directed_linear_bound(s, n(500)), verify_convexity(s, n(1000)),
        verify_sum_dist(s, n(1000)),             verify_sauer_shelah(s, n(1000)),
        verify_components(s, n(500)),            verify_forest_determination(s, n(300)),
        verify_type_determination(s, n(300)),    verify_incremental_count(s, n(200)),
    };
}

nlohmann::json lemmas_json(const std::vector<LemmaResult>& results, std::uint64_t seed) {
    using nlohmann::json;
    json lemmas = json::array();
    bool pass = true;
    for (const auto& r : results) {
        json j = {{"id", r.id}, {"trials", r.trials}, {"failures", r.failures}, {"ms", r.ms}};
        if (!r.first_failure.empty())
            j["first_failure"] = r.first_failure;
        lemmas.push_back(std::move(j));
        pass = pass && r.ok();
    }
    return {{"seed", seed}, {"lemmas", lemmas}, {"pass", pass}};
}

// ---------------------------------------------------------------------------

DloInstance demo_instance(std::size_t b_size, std::uint64_t seed) {
    if (b_size == 0)
        throw DomainError("demo_instance: |B| must be positive");
    const auto n = 4 * b_size;
    Rng rng(derive_seed(seed, 9, b_size));
    std::vector<Element> params;
    for (auto v : rng.sample_distinct(b_size, n))
        params.push_back(static_cast<Element>(v));
    return dlo_instance(n, std::move(params));
}

nlohmann::json incremental_json(const IncrementalReport& r) {
    using nlohmann::json;
    json steps = json::array();
    for (const auto& s : r.steps)
        steps.push_back({{"from", s.from}, {"to", s.to}, {"dist", s.dist}, {"new_entries", s.new_entries},
                         {"ok", s.ok()}});
    return {
        {"b_size", r.param_count},
        {"delta0", r.delta0_count},
        {"delta1", r.delta1_count},
        {"delta1_params", r.delta1_params},
        {"realized_delta1_types", r.realized_delta1_types},
        {"realized_psi_types", r.realized_psi_types},
        {"first_space", r.first_space},
        {"first_space_bound", r.first_space_bound},
        {"sum_dist", r.sum_dist},
        {"sum_dist_bound", r.sum_dist_bound},
        {"union_size", r.union_size},
        {"aggregate_bound", r.aggregate_bound},
        {"realized_pair_types", r.realized_pair_types},
        {"realized_contained", r.realized_contained},
        {"steps_ok", r.steps_ok()},
        {"pass", r.ok()},
        {"steps", steps},
    };
}

} // namespace laminar
