#include <doctest.h>

#include <set>

#include "laminar/errors.hpp"
#include "laminar/fullvcmin.hpp"
#include "laminar/rng.hpp"

using namespace laminar;

namespace {

/// Single-formula family δ(x0; x1, y) := x0 < y.
PsiFamily below_y(std::size_t n) {
    ParametrizedFormula f{"x0<y", 1, 2, n,
                          [](std::span<const Element> x, std::span<const Element> y) { return x[0] < y[1]; }};
    return {{f}, n};
}

/// Brute-force ψ: scan the carrier for a counterexample.
bool psi_oracle(const PsiFamily& fam, Element a1, Element b, Element bp, std::size_t i, std::size_t ip) {
    for (Element x = 0; x < fam.carrier_size; ++x) {
        const Tuple xs{x};
        if (fam.delta0[ip](xs, Tuple{a1, bp}) && !fam.delta0[i](xs, Tuple{a1, b}))
            return false;
    }
    return true;
}

} // namespace

TEST_CASE("eval_psi") {
    const auto dlo = dlo_instance(10, {2, 5});
    CHECK(eval_psi(dlo.family, 4, 5, 5, 1, 1));
    // x0 < 0 is empty: vacuous.
    CHECK(eval_psi(dlo.family, 0, 3, 7, 0, 0));

    const auto fam = below_y(12);
    for (Element b = 0; b < 12; ++b)
        for (Element bp = 0; bp < 12; ++bp)
            CHECK(eval_psi(fam, 0, b, bp, 0, 0) == (bp <= b));

    Rng rng(41);
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = static_cast<std::size_t>(rng.between(2, 15));
        const auto inst = dlo_instance(n, {});
        const auto a1 = static_cast<Element>(rng.below(n));
        const auto b = static_cast<Element>(rng.below(n));
        const auto bp = static_cast<Element>(rng.below(n));
        const auto i = rng.below(2), ip = rng.below(2);
        CHECK(eval_psi(inst.family, a1, b, bp, i, ip) == psi_oracle(inst.family, a1, b, bp, i, ip));
    }
}

TEST_CASE("psi_type") {
    const auto fam = below_y(5);
    const std::vector<Element> one{3};
    const auto p = psi_type(fam, 0, one);
    CHECK(p.bits.size() == 1);
    CHECK(p.at(0, 0, 0, 0));

    const auto dlo = dlo_instance(10, {0});
    const auto all = psi_type(dlo.family, 0, dlo.params);
    CHECK(all.bits.count() == all.bits.size());

    const auto spread = dlo_instance(10, {5});
    CHECK(psi_type(spread.family, 1, spread.params) == psi_type(spread.family, 2, spread.params));
    CHECK(psi_type(spread.family, 6, spread.params) == psi_type(spread.family, 8, spread.params));
    CHECK_FALSE(psi_type(spread.family, 2, spread.params) == psi_type(spread.family, 7, spread.params));

    CHECK(PsiType::index(1, 0, 1, 0, 2, 2) == 10);
}

TEST_CASE("forests and virtual spaces from psi types") {
    const auto fam = below_y(8);
    const std::vector<Element> b{2, 4, 6};
    const auto p = psi_type(fam, 0, b);
    const auto forest = forest_from_type(p);
    CHECK(forest.class_count() == 3);
    CHECK(forest.leq(2, 1));
    CHECK(forest.leq(1, 0));
    CHECK(p_virtual_space(p).entries.size() == 4);

    const auto empty = psi_type(fam, 0, {});
    CHECK(p_virtual_space(empty).entries.size() == 1);

    const auto anchored = anchored_params(7, b);
    CHECK(anchored == std::vector<Tuple>{{7, 2}, {7, 4}, {7, 6}});
    CHECK(forest_from_type(p) == build_forest(anchored, fam.delta0, 8));
}

TEST_CASE("determination on DLO carriers") {
    for (std::size_t n = 2; n <= 12; ++n) {
        Rng rng(derive_seed(42, n));
        for (int trial = 0; trial < 5; ++trial) {
            const auto k = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(std::min<std::size_t>(n, 4))));
            std::vector<Element> b;
            for (auto v : rng.sample_distinct(k, n))
                b.push_back(static_cast<Element>(v));
            const auto inst = dlo_instance(n, b);
            CHECK(check_forest_determination(inst.family, inst.params).ok());
            CHECK(check_type_determination(inst.family, inst.params).ok());

            // Equal Ψ-types give equal forests, checked pairwise.
            for (Element a = 0; a < n; ++a)
                for (Element c = 0; c < n; ++c)
                    if (psi_type(inst.family, a, b) == psi_type(inst.family, c, b))
                        CHECK(build_forest(anchored_params(a, b), inst.family.delta0, n) ==
                              build_forest(anchored_params(c, b), inst.family.delta0, n));
        }
    }
}

TEST_CASE("boolean expressions") {
    // atoms over 2 params × 2 formulas; param 1, formula 0 is bit 2.
    const BitSet atoms(4, {2});
    CHECK(BoolExpr::atom(0, 1).eval(atoms, 2));
    CHECK_FALSE(BoolExpr::atom(1, 1).eval(atoms, 2));
    CHECK(BoolExpr::negate(BoolExpr::atom(0, 0)).eval(atoms, 2));
    CHECK(BoolExpr::any_of({BoolExpr::constant(false), BoolExpr::atom(0, 1)}).eval(atoms, 2));
    CHECK_FALSE(BoolExpr::all_of({BoolExpr::constant(true), BoolExpr::atom(0, 0)}).eval(atoms, 2));
    CHECK(BoolExpr::all_of({}).eval(atoms, 2));
}

TEST_CASE("certificate validation") {
    const auto inst = dlo_instance(12, {3, 7, 9});
    CHECK_NOTHROW(validate_certificate(inst.family, inst.params, inst.certificate));

    auto broken = inst.certificate;
    broken.psi[PsiType::index(0, 1, 1, 1, 3, 2)] = BoolExpr::constant(true);
    CHECK_THROWS_AS(validate_certificate(inst.family, inst.params, broken), ValidationError);
    CHECK_THROWS_AS(incremental_count_check(inst.family, inst.params, broken), ValidationError);
}

TEST_CASE("incremental count on the DLO instance") {
    for (std::size_t size : {1, 4, 8}) {
        Rng rng(derive_seed(43, size));
        std::vector<Element> b;
        for (auto v : rng.sample_distinct(size, 4 * size))
            b.push_back(static_cast<Element>(v));
        const auto inst = dlo_instance(4 * size, b);
        const auto r = incremental_count_check(inst.family, inst.params, inst.certificate);
        CHECK(r.steps_ok());
        CHECK(r.first_space <= size * 2 + 1);
        CHECK(r.sum_dist <= 2 * size * size * 2);
        CHECK(r.aggregate_bound == 2 * size * size * 2 + size * 2 + 1);
        CHECK(r.union_size <= r.aggregate_bound);
        CHECK(r.realized_contained);
        CHECK(r.ok());
        if (size == 1)
            CHECK(r.union_size < r.aggregate_bound);

        // Realized Δ0-types of pairs (x0, x1), counted independently.
        std::set<std::vector<bool>> pairs;
        for (Element a1 = 0; a1 < 4 * size; ++a1)
            for (Element x0 = 0; x0 < 4 * size; ++x0) {
                std::vector<bool> v;
                for (auto y : b)
                    for (const auto& d : inst.family.delta0)
                        v.push_back(d(Tuple{x0}, Tuple{a1, y}));
                pairs.insert(v);
            }
        CHECK(r.realized_pair_types == pairs.size());
        CHECK(pairs.size() <= r.union_size);
    }
}
