#include <doctest.h>

#include "laminar/errors.hpp"
#include "laminar/forest.hpp"
#include "laminar/models.hpp"
#include "laminar/rng.hpp"
#include "oracles.hpp"

using namespace laminar;

namespace {

QuasiForest forest_of(std::size_t carrier, const std::vector<std::vector<std::size_t>>& balls) {
    std::vector<NodeLabel> labels;
    std::vector<BitSet> extents;
    for (std::size_t i = 0; i < balls.size(); ++i) {
        labels.push_back({i, 0});
        BitSet b(carrier);
        for (auto x : balls[i])
            b.set(x);
        extents.push_back(b);
    }
    return QuasiForest::from_extents(labels, extents, carrier);
}

QuasiForest binary_ball_tree() {
    const UltrametricModel m({-1, 0, 0, 1, 1, 2, 2});
    const auto family = ball_family(m);
    std::vector<NodeLabel> labels;
    for (std::size_t i = 0; i < family.size(); ++i)
        labels.push_back({i, 0});
    return QuasiForest::from_extents(labels, family.base().sets(), m.leaf_count());
}

ParametrizedFormula interval_ball(std::size_t n, Element width) {
    // x ∈ [y, y + width), a chain family once y is fixed.
    return {"ball", 1, 1, n, [width](std::span<const Element> x, std::span<const Element> y) {
                return x[0] >= y[0] && x[0] < y[0] + width;
            }};
}

} // namespace

TEST_CASE("check_directed") {
    CHECK(std::holds_alternative<DirectedFamily>(check_directed(SetFamily::from_lists(3, {{0}, {1}, {2}}))));
    CHECK(std::holds_alternative<DirectedFamily>(check_directed(SetFamily::from_lists(3, {{0}, {0, 1}, {0, 1, 2}}))));
    const auto bad = check_directed(SetFamily::from_lists(3, {{0, 1}, {1, 2}}));
    REQUIRE(std::holds_alternative<CrossingPair>(bad));
    CHECK(std::get<CrossingPair>(bad) == CrossingPair{0, 1});
    CHECK_THROWS_AS(require_directed(SetFamily::from_lists(3, {{2}, {0, 1}, {1, 2}})), DomainError);
    // Lexicographically first crossing pair.
    const auto many = check_directed(SetFamily::from_lists(4, {{3}, {0, 1}, {2, 3}, {1, 2}, {0, 3}}));
    CHECK(std::get<CrossingPair>(many) == CrossingPair{1, 3});
}

TEST_CASE("check_directed agrees with pairwise oracle") {
    Rng rng(21);
    for (int trial = 0; trial < 300; ++trial) {
        const auto n = static_cast<std::size_t>(rng.between(1, 10));
        std::vector<BitSet> sets;
        for (auto k = rng.between(0, 8); k > 0; --k) {
            // Mostly intervals, which are often but not always laminar.
            const auto a = rng.below(n);
            const auto b = a + rng.below(n - a);
            BitSet s(n);
            for (auto x = a; x <= b; ++x)
                s.set(x);
            sets.push_back(s);
        }
        const SetFamily f(Universe(n), sets);
        CHECK(std::holds_alternative<DirectedFamily>(check_directed(f)) == oracle::laminar(oracle::sets_of(f)));
    }
}

TEST_CASE("quasi-forest construction") {
    const auto single = forest_of(3, {{0, 1}});
    CHECK(single.size() == 1);
    CHECK(single.class_count() == 1);

    const auto chain = forest_of(3, {{0, 1, 2}, {0, 1}, {0}});
    CHECK(chain.class_count() == 3);
    CHECK(chain.leq(0, 2));
    CHECK(chain.leq(1, 2));
    CHECK_FALSE(chain.leq(2, 0));
    CHECK(chain.class_parent(0) == npos);
    CHECK(chain.class_parent(2) == 1);

    const auto twins = forest_of(3, {{1, 2}, {1, 2}});
    CHECK(twins.size() == 2);
    CHECK(twins.class_count() == 1);
    CHECK(twins.class_members(0) == std::vector<std::size_t>{0, 1});

    // Relation violating the chain axiom: two incomparable predecessors.
    std::vector<BitSet> down{BitSet(3, {0}), BitSet(3, {1}), BitSet(3, {0, 1, 2})};
    CHECK_THROWS_AS(QuasiForest::from_relation({{0, 0}, {1, 0}, {2, 0}}, down), ValidationError);
    std::vector<BitSet> no_refl{BitSet(2), BitSet(2, {1})};
    CHECK_THROWS_AS(QuasiForest::from_relation({{0, 0}, {1, 0}}, no_refl), ValidationError);
}

TEST_CASE("build_forest") {
    const std::vector<ParametrizedFormula> delta{interval_ball(8, 2), interval_ball(8, 4)};
    const std::vector<Tuple> params{{0}, {4}};
    const auto f = build_forest(params, delta, 8);
    REQUIRE(f.size() == 4);
    CHECK(f.labels()[3] == NodeLabel{1, 1});
    // [0,2) ⊆ [0,4) so ⟨0,1⟩ ⊴ ⟨0,0⟩.
    CHECK(f.leq(1, 0));
    CHECK_FALSE(f.leq(0, 1));
    CHECK_FALSE(f.leq(1, 2));
    CHECK(f.class_count() == 4);

    const std::vector<Tuple> crossing{{0}, {1}};
    const std::vector<ParametrizedFormula> narrow{interval_ball(6, 2)};
    CHECK_THROWS_AS(build_forest(crossing, narrow, 6), DomainError);
}

TEST_CASE("add_root") {
    CHECK(add_root(QuasiForest{}).size() == 1);
    CHECK(add_root(QuasiForest{}).class_count() == 1);
    const auto disjoint = add_root(forest_of(3, {{0}, {1}}));
    CHECK(disjoint.class_count() == 3);
    const auto full = add_root(forest_of(3, {{0, 1, 2}, {0}}));
    CHECK(full.root_equivalent == std::vector<std::size_t>{0});
    CHECK(full.class_count() == 2);
}

TEST_CASE("type tree shapes") {
    const TypeTree empty(QuasiForest{});
    CHECK(empty.size() == 1);

    const TypeTree chain(forest_of(3, {{0, 1, 2}, {0, 1}, {0}}));
    REQUIRE(chain.size() == 4);
    for (std::size_t v = 1; v < 4; ++v) {
        CHECK(chain.parent(v) == v - 1);
        CHECK(chain.depth(v) == v);
        CHECK(chain.members(v).count() == v);
    }

    const TypeTree two(forest_of(3, {{0}, {1}}));
    REQUIRE(two.size() == 3);
    CHECK(two.children(0) == std::vector<std::size_t>{1, 2});
    CHECK(two.members(1).members() == std::vector<std::size_t>{0});
    CHECK(two.meet(1, 2) == 0);

    const TypeTree bin(binary_ball_tree());
    REQUIRE(bin.size() == 8);
    CHECK(bin.children(0).size() == 1);
    CHECK(bin.children(1).size() == 2);
    for (auto c : bin.children(1))
        CHECK(bin.children(c).size() == 2);
    CHECK(bin.find(bin.members(5)) == std::optional<std::size_t>{5});
    CHECK(bin.ancestor_at(7, 1) == 1);
}

TEST_CASE("diff and dist") {
    const TypeTree chain(forest_of(4, {{0, 1, 2, 3}, {0, 1, 2}, {0, 1}, {0}}));
    CHECK(dist(chain.node(2), chain.node(2)) == 0);
    CHECK(diff(chain.node(2), chain.node(2)).none());
    CHECK(diff(chain.node(1), chain.node(4)).members() == std::vector<std::size_t>{1, 2, 3});
    CHECK(dist(chain.node(1), chain.node(4)) == 3);

    const TypeTree two(forest_of(3, {{0}, {1}}));
    CHECK(diff(two.node(1), two.node(2)).members() == std::vector<std::size_t>{0, 1});
    CHECK(dist(two.node(1), two.node(2)) == 2);
    CHECK_THROWS_AS(dist(two.node(1), chain.node(1)), DomainError);
}

TEST_CASE("convex order") {
    const TypeTree chain(forest_of(3, {{0, 1, 2}, {0, 1}, {0}}));
    CHECK(convex_order(chain).sequence() == std::vector<std::size_t>{0, 1, 2, 3});

    const TypeTree two(forest_of(3, {{0}, {1}}));
    CHECK(convex_order(two).sequence() == std::vector<std::size_t>{0, 1, 2});
    CHECK(convex_order(two, {{2, 1}, {}, {}}).sequence() == std::vector<std::size_t>{0, 2, 1});
    CHECK_THROWS_AS(convex_order(two, {{1}, {}, {}}), DomainError);

    const TypeTree bin(binary_ball_tree());
    const auto order = convex_order(bin);
    CHECK(check_convexity(bin, order));
    CHECK(order.sequence() == oracle::preorder(bin, default_sibling_orders(bin)));
    CHECK(oracle::convex(bin, order.sequence()));
}

TEST_CASE("check_convexity rejects interleaved subtrees") {
    // a = {0,1} ⊃ a' = {0}; b = {2,3} ⊃ b' = {2}.
    const TypeTree t(forest_of(4, {{0, 1}, {0}, {2, 3}, {2}}));
    const auto good = convex_order(t).sequence();
    CHECK(check_convexity(t, good));
    const std::vector<std::size_t> bad{0, 1, 3, 2, 4};
    CHECK_FALSE(check_convexity(t, bad));
    CHECK_FALSE(oracle::convex(t, bad));
}

TEST_CASE("sum of distances") {
    const TypeTree bin(binary_ball_tree());
    const auto order = convex_order(bin);
    const std::vector<std::size_t> one{3};
    const auto single = sum_dist_check(bin, order, one);
    CHECK(single.sum == 0);
    CHECK(single.ok);

    const auto full = sum_dist_check(bin, order, order.sequence(), std::pair<std::size_t, std::size_t>{7, 1});
    CHECK(full.bound == 14);
    CHECK(full.sum <= 14);
    CHECK(full.product_bound == std::optional<std::size_t>{14});
    CHECK(full.ok);

    const std::vector<std::size_t> backwards{3, 1};
    CHECK_THROWS_AS(sum_dist_check(bin, order, backwards), DomainError);
}

TEST_CASE("virtual type space and the linear bound") {
    const auto none = virtual_type_space(QuasiForest{});
    CHECK(none.entries.size() == 1);
    CHECK(none.bound == 1);

    const auto nested = virtual_type_space(forest_of(3, {{0, 1, 2}, {0, 1}, {0}}));
    CHECK(nested.entries.size() == 4);

    const std::vector<ParametrizedFormula> delta{interval_ball(8, 8)};
    const auto empty = linear_bound_check({}, delta, 8);
    CHECK(empty.realized == 1);
    CHECK(empty.bound == 1);
    CHECK(empty.ok());

    const std::vector<Tuple> c{{0}, {2}, {4}};
    const auto r = linear_bound_check(c, delta, 8);
    CHECK(r.realized <= 4);
    CHECK(r.ok());
}

TEST_CASE("components") {
    const UltrametricModel m({-1, 0, 0, 1, 1, 2, 2});
    const auto pool = ball_family(m).base().sets();

    auto decompose = [&](const BitSet& target) { return std::get<Decomposition>(components(target, pool)); };
    const auto one = decompose(m.ball(1));
    CHECK(one.balls == std::vector<BitSet>{m.ball(1)});
    CHECK(one.pool_indices == std::vector<std::size_t>{1});

    const auto two = decompose(m.ball(3) | m.ball(6));
    CHECK(two.balls == std::vector<BitSet>{m.ball(3), m.ball(6)});

    // ball(1) presented as the union of its children collapses to ball(1).
    CHECK(decompose(m.ball(3) | m.ball(4)).balls == std::vector<BitSet>{m.ball(1)});

    // Leaf 0 is the only pool ball-free point once ball(3) is dropped.
    std::vector<BitSet> partial{m.ball(4), m.ball(2)};
    const auto gap = components(m.ball(1), partial);
    REQUIRE(std::holds_alternative<Uncovered>(gap));
    CHECK(std::get<Uncovered>(gap).point == 0);

    std::vector<BitSet> crossing{BitSet(3, {0, 1}), BitSet(3, {1, 2})};
    CHECK_THROWS_AS(components(BitSet(3, {0, 1, 2}), crossing), DomainError);
}
