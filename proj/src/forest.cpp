#include "laminar/forest.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "laminar/errors.hpp"

namespace laminar {

namespace {

bool crossing(const BitSet& a, const BitSet& b) {
    return a.intersects(b) && !a.is_subset_of(b) && !b.is_subset_of(a);
}

std::optional<CrossingPair> first_crossing(std::span<const BitSet> sets) {
    for (std::size_t i = 0; i < sets.size(); ++i)
        for (std::size_t j = i + 1; j < sets.size(); ++j)
            if (crossing(sets[i], sets[j]))
                return CrossingPair{i, j};
    return std::nullopt;
}

// Linear-time laminarity test. Processing sets by decreasing size, each set
// must lie inside the innermost set already covering its elements.
bool laminar(std::span<const BitSet> sets, std::size_t universe) {
    std::vector<std::size_t> order(sets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<std::size_t> sizes(sets.size());
    for (std::size_t i = 0; i < sets.size(); ++i)
        sizes[i] = sets[i].count();
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return sizes[a] > sizes[b]; });

    std::vector<std::size_t> label(universe, npos);
    for (auto i : order) {
        const auto& s = sets[i];
        const auto head = s.first();
        if (head >= s.size())
            continue;
        const auto inner = label[head];
        for (auto x = head; x < s.size(); x = s.next(x + 1))
            if (label[x] != inner)
                return false;
        for (auto x = head; x < s.size(); x = s.next(x + 1))
            label[x] = i;
    }
    return true;
}

} // namespace

DirectedCheck check_directed(const SetFamily& family) {
    const auto& sets = family.sets();
    if (laminar(sets, family.universe().size()))
        return DirectedFamily(family);
    return *first_crossing(sets);
}

DirectedFamily require_directed(const SetFamily& family) {
    auto r = check_directed(family);
    if (auto* v = std::get_if<CrossingPair>(&r)) {
        std::ostringstream os;
        os << "family is not directed: sets " << v->first << " and " << v->second << " cross";
        throw DomainError(os.str());
    }
    return std::get<DirectedFamily>(std::move(r));
}

// ---------------------------------------------------------------------------

QuasiForest QuasiForest::from_extents(std::vector<NodeLabel> labels, std::vector<BitSet> extents,
                                      std::size_t carrier_size) {
    if (labels.size() != extents.size())
        throw DomainError("from_extents: label and extent counts differ");
    for (const auto& e : extents)
        if (e.size() != carrier_size)
            throw DomainError("from_extents: extent not sized to the carrier");
    const auto n = labels.size();
    QuasiForest f;
    f.down_.assign(n, BitSet(n));
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t s = 0; s < n; ++s)
            if (extents[t].is_subset_of(extents[s]))
                f.down_[t].set(s);
    f.labels_ = std::move(labels);
    f.extents_ = std::move(extents);
    f.carrier_size_ = carrier_size;
    f.validate();
    f.build_quotient();
    return f;
}

QuasiForest QuasiForest::from_relation(std::vector<NodeLabel> labels, std::vector<BitSet> down) {
    if (labels.size() != down.size())
        throw DomainError("from_relation: label and down-set counts differ");
    for (const auto& d : down)
        if (d.size() != labels.size())
            throw DomainError("from_relation: down-set not sized to the node count");
    QuasiForest f;
    f.labels_ = std::move(labels);
    f.down_ = std::move(down);
    f.validate();
    f.build_quotient();
    return f;
}

void QuasiForest::validate() const {
    const auto n = labels_.size();
    for (std::size_t t = 0; t < n; ++t) {
        if (!down_[t].test(t))
            throw ValidationError("quasi-forest axiom violated: reflexivity fails at node " + std::to_string(t));
        for (auto s = down_[t].first(); s < n; s = down_[t].next(s + 1)) {
            if (!down_[s].is_subset_of(down_[t])) {
                std::ostringstream os;
                os << "quasi-forest axiom violated: transitivity fails (" << s << " ⊴ " << t << ")";
                throw ValidationError(os.str());
            }
        }
        // A chain of down-sets is nested once sorted by size.
        auto preds = down_[t].members();
        std::stable_sort(preds.begin(), preds.end(),
                         [&](auto a, auto b) { return down_[a].count() < down_[b].count(); });
        for (std::size_t i = 0; i + 1 < preds.size(); ++i) {
            const auto a = preds[i], b = preds[i + 1];
            if (!down_[b].test(a)) {
                std::ostringstream os;
                os << "quasi-forest axiom violated: predecessors of node " << t << " are not a chain (" << a
                   << ", " << b << " incomparable)";
                throw ValidationError(os.str());
            }
        }
    }
}

void QuasiForest::build_quotient() {
    const auto n = labels_.size();
    class_of_.assign(n, npos);
    classes_.clear();
    for (std::size_t t = 0; t < n; ++t) {
        if (class_of_[t] != npos)
            continue;
        const auto c = classes_.size();
        classes_.emplace_back();
        for (std::size_t s = t; s < n; ++s)
            if (class_of_[s] == npos && down_[t].test(s) && down_[s].test(t)) {
                class_of_[s] = c;
                classes_[c].push_back(s);
            }
    }
    // Strict predecessors of a class form a chain; the parent is the one
    // with the largest down-set.
    class_parent_.assign(classes_.size(), npos);
    for (std::size_t c = 0; c < classes_.size(); ++c) {
        const auto rep = classes_[c].front();
        std::size_t best = npos, best_size = 0;
        for (std::size_t d = 0; d < classes_.size(); ++d) {
            if (d == c)
                continue;
            const auto other = classes_[d].front();
            if (down_[rep].test(other)) {
                const auto sz = down_[other].count();
                if (best == npos || sz > best_size) {
                    best = d;
                    best_size = sz;
                }
            }
        }
        class_parent_[c] = best;
    }
}

std::vector<BitSet> instance_extents(std::span<const Tuple> params, std::span<const ParametrizedFormula> delta,
                                     std::size_t carrier_size) {
    for (const auto& d : delta)
        if (d.object_arity != 1)
            throw DomainError("instance_extents: formula '" + d.name + "' must have object arity 1");
    std::vector<BitSet> extents;
    extents.reserve(params.size() * delta.size());
    for (const auto& c : params)
        for (const auto& d : delta) {
            BitSet e(carrier_size);
            for (Element x = 0; x < carrier_size; ++x)
                if (d.eval(std::span<const Element>(&x, 1), c))
                    e.set(x);
            extents.push_back(std::move(e));
        }
    return extents;
}

QuasiForest build_forest(std::span<const Tuple> params, std::span<const ParametrizedFormula> delta,
                         std::size_t carrier_size) {
    auto extents = instance_extents(params, delta, carrier_size);
    if (!extents.empty())
        require_directed(SetFamily(Universe(carrier_size, std::max(carrier_size, Universe::kDefaultCap)), extents));
    std::vector<NodeLabel> labels;
    labels.reserve(extents.size());
    for (std::size_t j = 0; j < params.size(); ++j)
        for (std::size_t i = 0; i < delta.size(); ++i)
            labels.push_back({j, i});
    return QuasiForest::from_extents(std::move(labels), std::move(extents), carrier_size);
}

std::size_t QuasiTree::class_count() const {
    return forest.class_count() + (root_equivalent.empty() ? 1 : 0);
}

QuasiTree add_root(const QuasiForest& forest) {
    QuasiTree tree{forest, {}};
    if (forest.has_extents() && forest.carrier_size() > 0) {
        for (std::size_t t = 0; t < forest.size(); ++t)
            if (forest.extents()[t].count() == forest.carrier_size())
                tree.root_equivalent.push_back(t);
    }
    return tree;
}

// ---------------------------------------------------------------------------

TypeTree::TypeTree(const QuasiForest& forest) : forest_size_(forest.size()) {
    const auto k = forest.class_count();
    members_.assign(k + 1, BitSet(forest_size_));
    parent_.assign(k + 1, npos);
    children_.assign(k + 1, {});
    depth_.assign(k + 1, 0);
    for (std::size_t c = 0; c < k; ++c) {
        members_[c + 1] = forest.down(forest.class_members(c).front());
        const auto p = forest.class_parent(c);
        parent_[c + 1] = p == npos ? 0 : p + 1;
    }
    for (std::size_t v = 1; v <= k; ++v)
        children_[parent_[v]].push_back(v);
    // Parents precede children once sorted by down-set size.
    std::vector<std::size_t> order(k + 1);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](auto a, auto b) { return members_[a].count() < members_[b].count(); });
    for (auto v : order)
        if (v != 0)
            depth_[v] = depth_[parent_[v]] + 1;
}

std::size_t TypeTree::ancestor_at(std::size_t node, std::size_t d) const {
    while (depth_[node] > d)
        node = parent_[node];
    return node;
}

std::size_t TypeTree::meet(std::size_t p, std::size_t q) const {
    const auto d = std::min(depth_[p], depth_[q]);
    p = ancestor_at(p, d);
    q = ancestor_at(q, d);
    while (p != q) {
        p = parent_[p];
        q = parent_[q];
    }
    return p;
}

bool TypeTree::includes(std::size_t p, std::size_t q) const {
    return depth_[p] <= depth_[q] && ancestor_at(q, depth_[p]) == p;
}

std::optional<std::size_t> TypeTree::find(const BitSet& down_set) const {
    for (std::size_t i = 0; i < members_.size(); ++i)
        if (members_[i] == down_set)
            return i;
    return std::nullopt;
}

BitSet diff(const TypeNode& p, const TypeNode& q) {
    if (p.tree == nullptr || p.tree != q.tree)
        throw DomainError("diff: nodes belong to different type trees");
    return p.tree->members(p.index) ^ q.tree->members(q.index);
}

std::size_t dist(const TypeNode& p, const TypeNode& q) { return diff(p, q).count(); }

SiblingOrders default_sibling_orders(const TypeTree& tree) {
    SiblingOrders s(tree.size());
    for (std::size_t v = 0; v < tree.size(); ++v) {
        s[v] = tree.children(v);
        std::sort(s[v].begin(), s[v].end());
    }
    return s;
}

ConvexOrder convex_order(const TypeTree& tree, const SiblingOrders& sibling_orders) {
    if (sibling_orders.size() != tree.size())
        throw DomainError("convex_order: need one sibling order per type-tree node");
    std::vector<std::size_t> sib_rank(tree.size(), npos);
    for (std::size_t v = 0; v < tree.size(); ++v) {
        auto expect = tree.children(v);
        auto given = sibling_orders[v];
        std::sort(expect.begin(), expect.end());
        std::sort(given.begin(), given.end());
        if (expect != given || std::adjacent_find(given.begin(), given.end()) != given.end())
            throw DomainError("convex_order: sibling order at node " + std::to_string(v) +
                              " is not a total order of its children");
        for (std::size_t r = 0; r < sibling_orders[v].size(); ++r)
            sib_rank[sibling_orders[v][r]] = r;
    }

    auto less = [&](std::size_t p, std::size_t q) {
        if (p == q)
            return false;
        if (tree.includes(p, q))
            return true;
        if (tree.includes(q, p))
            return false;
        const auto m = tree.meet(p, q);
        const auto ps = tree.ancestor_at(p, tree.depth(m) + 1);
        const auto qs = tree.ancestor_at(q, tree.depth(m) + 1);
        return sib_rank[ps] < sib_rank[qs];
    };

    ConvexOrder order;
    order.sequence_.resize(tree.size());
    std::iota(order.sequence_.begin(), order.sequence_.end(), std::size_t{0});
    std::sort(order.sequence_.begin(), order.sequence_.end(), less);
    order.rank_.assign(tree.size(), 0);
    for (std::size_t r = 0; r < order.sequence_.size(); ++r)
        order.rank_[order.sequence_[r]] = r;
    order.siblings_ = sibling_orders;
    return order;
}

ConvexOrder convex_order(const TypeTree& tree) { return convex_order(tree, default_sibling_orders(tree)); }

bool check_convexity(const TypeTree& tree, std::span<const std::size_t> sequence) {
    if (sequence.size() != tree.size())
        throw DomainError("check_convexity: sequence must list every type-tree node once");
    const auto n = tree.forest_size();
    std::vector<std::size_t> lo(n, npos), hi(n, 0), cnt(n, 0);
    for (std::size_t pos = 0; pos < sequence.size(); ++pos) {
        const auto& m = tree.members(sequence[pos]);
        for (auto t = m.first(); t < n; t = m.next(t + 1)) {
            lo[t] = std::min(lo[t], pos);
            hi[t] = std::max(hi[t], pos);
            ++cnt[t];
        }
    }
    for (std::size_t t = 0; t < n; ++t)
        if (cnt[t] && hi[t] - lo[t] + 1 != cnt[t])
            return false;
    return true;
}

bool check_convexity(const TypeTree& tree, const ConvexOrder& order) {
    return check_convexity(tree, std::span<const std::size_t>(order.sequence()));
}

SumDistReport sum_dist_check(const TypeTree& tree, const ConvexOrder& order, std::span<const std::size_t> sequence,
                             std::optional<std::pair<std::size_t, std::size_t>> param_and_ball_counts) {
    for (std::size_t i = 0; i + 1 < sequence.size(); ++i)
        if (!order.less(sequence[i], sequence[i + 1]))
            throw DomainError("sum_dist_check: sequence is not strictly increasing at position " +
                              std::to_string(i));
    SumDistReport r;
    for (std::size_t i = 0; i + 1 < sequence.size(); ++i)
        r.sum += dist(tree.node(sequence[i]), tree.node(sequence[i + 1]));
    r.bound = 2 * tree.forest_size();
    r.ok = r.sum <= r.bound;
    if (param_and_ball_counts) {
        r.product_bound = 2 * param_and_ball_counts->first * param_and_ball_counts->second;
        r.ok = r.ok && r.sum <= *r.product_bound;
    }
    return r;
}

// ---------------------------------------------------------------------------

bool VirtualTypeSpace::contains(const BitSet& v) const {
    return std::find(entries.begin(), entries.end(), v) != entries.end();
}

VirtualTypeSpace virtual_type_space(const QuasiForest& forest) {
    VirtualTypeSpace v;
    v.entries.emplace_back(forest.size());
    for (std::size_t c = 0; c < forest.class_count(); ++c)
        v.entries.push_back(forest.down(forest.class_members(c).front()));
    std::size_t params = 0, balls = 0;
    for (const auto& l : forest.labels()) {
        params = std::max(params, l.param + 1);
        balls = std::max(balls, l.ball + 1);
    }
    v.bound = params * balls + 1;
    return v;
}

VirtualTypeSpace virtual_type_space(std::span<const Tuple> params, std::span<const ParametrizedFormula> delta,
                                    std::size_t carrier_size) {
    auto v = virtual_type_space(build_forest(params, delta, carrier_size));
    v.bound = params.size() * delta.size() + 1;
    return v;
}

LinearBoundReport linear_bound_check(std::span<const Tuple> params, std::span<const ParametrizedFormula> delta,
                                     std::size_t carrier_size) {
    const auto realized = type_space(delta, params, carrier_size, 1);
    const auto virt = virtual_type_space(params, delta, carrier_size);
    LinearBoundReport r;
    r.realized = realized.count();
    r.bound = delta.size() * params.size() + 1;
    r.within_bound = r.realized <= r.bound;
    std::unordered_set<BitSet, BitSetHash> entries(virt.entries.begin(), virt.entries.end());
    r.contained = std::all_of(realized.vectors.begin(), realized.vectors.end(),
                              [&](const BitSet& v) { return entries.count(v) > 0; });
    return r;
}

// ---------------------------------------------------------------------------

ComponentsResult components(const BitSet& target, std::span<const BitSet> pool) {
    const auto n = target.size();
    for (const auto& b : pool)
        if (b.size() != n)
            throw DomainError("components: pool ball not sized to the target's universe");
    if (!pool.empty() && !laminar(pool, n))
        throw DomainError("components: pool is not directed");

    // Nonempty pool balls inside the target, deduplicated to lowest index.
    std::vector<std::size_t> inside;
    std::unordered_map<BitSet, std::size_t, BitSetHash> first_index;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (pool[i].none() || !pool[i].is_subset_of(target))
            continue;
        if (first_index.emplace(pool[i], i).second)
            inside.push_back(i);
    }
    std::vector<std::size_t> maximal;
    for (auto i : inside) {
        bool covered = false;
        for (auto j : inside)
            if (i != j && pool[i].is_subset_of(pool[j])) {
                covered = true;
                break;
            }
        if (!covered)
            maximal.push_back(i);
    }

    BitSet uni(n);
    for (auto i : maximal)
        uni |= pool[i];
    BitSet missing = target;
    missing.subtract(uni);
    if (missing.any())
        return Uncovered{missing.first()};

    std::sort(maximal.begin(), maximal.end(), [&](auto a, auto b) {
        const auto ma = pool[a].first(), mb = pool[b].first();
        if (ma != mb)
            return ma < mb;
        return pool[a].count() < pool[b].count();
    });
    Decomposition d;
    for (auto i : maximal) {
        d.balls.push_back(pool[i]);
        d.pool_indices.push_back(i);
    }
    return d;
}

} // namespace laminar
