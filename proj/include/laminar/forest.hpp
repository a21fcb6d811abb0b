#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "laminar/bitset.hpp"
#include "laminar/setsystem.hpp"

namespace laminar {

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

// ---------------------------------------------------------------------------
// Directedness

/// Indices i < j of two member sets that overlap without being nested.
struct CrossingPair {
    std::size_t first = 0;
    std::size_t second = 0;
    friend bool operator==(const CrossingPair&, const CrossingPair&) = default;
};

/// A SetFamily known to be laminar: any two members are nested or disjoint.
/// Only check_directed can produce one.
class DirectedFamily {
  public:
    const SetFamily& base() const noexcept { return base_; }
    std::size_t size() const noexcept { return base_.size(); }
    const BitSet& operator[](std::size_t i) const { return base_[i]; }

  private:
    explicit DirectedFamily(SetFamily base) : base_(std::move(base)) {}
    friend std::variant<DirectedFamily, CrossingPair> check_directed(const SetFamily&);
    SetFamily base_;
};

using DirectedCheck = std::variant<DirectedFamily, CrossingPair>;

/// Validates laminarity. On failure returns the lexicographically first
/// crossing pair.
DirectedCheck check_directed(const SetFamily& family);

/// check_directed, throwing DomainError with the crossing pair on failure.
DirectedFamily require_directed(const SetFamily& family);

// ---------------------------------------------------------------------------
// Quasi-forests

/// Raw node label ⟨c, δ⟩: index into the parameter list and the formula list.
struct NodeLabel {
    std::size_t param = 0;
    std::size_t ball = 0;
    friend bool operator==(const NodeLabel&, const NodeLabel&) = default;
};

/// Finite quasi-forest (F, ⊴). Stores for each raw node t its down-set
/// ν(t) = {s : s ⊴ t}, plus the quotient by mutual ⊴.
///
/// Construction validates reflexivity, transitivity and that every down-set
/// is a chain; a failure throws ValidationError naming the axiom.
class QuasiForest {
  public:
    QuasiForest() = default;

    /// s ⊴ t iff extents[t] ⊆ extents[s].
    static QuasiForest from_extents(std::vector<NodeLabel> labels, std::vector<BitSet> extents,
                                    std::size_t carrier_size);

    /// down[t] is the set {s : s ⊴ t}.
    static QuasiForest from_relation(std::vector<NodeLabel> labels, std::vector<BitSet> down);

    std::size_t size() const noexcept { return labels_.size(); }
    const std::vector<NodeLabel>& labels() const noexcept { return labels_; }
    const BitSet& down(std::size_t t) const { return down_[t]; }
    const std::vector<BitSet>& down_sets() const noexcept { return down_; }
    bool leq(std::size_t s, std::size_t t) const { return down_[t].test(s); }

    bool has_extents() const noexcept { return !extents_.empty() || labels_.empty(); }
    const std::vector<BitSet>& extents() const noexcept { return extents_; }
    std::size_t carrier_size() const noexcept { return carrier_size_; }

    /// Quotient classes, ordered by their smallest raw member.
    std::size_t class_count() const noexcept { return classes_.size(); }
    std::size_t class_of(std::size_t t) const { return class_of_[t]; }
    const std::vector<std::size_t>& class_members(std::size_t c) const { return classes_[c]; }
    /// Immediate ⊴-predecessor class, or npos for a top-level class.
    std::size_t class_parent(std::size_t c) const { return class_parent_[c]; }

    /// Same labels and same relation.
    friend bool operator==(const QuasiForest& a, const QuasiForest& b) {
        return a.labels_ == b.labels_ && a.down_ == b.down_;
    }

  private:
    void validate() const;
    void build_quotient();

    std::vector<NodeLabel> labels_;
    std::vector<BitSet> down_;
    std::vector<BitSet> extents_;
    std::size_t carrier_size_ = 0;
    std::vector<std::size_t> class_of_;
    std::vector<std::vector<std::size_t>> classes_;
    std::vector<std::size_t> class_parent_;
};

/// Extents of every instance δ(U; c) for c in params and δ in delta, in
/// raw-node order (param-major): node j·|Δ| + i is ⟨params[j], delta[i]⟩.
std::vector<BitSet> instance_extents(std::span<const Tuple> params, std::span<const ParametrizedFormula> delta,
                                     std::size_t carrier_size);

/// F(C, Δ). Throws DomainError when the instances are not directed.
QuasiForest build_forest(std::span<const Tuple> params, std::span<const ParametrizedFormula> delta,
                         std::size_t carrier_size);

/// Forest extended by the root 0, which sits below every node.
struct QuasiTree {
    QuasiForest forest;
    /// Raw nodes t with t ⊴ 0, i.e. whose extent is the whole carrier.
    std::vector<std::size_t> root_equivalent;

    std::size_t size() const noexcept { return forest.size() + 1; }
    /// Classes after adding the root: forest classes, minus those merged into it, plus one.
    std::size_t class_count() const;
};

QuasiTree add_root(const QuasiForest& forest);

// ---------------------------------------------------------------------------
// Tree of types

class TypeTree;

/// Handle to a TypeTree node. Does not own the tree.
struct TypeNode {
    const TypeTree* tree = nullptr;
    std::size_t index = 0;
};

/// V(F, ⊴): the down-sets ν(t) plus ∅, ordered by inclusion. Node 0 is ∅;
/// node c+1 is ν of quotient class c.
class TypeTree {
  public:
    explicit TypeTree(const QuasiForest& forest);

    std::size_t size() const noexcept { return members_.size(); }
    std::size_t forest_size() const noexcept { return forest_size_; }

    const BitSet& members(std::size_t node) const { return members_[node]; }
    std::size_t parent(std::size_t node) const { return parent_[node]; }
    const std::vector<std::size_t>& children(std::size_t node) const { return children_[node]; }
    std::size_t depth(std::size_t node) const { return depth_[node]; }

    /// Ancestor of `node` at depth `d` (d ≤ depth(node)).
    std::size_t ancestor_at(std::size_t node, std::size_t d) const;
    /// Tree-theoretic meet; equals set intersection of the down-sets.
    std::size_t meet(std::size_t p, std::size_t q) const;
    /// members(p) ⊆ members(q)
    bool includes(std::size_t p, std::size_t q) const;

    std::optional<std::size_t> find(const BitSet& down_set) const;
    TypeNode node(std::size_t i) const { return {this, i}; }

  private:
    std::size_t forest_size_ = 0;
    std::vector<BitSet> members_;
    std::vector<std::size_t> parent_;
    std::vector<std::vector<std::size_t>> children_;
    std::vector<std::size_t> depth_;
};

/// p △ q over raw forest nodes. Throws DomainError for nodes of different trees.
BitSet diff(const TypeNode& p, const TypeNode& q);
std::size_t dist(const TypeNode& p, const TypeNode& q);

/// For each tree node, its children listed in ≤* order.
using SiblingOrders = std::vector<std::vector<std::size_t>>;

/// Children of each node sorted by node id.
SiblingOrders default_sibling_orders(const TypeTree& tree);

/// Total order on a TypeTree extending inclusion. Incomparable p, q are
/// ordered by their branches p*, q* below p ∩ q under the sibling order there.
class ConvexOrder {
  public:
    const std::vector<std::size_t>& sequence() const noexcept { return sequence_; }
    std::size_t rank(std::size_t node) const { return rank_[node]; }
    bool less(std::size_t p, std::size_t q) const { return rank_[p] < rank_[q]; }
    const SiblingOrders& sibling_orders() const noexcept { return siblings_; }

  private:
    friend ConvexOrder convex_order(const TypeTree&, const SiblingOrders&);
    std::vector<std::size_t> sequence_;
    std::vector<std::size_t> rank_;
    SiblingOrders siblings_;
};

/// Throws DomainError if some sibling list is not a permutation of the children.
ConvexOrder convex_order(const TypeTree& tree, const SiblingOrders& sibling_orders);
ConvexOrder convex_order(const TypeTree& tree);

/// Every χ(t) = {p : t ∈ p} is an interval of `sequence`, which must list
/// every tree node once.
bool check_convexity(const TypeTree& tree, std::span<const std::size_t> sequence);
bool check_convexity(const TypeTree& tree, const ConvexOrder& order);

struct SumDistReport {
    std::size_t sum = 0;
    std::size_t bound = 0;  // 2|F|
    /// 2|C||Δ| when the forest is F(C, Δ).
    std::optional<std::size_t> product_bound;
    bool ok = false;
};

/// Σ dist(p_i, p_{i+1}) over a strictly ≤-increasing sequence of tree nodes.
SumDistReport sum_dist_check(const TypeTree& tree, const ConvexOrder& order, std::span<const std::size_t> sequence,
                             std::optional<std::pair<std::size_t, std::size_t>> param_and_ball_counts = std::nullopt);

// ---------------------------------------------------------------------------
// Virtual type spaces

/// V_Δ(C): ν_0 (all zeros) followed by one sign vector per quotient class.
/// Sign vectors are over raw nodes, in the same layout as type_space.
struct VirtualTypeSpace {
    std::vector<BitSet> entries;
    std::size_t bound = 0;  // |Δ||C| + 1

    bool contains(const BitSet& v) const;
};

VirtualTypeSpace virtual_type_space(const QuasiForest& forest);
VirtualTypeSpace virtual_type_space(std::span<const Tuple> params, std::span<const ParametrizedFormula> delta,
                                    std::size_t carrier_size);

struct LinearBoundReport {
    std::size_t realized = 0;
    std::size_t bound = 0;
    bool within_bound = false;
    /// Every realized type is an entry of the virtual space.
    bool contained = false;
    bool ok() const noexcept { return within_bound && contained; }
};

/// Realized |S_Δ(C)| ≤ |Δ||C| + 1, and S_Δ(C) ⊆ V_Δ(C).
LinearBoundReport linear_bound_check(std::span<const Tuple> params, std::span<const ParametrizedFormula> delta,
                                     std::size_t carrier_size);

// ---------------------------------------------------------------------------
// Components

struct Decomposition {
    /// Maximal pool balls inside the target, sorted by (min element, size).
    std::vector<BitSet> balls;
    /// Lowest pool index realizing each ball.
    std::vector<std::size_t> pool_indices;
};

struct Uncovered {
    std::size_t point = 0;
};

using ComponentsResult = std::variant<Decomposition, Uncovered>;

/// Minimal-length representation of `target` as a union of pool balls.
/// The pool must be directed; throws DomainError otherwise.
ComponentsResult components(const BitSet& target, std::span<const BitSet> pool);

} // namespace laminar
