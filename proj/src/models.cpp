#include "laminar/models.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "laminar/errors.hpp"
#include "laminar/rng.hpp"

namespace laminar {

UltrametricModel::UltrametricModel(std::vector<std::int64_t> parent) : parent_(std::move(parent)) {
    const auto n = parent_.size();
    if (n == 0)
        throw DomainError("ultrametric model: empty parent array");
    std::size_t roots = 0;
    for (std::size_t v = 0; v < n; ++v) {
        const auto p = parent_[v];
        if (p == -1) {
            root_ = v;
            ++roots;
        } else if (p < 0 || static_cast<std::size_t>(p) >= n) {
            throw DomainError("ultrametric model: parent index " + std::to_string(p) + " of node " +
                              std::to_string(v) + " out of range");
        } else if (static_cast<std::size_t>(p) == v) {
            throw DomainError("ultrametric model: node " + std::to_string(v) + " is its own parent");
        }
    }
    if (roots != 1)
        throw DomainError("ultrametric model: expected exactly one root, found " + std::to_string(roots));

    children_.assign(n, {});
    for (std::size_t v = 0; v < n; ++v)
        if (parent_[v] >= 0)
            children_[static_cast<std::size_t>(parent_[v])].push_back(v);

    // Walk from the root; a node never reached sits on a cycle.
    depth_.assign(n, npos);
    std::vector<std::size_t> stack{root_};
    depth_[root_] = 0;
    std::vector<std::size_t> preorder;
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        preorder.push_back(v);
        for (auto c : children_[v]) {
            depth_[c] = depth_[v] + 1;
            stack.push_back(c);
        }
    }
    if (preorder.size() != n) {
        std::size_t bad = 0;
        while (depth_[bad] != npos)
            ++bad;
        throw DomainError("ultrametric model: parent array has a cycle through node " + std::to_string(bad));
    }

    for (std::size_t v = 0; v < n; ++v)
        if (children_[v].empty())
            leaf_node_.push_back(v);
    if (leaf_node_.size() < 2)
        throw DomainError("ultrametric model: need at least 2 leaves, found " + std::to_string(leaf_node_.size()));

    const auto leaves = leaf_node_.size();
    balls_.assign(n, BitSet(leaves));
    for (std::size_t x = 0; x < leaves; ++x) {
        std::size_t v = leaf_node_[x];
        while (true) {
            balls_[v].set(x);
            if (parent_[v] < 0)
                break;
            v = static_cast<std::size_t>(parent_[v]);
        }
    }
}

std::size_t UltrametricModel::ancestor(Element x, std::size_t k) const {
    auto v = leaf_node_[x];
    for (std::size_t i = 0; i < k && parent_[v] >= 0; ++i)
        v = static_cast<std::size_t>(parent_[v]);
    return v;
}

std::size_t UltrametricModel::lca(Element a, Element b) const {
    auto u = leaf_node_[a], v = leaf_node_[b];
    while (depth_[u] > depth_[v])
        u = static_cast<std::size_t>(parent_[u]);
    while (depth_[v] > depth_[u])
        v = static_cast<std::size_t>(parent_[v]);
    while (u != v) {
        u = static_cast<std::size_t>(parent_[u]);
        v = static_cast<std::size_t>(parent_[v]);
    }
    return u;
}

UltrametricModel random_ultrametric(std::size_t leaf_count, std::size_t max_branching, std::uint64_t seed) {
    if (leaf_count < 2)
        throw DomainError("random_ultrametric: leaf_count must be at least 2");
    if (max_branching < 2)
        throw DomainError("random_ultrametric: max_branching must be at least 2");
    if (leaf_count > Universe::kDefaultCap)
        throw DomainError("random_ultrametric: leaf_count exceeds the universe cap");

    Rng rng(seed);
    std::vector<std::int64_t> parent;
    // (node id, leaves still to place below it); processed depth-first so ids
    // come out in preorder.
    struct Pending {
        std::int64_t parent;
        std::size_t leaves;
    };
    std::vector<Pending> stack{{-1, leaf_count}};
    while (!stack.empty()) {
        const auto [p, leaves] = stack.back();
        stack.pop_back();
        const auto id = static_cast<std::int64_t>(parent.size());
        parent.push_back(p);
        if (leaves == 1)
            continue;
        const auto branches = static_cast<std::size_t>(rng.between(2, static_cast<std::int64_t>(std::min(max_branching, leaves))));
        auto cuts = rng.sample_distinct(branches - 1, leaves - 1);
        std::vector<std::size_t> parts;
        std::size_t prev = 0;
        for (auto c : cuts) {
            parts.push_back(static_cast<std::size_t>(c + 1) - prev);
            prev = static_cast<std::size_t>(c + 1);
        }
        parts.push_back(leaves - prev);
        for (auto it = parts.rbegin(); it != parts.rend(); ++it)
            stack.push_back({id, *it});
    }
    return UltrametricModel(std::move(parent));
}

DirectedFamily ball_family(const UltrametricModel& model) {
    std::vector<BitSet> sets;
    sets.reserve(model.node_count());
    for (std::size_t v = 0; v < model.node_count(); ++v)
        sets.push_back(model.ball(v));
    return require_directed(SetFamily(Universe(model.leaf_count()), std::move(sets)));
}

DirectedFamily order_family(const OrderModel& model, bool include_empty) {
    const Universe u(model.size);
    std::vector<BitSet> sets;
    for (std::size_t c = include_empty ? 0 : 1; c < model.size; ++c) {
        BitSet s(model.size);
        for (std::size_t x = 0; x < c; ++x)
            s.set(x);
        sets.push_back(std::move(s));
    }
    return require_directed(SetFamily(u, std::move(sets)));
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::size_t> maximal_balls(const UltrametricModel& m, std::vector<std::size_t> nodes) {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    std::vector<std::size_t> out;
    for (auto v : nodes) {
        const bool inside = std::any_of(nodes.begin(), nodes.end(), [&](auto w) {
            return w != v && m.ball(v).is_subset_of(m.ball(w));
        });
        if (!inside)
            out.push_back(v);
    }
    return out;
}

ParametrizedFormula leaf_pair_formula(std::string name, const std::shared_ptr<const UltrametricModel>& model,
                                      std::function<bool(const UltrametricModel&, Element, Element, Element)> pred) {
    ParametrizedFormula f;
    f.name = std::move(name);
    f.object_arity = 1;
    f.param_arity = 2;
    f.param_domain = model->leaf_count();
    f.eval = [model, pred = std::move(pred)](std::span<const Element> x, std::span<const Element> y) {
        return pred(*model, x[0], y[0], y[1]);
    };
    return f;
}

UBallFormula twin_ball(const std::shared_ptr<const UltrametricModel>& model, std::size_t k) {
    // Level-k ancestors of every leaf, looked up once.
    auto anc = std::make_shared<std::vector<std::size_t>>(model->leaf_count());
    for (Element x = 0; x < model->leaf_count(); ++x)
        (*anc)[x] = model->ancestor(x, k);
    UBallFormula u;
    u.formula = leaf_pair_formula("twin-ball-" + std::to_string(k), model,
                                  [anc](const UltrametricModel& m, Element x, Element y0, Element y1) {
                                      return m.contains((*anc)[y0], x) || m.contains((*anc)[y1], x);
                                  });
    u.certified = u.formula;
    u.max_components = 2;
    u.certificate = [model, anc](std::span<const Element> y) {
        return maximal_balls(*model, {(*anc)[y[0]], (*anc)[y[1]]});
    };
    return u;
}

UBallFormula lca_ball(const std::shared_ptr<const UltrametricModel>& model) {
    const auto leaves = model->leaf_count();
    std::shared_ptr<std::vector<std::uint32_t>> table;
    if (leaves <= 1024) {
        table = std::make_shared<std::vector<std::uint32_t>>(leaves * leaves);
        for (Element a = 0; a < leaves; ++a)
            for (Element b = a; b < leaves; ++b)
                (*table)[a * leaves + b] = (*table)[b * leaves + a] = static_cast<std::uint32_t>(model->lca(a, b));
    }
    auto lookup = [table, leaves](const UltrametricModel& m, Element a, Element b) -> std::size_t {
        return table ? (*table)[a * leaves + b] : m.lca(a, b);
    };
    UBallFormula u;
    u.formula = leaf_pair_formula("lca-ball", model, [lookup](const UltrametricModel& m, Element x, Element y0, Element y1) {
        return m.contains(lookup(m, y0, y1), x);
    });
    u.certified = u.formula;
    u.max_components = 1;
    u.certificate = [model, lookup](std::span<const Element> y) {
        return std::vector<std::size_t>{lookup(*model, y[0], y[1])};
    };
    return u;
}

UBallFormula boolean_mix(const std::shared_ptr<const UltrametricModel>& model, std::size_t k, std::size_t j) {
    UBallFormula u;
    u.formula = leaf_pair_formula("boolean-mix", model, [k, j](const UltrametricModel& m, Element x, Element y0, Element y1) {
        return m.contains(m.ancestor(y0, k), x) && !m.contains(m.ancestor(y1, j), x);
    });
    u.certified = leaf_pair_formula("boolean-mix+", model, [k](const UltrametricModel& m, Element x, Element y0, Element) {
        return m.contains(m.ancestor(y0, k), x);
    });
    u.max_components = 1;
    u.certificate = [model, k](std::span<const Element> y) { return std::vector<std::size_t>{model->ancestor(y[0], k)}; };
    return u;
}

} // namespace

std::vector<UBallFormula> builtin_formulas(std::shared_ptr<const UltrametricModel> model, std::string_view kind) {
    if (!model)
        throw DomainError("builtin_formulas: null model");
    if (kind == "lca-ball")
        return {lca_ball(model)};
    if (kind == "twin-ball-k")
        return {twin_ball(model, 0), twin_ball(model, 1), twin_ball(model, 2)};
    if (kind == "boolean-mix")
        return {boolean_mix(model, 2, 1)};
    constexpr std::string_view twin = "twin-ball-";
    if (kind.starts_with(twin) && kind.size() > twin.size()) {
        const auto digits = kind.substr(twin.size());
        if (std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }) && digits.size() < 4)
            return {twin_ball(model, static_cast<std::size_t>(std::stoul(std::string(digits))))};
    }
    throw DomainError("builtin_formulas: unknown kind '" + std::string(kind) + "'");
}

ParametrizedFormula level_ball_formula(std::shared_ptr<const UltrametricModel> model, std::size_t k) {
    ParametrizedFormula f;
    f.name = "level-ball-" + std::to_string(k);
    f.object_arity = 1;
    f.param_arity = 1;
    f.param_domain = model->leaf_count();
    f.eval = [model, k](std::span<const Element> x, std::span<const Element> y) {
        return model->contains(model->ancestor(y[0], k), x[0]);
    };
    return f;
}

ParametrizedFormula single_ball_formula(std::shared_ptr<const UltrametricModel> model) {
    ParametrizedFormula f;
    f.name = "single-ball";
    f.object_arity = 1;
    f.param_arity = 1;
    f.param_domain = model->node_count();
    f.eval = [model](std::span<const Element> x, std::span<const Element> y) { return model->contains(y[0], x[0]); };
    return f;
}

ParametrizedFormula equality_witness_formula(std::size_t carrier_size) {
    ParametrizedFormula f;
    f.name = "eq-witness";
    f.object_arity = 2;
    f.param_arity = 1;
    f.param_domain = carrier_size;
    f.eval = [](std::span<const Element> x, std::span<const Element> y) { return x[0] == y[0] || x[1] == y[0]; };
    return f;
}

ParametrizedFormula swap_roles(const ParametrizedFormula& formula, std::size_t carrier_size) {
    if (formula.object_arity != 1)
        throw DomainError("swap_roles: formula '" + formula.name + "' must have object arity 1");
    if (formula.param_domain != carrier_size)
        throw DomainError("swap_roles: parameters of '" + formula.name + "' do not range over the carrier");
    ParametrizedFormula f;
    f.name = formula.name;
    f.object_arity = formula.param_arity;
    f.param_arity = 1;
    f.param_domain = carrier_size;
    f.eval = [inner = formula.eval](std::span<const Element> x, std::span<const Element> y) { return inner(y, x); };
    return f;
}

// ---------------------------------------------------------------------------

namespace {

using nlohmann::ordered_json;

std::size_t line_of(std::string_view text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

std::size_t line_of_key(std::string_view text, std::string_view key) {
    const auto pos = text.find("\"" + std::string(key) + "\"");
    return pos == std::string_view::npos ? 1 : line_of(text, pos);
}

[[noreturn]] void fail(std::string_view text, std::string_view key, const std::string& what) {
    throw ParseError("line " + std::to_string(line_of_key(text, key)) + ": " + what);
}

} // namespace

ModelFile parse_model(std::string_view text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("line " + std::to_string(line_of(text, e.byte == 0 ? 0 : e.byte - 1)) + ": malformed JSON: " +
                         e.what());
    }
    if (!doc.is_object())
        throw ParseError("line 1: model file must be a JSON object");
    if (!doc.contains("kind") || !doc["kind"].is_string())
        fail(text, "kind", "missing string field \"kind\"");

    ModelFile out;
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_integer())
            fail(text, "seed", "\"seed\" must be an integer");
        out.seed = doc["seed"].get<std::uint64_t>();
    }

    const auto kind = doc["kind"].get<std::string>();
    try {
        if (kind == "ultrametric") {
            if (!doc.contains("parent") || !doc["parent"].is_array())
                fail(text, "parent", "ultrametric model needs an integer array \"parent\"");
            std::vector<std::int64_t> parent;
            for (const auto& v : doc["parent"]) {
                if (!v.is_number_integer())
                    fail(text, "parent", "\"parent\" entries must be integers");
                parent.push_back(v.get<std::int64_t>());
            }
            out.model = UltrametricModel(std::move(parent));
        } else if (kind == "order") {
            if (!doc.contains("size") || !doc["size"].is_number_integer() || doc["size"].get<std::int64_t>() < 1)
                fail(text, "size", "order model needs a positive integer \"size\"");
            const auto size = doc["size"].get<std::size_t>();
            Universe{size};
            out.model = OrderModel{size};
        } else if (kind == "family") {
            if (!doc.contains("universe") || !doc["universe"].is_number_integer() ||
                doc["universe"].get<std::int64_t>() < 1)
                fail(text, "universe", "family model needs a positive integer \"universe\"");
            if (!doc.contains("sets") || !doc["sets"].is_array())
                fail(text, "sets", "family model needs an array \"sets\"");
            std::vector<std::vector<std::size_t>> sets;
            for (const auto& s : doc["sets"]) {
                if (!s.is_array())
                    fail(text, "sets", "each entry of \"sets\" must be an array");
                std::vector<std::size_t> members;
                for (const auto& e : s) {
                    if (!e.is_number_integer() || e.get<std::int64_t>() < 0)
                        fail(text, "sets", "set members must be non-negative integers");
                    members.push_back(e.get<std::size_t>());
                }
                sets.push_back(std::move(members));
            }
            out.model = FamilyModel{SetFamily::from_lists(doc["universe"].get<std::size_t>(), sets)};
        } else {
            fail(text, "kind", "unknown model kind '" + kind + "'");
        }
    } catch (const DomainError& e) {
        const char* key = kind == "ultrametric" ? "parent" : kind == "order" ? "size" : "sets";
        fail(text, key, e.what());
    }
    return out;
}

std::string dump_model(const ModelFile& file) {
    ordered_json doc;
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, UltrametricModel>) {
                doc["kind"] = "ultrametric";
                doc["parent"] = m.parent();
            } else if constexpr (std::is_same_v<T, OrderModel>) {
                doc["kind"] = "order";
                doc["size"] = m.size;
            } else {
                doc["kind"] = "family";
                doc["universe"] = m.family.universe().size();
                doc["sets"] = m.family.as_lists();
            }
        },
        file.model);
    doc["seed"] = file.seed;
    return doc.dump(2) + "\n";
}

ModelFile load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open model file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_model(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void save_model(const ModelFile& file, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write model file " + path.string());
    out << dump_model(file);
}

std::size_t carrier_size(const Model& model) {
    return std::visit(
        [](const auto& m) -> std::size_t {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, UltrametricModel>)
                return m.leaf_count();
            else if constexpr (std::is_same_v<T, OrderModel>)
                return m.size;
            else
                return m.family.universe().size();
        },
        model);
}

SetFamily designated_family(const Model& model) {
    return std::visit(
        [](const auto& m) -> SetFamily {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, UltrametricModel>) {
                std::vector<BitSet> sets;
                for (std::size_t v = 0; v < m.node_count(); ++v)
                    sets.push_back(m.ball(v));
                return SetFamily(Universe(m.leaf_count()), std::move(sets));
            } else if constexpr (std::is_same_v<T, OrderModel>) {
                return order_family(m).base();
            } else {
                return m.family;
            }
        },
        model);
}

} // namespace laminar
