#include "laminar/fullvcmin.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "laminar/errors.hpp"

namespace laminar {

namespace {

bool holds(const ParametrizedFormula& f, Element x0, Element a1, Element b) {
    const Element y[2] = {a1, b};
    return f.eval(std::span<const Element>(&x0, 1), std::span<const Element>(y, 2));
}

BitSet extent(const PsiFamily& family, std::size_t delta, Element a1, Element b) {
    BitSet e(family.carrier_size);
    for (Element x0 = 0; x0 < family.carrier_size; ++x0)
        if (holds(family.delta0[delta], x0, a1, b))
            e.set(x0);
    return e;
}

} // namespace

bool eval_psi(const PsiFamily& family, Element a1, Element b, Element b_prime, std::size_t delta,
              std::size_t delta_prime) {
    const auto& d = family.delta0.at(delta);
    const auto& dp = family.delta0.at(delta_prime);
    for (Element x0 = 0; x0 < family.carrier_size; ++x0)
        if (holds(dp, x0, a1, b_prime) && !holds(d, x0, a1, b))
            return false;
    return true;
}

PsiType psi_type(const PsiFamily& family, Element a1, std::span<const Element> params) {
    const auto nb = params.size(), nd = family.delta0.size();
    std::vector<BitSet> ext;
    ext.reserve(nb * nd);
    for (std::size_t j = 0; j < nb; ++j)
        for (std::size_t i = 0; i < nd; ++i)
            ext.push_back(extent(family, i, a1, params[j]));

    PsiType p{BitSet(nb * nb * nd * nd), nb, nd};
    for (std::size_t j = 0; j < nb; ++j)
        for (std::size_t jp = 0; jp < nb; ++jp)
            for (std::size_t i = 0; i < nd; ++i)
                for (std::size_t ip = 0; ip < nd; ++ip)
                    if (ext[jp * nd + ip].is_subset_of(ext[j * nd + i]))
                        p.bits.set(PsiType::index(j, jp, i, ip, nb, nd));
    return p;
}

std::vector<Tuple> anchored_params(Element a1, std::span<const Element> params) {
    std::vector<Tuple> out;
    out.reserve(params.size());
    for (auto b : params)
        out.push_back({a1, b});
    return out;
}

QuasiForest forest_from_type(const PsiType& p) {
    const auto nb = p.params, nd = p.formulas, n = nb * nd;
    std::vector<NodeLabel> labels;
    std::vector<BitSet> down(n, BitSet(n));
    for (std::size_t j = 0; j < nb; ++j)
        for (std::size_t i = 0; i < nd; ++i)
            labels.push_back({j, i});
    // ⟨B[j], δi⟩ ⊴_p ⟨B[j'], δi'⟩ iff p says ψ_{δi,δi'}(B[j], B[j']).
    for (std::size_t jp = 0; jp < nb; ++jp)
        for (std::size_t ip = 0; ip < nd; ++ip)
            for (std::size_t j = 0; j < nb; ++j)
                for (std::size_t i = 0; i < nd; ++i)
                    if (p.at(j, jp, i, ip))
                        down[jp * nd + ip].set(j * nd + i);
    return QuasiForest::from_relation(std::move(labels), std::move(down));
}

VirtualTypeSpace p_virtual_space(const PsiType& p) {
    auto v = virtual_type_space(forest_from_type(p));
    v.bound = p.params * p.formulas + 1;
    return v;
}

std::vector<BitSet> realized_delta0_types(const PsiFamily& family, Element a1, std::span<const Element> params) {
    const auto anchored = anchored_params(a1, params);
    std::unordered_set<BitSet, BitSetHash> seen;
    for (Element x0 = 0; x0 < family.carrier_size; ++x0)
        seen.insert(sign_vector(family.delta0, anchored, std::span<const Element>(&x0, 1)));
    std::vector<BitSet> out(seen.begin(), seen.end());
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------

bool BoolExpr::eval(const BitSet& atoms, std::size_t delta1_count) const {
    switch (kind) {
    case Kind::Const:
        return value;
    case Kind::Atom:
        return atoms.test(param * delta1_count + formula);
    case Kind::Not:
        return !args.at(0).eval(atoms, delta1_count);
    case Kind::And:
        return std::all_of(args.begin(), args.end(), [&](const BoolExpr& e) { return e.eval(atoms, delta1_count); });
    case Kind::Or:
        return std::any_of(args.begin(), args.end(), [&](const BoolExpr& e) { return e.eval(atoms, delta1_count); });
    }
    return false;
}

namespace {

BitSet delta1_type(const DecompositionCertificate& c, Element a1) {
    return sign_vector(c.delta1, c.params, std::span<const Element>(&a1, 1));
}

} // namespace

void validate_certificate(const PsiFamily& family, std::span<const Element> params,
                          const DecompositionCertificate& certificate) {
    const auto nb = params.size(), nd = family.delta0.size();
    if (certificate.psi.size() != nb * nb * nd * nd)
        throw ValidationError("certificate covers " + std::to_string(certificate.psi.size()) +
                              " ψ instances, expected " + std::to_string(nb * nb * nd * nd));
    for (const auto& f : certificate.delta1)
        if (f.object_arity != 1)
            throw ValidationError("certificate formula '" + f.name + "' must have object arity 1");
    const auto n1 = certificate.delta1.size();
    for (Element a1 = 0; a1 < family.carrier_size; ++a1) {
        const auto atoms = delta1_type(certificate, a1);
        for (std::size_t j = 0; j < nb; ++j)
            for (std::size_t jp = 0; jp < nb; ++jp)
                for (std::size_t i = 0; i < nd; ++i)
                    for (std::size_t ip = 0; ip < nd; ++ip) {
                        const auto idx = PsiType::index(j, jp, i, ip, nb, nd);
                        const bool claimed = certificate.psi[idx].eval(atoms, n1);
                        const bool actual = eval_psi(family, a1, params[j], params[jp], i, ip);
                        if (claimed != actual) {
                            std::ostringstream os;
                            os << "certificate mismatch: psi(" << family.delta0[i].name << ", "
                               << family.delta0[ip].name << ") at (b=" << params[j] << ", b'=" << params[jp]
                               << "), carrier point a1=" << a1 << ": certificate " << claimed << ", scan " << actual;
                            throw ValidationError(os.str());
                        }
                    }
    }
}

PsiType psi_from_delta1(const DecompositionCertificate& certificate, const BitSet& delta1_type,
                        std::size_t param_count, std::size_t delta0_count) {
    PsiType p{BitSet(certificate.psi.size()), param_count, delta0_count};
    for (std::size_t k = 0; k < certificate.psi.size(); ++k)
        if (certificate.psi[k].eval(delta1_type, certificate.delta1.size()))
            p.bits.set(k);
    return p;
}

DloInstance dlo_instance(std::size_t carrier_size, std::vector<Element> params) {
    for (auto b : params)
        if (b >= carrier_size)
            throw DomainError("dlo_instance: parameter " + std::to_string(b) + " outside the carrier");
    DloInstance inst;
    inst.params = std::move(params);
    auto& fam = inst.family;
    fam.carrier_size = carrier_size;

    auto make = [carrier_size](std::string name, auto pred) {
        ParametrizedFormula f;
        f.name = std::move(name);
        f.object_arity = 1;
        f.param_arity = 2;
        f.param_domain = carrier_size;
        f.eval = [pred](std::span<const Element> x, std::span<const Element> y) { return pred(x[0], y[0], y[1]); };
        return f;
    };
    fam.delta0.push_back(make("x0<x1", [](Element x0, Element x1, Element) { return x0 < x1; }));
    fam.delta0.push_back(make("x0<y", [](Element x0, Element, Element y) { return x0 < y; }));

    auto& cert = inst.certificate;
    auto segment = [carrier_size](std::string name, bool strict) {
        ParametrizedFormula f;
        f.name = std::move(name);
        f.object_arity = 1;
        f.param_arity = 2;
        f.param_domain = carrier_size;
        f.eval = [strict](std::span<const Element> x, std::span<const Element> y) {
            return strict ? x[0] > y[0] : x[0] >= y[0];
        };
        return f;
    };
    constexpr std::size_t ge = 0, gt = 1;
    cert.delta1.push_back(segment("x1>=y", false));
    cert.delta1.push_back(segment("x1>y", true));

    const auto& b = inst.params;
    const auto nb = b.size();
    for (std::size_t j = 0; j < nb; ++j)
        for (std::size_t jp = 0; jp < nb; ++jp)
            cert.params.push_back({b[j], b[jp]});
    auto diagonal = [nb](std::size_t j) { return j * nb + j; };

    constexpr std::size_t below_x1 = 0, below_y = 1;
    cert.psi.resize(nb * nb * 4);
    for (std::size_t j = 0; j < nb; ++j)
        for (std::size_t jp = 0; jp < nb; ++jp) {
            auto at = [&](std::size_t i, std::size_t ip) -> BoolExpr& {
                return cert.psi[PsiType::index(j, jp, i, ip, nb, 2)];
            };
            at(below_x1, below_x1) = BoolExpr::constant(true);
            // {x0 < b'} ⊆ {x0 < x1}  iff  x1 ≥ b'
            at(below_x1, below_y) = BoolExpr::atom(ge, diagonal(jp));
            // {x0 < x1} ⊆ {x0 < b}  iff  not x1 > b
            at(below_y, below_x1) = BoolExpr::negate(BoolExpr::atom(gt, diagonal(j)));
            at(below_y, below_y) = BoolExpr::constant(b[jp] <= b[j]);
        }
    return inst;
}

// ---------------------------------------------------------------------------

bool IncrementalReport::steps_ok() const {
    return std::all_of(steps.begin(), steps.end(), [](const IncrementalStep& s) { return s.ok(); });
}

bool IncrementalReport::ok() const {
    return steps_ok() && first_space <= first_space_bound && sum_dist <= sum_dist_bound &&
           union_size <= aggregate_bound && realized_contained;
}

IncrementalReport incremental_count_check(const PsiFamily& family, std::span<const Element> params,
                                          const DecompositionCertificate& certificate) {
    validate_certificate(family, params, certificate);

    IncrementalReport r;
    r.param_count = params.size();
    r.delta0_count = family.delta0.size();
    r.delta1_count = certificate.delta1.size();
    r.delta1_params = certificate.params.size();
    r.first_space_bound = r.param_count * r.delta0_count + 1;
    r.sum_dist_bound = 2 * r.delta1_params * r.delta1_count;
    r.aggregate_bound = r.sum_dist_bound + r.first_space_bound;

    const auto forest = build_forest(certificate.params, certificate.delta1, family.carrier_size);
    const TypeTree tree(forest);
    const auto order = convex_order(tree);

    std::unordered_map<BitSet, std::size_t, BitSetHash> node_of;
    for (std::size_t v = 0; v < tree.size(); ++v)
        node_of.emplace(tree.members(v), v);

    // Realized Δ1-types, keyed by their type-tree node.
    std::map<std::size_t, Element> witness_by_rank;
    std::unordered_set<BitSet, BitSetHash> psi_seen;
    for (Element a1 = 0; a1 < family.carrier_size; ++a1) {
        const auto t = delta1_type(certificate, a1);
        const auto it = node_of.find(t);
        if (it == node_of.end())
            throw ValidationError("realized Δ1-type of a1=" + std::to_string(a1) + " is not a virtual type");
        const auto p = psi_from_delta1(certificate, t, params.size(), family.delta0.size());
        if (!(p == psi_type(family, a1, params)))
            throw ValidationError("Ψ-type of a1=" + std::to_string(a1) + " differs from its certificate reading");
        psi_seen.insert(p.bits);
        witness_by_rank.emplace(order.rank(it->second), a1);
    }
    r.realized_delta1_types = witness_by_rank.size();
    r.realized_psi_types = psi_seen.size();

    std::unordered_set<BitSet, BitSetHash> all_entries;
    std::unordered_set<BitSet, BitSetHash> previous;
    std::size_t prev_node = npos;
    for (const auto& [rank, a1] : witness_by_rank) {
        const auto node = order.sequence()[rank];
        const auto p = psi_from_delta1(certificate, tree.members(node), params.size(), family.delta0.size());
        const auto space = p_virtual_space(p);
        std::unordered_set<BitSet, BitSetHash> current(space.entries.begin(), space.entries.end());
        if (prev_node == npos) {
            r.first_space = current.size();
        } else {
            IncrementalStep s;
            s.from = prev_node;
            s.to = node;
            s.dist = dist(tree.node(prev_node), tree.node(node));
            for (const auto& e : current)
                if (!previous.count(e))
                    ++s.new_entries;
            r.sum_dist += s.dist;
            r.steps.push_back(s);
        }
        all_entries.insert(current.begin(), current.end());
        previous = std::move(current);
        prev_node = node;
    }
    r.union_size = all_entries.size();

    std::unordered_set<BitSet, BitSetHash> pairs;
    for (Element a1 = 0; a1 < family.carrier_size; ++a1)
        for (auto& v : realized_delta0_types(family, a1, params))
            pairs.insert(std::move(v));
    r.realized_pair_types = pairs.size();
    r.realized_contained =
        std::all_of(pairs.begin(), pairs.end(), [&](const BitSet& v) { return all_entries.count(v) > 0; });
    return r;
}

DeterminationReport check_forest_determination(const PsiFamily& family, std::span<const Element> params) {
    DeterminationReport r;
    std::unordered_map<BitSet, QuasiForest, BitSetHash> by_type;
    for (Element a1 = 0; a1 < family.carrier_size; ++a1) {
        ++r.elements;
        const auto p = psi_type(family, a1, params);
        const auto actual = build_forest(anchored_params(a1, params), family.delta0, family.carrier_size);
        bool good = false;
        try {
            good = forest_from_type(p) == actual;
        } catch (const ValidationError&) {
        }
        auto [it, fresh] = by_type.try_emplace(p.bits, actual);
        if (!fresh && !(it->second == actual))
            good = false;
        if (!good) {
            ++r.failures;
            if (!r.witness)
                r.witness = a1;
        }
    }
    r.psi_types = by_type.size();
    return r;
}

DeterminationReport check_type_determination(const PsiFamily& family, std::span<const Element> params) {
    DeterminationReport r;
    std::unordered_set<BitSet, BitSetHash> types;
    for (Element a1 = 0; a1 < family.carrier_size; ++a1) {
        ++r.elements;
        const auto p = psi_type(family, a1, params);
        types.insert(p.bits);
        const auto space = p_virtual_space(p);
        std::unordered_set<BitSet, BitSetHash> entries(space.entries.begin(), space.entries.end());
        for (const auto& v : realized_delta0_types(family, a1, params))
            if (!entries.count(v)) {
                ++r.failures;
                if (!r.witness)
                    r.witness = a1;
                break;
            }
    }
    r.psi_types = types.size();
    return r;
}

} // namespace laminar
