// One line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "laminar/harness.hpp"
#include "laminar/models.hpp"
#include "oracles.hpp"

using namespace laminar;

namespace {

constexpr std::uint64_t kSeed = 1;

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double time_limit_s;  // 0: none
    std::function<Outcome()> run;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

Outcome lemma(const LemmaResult& r) {
    std::string d = std::to_string(r.trials) + " trials, " + std::to_string(r.failures) + " failures";
    if (!r.first_failure.empty())
        d += "; " + r.first_failure;
    return {r.ok() && r.trials > 0, d};
}

Outcome growth_ceiling(const std::string& formula, std::size_t arity, std::vector<std::size_t> sizes, double limit) {
    ExperimentConfig c;
    c.formula = formula;
    c.arity = arity;
    c.sizes = std::move(sizes);
    c.trials = 5;
    c.seed = kSeed;
    c.timing = false;
    const auto r = run_growth(c);
    return {!r.cap_exceeded && r.median_exponent <= limit,
            formula + " median exponent " + fmt(r.median_exponent) + " <= " + fmt(limit)};
}

Outcome lower_bound_witness() {
    for (std::size_t m = 2; m <= 10; ++m) {
        const auto carrier = m + 3;
        const std::vector<ParametrizedFormula> phi{equality_witness_formula(carrier)};
        std::vector<Tuple> b;
        for (Element y = 0; y < m; ++y)
            b.push_back({y + 1});
        const auto got = type_space(phi, b, carrier, 2).count();
        const auto want = 1 + m + m * (m - 1) / 2;
        const auto brute = oracle::type_count(phi, b, carrier, 2);
        if (got != want || brute != want)
            return {false, "m=" + std::to_string(m) + " count " + std::to_string(got) + ", oracle " +
                               std::to_string(brute) + ", expected " + std::to_string(want)};
    }
    ExperimentConfig c;
    c.formula = "eq-witness";
    c.arity = 2;
    c.sizes = {8, 16, 32, 64, 128, 256};
    c.trials = 5;
    c.seed = kSeed;
    c.timing = false;
    const auto r = run_growth(c);
    for (const auto& row : r.rows)
        if (row.type_count != 1 + row.m + row.m * (row.m - 1) / 2)
            return {false, "growth row m=" + std::to_string(row.m) + " count " + std::to_string(row.type_count)};
    return {!r.cap_exceeded && r.median_exponent >= 1.85,
            "exact for m=2..10; median exponent " + fmt(r.median_exponent) + " >= 1.85"};
}

Outcome incremental_demo() {
    std::string d;
    bool ok = true;
    for (std::size_t b : {4, 8, 16}) {
        const auto inst = demo_instance(b, kSeed);
        const auto r = incremental_count_check(inst.family, inst.params, inst.certificate);
        const bool bound_matches = r.aggregate_bound == 2 * b * b * r.delta1_count + b * r.delta0_count + 1;
        ok = ok && r.ok() && bound_matches;
        d += "|B|=" + std::to_string(b) + ": " + std::to_string(r.union_size) + " <= " +
             std::to_string(r.aggregate_bound) + (r.steps_ok() ? ", steps ok" : ", step FAIL") + "; ";
    }
    return {ok, d};
}

} // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "directedness and linear type bound", 30,
         [] { return lemma(verify_directed_linear_bound(kSeed, 500)); }},
        {2, "convexity of the constructed order", 30, [] { return lemma(verify_convexity(kSeed, 1000)); }},
        {3, "sum of distances", 0, [] { return lemma(verify_sum_dist(kSeed, 1000)); }},
        {4, "sauer-shelah", 0, [] { return lemma(verify_sauer_shelah(kSeed, 1000)); }},
        {5, "components canonicity", 0, [] { return lemma(verify_components(kSeed, 500)); }},
        {6, "forest and type determination", 60,
         [] {
             const auto f = lemma(verify_forest_determination(kSeed, 300));
             const auto t = lemma(verify_type_determination(kSeed, 300));
             return Outcome{f.pass && t.pass, "forest " + f.detail + "; type " + t.detail};
         }},
        {7, "incremental count", 0, incremental_demo},
        {8, "growth k=1 single-ball", 0, [] { return growth_ceiling("single-ball", 1, {8, 16, 32, 64}, 1.10); }},
        {9, "growth k=2 u-ball corpus", 300,
         [] {
             Outcome all{true, ""};
             for (const char* f : {"lca-ball", "twin-ball-k", "boolean-mix"}) {
                 const auto o = growth_ceiling(f, 2, {8, 16, 32, 64, 128, 256}, 2.15);
                 all.pass = all.pass && o.pass;
                 all.detail += o.detail + "; ";
             }
             return all;
         }},
        {10, "lower-bound witness", 0, lower_bound_witness},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = c.time_limit_s == 0 || s < c.time_limit_s;
        const bool pass = o.pass && in_time;
        failures += !pass;
        std::string timing = fmt(s) + "s";
        if (c.time_limit_s)
            timing += " < " + std::to_string(static_cast<int>(c.time_limit_s)) + "s";
        std::printf("ACCEPTANCE %d %s: %s: %s (%s; %s)\n", c.id, pass ? "PASS" : "FAIL", c.name.c_str(), o.detail.c_str(),
                    in_time ? "in time" : "over time limit", timing.c_str());
        std::fflush(stdout);
    }
    return failures ? 1 : 0;
}
