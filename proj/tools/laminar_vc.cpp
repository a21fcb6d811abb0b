#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "laminar/errors.hpp"
#include "laminar/harness.hpp"
#include "laminar/models.hpp"

using namespace laminar;
using nlohmann::json;

namespace {

std::vector<std::size_t> parse_sizes(const std::string& csv) {
    std::vector<std::size_t> out;
    std::stringstream ss(csv);
    for (std::string item; std::getline(ss, item, ',');) {
        if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos)
            throw DomainError("--sizes: '" + item + "' is not a positive integer");
        out.push_back(std::stoull(item));
    }
    return out;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f)
        throw IoError("cannot write " + out_path);
    f << text;
}

int cmd_check_directed(const std::string& path) {
    const auto file = load_model(path);
    const auto family = designated_family(file.model);
    const auto res = check_directed(family);
    if (const auto* c = std::get_if<CrossingPair>(&res)) {
        json j = {{"directed", false},
                  {"witness", {c->first, c->second}},
                  {"sets", {family[c->first].members(), family[c->second].members()}}};
        std::cout << j.dump(2) << '\n';
        return kExitFail;
    }
    std::cout << json{{"directed", true}, {"sets", family.size()}}.dump(2) << '\n';
    return kExitPass;
}

int cmd_verify(const VerifyConfig& config, bool as_json) {
    const auto results = verify_lemmas(config);
    const auto report = lemmas_json(results, config.seed);
    if (as_json) {
        std::cout << report.dump(2) << '\n';
    } else {
        for (const auto& r : results) {
            std::cout << (r.ok() ? "PASS " : "FAIL ") << r.id << " trials=" << r.trials << " failures=" << r.failures
                      << " ms=" << static_cast<long long>(r.ms);
            if (!r.first_failure.empty())
                std::cout << " first: " << r.first_failure;
            std::cout << '\n';
        }
    }
    return report["pass"].get<bool>() ? kExitPass : kExitFail;
}

int cmd_growth(const ExperimentConfig& config, const std::string& out, bool as_json) {
    const auto report = run_growth(config);
    emit(growth_csv(report), out);
    const auto summary = growth_json(report);
    if (as_json) {
        (out.empty() ? std::cerr : std::cout) << summary.dump(2) << '\n';
    } else {
        std::cerr << "median exponent " << report.median_exponent << " (ceiling " << report.ceiling << ") "
                  << (report.pass ? "PASS" : "FAIL") << "; realized types only\n";
    }
    if (report.cap_exceeded)
        std::cerr << "resource cap exceeded: " << report.error << '\n';
    return report.exit_code();
}

int cmd_demo(std::size_t b_size, std::uint64_t seed, bool as_json) {
    const auto inst = demo_instance(b_size, seed);
    IncrementalReport report;
    try {
        report = incremental_count_check(inst.family, inst.params, inst.certificate);
    } catch (const ValidationError& e) {
        std::cout << json{{"pass", false}, {"certificate_error", e.what()}}.dump(2) << '\n';
        return kExitFail;
    }
    if (as_json) {
        std::cout << incremental_json(report).dump(2) << '\n';
    } else {
        std::cout << "|B|=" << report.param_count << " |D0|=" << report.delta0_count << " |D1|=" << report.delta1_count
                  << " realized D1-types=" << report.realized_delta1_types << '\n';
        for (std::size_t i = 0; i < report.steps.size(); ++i) {
            const auto& s = report.steps[i];
            std::cout << "step " << i << ": new=" << s.new_entries << " dist=" << s.dist << (s.ok() ? " ok" : " FAIL")
                      << '\n';
        }
        std::cout << "first space " << report.first_space << " <= " << report.first_space_bound << '\n'
                  << "sum dist " << report.sum_dist << " <= " << report.sum_dist_bound << '\n'
                  << "union " << report.union_size << " <= " << report.aggregate_bound << '\n'
                  << "realized pair types contained: " << (report.realized_contained ? "yes" : "no") << '\n'
                  << (report.ok() ? "PASS" : "FAIL") << '\n';
    }
    return report.ok() ? kExitPass : kExitFail;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Directed families, type trees and VC-density growth experiments"};
    app.require_subcommand(1);

    std::string model_path;
    auto* check = app.add_subcommand("check-directed", "Check that a model's designated family is directed");
    check->add_option("--model", model_path, "Model file (.model.json)")->required();

    VerifyConfig vcfg;
    std::size_t verify_trials = 0;
    bool json_out = false;
    auto* verify = app.add_subcommand("verify-lemmas", "Run the seeded property suites");
    verify->add_option("--seed", vcfg.seed);
    auto* trials_opt = verify->add_option("--trials", verify_trials, "Override every suite's trial count");
    verify->add_flag("--json", json_out);

    ExperimentConfig gcfg;
    std::string sizes = "8,16,32,64", out;
    std::string growth_model;
    bool no_timing = false;
    auto* growth = app.add_subcommand("growth", "Type-count growth experiment");
    growth->add_option("--model", growth_model, "Model file; otherwise random ultrametric models");
    growth->add_option("--leaves", gcfg.leaves, "Leaves of generated models (0 = automatic)");
    growth->add_option("--branching", gcfg.branching);
    growth->add_option("--formula", gcfg.formula,
                       "single-ball, lca-ball, twin-ball-k, twin-ball-<k>, boolean-mix, eq-witness");
    growth->add_option("--arity", gcfg.arity);
    growth->add_option("--sizes", sizes);
    growth->add_option("--trials", gcfg.trials);
    growth->add_option("--seed", gcfg.seed);
    growth->add_option("--tol", gcfg.tol);
    growth->add_option("--cap", gcfg.eval_cap, "Evaluation cap per type-space computation");
    growth->add_option("--out", out, "CSV output path (default stdout)");
    growth->add_flag("--json", json_out);
    growth->add_flag("--allow-duplicates", gcfg.allow_duplicates);
    growth->add_flag("--no-timing", no_timing, "Write ms=0 so CSV output is bit-identical across runs");

    std::size_t b_size = 0;
    std::uint64_t demo_seed = 1;
    auto* demo = app.add_subcommand("fullvcmin-demo", "Incremental virtual-type count on the DLO instance");
    demo->add_option("--b-size", b_size)->required();
    demo->add_option("--seed", demo_seed);
    demo->add_flag("--json", json_out);

    std::string kind = "ultrametric";
    std::size_t leaves = 16, branching = 3, size = 16;
    std::uint64_t gen_seed = 1;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen-model", "Write a model file");
    gen->add_option("--kind", kind)->check(CLI::IsMember({"ultrametric", "order"}));
    gen->add_option("--leaves", leaves);
    gen->add_option("--branching", branching);
    gen->add_option("--size", size);
    gen->add_option("--seed", gen_seed);
    gen->add_option("--out", gen_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitPass : kExitUsage;
    }

    try {
        if (*check)
            return cmd_check_directed(model_path);
        if (*verify) {
            if (*trials_opt)
                vcfg.trials = verify_trials;
            return cmd_verify(vcfg, json_out);
        }
        if (*growth) {
            gcfg.sizes = parse_sizes(sizes);
            if (!growth_model.empty())
                gcfg.model_path = growth_model;
            gcfg.timing = !no_timing;
            return cmd_growth(gcfg, out, json_out);
        }
        if (*demo) {
            if (b_size != 4 && b_size != 8 && b_size != 16)
                throw DomainError("--b-size must be 4, 8 or 16");
            return cmd_demo(b_size, demo_seed, json_out);
        }
        if (*gen) {
            ModelFile file{OrderModel{size}, gen_seed};
            if (kind == "ultrametric")
                file.model = random_ultrametric(leaves, branching, gen_seed);
            if (gen_out.empty())
                std::cout << dump_model(file) << '\n';
            else
                save_model(file, gen_out);
            return kExitPass;
        }
    } catch (const ResourceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitResource;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFail;
    }
    return kExitUsage;
}
