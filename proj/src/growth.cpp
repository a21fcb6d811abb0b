#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "laminar/errors.hpp"
#include "laminar/harness.hpp"
#include "laminar/models.hpp"
#include "laminar/rng.hpp"

namespace laminar {

std::size_t worker_threads() {
    if (const char* env = std::getenv("LAMINAR_VC_THREADS")) {
        char* end = nullptr;
        const auto v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && v > 0)
            return static_cast<std::size_t>(v);
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

void validate(const ExperimentConfig& c) {
    if (c.trials < 1)
        throw DomainError("trials must be at least 1");
    if (c.arity != 1 && c.arity != 2)
        throw DomainError("arity must be 1 or 2");
    if (c.sizes.empty())
        throw DomainError("sizes must be nonempty");
    for (std::size_t i = 0; i < c.sizes.size(); ++i) {
        if (c.sizes[i] < 2)
            throw DomainError("sizes must be at least 2");
        if (i && c.sizes[i] <= c.sizes[i - 1])
            throw DomainError("sizes must be strictly increasing");
    }
    if (c.tol < 0)
        throw DomainError("tol must be non-negative");
    if (c.branching < 2)
        throw DomainError("branching must be at least 2");
}

double median(std::vector<double> values) {
    if (values.empty())
        return 0;
    std::sort(values.begin(), values.end());
    const auto n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

struct TrialSetup {
    std::string model_id;
    std::size_t carrier = 0;
    std::vector<ParametrizedFormula> formulas;
};

bool is_corpus(const std::string& kind) {
    return kind == "lca-ball" || kind == "twin-ball-k" || kind == "boolean-mix" || kind.rfind("twin-ball-", 0) == 0;
}

TrialSetup setup_trial(const ExperimentConfig& c, std::size_t trial) {
    const auto max_m = c.sizes.back();
    TrialSetup s;

    std::optional<ModelFile> file;
    if (c.model_path) {
        file = load_model(*c.model_path);
        s.model_id = c.model_path->filename().string();
        const auto ext = std::string(".model.json");
        if (s.model_id.size() > ext.size() && s.model_id.ends_with(ext))
            s.model_id.resize(s.model_id.size() - ext.size());
    }

    if (c.formula == "eq-witness") {
        if (c.arity != 2)
            throw DomainError("eq-witness has object arity 2; use --arity 2");
        s.carrier = file ? carrier_size(file->model) : max_m + 1;
        if (!file)
            s.model_id = "carrier-" + std::to_string(s.carrier);
        s.formulas.push_back(equality_witness_formula(s.carrier));
        return s;
    }

    std::shared_ptr<const UltrametricModel> model;
    if (file) {
        const auto* um = std::get_if<UltrametricModel>(&file->model);
        if (!um)
            throw DomainError("formula '" + c.formula + "' needs an ultrametric model");
        model = std::make_shared<const UltrametricModel>(*um);
    } else {
        std::size_t leaves = c.leaves;
        if (leaves == 0)
            leaves = c.arity == 1 ? std::max<std::size_t>(64, 2 * max_m) : max_m + 16;
        const auto model_seed = derive_seed(c.seed, 0, trial);
        model = std::make_shared<const UltrametricModel>(random_ultrametric(leaves, c.branching, model_seed));
        s.model_id = "ultrametric-L" + std::to_string(leaves) + "-b" + std::to_string(c.branching) + "-s" +
                     std::to_string(model_seed);
    }
    s.carrier = model->leaf_count();

    if (c.formula == "single-ball") {
        if (c.arity != 1)
            throw DomainError("single-ball has object arity 1; use --arity 1");
        s.formulas.push_back(single_ball_formula(model));
    } else if (is_corpus(c.formula)) {
        for (auto& u : builtin_formulas(model, c.formula))
            s.formulas.push_back(c.arity == 1 ? std::move(u.formula) : swap_roles(u.formula, s.carrier));
    } else {
        throw DomainError("unknown formula kind '" + c.formula + "'");
    }
    return s;
}

std::vector<Tuple> sample_params(const ParametrizedFormula& f, std::size_t m, bool duplicates, std::uint64_t seed) {
    std::uint64_t space = 1;
    for (std::size_t i = 0; i < f.param_arity; ++i)
        space *= f.param_domain;
    if (!duplicates && m > space)
        throw DomainError("cannot draw " + std::to_string(m) + " distinct parameters from a space of " +
                          std::to_string(space));
    Rng rng(seed);
    std::vector<std::uint64_t> codes;
    if (duplicates) {
        for (std::size_t i = 0; i < m; ++i)
            codes.push_back(rng.below(space));
    } else {
        codes = rng.sample_distinct(m, space);
    }
    std::vector<Tuple> out;
    for (auto code : codes) {
        Tuple t(f.param_arity);
        for (std::size_t i = f.param_arity; i-- > 0;) {
            t[i] = static_cast<Element>(code % f.param_domain);
            code /= f.param_domain;
        }
        out.push_back(std::move(t));
    }
    return out;
}

struct TrialOutcome {
    std::vector<GrowthRow> rows;
    TrialFit fit;
    bool cap_exceeded = false;
    std::string error;
};

TrialOutcome run_trial(const ExperimentConfig& c, std::size_t trial) {
    TrialOutcome out;
    out.fit.trial = trial;
    const auto setup = setup_trial(c, trial);
    TypeSpaceOptions opts;
    opts.eval_cap = c.eval_cap;
    for (auto m : c.sizes) {
        const auto seed = derive_seed(c.seed, m, trial);
        const auto params = sample_params(setup.formulas.front(), m, c.allow_duplicates, seed);
        const auto start = std::chrono::steady_clock::now();
        TypeSpace ts;
        try {
            ts = type_space(setup.formulas, params, setup.carrier, c.arity, opts);
        } catch (const ResourceError& e) {
            out.cap_exceeded = true;
            out.error = e.what();
            break;
        }
        const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        out.rows.push_back({setup.model_id, c.formula, c.arity, m, trial, seed, ts.count(), c.timing ? ms : 0.0});
        out.fit.series.points.push_back({m, ts.count(), seed});
    }
    if (!out.cap_exceeded)
        out.fit.fit = fit_codensity_exponent(out.fit.series);
    return out;
}

} // namespace

GrowthReport run_growth(const ExperimentConfig& config) {
    validate(config);
    if (config.sizes.size() < 3)
        throw DomainError("growth needs at least 3 sizes to fit an exponent");
    GrowthReport report;
    report.config = config;
    report.ceiling = config.ceiling();

    std::vector<TrialOutcome> outcomes(config.trials);
    std::vector<std::string> errors(config.trials);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t; (t = next.fetch_add(1)) < config.trials;) {
            try {
                outcomes[t] = run_trial(config, t);
            } catch (const std::exception& e) {
                errors[t] = e.what();
            }
        }
    };
    const auto n = std::min(worker_threads(), config.trials);
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < n; ++i)
            pool.emplace_back(worker);
    }
    for (const auto& e : errors)
        if (!e.empty())
            throw DomainError(e);

    std::vector<double> slopes;
    for (auto& o : outcomes) {
        report.rows.insert(report.rows.end(), o.rows.begin(), o.rows.end());
        if (o.cap_exceeded) {
            report.cap_exceeded = true;
            if (report.error.empty())
                report.error = o.error;
        }
        if (o.fit.fit)
            slopes.push_back(o.fit.fit->slope);
        report.fits.push_back(std::move(o.fit));
    }
    std::sort(report.rows.begin(), report.rows.end(),
              [](const GrowthRow& a, const GrowthRow& b) { return std::tie(a.trial, a.m) < std::tie(b.trial, b.m); });
    report.median_exponent = median(slopes);
    report.pass = !report.cap_exceeded && !slopes.empty() && report.median_exponent <= report.ceiling;
    return report;
}

std::string growth_csv(const GrowthReport& report) {
    std::ostringstream os;
    os << kGrowthCsvHeader << '\n';
    for (const auto& r : report.rows) {
        os << r.model << ',' << r.formula << ',' << r.arity << ',' << r.m << ',' << r.trial << ',' << r.seed << ','
           << r.type_count << ',' << std::fixed << std::setprecision(3) << r.ms << '\n';
        os.unsetf(std::ios::floatfield);
    }
    return os.str();
}

nlohmann::json growth_json(const GrowthReport& report) {
    using nlohmann::json;
    json trials = json::array();
    for (const auto& f : report.fits) {
        json points = json::array();
        for (const auto& p : f.series.points)
            points.push_back({{"m", p.m}, {"type_count", p.type_count}, {"seed", p.seed}});
        json t = {{"trial", f.trial}, {"points", points}};
        if (f.fit) {
            t["exponent"] = f.fit->slope;
            t["intercept"] = f.fit->intercept;
            t["residuals"] = f.fit->residuals;
        }
        trials.push_back(std::move(t));
    }
    json out = {
        {"formula", report.config.formula},
        {"arity", report.config.arity},
        {"sizes", report.config.sizes},
        {"seed", report.config.seed},
        {"trials", trials},
        {"median_exponent", report.median_exponent},
        {"ceiling", report.ceiling},
        {"pass", report.pass},
        {"cap_exceeded", report.cap_exceeded},
        {"realized_types_only", true},
    };
    if (!report.error.empty())
        out["error"] = report.error;
    return out;
}

} // namespace laminar
