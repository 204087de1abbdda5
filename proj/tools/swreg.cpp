// Command-line front end: fit, bound, capacity, srm, validate, rate.
// JSON to stdout (or --out); TSV series for plot data. All randomized
// subcommands require an explicit --seed.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "swreg/experiments.hpp"

namespace {

using namespace swreg;

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot open output file " + out_path);
        out << j.dump(2) << "\n";
    }
}

struct Flags {
    double emp = 0.0, p = 2.0, delta = 0.05;
    double Rx = 1.0, Rw = 1.0, RH = 1.0, alpha = 1.0, beta = 2.0;
    double eps = 0.5;
    long C = 1, d = 2, dG = 1;
    double n = 100;
    std::uint64_t seed = 0;
    bool has_seed = false;
};

BoundReport eval_bound(const std::string& id, const Flags& f) {
    if (id == "general") return risk_bound_general(f.emp, f.Rx * f.Rw / std::sqrt(f.n), f.delta, f.n);
    if (id == "lp")
        return risk_bound_lp(f.emp, rademacher_linear_bound(f.Rx, f.Rw, f.n), f.p, f.delta, f.n);
    if (id == "switching-linear")
        return risk_bound_switching_linear(f.emp, f.p, double(f.C), f.Rx, f.Rw, f.n, f.delta);
    if (id == "switching-kernel")
        return risk_bound_switching_linear(f.emp, f.p, double(f.C), f.Rx, f.RH, f.n, f.delta);
    if (id == "pws-general")
        return make_report(f.emp,
                           2.0 * f.p * rad_bound_pws_general(double(f.C), double(f.d), f.alpha, f.beta, f.n),
                           confidence_term(f.delta, f.n), "pws-general-log2",
                           json{{"C", f.C}, {"d", f.d}, {"alpha", f.alpha}, {"beta", f.beta}, {"n", f.n}});
    if (id == "pws-kernel")
        return make_report(f.emp,
                           2.0 * f.p * rad_bound_pws_kernel(double(f.C), double(f.d), f.Rx, f.RH, f.n),
                           confidence_term(f.delta, f.n), "pws-kernel-log2",
                           json{{"C", f.C}, {"d", f.d}, {"R_x", f.Rx}, {"R_H", f.RH}, {"n", f.n}});
    if (id == "pwa") {
        PwaBound b = rad_bound_pwa(double(f.C), double(f.d), f.Rx, f.Rw, f.n);
        return make_report(f.emp, 2.0 * f.p * b.value, confidence_term(f.delta, f.n), "pwa-ln",
                           json{{"C", f.C}, {"d", f.d}, {"R_x", f.Rx}, {"R_w", f.Rw},
                                {"n", f.n}, {"N", b.N}, {"relaxed", b.relaxed}});
    }
    if (id == "switching-fatpoly")
        return make_report(f.emp,
                           2.0 * rad_bound_switching_fatpoly(double(f.C), f.p, f.alpha, f.beta, f.n),
                           confidence_term(f.delta, f.n), "switching-fatpoly-ln",
                           json{{"C", f.C}, {"p", f.p}, {"alpha", f.alpha}, {"beta", f.beta}, {"n", f.n}});
    if (id == "switching-kernel-chained")
        return make_report(f.emp,
                           2.0 * rad_bound_switching_kernel(double(f.C), f.p, f.Rx, f.RH, f.n),
                           confidence_term(f.delta, f.n), "switching-kernel-chained-ln",
                           json{{"C", f.C}, {"p", f.p}, {"R_x", f.Rx}, {"R_H", f.RH}, {"n", f.n}});
    if (id == "switching-linear-chained")
        return make_report(f.emp,
                           2.0 * rad_bound_switching_linear_chained(double(f.C), double(f.d), f.p, f.Rx, f.Rw, f.n),
                           confidence_term(f.delta, f.n), "switching-linear-chained-ln",
                           json{{"C", f.C}, {"d", f.d}, {"p", f.p}, {"R_x", f.Rx}, {"R_w", f.Rw}, {"n", f.n}});
    throw CLI::ValidationError("bound", "unknown formula_id: " + id);
}

CapacityReport eval_capacity(const std::string& id, const Flags& f) {
    CapacityReport r;
    r.formula_id = id;
    auto fat = [&](double e) { return fat_shattering_linear(f.Rx, f.Rw, e); };
    if (id == "rad-linear") {
        r.kind = "rademacher";
        r.value = rademacher_linear_bound(f.Rx, f.Rw, f.n);
        r.n = long(f.n);
    } else if (id == "fat-linear") {
        r.kind = "fat";
        r.value = double(fat_shattering_linear(f.Rx, f.Rw, f.eps));
        r.epsilon = f.eps;
    } else if (id == "growth-linear") {
        r.kind = "growth";
        r.value = growth_linear_classifiers(f.C, f.d, f.n);
        r.n = long(f.n);
    } else if (id == "growth-natarajan") {
        r.kind = "growth";
        r.value = growth_natarajan(f.n, double(f.C), double(f.dG));
        r.n = long(f.n);
    } else if (id == "entropy-inf-fat") {
        r.kind = "entropy";
        r.value = entropy_inf_fat(f.eps, f.n, fat);
        r.epsilon = f.eps;
        r.n = long(f.n);
    } else if (id == "entropy-l2-dimfree") {
        r.kind = "entropy";
        r.value = entropy_l2_dimfree(f.eps, fat);
        r.epsilon = f.eps;
    } else if (id == "entropy-inf-linear") {
        r.kind = "entropy";
        r.value = entropy_inf_linear_finite_d(f.eps, f.d, f.Rx, f.Rw);
        r.epsilon = f.eps;
    } else if (id == "entropy-inf-kernel") {
        r.kind = "entropy";
        r.value = entropy_inf_kernel(f.eps, f.Rx, f.RH, f.n);
        r.epsilon = f.eps;
        r.n = long(f.n);
    } else if (id == "entropy-pws-1" || id == "entropy-pws-2") {
        r.kind = "entropy";
        double cls = growth_natarajan(f.n, double(f.C), double(f.dG));
        auto variant = (id == "entropy-pws-1") ? PwsEntropyVariant::prop1
                                               : PwsEntropyVariant::prop2;
        r.value = entropy_pws(f.eps, f.n, double(f.C), cls, fat, variant);
        r.epsilon = f.eps;
        r.n = long(f.n);
    } else {
        throw CLI::ValidationError("capacity", "unknown formula_id: " + id);
    }
    return r;
}

double bound_control_at_n(const std::string& id, const Flags& f, double n) {
    Flags g = f;
    g.n = n;
    g.emp = 0.0;
    if (id == "rad-linear") return rademacher_linear_bound(f.Rx, f.Rw, n);
    return eval_bound(id, g).control_term;
}

int run(int argc, char** argv) {
    CLI::App app{"Capacity measures, risk bounds, and learners for switching and "
                 "piecewise-smooth regression"};
    app.require_subcommand(1);

    Flags f;
    std::string formula, csv_path, out_path, model_path, emp_from_model;
    int restarts = 20;
    long trials = 200, draws = 10000;
    long test_n = 50000;
    double noise = 0.05;
    std::string model_kind = "switching";
    long Cmax = 4;
    bool append_one = false;
    double n_min = 1024, n_max = 16777216;
    int n_points = 15;
    std::string tsv_path;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--p", f.p, "loss exponent");
        sub->add_option("--C", f.C, "number of modes");
        sub->add_option("--d", f.d, "input dimension");
        sub->add_option("--dG", f.dG, "Natarajan dimension");
        sub->add_option("--Rx", f.Rx, "input norm bound");
        sub->add_option("--Rw", f.Rw, "weight norm bound");
        sub->add_option("--RH", f.RH, "RKHS norm bound");
        sub->add_option("--alpha", f.alpha, "fat-shattering growth constant");
        sub->add_option("--beta", f.beta, "fat-shattering growth exponent");
        sub->add_option("--eps", f.eps, "scale epsilon");
        sub->add_option("--n", f.n, "sample size");
        sub->add_option("--delta", f.delta, "confidence level");
        sub->add_option("--out", out_path, "write JSON to file instead of stdout");
    };

    auto* fit_cmd = app.add_subcommand("fit", "fit a switching or PWS model by ERM");
    fit_cmd->add_option("--model", model_kind, "switching|pws")->check(CLI::IsMember({"switching", "pws"}));
    fit_cmd->add_option("--csv", csv_path, "dataset CSV (x1,...,xd,y)")->required();
    fit_cmd->add_option("--C", f.C, "number of modes")->required();
    fit_cmd->add_option("--restarts", restarts, "random restarts");
    fit_cmd->add_option("--seed", f.seed, "RNG seed")->required();
    fit_cmd->add_option("--norm-cap", f.Rw, "project weights onto this ball");
    auto* cap_flag = fit_cmd->get_option("--norm-cap");
    fit_cmd->add_flag("--append-one", append_one, "append a constant 1 feature (affine models)");
    fit_cmd->add_option("--out", out_path, "write JSON to file instead of stdout");

    auto* bound_cmd = app.add_subcommand("bound", "evaluate a risk-bound formula");
    bound_cmd->add_option("formula_id", formula, "bound formula id")->required();
    bound_cmd->add_option("--emp", f.emp, "empirical risk");
    bound_cmd->add_option("--emp-from-model", emp_from_model, "recompute --emp from a saved model JSON");
    bound_cmd->add_option("--csv", csv_path, "dataset for --emp-from-model");
    add_common(bound_cmd);

    auto* capacity_cmd = app.add_subcommand("capacity", "evaluate a capacity formula");
    capacity_cmd->add_option("formula_id", formula, "capacity formula id")->required();
    capacity_cmd->add_option("--draws", draws, "Monte Carlo draws (rad-mc)");
    auto* cap_seed = capacity_cmd->add_option("--seed", f.seed, "RNG seed");
    capacity_cmd->add_option("--csv", csv_path, "sample CSV for rad-mc");
    add_common(capacity_cmd);

    auto* srm_cmd = app.add_subcommand("srm", "select the number of modes by SRM");
    srm_cmd->add_option("--csv", csv_path, "dataset CSV")->required();
    srm_cmd->add_option("--Cmax", Cmax, "largest mode count")->required();
    srm_cmd->add_option("--formula", formula, "bound formula id")->default_val("switching-linear");
    srm_cmd->add_option("--restarts", restarts, "random restarts per fit");
    srm_cmd->add_option("--seed", f.seed, "RNG seed")->required();
    add_common(srm_cmd);

    auto* validate_cmd = app.add_subcommand("validate", "Monte Carlo bound-coverage study");
    validate_cmd->add_option("--trials", trials, "number of trials");
    validate_cmd->add_option("--test-n", test_n, "independent test sample size");
    validate_cmd->add_option("--noise", noise, "uniform noise half-width");
    validate_cmd->add_option("--restarts", restarts, "random restarts per fit");
    validate_cmd->add_option("--formula", formula, "bound formula id")->default_val("switching-linear");
    validate_cmd->add_option("--seed", f.seed, "RNG seed")->required();
    add_common(validate_cmd);

    auto* rate_cmd = app.add_subcommand("rate", "log-log slope of a bound's control term");
    rate_cmd->add_option("--formula", formula, "bound formula id")->required();
    rate_cmd->add_option("--n-min", n_min, "smallest n");
    rate_cmd->add_option("--n-max", n_max, "largest n");
    rate_cmd->add_option("--points", n_points, "grid points (log-spaced)");
    rate_cmd->add_option("--tsv", tsv_path, "write (n, control) TSV series");
    add_common(rate_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    }

    if (*fit_cmd) {
        Dataset raw = load_csv(csv_path);
        if (append_one)
            for (auto& x : raw.xs) {
                Vec v(x.size() + 1);
                v << x, 1.0;
                x = v;
            }
        Dataset data = rescale_dataset(raw);
        FitOptions opts;
        opts.restarts = restarts;
        opts.seed = f.seed;
        if (cap_flag->count()) opts.norm_cap = f.Rw;
        json j;
        if (model_kind == "switching") {
            FitResult fit = fit_switching_linear(data, int(f.C), opts);
            j = json{{"model", to_json(fit.model)},
                     {"objective", fit.objective},
                     {"iterations", fit.iterations},
                     {"restarts", fit.restarts_used},
                     {"scale", {{"offset", data.scale.offset}, {"factor", data.scale.factor}}},
                     {"seed", f.seed}};
        } else {
            PwsFitResult fit = fit_pws(data, int(f.C), opts);
            j = json{{"model", to_json(fit.model)},
                     {"objective", fit.pws_risk},
                     {"switching_risk", fit.switching_risk},
                     {"scale", {{"offset", data.scale.offset}, {"factor", data.scale.factor}}},
                     {"seed", f.seed}};
        }
        emit(j, out_path);
        return 0;
    }

    if (*bound_cmd) {
        if (!emp_from_model.empty()) {
            if (csv_path.empty())
                throw CLI::ValidationError("bound", "--emp-from-model requires --csv");
            std::ifstream in(emp_from_model);
            if (!in) throw std::runtime_error("cannot open model file " + emp_from_model);
            json mj = json::parse(in);
            Dataset data = rescale_dataset(load_csv(csv_path));
            if (mj.at("type") == "switching")
                f.emp = model_empirical_risk(switching_from_json(mj), data, f.p);
            else
                f.emp = model_empirical_risk(pws_from_json(mj), data, f.p);
        }
        emit(eval_bound(formula, f).to_json(), out_path);
        return 0;
    }

    if (*capacity_cmd) {
        if (formula == "rad-mc") {
            if (!cap_seed->count())
                throw CLI::ValidationError("capacity", "rad-mc requires --seed");
            if (csv_path.empty())
                throw CLI::ValidationError("capacity", "rad-mc requires --csv");
            Dataset data = load_csv(csv_path);
            auto spec = ComponentClassSpec::linear(int(data.dim()), f.Rx, f.Rw);
            McEstimate est = rademacher_mc(spec, data.xs, draws, f.seed);
            emit(json{{"kind", "rademacher"},
                      {"formula_id", "rad-mc"},
                      {"mean", est.mean},
                      {"stderr", est.stderr_},
                      {"draws", est.draws},
                      {"seed", est.seed}},
                 out_path);
            return 0;
        }
        emit(eval_capacity(formula, f).to_json(), out_path);
        return 0;
    }

    if (*srm_cmd) {
        Dataset data = rescale_dataset(load_csv(csv_path));
        FitOptions opts;
        opts.restarts = restarts;
        opts.seed = f.seed;
        Flags g = f;
        g.n = double(data.n());
        auto bound_fn = [&](const FitResult& fit, int C) {
            Flags h = g;
            h.C = C;
            h.emp = fit.objective;
            return eval_bound(formula, h);
        };
        SrmResult res = select_modes_srm(data, int(Cmax), bound_fn, opts);
        json j = res.to_json();
        j["seed"] = f.seed;
        j["formula_id"] = formula;
        emit(j, out_path);
        return 0;
    }

    if (*validate_cmd) {
        CoverageConfig cfg;
        cfg.spec.kind = SyntheticSpec::Kind::arbitrary;
        cfg.spec.C_true = int(f.C);
        cfg.spec.d = int(f.d);
        cfg.spec.n = std::size_t(f.n);
        cfg.spec.noise = noise;
        rng::Counter wgen(f.seed ^ 0x9027ULL);
        for (int k = 0; k < cfg.spec.C_true; ++k) {
            Vec w(cfg.spec.d);
            for (int j = 0; j < cfg.spec.d; ++j) w[j] = wgen.uniform(-0.3, 0.3);
            cfg.spec.comp_w.push_back(w);
        }
        cfg.C_fit = int(f.C);
        cfg.p = f.p;
        cfg.delta = f.delta;
        cfg.test_n = std::size_t(test_n);
        cfg.fit.restarts = restarts;
        Flags g = f;
        auto bound_fn = [&](const FitResult& fit, int C) {
            Flags h = g;
            h.C = C;
            h.emp = fit.objective;
            return eval_bound(formula, h);
        };
        CoverageReport rep = validate_coverage(cfg, trials, bound_fn, f.seed);
        json j = rep.to_json();
        j["seed"] = f.seed;
        j["formula_id"] = formula;
        emit(j, out_path);
        return 0;
    }

    if (*rate_cmd) {
        std::vector<double> grid;
        for (int i = 0; i < n_points; ++i) {
            double t = double(i) / double(n_points - 1);
            grid.push_back(n_min * std::pow(n_max / n_min, t));
        }
        auto value_at = [&](double n) { return bound_control_at_n(formula, f, n); };
        RateResult res = rate_study(value_at, grid);
        if (!tsv_path.empty()) {
            std::ofstream tsv(tsv_path);
            if (!tsv) throw std::runtime_error("cannot open TSV file " + tsv_path);
            tsv.precision(17);
            tsv << "n\tcontrol\n";
            for (double n : grid) tsv << n << "\t" << value_at(n) << "\n";
        }
        json j = res.to_json();
        j["formula_id"] = formula;
        emit(j, out_path);
        return 0;
    }

    return 2;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
