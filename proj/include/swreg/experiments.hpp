#ifndef SWREG_EXPERIMENTS_HPP
#define SWREG_EXPERIMENTS_HPP

#include "swreg/bounds.hpp"
#include "swreg/learn.hpp"

namespace swreg {

// Data generator: x uniform in [-1,1]^d, y = clip(<w_mode, x> + noise, 1/2)
// with uniform noise in [-noise, noise]. Mode selection is deterministic
// (argmax of classifier weights) for the pws kind, seeded per point for the
// arbitrary-switching kind.
struct SyntheticSpec {
    enum class Kind { pws, arbitrary };

    Kind kind = Kind::arbitrary;
    int C_true = 2;
    int d = 2;
    std::vector<Vec> comp_w; // C_true vectors in R^d
    std::vector<Vec> cls_w;  // classifier weights, pws kind only
    double noise = 0.0;      // uniform half-width
    std::size_t n = 100;
    std::uint64_t seed = 0;

    void check() const {
        if (C_true < 1 || d < 1 || n < 1)
            throw std::invalid_argument("SyntheticSpec: bad sizes");
        if (int(comp_w.size()) != C_true)
            throw std::invalid_argument("SyntheticSpec: need C_true component weights");
        if (kind == Kind::pws && int(cls_w.size()) != C_true)
            throw std::invalid_argument("SyntheticSpec: pws kind needs classifier weights");
        if (noise < 0) throw std::invalid_argument("SyntheticSpec: negative noise");
        for (const auto& w : comp_w)
            if (w.size() != d) throw std::invalid_argument("SyntheticSpec: weight dim");
    }
};

struct SyntheticData {
    Dataset data;
    std::vector<int> true_modes;
    SwitchingModel true_model;
};

inline SyntheticData generate_synthetic(const SyntheticSpec& spec) {
    spec.check();
    rng::Counter root(spec.seed);
    SyntheticData out;
    out.data.M = 0.5;
    out.data.xs.reserve(spec.n);
    out.data.ys.reserve(spec.n);

    LinearClassifier cls;
    if (spec.kind == SyntheticSpec::Kind::pws) cls.W = spec.cls_w;

    for (std::size_t i = 0; i < spec.n; ++i) {
        rng::Counter g = root.split(i);
        Vec x(spec.d);
        for (int j = 0; j < spec.d; ++j) x[j] = g.uniform(-1.0, 1.0);
        int mode;
        if (spec.kind == SyntheticSpec::Kind::pws) {
            mode = classify(cls, x);
        } else {
            mode = int(g.next_below(std::uint64_t(spec.C_true)));
        }
        double eps = spec.noise > 0 ? g.uniform(-spec.noise, spec.noise) : 0.0;
        double y = clip(spec.comp_w[std::size_t(mode)].dot(x) + eps, 0.5);
        out.data.xs.push_back(std::move(x));
        out.data.ys.push_back(y);
        out.true_modes.push_back(mode);
    }

    out.true_model.M = 0.5;
    for (const auto& w : spec.comp_w)
        out.true_model.components.push_back(ComponentFunction::linear(w));
    return out;
}

// ---- SRM over the number of modes ----

struct SrmRow {
    int C = 1;
    double empirical_risk = 0.0;
    double bound = 0.0; // clamped total
};

struct SrmResult {
    int C_star = 1;
    std::vector<SrmRow> table;

    json to_json() const {
        json rows = json::array();
        for (const auto& r : table)
            rows.push_back(json{{"C", r.C},
                                {"empirical_risk", r.empirical_risk},
                                {"bound", r.bound}});
        return json{{"C_star", C_star}, {"table", rows}};
    }
};

// Bound evaluated from a fit: (fit result, C) -> BoundReport.
using BoundFn = std::function<BoundReport(const FitResult&, int)>;

// Fits C = 1..C_max, picks argmin of the clamped bound (ties -> smaller C).
inline SrmResult select_modes_srm(const Dataset& data, int C_max, const BoundFn& bound_fn,
                                  const FitOptions& opts) {
    if (C_max < 1) throw std::invalid_argument("select_modes_srm: C_max must be >= 1");
    SrmResult out;
    double best = std::numeric_limits<double>::infinity();
    for (int C = 1; C <= C_max; ++C) {
        FitOptions o = opts;
        o.seed = rng::splitmix64(opts.seed ^ std::uint64_t(C));
        FitResult fit = fit_switching_linear(data, C, o);
        BoundReport rep = bound_fn(fit, C);
        out.table.push_back(SrmRow{C, fit.objective, rep.clamped_total});
        if (rep.clamped_total < best) {
            best = rep.clamped_total;
            out.C_star = C;
        }
    }
    return out;
}

// ---- Monte Carlo bound coverage ----

struct CoverageConfig {
    SyntheticSpec spec;       // training distribution (per-trial seeds derived)
    int C_fit = 2;            // modes fitted per trial
    double p = 2.0;
    double delta = 0.05;
    std::size_t test_n = 50000;
    FitOptions fit;           // fit.seed unused; per-trial seeds derived
};

struct CoverageReport {
    long trials = 0;
    long violations = 0;
    double coverage = 1.0;
    double delta = 0.0;
    double mean_slack = 0.0;

    json to_json() const {
        return json{{"trials", trials},
                    {"violations", violations},
                    {"coverage", coverage},
                    {"delta", delta},
                    {"mean_slack", mean_slack}};
    }
};

// Per trial: fresh train set, fit, clamped bound, independent test-risk
// estimate; violation when bound < estimate - 2 * test stderr.
inline CoverageReport validate_coverage(const CoverageConfig& cfg, long trials,
                                        const BoundFn& bound_fn, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("validate_coverage: trials must be >= 1");
    struct TrialOut {
        bool violation = false;
        double slack = 0.0;
    };
    std::vector<TrialOut> outs(static_cast<std::size_t>(trials));

    parallel_for(std::size_t(trials), [&](std::size_t t) {
        std::uint64_t trial_seed = rng::splitmix64(seed ^ rng::splitmix64(t));
        SyntheticSpec train_spec = cfg.spec;
        train_spec.seed = trial_seed;
        SyntheticData train = generate_synthetic(train_spec);

        FitOptions fo = cfg.fit;
        fo.seed = rng::splitmix64(trial_seed ^ 0x5bf03635ULL);
        FitResult fit = fit_switching_linear(train.data, cfg.C_fit, fo);
        BoundReport rep = bound_fn(fit, cfg.C_fit);

        SyntheticSpec test_spec = cfg.spec;
        test_spec.n = cfg.test_n;
        test_spec.seed = rng::splitmix64(trial_seed ^ 0x7f4a7c15ULL);
        SyntheticData test = generate_synthetic(test_spec);

        // Test-risk estimate with its standard error.
        double sum = 0.0, sq = 0.0;
        for (std::size_t i = 0; i < test.data.n(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : fit.model.components) {
                double r = test.data.ys[i] - clip(c.eval(test.data.xs[i]), fit.model.M);
                best = std::min(best, std::pow(std::abs(r), cfg.p));
            }
            sum += best;
            sq += best * best;
        }
        double m = sum / double(test.data.n());
        double var = std::max(0.0, sq / double(test.data.n()) - m * m);
        double se = std::sqrt(var / double(test.data.n()));

        outs[t].violation = rep.clamped_total < m - 2.0 * se;
        outs[t].slack = rep.clamped_total - m;
    });

    CoverageReport rep;
    rep.trials = trials;
    rep.delta = cfg.delta;
    double slack = 0.0;
    for (const auto& o : outs) {
        if (o.violation) ++rep.violations;
        slack += o.slack;
    }
    rep.coverage = 1.0 - double(rep.violations) / double(trials);
    rep.mean_slack = slack / double(trials);
    return rep;
}

// ---- Convergence-rate study ----

struct RateResult {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0; // RMS residual of the log-log fit

    json to_json() const {
        return json{{"slope", slope}, {"intercept", intercept}, {"residual", residual}};
    }
};

// Least-squares slope of ln(value) against ln(n) over the grid.
inline RateResult rate_study(const std::function<double(double)>& value_at_n,
                             const std::vector<double>& n_grid) {
    if (n_grid.size() < 2) throw std::invalid_argument("rate_study: need >= 2 grid points");
    double span = *std::max_element(n_grid.begin(), n_grid.end()) /
                  *std::min_element(n_grid.begin(), n_grid.end());
    if (!(span > 1.0)) throw std::invalid_argument("rate_study: degenerate grid");

    std::vector<double> lx, ly;
    for (double n : n_grid) {
        double v = value_at_n(n);
        if (!(v > 0.0)) throw std::invalid_argument("rate_study: nonpositive value");
        lx.push_back(std::log(n));
        ly.push_back(std::log(v));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= double(lx.size());
    my /= double(ly.size());
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    RateResult r;
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        double e = ly[i] - (r.intercept + r.slope * lx[i]);
        ss += e * e;
    }
    r.residual = std::sqrt(ss / double(lx.size()));
    return r;
}

} // namespace swreg

#endif
