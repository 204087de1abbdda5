#ifndef SWREG_LEARN_HPP
#define SWREG_LEARN_HPP

#include "swreg/models.hpp"
#include "swreg/parallel.hpp"
#include "swreg/rng.hpp"

namespace swreg {

struct FitOptions {
    int restarts = 10;
    int max_iters = 200;
    double tol = 1e-12; // objective decrease threshold
    std::uint64_t seed = 0;
    std::optional<double> norm_cap; // R_w (linear) or R_H (kernel)
    double ridge = 1e-10;           // trace-scaled jitter factor
};

struct FitResult {
    SwitchingModel model;
    double objective = 0.0; // clipped empirical switching risk on the training data
    std::vector<int> assignments;
    int iterations = 0;
    int restarts_used = 0;
    // Unclipped alternating objective was nonincreasing. Waived (reported
    // false) when norm projection perturbs the refit.
    bool monotone = true;
};

struct PwsFitResult {
    PwsModel model;
    double pws_risk = 0.0;       // clipped PWS empirical risk
    double switching_risk = 0.0; // stage-1 switching objective (lower)
    FitResult stage1;
};

namespace detail {

// Ridge solve (X^T X + lambda I) w = X^T y with trace-scaled jitter.
inline Vec ridge_solve(const std::vector<const Vec*>& xs, const std::vector<double>& ys,
                       Eigen::Index d, double ridge_factor) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
    Vec b = Vec::Zero(d);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        A.noalias() += (*xs[i]) * xs[i]->transpose();
        b.noalias() += ys[i] * (*xs[i]);
    }
    double lambda = ridge_factor * A.trace() / double(d);
    if (!(lambda > 0.0)) lambda = 1e-15;
    A.diagonal().array() += lambda;
    return A.ldlt().solve(b);
}

// Least-squares refit of all modes from an assignment. Empty modes get the
// currently worst-fit point.
inline std::vector<Vec> refit_modes(const Dataset& data, int C, std::vector<int>& assign,
                                    const std::vector<Vec>& prev_w, double ridge) {
    const Eigen::Index d = data.dim();
    std::vector<int> counts(std::size_t(C), 0);
    for (int a : assign) ++counts[std::size_t(a)];
    for (int k = 0; k < C; ++k) {
        if (counts[std::size_t(k)] > 0) continue;
        // Re-seed the empty mode with the point worst fit by its current mode.
        std::size_t worst = 0;
        double worst_res = -1.0;
        for (std::size_t i = 0; i < data.n(); ++i) {
            if (counts[std::size_t(assign[i])] <= 1) continue;
            double r = std::abs(data.ys[i] - prev_w[std::size_t(assign[i])].dot(data.xs[i]));
            if (r > worst_res) {
                worst_res = r;
                worst = i;
            }
        }
        --counts[std::size_t(assign[worst])];
        assign[worst] = k;
        ++counts[std::size_t(k)];
    }

    std::vector<Vec> W(static_cast<std::size_t>(C));
    for (int k = 0; k < C; ++k) {
        std::vector<const Vec*> xs;
        std::vector<double> ys;
        for (std::size_t i = 0; i < data.n(); ++i)
            if (assign[i] == k) {
                xs.push_back(&data.xs[i]);
                ys.push_back(data.ys[i]);
            }
        W[std::size_t(k)] = xs.empty() ? Vec::Zero(d) : ridge_solve(xs, ys, d, ridge);
    }
    return W;
}

inline double switching_objective_linear(const Dataset& data, const std::vector<Vec>& W) {
    double acc = 0.0;
    for (std::size_t i = 0; i < data.n(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& w : W) {
            double r = data.ys[i] - w.dot(data.xs[i]);
            best = std::min(best, r * r);
        }
        acc += best;
    }
    return acc / double(data.n());
}

inline SwitchingModel linear_model(const std::vector<Vec>& W, double M) {
    SwitchingModel m;
    m.M = M;
    for (const auto& w : W) m.components.push_back(ComponentFunction::linear(w));
    return m;
}

inline double model_objective(const SwitchingModel& m, const Dataset& data, double p) {
    std::vector<FunctionValues> fv(m.components.size(), FunctionValues(data.n()));
    for (std::size_t k = 0; k < m.components.size(); ++k)
        for (std::size_t i = 0; i < data.n(); ++i)
            fv[k][i] = clip(m.components[k].eval(data.xs[i]), m.M);
    return empirical_switching_risk(fv, data, LossParams{p});
}

} // namespace detail

// Alternating least squares over mode assignments, best of seeded random
// restarts. p = 2 only (the refit step is least squares).
inline FitResult fit_switching_linear(const Dataset& data, int C, const FitOptions& opts) {
    if (C < 1) throw std::invalid_argument("fit_switching_linear: C must be >= 1");
    if (data.n() == 0) throw std::invalid_argument("fit_switching_linear: empty dataset");
    if (std::size_t(C) > data.n())
        throw std::invalid_argument("fit_switching_linear: C > n");
    if (opts.restarts < 1 || opts.tol <= 0)
        throw std::invalid_argument("fit_switching_linear: bad options");

    const Eigen::Index d = data.dim();
    rng::Counter root(opts.seed);

    struct Run {
        std::vector<Vec> W;
        std::vector<int> assign;
        double objective = std::numeric_limits<double>::infinity();
        int iterations = 0;
        bool monotone = true;
    };
    std::vector<Run> runs(static_cast<std::size_t>(opts.restarts));

    parallel_for(std::size_t(opts.restarts), [&](std::size_t r) {
        rng::Counter g = root.split(r);
        Run run;
        run.assign.resize(data.n());
        for (auto& a : run.assign) a = int(g.next_below(std::uint64_t(C)));
        run.W.assign(std::size_t(C), Vec::Zero(d));

        double prev_obj = std::numeric_limits<double>::infinity();
        for (int it = 0; it < opts.max_iters; ++it) {
            run.W = detail::refit_modes(data, C, run.assign, run.W, opts.ridge);
            bool projected = false;
            if (opts.norm_cap) {
                for (auto& w : run.W) {
                    double norm = w.norm();
                    if (norm > *opts.norm_cap) {
                        w *= *opts.norm_cap / norm;
                        projected = true;
                    }
                }
            }
            // Assignment step: each point to its best mode, lowest index on ties.
            for (std::size_t i = 0; i < data.n(); ++i) {
                int best_k = 0;
                double best_r = std::numeric_limits<double>::infinity();
                for (int k = 0; k < C; ++k) {
                    double res = data.ys[i] - run.W[std::size_t(k)].dot(data.xs[i]);
                    if (res * res < best_r) {
                        best_r = res * res;
                        best_k = k;
                    }
                }
                run.assign[i] = best_k;
            }
            double obj = detail::switching_objective_linear(data, run.W);
            run.iterations = it + 1;
            if (obj > prev_obj + 1e-12 && !projected) run.monotone = false;
            if (prev_obj - obj < opts.tol) {
                prev_obj = obj;
                break;
            }
            prev_obj = obj;
        }
        run.objective = prev_obj;
        runs[r] = std::move(run);
    });

    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r)
        if (runs[r].objective < runs[best].objective) best = r;

    FitResult out;
    out.model = detail::linear_model(runs[best].W, data.M);
    out.assignments = runs[best].assign;
    out.iterations = runs[best].iterations;
    out.restarts_used = opts.restarts;
    out.monotone = runs[best].monotone && !opts.norm_cap;
    out.objective = detail::model_objective(out.model, data, 2.0);
    return out;
}

// Global ERM by enumeration of all C^n assignments. Oracle for tiny instances.
inline FitResult fit_switching_exact(const Dataset& data, int C, double ridge = 1e-10) {
    if (C < 1) throw std::invalid_argument("fit_switching_exact: C must be >= 1");
    const std::size_t n = data.n();
    if (n == 0) throw std::invalid_argument("fit_switching_exact: empty dataset");
    double combos = std::pow(double(C), double(n));
    if (combos > 2e6) throw std::length_error("fit_switching_exact: instance too large");

    const Eigen::Index d = data.dim();
    std::vector<int> assign(n, 0);
    std::vector<Vec> bestW;
    std::vector<int> best_assign;
    double best_obj = std::numeric_limits<double>::infinity();

    while (true) {
        std::vector<Vec> W(std::size_t(C), Vec::Zero(d));
        bool any = false;
        for (int k = 0; k < C; ++k) {
            std::vector<const Vec*> xs;
            std::vector<double> ys;
            for (std::size_t i = 0; i < n; ++i)
                if (assign[i] == k) {
                    xs.push_back(&data.xs[i]);
                    ys.push_back(data.ys[i]);
                }
            if (!xs.empty()) {
                W[std::size_t(k)] = detail::ridge_solve(xs, ys, d, ridge);
                any = true;
            }
        }
        if (any) {
            double obj = detail::switching_objective_linear(data, W);
            if (obj < best_obj) {
                best_obj = obj;
                bestW = W;
                best_assign = assign;
            }
        }
        // next assignment in base C
        std::size_t i = 0;
        while (i < n && ++assign[i] == C) assign[i++] = 0;
        if (i == n) break;
    }

    FitResult out;
    out.model = detail::linear_model(bestW, data.M);
    out.assignments = best_assign;
    out.restarts_used = 0;
    out.iterations = 0;
    out.objective = detail::model_objective(out.model, data, 2.0);
    return out;
}

// Alternating kernel ridge fit; dual coefficients scaled onto the RKHS ball
// when R_H is exceeded.
inline FitResult fit_switching_kernel(const Dataset& data, int C, const Kernel& kernel,
                                      std::optional<double> R_H, const FitOptions& opts) {
    if (C < 1) throw std::invalid_argument("fit_switching_kernel: C must be >= 1");
    if (data.n() == 0) throw std::invalid_argument("fit_switching_kernel: empty dataset");

    rng::Counter root(opts.seed);
    Eigen::MatrixXd G = gram_matrix(kernel, data.xs);
    {
        // Symmetric PSD sanity: smallest eigenvalue within jitter tolerance.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, G.trace()))
            throw std::runtime_error("fit_switching_kernel: Gram matrix not PSD");
    }

    struct Run {
        std::vector<ComponentFunction> comps;
        std::vector<int> assign;
        double objective = std::numeric_limits<double>::infinity();
        int iterations = 0;
        bool monotone = true;
    };
    std::vector<Run> runs(static_cast<std::size_t>(opts.restarts));

    auto eval_all = [&](const std::vector<ComponentFunction>& comps,
                        std::vector<std::vector<double>>& preds) {
        preds.assign(comps.size(), std::vector<double>(data.n(), 0.0));
        for (std::size_t k = 0; k < comps.size(); ++k)
            for (std::size_t i = 0; i < data.n(); ++i)
                preds[k][i] = comps[k].eval(data.xs[i]);
    };

    parallel_for(std::size_t(opts.restarts), [&](std::size_t r) {
        rng::Counter g = root.split(r);
        Run run;
        run.assign.resize(data.n());
        for (auto& a : run.assign) a = int(g.next_below(std::uint64_t(C)));

        double prev_obj = std::numeric_limits<double>::infinity();
        for (int it = 0; it < opts.max_iters; ++it) {
            // Refit each mode by kernel ridge on its points.
            run.comps.clear();
            bool projected = false;
            for (int k = 0; k < C; ++k) {
                std::vector<std::size_t> idx;
                for (std::size_t i = 0; i < data.n(); ++i)
                    if (run.assign[i] == k) idx.push_back(i);
                if (idx.empty()) {
                    run.comps.push_back(ComponentFunction::kernel_expansion({}, Vec(0), kernel));
                    continue;
                }
                Eigen::MatrixXd Gk(idx.size(), idx.size());
                Vec yk(Eigen::Index(idx.size()));
                for (std::size_t a = 0; a < idx.size(); ++a) {
                    yk[Eigen::Index(a)] = data.ys[idx[a]];
                    for (std::size_t b = 0; b < idx.size(); ++b)
                        Gk(Eigen::Index(a), Eigen::Index(b)) =
                            G(Eigen::Index(idx[a]), Eigen::Index(idx[b]));
                }
                double lambda = opts.ridge * Gk.trace() / double(idx.size());
                if (!(lambda > 0.0)) lambda = 1e-15;
                Eigen::MatrixXd reg = Gk;
                reg.diagonal().array() += lambda;
                Vec alpha = reg.ldlt().solve(yk);
                std::vector<Vec> support;
                for (std::size_t i : idx) support.push_back(data.xs[i]);
                auto comp = ComponentFunction::kernel_expansion(std::move(support),
                                                               std::move(alpha), kernel);
                if (R_H) {
                    double norm = rkhs_norm(comp);
                    if (norm > *R_H) {
                        auto& ke = std::get<ComponentFunction::KernelExpansion>(comp.fn);
                        ke.alpha *= *R_H / norm;
                        projected = true;
                    }
                }
                run.comps.push_back(std::move(comp));
            }

            std::vector<std::vector<double>> preds;
            eval_all(run.comps, preds);
            for (std::size_t i = 0; i < data.n(); ++i) {
                int best_k = 0;
                double best_r = std::numeric_limits<double>::infinity();
                for (int k = 0; k < C; ++k) {
                    double res = data.ys[i] - preds[std::size_t(k)][i];
                    if (res * res < best_r) {
                        best_r = res * res;
                        best_k = k;
                    }
                }
                run.assign[i] = best_k;
            }
            double obj = 0.0;
            for (std::size_t i = 0; i < data.n(); ++i) {
                double best = std::numeric_limits<double>::infinity();
                for (int k = 0; k < C; ++k) {
                    double res = data.ys[i] - preds[std::size_t(k)][i];
                    best = std::min(best, res * res);
                }
                obj += best;
            }
            obj /= double(data.n());
            run.iterations = it + 1;
            if (obj > prev_obj + 1e-12 && !projected) run.monotone = false;
            if (prev_obj - obj < opts.tol) {
                prev_obj = obj;
                break;
            }
            prev_obj = obj;
        }
        run.objective = prev_obj;
        runs[r] = std::move(run);
    });

    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r)
        if (runs[r].objective < runs[best].objective) best = r;

    FitResult out;
    out.model.M = data.M;
    out.model.components = runs[best].comps;
    out.assignments = runs[best].assign;
    out.iterations = runs[best].iterations;
    out.restarts_used = opts.restarts;
    out.monotone = runs[best].monotone && !R_H;
    out.objective = detail::model_objective(out.model, data, 2.0);
    return out;
}

// Three stages: switching fit, one-vs-rest linear classifier on the resulting
// labels, one classifier-consistent mode refit.
inline PwsFitResult fit_pws(const Dataset& data, int C, const FitOptions& opts) {
    PwsFitResult out;
    out.stage1 = fit_switching_linear(data, C, opts);
    out.switching_risk = out.stage1.objective;

    const Eigen::Index d = data.dim();
    // One-vs-rest least-squares surrogate for the mode labels.
    LinearClassifier cls;
    for (int k = 0; k < C; ++k) {
        std::vector<const Vec*> xs;
        std::vector<double> ts;
        for (std::size_t i = 0; i < data.n(); ++i) {
            xs.push_back(&data.xs[i]);
            ts.push_back(out.stage1.assignments[i] == k ? 1.0 : -1.0);
        }
        cls.W.push_back(detail::ridge_solve(xs, ts, d, 1e-8));
    }

    // Stage 3: reassign by the classifier, refit modes once.
    std::vector<int> assign(data.n());
    for (std::size_t i = 0; i < data.n(); ++i) assign[i] = classify(cls, data.xs[i]);
    std::vector<Vec> W(std::size_t(C), Vec::Zero(d));
    for (int k = 0; k < C; ++k) {
        std::vector<const Vec*> xs;
        std::vector<double> ys;
        for (std::size_t i = 0; i < data.n(); ++i)
            if (assign[i] == k) {
                xs.push_back(&data.xs[i]);
                ys.push_back(data.ys[i]);
            }
        if (!xs.empty()) W[std::size_t(k)] = detail::ridge_solve(xs, ys, d, opts.ridge);
    }

    out.model.M = data.M;
    out.model.classifier = cls;
    for (const auto& w : W) out.model.components.push_back(ComponentFunction::linear(w));

    double acc = 0.0;
    for (std::size_t i = 0; i < data.n(); ++i) {
        double r = data.ys[i] - predict_pws(out.model, data.xs[i]);
        acc += r * r;
    }
    out.pws_risk = acc / double(data.n());
    return out;
}

// Empirical risk of a saved model on a dataset (clipped predictions).
inline double model_empirical_risk(const SwitchingModel& m, const Dataset& data, double p) {
    return detail::model_objective(m, data, p);
}

inline double model_empirical_risk(const PwsModel& m, const Dataset& data, double p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < data.n(); ++i)
        acc += std::pow(std::abs(data.ys[i] - predict_pws(m, data.xs[i])), p);
    return acc / double(data.n());
}

} // namespace swreg

#endif
