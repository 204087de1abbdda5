#ifndef SWREG_BOUNDS_HPP
#define SWREG_BOUNDS_HPP

#include "swreg/capacity.hpp"

namespace swreg {

// Empirical risk + control term + confidence term, raw and clamped at the
// trivial bound 1 (losses are <= 1 at M = 1/2).
struct BoundReport {
    double empirical_risk = 0.0;
    double control_term = 0.0;
    double confidence_term = 0.0;
    double raw_total = 0.0;
    double clamped_total = 0.0;
    std::string formula_id;
    json inputs;

    json to_json() const {
        return json{{"empirical_risk", empirical_risk},
                    {"control_term", control_term},
                    {"confidence_term", confidence_term},
                    {"raw_total", raw_total},
                    {"clamped_total", clamped_total},
                    {"formula_id", formula_id},
                    {"inputs", inputs}};
    }
};

inline double confidence_term(double delta, double n) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("confidence_term: delta must be in (0, 1)");
    if (n < 1) throw std::invalid_argument("confidence_term: n must be >= 1");
    return std::sqrt(std::log(1.0 / delta) / (2.0 * n));
}

inline BoundReport make_report(double emp, double control, double conf,
                               std::string formula_id, json inputs) {
    BoundReport r;
    r.empirical_risk = emp;
    r.control_term = control;
    r.confidence_term = conf;
    r.raw_total = emp + control + conf;
    r.clamped_total = std::min(r.raw_total, 1.0);
    r.formula_id = std::move(formula_id);
    r.inputs = std::move(inputs);
    return r;
}

// emp + 2 rad + sqrt(ln(1/delta) / 2n).
inline BoundReport risk_bound_general(double emp, double rad, double delta, double n) {
    if (rad < 0) throw std::invalid_argument("risk_bound_general: rad must be >= 0");
    return make_report(emp, 2.0 * rad, confidence_term(delta, n), "general-ln",
                       json{{"rad", rad}, {"delta", delta}, {"n", n}});
}

// emp + 2p rad(F) + sqrt(ln(1/delta) / 2n).
inline BoundReport risk_bound_lp(double emp, double rad_of_F, double p, double delta,
                                 double n) {
    if (p < 1) throw std::invalid_argument("risk_bound_lp: p must be >= 1");
    if (rad_of_F < 0) throw std::invalid_argument("risk_bound_lp: rad must be >= 0");
    return make_report(emp, 2.0 * p * rad_of_F, confidence_term(delta, n), "lp-ln",
                       json{{"rad", rad_of_F}, {"p", p}, {"delta", delta}, {"n", n}});
}

// emp + 2 p C R_x R_w / sqrt(n) + sqrt(ln(1/delta) / 2n). Kernel variant:
// pass R_H as R_w.
inline BoundReport risk_bound_switching_linear(double emp, double p, double C, double R_x,
                                               double R_w, double n, double delta) {
    if (p < 1) throw std::invalid_argument("risk_bound_switching_linear: p must be >= 1");
    if (C < 1) throw std::invalid_argument("risk_bound_switching_linear: C must be >= 1");
    double control = 2.0 * p * C * R_x * R_w / std::sqrt(n);
    return make_report(emp, control, confidence_term(delta, n), "switching-linear-ln",
                       json{{"p", p},
                            {"C", C},
                            {"R_x", R_x},
                            {"R_w", R_w},
                            {"n", n},
                            {"delta", delta}});
}

using EntropyFn = std::function<double(double)>;

// Finite chaining: D 2^{-N} + 6 D sum_{j=1..N} 2^{-j} sqrt(entropy(D 2^{-j}) / n).
inline double chain_finite(int N, const EntropyFn& entropy_at, double n, double D = 1.0) {
    if (N < 1) throw std::invalid_argument("chain_finite: N must be >= 1");
    if (n < 1) throw std::invalid_argument("chain_finite: n must be >= 1");
    double acc = std::ldexp(D, -N);
    for (int j = 1; j <= N; ++j) {
        double h = entropy_at(std::ldexp(D, -j));
        if (h < 0) throw std::invalid_argument("chain_finite: negative entropy");
        acc += 6.0 * D * std::ldexp(1.0, -j) * std::sqrt(h / n);
    }
    return acc;
}

// min over N in [1, Nmax] of chain_finite.
inline double chain_best(int Nmax, const EntropyFn& entropy_at, double n, double D = 1.0,
                         int* best_N = nullptr) {
    double best = std::numeric_limits<double>::infinity();
    for (int N = 1; N <= Nmax; ++N) {
        double v = chain_finite(N, entropy_at, n, D);
        if (v < best) {
            best = v;
            if (best_N) *best_N = N;
        }
    }
    return best;
}

struct IntegralChain {
    double value = 0.0;
    bool diverged = false;
};

namespace detail {

inline double simpson(const std::function<double(double)>& f, double a, double b,
                      double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double whole, double tol,
                               int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(f, a, m, fa, flm, fm);
    double right = simpson(f, m, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol) {
    double m = 0.5 * (a + b);
    double fa = f(a), fm = f(m), fb = f(b);
    double whole = simpson(f, a, b, fa, fm, fb);
    // Relative floor keeps large-magnitude segments from recursing to full depth.
    double t = std::max(tol, 1e-12 * std::abs(whole));
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, t, 40);
}

} // namespace detail

// Integral chaining: (12 / sqrt(n)) * integral_0^{D/2} sqrt(entropy(eps)) d eps.
// The integral is taken over dyadic segments shrinking toward 0; if the
// segment contributions fail to decay the integrand is flagged divergent.
inline IntegralChain chain_integral(const EntropyFn& entropy_at, double n, double D = 1.0) {
    if (n < 1) throw std::invalid_argument("chain_integral: n must be >= 1");
    auto integrand = [&](double eps) {
        double h = entropy_at(eps);
        return std::sqrt(std::max(h, 0.0));
    };
    IntegralChain out;
    double hi = D / 2.0;
    double total = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    int k = 0;
    for (; k < 600; ++k) {
        double lo = hi / 2.0;
        if (!std::isfinite(integrand(lo)) || !std::isfinite(integrand(hi))) {
            out.diverged = true;
            out.value = std::numeric_limits<double>::infinity();
            return out;
        }
        double seg = detail::integrate(integrand, lo, hi, 1e-10);
        if (!std::isfinite(seg)) {
            out.diverged = true;
            out.value = std::numeric_limits<double>::infinity();
            return out;
        }
        total += seg;
        if (total > 0.0 && seg < 1e-9 * total && seg <= prev) break;
        prev = seg;
        hi = lo;
    }
    if (k >= 600) out.diverged = true;
    out.value = 12.0 / std::sqrt(n) * total;
    return out;
}

// sum_{j=1..N} 2^{j (beta/2 - 1)}.
inline double dyadic_series(int N, double beta) {
    double acc = 0.0;
    for (int j = 1; j <= N; ++j) acc += std::pow(2.0, double(j) * (beta / 2.0 - 1.0));
    return acc;
}

inline int schedule_N_beta(double n, double beta) {
    return int(std::ceil(std::log2(std::pow(n, 1.0 / beta))));
}

inline int schedule_N_sqrt(double n) { return int(std::ceil(std::log2(std::sqrt(n)))); }

// Rademacher bound for PWS classes with a polynomial fat-shattering growth
// alpha eps^{-beta} over a linear-classifier partition.
//   beta = 2 : 1/sqrt(n) + 3 log2^{3/2}(4n) sqrt(C (d + 28*192^2 alpha) / n)
//   beta > 2 : n^{-1/beta} + 6 sqrt(C [d + 56*192^beta alpha / beta] log2(2^beta n) / n)
//              * 4^{beta/2-1} / (2^{beta/2-1} - 1) * n^{1/2 - 1/beta}
//   beta in [1,2) : direct dyadic sum with N = ceil(log2 n^{1/beta})
inline double rad_bound_pws_general(double C, double d, double alpha, double beta,
                                    double n) {
    if (beta < 1) throw std::invalid_argument("rad_bound_pws_general: beta must be >= 1");
    if (C < 1 || n < 1 || alpha < 0)
        throw std::invalid_argument("rad_bound_pws_general: bad parameters");
    if (beta == 2.0) {
        double l = std::log2(4.0 * n);
        double cap = C * (d + 28.0 * 192.0 * 192.0 * alpha) / n;
        return 1.0 / std::sqrt(n) + 3.0 * std::pow(l, 1.5) * std::sqrt(cap);
    }
    double cap = C * (d + 56.0 * std::pow(192.0, beta) * alpha / beta) *
                 std::log2(std::pow(2.0, beta) * n) / n;
    if (beta > 2.0) {
        double series = std::pow(4.0, beta / 2.0 - 1.0) /
                        (std::pow(2.0, beta / 2.0 - 1.0) - 1.0) *
                        std::pow(n, 0.5 - 1.0 / beta);
        return std::pow(n, -1.0 / beta) + 6.0 * std::sqrt(cap) * series;
    }
    // beta in [1, 2): pre-closed-form finite sum ("direct-sum").
    int N = schedule_N_beta(n, beta);
    return std::ldexp(1.0, -N) + 6.0 * std::sqrt(cap) * dyadic_series(N, beta);
}

// Kernel PWS classes: alpha = R_x^2 R_H^2, beta = 2.
inline double rad_bound_pws_kernel(double C, double d, double R_x, double R_H, double n) {
    return rad_bound_pws_general(C, d, R_x * R_x * R_H * R_H, 2.0, n);
}

struct PwaBound {
    double value = 0.0;   // schedule form with N = ceil(log2 sqrt(n))
    double relaxed = 0.0; // closed form 1/sqrt(n) + 6 sqrt(C d ln(6 (2+R_w) R_x n^{3/2}) / n)
    int N = 1;
};

// Piecewise affine classes over a linear-classifier partition.
inline PwaBound rad_bound_pwa(double C, double d, double R_x, double R_w, double n) {
    if (C < 1 || d < 1 || R_x <= 0 || R_w <= 0 || n < 1)
        throw std::invalid_argument("rad_bound_pwa: bad parameters");
    PwaBound b;
    b.N = schedule_N_sqrt(std::max(n, 2.0));
    b.value = std::ldexp(1.0, -b.N) +
              6.0 * std::sqrt(C * d / n *
                              std::log(3.0 * n * (2.0 + R_w) * R_x * std::ldexp(1.0, b.N)));
    b.relaxed = 1.0 / std::sqrt(n) +
                6.0 * std::sqrt(C * d *
                                std::log(6.0 * (2.0 + R_w) * R_x * std::pow(n, 1.5)) / n);
    return b;
}

// Chained switching bound for fat-polynomial component classes.
//   beta = 2 : 1/sqrt(n) + 26 p sqrt(alpha C / n) ln^2(5 p n)
//   beta > 2 : n^{-1/beta} + 3 * 2^{2 beta - 1} sqrt(6 alpha p^beta C)
//              / (2^{beta/2-1} - 1) * ln(4 e p n^{1/beta + 1}) / n^{1/beta}
//   beta in [1,2) : direct dyadic sum with N = ceil(log2 n^{1/beta})
inline double rad_bound_switching_fatpoly(double C, double p, double alpha, double beta,
                                          double n) {
    if (beta < 1)
        throw std::invalid_argument("rad_bound_switching_fatpoly: beta must be >= 1");
    if (C < 1 || p < 1 || alpha < 0 || n < 1)
        throw std::invalid_argument("rad_bound_switching_fatpoly: bad parameters");
    if (beta == 2.0) {
        double l = std::log(5.0 * p * n);
        return 1.0 / std::sqrt(n) + 26.0 * p * std::sqrt(alpha * C / n) * l * l;
    }
    if (beta > 2.0) {
        double num = 3.0 * std::pow(2.0, 2.0 * beta - 1.0) *
                     std::sqrt(6.0 * alpha * std::pow(p, beta) * C);
        double den = std::pow(2.0, beta / 2.0 - 1.0) - 1.0;
        double l = std::log(4.0 * std::exp(1.0) * p * std::pow(n, 1.0 / beta + 1.0));
        return std::pow(n, -1.0 / beta) + num / den * l / std::pow(n, 1.0 / beta);
    }
    int N = schedule_N_beta(n, beta);
    double l = std::log(2.0 * std::exp(1.0) * n * p * std::ldexp(1.0, N));
    return std::ldexp(1.0, -N) +
           6.0 * std::pow(2.0, beta) *
               std::sqrt(6.0 * alpha * std::pow(p, beta) * C / n) * l *
               dyadic_series(N, beta);
}

// Chained switching kernel bound:
// 1/sqrt(n) + 36 p R_x R_H log2(2 sqrt(n)) sqrt((C/n) ln(30 p R_x R_H n^{3/2})).
inline double rad_bound_switching_kernel(double C, double p, double R_x, double R_H,
                                         double n) {
    if (C < 1 || p < 1 || R_x <= 0 || R_H < 0 || n < 1)
        throw std::invalid_argument("rad_bound_switching_kernel: bad parameters");
    return 1.0 / std::sqrt(n) +
           36.0 * p * R_x * R_H * std::log2(2.0 * std::sqrt(n)) *
               std::sqrt(C / n * std::log(30.0 * p * R_x * R_H * std::pow(n, 1.5)));
}

// Closed-form chained switching linear bound:
// 12 p R_w R_x sqrt(ln(2/R_w + 1)) sqrt(C d / n).
inline double rad_bound_switching_linear_chained(double C, double d, double p, double R_x,
                                                 double R_w, double n) {
    if (C < 1 || d < 1 || p < 1 || R_x <= 0 || R_w <= 0 || n < 1)
        throw std::invalid_argument("rad_bound_switching_linear_chained: bad parameters");
    return 12.0 * p * R_w * R_x * std::sqrt(std::log(2.0 / R_w + 1.0)) *
           std::sqrt(C * d / n);
}

// Control terms of the two switching routes side by side (the chained route
// trades the linear C for sqrt(C d) or a log^{3/2} n factor).
struct RouteComparison {
    double direct = 0.0;  // 2 p C R / sqrt(n) control term
    double chained = 0.0; // chained Rademacher bound, doubled for the control term
};

inline RouteComparison compare_switching_linear_routes(double C, double d, double p,
                                                       double R_x, double R_w, double n) {
    RouteComparison r;
    r.direct = 2.0 * p * C * R_x * R_w / std::sqrt(n);
    r.chained = 2.0 * rad_bound_switching_linear_chained(C, d, p, R_x, R_w, n);
    return r;
}

inline RouteComparison compare_switching_kernel_routes(double C, double p, double R_x,
                                                       double R_H, double n) {
    RouteComparison r;
    r.direct = 2.0 * p * C * R_x * R_H / std::sqrt(n);
    r.chained = 2.0 * rad_bound_switching_kernel(C, p, R_x, R_H, n);
    return r;
}

// Candidate with minimal clamped total; ties go to the first listed.
inline BoundReport best_bound(const std::vector<BoundReport>& candidates) {
    if (candidates.empty()) throw std::invalid_argument("best_bound: empty candidate list");
    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i)
        if (candidates[i].clamped_total < candidates[best].clamped_total) best = i;
    return candidates[best];
}

} // namespace swreg

#endif
