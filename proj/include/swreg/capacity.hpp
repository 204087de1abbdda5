#ifndef SWREG_CAPACITY_HPP
#define SWREG_CAPACITY_HPP

#include <functional>
#include <optional>

#include "swreg/models.hpp"
#include "swreg/parallel.hpp"
#include "swreg/rng.hpp"

namespace swreg {

// Description of a component function class, used by capacity evaluators.
struct ComponentClassSpec {
    struct Linear {
        int d = 1;
        double R_x = 1.0;
        double R_w = 1.0;
    };
    struct KernelBall {
        double R_x = 1.0;
        double R_H = 1.0;
        Kernel kernel = Kernel::linear(); // needed for Gram-based computations
    };
    struct FatPoly {
        double alpha = 1.0; // d_F(eps) <= alpha * eps^{-beta}
        double beta = 2.0;
    };

    std::variant<Linear, KernelBall, FatPoly> v;

    static ComponentClassSpec linear(int d, double R_x, double R_w) {
        if (d < 1 || R_x <= 0 || R_w < 0)
            throw std::invalid_argument("ComponentClassSpec::linear: bad parameters");
        return {Linear{d, R_x, R_w}};
    }
    static ComponentClassSpec kernel(double R_x, double R_H, Kernel k) {
        if (R_x <= 0 || R_H < 0)
            throw std::invalid_argument("ComponentClassSpec::kernel: bad parameters");
        return {KernelBall{R_x, R_H, k}};
    }
    static ComponentClassSpec fat_poly(double alpha, double beta) {
        if (alpha <= 0 || beta < 1)
            throw std::invalid_argument("ComponentClassSpec::fat_poly: bad parameters");
        return {FatPoly{alpha, beta}};
    }
};

// A named capacity value, with the formula used and its evaluation point.
struct CapacityReport {
    std::string kind; // rademacher | fat | entropy | growth | cover
    double value = 0.0;
    std::optional<double> epsilon;
    std::optional<long> n;
    std::string formula_id;

    json to_json() const {
        json j{{"kind", kind}, {"value", value}, {"formula_id", formula_id}};
        if (epsilon) j["epsilon"] = *epsilon;
        if (n) j["n"] = *n;
        return j;
    }
};

// A finite class: each function is its value row on a fixed sample.
struct FiniteClass {
    std::vector<FunctionValues> rows;

    std::size_t size() const { return rows.size(); }
    std::size_t sample_size() const { return rows.empty() ? 0 : rows.front().size(); }

    void check() const {
        for (const auto& r : rows)
            if (r.size() != sample_size())
                throw std::invalid_argument("FiniteClass: ragged rows");
    }

    double diameter(QNorm q) const {
        double D = 0.0;
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = i + 1; j < rows.size(); ++j)
                D = std::max(D, pseudo_metric(rows[i], rows[j], q));
        return D;
    }
};

// ---- Rademacher complexity ----

struct McEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    long draws = 0;
    std::uint64_t seed = 0;
};

// Per-draw supremum for a norm ball: sup (1/n) sum sigma_i f(x_i)
// = (R/n) ||sum sigma_i phi(x_i)||  (Cauchy-Schwarz; attained on the sphere).
inline double sup_correlation(const ComponentClassSpec& spec, const std::vector<Vec>& xs,
                              const std::vector<int>& signs,
                              const Eigen::MatrixXd* gram) {
    const std::size_t n = xs.size();
    if (const auto* lin = std::get_if<ComponentClassSpec::Linear>(&spec.v)) {
        Vec acc = Vec::Zero(xs.front().size());
        for (std::size_t i = 0; i < n; ++i) acc += double(signs[i]) * xs[i];
        return lin->R_w * acc.norm() / double(n);
    }
    if (const auto* kb = std::get_if<ComponentClassSpec::KernelBall>(&spec.v)) {
        // sigma^T G sigma via the Gram matrix of the kernel feature map.
        double quad = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                quad += double(signs[i]) * double(signs[j]) *
                        (*gram)(Eigen::Index(i), Eigen::Index(j));
        return kb->R_H * std::sqrt(std::max(quad, 0.0)) / double(n);
    }
    throw std::invalid_argument("sup_correlation: FatPoly has no sample supremum");
}

// Monte Carlo estimate of the empirical Rademacher complexity of a Linear or
// Kernel ball class on the sample xs. Deterministic given seed; draws run in
// parallel and are summed in draw order.
inline McEstimate rademacher_mc(const ComponentClassSpec& spec, const std::vector<Vec>& xs,
                                long draws, std::uint64_t seed) {
    if (draws < 1) throw std::invalid_argument("rademacher_mc: draws must be >= 1");
    if (xs.empty()) throw std::invalid_argument("rademacher_mc: empty sample");

    std::optional<Eigen::MatrixXd> gram;
    if (const auto* kb = std::get_if<ComponentClassSpec::KernelBall>(&spec.v))
        gram = gram_matrix(kb->kernel, xs);

    rng::Counter root(seed);
    std::vector<double> sups(static_cast<std::size_t>(draws));
    parallel_for(std::size_t(draws), [&](std::size_t t) {
        rng::Counter g = root.split(t);
        std::vector<int> signs(xs.size());
        for (auto& s : signs) s = g.next_sign();
        sups[t] = sup_correlation(spec, xs, signs, gram ? &*gram : nullptr);
    });

    double sum = 0.0, sq = 0.0;
    for (double v : sups) {
        sum += v;
        sq += v * v;
    }
    McEstimate est;
    est.mean = sum / double(draws);
    double var = std::max(0.0, sq / double(draws) - est.mean * est.mean);
    est.stderr_ = (draws > 1) ? std::sqrt(var / double(draws - 1)) : 0.0;
    est.draws = draws;
    est.seed = seed;
    return est;
}

// Exact empirical Rademacher complexity of a finite class: full 2^n sign
// enumeration. Oracle for tests; n <= 20.
inline double rademacher_exact(const FiniteClass& fc) {
    fc.check();
    const std::size_t n = fc.sample_size();
    if (n == 0 || fc.rows.empty())
        throw std::invalid_argument("rademacher_exact: empty class or sample");
    if (n > 20) throw std::length_error("rademacher_exact: n too large for enumeration");
    const std::uint64_t total = 1ull << n;
    double acc = 0.0;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& row : fc.rows) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                s += ((mask >> i) & 1u) ? row[i] : -row[i];
            best = std::max(best, s);
        }
        acc += best / double(n);
    }
    return acc / double(total);
}

// Exact empirical Rademacher complexity of a Linear/Kernel ball class via
// full sign enumeration with the closed-form per-draw supremum. n <= 20.
inline double rademacher_ball_exact(const ComponentClassSpec& spec,
                                    const std::vector<Vec>& xs) {
    const std::size_t n = xs.size();
    if (n == 0) throw std::invalid_argument("rademacher_ball_exact: empty sample");
    if (n > 20) throw std::length_error("rademacher_ball_exact: n too large");
    std::optional<Eigen::MatrixXd> gram;
    if (const auto* kb = std::get_if<ComponentClassSpec::KernelBall>(&spec.v))
        gram = gram_matrix(kb->kernel, xs);
    const std::uint64_t total = 1ull << n;
    std::vector<int> signs(n);
    double acc = 0.0;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        for (std::size_t i = 0; i < n; ++i) signs[i] = ((mask >> i) & 1u) ? 1 : -1;
        acc += sup_correlation(spec, xs, signs, gram ? &*gram : nullptr);
    }
    return acc / double(total);
}

// ---- Closed-form capacity bounds ----
// formula_id suffix "-ln" marks natural log, "-log2" marks base-2 logs where
// the source formula uses them.

// R_x R_w / sqrt(n). Kernel case: R_w := R_H, R_x := sup sqrt(K(x,x)).
inline double rademacher_linear_bound(double R_x, double R_w, double n) {
    if (R_x <= 0 || R_w < 0 || n < 1)
        throw std::invalid_argument("rademacher_linear_bound: bad parameters");
    return R_x * R_w / std::sqrt(n);
}

// floor((R_x R_w / eps)^2).
inline long fat_shattering_linear(double R_x, double R_w, double eps) {
    if (eps <= 0) throw std::invalid_argument("fat_shattering_linear: eps must be > 0");
    return long(std::floor(std::pow(R_x * R_w / eps, 2.0)));
}

// log Pi_G(n) <= C d ln(3n) for linear classifiers (C >= 2, d >= 2).
inline double growth_linear_classifiers(long C, long d, double n) {
    if (C < 2 || d < 2 || n < 1)
        throw std::invalid_argument("growth_linear_classifiers: need C>=2, d>=2, n>=1");
    return double(C) * double(d) * std::log(3.0 * n);
}

// d_G ln(n e C / (2 d_G)).
inline double growth_natarajan(double n, double C, double d_G) {
    if (d_G < 1) throw std::invalid_argument("growth_natarajan: d_G must be >= 1");
    return d_G * std::log(n * std::exp(1.0) * C / (2.0 * d_G));
}

using FatFn = std::function<long(double)>;

// ln of the L_inf uniform covering bound from the fat-shattering dimension:
// ln 2 + d(eps/4) * log2(4 M e n / (d(eps/4) eps)) * ln(16 M^2 n / eps^2).
// d = 0 means the class is eps-trivial and the entropy is 0.
inline double entropy_inf_fat(double eps, double n, const FatFn& fat_at, double M = 0.5) {
    if (!(eps > 0.0) || eps > 2.0 * M || n < 1)
        throw std::invalid_argument("entropy_inf_fat: eps outside (0, 2M] or n < 1");
    long d = fat_at(eps / 4.0);
    if (d <= 0) return 0.0;
    double exponent = double(d) * std::log2(4.0 * M * std::exp(1.0) * n / (double(d) * eps));
    return std::log(2.0) + exponent * std::log(16.0 * M * M * n / (eps * eps));
}

// Dimension-free L2 entropy: 20 d(eps/96) ln(13 M / eps). Independent of n.
inline double entropy_l2_dimfree(double eps, const FatFn& fat_at, double M = 0.5) {
    if (!(eps > 0.0) || eps > 2.0 * M)
        throw std::invalid_argument("entropy_l2_dimfree: eps outside (0, 2M]");
    long d = fat_at(eps / 96.0);
    if (d <= 0) return 0.0;
    return 20.0 * double(d) * std::log(13.0 * M / eps);
}

// d ln((2 + R_w) R_x / eps) for linear classes in R^d; 0 above the diameter.
inline double entropy_inf_linear_finite_d(double eps, long d, double R_x, double R_w) {
    if (eps <= 0) throw std::invalid_argument("entropy_inf_linear_finite_d: eps must be > 0");
    if (eps > R_x * R_w) return 0.0;
    return double(d) * std::log((2.0 + R_w) * R_x / eps);
}

// 36 (R_x R_H / eps)^2 ln(15 R_x R_H n / eps); 0 for eps >= R_x R_H.
inline double entropy_inf_kernel(double eps, double R_x, double R_H, double n) {
    if (eps <= 0) throw std::invalid_argument("entropy_inf_kernel: eps must be > 0");
    if (n < 1) throw std::invalid_argument("entropy_inf_kernel: n must be >= 1");
    double r = R_x * R_H;
    if (eps >= r) return 0.0;
    double ratio = r / eps;
    return 36.0 * ratio * ratio * std::log(15.0 * r * n / eps);
}

enum class PwsEntropyVariant { prop1, prop2 };

// Metric entropy of a PWS class:
//   prop1: classifier_entropy + 6 C d_F(eps/4)  ln^2(2 e n / eps)
//   prop2: classifier_entropy + 20 C d_F(eps/96) ln(7 / eps)
// classifier_entropy is the d_G term (e.g. growth_natarajan(n, C, d_G)).
inline double entropy_pws(double eps, double n, double C, double classifier_entropy,
                          const FatFn& fat_at, PwsEntropyVariant variant) {
    if (!(eps > 0.0) || eps > 1.0)
        throw std::invalid_argument("entropy_pws: eps outside (0, 1]");
    if (variant == PwsEntropyVariant::prop1) {
        long d = fat_at(eps / 4.0);
        double l = std::log(2.0 * std::exp(1.0) * n / eps);
        return classifier_entropy + 6.0 * C * double(d) * l * l;
    }
    long d = fat_at(eps / 96.0);
    return classifier_entropy + 20.0 * C * double(d) * std::log(7.0 / eps);
}

enum class PwsDecomposition { lq_rescale, l2_uniform };

// Component entropy callback: (eps, mode index) -> metric entropy.
using ComponentEntropyFn = std::function<double(double, int)>;

// Entropy of a PWS class from the classifier growth and component entropies.
//   lq_rescale: log_growth + sum_k H_k(eps / C^{1/q})
//   l2_uniform: log_growth + sum_k H_k(eps)   (uniform L2 covers, no rescale)
inline double entropy_decompose_pws(double eps, QNorm q, int C, double log_growth,
                                    const ComponentEntropyFn& component_entropy_at,
                                    PwsDecomposition mode) {
    if (eps <= 0) throw std::invalid_argument("entropy_decompose_pws: eps must be > 0");
    if (C < 1) throw std::invalid_argument("entropy_decompose_pws: C must be >= 1");
    double scale = (mode == PwsDecomposition::lq_rescale) ? eps / q.root_of(double(C)) : eps;
    double acc = log_growth;
    for (int k = 0; k < C; ++k) acc += component_entropy_at(scale, k);
    return acc;
}

// Entropy of the switching loss class: sum_k H_k(eps / (p C^{1/q})).
inline double entropy_decompose_switching(double eps, QNorm q, double p, int C,
                                          const ComponentEntropyFn& component_entropy_at) {
    if (eps <= 0) throw std::invalid_argument("entropy_decompose_switching: eps must be > 0");
    if (p < 1) throw std::invalid_argument("entropy_decompose_switching: p must be >= 1");
    if (C < 1) throw std::invalid_argument("entropy_decompose_switching: C must be >= 1");
    double scale = eps / (p * q.root_of(double(C)));
    double acc = 0.0;
    for (int k = 0; k < C; ++k) acc += component_entropy_at(scale, k);
    return acc;
}

// ---- Empirical nets on finite classes ----
// Covering uses proper nets and the strict condition rho(f, H) < eps.

inline bool covers(const FiniteClass& fc, const std::vector<std::size_t>& net, double eps,
                   QNorm q) {
    for (const auto& row : fc.rows) {
        bool hit = false;
        for (std::size_t c : net)
            if (pseudo_metric(row, fc.rows[c], q) < eps) {
                hit = true;
                break;
            }
        if (!hit) return false;
    }
    return true;
}

// Greedy proper eps-net: repeatedly add the first uncovered row as a center.
inline std::vector<std::size_t> greedy_net(const FiniteClass& fc, double eps, QNorm q) {
    fc.check();
    if (fc.rows.empty()) throw std::invalid_argument("greedy_net: empty class");
    if (eps <= 0) throw std::invalid_argument("greedy_net: eps must be > 0");
    std::vector<std::size_t> net;
    std::vector<bool> covered(fc.rows.size(), false);
    for (std::size_t i = 0; i < fc.rows.size(); ++i) {
        if (covered[i]) continue;
        net.push_back(i);
        for (std::size_t j = i; j < fc.rows.size(); ++j)
            if (!covered[j] && pseudo_metric(fc.rows[i], fc.rows[j], q) < eps)
                covered[j] = true;
    }
    return net;
}

// Minimum proper eps-net size by exhaustive subset search. |fc| <= 20.
inline std::size_t exact_min_cover(const FiniteClass& fc, double eps, QNorm q) {
    fc.check();
    if (fc.rows.empty()) throw std::invalid_argument("exact_min_cover: empty class");
    if (eps <= 0) throw std::invalid_argument("exact_min_cover: eps must be > 0");
    const std::size_t m = fc.rows.size();
    if (m > 20) throw std::length_error("exact_min_cover: class too large");

    // Pairwise coverage bitmasks: bit j of mask[i] <=> row j within eps of row i.
    std::vector<std::uint32_t> mask(m, 0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (pseudo_metric(fc.rows[i], fc.rows[j], q) < eps)
                mask[i] |= (1u << j);

    const std::uint32_t all = (m == 32) ? ~0u : ((1u << m) - 1u);
    std::size_t best = greedy_net(fc, eps, q).size();
    // Search all center subsets; prune by popcount against the incumbent.
    for (std::uint32_t s = 1; s <= all; ++s) {
        auto pc = std::size_t(__builtin_popcount(s));
        if (pc >= best) continue;
        std::uint32_t cov = 0;
        for (std::size_t i = 0; i < m; ++i)
            if (s & (1u << i)) cov |= mask[i];
        if (cov == all) best = pc;
    }
    return best;
}

// ---- Finite composite families (test substrate for the decompositions) ----

// PWS family: every (classification, component choice) combination.
// classifications: rows of mode labels in [0, C); components[k]: finite class
// for mode k. Row i of a member is components[a_i][choice_{a_i}][i].
inline FiniteClass make_pws_family(const std::vector<std::vector<int>>& classifications,
                                   const std::vector<FiniteClass>& components) {
    if (classifications.empty() || components.empty())
        throw std::invalid_argument("make_pws_family: empty inputs");
    const std::size_t n = classifications.front().size();
    const std::size_t C = components.size();
    std::vector<std::size_t> idx(C, 0);
    FiniteClass out;
    for (const auto& cls : classifications) {
        if (cls.size() != n) throw std::invalid_argument("make_pws_family: ragged labels");
        std::fill(idx.begin(), idx.end(), 0);
        while (true) {
            FunctionValues row(n);
            for (std::size_t i = 0; i < n; ++i) {
                int k = cls[i];
                row[i] = components[std::size_t(k)].rows[idx[std::size_t(k)]][i];
            }
            out.rows.push_back(std::move(row));
            std::size_t k = 0;
            while (k < C && ++idx[k] == components[k].rows.size()) idx[k++] = 0;
            if (k == C) break;
        }
    }
    return out;
}

// Pointwise minimum over one function from each component class.
inline FiniteClass make_pointwise_min_family(const std::vector<FiniteClass>& components) {
    if (components.empty())
        throw std::invalid_argument("make_pointwise_min_family: empty inputs");
    const std::size_t n = components.front().sample_size();
    const std::size_t C = components.size();
    std::vector<std::size_t> idx(C, 0);
    FiniteClass out;
    while (true) {
        FunctionValues row(n, std::numeric_limits<double>::infinity());
        for (std::size_t k = 0; k < C; ++k)
            for (std::size_t i = 0; i < n; ++i)
                row[i] = std::min(row[i], components[k].rows[idx[k]][i]);
        out.rows.push_back(std::move(row));
        std::size_t k = 0;
        while (k < C && ++idx[k] == components[k].rows.size()) idx[k++] = 0;
        if (k == C) break;
    }
    return out;
}

} // namespace swreg

#endif
