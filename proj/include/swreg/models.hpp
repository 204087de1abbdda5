#ifndef SWREG_MODELS_HPP
#define SWREG_MODELS_HPP

#include <nlohmann/json.hpp>
#include <variant>

#include "swreg/core.hpp"

namespace swreg {

using nlohmann::json;

// Built-in kernels. Serialized by name + parameters.
struct Kernel {
    enum class Type { gaussian, polynomial };

    Type type = Type::gaussian;
    double bandwidth = 1.0; // gaussian
    int degree = 2;         // polynomial
    double offset = 1.0;    // polynomial

    static Kernel gaussian(double bandwidth) {
        Kernel k;
        k.type = Type::gaussian;
        k.bandwidth = bandwidth;
        return k;
    }
    static Kernel polynomial(int degree, double offset) {
        Kernel k;
        k.type = Type::polynomial;
        k.degree = degree;
        k.offset = offset;
        return k;
    }
    // <x,y>^1 with zero offset; used to cross-check against the linear learner.
    static Kernel linear() { return polynomial(1, 0.0); }

    double operator()(const Vec& a, const Vec& b) const {
        switch (type) {
        case Type::gaussian: {
            double s = (a - b).squaredNorm();
            return std::exp(-s / (2.0 * bandwidth * bandwidth));
        }
        case Type::polynomial:
            return std::pow(a.dot(b) + offset, double(degree));
        }
        return 0.0;
    }

    json to_json() const {
        if (type == Type::gaussian)
            return json{{"name", "gaussian"}, {"bandwidth", bandwidth}};
        return json{{"name", "polynomial"}, {"degree", degree}, {"offset", offset}};
    }
    static Kernel from_json(const json& j) {
        std::string name = j.at("name");
        if (name == "gaussian") return gaussian(j.at("bandwidth"));
        if (name == "polynomial") return polynomial(j.at("degree"), j.at("offset"));
        throw std::invalid_argument("Kernel::from_json: unknown kernel " + name);
    }
};

inline Eigen::MatrixXd gram_matrix(const Kernel& k, const std::vector<Vec>& pts) {
    const Eigen::Index m = Eigen::Index(pts.size());
    Eigen::MatrixXd G(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = i; j < m; ++j)
            G(i, j) = G(j, i) = k(pts[std::size_t(i)], pts[std::size_t(j)]);
    return G;
}

// g(x) = argmax_k <w_k, x>.
struct LinearClassifier {
    std::vector<Vec> W;

    int modes() const { return int(W.size()); }
    Eigen::Index dim() const { return W.empty() ? 0 : W.front().size(); }
};

// Lowest index attaining the maximum inner product.
inline int classify(const LinearClassifier& g, const Vec& x) {
    if (g.W.empty()) throw std::invalid_argument("classify: empty classifier");
    if (g.W.front().size() != x.size())
        throw std::invalid_argument("classify: dimension mismatch");
    int best = 0;
    double best_val = g.W[0].dot(x);
    for (int k = 1; k < g.modes(); ++k) {
        double v = g.W[std::size_t(k)].dot(x);
        if (v > best_val) {
            best_val = v;
            best = k;
        }
    }
    return best;
}

// A component function: either <w, x> or a kernel expansion sum_j alpha_j K(s_j, .).
struct ComponentFunction {
    struct Linear {
        Vec w;
    };
    struct KernelExpansion {
        std::vector<Vec> support;
        Vec alpha;
        Kernel kernel;
    };

    std::variant<Linear, KernelExpansion> fn;

    static ComponentFunction linear(Vec w) { return {Linear{std::move(w)}}; }
    static ComponentFunction kernel_expansion(std::vector<Vec> support, Vec alpha,
                                              Kernel k) {
        return {KernelExpansion{std::move(support), std::move(alpha), k}};
    }

    bool is_linear() const { return std::holds_alternative<Linear>(fn); }

    double eval(const Vec& x) const {
        if (const auto* lin = std::get_if<Linear>(&fn)) {
            if (lin->w.size() != x.size())
                throw std::invalid_argument("ComponentFunction: dimension mismatch");
            return lin->w.dot(x);
        }
        const auto& ke = std::get<KernelExpansion>(fn);
        double acc = 0.0;
        for (std::size_t j = 0; j < ke.support.size(); ++j) {
            if (ke.support[j].size() != x.size())
                throw std::invalid_argument("ComponentFunction: dimension mismatch");
            acc += ke.alpha[Eigen::Index(j)] * ke.kernel(ke.support[j], x);
        }
        return acc;
    }
};

// sqrt(alpha^T K alpha) for a kernel expansion.
inline double rkhs_norm(const ComponentFunction& c) {
    const auto* ke = std::get_if<ComponentFunction::KernelExpansion>(&c.fn);
    if (!ke) throw std::invalid_argument("rkhs_norm: not a kernel expansion");
    if (ke->support.empty()) return 0.0;
    Eigen::MatrixXd G = gram_matrix(ke->kernel, ke->support);
    double quad = ke->alpha.dot(G * ke->alpha);
    double tol = 1e-10 * std::max(1.0, G.trace());
    if (quad < -tol) throw std::runtime_error("rkhs_norm: Gram matrix not PSD");
    return std::sqrt(std::max(quad, 0.0));
}

// f(x) = clip(f_{g(x)}(x), M).
struct PwsModel {
    LinearClassifier classifier;
    std::vector<ComponentFunction> components;
    double M = 0.5;
};

// f(x) = (clip(f_k(x), M))_k.
struct SwitchingModel {
    std::vector<ComponentFunction> components;
    double M = 0.5;
};

inline double predict_pws(const PwsModel& m, const Vec& x) {
    if (m.classifier.modes() != int(m.components.size()))
        throw std::invalid_argument("predict_pws: classifier/component count mismatch");
    int k = classify(m.classifier, x);
    return clip(m.components[std::size_t(k)].eval(x), m.M);
}

inline std::vector<double> predict_switching(const SwitchingModel& m, const Vec& x) {
    if (m.components.empty())
        throw std::invalid_argument("predict_switching: no components");
    std::vector<double> out;
    out.reserve(m.components.size());
    for (const auto& c : m.components) out.push_back(clip(c.eval(x), m.M));
    return out;
}

// ---- JSON serialization, round-trip stable ----

inline json to_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

inline Vec vec_from_json(const json& a) {
    Vec v(Eigen::Index(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) v[Eigen::Index(i)] = a[i];
    return v;
}

inline json to_json(const ComponentFunction& c) {
    if (const auto* lin = std::get_if<ComponentFunction::Linear>(&c.fn))
        return json{{"kind", "linear"}, {"w", to_json(lin->w)}};
    const auto& ke = std::get<ComponentFunction::KernelExpansion>(c.fn);
    json support = json::array();
    for (const auto& s : ke.support) support.push_back(to_json(s));
    return json{{"kind", "kernel"},
                {"support", support},
                {"alpha", to_json(ke.alpha)},
                {"kernel", ke.kernel.to_json()}};
}

inline ComponentFunction component_from_json(const json& j) {
    std::string kind = j.at("kind");
    if (kind == "linear") return ComponentFunction::linear(vec_from_json(j.at("w")));
    if (kind == "kernel") {
        std::vector<Vec> support;
        for (const auto& s : j.at("support")) support.push_back(vec_from_json(s));
        return ComponentFunction::kernel_expansion(std::move(support),
                                                   vec_from_json(j.at("alpha")),
                                                   Kernel::from_json(j.at("kernel")));
    }
    throw std::invalid_argument("component_from_json: unknown kind " + kind);
}

inline json to_json(const SwitchingModel& m) {
    json comps = json::array();
    for (const auto& c : m.components) comps.push_back(to_json(c));
    return json{{"type", "switching"},
                {"C", m.components.size()},
                {"M", m.M},
                {"components", comps}};
}

inline json to_json(const PwsModel& m) {
    json comps = json::array();
    for (const auto& c : m.components) comps.push_back(to_json(c));
    json cls = json::array();
    for (const auto& w : m.classifier.W) cls.push_back(to_json(w));
    return json{{"type", "pws"},
                {"C", m.components.size()},
                {"M", m.M},
                {"classifier", cls},
                {"components", comps}};
}

inline SwitchingModel switching_from_json(const json& j) {
    if (j.at("type") != "switching")
        throw std::invalid_argument("switching_from_json: wrong model type");
    SwitchingModel m;
    m.M = j.at("M");
    for (const auto& c : j.at("components")) m.components.push_back(component_from_json(c));
    return m;
}

inline PwsModel pws_from_json(const json& j) {
    if (j.at("type") != "pws")
        throw std::invalid_argument("pws_from_json: wrong model type");
    PwsModel m;
    m.M = j.at("M");
    for (const auto& w : j.at("classifier")) m.classifier.W.push_back(vec_from_json(w));
    for (const auto& c : j.at("components")) m.components.push_back(component_from_json(c));
    return m;
}

} // namespace swreg

#endif
