#ifndef SWREG_CORE_HPP
#define SWREG_CORE_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace swreg {

using Vec = Eigen::VectorXd;

// Affine map applied to raw outputs: y_scaled = (y_raw - offset) / factor.
struct ScaleInfo {
    double offset = 0.0;
    double factor = 1.0;

    double to_scaled(double y_raw) const { return (y_raw - offset) / factor; }
    double to_raw(double y_scaled) const { return y_scaled * factor + offset; }
};

// Immutable (x, y) sample. After rescale_dataset, M = 1/2 and |y_i| <= 1/2.
struct Dataset {
    std::vector<Vec> xs;
    std::vector<double> ys;
    double M = 0.5;
    ScaleInfo scale;

    std::size_t n() const { return ys.size(); }
    Eigen::Index dim() const { return xs.empty() ? 0 : xs.front().size(); }
};

struct LossParams {
    double p = 2.0; // loss exponent, p >= 1
};

// A function represented by its values on a fixed sample.
using FunctionValues = std::vector<double>;

// Exponent of the empirical pseudo-metric d_q; q = infinity is a distinguished
// state, not a sentinel float.
class QNorm {
public:
    static QNorm finite(double q) {
        if (q < 1.0) throw std::invalid_argument("QNorm: q must be >= 1");
        return QNorm(false, q);
    }
    static QNorm infinity() { return QNorm(true, 0.0); }

    bool is_inf() const { return inf_; }
    double q() const { return q_; }

    // C^{1/q}; 1 for q = infinity.
    double root_of(double c) const { return inf_ ? 1.0 : std::pow(c, 1.0 / q_); }

private:
    QNorm(bool inf, double q) : inf_(inf), q_(q) {}
    bool inf_;
    double q_;
};

inline double clip(double t, double M) {
    if (!(M > 0.0)) throw std::invalid_argument("clip: M must be positive");
    if (t < -M) return -M;
    if (t > M) return M;
    return t;
}

// Maps raw outputs onto [-1/2, 1/2] via the midrange/range affine map.
// Degenerate range (all y equal): center only, factor 1.
inline Dataset rescale_dataset(const Dataset& raw) {
    if (raw.ys.empty()) throw std::invalid_argument("rescale_dataset: empty dataset");
    double lo = *std::min_element(raw.ys.begin(), raw.ys.end());
    double hi = *std::max_element(raw.ys.begin(), raw.ys.end());
    if (!std::isfinite(lo) || !std::isfinite(hi))
        throw std::invalid_argument("rescale_dataset: non-finite outputs");

    ScaleInfo s;
    s.offset = 0.5 * (lo + hi);
    s.factor = (hi > lo) ? (hi - lo) : 1.0;

    Dataset out;
    out.xs = raw.xs;
    out.ys.reserve(raw.ys.size());
    for (double y : raw.ys) out.ys.push_back(s.to_scaled(y));
    out.M = 0.5;
    out.scale = s;
    return out;
}

// (1/n) sum |y_i - f(x_i)|^p. Does not clip.
inline double empirical_lp_risk(const FunctionValues& fvals, const Dataset& data,
                                LossParams loss) {
    if (loss.p < 1.0) throw std::invalid_argument("empirical_lp_risk: p must be >= 1");
    if (fvals.size() != data.n())
        throw std::invalid_argument("empirical_lp_risk: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < fvals.size(); ++i)
        acc += std::pow(std::abs(data.ys[i] - fvals[i]), loss.p);
    return acc / double(fvals.size());
}

// (1/n) sum_i min_k |y_i - f_k(x_i)|^p.
inline double empirical_switching_risk(const std::vector<FunctionValues>& fvals_per_mode,
                                       const Dataset& data, LossParams loss) {
    if (fvals_per_mode.empty())
        throw std::invalid_argument("empirical_switching_risk: C must be >= 1");
    if (loss.p < 1.0)
        throw std::invalid_argument("empirical_switching_risk: p must be >= 1");
    for (const auto& fv : fvals_per_mode)
        if (fv.size() != data.n())
            throw std::invalid_argument("empirical_switching_risk: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < data.n(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& fv : fvals_per_mode)
            best = std::min(best, std::pow(std::abs(data.ys[i] - fv[i]), loss.p));
        acc += best;
    }
    return acc / double(data.n());
}

// Empirical pseudo-metric d_q between two functions on the same sample.
inline double pseudo_metric(const FunctionValues& f, const FunctionValues& g, QNorm q) {
    if (f.size() != g.size()) throw std::invalid_argument("pseudo_metric: length mismatch");
    if (f.empty()) return 0.0;
    if (q.is_inf()) {
        double m = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i)
            m = std::max(m, std::abs(f[i] - g[i]));
        return m;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        acc += std::pow(std::abs(f[i] - g[i]), q.q());
    return std::pow(acc / double(f.size()), 1.0 / q.q());
}

// CSV format: header x1,...,xd,y; one row per sample; NaN/Inf rejected.
inline Dataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("load_csv: empty file " + path);

    std::size_t cols = 1 + std::count(line.begin(), line.end(), ',');
    if (cols < 2)
        throw std::runtime_error("load_csv: header must be x1,...,xd,y");
    const Eigen::Index d = static_cast<Eigen::Index>(cols - 1);

    Dataset ds;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw std::runtime_error("load_csv: bad value at line " +
                                         std::to_string(lineno));
            }
        }
        if (row.size() != cols)
            throw std::runtime_error("load_csv: wrong column count at line " +
                                     std::to_string(lineno));
        for (double v : row)
            if (!std::isfinite(v))
                throw std::runtime_error("load_csv: non-finite value at line " +
                                         std::to_string(lineno));
        Vec x(d);
        for (Eigen::Index j = 0; j < d; ++j) x[j] = row[std::size_t(j)];
        ds.xs.push_back(std::move(x));
        ds.ys.push_back(row.back());
    }
    if (ds.ys.empty()) throw std::runtime_error("load_csv: no data rows in " + path);
    return ds;
}

inline void save_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_csv: cannot open " + path);
    out.precision(17);
    for (Eigen::Index j = 0; j < ds.dim(); ++j) out << "x" << (j + 1) << ",";
    out << "y\n";
    for (std::size_t i = 0; i < ds.n(); ++i) {
        for (Eigen::Index j = 0; j < ds.dim(); ++j) out << ds.xs[i][j] << ",";
        out << ds.ys[i] << "\n";
    }
}

} // namespace swreg

#endif
