#include "clev/evidence.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "clev/errors.hpp"

namespace clev {

namespace {

// Shape-preserving piecewise cubic (Fritsch-Carlson slopes): never
// overshoots the data on monotone runs, which keeps level crossings of the
// interpolated profile curve where the data says they are.
class MonotoneCubic {
public:
    MonotoneCubic(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2) {
            throw InvalidArgument(
                "profile interpolation needs at least two usable grid points");
        }
        m_.assign(n, 0.0);
        std::vector<double> h(n - 1), d(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            if (h[i] <= 0) {
                throw InvalidArgument("profile grid must be strictly increasing");
            }
            d[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        if (n == 2) {
            m_[0] = m_[1] = d[0];
            return;
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (d[i - 1] * d[i] <= 0) {
                m_[i] = 0.0;
            } else {
                const double w1 = 2 * h[i] + h[i - 1];
                const double w2 = h[i] + 2 * h[i - 1];
                m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
        m_[0] = endpoint_slope(h[0], h[1], d[0], d[1]);
        m_[n - 1] = endpoint_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
    }

    double operator()(double x) const {
        const std::size_t i = cell(x);
        const double h = x_[i + 1] - x_[i];
        const double t = (x - x_[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * m_[i] +
               (-2 * t3 + 3 * t2) * y_[i + 1] + (t3 - t2) * h * m_[i + 1];
    }

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

private:
    static double endpoint_slope(double h0, double h1, double d0, double d1) {
        double m = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (m * d0 <= 0) return 0.0;
        if (d0 * d1 < 0 && std::fabs(m) > 3 * std::fabs(d0)) return 3 * d0;
        return m;
    }

    std::size_t cell(double x) const {
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        std::size_t i = it == x_.begin() ? 0 : (it - x_.begin()) - 1;
        return std::min(i, x_.size() - 2);
    }

    std::vector<double> x_, y_, m_;
};

// Usable (x, loglik) pairs of a curve plus the refined maximizer as its own
// node: interpolation then reproduces the exact MCLE loglik, making the
// standardized curve exactly 1 at the MCLE instead of at the interpolation
// undershoot between grid points. Points with failed fits drop out.
void curve_nodes(const ProfileCurve& curve, std::vector<double>& xs,
                 std::vector<double>& ys) {
    const std::size_t n = curve.grid.size();
    if (curve.loglik_p.size() != n) {
        throw InvalidArgument("profile curve grid/loglik size mismatch");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!curve.ok.empty() && !curve.ok[i]) continue;
        if (!std::isfinite(curve.loglik_p[i])) continue;
        xs.push_back(curve.grid[i]);
        ys.push_back(curve.loglik_p[i]);
    }
    if (xs.empty()) {
        throw InvalidArgument("profile curve has no usable grid points");
    }
    const double x_hat = curve.mcle_interest;
    const double l_hat = curve.mcle_loglik;
    if (!std::isfinite(x_hat) || !std::isfinite(l_hat)) return;
    if (x_hat < xs.front() || x_hat > xs.back()) return;
    if (l_hat < *std::max_element(ys.begin(), ys.end())) return;
    const auto pos = std::lower_bound(xs.begin(), xs.end(), x_hat);
    if (pos != xs.end() && *pos == x_hat) return;  // already a grid node
    ys.insert(ys.begin() + (pos - xs.begin()), l_hat);
    xs.insert(pos, x_hat);
}

}  // namespace

InformationEstimates estimate_information(
    const std::vector<Eigen::VectorXd>& per_family_scores,
    const Eigen::MatrixXd& hessian, int n_families) {
    if (n_families < 1 ||
        n_families != static_cast<int>(per_family_scores.size())) {
        throw InvalidArgument(
            "n_families must match the number of per-family scores");
    }
    const Eigen::Index d = hessian.rows();
    if (hessian.cols() != d || d < 1) {
        throw InvalidArgument("hessian must be square and nonempty");
    }
    InformationEstimates info;
    info.n_families = n_families;
    info.H_hat = -hessian / n_families;
    info.J_hat = Eigen::MatrixXd::Zero(d, d);
    for (const auto& u : per_family_scores) {
        if (u.size() != d) {
            throw InvalidArgument("per-family score dimension mismatch");
        }
        info.J_hat.noalias() += u * u.transpose();
    }
    info.J_hat /= n_families;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(info.J_hat);
    const double lam_min = es.eigenvalues().minCoeff();
    const double lam_max = es.eigenvalues().maxCoeff();
    if (lam_min < -1e-8 * std::max(1.0, std::fabs(lam_max))) {
        throw InternalConsistencyError(
            "variability matrix failed the positive semidefinite check");
    }
    if (lam_min <= 0 || lam_max / lam_min > 1e14) {
        std::ostringstream msg;
        msg << "variability matrix is numerically singular (eigenvalues in ["
            << lam_min << ", " << lam_max << "], n = " << n_families << ")";
        throw SingularVariability(msg.str());
    }
    const Eigen::MatrixXd j_inv =
        es.eigenvectors() *
        es.eigenvalues().cwiseInverse().asDiagonal() *
        es.eigenvectors().transpose();
    const Eigen::MatrixXd g = info.H_hat * j_inv * info.H_hat;
    info.G_hat = 0.5 * (g + g.transpose());
    return info;
}

InformationEstimates estimate_information(const CLEvaluation& eval) {
    return estimate_information(eval.per_family_scores, eval.hessian,
                                static_cast<int>(eval.per_family_scores.size()));
}

double adjustment_factor(const InformationEstimates& info, int interest_index) {
    const Eigen::Index d = info.H_hat.rows();
    if (interest_index < 0 || interest_index >= d) {
        throw InvalidArgument("interest index out of range");
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> h_lu(info.H_hat);
    const Eigen::FullPivLU<Eigen::MatrixXd> g_lu(info.G_hat);
    if (!h_lu.isInvertible() || !g_lu.isInvertible()) {
        throw InvalidInformation(
            "sensitivity or Godambe matrix is singular at the MCLE");
    }
    Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
    e[interest_index] = 1.0;
    const double a = h_lu.solve(e)[interest_index];
    const double b = g_lu.solve(e)[interest_index];
    const double ratio = a / b;
    if (!std::isfinite(ratio) || ratio <= 0) {
        std::ostringstream msg;
        msg << "adjustment factor " << ratio
            << " is not positive; information estimates are ill-conditioned";
        throw InvalidInformation(msg.str());
    }
    return ratio;
}

double adjusted_lr(const ProfileCurve& curve, double or_1, double or_2) {
    if (!(or_1 > 0) || !(or_2 > 0)) {
        throw InvalidArgument("odds ratios must be positive");
    }
    std::vector<double> xs, ys;
    curve_nodes(curve, xs, ys);
    const MonotoneCubic f(std::move(xs), std::move(ys));
    const double x1 = std::log(or_1), x2 = std::log(or_2);
    for (double x : {x1, x2}) {
        if (x < f.x_min() - 1e-12 || x > f.x_max() + 1e-12) {
            std::ostringstream msg;
            msg << "OR " << std::exp(x) << " lies outside the profiled range ["
                << std::exp(f.x_min()) << ", " << std::exp(f.x_max()) << "]";
            throw OutOfProfiledRange(msg.str());
        }
    }
    const auto clamp = [&](double x) {
        return std::min(std::max(x, f.x_min()), f.x_max());
    };
    return std::exp(curve.adjustment * (f(clamp(x1)) - f(clamp(x2))));
}

SupportInterval support_interval(const ProfileCurve& curve, double k) {
    if (!(k > 1)) {
        throw InvalidArgument("support interval threshold k must exceed 1");
    }
    if (!(curve.adjustment > 0) || !std::isfinite(curve.adjustment)) {
        throw InvalidArgument("curve adjustment factor must be positive");
    }
    std::vector<double> xs, ys;
    curve_nodes(curve, xs, ys);
    const MonotoneCubic f(xs, ys);

    // curve_nodes guarantees a node holding the maximum loglik, so the
    // crossing level of the raw loglik (standardized adjusted curve = 1/k)
    // always has a node above it when k > 1.
    const double l_max = *std::max_element(ys.begin(), ys.end());
    const double level = l_max - std::log(k) / curve.adjustment;
    const std::vector<double>& nx = xs;
    std::vector<double> nv;
    nv.reserve(ys.size());
    for (double y : ys) nv.push_back(y - level);

    const auto bisect = [&](double lo, double hi, bool rising) {
        // Invariant: the sub-threshold side stays sub-threshold.
        for (int it = 0; it < 60 && hi - lo > 1e-7; ++it) {
            const double mid = 0.5 * (lo + hi);
            const bool below = f(mid) < level;
            if (below == rising) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    };

    SupportInterval out;
    out.k = k;
    const std::size_t n = nx.size();

    if (nv.front() >= 0) {
        out.lower_open = true;
        out.lower_or = std::exp(nx.front());
    } else {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (nv[i] < 0 && nv[i + 1] >= 0) {
                out.lower_or = std::exp(bisect(nx[i], nx[i + 1], true));
                break;
            }
        }
    }
    if (nv.back() >= 0) {
        out.upper_open = true;
        out.upper_or = std::exp(nx.back());
    } else {
        for (std::size_t i = n - 1; i > 0; --i) {
            if (nv[i] < 0 && nv[i - 1] >= 0) {
                out.upper_or = std::exp(bisect(nx[i - 1], nx[i], false));
                break;
            }
        }
    }
    const double null_x = 0.0;
    const bool above_lower = out.lower_open || null_x >= std::log(out.lower_or);
    const bool below_upper = out.upper_open || null_x <= std::log(out.upper_or);
    out.contains_null = above_lower && below_upper;
    return out;
}

}  // namespace clev
