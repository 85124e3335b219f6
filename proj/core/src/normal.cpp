#include "clev/normal.hpp"

#include <algorithm>
#include <cmath>

#include "clev/errors.hpp"

namespace clev {

namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;
constexpr double kInvSqrt2 = 0.7071067811865475244008444;
}  // namespace

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

// AS241 algorithm PPND16 (Wichura, 1988).
double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw InvalidArgument("norm_quantile: p must lie strictly in (0,1)");
    }
    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                     6.7265770927008700853e+4) * r +
                    4.5921953931549871457e+4) * r +
                   1.3731693765509461125e+4) * r +
                  1.9715909503065514427e+3) * r +
                 1.3314166789178437745e+2) * r +
                3.3871328727963666080e+0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                     3.9307895800092710610e+4) * r +
                    2.1213794301586595867e+4) * r +
                   5.3941960214247511077e+3) * r +
                  6.8718700749205790830e+2) * r +
                 4.2313330701600911252e+1) * r +
                1.0);
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                    2.41780725177450611770e-1) * r +
                   1.27045825245236838258e+0) * r +
                  3.64784832476320460504e+0) * r +
                 5.76949722146069140550e+0) * r +
                4.63033784615654529590e+0) * r +
               1.42343711074968357734e+0) /
              (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                    1.51986665636164571966e-2) * r +
                   1.48103976427480074590e-1) * r +
                  6.89767334985100004550e-1) * r +
                 1.67638483018380384940e+0) * r +
                2.05319162663775882187e+0) * r +
               1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                    1.24266094738807843860e-3) * r +
                   2.65321895265761230930e-2) * r +
                  2.96560571828504891230e-1) * r +
                 1.78482653991729133580e+0) * r +
                5.46378491116411436990e+0) * r +
               6.65790464350110377720e+0) /
              (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                    1.84631831751005468180e-5) * r +
                   7.86869131145613259100e-4) * r +
                  1.48753612908506148525e-2) * r +
                 1.36929880922735805310e-1) * r +
                5.99832206555887937690e-1) * r +
               1.0);
    }
    return (q < 0.0) ? -val : val;
}

namespace {

// 7-point Gauss / 15-point Kronrod pair on [-1,1].
constexpr double kKronrodNodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <typename F>
void gauss_kronrod(const F& f, double a, double b, double* result, double* err) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double fk = 0.0, fg = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double u = half * kKronrodNodes[i];
        const double fv = (i == 7) ? f(mid) : f(mid - u) + f(mid + u);
        fk += kKronrodWeights[i] * fv;
        if (i % 2 == 1) fg += kGaussWeights[i / 2] * fv;
    }
    *result = fk * half;
    *err = std::fabs((fk - fg) * half);
}

template <typename F>
double adaptive_quad(const F& f, double a, double b, double tol, int depth) {
    double result, err;
    gauss_kronrod(f, a, b, &result, &err);
    if (err <= tol || depth >= 28) return result;
    const double mid = 0.5 * (a + b);
    return adaptive_quad(f, a, mid, 0.5 * tol, depth + 1) +
           adaptive_quad(f, mid, b, 0.5 * tol, depth + 1);
}

}  // namespace

double bvn_cdf(double h, double k, double rho) {
    if (std::isnan(h) || std::isnan(k) || std::isnan(rho) || std::fabs(rho) > 1.0) {
        throw InvalidArgument("bvn_cdf: correlation must satisfy |rho| <= 1");
    }
    if (std::fabs(rho) >= 1.0 - 1e-14) {
        // Degenerate limits: comonotone / antithetic pair.
        if (rho > 0.0) return norm_cdf(std::min(h, k));
        return std::max(0.0, norm_cdf(h) + norm_cdf(k) - 1.0);
    }
    if (rho == 0.0) return norm_cdf(h) * norm_cdf(k);
    if (h > k) std::swap(h, k);
    // Both variables effectively unconstrained from above.
    if (k >= 8.0) return norm_cdf(h);
    if (h >= 8.0) return norm_cdf(k);
    // Push a large |h| to the cheap side: P(Z1<=h, Z2<=k) = Phi(k) - P(-Z1<=-h, Z2<=k).
    if (h > 6.0) return norm_cdf(k) - bvn_cdf(-h, k, -rho);
    if (h <= -8.0) {
        // Total mass below h is under 1e-15; conditional factorization is ample.
        const double s = std::sqrt(1.0 - rho * rho);
        return norm_cdf(h) * norm_cdf((k - rho * h) / s);
    }
    const double s = std::sqrt(1.0 - rho * rho);
    const auto integrand = [&](double z) {
        return norm_pdf(z) * norm_cdf((k - rho * z) / s);
    };
    // The conditional CDF transitions from 0 to 1 over a window of width
    // ~s/|rho| around z = k/rho. Near |rho| = 1 that window is narrower than
    // the quadrature node spacing and an unsplit interval would score it as
    // flat zero, so seed the subdivision with the window edges.
    const double a = -8.0, b = h;
    double pts[4] = {a, b, b, b};
    int n_pts = 2;
    const double half_width = 10.0 * s / std::fabs(rho);
    const double center = k / rho;
    for (double edge : {center - half_width, center + half_width}) {
        if (edge > a && edge < b) pts[n_pts++] = edge;
    }
    std::sort(pts, pts + n_pts);
    double total = 0.0;
    for (int i = 0; i + 1 < n_pts; ++i) {
        if (pts[i + 1] > pts[i]) {
            total += adaptive_quad(integrand, pts[i], pts[i + 1], 1e-13, 0);
        }
    }
    return total;
}

}  // namespace clev
