#include "clev/plackett.hpp"

#include <algorithm>
#include <cmath>

#include "clev/model.hpp"

namespace clev {

namespace {

constexpr double kPsiIndepTol = 1e-9;
constexpr double kFrechetSlack = 1e-12;

}  // namespace

void PairMargins::validate() const {
    if (!(p_i > 0.0 && p_i < 1.0) || !(p_j > 0.0 && p_j < 1.0)) {
        throw InvalidArgument("pair margins must lie strictly inside (0,1)");
    }
    if (!std::isfinite(psi) || psi < 0.0) {
        throw InvalidArgument("psi must be finite and >= 0");
    }
}

double joint_prob(const PairMargins& m) {
    m.validate();
    const double p1 = m.p_i, p2 = m.p_j, psi = m.psi;
    double p11;
    if (std::abs(psi - 1.0) < kPsiIndepTol) {
        p11 = p1 * p2;
    } else {
        const double a = 1.0 + (p1 + p2) * (psi - 1.0);
        const double rad = a * a - 4.0 * psi * (psi - 1.0) * p1 * p2;
        if (rad < 0.0) {
            if (rad < -kFrechetSlack) {
                throw InternalConsistencyError(
                    "Plackett discriminant negative beyond tolerance");
            }
            p11 = a / (2.0 * (psi - 1.0));
        } else {
            const double s = std::sqrt(rad);
            // Rationalized root avoids cancellation; a > 0 always for psi > 1.
            p11 = (a >= 0.0) ? 2.0 * psi * p1 * p2 / (a + s)
                             : (a - s) / (2.0 * (psi - 1.0));
        }
    }
    const double lo = std::max(0.0, p1 + p2 - 1.0);
    const double hi = std::min(p1, p2);
    if (p11 < lo || p11 > hi) {
        if (p11 < lo - kFrechetSlack || p11 > hi + kFrechetSlack) {
            throw InternalConsistencyError(
                "Plackett root violates the Frechet bounds");
        }
        p11 = std::clamp(p11, lo, hi);
    }
    return p11;
}

PairJoint joint_cells(const PairMargins& m) {
    const double p11 = joint_prob(m);
    PairJoint c;
    c.p11 = p11;
    c.p10 = std::max(0.0, m.p_i - p11);
    c.p01 = std::max(0.0, m.p_j - p11);
    c.p00 = std::max(0.0, 1.0 - m.p_i - m.p_j + p11);
    return c;
}

double pair_correlation(const PairMargins& m) {
    const double p11 = joint_prob(m);
    const double denom = std::sqrt(m.p_i * (1.0 - m.p_i) * m.p_j * (1.0 - m.p_j));
    return (p11 - m.p_i * m.p_j) / denom;
}

JointDerivs joint_derivs(const PairMargins& m) {
    JointDerivs d;
    d.p11 = joint_prob(m);
    const double psi = m.psi;
    const double c11 = d.p11;
    const double c10 = m.p_i - d.p11;
    const double c01 = m.p_j - d.p11;
    const double c00 = 1.0 - m.p_i - m.p_j + d.p11;

    // F(p11; p_i, p_j, psi) = p11*c00 - psi*c10*c01 = 0 defines p11
    // implicitly; F_p = c00 + c11 + psi*(c10 + c01) > 0 on the interior.
    const double f_p = c00 + c11 + psi * (c10 + c01);
    d.d_pi = (c11 + psi * c01) / f_p;
    d.d_pj = (c11 + psi * c10) / f_p;
    d.d_psi = c10 * c01 / f_p;

    const double f_pp = 2.0 * (1.0 - psi);
    const double f_ppi = psi - 1.0;
    const double f_ppj = psi - 1.0;
    const double f_ppsi = c10 + c01;
    const double f_pipj = -psi;
    const double f_pipsi = -c01;
    const double f_pjpsi = -c10;

    auto second = [&](double pa, double pb, double f_pa, double f_pb, double f_ab) {
        return -(f_pp * pa * pb + f_pa * pb + f_pb * pa + f_ab) / f_p;
    };
    d.d_pipi = second(d.d_pi, d.d_pi, f_ppi, f_ppi, 0.0);
    d.d_pipj = second(d.d_pi, d.d_pj, f_ppi, f_ppj, f_pipj);
    d.d_pipsi = second(d.d_pi, d.d_psi, f_ppi, f_ppsi, f_pipsi);
    d.d_pjpj = second(d.d_pj, d.d_pj, f_ppj, f_ppj, 0.0);
    d.d_pjpsi = second(d.d_pj, d.d_psi, f_ppj, f_ppsi, f_pjpsi);
    d.d_psipsi = second(d.d_psi, d.d_psi, f_ppsi, f_ppsi, 0.0);
    return d;
}

CompatibilityReport check_compatibility(const std::vector<double>& margins,
                                        const std::vector<double>& joint_p11) {
    constexpr double tol = 1e-10;
    const std::size_t n = margins.size();
    if (joint_p11.size() != num_pairs(n)) {
        throw InvalidArgument("compatibility check needs a p11 for every pair");
    }
    CompatibilityReport report;
    auto fail = [&](std::string msg) {
        report.ok = false;
        report.violations.push_back(std::move(msg));
    };
    for (std::size_t i = 0; i < n; ++i) {
        if (margins[i] < -tol || margins[i] > 1.0 + tol) {
            fail("margin " + std::to_string(i) + " outside [0,1]");
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double pij = joint_p11[pair_index(i, j, n)];
            const double lo = std::max(0.0, margins[i] + margins[j] - 1.0);
            const double hi = std::min(margins[i], margins[j]);
            if (pij < lo - tol || pij > hi + tol) {
                fail("pair (" + std::to_string(i) + "," + std::to_string(j) +
                     ") joint outside the Frechet bounds");
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            for (std::size_t l = j + 1; l < n; ++l) {
                const double lhs = margins[i] + margins[j] + margins[l] -
                                   joint_p11[pair_index(i, j, n)] -
                                   joint_p11[pair_index(i, l, n)] -
                                   joint_p11[pair_index(j, l, n)];
                if (lhs > 1.0 + tol) {
                    fail("triple (" + std::to_string(i) + "," +
                         std::to_string(j) + "," + std::to_string(l) +
                         ") violates the third compatibility condition");
                }
            }
        }
    }
    return report;
}

}  // namespace clev
