#include "clev/likelihood.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>
#include <utility>

#include "clev/plackett.hpp"

namespace clev {

namespace {

constexpr int kMaxDim = 8;
constexpr double kDegenerateCell = 1e-300;
constexpr double kCondCap = 1e12;

const char* kind_names[] = {"independence", "pairwise", "pairwise-psi"};

struct PreparedObs {
    int y;
    int x;
};

struct PreparedPair {
    int a, b;    // indices into obs
    int mi, mj;  // original member indices, for error messages
    int cls;
};

struct PreparedFamily {
    std::vector<PreparedObs> obs;
    std::vector<PreparedPair> pairs;
    double pair_weight = 1.0;
    const FamilyData* src = nullptr;
};

struct Prepared {
    std::vector<PreparedFamily> families;
    int n_cases = 0;
    int n_controls = 0;
};

Prepared prepare(std::span<const FamilyData> data, CLKind kind) {
    Prepared out;
    out.families.reserve(data.size());
    for (const auto& family : data) {
        const std::size_t n = family.size();
        if (family.genotypes.size() != n ||
            family.pair_classes.size() != num_pairs(n)) {
            throw InvalidArgument("family " + family.family_id +
                                  " has inconsistent member or pair counts");
        }
        PreparedFamily pf;
        pf.src = &family;
        std::vector<int> obs_index(n, -1);
        for (std::size_t i = 0; i < n; ++i) {
            if (!family.phenotypes[i] || !family.genotypes[i]) continue;
            obs_index[i] = static_cast<int>(pf.obs.size());
            pf.obs.push_back({static_cast<int>(*family.phenotypes[i]),
                              family.genotypes[i]->count()});
        }
        if (pf.obs.empty()) continue;
        for (const auto& o : pf.obs) (o.y ? out.n_cases : out.n_controls)++;
        if (kind != CLKind::Independence && pf.obs.size() >= 2) {
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = i + 1; j < n; ++j) {
                    if (obs_index[i] < 0 || obs_index[j] < 0) continue;
                    pf.pairs.push_back(
                        {obs_index[i], obs_index[j], static_cast<int>(i),
                         static_cast<int>(j),
                         static_cast<int>(family.pair_classes[pair_index(i, j, n)])});
                }
            }
            pf.pair_weight = kind == CLKind::PairwiseWeighted
                                 ? 1.0 / (static_cast<double>(pf.obs.size()) - 1.0)
                                 : 1.0;
        }
        out.families.push_back(std::move(pf));
    }
    return out;
}

// Per-iteration lookup tables. Marginal terms depend only on (x, y); pair
// terms only on (x_a, x_b, class, y_a, y_b). Building them once per theta
// makes the per-observation cost a handful of fused multiply-adds.
struct MarginalEntry {
    double ll = 0.0;
    double s[2] = {0, 0};
    double h[3] = {0, 0, 0};  // (b0,b0), (b0,b1), (b1,b1)
};

struct PairEntry {
    double ll = 0.0;
    double s[kMaxDim] = {};
    double h[kMaxDim * (kMaxDim + 1) / 2] = {};  // lower triangle, row-major
    bool degenerate = false;
};

inline int tri_index(int r, int c) {  // r >= c
    return r * (r + 1) / 2 + c;
}

struct EvalTables {
    MarginalEntry marginal[3][2];
    std::vector<PairEntry> pair;  // [(xa*3+xb)*6+cls]*4 + (ya*2+yb)
    bool pair_built = false;
};

void build_marginal_tables(const Eigen::VectorXd& theta, EvalTables& t) {
    const double b0 = theta[kBeta0Index], b1 = theta[kBeta1Index];
    for (int x = 0; x < 3; ++x) {
        const double p = marginal_prob(b0, b1, x);
        const double v = p * (1.0 - p);
        const double xb[2] = {1.0, static_cast<double>(x)};
        for (int y = 0; y < 2; ++y) {
            MarginalEntry& e = t.marginal[x][y];
            e.ll = y ? std::log(p) : std::log1p(-p);
            const double r = y - p;  // d loglik / d eta
            e.s[0] = r * xb[0];
            e.s[1] = r * xb[1];
            e.h[0] = -v;
            e.h[1] = -v * xb[1];
            e.h[2] = -v * xb[1] * xb[1];
        }
    }
}

void build_pair_tables(const Eigen::VectorXd& theta, const PsiStructure& st,
                       EvalTables& t) {
    t.pair.assign(9 * kNumRelationshipClasses * 4, PairEntry{});
    const double b0 = theta[kBeta0Index], b1 = theta[kBeta1Index];
    double p[3], v[3], w[3];
    for (int x = 0; x < 3; ++x) {
        p[x] = marginal_prob(b0, b1, x);
        v[x] = p[x] * (1.0 - p[x]);
        w[x] = v[x] * (1.0 - 2.0 * p[x]);
    }
    for (int xa = 0; xa < 3; ++xa) {
        for (int xb = 0; xb < 3; ++xb) {
            for (int cls = 0; cls < kNumRelationshipClasses; ++cls) {
                const double psi =
                    st.psi_for(static_cast<RelationshipClass>(cls), theta);
                if (!(psi > 0.0) || !std::isfinite(psi)) {
                    throw InvalidArgument(
                        "pairwise likelihood needs finite psi > 0");
                }
                const int g = st.group[cls];
                const int gi = g < 0 ? -1 : st.delta_index(g);
                const JointDerivs jd = joint_derivs({p[xa], p[xb], psi});
                const double cells[4] = {
                    1.0 - p[xa] - p[xb] + jd.p11,  // y = (0,0)
                    p[xa] - jd.p11,                // y = (0,1) means ya=0,yb=1?
                    p[xb] - jd.p11,                // see ordering note below
                    jd.p11,
                };
                // Cell order by (ya*2+yb): (0,0) -> p00, (0,1) -> p01 =
                // P(ya=0, yb=1) = p_b - p11, (1,0) -> p10 = p_a - p11,
                // (1,1) -> p11.
                const double cell_by_y[4] = {cells[0], cells[2], cells[1],
                                             cells[3]};
                // First partials of each cell w.r.t. (p_a, p_b, psi).
                const double g11[3] = {jd.d_pi, jd.d_pj, jd.d_psi};
                const double grads[4][3] = {
                    {jd.d_pi - 1.0, jd.d_pj - 1.0, jd.d_psi},   // p00
                    {-jd.d_pi, 1.0 - jd.d_pj, -jd.d_psi},       // p01
                    {1.0 - jd.d_pi, -jd.d_pj, -jd.d_psi},       // p10
                    {g11[0], g11[1], g11[2]},                   // p11
                };
                const double sign[4] = {1.0, -1.0, -1.0, 1.0};
                for (int yy = 0; yy < 4; ++yy) {
                    PairEntry& e = t.pair[((xa * 3 + xb) * kNumRelationshipClasses +
                                           cls) * 4 + yy];
                    const double c = cell_by_y[yy];
                    if (c <= kDegenerateCell) {
                        e.degenerate = true;
                        continue;
                    }
                    e.ll = std::log(c);
                    const double* gc = grads[yy];
                    const double sg = sign[yy];
                    // log-derivatives w.r.t. (p_a, p_b, psi)
                    const double L[3] = {gc[0] / c, gc[1] / c, gc[2] / c};
                    const double H2[3][3] = {
                        {sg * jd.d_pipi / c - L[0] * L[0],
                         sg * jd.d_pipj / c - L[0] * L[1],
                         sg * jd.d_pipsi / c - L[0] * L[2]},
                        {0.0, sg * jd.d_pjpj / c - L[1] * L[1],
                         sg * jd.d_pjpsi / c - L[1] * L[2]},
                        {0.0, 0.0, sg * jd.d_psipsi / c - L[2] * L[2]},
                    };
                    auto h2 = [&](int r, int cidx) {
                        return r <= cidx ? H2[r][cidx] : H2[cidx][r];
                    };
                    // Chain into theta. p_a, p_b live on (beta0, beta1);
                    // psi = exp(delta_g) on its own coordinate.
                    const double ba[2] = {1.0, static_cast<double>(xa)};
                    const double bb[2] = {1.0, static_cast<double>(xb)};
                    for (int k = 0; k < 2; ++k) {
                        e.s[k] = L[0] * v[xa] * ba[k] + L[1] * v[xb] * bb[k];
                    }
                    if (gi >= 0) e.s[gi] = L[2] * psi;
                    for (int k = 0; k < 2; ++k) {
                        for (int l = 0; l <= k; ++l) {
                            double val =
                                h2(0, 0) * v[xa] * v[xa] * ba[k] * ba[l] +
                                h2(1, 1) * v[xb] * v[xb] * bb[k] * bb[l] +
                                h2(0, 1) * v[xa] * v[xb] *
                                    (ba[k] * bb[l] + bb[k] * ba[l]) +
                                L[0] * w[xa] * ba[k] * ba[l] +
                                L[1] * w[xb] * bb[k] * bb[l];
                            e.h[tri_index(k, l)] = val;
                        }
                    }
                    if (gi >= 0) {
                        for (int k = 0; k < 2; ++k) {
                            e.h[tri_index(gi, k)] =
                                (h2(0, 2) * v[xa] * ba[k] +
                                 h2(1, 2) * v[xb] * bb[k]) * psi;
                        }
                        e.h[tri_index(gi, gi)] =
                            h2(2, 2) * psi * psi + L[2] * psi;
                    }
                }
            }
        }
    }
    t.pair_built = true;
}

CLEvaluation eval_prepared(const Prepared& prep, const Eigen::VectorXd& theta,
                           CLKind kind, const PsiStructure& st,
                           bool with_per_family) {
    const int dim = st.dim();
    if (theta.size() != dim) {
        throw InvalidArgument("theta has wrong dimension for the psi structure");
    }
    if (dim > kMaxDim) {
        throw InvalidArgument("too many free dependence groups");
    }
    // All psi pinned at 1 makes the weighted pairwise likelihood the
    // independence likelihood term for term (each member sits in n-1 pairs
    // with weight 1/(n-1)); taking the marginal path keeps the agreement
    // exact rather than within rounding.
    bool independent_pairs = kind == CLKind::PairwiseWeighted && st.n_groups == 0;
    if (independent_pairs) {
        for (double f : st.fixed_psi) {
            independent_pairs = independent_pairs && std::abs(f - 1.0) <= 1e-9;
        }
    }
    EvalTables tables;
    build_marginal_tables(theta, tables);
    if (kind != CLKind::Independence && !independent_pairs) {
        build_pair_tables(theta, st, tables);
    }

    CLEvaluation ev;
    ev.score = Eigen::VectorXd::Zero(dim);
    ev.hessian = Eigen::MatrixXd::Zero(dim, dim);
    if (with_per_family) ev.per_family_scores.reserve(prep.families.size());

    double hess_tri[kMaxDim * (kMaxDim + 1) / 2] = {};
    double fam_score[kMaxDim];

    for (const auto& pf : prep.families) {
        std::fill(fam_score, fam_score + dim, 0.0);
        double fam_ll = 0.0;
        const bool marginal_mode = kind == CLKind::Independence ||
                                   independent_pairs || pf.obs.size() == 1;
        if (marginal_mode) {
            for (const auto& o : pf.obs) {
                const MarginalEntry& e = tables.marginal[o.x][o.y];
                fam_ll += e.ll;
                fam_score[0] += e.s[0];
                fam_score[1] += e.s[1];
                hess_tri[tri_index(0, 0)] += e.h[0];
                hess_tri[tri_index(1, 0)] += e.h[1];
                hess_tri[tri_index(1, 1)] += e.h[2];
            }
        } else {
            const double w = pf.pair_weight;
            for (const auto& pr : pf.pairs) {
                const PreparedObs& oa = pf.obs[pr.a];
                const PreparedObs& ob = pf.obs[pr.b];
                const PairEntry& e =
                    tables.pair[((oa.x * 3 + ob.x) * kNumRelationshipClasses +
                                 pr.cls) * 4 + (oa.y * 2 + ob.y)];
                if (e.degenerate) {
                    std::ostringstream msg;
                    msg << "degenerate pair probability in family "
                        << pf.src->family_id << ", members (" << pr.mi << ", "
                        << pr.mj << ")";
                    throw DegenerateCell(msg.str());
                }
                fam_ll += w * e.ll;
                for (int k = 0; k < dim; ++k) fam_score[k] += w * e.s[k];
                for (int k = 0; k < dim * (dim + 1) / 2; ++k) {
                    hess_tri[k] += w * e.h[k];
                }
            }
        }
        ev.loglik += fam_ll;
        for (int k = 0; k < dim; ++k) ev.score[k] += fam_score[k];
        if (with_per_family) {
            ev.per_family_scores.emplace_back(
                Eigen::Map<Eigen::VectorXd>(fam_score, dim));
        }
    }
    for (int k = 0; k < dim; ++k) {
        for (int l = 0; l <= k; ++l) {
            ev.hessian(k, l) = ev.hessian(l, k) = hess_tri[tri_index(k, l)];
        }
    }
    return ev;
}

}  // namespace

const char* to_string(CLKind k) { return kind_names[static_cast<int>(k)]; }

PsiStructure PsiStructure::shared_all() {
    PsiStructure st;
    st.group.fill(0);
    st.n_groups = 1;
    return st;
}

PsiStructure PsiStructure::per_class_present(std::span<const FamilyData> data) {
    std::array<bool, kNumRelationshipClasses> present{};
    for (const auto& family : data) {
        const std::size_t n = family.size();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (!family.phenotypes[i] || !family.genotypes[i] ||
                    !family.phenotypes[j] || !family.genotypes[j]) {
                    continue;
                }
                present[static_cast<int>(
                    family.pair_classes[pair_index(i, j, n)])] = true;
            }
        }
    }
    PsiStructure st;
    for (int c = 0; c < kNumRelationshipClasses; ++c) {
        if (present[c] && c != static_cast<int>(RelationshipClass::Unrelated)) {
            st.group[c] = st.n_groups++;
        }
    }
    return st;
}

PsiStructure PsiStructure::all_fixed(const ModelParams& params) {
    PsiStructure st;
    for (int c = 0; c < kNumRelationshipClasses; ++c) {
        st.fixed_psi[c] = params.psi[c];
    }
    return st;
}

CLEvaluation cl_eval(std::span<const FamilyData> data,
                     const Eigen::VectorXd& theta, CLKind kind,
                     const PsiStructure& structure, bool with_per_family) {
    const Prepared prep = prepare(data, kind);
    return eval_prepared(prep, theta, kind, structure, with_per_family);
}

CLEvaluation cl_eval(std::span<const FamilyData> data, const ModelParams& params,
                     CLKind kind) {
    if (kind == CLKind::Independence) {
        PsiStructure st;
        Eigen::VectorXd theta(2);
        theta << params.beta0, params.beta1;
        return cl_eval(data, theta, kind, st);
    }
    PsiStructure st = PsiStructure::per_class_present(data);
    Eigen::VectorXd theta(st.dim());
    theta[kBeta0Index] = params.beta0;
    theta[kBeta1Index] = params.beta1;
    for (int c = 0; c < kNumRelationshipClasses; ++c) {
        if (st.group[c] >= 0) {
            const double psi = params.psi[c];
            if (!(psi > 0.0)) {
                throw InvalidArgument(
                    "pairwise evaluation needs psi > 0 for present classes");
            }
            theta[st.delta_index(st.group[c])] = std::log(psi);
        }
    }
    return cl_eval(data, theta, kind, st);
}

Eigen::VectorXd default_init(std::span<const FamilyData> data,
                             const PsiStructure& structure) {
    long cases = 0, total = 0;
    for (const auto& family : data) {
        for (std::size_t i = 0; i < family.size(); ++i) {
            if (!family.phenotypes[i] || !family.genotypes[i]) continue;
            ++total;
            cases += *family.phenotypes[i];
        }
    }
    double frac = total > 0 ? static_cast<double>(cases) / total : 0.5;
    frac = std::clamp(frac, 1e-6, 1.0 - 1e-6);
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(structure.dim());
    theta[kBeta0Index] = std::log(frac / (1.0 - frac));
    return theta;
}

namespace {

// One cyclic sweep of safeguarded scalar root-finding on each free
// coordinate's score component. Used when the Hessian is unusable.
bool coordinate_sweep(const Prepared& prep, CLKind kind, const PsiStructure& st,
                      Eigen::VectorXd& theta, const std::vector<int>& free_idx) {
    bool moved = false;
    for (int k : free_idx) {
        auto score_k = [&](double value) {
            Eigen::VectorXd t = theta;
            t[k] = value;
            return eval_prepared(prep, t, kind, st, false).score[k];
        };
        double lo = theta[k], hi = theta[k];
        double f_center = score_k(theta[k]);
        if (f_center == 0.0) continue;
        double step = 0.5;
        bool bracketed = false;
        // Score decreases in its own coordinate for concave logliks; expand
        // toward the sign change.
        for (int attempt = 0; attempt < 60 && !bracketed; ++attempt) {
            if (f_center > 0.0) {
                hi = theta[k] + step;
                if (score_k(hi) <= 0.0) {
                    lo = hi - step;
                    bracketed = true;
                }
            } else {
                lo = theta[k] - step;
                if (score_k(lo) >= 0.0) {
                    hi = lo + step;
                    bracketed = true;
                }
            }
            step *= 2.0;
            if (step > 200.0) break;
        }
        if (!bracketed) continue;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (score_k(mid) > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        const double root = 0.5 * (lo + hi);
        if (root != theta[k]) moved = true;
        theta[k] = root;
    }
    return moved;
}

}  // namespace

FitResult maximize_cl(std::span<const FamilyData> data, CLKind kind,
                      const PsiStructure& structure, const Eigen::VectorXd& init,
                      const std::vector<int>& fixed, const FitOptions& options) {
    const Prepared prep = prepare(data, kind);
    if (prep.families.empty()) {
        throw InvalidArgument("no usable observations in the dataset");
    }
    if (prep.n_cases == 0 || prep.n_controls == 0) {
        throw InvalidArgument(
            "need at least one case and one control to maximize");
    }
    const int dim = structure.dim();
    std::vector<int> free_idx;
    for (int k = 0; k < dim; ++k) {
        if (std::find(fixed.begin(), fixed.end(), k) == fixed.end()) {
            free_idx.push_back(k);
        }
    }
    if (free_idx.empty()) throw InvalidArgument("no free parameters");
    const bool beta1_free =
        std::find(fixed.begin(), fixed.end(), kBeta1Index) == fixed.end();

    FitResult result;
    result.theta = init;
    CLEvaluation ev = eval_prepared(prep, result.theta, kind, structure, false);

    const int nf = static_cast<int>(free_idx.size());
    Eigen::VectorXd s_f(nf);
    Eigen::MatrixXd h_f(nf, nf);
    for (int iter = 1; iter <= options.max_iter; ++iter) {
        result.iterations = iter;
        for (int a = 0; a < nf; ++a) {
            s_f[a] = ev.score[free_idx[a]];
            for (int b = 0; b < nf; ++b) {
                h_f(a, b) = ev.hessian(free_idx[a], free_idx[b]);
            }
        }
        if (s_f.lpNorm<Eigen::Infinity>() <= options.score_tol) {
            result.converged = true;
            break;
        }

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h_f);
        const Eigen::VectorXd& lam = eig.eigenvalues();
        const double lam_max = lam.cwiseAbs().maxCoeff();
        const double lam_min = lam.cwiseAbs().minCoeff();
        if (lam_min <= 0.0 || lam_max / lam_min > kCondCap) {
            // Ill-conditioned curvature; fall back to scalar root-finding,
            // which handles sparse-cell separation geometry.
            if (!coordinate_sweep(prep, kind, structure, result.theta, free_idx)) {
                break;
            }
            ev = eval_prepared(prep, result.theta, kind, structure, false);
            continue;
        }
        // Ascent direction via eigenvalue clamping: concave coordinates get
        // the Newton step, convex or flat ones a safeguarded one.
        const double floor = std::max(1e-12 * lam_max, 1e-10);
        Eigen::VectorXd proj = eig.eigenvectors().transpose() * s_f;
        for (int a = 0; a < nf; ++a) {
            proj[a] /= std::max(-lam[a], floor);
        }
        const Eigen::VectorXd direction = eig.eigenvectors() * proj;

        const bool near_opt = s_f.lpNorm<Eigen::Infinity>() < 1e-4;
        double t = 1.0;
        bool stepped = false;
        Eigen::VectorXd trial = result.theta;
        for (int half = 0; half < 40; ++half) {
            for (int a = 0; a < nf; ++a) {
                trial[free_idx[a]] = result.theta[free_idx[a]] + t * direction[a];
            }
            CLEvaluation trial_ev =
                eval_prepared(prep, trial, kind, structure, false);
            if (trial_ev.loglik > ev.loglik ||
                (near_opt && std::isfinite(trial_ev.loglik))) {
                result.theta = trial;
                ev = std::move(trial_ev);
                stepped = true;
                break;
            }
            t *= 0.5;
        }
        if (!stepped) {
            if (!coordinate_sweep(prep, kind, structure, result.theta, free_idx)) {
                break;
            }
            ev = eval_prepared(prep, result.theta, kind, structure, false);
        }
    }

    for (int a = 0; a < nf; ++a) s_f[a] = ev.score[free_idx[a]];
    result.converged = s_f.lpNorm<Eigen::Infinity>() <= options.score_tol;
    result.loglik = ev.loglik;
    result.separation =
        beta1_free &&
        std::abs(result.theta[kBeta1Index]) > options.separation_beta1;
    if (!result.converged && !result.separation) {
        std::vector<double> last(result.theta.data(),
                                 result.theta.data() + result.theta.size());
        std::ostringstream msg;
        msg << "composite likelihood maximization did not converge in "
            << options.max_iter << " iterations (score max-norm "
            << s_f.lpNorm<Eigen::Infinity>() << ")";
        throw NonConvergenceError(msg.str(), std::move(last));
    }
    return result;
}

FitResult maximize_cl(std::span<const FamilyData> data, CLKind kind,
                      const FitOptions& options) {
    const PsiStructure st = kind == CLKind::Independence
                                ? PsiStructure{}
                                : PsiStructure::shared_all();
    return maximize_cl(data, kind, st, default_init(data, st), {}, options);
}

std::vector<double> default_beta1_grid() {
    const int points = 401;
    const double hi = std::log(20.0);
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i) {
        grid[i] = -hi + 2.0 * hi * i / (points - 1);
    }
    return grid;
}

double profile_point(std::span<const FamilyData> data, CLKind kind,
                     const PsiStructure& structure, int interest_index,
                     double value, const Eigen::VectorXd& init,
                     const FitOptions& options) {
    Eigen::VectorXd start = init;
    start[interest_index] = value;
    const FitResult fit = maximize_cl(data, kind, structure, start,
                                      {interest_index}, options);
    return fit.loglik;
}

ProfileCurve profile_cl(std::span<const FamilyData> data, CLKind kind,
                        const PsiStructure& structure, int interest_index,
                        const std::vector<double>& grid,
                        const FitOptions& options) {
    if (grid.empty()) throw InvalidArgument("profile grid must be nonempty");
    if (!std::is_sorted(grid.begin(), grid.end())) {
        throw InvalidArgument("profile grid must be sorted ascending");
    }
    if (interest_index < 0 || interest_index >= structure.dim()) {
        throw InvalidArgument("interest index outside the free parameters");
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();

    ProfileCurve curve;
    curve.interest_index = interest_index;
    curve.grid = grid;
    curve.loglik_p.assign(grid.size(), nan);
    curve.nuisance_hat.assign(grid.size(), Eigen::VectorXd());
    curve.ok.assign(grid.size(), false);

    Eigen::VectorXd warm = default_init(data, structure);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        Eigen::VectorXd start = warm;
        start[interest_index] = grid[i];
        try {
            const FitResult fit = maximize_cl(data, kind, structure, start,
                                              {interest_index}, options);
            curve.loglik_p[i] = fit.loglik;
            curve.nuisance_hat[i] = fit.theta;
            curve.ok[i] = true;
            warm = fit.theta;
        } catch (const Error&) {
            // Flagged, not dropped; the next point reuses the last good warm
            // start.
        }
    }

    int best = -1;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (curve.ok[i] && (best < 0 || curve.loglik_p[i] > curve.loglik_p[best])) {
            best = static_cast<int>(i);
        }
    }
    if (best < 0) {
        throw NonConvergenceError("profile failed at every grid point", {});
    }

    // Golden-section refinement around the best grid point.
    double lo = best > 0 && curve.ok[best - 1] ? grid[best - 1] : grid[best];
    double hi = best + 1 < static_cast<int>(grid.size()) && curve.ok[best + 1]
                    ? grid[best + 1]
                    : grid[best];
    Eigen::VectorXd base = curve.nuisance_hat[best];
    auto eval_at = [&](double v) {
        try {
            Eigen::VectorXd start = base;
            start[interest_index] = v;
            const FitResult fit =
                maximize_cl(data, kind, structure, start, {interest_index}, options);
            return std::pair<double, Eigen::VectorXd>(fit.loglik, fit.theta);
        } catch (const Error&) {
            return std::pair<double, Eigen::VectorXd>(-std::numeric_limits<double>::infinity(),
                                                      base);
        }
    };
    double best_v = grid[best];
    double best_ll = curve.loglik_p[best];
    Eigen::VectorXd best_theta = curve.nuisance_hat[best];
    if (hi > lo) {
        constexpr double kInvPhi = 0.6180339887498949;
        double a = lo, b = hi;
        double x1 = b - kInvPhi * (b - a);
        double x2 = a + kInvPhi * (b - a);
        auto [f1, t1] = eval_at(x1);
        auto [f2, t2] = eval_at(x2);
        while (b - a > 1e-6) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                t1 = t2;
                x2 = a + kInvPhi * (b - a);
                std::tie(f2, t2) = eval_at(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                t2 = t1;
                x1 = b - kInvPhi * (b - a);
                std::tie(f1, t1) = eval_at(x1);
            }
        }
        const auto& [fm, tm] = f1 > f2 ? std::tie(f1, t1) : std::tie(f2, t2);
        if (fm > best_ll) {
            best_ll = fm;
            best_theta = tm;
            best_v = best_theta[interest_index];
        }
    }
    curve.mcle_interest = best_v;
    curve.mcle_loglik = best_ll;
    curve.mcle_theta = best_theta;
    return curve;
}

ProfileCurve profile_cl(std::span<const FamilyData> data, CLKind kind,
                        const FitOptions& options) {
    const PsiStructure st = kind == CLKind::Independence
                                ? PsiStructure{}
                                : PsiStructure::shared_all();
    return profile_cl(data, kind, st, kBeta1Index, default_beta1_grid(), options);
}

double check_gradient(std::span<const FamilyData> data,
                      const Eigen::VectorXd& theta, CLKind kind,
                      const PsiStructure& structure) {
    const CLEvaluation at = cl_eval(data, theta, kind, structure, false);
    const int dim = structure.dim();
    double worst = 0.0;
    auto rel = [](double analytic, double numeric) {
        return std::abs(analytic - numeric) /
               std::max({1.0, std::abs(analytic), std::abs(numeric)});
    };
    for (int k = 0; k < dim; ++k) {
        const double h = 1e-5 * std::max(1.0, std::abs(theta[k]));
        Eigen::VectorXd up = theta, down = theta;
        up[k] += h;
        down[k] -= h;
        const CLEvaluation eu = cl_eval(data, up, kind, structure, false);
        const CLEvaluation ed = cl_eval(data, down, kind, structure, false);
        worst = std::max(worst, rel(at.score[k],
                                    (eu.loglik - ed.loglik) / (2.0 * h)));
        for (int l = 0; l < dim; ++l) {
            worst = std::max(worst, rel(at.hessian(l, k),
                                        (eu.score[l] - ed.score[l]) / (2.0 * h)));
        }
    }
    return worst;
}

}  // namespace clev
