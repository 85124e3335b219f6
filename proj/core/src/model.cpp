#include "clev/model.hpp"

#include <cmath>
#include <limits>

namespace clev {

const char* to_string(RelationshipClass c) {
    switch (c) {
        case RelationshipClass::Sibling: return "sibling";
        case RelationshipClass::ParentOffspring: return "parent-offspring";
        case RelationshipClass::Avuncular: return "avuncular";
        case RelationshipClass::Grandparental: return "grandparental";
        case RelationshipClass::Cousin: return "cousin";
        case RelationshipClass::Unrelated: return "unrelated";
    }
    return "unknown";
}

void ModelParams::validate() const {
    if (!std::isfinite(beta0) || !std::isfinite(beta1)) {
        throw InvalidArgument("model coefficients must be finite");
    }
    for (int c = 0; c < kNumRelationshipClasses; ++c) {
        if (!std::isfinite(psi[c]) || psi[c] < 0.0) {
            throw InvalidArgument(std::string("psi for class ") +
                                  to_string(static_cast<RelationshipClass>(c)) +
                                  " must be finite and >= 0");
        }
    }
    if (psi[static_cast<int>(RelationshipClass::Unrelated)] != 1.0) {
        throw InvalidArgument("psi for unrelated pairs must equal 1");
    }
}

void FamilyData::validate() const {
    const std::size_t n = phenotypes.size();
    if (n < 1) {
        throw InvalidArgument("family " + family_id + " is empty");
    }
    if (genotypes.size() != n) {
        throw InvalidArgument("family " + family_id +
                              ": phenotype and genotype lengths differ");
    }
    for (const auto& y : phenotypes) {
        if (y && *y > 1) {
            throw InvalidArgument("family " + family_id +
                                  ": phenotypes must be 0 or 1");
        }
    }
    if (pair_classes.size() != num_pairs(n)) {
        throw InvalidArgument("family " + family_id +
                              ": pair_classes must cover all unordered pairs");
    }
}

double marginal_prob(double beta0, double beta1, int x) {
    if (!std::isfinite(beta0) || !std::isfinite(beta1)) {
        throw InvalidArgument("marginal_prob: non-finite coefficients");
    }
    const double eta = beta0 + beta1 * static_cast<double>(x);
    double p;
    if (eta >= 0.0) {
        p = 1.0 / (1.0 + std::exp(-eta));
    } else {
        const double e = std::exp(eta);
        p = e / (1.0 + e);
    }
    // Keep the contract p in (0,1) even for huge linear predictors.
    const double lo = std::numeric_limits<double>::min();
    const double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
    if (p < lo) p = lo;
    if (p > hi) p = hi;
    return p;
}

double marginal_prob(double beta0, double beta1, const Genotype& x) {
    return marginal_prob(beta0, beta1, x.count());
}

}  // namespace clev
