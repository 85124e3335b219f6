#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clev/errors.hpp"

namespace clev {

// Additive minor-allele count. Missing genotypes are std::optional, never a
// sentinel count.
class Genotype {
public:
    explicit Genotype(int count) : count_(count) {
        if (count < 0 || count > 2) {
            throw InvalidArgument("genotype count must be 0, 1, or 2; got " +
                                  std::to_string(count));
        }
    }

    int count() const { return count_; }

    friend bool operator==(Genotype a, Genotype b) { return a.count_ == b.count_; }
    friend bool operator!=(Genotype a, Genotype b) { return a.count_ != b.count_; }

private:
    int count_;
};

enum class RelationshipClass : std::uint8_t {
    Sibling = 0,
    ParentOffspring = 1,
    Avuncular = 2,
    Grandparental = 3,
    Cousin = 4,
    Unrelated = 5,
};

inline constexpr int kNumRelationshipClasses = 6;

const char* to_string(RelationshipClass c);

// Marginal logistic coefficients plus one dependence odds ratio per
// relationship class. Unrelated pairs are always independent (psi = 1).
struct ModelParams {
    double beta0 = 0.0;
    double beta1 = 0.0;
    std::array<double, kNumRelationshipClasses> psi{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};

    double psi_for(RelationshipClass c) const { return psi[static_cast<int>(c)]; }
    void set_psi(RelationshipClass c, double value) { psi[static_cast<int>(c)] = value; }

    // Throws unless beta finite, psi finite and >= 0, psi[Unrelated] == 1.
    void validate() const;
};

// Index of the unordered pair (i, j), i < j, in a dense upper-triangular
// layout: pairs ordered (0,1), (0,2), ..., (0,n-1), (1,2), ...
inline std::size_t pair_index(std::size_t i, std::size_t j, std::size_t n) {
    if (i > j) std::swap(i, j);
    return i * n - i * (i + 1) / 2 + (j - i - 1);
}

inline std::size_t num_pairs(std::size_t n) { return n * (n - 1) / 2; }

// One family's observations. Phenotypes are binary (0/1); missing entries in
// either vector drop the individual from marginal terms and every pair
// containing it from pairwise terms.
struct FamilyData {
    std::string family_id;
    std::vector<std::optional<std::uint8_t>> phenotypes;
    std::vector<std::optional<Genotype>> genotypes;
    // Dense upper-triangular map over unordered member pairs; empty for
    // singletons, size n(n-1)/2 otherwise.
    std::vector<RelationshipClass> pair_classes;

    std::size_t size() const { return phenotypes.size(); }

    RelationshipClass pair_class(std::size_t i, std::size_t j) const {
        return pair_classes[pair_index(i, j, size())];
    }

    // Throws unless vector lengths agree, n >= 1, phenotypes are 0/1, and
    // pair_classes covers exactly the n(n-1)/2 unordered pairs.
    void validate() const;
};

// Inverse logit of beta0 + beta1*x, strictly inside (0,1) at double
// precision (extreme linear predictors clamp to the nearest representable
// interior value).
double marginal_prob(double beta0, double beta1, const Genotype& x);
double marginal_prob(double beta0, double beta1, int x);

}  // namespace clev
