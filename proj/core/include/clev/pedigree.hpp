#pragma once

#include <string>
#include <vector>

#include "clev/model.hpp"

namespace clev {

// One pedigree member; parent fields index into the owning template's member
// vector, -1 meaning founder (parent not in the pedigree).
struct PedigreeMember {
    std::string id;
    int father = -1;
    int mother = -1;
    // Unobserved members anchor genotype transmission but are excluded from
    // the emitted data (e.g. ungenotyped parents in a sibling-only study).
    bool observed = true;
};

// Family structure used both by the simulator and by pedigree-file parsing.
class PedigreeTemplate {
public:
    PedigreeTemplate() = default;  // empty; filled via the member ctor
    explicit PedigreeTemplate(std::vector<PedigreeMember> members);

    const std::vector<PedigreeMember>& members() const { return members_; }
    std::size_t size() const { return members_.size(); }

    // Members listed parents-before-children.
    const std::vector<int>& generation_order() const { return order_; }

    std::vector<int> observed_indices() const;

    // Relationship class of every unordered pair, dense upper-triangular
    // over all members. Full siblings share both parents; half siblings and
    // anything beyond the five named classes map to Unrelated. Precedence for
    // pathological overlaps: parent-offspring, sibling, grandparental,
    // avuncular, cousin.
    std::vector<RelationshipClass> classify_pairs() const;

    RelationshipClass classify_pair(int i, int j) const;

private:
    std::vector<PedigreeMember> members_;
    std::vector<int> order_;
};

// Built-in study designs.

// k full siblings with two unobserved founder parents.
PedigreeTemplate sibling_template(int n_siblings);

// Two observed founder parents and their n_children offspring.
PedigreeTemplate nuclear_family_template(int n_children);

// Three generations, 12 observed members: a founder couple, their two
// children with unrelated spouses, and three grandchildren per couple.
// Exhibits all five dependent relationship classes.
PedigreeTemplate three_generation_template();

}  // namespace clev
