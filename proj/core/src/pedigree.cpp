#include "clev/pedigree.hpp"

#include <algorithm>

#include "clev/errors.hpp"

namespace clev {

namespace {

// Kahn topological sort over parent pointers; throws on cycles.
std::vector<int> generation_sort(const std::vector<PedigreeMember>& members) {
    const int n = static_cast<int>(members.size());
    std::vector<int> remaining_parents(n, 0);
    std::vector<std::vector<int>> children(n);
    for (int i = 0; i < n; ++i) {
        for (int p : {members[i].father, members[i].mother}) {
            if (p < 0) continue;
            if (p >= n) {
                throw InvalidArgument("pedigree member " + members[i].id +
                                      " has an out-of-range parent index");
            }
            if (p == i) {
                throw InvalidArgument("pedigree member " + members[i].id +
                                      " is its own parent");
            }
            ++remaining_parents[i];
            children[p].push_back(i);
        }
    }
    std::vector<int> order;
    order.reserve(n);
    for (int i = 0; i < n; ++i) {
        if (remaining_parents[i] == 0) order.push_back(i);
    }
    for (std::size_t head = 0; head < order.size(); ++head) {
        for (int c : children[order[head]]) {
            if (--remaining_parents[c] == 0) order.push_back(c);
        }
    }
    if (static_cast<int>(order.size()) != n) {
        throw InvalidArgument("pedigree parent pointers contain a cycle");
    }
    return order;
}

}  // namespace

PedigreeTemplate::PedigreeTemplate(std::vector<PedigreeMember> members)
    : members_(std::move(members)) {
    if (members_.empty()) {
        throw InvalidArgument("pedigree must have at least one member");
    }
    order_ = generation_sort(members_);
}

std::vector<int> PedigreeTemplate::observed_indices() const {
    std::vector<int> idx;
    for (int i = 0; i < static_cast<int>(members_.size()); ++i) {
        if (members_[i].observed) idx.push_back(i);
    }
    return idx;
}

RelationshipClass PedigreeTemplate::classify_pair(int i, int j) const {
    const auto& m = members_;
    auto is_parent_of = [&](int a, int b) {
        return m[b].father == a || m[b].mother == a;
    };
    auto full_sibs = [&](int a, int b) {
        return a != b && m[a].father >= 0 && m[a].mother >= 0 &&
               m[a].father == m[b].father && m[a].mother == m[b].mother;
    };
    auto parents_of = [&](int a) {
        std::vector<int> out;
        if (m[a].father >= 0) out.push_back(m[a].father);
        if (m[a].mother >= 0) out.push_back(m[a].mother);
        return out;
    };

    if (is_parent_of(i, j) || is_parent_of(j, i)) {
        return RelationshipClass::ParentOffspring;
    }
    if (full_sibs(i, j)) {
        return RelationshipClass::Sibling;
    }
    for (auto [a, b] : {std::pair{i, j}, std::pair{j, i}}) {
        for (int p : parents_of(b)) {
            if (is_parent_of(a, p)) return RelationshipClass::Grandparental;
        }
    }
    for (auto [a, b] : {std::pair{i, j}, std::pair{j, i}}) {
        for (int p : parents_of(b)) {
            if (full_sibs(a, p)) return RelationshipClass::Avuncular;
        }
    }
    for (int pa : parents_of(i)) {
        for (int pb : parents_of(j)) {
            if (full_sibs(pa, pb)) return RelationshipClass::Cousin;
        }
    }
    return RelationshipClass::Unrelated;
}

std::vector<RelationshipClass> PedigreeTemplate::classify_pairs() const {
    const std::size_t n = members_.size();
    std::vector<RelationshipClass> classes(num_pairs(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            classes[pair_index(i, j, n)] = classify_pair(static_cast<int>(i),
                                                         static_cast<int>(j));
        }
    }
    return classes;
}

PedigreeTemplate sibling_template(int n_siblings) {
    if (n_siblings < 1) throw InvalidArgument("need at least one sibling");
    std::vector<PedigreeMember> members;
    members.push_back({"father", -1, -1, false});
    members.push_back({"mother", -1, -1, false});
    for (int s = 0; s < n_siblings; ++s) {
        members.push_back({"sib" + std::to_string(s + 1), 0, 1, true});
    }
    return PedigreeTemplate(std::move(members));
}

PedigreeTemplate nuclear_family_template(int n_children) {
    if (n_children < 1) throw InvalidArgument("need at least one child");
    std::vector<PedigreeMember> members;
    members.push_back({"father", -1, -1, true});
    members.push_back({"mother", -1, -1, true});
    for (int c = 0; c < n_children; ++c) {
        members.push_back({"child" + std::to_string(c + 1), 0, 1, true});
    }
    return PedigreeTemplate(std::move(members));
}

PedigreeTemplate three_generation_template() {
    std::vector<PedigreeMember> members;
    members.push_back({"gf", -1, -1, true});       // 0
    members.push_back({"gm", -1, -1, true});       // 1
    members.push_back({"c1", 0, 1, true});         // 2
    members.push_back({"c2", 0, 1, true});         // 3
    members.push_back({"s1", -1, -1, true});       // 4, spouse of c1
    members.push_back({"s2", -1, -1, true});       // 5, spouse of c2
    for (int g = 0; g < 3; ++g) {                  // 6..8
        members.push_back({"g1" + std::to_string(g + 1), 2, 4, true});
    }
    for (int g = 0; g < 3; ++g) {                  // 9..11
        members.push_back({"g2" + std::to_string(g + 1), 3, 5, true});
    }
    return PedigreeTemplate(std::move(members));
}

}  // namespace clev
