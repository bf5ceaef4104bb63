#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "matchkit/group.hpp"

namespace matchkit {

/// Bijection A->B with a+f(a) never landing back in A, stored as the pairing
/// list sorted by first component (A in canonical order).
struct Matching {
    std::vector<std::pair<GroupElement, GroupElement>> pairs;

    friend bool operator==(const Matching& x, const Matching& y) { return x.pairs == y.pairs; }
    friend bool operator<(const Matching& x, const Matching& y) { return x.pairs < y.pairs; }
};

/// Multiplicity map x -> |{a in A : a+f(a)=x}|; total mass equals |A|.
struct Fingerprint {
    std::map<GroupElement, int> counts;

    friend bool operator==(const Fingerprint& x, const Fingerprint& y) {
        return x.counts == y.counts;
    }
    friend bool operator<(const Fingerprint& x, const Fingerprint& y) {
        return x.counts < y.counts;
    }
};

struct FingerprintClass {
    Fingerprint fingerprint;
    std::vector<Matching> matchings;
};

/// Full matching list grouped by fingerprint. A matching is acyclic iff its
/// class is a singleton. When enumeration is capped the report carries no
/// acyclicity verdicts.
struct AcyclicReport {
    std::vector<FingerprintClass> classes;
    std::vector<Matching> acyclic_matchings;
    bool exhaustive = true;
    long long total_matchings = 0;
};

struct EnumerationResult {
    std::vector<Matching> matchings;  // canonical (lexicographic) order
    bool exhaustive = true;
};

inline constexpr long long kDefaultCap = 10000;

// true iff a+b is outside A. A must be sorted (canonical SubsetPair order).
bool allowed_edge(const AbelianGroup& g, const std::vector<GroupElement>& a_set,
                  const GroupElement& a, const GroupElement& b);

// Maximum-bipartite-matching existence check; returns a matching iff a
// perfect one exists. Deterministic for fixed input.
std::optional<Matching> find_matching(const AbelianGroup& g, const SubsetPair& pair);

// All matchings in canonical order when their number is <= cap; otherwise the
// first cap of them with exhaustive=false.
EnumerationResult enumerate_matchings(const AbelianGroup& g, const SubsetPair& pair,
                                      long long cap = kDefaultCap);

Fingerprint fingerprint(const AbelianGroup& g, const Matching& f);

AcyclicReport acyclic_report(const AbelianGroup& g, const SubsetPair& pair,
                             long long cap = kDefaultCap);

// Re-validates the bijection and forbidden-sum invariants against the pair.
bool is_valid_matching(const AbelianGroup& g, const SubsetPair& pair, const Matching& f);

/// Hall violator extracted from a maximum matching: a subset S of A whose
/// allowed-edge neighborhood in B is smaller than S. Exists iff the pair has
/// no matching; checkable without any matching machinery.
struct DeficiencyWitness {
    std::vector<GroupElement> subset_a;
    std::vector<GroupElement> neighborhood;
};

std::optional<DeficiencyWitness> deficiency_witness(const AbelianGroup& g, const SubsetPair& pair);

}  // namespace matchkit
