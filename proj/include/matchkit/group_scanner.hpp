#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "matchkit/group_matching.hpp"
#include "matchkit/verdict.hpp"

namespace matchkit {

/// Per-pair verdict bundle. has_acyclic is inconclusive only when the
/// enumeration cap was hit before exhausting the matchings of the pair.
struct PairClassification {
    SubsetPair pair;
    bool matchable = false;
    long long matching_count = 0;
    bool count_exhaustive = true;
    Tri has_acyclic = Tri::inconclusive;
    std::optional<Matching> acyclic_witness;  // singleton-class member when yes
    std::optional<Matching> some_matching;    // any matching when matchable
};

struct SizeStats {
    int size = 0;
    long long pairs_total = 0;       // admissible pairs at this size (full space)
    long long units_classified = 0;  // orbits in symmetry_reduced mode, else pairs
    long long matchable = 0;
    long long acyclic_yes = 0;
    long long acyclic_no = 0;
    long long acyclic_inconclusive = 0;
};

/// What the cited characterizations predict for this group, when they speak.
/// Empty optional = the theorems make no claim (e.g. acyclicity for Z/p).
struct PropertyPrediction {
    std::optional<Verdict> matching;
    std::optional<Verdict> acyclic;
    std::string source;
};

PropertyPrediction predicted_properties(const AbelianGroup& g);

struct GroupScanReport {
    std::string group;
    int max_size = 0;
    ScanMode mode = ScanMode::symmetry_reduced;
    long long cap = kDefaultCap;

    // sampled-mode parameters
    std::uint64_t seed = 0;
    long long window = 0;
    int samples_requested = 0;

    bool coverage_complete = true;  // false when a budget stopped the scan early
    std::vector<int> skipped_sizes;

    Verdict matching_property = Verdict::inconclusive;
    Verdict acyclic_property = Verdict::inconclusive;
    std::optional<PairClassification> matching_counterexample;  // lex-least canonical, smallest size
    std::optional<PairClassification> acyclic_counterexample;

    PropertyPrediction prediction;

    std::vector<SizeStats> per_size;
    long long pair_count = 0;  // admissible pairs covered (or samples drawn)
    long long unit_count = 0;  // classified units

    std::vector<PairClassification> classified;  // filled only when collect_pairs
};

struct ScanOptions {
    ScanMode mode = ScanMode::symmetry_reduced;
    long long cap = kDefaultCap;
    int workers = 1;
    double budget_seconds = 0;  // 0 = unlimited
    bool collect_pairs = false;
    // shard i-of-n: classify only units with ordinal % shard_count == shard_index;
    // sharded reports never conclude "holds" on their own (merge them first)
    int shard_index = 0;
    int shard_count = 1;
};

/// Inputs for rebuilding a report from a classification stream. The scanner
/// and the merge command both run through summarize_stream, so a merged
/// report is field-for-field identical to an uninterrupted scan.
struct StreamSummaryInput {
    ScanMode mode = ScanMode::symmetry_reduced;
    int max_size = 0;
    long long cap = kDefaultCap;
    bool coverage_complete = true;
    std::vector<int> skipped_sizes;
    bool allow_holds = true;
    std::vector<std::pair<int, long long>> per_size_pairs_total;  // size -> full-space count
};

GroupScanReport summarize_stream(const AbelianGroup& g, const StreamSummaryInput& in,
                                 std::vector<PairClassification> stream, bool collect);

// Orbit representative of (A,B) under A -> A+t (t in G) and simultaneous unit
// scaling (A,B) -> (cA,cB); minimal (A,B) in lexicographic order. Finite
// cyclic groups only; everything else gets the identity key.
SubsetPair canonicalize_pair(const AbelianGroup& g, const SubsetPair& pair);

// Estimated number of admissible pairs with sizes 1..max_size (saturating).
unsigned long long admissible_pair_estimate(long long group_order, int max_size);

// Classifies every admissible pair of sizes 1..max_size (up to symmetry in
// symmetry_reduced mode). Throws std::invalid_argument for infinite groups,
// max_size out of range, or an infeasible unbudgeted scan.
GroupScanReport scan_group(const AbelianGroup& g, int max_size, const ScanOptions& opt);

// Seeded sampling probe of Z^rank restricted to the window [-w,w]^rank.
// Verdict "holds" is never emitted: sampling yields fails(witness) or
// inconclusive by design.
GroupScanReport scan_torsion_free(int rank, long long window, int max_size, int samples,
                                  std::uint64_t seed, const ScanOptions& opt);

struct PrimeVerdict {
    long long p = 0;
    int max_size_used = 0;
    GroupScanReport scan;
};

// Per-prime acyclic/matching classification at sizes 1..min(max_size, p-1).
std::vector<PrimeVerdict> classify_primes(const std::vector<long long>& primes, int max_size,
                                          const ScanOptions& opt);

// Lexicographic pair-key comparison used for witness minimality: size first,
// then A's coordinate sequence, then B's.
bool pair_key_less(const SubsetPair& x, const SubsetPair& y);

}  // namespace matchkit
