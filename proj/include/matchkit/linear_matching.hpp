#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "matchkit/field.hpp"
#include "matchkit/verdict.hpp"

namespace matchkit {

/// Ordered basis of a subspace. Index position matters: a_i pairs with b_i in
/// the matched-basis relation.
struct BasisSeq {
    Subspace parent;
    Mat elems;
};

// validates independence, spanning, and ambient fit
BasisSeq make_basis(const BaseField& k, const Subspace& parent, Mat elems);

/// K-linear map between subspaces, as a matrix over K with respect to the
/// canonical echelon bases: row i holds the codomain coordinates of the image
/// of the i-th domain basis vector.
struct LinearMap {
    Subspace domain;
    Subspace codomain;
    Mat matrix;
};

Vec apply_map(const BaseField& k, const LinearMap& f, const Vec& v);

/// Replayable per-index data for one matched-basis check: the preimage
/// subspaces a_i^{-1}A ∩ B and the spans omitting b_i.
struct IndexCheck {
    Subspace preimage;
    Subspace omit_span;
    bool contained = false;
};

struct MatchedBasisResult {
    bool matched = false;
    std::vector<IndexCheck> checks;
};

MatchedBasisResult is_matched_basis(const FieldTower& t, const BasisSeq& basis_a,
                                    const BasisSeq& basis_b);

/// Feasibility data for the matched-basis search: the annihilators
/// W_i = (a_i^{-1}A ∩ B)⊥ in dual coordinates of B, and the first violated
/// subset condition dim(Σ_{i∈S} W_i) >= |S| when infeasible.
struct RadoCertificate {
    std::vector<Subspace> preimages;
    std::vector<Subspace> annihilators;
    bool feasible = false;
    std::vector<int> violating_subset;
    int violating_dim = 0;
};

std::optional<BasisSeq> find_matched_basis(const FieldTower& t, const BasisSeq& basis_a,
                                           const Subspace& b, RadoCertificate* cert = nullptr);

struct MatchedSubspaceResult {
    bool matched = false;
    long long bases_checked = 0;
    std::optional<BasisSeq> failing_basis;
    std::optional<RadoCertificate> failing_certificate;
};

// Universal quantifier over bases of A, decided by exhaustive enumeration up
// to per-vector scaling and simultaneous reordering (both leave the matched
// relation invariant). Finite base fields only; throws otherwise.
MatchedSubspaceResult is_matched_subspace(const FieldTower& t, const Subspace& a,
                                          const Subspace& b);
// Sampled probe for infinite base fields; never upgrades to a verdict.
MatchedSubspaceResult is_matched_subspace_sampled(const FieldTower& t, const Subspace& a,
                                                  const Subspace& b, int samples,
                                                  std::uint64_t seed);

// AB ∩ A = {0}, the existence criterion for strong matchings
bool strong_matching_exists(const FieldTower& t, const Subspace& a, const Subspace& b);

struct StrongMatchingResult {
    bool strong = false;
    long long bases_checked = 0;
    std::optional<BasisSeq> failing_basis;
};

StrongMatchingResult is_strong_matching(const FieldTower& t, const LinearMap& f);
StrongMatchingResult is_strong_matching_sampled(const FieldTower& t, const LinearMap& f,
                                                int samples, std::uint64_t seed);

// The unique g with a*f(a) = phi(a)*g(phi(a)) pointwise, when it is
// well-defined, linear, and lands in the codomain; nullopt otherwise.
// Finite base fields verify on the full domain, infinite ones through the
// degree-2 homogeneity identity (basis vectors plus pairwise sums).
std::optional<LinearMap> induced_candidate(const FieldTower& t, const LinearMap& f,
                                           const Mat& phi);

struct EquivalenceWitness {
    Mat phi;      // automorphism of A
    LinearMap g;  // equivalent strong matching with f != c*g for every c
};

enum class PhiOutcome { no_candidate, not_invertible, not_strong, scalar_multiple, violation };
std::string to_string(PhiOutcome o);

struct PhiRecord {
    Mat phi;
    PhiOutcome outcome;
    std::optional<Mat> g_matrix;
    std::optional<Rat> scalar;
};

struct AcyclicStrongResult {
    bool acyclic = false;
    std::optional<EquivalenceWitness> violation;
    std::vector<PhiRecord> records;  // per-automorphism outcomes, canonical order
};

// Aut(A) is enumerated exhaustively; finite base fields only.
AcyclicStrongResult is_acyclic_strong_matching(const FieldTower& t, const LinearMap& f);

struct WitnessVerification {
    bool relation_holds = false;
    bool g_invertible = false;
    Tri g_strong = Tri::inconclusive;
    bool scalar_multiple = false;
    bool refutes_acyclicity() const {
        return relation_holds && g_invertible && g_strong == Tri::yes && !scalar_multiple;
    }
};

// Certificate-verification mode: usable over any base field. Over infinite
// bases the strongness of g is only sampled (reported as inconclusive when
// the samples all pass).
WitnessVerification verify_equivalence_witness(const FieldTower& t, const LinearMap& f,
                                               const Mat& phi, const LinearMap& g,
                                               int strong_samples = 64, std::uint64_t seed = 1);

// --- scanners --------------------------------------------------------------

struct LinearScanOptions {
    int workers = 1;
    double budget_seconds = 0;
    bool collect_pairs = false;
};

struct LinearPairClassification {
    Subspace a;
    Subspace b;
    bool matched = false;
    long long bases_checked = 0;
    std::optional<BasisSeq> failing_basis;
    std::optional<RadoCertificate> failing_certificate;
};

struct LinearPropertyScanReport {
    std::string tower;
    int dim = 0;
    long long a_count = 0;
    long long b_count = 0;  // admissible B (1 not in B)
    long long pairs = 0;
    long long matched_pairs = 0;
    bool coverage_complete = true;
    Verdict property = Verdict::inconclusive;
    std::optional<LinearPairClassification> counterexample;  // canonical-least
    std::optional<Verdict> predicted;  // intermediate-subfield reading
    std::string prediction_source;
    std::vector<LinearPairClassification> classified;  // collect_pairs only
};

// Exhaustive classification of all n-dimensional pairs (A,B) with 1 not in B
// by is_matched_subspace. Finite towers over F_p.
LinearPropertyScanReport linear_property_scan(const FieldTower& t, int dim,
                                              const LinearScanOptions& opt);

struct StrongMatchingRefutation {
    Mat f_matrix;
    Mat phi;
    Mat g_matrix;
    // how the other automorphisms came out (no-candidate / not-strong / ...)
    std::map<std::string, long long> phi_outcome_counts;
};

struct AcyclicPairOutcome {
    Subspace a;
    Subspace b;
    long long iso_count = 0;
    long long strong_count = 0;
    bool theorem_anomaly = false;  // some isomorphism not strong despite AB∩A={0}
    bool acyclic_found = false;
    std::optional<Mat> acyclic_matrix;  // the witnessing strong matching
    std::map<std::string, long long> witness_phi_outcomes;  // its automorphism table
    std::vector<StrongMatchingRefutation> refutations;  // one per strong f when none acyclic
};

struct LinearAcyclicScanReport {
    std::string tower;
    int dim = 0;
    ScanMode mode = ScanMode::exhaustive;
    long long pairs_considered = 0;
    long long pairs_admissible = 0;  // nonzero, equi-dimensional, AB∩A={0}
    long long pairs_acyclic = 0;
    bool coverage_complete = true;
    bool theorem_anomaly = false;
    Verdict property = Verdict::inconclusive;
    std::optional<AcyclicPairOutcome> counterexample;
    std::optional<Verdict> predicted;
    std::string prediction_source;
    // sampling parameters (transcendental towers)
    int samples = 0;
    int max_degree = 0;
    std::uint64_t seed = 0;
    std::vector<AcyclicPairOutcome> outcomes;  // collect_pairs only
};

// Exhaustive over all admissible pairs of a finite tower.
LinearAcyclicScanReport acyclic_linear_scan(const FieldTower& t, int dim,
                                            const LinearScanOptions& opt);
// Seeded sampling over polynomial-generated pairs of fp(p)(t) towers.
LinearAcyclicScanReport acyclic_linear_scan_sampled(const FieldTower& t, int dim, int max_degree,
                                                    int samples, std::uint64_t seed,
                                                    const LinearScanOptions& opt);

}  // namespace matchkit
