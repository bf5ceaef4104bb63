#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "matchkit/group_scanner.hpp"
#include "matchkit/linear_matching.hpp"

namespace matchkit {

inline constexpr const char* kToolVersion = "matchkit 1.0.0";
inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::json;

// --- JSON forms of the domain objects --------------------------------------

Json element_json(const GroupElement& e);
GroupElement element_from_json(const Json& j);
Json matching_json(const Matching& m);  // array of [a, b] coordinate pairs
Matching matching_from_json(const Json& j);
Json fingerprint_json(const Fingerprint& fp);  // object keyed by serialized elements
Json subset_pair_json(const SubsetPair& p);
Json subspace_json(const FieldTower& t, const Subspace& s);  // element-string rows
Subspace subspace_from_json(const FieldTower& t, const Json& j, int ambient_hint = -1);
Json kmatrix_json(const Mat& m);  // matrix of base-field scalars as strings
Mat kmatrix_from_json(const BaseField& k, const Json& j);

// --- replayable certificates ------------------------------------------------

Json group_unmatchable_certificate(const AbelianGroup& g, const SubsetPair& pair);
Json group_no_acyclic_certificate(const AbelianGroup& g, const SubsetPair& pair,
                                  long long cap = kDefaultCap);
Json linear_unmatched_certificate(const FieldTower& t, const Subspace& a, const Subspace& b,
                                  const BasisSeq& failing_basis, const RadoCertificate& rado);
Json linear_no_acyclic_certificate(const FieldTower& t, const AcyclicPairOutcome& outcome);
Json theorem_discrepancy_certificate(const std::string& source, const std::string& statement,
                                     Verdict expected, Verdict observed, Json inner_certificate,
                                     const std::string& replay_command);

struct CertCheck {
    bool valid = false;
    std::string kind;
    std::vector<std::string> notes;
};

// Replays a certificate from its own embedded data; never re-runs a scan.
CertCheck verify_certificate(const Json& cert);

// --- CLI entry ---------------------------------------------------------------

// Full command surface; writes report files per --out and prints to `out`
// otherwise. Returns 0 (completed), 1 (usage/config error, invalid
// certificate), or 2 (completed with theorem-discrepancy certificates).
int run_command(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace matchkit
