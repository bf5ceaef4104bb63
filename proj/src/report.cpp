#include "matchkit/report.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "matchkit/rng.hpp"

namespace matchkit {

// --- JSON forms -------------------------------------------------------------

Json element_json(const GroupElement& e) { return Json(e); }

GroupElement element_from_json(const Json& j) {
    GroupElement e;
    for (const auto& c : j) e.push_back(c.get<long long>());
    return e;
}

Json matching_json(const Matching& m) {
    Json out = Json::array();
    for (const auto& [a, b] : m.pairs) out.push_back(Json::array({element_json(a), element_json(b)}));
    return out;
}

Matching matching_from_json(const Json& j) {
    Matching m;
    for (const auto& entry : j)
        m.pairs.emplace_back(element_from_json(entry.at(0)), element_from_json(entry.at(1)));
    return m;
}

Json fingerprint_json(const Fingerprint& fp) {
    Json out = Json::object();
    for (const auto& [x, c] : fp.counts) out[format_element(x)] = c;
    return out;
}

Json subset_pair_json(const SubsetPair& p) {
    Json a = Json::array(), b = Json::array();
    for (const auto& e : p.a) a.push_back(element_json(e));
    for (const auto& e : p.b) b.push_back(element_json(e));
    return Json{{"a", a}, {"b", b}, {"zero_in_b", p.zero_in_b}};
}

namespace {

SubsetPair subset_pair_from_json(const AbelianGroup& g, const Json& j) {
    std::vector<GroupElement> a, b;
    for (const auto& e : j.at("a")) a.push_back(element_from_json(e));
    for (const auto& e : j.at("b")) b.push_back(element_from_json(e));
    return validate_pair(g, std::move(a), std::move(b));
}

}  // namespace

Json subspace_json(const FieldTower& t, const Subspace& s) {
    Json rows = Json::array();
    for (const auto& r : s.rows) rows.push_back(t.format_element(r));
    return Json{{"ambient_dim", s.ambient_dim}, {"rows", rows}};
}

Subspace subspace_from_json(const FieldTower& t, const Json& j, int ambient_hint) {
    int ambient = j.contains("ambient_dim") ? j.at("ambient_dim").get<int>() : ambient_hint;
    if (ambient <= 0) throw std::invalid_argument("subspace JSON: missing ambient_dim");
    Mat rows;
    for (const auto& r : j.at("rows")) rows.push_back(t.parse_element(r.get<std::string>()));
    return span(t.base(), ambient, std::move(rows));
}

Json kmatrix_json(const Mat& m) {
    Json out = Json::array();
    for (const auto& row : m) {
        Json r = Json::array();
        for (const auto& x : row) r.push_back(x.str());
        out.push_back(r);
    }
    return out;
}

Mat kmatrix_from_json(const BaseField& k, const Json& j) {
    Mat m;
    for (const auto& row : j) {
        Vec r;
        for (const auto& x : row) r.push_back(k.parse_scalar(x.get<std::string>()));
        m.push_back(std::move(r));
    }
    return m;
}

// --- certificates -------------------------------------------------------------

namespace {

Json cert_skeleton(const std::string& kind) {
    return Json{{"kind", kind}, {"schema_version", kSchemaVersion}};
}

Json group_instance(const AbelianGroup& g, const SubsetPair& pair) {
    return Json{{"group", g.descriptor()}, {"pair", subset_pair_json(pair)}};
}

}  // namespace

Json group_unmatchable_certificate(const AbelianGroup& g, const SubsetPair& pair) {
    auto w = deficiency_witness(g, pair);
    if (!w) throw std::logic_error("group_unmatchable_certificate: pair is matchable");
    Json s = Json::array(), nb = Json::array();
    for (const auto& e : w->subset_a) s.push_back(element_json(e));
    for (const auto& e : w->neighborhood) nb.push_back(element_json(e));
    Json cert = cert_skeleton("group-unmatchable");
    cert["instance"] = group_instance(g, pair);
    cert["evidence"] = Json{{"deficient_set", s}, {"neighborhood", nb}};
    return cert;
}

Json group_no_acyclic_certificate(const AbelianGroup& g, const SubsetPair& pair, long long cap) {
    auto rep = acyclic_report(g, pair, cap);
    if (!rep.exhaustive)
        throw std::logic_error("group_no_acyclic_certificate: enumeration capped");
    if (!rep.acyclic_matchings.empty())
        throw std::logic_error("group_no_acyclic_certificate: pair has an acyclic matching");
    Json matchings = Json::array();
    Json classes = Json::array();
    // canonical order: flatten classes back into the global matching order
    auto all = enumerate_matchings(g, pair, cap);
    for (const auto& m : all.matchings) matchings.push_back(matching_json(m));
    for (const auto& cls : rep.classes) {
        Json members = Json::array();
        for (const auto& m : cls.matchings) {
            auto it = std::find(all.matchings.begin(), all.matchings.end(), m);
            members.push_back((long long)(it - all.matchings.begin()));
        }
        classes.push_back(Json{{"fingerprint", fingerprint_json(cls.fingerprint)},
                               {"members", members}});
    }
    Json cert = cert_skeleton("group-no-acyclic");
    cert["instance"] = group_instance(g, pair);
    cert["evidence"] = Json{{"matchings", matchings}, {"classes", classes}};
    return cert;
}

Json linear_unmatched_certificate(const FieldTower& t, const Subspace& a, const Subspace& b,
                                  const BasisSeq& failing_basis, const RadoCertificate& rado) {
    Json basis = Json::array();
    for (const auto& v : failing_basis.elems) basis.push_back(t.format_element(v));
    Json pres = Json::array(), anns = Json::array();
    for (const auto& v : rado.preimages) pres.push_back(subspace_json(t, v));
    for (const auto& w : rado.annihilators)
        anns.push_back(Json{{"ambient_dim", w.ambient_dim}, {"rows", kmatrix_json(w.rows)}});
    Json cert = cert_skeleton("linear-unmatched");
    cert["instance"] = Json{{"tower", t.descriptor()},
                            {"a", subspace_json(t, a)},
                            {"b", subspace_json(t, b)}};
    cert["evidence"] = Json{{"failing_basis", basis},
                            {"preimages", pres},
                            {"annihilators", anns},
                            {"violating_subset", rado.violating_subset},
                            {"violating_dim", rado.violating_dim}};
    return cert;
}

Json linear_no_acyclic_certificate(const FieldTower& t, const AcyclicPairOutcome& outcome) {
    Json refs = Json::array();
    for (const auto& r : outcome.refutations)
        refs.push_back(Json{{"f", kmatrix_json(r.f_matrix)},
                            {"phi", kmatrix_json(r.phi)},
                            {"g", kmatrix_json(r.g_matrix)},
                            {"phi_outcomes", Json(r.phi_outcome_counts)}});
    Json cert = cert_skeleton("linear-no-acyclic");
    cert["instance"] = Json{{"tower", t.descriptor()},
                            {"a", subspace_json(t, outcome.a)},
                            {"b", subspace_json(t, outcome.b)}};
    cert["evidence"] = Json{{"iso_count", outcome.iso_count},
                            {"strong_count", outcome.strong_count},
                            {"refutations", refs}};
    return cert;
}

Json theorem_discrepancy_certificate(const std::string& source, const std::string& statement,
                                     Verdict expected, Verdict observed, Json inner_certificate,
                                     const std::string& replay_command) {
    Json cert = cert_skeleton("theorem-discrepancy");
    cert["prediction"] =
        Json{{"source", source}, {"statement", statement}, {"expected", to_string(expected)}};
    cert["observed"] = to_string(observed);
    cert["inner_certificate"] = std::move(inner_certificate);
    cert["replay_command"] = replay_command;
    return cert;
}

// --- certificate verification -------------------------------------------------

namespace {

CertCheck verify_group_unmatchable(const Json& cert) {
    CertCheck out;
    out.kind = "group-unmatchable";
    AbelianGroup g = AbelianGroup::parse(cert.at("instance").at("group").get<std::string>());
    SubsetPair pair = subset_pair_from_json(g, cert.at("instance").at("pair"));

    std::vector<GroupElement> s, claimed_nb;
    for (const auto& e : cert.at("evidence").at("deficient_set")) s.push_back(element_from_json(e));
    for (const auto& e : cert.at("evidence").at("neighborhood"))
        claimed_nb.push_back(element_from_json(e));

    for (const auto& a : s)
        if (!std::binary_search(pair.a.begin(), pair.a.end(), a)) {
            out.notes.push_back("deficient set leaves A");
            return out;
        }
    std::vector<GroupElement> nb;
    for (const auto& b : pair.b) {
        bool touched = false;
        for (const auto& a : s)
            if (allowed_edge(g, pair.a, a, b)) {
                touched = true;
                break;
            }
        if (touched) nb.push_back(b);
    }
    if (nb != claimed_nb) {
        out.notes.push_back("neighborhood mismatch");
        return out;
    }
    if (nb.size() >= s.size()) {
        out.notes.push_back("no Hall violation: |N(S)| >= |S|");
        return out;
    }
    if (find_matching(g, pair).has_value()) {
        out.notes.push_back("matcher found a matching");
        return out;
    }
    out.notes.push_back("Hall violator replayed: |S|=" + std::to_string(s.size()) +
                        ", |N(S)|=" + std::to_string(nb.size()));
    out.valid = true;
    return out;
}

CertCheck verify_group_no_acyclic(const Json& cert) {
    CertCheck out;
    out.kind = "group-no-acyclic";
    AbelianGroup g = AbelianGroup::parse(cert.at("instance").at("group").get<std::string>());
    SubsetPair pair = subset_pair_from_json(g, cert.at("instance").at("pair"));

    const Json& listed = cert.at("evidence").at("matchings");
    auto res = enumerate_matchings(g, pair, std::max<long long>((long long)listed.size() + 1, 16));
    if (!res.exhaustive) {
        out.notes.push_back("re-enumeration hit the cap");
        return out;
    }
    if (res.matchings.size() != listed.size()) {
        out.notes.push_back("matching count mismatch");
        return out;
    }
    for (std::size_t i = 0; i < listed.size(); ++i) {
        Matching m = matching_from_json(listed[i]);
        if (!(m == res.matchings[i]) || !is_valid_matching(g, pair, m)) {
            out.notes.push_back("matching " + std::to_string(i) + " does not replay");
            return out;
        }
    }
    std::map<Fingerprint, int> sizes;
    for (const auto& m : res.matchings) sizes[fingerprint(g, m)]++;
    for (const auto& [fp, count] : sizes)
        if (count == 1) {
            out.notes.push_back("found a singleton fingerprint class (acyclic matching exists)");
            return out;
        }
    out.notes.push_back("replayed " + std::to_string(res.matchings.size()) +
                        " matchings; every fingerprint class has size >= 2");
    out.valid = true;
    return out;
}

CertCheck verify_linear_unmatched(const Json& cert) {
    CertCheck out;
    out.kind = "linear-unmatched";
    FieldTower t = FieldTower::parse(cert.at("instance").at("tower").get<std::string>());
    const BaseField& k = t.base();
    Subspace a = subspace_from_json(t, cert.at("instance").at("a"));
    Subspace b = subspace_from_json(t, cert.at("instance").at("b"));

    Mat basis;
    for (const auto& e : cert.at("evidence").at("failing_basis"))
        basis.push_back(t.parse_element(e.get<std::string>()));
    BasisSeq ba = make_basis(k, a, basis);

    const Json& pres = cert.at("evidence").at("preimages");
    const Json& anns = cert.at("evidence").at("annihilators");
    std::vector<Subspace> ws;
    for (std::size_t i = 0; i < ba.elems.size(); ++i) {
        Subspace v = preimage_in(t, b, ba.elems[i], a);
        if (!(v == subspace_from_json(t, pres.at(i)))) {
            out.notes.push_back("preimage " + std::to_string(i) + " mismatch");
            return out;
        }
        Subspace w = annihilator(k, v, b);
        Subspace claimed;
        claimed.ambient_dim = anns.at(i).at("ambient_dim").get<int>();
        claimed.rows = kmatrix_from_json(k, anns.at(i).at("rows"));
        if (!(w == claimed)) {
            out.notes.push_back("annihilator " + std::to_string(i) + " mismatch");
            return out;
        }
        ws.push_back(std::move(w));
    }
    std::vector<int> subset = cert.at("evidence").at("violating_subset").get<std::vector<int>>();
    Mat stacked;
    for (int i : subset) {
        if (i < 0 || i >= (int)ws.size()) {
            out.notes.push_back("violating subset index out of range");
            return out;
        }
        stacked.insert(stacked.end(), ws[(std::size_t)i].rows.begin(), ws[(std::size_t)i].rows.end());
    }
    int dim = stacked.empty() ? 0 : rank(k, stacked);
    if (dim != cert.at("evidence").at("violating_dim").get<int>() || dim >= (int)subset.size()) {
        out.notes.push_back("independent-transversal condition not violated");
        return out;
    }
    out.notes.push_back("transversal obstruction replayed: " + std::to_string(subset.size()) +
                        " annihilators span only dimension " + std::to_string(dim));

    // belt and braces on desk-scale instances: try literally every ordered basis
    if (k.is_finite()) {
        Mat nonzero;
        for (auto& v : subspace_vectors(k, b))
            if (!t.is_zero(v)) nonzero.push_back(v);
        double estimate = 1;
        for (int i = 0; i < b.dim(); ++i) estimate *= (double)nonzero.size();
        if (estimate <= 65536.0) {
            Mat tuple;
            bool found = false;
            std::function<void(int)> rec = [&](int depth) {
                if (found) return;
                if (depth == b.dim()) {
                    BasisSeq bb;
                    bb.parent = b;
                    bb.elems = tuple;
                    if (is_matched_basis(t, ba, bb).matched) found = true;
                    return;
                }
                for (const auto& v : nonzero) {
                    tuple.push_back(v);
                    if (rank(k, tuple) == (int)tuple.size()) rec(depth + 1);
                    tuple.pop_back();
                    if (found) return;
                }
            };
            rec(0);
            if (found) {
                out.notes.push_back("brute force found a matched basis; certificate is wrong");
                return out;
            }
            out.notes.push_back("all-bases brute force confirms no matched partner exists");
        }
    }
    out.valid = true;
    return out;
}

CertCheck verify_linear_no_acyclic(const Json& cert) {
    CertCheck out;
    out.kind = "linear-no-acyclic";
    FieldTower t = FieldTower::parse(cert.at("instance").at("tower").get<std::string>());
    const BaseField& k = t.base();
    if (!k.is_finite()) {
        out.notes.push_back("exhaustive replay needs a finite base field");
        return out;
    }
    Subspace a = subspace_from_json(t, cert.at("instance").at("a"));
    Subspace b = subspace_from_json(t, cert.at("instance").at("b"));

    if (!strong_matching_exists(t, a, b)) {
        out.notes.push_back("pair is not admissible (AB ∩ A != {0})");
        return out;
    }
    const Json& refs = cert.at("evidence").at("refutations");
    long long strong_seen = 0;
    for (const Mat& m : enumerate_invertible(k, a.dim())) {
        LinearMap f{a, b, m};
        if (!is_strong_matching(t, f).strong) continue;
        ++strong_seen;
        const Json* entry = nullptr;
        for (const auto& r : refs)
            if (kmatrix_from_json(k, r.at("f")) == m) {
                entry = &r;
                break;
            }
        if (!entry) {
            out.notes.push_back("a strong matching has no refutation entry");
            return out;
        }
        Mat phi = kmatrix_from_json(k, entry->at("phi"));
        LinearMap g{a, b, kmatrix_from_json(k, entry->at("g"))};
        auto check = verify_equivalence_witness(t, f, phi, g);
        if (!check.refutes_acyclicity()) {
            out.notes.push_back("a refutation entry does not refute");
            return out;
        }
    }
    if (strong_seen != cert.at("evidence").at("strong_count").get<long long>()) {
        out.notes.push_back("strong matching count mismatch");
        return out;
    }
    if (strong_seen == 0) {
        out.notes.push_back("no strong matchings at all despite AB ∩ A = {0}");
        // still a valid failure witness for the acyclic property, but flag it
    }
    out.notes.push_back("every strong matching (" + std::to_string(strong_seen) +
                        ") replayed with a verified equivalent non-scalar partner");
    out.valid = true;
    return out;
}

CertCheck verify_theorem_discrepancy(const Json& cert) {
    CertCheck out;
    out.kind = "theorem-discrepancy";
    std::string expected = cert.at("prediction").at("expected").get<std::string>();
    std::string observed = cert.at("observed").get<std::string>();
    if (expected == observed) {
        out.notes.push_back("no discrepancy: expected == observed");
        return out;
    }
    const Json& inner = cert.at("inner_certificate");
    if (inner.is_null()) {
        out.notes.push_back(
            "exhaustion-based discrepancy; replay with: " +
            cert.value("replay_command", std::string("<unknown>")));
        out.valid = true;
        return out;
    }
    CertCheck sub = verify_certificate(inner);
    out.notes.push_back("inner " + sub.kind + ": " + (sub.valid ? "valid" : "INVALID"));
    for (const auto& n : sub.notes) out.notes.push_back("  " + n);
    out.valid = sub.valid;
    return out;
}

}  // namespace

CertCheck verify_certificate(const Json& cert) {
    try {
        std::string kind = cert.at("kind").get<std::string>();
        if (kind == "group-unmatchable") return verify_group_unmatchable(cert);
        if (kind == "group-no-acyclic") return verify_group_no_acyclic(cert);
        if (kind == "linear-unmatched") return verify_linear_unmatched(cert);
        if (kind == "linear-no-acyclic") return verify_linear_no_acyclic(cert);
        if (kind == "theorem-discrepancy") return verify_theorem_discrepancy(cert);
        CertCheck out;
        out.kind = kind;
        out.notes.push_back("unknown certificate kind");
        return out;
    } catch (const std::exception& e) {
        CertCheck out;
        out.kind = cert.is_object() && cert.contains("kind") && cert["kind"].is_string()
                       ? cert["kind"].get<std::string>()
                       : "?";
        out.notes.push_back(std::string("exception during replay: ") + e.what());
        return out;
    }
}

// --- report bodies ------------------------------------------------------------

namespace {

Json pair_classification_json(const PairClassification& pc) {
    Json out{{"pair", subset_pair_json(pc.pair)},
             {"matchable", pc.matchable},
             {"matching_count", pc.matching_count},
             {"count_exhaustive", pc.count_exhaustive},
             {"has_acyclic", to_string(pc.has_acyclic)}};
    if (pc.some_matching) out["some_matching"] = matching_json(*pc.some_matching);
    if (pc.acyclic_witness) out["acyclic_witness"] = matching_json(*pc.acyclic_witness);
    return out;
}

// recompute a counterexample's full classification; keeps scan and merge
// bodies identical whether or not witnesses were carried in the stream
PairClassification reclassify(const AbelianGroup& g, const SubsetPair& pair, long long cap) {
    PairClassification pc;
    pc.pair = pair;
    auto m = find_matching(g, pair);
    pc.matchable = m.has_value();
    if (!pc.matchable) {
        pc.has_acyclic = Tri::no;
        pc.count_exhaustive = true;
        return pc;
    }
    pc.some_matching = std::move(m);
    auto rep = acyclic_report(g, pair, cap);
    pc.matching_count = rep.total_matchings;
    pc.count_exhaustive = rep.exhaustive;
    if (!rep.exhaustive) pc.has_acyclic = Tri::inconclusive;
    else if (!rep.acyclic_matchings.empty()) {
        pc.has_acyclic = Tri::yes;
        pc.acyclic_witness = rep.acyclic_matchings.front();
    } else {
        pc.has_acyclic = Tri::no;
    }
    return pc;
}

std::string matching_statement(const std::string& source) {
    if (source == "torsion-free")
        return "torsion-free abelian groups have the matching property";
    if (source == "prime-order-cyclic")
        return "cyclic groups of prime order have the matching property";
    return "groups that are neither torsion-free nor cyclic of prime order lack the matching "
           "property";
}

std::string acyclic_statement(const std::string& source) {
    if (source == "torsion-free")
        return "torsion-free abelian groups have the acyclic matching property";
    return "groups without the matching property lack the acyclic matching property";
}

// verdict vs prediction; appends a discrepancy certificate when they clash
void reconcile(Json& results, std::vector<Json>& certs, const std::string& property_name,
               const std::optional<Verdict>& predicted, Verdict observed,
               const std::string& source, const std::string& statement, Json inner,
               const std::string& replay) {
    Json pred = Json(nullptr);
    if (predicted) {
        pred = Json{{"expected", to_string(*predicted)}, {"source", source}};
        if (observed != Verdict::inconclusive) {
            bool agree = *predicted == observed;
            pred["agreement"] = agree;
            if (!agree)
                certs.push_back(theorem_discrepancy_certificate(source, statement, *predicted,
                                                                observed, std::move(inner),
                                                                replay));
        }
    }
    results["prediction"][property_name] = pred;
}

Json group_scan_results(const AbelianGroup& g, const GroupScanReport& rep,
                        std::vector<Json>& certs, const std::string& replay) {
    Json per_size = Json::array();
    for (const auto& st : rep.per_size)
        per_size.push_back(Json{{"size", st.size},
                                {"pairs", st.pairs_total},
                                {"units", st.units_classified},
                                {"matchable", st.matchable},
                                {"acyclic_true", st.acyclic_yes},
                                {"acyclic_false", st.acyclic_no},
                                {"acyclic_inconclusive", st.acyclic_inconclusive}});
    Json results{{"coverage_complete", rep.coverage_complete},
                 {"skipped_sizes", rep.skipped_sizes},
                 {"pair_count", rep.pair_count},
                 {"unit_count", rep.unit_count},
                 {"per_size", per_size},
                 {"verdicts",
                  Json{{"matching_property", to_string(rep.matching_property)},
                       {"acyclic_matching_property", to_string(rep.acyclic_property)}}}};

    Json counterexamples = Json::array();
    Json matching_inner = Json(nullptr);
    Json acyclic_inner = Json(nullptr);
    if (rep.matching_counterexample) {
        PairClassification pc = reclassify(g, rep.matching_counterexample->pair, rep.cap);
        Json cx = pair_classification_json(pc);
        cx["property"] = "matching";
        Json cert = group_unmatchable_certificate(g, pc.pair);
        matching_inner = cert;
        cx["certificate_index"] = (long long)certs.size();
        certs.push_back(std::move(cert));
        counterexamples.push_back(std::move(cx));
    }
    if (rep.acyclic_counterexample) {
        PairClassification pc = reclassify(g, rep.acyclic_counterexample->pair, rep.cap);
        Json cx = pair_classification_json(pc);
        cx["property"] = "acyclic_matching";
        Json cert = pc.matchable ? group_no_acyclic_certificate(g, pc.pair, rep.cap)
                                 : group_unmatchable_certificate(g, pc.pair);
        acyclic_inner = cert;
        cx["certificate_index"] = (long long)certs.size();
        certs.push_back(std::move(cert));
        counterexamples.push_back(std::move(cx));
    }
    results["counterexamples"] = counterexamples;

    reconcile(results, certs, "matching_property", rep.prediction.matching,
              rep.matching_property, rep.prediction.source,
              matching_statement(rep.prediction.source), std::move(matching_inner), replay);
    reconcile(results, certs, "acyclic_matching_property", rep.prediction.acyclic,
              rep.acyclic_property, rep.prediction.source,
              acyclic_statement(rep.prediction.source), std::move(acyclic_inner), replay);
    return results;
}

Json linear_property_results(const FieldTower& t, const LinearPropertyScanReport& rep,
                             std::vector<Json>& certs, const std::string& replay) {
    Json results{{"a_count", rep.a_count},
                 {"b_count", rep.b_count},
                 {"pairs", rep.pairs},
                 {"matched_pairs", rep.matched_pairs},
                 {"coverage_complete", rep.coverage_complete},
                 {"verdict", to_string(rep.property)}};
    Json inner = Json(nullptr);
    if (rep.counterexample) {
        const auto& cx = *rep.counterexample;
        Json j{{"a", subspace_json(t, cx.a)},
               {"b", subspace_json(t, cx.b)},
               {"bases_checked", cx.bases_checked}};
        Json cert = linear_unmatched_certificate(t, cx.a, cx.b, *cx.failing_basis,
                                                 *cx.failing_certificate);
        inner = cert;
        j["certificate_index"] = (long long)certs.size();
        certs.push_back(std::move(cert));
        results["counterexample"] = std::move(j);
    } else {
        results["counterexample"] = Json(nullptr);
    }
    reconcile(results, certs, "linear_matching_property", rep.predicted, rep.property,
              rep.prediction_source,
              "the linear matching property holds exactly when no proper intermediate field "
              "sits strictly between the base and the extension",
              std::move(inner), replay);
    return results;
}

Json linear_acyclic_results(const FieldTower& t, const LinearAcyclicScanReport& rep,
                            std::vector<Json>& certs, const std::string& replay) {
    Json results{{"mode", to_string(rep.mode)},
                 {"pairs_considered", rep.pairs_considered},
                 {"pairs_admissible", rep.pairs_admissible},
                 {"pairs_acyclic", rep.pairs_acyclic},
                 {"coverage_complete", rep.coverage_complete},
                 {"theorem_anomaly", rep.theorem_anomaly},
                 {"verdict", to_string(rep.property)}};
    if (rep.mode == ScanMode::sampled) {
        results["samples"] = rep.samples;
        results["max_degree"] = rep.max_degree;
    }
    Json inner = Json(nullptr);
    if (rep.counterexample) {
        Json cert = linear_no_acyclic_certificate(t, *rep.counterexample);
        inner = cert;
        results["counterexample"] = Json{{"a", subspace_json(t, rep.counterexample->a)},
                                         {"b", subspace_json(t, rep.counterexample->b)},
                                         {"certificate_index", (long long)certs.size()}};
        certs.push_back(std::move(cert));
    } else {
        results["counterexample"] = Json(nullptr);
    }
    if (rep.mode == ScanMode::exhaustive && !rep.outcomes.empty()) {
        // verbose surface: automorphism outcome tables of the found witnesses
        Json per_pair = Json::array();
        for (const auto& o : rep.outcomes)
            per_pair.push_back(Json{{"a", subspace_json(t, o.a)},
                                    {"b", subspace_json(t, o.b)},
                                    {"acyclic_found", o.acyclic_found},
                                    {"strong_count", o.strong_count},
                                    {"witness", o.acyclic_matrix ? kmatrix_json(*o.acyclic_matrix)
                                                                 : Json(nullptr)},
                                    {"witness_phi_outcomes", Json(o.witness_phi_outcomes)}});
        results["pairs"] = per_pair;
    }
    reconcile(results, certs, "linear_acyclic_matching_property", rep.predicted, rep.property,
              rep.prediction_source,
              "purely transcendental extensions satisfy the linear acyclic matching property",
              std::move(inner), replay);
    if (rep.theorem_anomaly)
        certs.push_back(theorem_discrepancy_certificate(
            "strong-matching-criterion",
            "when AB ∩ A = {0}, every isomorphism A -> B is a strong matching",
            Verdict::holds, Verdict::fails, Json(nullptr), replay));
    return results;
}

// --- JSONL pair streams and merge ----------------------------------------------

Json pair_line(const PairClassification& pc) {
    return Json{{"type", "pair"},
                {"size", (long long)pc.pair.size()},
                {"a", [&] {
                     Json a = Json::array();
                     for (const auto& e : pc.pair.a) a.push_back(element_json(e));
                     return a;
                 }()},
                {"b", [&] {
                     Json b = Json::array();
                     for (const auto& e : pc.pair.b) b.push_back(element_json(e));
                     return b;
                 }()},
                {"matchable", pc.matchable},
                {"matching_count", pc.matching_count},
                {"count_exhaustive", pc.count_exhaustive},
                {"has_acyclic", to_string(pc.has_acyclic)}};
}

Tri tri_from_string(const std::string& s) {
    if (s == "true") return Tri::yes;
    if (s == "false") return Tri::no;
    if (s == "inconclusive") return Tri::inconclusive;
    throw std::invalid_argument("bad tri-state '" + s + "'");
}

void write_pair_stream(const std::string& path, const Json& manifest,
                       const GroupScanReport& rep, int shard_index, int shard_count) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open pair stream file " + path);
    f << manifest.dump() << "\n";
    f << Json{{"type", "shard"}, {"index", shard_index}, {"count", shard_count}}.dump() << "\n";
    for (const auto& pc : rep.classified) f << pair_line(pc).dump() << "\n";
    Json per_size = Json::array();
    for (const auto& st : rep.per_size)
        per_size.push_back(Json::array({st.size, st.pairs_total}));
    f << Json{{"type", "summary"},
              {"coverage_complete", rep.coverage_complete},
              {"skipped_sizes", rep.skipped_sizes},
              {"per_size_pairs", per_size}}
             .dump()
      << "\n";
}

struct StreamFile {
    Json manifest;
    int shard_index = 0;
    int shard_count = 1;
    Json summary;
    std::vector<PairClassification> pairs;
};

StreamFile read_pair_stream(const std::string& path, const AbelianGroup& g) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open pair stream file " + path);
    StreamFile out;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        Json j = Json::parse(line);
        std::string type = j.at("type").get<std::string>();
        if (type == "manifest") {
            out.manifest = j;
        } else if (type == "shard") {
            out.shard_index = j.at("index").get<int>();
            out.shard_count = j.at("count").get<int>();
        } else if (type == "summary") {
            out.summary = j;
        } else if (type == "pair") {
            PairClassification pc;
            std::vector<GroupElement> a, b;
            for (const auto& e : j.at("a")) a.push_back(element_from_json(e));
            for (const auto& e : j.at("b")) b.push_back(element_from_json(e));
            pc.pair = validate_pair(g, std::move(a), std::move(b));
            pc.matchable = j.at("matchable").get<bool>();
            pc.matching_count = j.at("matching_count").get<long long>();
            pc.count_exhaustive = j.at("count_exhaustive").get<bool>();
            pc.has_acyclic = tri_from_string(j.at("has_acyclic").get<std::string>());
            out.pairs.push_back(std::move(pc));
        } else {
            throw std::runtime_error("unknown stream line type '" + type + "'");
        }
    }
    if (out.manifest.is_null()) throw std::runtime_error(path + ": missing manifest line");
    if (out.summary.is_null()) throw std::runtime_error(path + ": missing summary line");
    return out;
}

// --- run plumbing -----------------------------------------------------------------

std::string utc_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

std::string join_command_line(const std::vector<std::string>& args) {
    std::string out = "matchkit";
    for (const auto& a : args) {
        out += " ";
        if (a.find(' ') != std::string::npos) out += "\"" + a + "\"";
        else out += a;
    }
    return out;
}

struct RunContext {
    std::string command_line;
    std::string started_at;
    int workers = 1;
    double budget = 0;
};

Json assemble_report(const RunContext& ctx, const std::string& kind, Json parameters,
                     Json results, std::vector<Json> certificates) {
    Json body{{"schema_version", kSchemaVersion},
              {"tool_version", kToolVersion},
              {"kind", kind},
              {"parameters", std::move(parameters)},
              {"results", std::move(results)},
              {"certificates", Json(certificates)}};
    Json header{{"command_line", ctx.command_line},
                {"started_at", ctx.started_at},
                {"finished_at", utc_now()},
                {"workers", ctx.workers}};
    if (ctx.budget > 0) header["budget_seconds"] = ctx.budget;
    return Json{{"header", std::move(header)}, {"body", std::move(body)}};
}

int exit_code_for(const Json& report) {
    for (const auto& cert : report.at("body").at("certificates"))
        if (cert.at("kind") == "theorem-discrepancy") return 2;
    return 0;
}

void emit_report(const Json& report, const std::string& out_path, std::ostream& out) {
    if (out_path.empty()) {
        out << report.dump(2) << "\n";
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output file " + out_path);
        f << report.dump(2) << "\n";
    }
}

std::string derive_pairs_path(const std::string& out_path) {
    if (out_path.empty())
        throw std::invalid_argument("--emit-pairs needs --out (or --pairs-out) to name the stream");
    std::string base = out_path;
    if (base.size() > 5 && base.substr(base.size() - 5) == ".json")
        base = base.substr(0, base.size() - 5);
    return base + ".pairs.jsonl";
}

}  // namespace

// --- the CLI -----------------------------------------------------------------------

int run_command(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"exact workbench for matchings in abelian groups and field extensions",
                 "matchkit"};
    app.require_subcommand(1);

    RunContext ctx;
    ctx.command_line = join_command_line(args);
    ctx.started_at = utc_now();

    // shared option storage
    std::string group_desc, set_a, set_b, tower_desc, gens_a, gens_b, basis_a;
    std::string out_path, pairs_out, certificate_path, shard = "0/1", mode_str = "symmetry_reduced";
    std::string primes_str;
    long long cap = kDefaultCap;
    int workers = 1, max_size = 0, dim = 0, rank_opt = 1, samples = 0, check_isos = 0,
        max_deg = 0;
    long long window = 10;
    unsigned long long seed = 0;
    double budget = 0;
    bool emit_pairs = false;
    std::vector<std::string> merge_inputs;

    auto add_out = [&](CLI::App* cmd) { cmd->add_option("--out", out_path, "write the report here"); };
    auto add_perf = [&](CLI::App* cmd) {
        cmd->add_option("--workers", workers, "worker threads")->check(CLI::Range(1, 256));
        cmd->add_option("--budget", budget, "wall-clock budget in seconds");
        cmd->add_option("--cap", cap, "matching enumeration cap")->check(CLI::PositiveNumber);
    };

    auto* match = app.add_subcommand("match", "decide/enumerate matchings of one pair");
    CLI::App* match_sub[3];
    const char* match_names[3] = {"find", "enumerate", "acyclic"};
    for (int i = 0; i < 3; ++i) {
        auto* c = match->add_subcommand(match_names[i]);
        c->add_option("--group", group_desc)->required();
        c->add_option("--set-a", set_a)->required();
        c->add_option("--set-b", set_b)->required();
        c->add_option("--cap", cap)->check(CLI::PositiveNumber);
        add_out(c);
        match_sub[i] = c;
    }

    auto* scan = app.add_subcommand("scan", "exhaustive / sampled property scans");
    auto* scan_group_cmd = scan->add_subcommand("group", "classify all admissible pairs");
    scan_group_cmd->add_option("--group", group_desc)->required();
    scan_group_cmd->add_option("--max-size", max_size)->required()->check(CLI::PositiveNumber);
    scan_group_cmd->add_option("--mode", mode_str)
        ->check(CLI::IsMember({"exhaustive", "symmetry_reduced"}));
    scan_group_cmd->add_flag("--emit-pairs", emit_pairs, "write the JSONL per-pair stream");
    scan_group_cmd->add_option("--pairs-out", pairs_out, "pair stream path");
    scan_group_cmd->add_option("--shard", shard, "I/N work partition for merge");
    add_perf(scan_group_cmd);
    add_out(scan_group_cmd);

    auto* scan_primes_cmd = scan->add_subcommand("primes", "per-prime acyclic classification");
    scan_primes_cmd->add_option("--primes", primes_str)->required();
    scan_primes_cmd->add_option("--max-size", max_size)->required()->check(CLI::PositiveNumber);
    scan_primes_cmd->add_option("--mode", mode_str)
        ->check(CLI::IsMember({"exhaustive", "symmetry_reduced"}));
    add_perf(scan_primes_cmd);
    add_out(scan_primes_cmd);

    auto* scan_free_cmd = scan->add_subcommand("free", "seeded sampling of Z^k windows");
    scan_free_cmd->add_option("--rank", rank_opt)->check(CLI::PositiveNumber);
    scan_free_cmd->add_option("--window", window)->required()->check(CLI::PositiveNumber);
    scan_free_cmd->add_option("--samples", samples)->required()->check(CLI::PositiveNumber);
    scan_free_cmd->add_option("--seed", seed);
    scan_free_cmd->add_option("--max-size", max_size)->check(CLI::PositiveNumber);
    add_perf(scan_free_cmd);
    add_out(scan_free_cmd);

    auto* linear = app.add_subcommand("linear", "linear matching procedures");
    auto* strong_cmd = linear->add_subcommand("strong-check", "AB∩A criterion for one pair");
    strong_cmd->add_option("--tower", tower_desc)->required();
    strong_cmd->add_option("--a", gens_a)->required();
    strong_cmd->add_option("--b", gens_b)->required();
    strong_cmd->add_option("--check-isos", check_isos, "verify this many isomorphisms");
    strong_cmd->add_option("--seed", seed);
    add_out(strong_cmd);

    auto* matched_cmd = linear->add_subcommand("matched-check", "matched bases / subspaces");
    matched_cmd->add_option("--tower", tower_desc)->required();
    matched_cmd->add_option("--a", gens_a)->required();
    matched_cmd->add_option("--b", gens_b)->required();
    matched_cmd->add_option("--basis-a", basis_a, "ordered basis of A to match");
    std::string basis_b;
    matched_cmd->add_option("--basis-b", basis_b, "check this basis of B against --basis-a");
    matched_cmd->add_option("--samples", samples, "sampled mode size (infinite base fields)");
    matched_cmd->add_option("--seed", seed);
    add_out(matched_cmd);

    auto* prop_cmd = linear->add_subcommand("scan-property", "linear matching property scan");
    prop_cmd->add_option("--tower", tower_desc)->required();
    prop_cmd->add_option("--dim", dim)->required()->check(CLI::PositiveNumber);
    add_perf(prop_cmd);
    add_out(prop_cmd);

    auto* acyc_cmd = linear->add_subcommand("scan-acyclic", "linear acyclic matching scan");
    acyc_cmd->add_option("--tower", tower_desc)->required();
    acyc_cmd->add_option("--dim", dim)->required()->check(CLI::PositiveNumber);
    acyc_cmd->add_option("--max-deg", max_deg, "generator degree bound (sampled towers)");
    acyc_cmd->add_option("--samples", samples);
    acyc_cmd->add_option("--seed", seed);
    bool collect_outcomes = false;
    acyc_cmd->add_flag("--pairs", collect_outcomes, "embed the per-pair outcome table");
    add_perf(acyc_cmd);
    add_out(acyc_cmd);

    auto* verify_cmd = app.add_subcommand("verify", "replay a witness certificate");
    verify_cmd->add_option("--certificate", certificate_path)->required();
    add_out(verify_cmd);

    auto* merge_cmd = app.add_subcommand("merge", "merge sharded pair streams into one report");
    merge_cmd->add_option("inputs", merge_inputs, "JSONL shard files")->required();
    merge_cmd->add_option("--out", out_path);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        // collapse CLI11's error-code zoo onto the documented usage-error code
        return app.exit(e, out, err) == 0 ? 0 : 1;
    }

    try {
        ctx.workers = workers;
        ctx.budget = budget;
        Json report;

        if (match_sub[0]->parsed() || match_sub[1]->parsed() || match_sub[2]->parsed()) {
            AbelianGroup g = AbelianGroup::parse(group_desc);
            SubsetPair pair =
                validate_pair(g, parse_element_list(g, set_a), parse_element_list(g, set_b));
            Json params{{"group", g.descriptor()},
                        {"set_a", set_a},
                        {"set_b", set_b},
                        {"cap", cap}};
            std::vector<Json> certs;
            Json results;
            std::string kind;
            if (match_sub[0]->parsed()) {
                kind = "match-find";
                auto m = find_matching(g, pair);
                results["matchable"] = m.has_value();
                results["matching"] = m ? matching_json(*m) : Json(nullptr);
                if (!m) certs.push_back(group_unmatchable_certificate(g, pair));
            } else if (match_sub[1]->parsed()) {
                kind = "match-enumerate";
                auto res = enumerate_matchings(g, pair, cap);
                results["count"] = (long long)res.matchings.size();
                results["exhaustive"] = res.exhaustive;
                Json ms = Json::array();
                for (const auto& m : res.matchings) ms.push_back(matching_json(m));
                results["matchings"] = ms;
            } else {
                kind = "match-acyclic";
                auto rep = acyclic_report(g, pair, cap);
                results["total_matchings"] = rep.total_matchings;
                results["exhaustive"] = rep.exhaustive;
                Json classes = Json::array();
                for (const auto& cls : rep.classes) {
                    Json ms = Json::array();
                    for (const auto& m : cls.matchings) ms.push_back(matching_json(m));
                    classes.push_back(Json{{"fingerprint", fingerprint_json(cls.fingerprint)},
                                           {"matchings", ms}});
                }
                results["classes"] = classes;
                Json acyclic = Json::array();
                for (const auto& m : rep.acyclic_matchings) acyclic.push_back(matching_json(m));
                results["acyclic_matchings"] = acyclic;
                if (rep.exhaustive && rep.acyclic_matchings.empty()) {
                    certs.push_back(rep.total_matchings == 0 && !find_matching(g, pair)
                                        ? group_unmatchable_certificate(g, pair)
                                        : group_no_acyclic_certificate(g, pair, cap));
                }
            }
            report = assemble_report(ctx, kind, params, results, certs);
        } else if (scan_group_cmd->parsed()) {
            AbelianGroup g = AbelianGroup::parse(group_desc);
            ScanOptions opt;
            opt.mode = scan_mode_from_string(mode_str);
            opt.cap = cap;
            opt.workers = workers;
            opt.budget_seconds = budget;
            auto slash = shard.find('/');
            if (slash == std::string::npos) throw std::invalid_argument("--shard must be I/N");
            opt.shard_index = (int)std::stoll(shard.substr(0, slash));
            opt.shard_count = (int)std::stoll(shard.substr(slash + 1));
            opt.collect_pairs = emit_pairs || !pairs_out.empty();

            GroupScanReport rep = scan_group(g, max_size, opt);
            Json params{{"group", g.descriptor()},
                        {"max_size", max_size},
                        {"mode", to_string(opt.mode)},
                        {"cap", cap},
                        {"shard", shard}};
            std::vector<Json> certs;
            std::string replay = "matchkit scan group --group " + g.descriptor() +
                                 " --max-size " + std::to_string(max_size) + " --mode " +
                                 to_string(opt.mode);
            Json results = group_scan_results(g, rep, certs, replay);
            report = assemble_report(ctx, "group-scan", params, results, certs);
            if (opt.collect_pairs) {
                // stream path is run metadata: keep it out of the comparable body
                std::string path = pairs_out.empty() ? derive_pairs_path(out_path) : pairs_out;
                Json manifest{{"type", "manifest"},
                              {"kind", "group-scan"},
                              {"schema_version", kSchemaVersion},
                              {"tool_version", kToolVersion},
                              {"parameters",
                               Json{{"group", g.descriptor()},
                                    {"max_size", max_size},
                                    {"mode", to_string(opt.mode)},
                                    {"cap", cap}}}};
                write_pair_stream(path, manifest, rep, opt.shard_index, opt.shard_count);
                report["header"]["pair_stream"] = path;
            }
        } else if (scan_primes_cmd->parsed()) {
            std::vector<long long> primes;
            std::stringstream ss(primes_str);
            std::string tok;
            while (std::getline(ss, tok, ',')) primes.push_back(std::stoll(tok));
            ScanOptions opt;
            opt.mode = scan_mode_from_string(mode_str);
            opt.cap = cap;
            opt.workers = workers;
            opt.budget_seconds = budget;
            auto verdicts = classify_primes(primes, max_size, opt);
            Json params{{"primes", primes},
                        {"max_size", max_size},
                        {"mode", to_string(opt.mode)},
                        {"cap", cap}};
            std::vector<Json> certs;
            Json per_prime = Json::array();
            for (const auto& v : verdicts) {
                AbelianGroup g({v.p}, 0);
                std::string replay = "matchkit scan primes --primes " + std::to_string(v.p) +
                                     " --max-size " + std::to_string(max_size);
                Json entry{{"p", v.p}, {"max_size_used", v.max_size_used}};
                entry["results"] = group_scan_results(g, v.scan, certs, replay);
                per_prime.push_back(std::move(entry));
            }
            report = assemble_report(ctx, "prime-scan", params,
                                     Json{{"per_prime", per_prime}}, certs);
        } else if (scan_free_cmd->parsed()) {
            if (max_size == 0) max_size = 5;
            ScanOptions opt;
            opt.cap = cap;
            opt.workers = workers;
            opt.budget_seconds = budget;
            GroupScanReport rep = scan_torsion_free(rank_opt, window, max_size, samples, seed, opt);
            Json params{{"rank", rank_opt},
                        {"window", window},
                        {"samples", samples},
                        {"seed", seed},
                        {"max_size", max_size},
                        {"cap", cap}};
            std::vector<Json> certs;
            AbelianGroup g({}, rank_opt);
            std::string replay = "matchkit scan free --rank " + std::to_string(rank_opt) +
                                 " --window " + std::to_string(window) + " --samples " +
                                 std::to_string(samples) + " --seed " + std::to_string(seed) +
                                 " --max-size " + std::to_string(max_size);
            Json results = group_scan_results(g, rep, certs, replay);
            report = assemble_report(ctx, "free-scan", params, results, certs);
        } else if (strong_cmd->parsed()) {
            FieldTower t = FieldTower::parse(tower_desc);
            const BaseField& k = t.base();
            auto parse_gens = [&](const std::string& s) {
                Mat m;
                std::stringstream gs(s);
                std::string g;
                while (std::getline(gs, g, ',')) m.push_back(t.parse_element(g));
                int ambient = t.kind() == TowerKind::transcendental ? 1 : t.degree();
                for (const auto& v : m) ambient = std::max(ambient, (int)v.size());
                return span(k, ambient, std::move(m));
            };
            Subspace a = parse_gens(gens_a), b = parse_gens(gens_b);
            bool exists = strong_matching_exists(t, a, b);
            Subspace prod = product_subspaces(t, a, b);
            Subspace meet = intersect_subspaces(
                k, prod, a.ambient_dim == prod.ambient_dim ? a : embed(a, prod.ambient_dim));
            Json results{{"exists", exists},
                         {"a", subspace_json(t, a)},
                         {"b", subspace_json(t, b)},
                         {"product", subspace_json(t, prod)},
                         {"product_intersect_a_dim", meet.dim()}};
            if (check_isos > 0) {
                Json checks = Json::array();
                bool consistent = true;
                if (k.is_finite()) {
                    auto isos = enumerate_invertible(k, a.dim());
                    DetRng rng(seed);
                    for (int i = 0; i < check_isos && !isos.empty(); ++i) {
                        const Mat& m = isos[(std::size_t)rng.bounded(isos.size())];
                        bool strong = is_strong_matching(t, LinearMap{a, b, m}).strong;
                        consistent = consistent && (strong == exists);
                        checks.push_back(Json{{"map", kmatrix_json(m)},
                                              {"strong", strong},
                                              {"mode", "exhaustive-bases"}});
                    }
                } else {
                    results["note"] = "infinite base field: strongness checks are sampled";
                }
                results["iso_checks"] = checks;
                results["iso_checks_consistent"] = consistent;
            }
            std::vector<Json> certs;
            if (check_isos > 0 && results.contains("iso_checks_consistent") &&
                results["iso_checks_consistent"] == false)
                certs.push_back(theorem_discrepancy_certificate(
                    "strong-matching-criterion",
                    "a strong matching exists exactly when AB ∩ A = {0}, and then every "
                    "isomorphism is one",
                    Verdict::holds, Verdict::fails, Json(nullptr), ctx.command_line));
            report = assemble_report(ctx, "linear-strong-check",
                                     Json{{"tower", t.descriptor()}, {"a", gens_a}, {"b", gens_b}},
                                     results, certs);
        } else if (matched_cmd->parsed()) {
            FieldTower t = FieldTower::parse(tower_desc);
            const BaseField& k = t.base();
            auto parse_gens = [&](const std::string& s) {
                Mat m;
                std::stringstream gs(s);
                std::string g;
                while (std::getline(gs, g, ',')) m.push_back(t.parse_element(g));
                return m;
            };
            Mat agens = parse_gens(gens_a), bgens = parse_gens(gens_b);
            int ambient = t.kind() == TowerKind::transcendental ? 1 : t.degree();
            for (const auto& v : agens) ambient = std::max(ambient, (int)v.size());
            for (const auto& v : bgens) ambient = std::max(ambient, (int)v.size());
            Subspace a = span(k, ambient, agens), b = span(k, ambient, bgens);
            std::vector<Json> certs;
            Json results;
            auto index_checks_json = [&](const BasisSeq& ba, const BasisSeq& bb) {
                auto chk = is_matched_basis(t, ba, bb);
                Json checks = Json::array();
                for (const auto& c : chk.checks)
                    checks.push_back(Json{{"preimage", subspace_json(t, c.preimage)},
                                          {"omit_span", subspace_json(t, c.omit_span)},
                                          {"contained", c.contained}});
                return std::pair<bool, Json>(chk.matched, checks);
            };
            if (!basis_a.empty() && !basis_b.empty()) {
                BasisSeq ba = make_basis(k, a, parse_gens(basis_a));
                BasisSeq bb = make_basis(k, b, parse_gens(basis_b));
                auto [matched, checks] = index_checks_json(ba, bb);
                results["query"] = "matched-basis-pair";
                results["matched"] = matched;
                results["index_checks"] = checks;
            } else if (!basis_a.empty()) {
                BasisSeq ba = make_basis(k, a, parse_gens(basis_a));
                RadoCertificate rado;
                auto found = find_matched_basis(t, ba, b, &rado);
                results["query"] = "matched-basis";
                results["found"] = found.has_value();
                if (found) {
                    Json rows = Json::array();
                    for (const auto& v : found->elems) rows.push_back(t.format_element(v));
                    results["basis_b"] = rows;
                    results["index_checks"] = index_checks_json(ba, *found).second;
                } else {
                    results["basis_b"] = Json(nullptr);
                    certs.push_back(linear_unmatched_certificate(t, a, b, ba, rado));
                }
            } else if (!k.is_finite()) {
                if (samples <= 0)
                    throw std::invalid_argument(
                        "infinite base field: the universal quantifier over bases is "
                        "unsupported; pass --samples for the sampled mode");
                auto res = is_matched_subspace_sampled(t, a, b, samples, seed);
                results["query"] = "matched-subspace";
                results["mode"] = "sampled";
                results["samples"] = samples;
                results["matched_so_far"] = res.matched;
                if (!res.matched)
                    certs.push_back(linear_unmatched_certificate(t, a, b, *res.failing_basis,
                                                                 *res.failing_certificate));
            } else {
                auto res = is_matched_subspace(t, a, b);
                results["query"] = "matched-subspace";
                results["mode"] = "exhaustive";
                results["matched"] = res.matched;
                results["bases_checked"] = res.bases_checked;
                if (!res.matched)
                    certs.push_back(linear_unmatched_certificate(t, a, b, *res.failing_basis,
                                                                 *res.failing_certificate));
            }
            report = assemble_report(
                ctx, "linear-matched-check",
                Json{{"tower", t.descriptor()}, {"a", gens_a}, {"b", gens_b}, {"basis_a", basis_a}},
                results, certs);
        } else if (prop_cmd->parsed()) {
            FieldTower t = FieldTower::parse(tower_desc);
            LinearScanOptions opt;
            opt.workers = workers;
            opt.budget_seconds = budget;
            auto rep = linear_property_scan(t, dim, opt);
            std::vector<Json> certs;
            std::string replay = "matchkit linear scan-property --tower \"" + t.descriptor() +
                                 "\" --dim " + std::to_string(dim);
            Json results = linear_property_results(t, rep, certs, replay);
            report = assemble_report(ctx, "linear-property-scan",
                                     Json{{"tower", t.descriptor()}, {"dim", dim}}, results,
                                     certs);
        } else if (acyc_cmd->parsed()) {
            FieldTower t = FieldTower::parse(tower_desc);
            LinearScanOptions opt;
            opt.workers = workers;
            opt.budget_seconds = budget;
            opt.collect_pairs = collect_outcomes;
            LinearAcyclicScanReport rep;
            Json params{{"tower", t.descriptor()}, {"dim", dim}};
            if (t.kind() == TowerKind::transcendental) {
                if (max_deg <= 0 || samples <= 0)
                    throw std::invalid_argument(
                        "transcendental towers need --max-deg and --samples");
                rep = acyclic_linear_scan_sampled(t, dim, max_deg, samples, seed, opt);
                params["max_degree"] = max_deg;
                params["samples"] = samples;
                params["seed"] = seed;
            } else {
                rep = acyclic_linear_scan(t, dim, opt);
            }
            std::vector<Json> certs;
            std::string replay = "matchkit linear scan-acyclic --tower \"" + t.descriptor() +
                                 "\" --dim " + std::to_string(dim);
            Json results = linear_acyclic_results(t, rep, certs, replay);
            report = assemble_report(ctx, "linear-acyclic-scan", params, results, certs);
        } else if (verify_cmd->parsed()) {
            std::ifstream f(certificate_path);
            if (!f) throw std::runtime_error("cannot open " + certificate_path);
            Json doc = Json::parse(f);
            std::vector<Json> targets;
            if (doc.contains("body") && doc["body"].contains("certificates"))
                for (const auto& c : doc["body"]["certificates"]) targets.push_back(c);
            else if (doc.contains("kind"))
                targets.push_back(doc);
            else
                throw std::runtime_error("no certificate found in " + certificate_path);
            Json checks = Json::array();
            bool all_valid = true;
            for (const auto& c : targets) {
                CertCheck chk = verify_certificate(c);
                all_valid = all_valid && chk.valid;
                checks.push_back(
                    Json{{"kind", chk.kind}, {"valid", chk.valid}, {"notes", chk.notes}});
            }
            Json results{{"certificates_checked", (long long)targets.size()},
                         {"valid", all_valid},
                         {"checks", checks}};
            report = assemble_report(ctx, "verify", Json{{"certificate", certificate_path}},
                                     results, {});
            emit_report(report, out_path, out);
            return all_valid ? 0 : 1;
        } else if (merge_cmd->parsed()) {
            std::vector<StreamFile> files;
            Json manifest;
            // first pass just to learn the group
            {
                std::ifstream f(merge_inputs[0]);
                if (!f) throw std::runtime_error("cannot open " + merge_inputs[0]);
                std::string line;
                if (!std::getline(f, line)) throw std::runtime_error("empty stream file");
                manifest = Json::parse(line);
                if (manifest.value("type", "") != "manifest")
                    throw std::runtime_error("first line must be the manifest");
            }
            AbelianGroup g =
                AbelianGroup::parse(manifest.at("parameters").at("group").get<std::string>());
            for (const auto& path : merge_inputs) files.push_back(read_pair_stream(path, g));
            for (const auto& sf : files)
                if (sf.manifest != files[0].manifest)
                    throw std::invalid_argument("mixed-manifest merge rejected");
            // shard coverage: every index 0..count-1 exactly once
            int count = files[0].shard_count;
            std::vector<int> seen((std::size_t)count, 0);
            for (const auto& sf : files) {
                if (sf.shard_count != count)
                    throw std::invalid_argument("mixed-manifest merge rejected (shard counts)");
                if (sf.shard_index < 0 || sf.shard_index >= count)
                    throw std::invalid_argument("bad shard index");
                ++seen[(std::size_t)sf.shard_index];
            }
            for (int i = 0; i < count; ++i)
                if (seen[(std::size_t)i] != 1)
                    throw std::invalid_argument("incomplete or duplicated shard set");

            StreamSummaryInput in;
            const Json& params = files[0].manifest.at("parameters");
            in.mode = scan_mode_from_string(params.at("mode").get<std::string>());
            in.max_size = params.at("max_size").get<int>();
            in.cap = params.at("cap").get<long long>();
            in.allow_holds = true;
            for (const auto& sf : files) {
                in.coverage_complete =
                    in.coverage_complete && sf.summary.at("coverage_complete").get<bool>();
            }
            for (const auto& e : files[0].summary.at("per_size_pairs"))
                in.per_size_pairs_total.emplace_back(e.at(0).get<int>(), e.at(1).get<long long>());
            in.skipped_sizes = files[0].summary.at("skipped_sizes").get<std::vector<int>>();
            if (!in.coverage_complete) in.allow_holds = false;

            std::vector<PairClassification> stream;
            for (auto& sf : files)
                for (auto& pc : sf.pairs) stream.push_back(std::move(pc));
            std::sort(stream.begin(), stream.end(),
                      [](const PairClassification& x, const PairClassification& y) {
                          return pair_key_less(x.pair, y.pair);
                      });
            GroupScanReport rep = summarize_stream(g, in, std::move(stream), false);

            Json body_params{{"group", g.descriptor()},
                             {"max_size", in.max_size},
                             {"mode", to_string(in.mode)},
                             {"cap", in.cap},
                             {"shard", "0/1"}};
            std::vector<Json> certs;
            std::string replay = "matchkit scan group --group " + g.descriptor() +
                                 " --max-size " + std::to_string(in.max_size) + " --mode " +
                                 to_string(in.mode);
            Json results = group_scan_results(g, rep, certs, replay);
            report = assemble_report(ctx, "group-scan", body_params, results, certs);
        } else {
            err << "error: no subcommand\n";
            return 1;
        }

        emit_report(report, out_path, out);
        return exit_code_for(report);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace matchkit
