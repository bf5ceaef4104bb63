#include "matchkit/group_matching.hpp"

#include <algorithm>
#include <stdexcept>

namespace matchkit {

namespace {

// Adjacency of the allowed-edge graph on local indices: adj[i] has bit j set
// iff A[i] may be matched to B[j]. Sizes beyond 64 are far past the factorial
// horizon of exhaustive enumeration, so the bitmask bound is not a real
// restriction.
std::vector<unsigned long long> build_adjacency(const AbelianGroup& g, const SubsetPair& pair) {
    const std::size_t n = pair.size();
    if (n > 64) throw std::invalid_argument("matching: pair size exceeds 64");
    std::vector<unsigned long long> adj(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            GroupElement s = g.add(pair.a[i], pair.b[j]);
            if (!std::binary_search(pair.a.begin(), pair.a.end(), s))
                adj[i] |= 1ull << j;
        }
    return adj;
}

// Kuhn's augmenting-path search over the bitmask adjacency.
bool try_augment(const std::vector<unsigned long long>& adj, std::size_t i,
                 unsigned long long& visited, std::vector<int>& owner_of_b) {
    unsigned long long cand = adj[i] & ~visited;
    while (cand) {
        int j = __builtin_ctzll(cand);
        cand &= cand - 1;
        visited |= 1ull << j;
        if (owner_of_b[j] < 0 ||
            try_augment(adj, (std::size_t)owner_of_b[j], visited, owner_of_b)) {
            owner_of_b[j] = (int)i;
            return true;
        }
    }
    return false;
}

// Perfect-matching assignment as b-index per a-index, or empty if none.
std::vector<int> max_matching_assignment(const std::vector<unsigned long long>& adj,
                                         std::size_t n, std::size_t* matched_out = nullptr) {
    std::vector<int> owner_of_b(n, -1);
    std::size_t matched = 0;
    for (std::size_t i = 0; i < n; ++i) {
        unsigned long long visited = 0;
        if (try_augment(adj, i, visited, owner_of_b)) ++matched;
    }
    if (matched_out) *matched_out = matched;
    if (matched < n) return {};
    std::vector<int> assign(n, -1);
    for (std::size_t j = 0; j < n; ++j)
        if (owner_of_b[j] >= 0) assign[owner_of_b[j]] = (int)j;
    return assign;
}

Matching assignment_to_matching(const SubsetPair& pair, const std::vector<int>& assign) {
    Matching m;
    m.pairs.reserve(pair.size());
    for (std::size_t i = 0; i < pair.size(); ++i)
        m.pairs.emplace_back(pair.a[i], pair.b[(std::size_t)assign[i]]);
    return m;
}

void enumerate_rec(const std::vector<unsigned long long>& adj, std::size_t i, std::size_t n,
                   unsigned long long used, std::vector<int>& assign, long long cap,
                   std::vector<std::vector<int>>& out, bool& exhausted) {
    if (!exhausted) return;
    if (i == n) {
        if ((long long)out.size() < cap) out.push_back(assign);
        else exhausted = false;
        return;
    }
    unsigned long long cand = adj[i] & ~used;
    while (cand && exhausted) {
        int j = __builtin_ctzll(cand);
        cand &= cand - 1;
        assign[i] = j;
        enumerate_rec(adj, i + 1, n, used | (1ull << j), assign, cap, out, exhausted);
    }
    assign[i] = -1;
}

}  // namespace

bool allowed_edge(const AbelianGroup& g, const std::vector<GroupElement>& a_set,
                  const GroupElement& a, const GroupElement& b) {
    GroupElement s = g.add(a, b);
    return !std::binary_search(a_set.begin(), a_set.end(), s);
}

std::optional<Matching> find_matching(const AbelianGroup& g, const SubsetPair& pair) {
    auto adj = build_adjacency(g, pair);
    auto assign = max_matching_assignment(adj, pair.size());
    if (assign.empty()) return std::nullopt;
    return assignment_to_matching(pair, assign);
}

EnumerationResult enumerate_matchings(const AbelianGroup& g, const SubsetPair& pair,
                                      long long cap) {
    if (cap <= 0) throw std::invalid_argument("enumerate_matchings: cap must be positive");
    auto adj = build_adjacency(g, pair);
    const std::size_t n = pair.size();

    EnumerationResult res;
    // Quick infeasibility cut; avoids walking dead branches of large pairs.
    if (max_matching_assignment(adj, n).empty()) return res;

    std::vector<std::vector<int>> raw;
    std::vector<int> assign(n, -1);
    bool exhausted = true;
    enumerate_rec(adj, 0, n, 0, assign, cap, raw, exhausted);
    res.exhaustive = exhausted;
    res.matchings.reserve(raw.size());
    for (const auto& as : raw) res.matchings.push_back(assignment_to_matching(pair, as));
    return res;
}

Fingerprint fingerprint(const AbelianGroup& g, const Matching& f) {
    Fingerprint fp;
    for (const auto& [a, b] : f.pairs) fp.counts[g.add(a, b)]++;
    return fp;
}

AcyclicReport acyclic_report(const AbelianGroup& g, const SubsetPair& pair, long long cap) {
    auto enumerated = enumerate_matchings(g, pair, cap);
    AcyclicReport report;
    report.exhaustive = enumerated.exhaustive;
    report.total_matchings = (long long)enumerated.matchings.size();

    std::map<Fingerprint, std::vector<Matching>> groups;
    for (auto& m : enumerated.matchings) groups[fingerprint(g, m)].push_back(std::move(m));
    for (auto& [fp, members] : groups) {
        FingerprintClass cls;
        cls.fingerprint = fp;
        cls.matchings = std::move(members);
        report.classes.push_back(std::move(cls));
    }
    if (report.exhaustive) {
        for (const auto& cls : report.classes)
            if (cls.matchings.size() == 1) report.acyclic_matchings.push_back(cls.matchings[0]);
    } else {
        // capped enumeration cannot certify any class as a singleton
        report.classes.clear();
        report.acyclic_matchings.clear();
    }
    return report;
}

std::optional<DeficiencyWitness> deficiency_witness(const AbelianGroup& g,
                                                    const SubsetPair& pair) {
    auto adj = build_adjacency(g, pair);
    const std::size_t n = pair.size();
    std::vector<int> owner_of_b(n, -1);
    std::size_t matched = 0;
    for (std::size_t i = 0; i < n; ++i) {
        unsigned long long visited = 0;
        if (try_augment(adj, i, visited, owner_of_b)) ++matched;
    }
    if (matched == n) return std::nullopt;

    std::vector<bool> a_matched(n, false);
    for (std::size_t j = 0; j < n; ++j)
        if (owner_of_b[j] >= 0) a_matched[(std::size_t)owner_of_b[j]] = true;
    std::size_t root = 0;
    while (root < n && a_matched[root]) ++root;

    // alternating-path closure from an exposed row; König gives |N(S)| = |S|-1
    unsigned long long in_s = 1ull << root, seen_b = 0;
    std::vector<std::size_t> queue = {root};
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        unsigned long long fresh = adj[queue[qi]] & ~seen_b;
        while (fresh) {
            int j = __builtin_ctzll(fresh);
            fresh &= fresh - 1;
            seen_b |= 1ull << j;
            int owner = owner_of_b[(std::size_t)j];
            if (owner >= 0 && !(in_s & (1ull << owner))) {
                in_s |= 1ull << owner;
                queue.push_back((std::size_t)owner);
            }
        }
    }
    DeficiencyWitness w;
    for (std::size_t i = 0; i < n; ++i)
        if (in_s & (1ull << i)) w.subset_a.push_back(pair.a[i]);
    for (std::size_t j = 0; j < n; ++j)
        if (seen_b & (1ull << j)) w.neighborhood.push_back(pair.b[j]);
    return w;
}

bool is_valid_matching(const AbelianGroup& g, const SubsetPair& pair, const Matching& f) {
    if (f.pairs.size() != pair.size()) return false;
    std::vector<GroupElement> firsts, seconds;
    for (const auto& [a, b] : f.pairs) {
        firsts.push_back(a);
        seconds.push_back(b);
        if (!allowed_edge(g, pair.a, a, b)) return false;
    }
    std::sort(firsts.begin(), firsts.end());
    std::sort(seconds.begin(), seconds.end());
    return firsts == pair.a && seconds == pair.b;
}

}  // namespace matchkit
