#include "matchkit/group_scanner.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <set>
#include <stdexcept>
#include <thread>

#include "matchkit/rng.hpp"

namespace matchkit {

namespace {

bool is_prime(long long n) {
    if (n < 2) return false;
    for (long long d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

}  // namespace

PropertyPrediction predicted_properties(const AbelianGroup& g) {
    PropertyPrediction p;
    if (g.free_rank() > 0 && g.torsion_factors().empty()) {
        p.matching = Verdict::holds;
        p.acyclic = Verdict::holds;
        p.source = "torsion-free";
    } else if (g.is_cyclic() && is_prime(g.torsion_factors()[0])) {
        p.matching = Verdict::holds;
        p.acyclic = std::nullopt;  // open territory: no claim either way
        p.source = "prime-order-cyclic";
    } else {
        // finite non-prime order, or torsion mixed with free part: the
        // characterization says no matching property, hence no acyclic one
        p.matching = Verdict::fails;
        p.acyclic = Verdict::fails;
        p.source = "neither-torsion-free-nor-prime-cyclic";
    }
    return p;
}

bool pair_key_less(const SubsetPair& x, const SubsetPair& y) {
    if (x.size() != y.size()) return x.size() < y.size();
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
}

SubsetPair canonicalize_pair(const AbelianGroup& g, const SubsetPair& pair) {
    if (!g.is_cyclic()) return pair;  // identity key outside the verified symmetries
    const long long n = g.torsion_factors()[0];

    std::vector<long long> a, b;
    for (const auto& e : pair.a) a.push_back(e[0]);
    for (const auto& e : pair.b) b.push_back(e[0]);

    std::vector<long long> best_a, best_b;
    auto consider = [&](std::vector<long long>& ca, std::vector<long long>& cb) {
        if (best_a.empty() || std::tie(ca, cb) < std::tie(best_a, best_b)) {
            best_a = ca;
            best_b = cb;
        }
    };
    std::vector<long long> ca(a.size()), cb(b.size()), shifted(a.size());
    for (long long c = 1; c < n; ++c) {
        if (std::gcd(c, n) != 1) continue;
        for (std::size_t i = 0; i < a.size(); ++i) ca[i] = (c * a[i]) % n;
        for (std::size_t i = 0; i < b.size(); ++i) cb[i] = (c * b[i]) % n;
        std::sort(cb.begin(), cb.end());
        for (long long t = 0; t < n; ++t) {
            for (std::size_t i = 0; i < a.size(); ++i) shifted[i] = (ca[i] + t) % n;
            std::sort(shifted.begin(), shifted.end());
            consider(shifted, cb);
        }
    }

    std::vector<GroupElement> ra, rb;
    for (long long v : best_a) ra.push_back({v});
    for (long long v : best_b) rb.push_back({v});
    return validate_pair(g, std::move(ra), std::move(rb));
}

unsigned long long admissible_pair_estimate(long long group_order, int max_size) {
    const unsigned long long kSat = ~0ull;
    auto binom = [&](long long nn, long long kk) -> unsigned long long {
        if (kk < 0 || kk > nn) return 0;
        unsigned long long r = 1;
        for (long long i = 1; i <= kk; ++i) {
            if (r > kSat / (unsigned long long)(nn - kk + i)) return kSat;
            r = r * (unsigned long long)(nn - kk + i) / (unsigned long long)i;
        }
        return r;
    };
    unsigned long long total = 0;
    for (int k = 1; k <= max_size; ++k) {
        unsigned long long ca = binom(group_order, k);
        unsigned long long cb = binom(group_order - 1, k);
        if (ca != 0 && cb > kSat / ca) return kSat;
        unsigned long long t = ca * cb;
        if (total > kSat - t) return kSat;
        total += t;
    }
    return total;
}

namespace {

struct Unit {
    SubsetPair pair;
    int size = 0;
};

PairClassification classify_unit(const AbelianGroup& g, const SubsetPair& pair, long long cap) {
    PairClassification pc;
    pc.pair = pair;
    auto m = find_matching(g, pair);
    pc.matchable = m.has_value();
    if (!pc.matchable) {
        pc.matching_count = 0;
        pc.count_exhaustive = true;
        pc.has_acyclic = Tri::no;  // vacuous: no matchings at all
        return pc;
    }
    pc.some_matching = std::move(m);
    auto report = acyclic_report(g, pair, cap);
    pc.matching_count = report.total_matchings;
    pc.count_exhaustive = report.exhaustive;
    if (!report.exhaustive) {
        pc.has_acyclic = Tri::inconclusive;
        return pc;
    }
    if (!report.acyclic_matchings.empty()) {
        pc.has_acyclic = Tri::yes;
        pc.acyclic_witness = report.acyclic_matchings.front();
    } else {
        pc.has_acyclic = Tri::no;
    }
    return pc;
}

// Classifies units[first..] with stride `step`; results land at their unit
// index, keeping the merge canonical no matter how many workers ran.
void classify_range(const AbelianGroup& g, const std::vector<Unit>& units, long long cap,
                    std::size_t first, std::size_t step,
                    std::vector<PairClassification>& results) {
    for (std::size_t i = first; i < units.size(); i += step)
        results[i] = classify_unit(g, units[i].pair, cap);
}

std::vector<PairClassification> classify_all(const AbelianGroup& g,
                                             const std::vector<Unit>& units, long long cap,
                                             int workers) {
    std::vector<PairClassification> results(units.size());
    if (workers <= 1 || units.size() < 2) {
        classify_range(g, units, cap, 0, 1, results);
        return results;
    }
    std::vector<std::thread> pool;
    const std::size_t w = std::min<std::size_t>((std::size_t)workers, units.size());
    pool.reserve(w);
    for (std::size_t t = 0; t < w; ++t)
        pool.emplace_back(classify_range, std::cref(g), std::cref(units), cap, t, w,
                          std::ref(results));
    for (auto& th : pool) th.join();
    return results;
}

// next k-combination of indices in lexicographic order; false when done
bool next_combination(std::vector<int>& c, int n) {
    int k = (int)c.size();
    for (int i = k - 1; i >= 0; --i) {
        if (c[i] < n - k + i) {
            ++c[i];
            for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
            return true;
        }
    }
    return false;
}

}  // namespace

GroupScanReport summarize_stream(const AbelianGroup& g, const StreamSummaryInput& in,
                                 std::vector<PairClassification> stream, bool collect) {
    GroupScanReport rep;
    rep.group = g.descriptor();
    rep.max_size = in.max_size;
    rep.mode = in.mode;
    rep.cap = in.cap;
    rep.coverage_complete = in.coverage_complete;
    rep.skipped_sizes = in.skipped_sizes;

    std::map<int, SizeStats> by_size;
    for (const auto& [size, total] : in.per_size_pairs_total) {
        by_size[size].size = size;
        by_size[size].pairs_total = total;
        rep.pair_count += total;
    }

    bool any_acyclic_inconclusive = false;
    for (const auto& pc : stream) {
        SizeStats& st = by_size[(int)pc.pair.size()];
        st.size = (int)pc.pair.size();
        ++st.units_classified;
        ++rep.unit_count;
        if (pc.matchable) ++st.matchable;
        switch (pc.has_acyclic) {
            case Tri::yes: ++st.acyclic_yes; break;
            case Tri::no: ++st.acyclic_no; break;
            case Tri::inconclusive:
                ++st.acyclic_inconclusive;
                any_acyclic_inconclusive = true;
                break;
        }
        if (!pc.matchable &&
            (!rep.matching_counterexample ||
             pair_key_less(pc.pair, rep.matching_counterexample->pair)))
            rep.matching_counterexample = pc;
        if (pc.has_acyclic == Tri::no &&
            (!rep.acyclic_counterexample ||
             pair_key_less(pc.pair, rep.acyclic_counterexample->pair)))
            rep.acyclic_counterexample = pc;
    }
    for (auto& [size, st] : by_size) rep.per_size.push_back(st);

    const bool conclusive = in.coverage_complete && in.allow_holds;
    if (rep.matching_counterexample) rep.matching_property = Verdict::fails;
    else if (conclusive) rep.matching_property = Verdict::holds;
    else rep.matching_property = Verdict::inconclusive;

    if (rep.acyclic_counterexample) rep.acyclic_property = Verdict::fails;
    else if (conclusive && !any_acyclic_inconclusive) rep.acyclic_property = Verdict::holds;
    else rep.acyclic_property = Verdict::inconclusive;

    if (collect) rep.classified = std::move(stream);
    rep.prediction = predicted_properties(g);
    return rep;
}

GroupScanReport scan_group(const AbelianGroup& g, int max_size, const ScanOptions& opt) {
    if (!g.is_finite()) throw std::invalid_argument("scan_group: group must be finite");
    if (opt.mode == ScanMode::sampled)
        throw std::invalid_argument("scan_group: sampled mode is for torsion-free scans");
    if (opt.shard_count < 1 || opt.shard_index < 0 || opt.shard_index >= opt.shard_count)
        throw std::invalid_argument("scan_group: bad shard");
    const long long order = g.order();
    if (max_size < 1 || max_size > order - 1)
        throw std::invalid_argument("scan_group: max_size must be in [1, |G|-1]");
    const unsigned long long estimate = admissible_pair_estimate(order, max_size);
    if (opt.budget_seconds <= 0 && estimate > 20'000'000ull)
        throw std::invalid_argument(
            "scan_group: ~" + std::to_string(estimate) +
            " admissible pairs; rerun with --budget to accept a partial scan");

    StreamSummaryInput in;
    in.mode = opt.mode;
    in.max_size = max_size;
    in.cap = opt.cap;
    in.allow_holds = opt.shard_count == 1;

    const bool reduce = opt.mode == ScanMode::symmetry_reduced && g.is_cyclic();
    const auto start = std::chrono::steady_clock::now();
    std::vector<PairClassification> stream;
    long long unit_ordinal = 0;

    for (int size = 1; size <= max_size; ++size) {
        if (opt.budget_seconds > 0) {
            std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
            if (elapsed.count() > opt.budget_seconds) {
                in.coverage_complete = false;
                for (int s = size; s <= max_size; ++s) in.skipped_sizes.push_back(s);
                break;
            }
        }
        long long pairs_total = 0;
        std::vector<Unit> units;
        std::vector<int> ac(size), bc(size);
        std::iota(ac.begin(), ac.end(), 0);
        do {
            std::iota(bc.begin(), bc.end(), 1);  // index 0 is the identity
            do {
                ++pairs_total;
                std::vector<GroupElement> a, b;
                a.reserve(size);
                b.reserve(size);
                for (int i : ac) a.push_back(g.element_at(i));
                for (int i : bc) b.push_back(g.element_at(i));
                SubsetPair pair = validate_pair(g, std::move(a), std::move(b));
                if (reduce) {
                    SubsetPair key = canonicalize_pair(g, pair);
                    if (key.a != pair.a || key.b != pair.b) continue;
                }
                if (unit_ordinal++ % opt.shard_count != opt.shard_index) continue;
                units.push_back(Unit{std::move(pair), size});
            } while (next_combination(bc, (int)order));
        } while (next_combination(ac, (int)order));

        auto results = classify_all(g, units, opt.cap, opt.workers);
        for (auto& pc : results) {
            if (!opt.collect_pairs) {
                pc.some_matching.reset();
                pc.acyclic_witness.reset();
            }
            stream.push_back(std::move(pc));
        }
        in.per_size_pairs_total.emplace_back(size, pairs_total);
    }

    return summarize_stream(g, in, std::move(stream), opt.collect_pairs);
}

GroupScanReport scan_torsion_free(int rank, long long window, int max_size, int samples,
                                  std::uint64_t seed, const ScanOptions& opt) {
    if (rank < 1) throw std::invalid_argument("scan_torsion_free: rank must be >= 1");
    if (window < 1) throw std::invalid_argument("scan_torsion_free: window must be >= 1");
    if (max_size < 1) throw std::invalid_argument("scan_torsion_free: max_size must be >= 1");
    if (samples < 1) throw std::invalid_argument("scan_torsion_free: samples must be >= 1");
    double cells = 1;
    for (int i = 0; i < rank && cells < 1e9; ++i) cells *= (double)(2 * window + 1);
    if ((double)max_size >= cells)
        throw std::invalid_argument("scan_torsion_free: window has too few elements for max_size");

    AbelianGroup g({}, rank);
    DetRng rng(seed);
    auto draw_element = [&](bool forbid_zero) {
        GroupElement e(rank);
        while (true) {
            for (int i = 0; i < rank; ++i) e[i] = rng.range(-window, window);
            if (!forbid_zero || !g.is_zero(e)) return e;
        }
    };

    std::vector<Unit> units;
    units.reserve((std::size_t)samples);
    std::vector<long long> per_size((std::size_t)max_size + 1, 0);
    for (int s = 0; s < samples; ++s) {
        int size = (int)rng.range(1, max_size);
        std::set<GroupElement> a, b;
        while ((int)a.size() < size) a.insert(draw_element(false));
        while ((int)b.size() < size) b.insert(draw_element(true));
        units.push_back(Unit{validate_pair(g, {a.begin(), a.end()}, {b.begin(), b.end()}), size});
        ++per_size[(std::size_t)size];
    }

    auto results = classify_all(g, units, opt.cap, opt.workers);
    // keep the drawn order out of it: canonical order like every other stream
    std::sort(results.begin(), results.end(),
              [](const PairClassification& x, const PairClassification& y) {
                  return pair_key_less(x.pair, y.pair);
              });

    StreamSummaryInput in;
    in.mode = ScanMode::sampled;
    in.max_size = max_size;
    in.cap = opt.cap;
    in.allow_holds = false;  // sampling never proves "holds"
    for (int s = 1; s <= max_size; ++s) in.per_size_pairs_total.emplace_back(s, per_size[(std::size_t)s]);

    GroupScanReport rep = summarize_stream(g, in, std::move(results), opt.collect_pairs);
    rep.seed = seed;
    rep.window = window;
    rep.samples_requested = samples;
    return rep;
}

std::vector<PrimeVerdict> classify_primes(const std::vector<long long>& primes, int max_size,
                                          const ScanOptions& opt) {
    std::vector<PrimeVerdict> out;
    for (long long p : primes) {
        if (!is_prime(p)) throw std::invalid_argument("classify_primes: " + std::to_string(p) + " is not prime");
        PrimeVerdict v;
        v.p = p;
        v.max_size_used = (int)std::min<long long>(max_size, p - 1);
        v.scan = scan_group(AbelianGroup({p}, 0), v.max_size_used, opt);
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace matchkit
