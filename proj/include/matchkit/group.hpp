#pragma once

#include <string>
#include <vector>

namespace matchkit {

/// Element of a finitely generated abelian group: one coordinate per torsion
/// factor (reduced into [0, n_i)) followed by free coordinates (unbounded).
/// Lexicographic coordinate order is the canonical element order everywhere.
using GroupElement = std::vector<long long>;

/**
 * Finitely generated abelian group Z/n_1 x ... x Z/n_k x Z^r, described by
 * its explicit factor list. Finite iff free_rank == 0. Immutable after
 * construction.
 */
class AbelianGroup {
public:
    AbelianGroup(std::vector<long long> torsion_factors, int free_rank);

    // Descriptor grammar: z<n>, products z<n1>xz<n2>..., free<k>. Spaces
    // around 'x' are tolerated.
    static AbelianGroup parse(const std::string& descriptor);
    std::string descriptor() const;

    const std::vector<long long>& torsion_factors() const { return torsion_factors_; }
    int free_rank() const { return free_rank_; }
    std::size_t arity() const { return torsion_factors_.size() + (std::size_t)free_rank_; }
    bool is_finite() const { return free_rank_ == 0; }
    bool is_cyclic() const { return free_rank_ == 0 && torsion_factors_.size() == 1; }
    long long order() const;  // throws for infinite groups

    GroupElement zero() const;
    GroupElement normalize(GroupElement x) const;
    GroupElement add(const GroupElement& x, const GroupElement& y) const;
    GroupElement neg(const GroupElement& x) const;
    bool is_zero(const GroupElement& x) const;

    // Finite groups only: bijection {0..order-1} <-> elements, mixed radix in
    // canonical (lexicographic) order.
    GroupElement element_at(long long index) const;
    long long index_of(const GroupElement& x) const;

    void check_element(const GroupElement& x) const;  // arity + range check

private:
    std::vector<long long> torsion_factors_;
    int free_rank_;
};

/**
 * Validated pair of equal-size duplicate-free element sets, both in canonical
 * sorted order. 0 in B is recorded, not rejected, so degenerate queries stay
 * expressible.
 */
struct SubsetPair {
    std::vector<GroupElement> a;
    std::vector<GroupElement> b;
    bool zero_in_b = false;

    std::size_t size() const { return a.size(); }
};

SubsetPair validate_pair(const AbelianGroup& g,
                         std::vector<GroupElement> a,
                         std::vector<GroupElement> b);

// Element text form: comma-separated coordinates ("3", "1,2"). Lists of
// elements: ';' between tuples; for arity-1 groups a bare comma list like
// "0,2" is also accepted.
std::string format_element(const GroupElement& x);
GroupElement parse_element(const AbelianGroup& g, const std::string& text);
std::vector<GroupElement> parse_element_list(const AbelianGroup& g, const std::string& text);

}  // namespace matchkit
