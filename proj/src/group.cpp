#include "matchkit/group.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace matchkit {

AbelianGroup::AbelianGroup(std::vector<long long> torsion_factors, int free_rank)
    : torsion_factors_(std::move(torsion_factors)), free_rank_(free_rank) {
    if (torsion_factors_.empty() && free_rank_ <= 0)
        throw std::invalid_argument("AbelianGroup: empty signature");
    if (free_rank_ < 0) throw std::invalid_argument("AbelianGroup: negative free rank");
    for (long long n : torsion_factors_)
        if (n < 2) throw std::invalid_argument("AbelianGroup: torsion factor must be >= 2");
}

AbelianGroup AbelianGroup::parse(const std::string& descriptor) {
    std::string s;
    for (char c : descriptor)
        if (!std::isspace((unsigned char)c)) s += (char)std::tolower((unsigned char)c);
    if (s.empty()) throw std::invalid_argument("group descriptor: empty");

    std::vector<long long> torsion;
    int rank = 0;
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] == 'z') {
            std::size_t j = i + 1;
            while (j < s.size() && std::isdigit((unsigned char)s[j])) ++j;
            if (j == i + 1) throw std::invalid_argument("group descriptor: expected modulus after 'z'");
            torsion.push_back(std::stoll(s.substr(i + 1, j - i - 1)));
            i = j;
        } else if (s.compare(i, 4, "free") == 0) {
            std::size_t j = i + 4;
            while (j < s.size() && std::isdigit((unsigned char)s[j])) ++j;
            if (j == i + 4) throw std::invalid_argument("group descriptor: expected rank after 'free'");
            rank += (int)std::stoll(s.substr(i + 4, j - i - 4));
            i = j;
        } else {
            throw std::invalid_argument("group descriptor: unexpected token in '" + descriptor + "'");
        }
        if (i < s.size()) {
            if (s[i] != 'x')
                throw std::invalid_argument("group descriptor: expected 'x' between factors");
            ++i;
            if (i == s.size()) throw std::invalid_argument("group descriptor: trailing 'x'");
        }
    }
    return AbelianGroup(std::move(torsion), rank);
}

std::string AbelianGroup::descriptor() const {
    std::string out;
    for (long long n : torsion_factors_) {
        if (!out.empty()) out += "x";
        out += "z" + std::to_string(n);
    }
    if (free_rank_ > 0) {
        if (!out.empty()) out += "x";
        out += "free" + std::to_string(free_rank_);
    }
    return out;
}

long long AbelianGroup::order() const {
    if (!is_finite()) throw std::domain_error("order: group is infinite");
    long long n = 1;
    for (long long f : torsion_factors_) {
        if (n > (1ll << 62) / f) throw std::overflow_error("order: too large");
        n *= f;
    }
    return n;
}

GroupElement AbelianGroup::zero() const { return GroupElement(arity(), 0); }

void AbelianGroup::check_element(const GroupElement& x) const {
    if (x.size() != arity())
        throw std::invalid_argument("element arity " + std::to_string(x.size()) +
                                    " does not match group " + descriptor());
}

GroupElement AbelianGroup::normalize(GroupElement x) const {
    check_element(x);
    for (std::size_t i = 0; i < torsion_factors_.size(); ++i) {
        long long n = torsion_factors_[i];
        long long v = x[i] % n;
        if (v < 0) v += n;
        x[i] = v;
    }
    return x;
}

GroupElement AbelianGroup::add(const GroupElement& x, const GroupElement& y) const {
    check_element(x);
    check_element(y);
    GroupElement z(arity());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = x[i] + y[i];
    return normalize(std::move(z));
}

GroupElement AbelianGroup::neg(const GroupElement& x) const {
    check_element(x);
    GroupElement z(arity());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = -x[i];
    return normalize(std::move(z));
}

bool AbelianGroup::is_zero(const GroupElement& x) const {
    check_element(x);
    for (long long v : x)
        if (v != 0) return false;
    return true;
}

GroupElement AbelianGroup::element_at(long long index) const {
    if (!is_finite()) throw std::domain_error("element_at: group is infinite");
    if (index < 0 || index >= order()) throw std::out_of_range("element_at: index");
    GroupElement x(arity());
    // lexicographic order = most significant coordinate first
    for (std::size_t i = torsion_factors_.size(); i-- > 0;) {
        x[i] = index % torsion_factors_[i];
        index /= torsion_factors_[i];
    }
    return x;
}

long long AbelianGroup::index_of(const GroupElement& x) const {
    if (!is_finite()) throw std::domain_error("index_of: group is infinite");
    check_element(x);
    long long idx = 0;
    for (std::size_t i = 0; i < torsion_factors_.size(); ++i) {
        long long v = x[i];
        if (v < 0 || v >= torsion_factors_[i])
            throw std::invalid_argument("index_of: element not normalized");
        idx = idx * torsion_factors_[i] + v;
    }
    return idx;
}

SubsetPair validate_pair(const AbelianGroup& g,
                         std::vector<GroupElement> a,
                         std::vector<GroupElement> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("validate_pair: empty set");
    if (a.size() != b.size())
        throw std::invalid_argument("validate_pair: size mismatch |A|=" +
                                    std::to_string(a.size()) + " |B|=" + std::to_string(b.size()));
    for (auto& x : a) x = g.normalize(std::move(x));
    for (auto& x : b) x = g.normalize(std::move(x));
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (std::adjacent_find(a.begin(), a.end()) != a.end())
        throw std::invalid_argument("validate_pair: duplicate element in A");
    if (std::adjacent_find(b.begin(), b.end()) != b.end())
        throw std::invalid_argument("validate_pair: duplicate element in B");
    SubsetPair p;
    p.zero_in_b = std::binary_search(b.begin(), b.end(), g.zero());
    p.a = std::move(a);
    p.b = std::move(b);
    return p;
}

std::string format_element(const GroupElement& x) {
    std::string out;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(x[i]);
    }
    return out;
}

GroupElement parse_element(const AbelianGroup& g, const std::string& text) {
    GroupElement x;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) throw std::invalid_argument("element: empty coordinate in '" + text + "'");
        x.push_back(std::stoll(tok));
    }
    return g.normalize(std::move(x));
}

std::vector<GroupElement> parse_element_list(const AbelianGroup& g, const std::string& text) {
    std::vector<std::string> chunks;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ';')) chunks.push_back(tok);
    // arity-1 convenience: "0,2" is a list of singleton tuples
    if (chunks.size() == 1 && g.arity() == 1 &&
        chunks[0].find(',') != std::string::npos) {
        chunks.clear();
        std::stringstream cs(text);
        while (std::getline(cs, tok, ',')) chunks.push_back(tok);
    }
    std::vector<GroupElement> out;
    for (const auto& c : chunks) out.push_back(parse_element(g, c));
    return out;
}

}  // namespace matchkit
