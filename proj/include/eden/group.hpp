#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eden/common.hpp"

namespace eden {

// A group element in canonical encoding. For the abelian kinds `data` holds
// one integer per axis (cycle/torus coordinates reduced into [0,L)); for
// free groups it holds a reduced word, letter g in 1..k, inverse as -g.
struct Element {
    std::vector<std::int64_t> data;

    bool operator==(const Element& o) const { return data == o.data; }
    bool operator!=(const Element& o) const { return data != o.data; }
    bool operator<(const Element& o) const { return data < o.data; }
};

struct ParityInfo {
    bool bipartite = true;
    std::optional<int> odd_girth;  // odd, >= 3 when present
    std::optional<int> mu_g;       // smallest k with closed paths of every length >= k
};

class GroupSpec {
public:
    enum class Kind { IntegerLattice, Cycle, Torus, FreeGroup };

    static GroupSpec integer_lattice(int d) {
        if (d < 1) fail(Errc::config_error, "integer-lattice requires d >= 1");
        GroupSpec s;
        s.kind_ = Kind::IntegerLattice;
        s.rank_ = d;
        return s;
    }
    static GroupSpec cycle(int len) {
        if (len < 3) fail(Errc::config_error, "cycle requires L >= 3");
        GroupSpec s;
        s.kind_ = Kind::Cycle;
        s.rank_ = 1;
        s.lengths_ = {len};
        return s;
    }
    static GroupSpec torus(std::vector<int> lengths) {
        if (lengths.empty()) fail(Errc::config_error, "torus requires d >= 1");
        for (int len : lengths)
            if (len < 3) fail(Errc::config_error, "torus requires L >= 3 per axis");
        GroupSpec s;
        s.kind_ = Kind::Torus;
        s.rank_ = static_cast<int>(lengths.size());
        s.lengths_ = std::move(lengths);
        return s;
    }
    static GroupSpec free_group(int k, int max_word_len = 64) {
        if (k < 1) fail(Errc::config_error, "free-group requires k >= 1");
        GroupSpec s;
        s.kind_ = Kind::FreeGroup;
        s.rank_ = k;
        s.max_word_len_ = max_word_len;
        return s;
    }

    Kind kind() const { return kind_; }
    int rank() const { return rank_; }
    const std::vector<int>& lengths() const { return lengths_; }
    int max_word_len() const { return max_word_len_; }

    int degree() const {
        switch (kind_) {
            case Kind::Cycle: return 2;
            case Kind::IntegerLattice:
            case Kind::Torus: return 2 * rank_;
            case Kind::FreeGroup: return 2 * rank_;
        }
        return 0;
    }

    Element identity() const {
        if (kind_ == Kind::FreeGroup) return Element{};
        return Element{std::vector<std::int64_t>(rank_, 0)};
    }

    void validate(const Element& x) const {
        switch (kind_) {
            case Kind::IntegerLattice:
                if (static_cast<int>(x.data.size()) != rank_)
                    fail(Errc::invalid_element, "lattice element needs one coordinate per axis");
                return;
            case Kind::Cycle:
            case Kind::Torus:
                if (static_cast<int>(x.data.size()) != rank_)
                    fail(Errc::invalid_element, "torus element needs one coordinate per axis");
                for (int i = 0; i < rank_; ++i)
                    if (x.data[i] < 0 || x.data[i] >= lengths_[i])
                        fail(Errc::invalid_element, "coordinate outside [0, L)");
                return;
            case Kind::FreeGroup:
                if (static_cast<int>(x.data.size()) > max_word_len_)
                    fail(Errc::invalid_element, "word exceeds length cap");
                for (std::size_t i = 0; i < x.data.size(); ++i) {
                    std::int64_t g = x.data[i];
                    if (g == 0 || g > rank_ || g < -rank_)
                        fail(Errc::invalid_element, "letter outside generator set");
                    if (i + 1 < x.data.size() && x.data[i + 1] == -g)
                        fail(Errc::invalid_element, "word is not reduced");
                }
                return;
        }
    }

    // Canonical neighbor order: +e1, -e1, +e2, -e2, ... (abelian kinds);
    // a, a^-1, b, b^-1, ... (free groups). Downstream tie-breaking relies
    // on this order being stable.
    std::vector<Element> neighbors(const Element& x) const {
        validate(x);
        std::vector<Element> out;
        out.reserve(degree());
        switch (kind_) {
            case Kind::IntegerLattice:
                for (int i = 0; i < rank_; ++i) {
                    Element p = x, m = x;
                    p.data[i] += 1;
                    m.data[i] -= 1;
                    out.push_back(std::move(p));
                    out.push_back(std::move(m));
                }
                break;
            case Kind::Cycle:
            case Kind::Torus:
                for (int i = 0; i < rank_; ++i) {
                    Element p = x, m = x;
                    p.data[i] = (x.data[i] + 1) % lengths_[i];
                    m.data[i] = (x.data[i] + lengths_[i] - 1) % lengths_[i];
                    out.push_back(std::move(p));
                    out.push_back(std::move(m));
                }
                break;
            case Kind::FreeGroup:
                for (int g = 1; g <= rank_; ++g) {
                    for (std::int64_t letter : {std::int64_t(g), std::int64_t(-g)}) {
                        Element y = x;
                        if (!y.data.empty() && y.data.back() == -letter)
                            y.data.pop_back();
                        else
                            y.data.push_back(letter);
                        if (static_cast<int>(y.data.size()) <= max_word_len_)
                            out.push_back(std::move(y));
                    }
                }
                break;
        }
        return out;
    }

    // Exact graph-metric ball by BFS; throws when it would exceed `budget`.
    std::vector<Element> ball(const Element& center, int radius,
                              std::size_t budget = 1'000'000) const {
        if (radius < 0) fail(Errc::domain_error, "ball radius must be nonnegative");
        validate(center);
        std::vector<Element> out{center};
        std::map<Element, int> seen{{center, 0}};
        std::deque<Element> frontier{center};
        while (!frontier.empty()) {
            Element x = frontier.front();
            frontier.pop_front();
            int d = seen[x];
            if (d == radius) continue;
            for (Element& y : neighbors(x)) {
                if (seen.count(y)) continue;
                seen.emplace(y, d + 1);
                out.push_back(y);
                if (out.size() > budget) fail(Errc::budget_exceeded, "ball exceeds element budget");
                frontier.push_back(std::move(y));
            }
        }
        return out;
    }

    std::size_t ball_size(int radius, std::size_t budget = 1'000'000) const {
        return ball(identity(), radius, budget).size();
    }

    // Parity facts are decided analytically for the catalog kinds: abelian
    // lattices and free groups are bipartite, a cycle/torus is bipartite
    // exactly when every axis length is even.
    ParityInfo parity_info(int search_cap = 1024) const {
        ParityInfo info;
        int shortest_odd = 0;
        switch (kind_) {
            case Kind::IntegerLattice:
            case Kind::FreeGroup: return info;
            case Kind::Cycle:
            case Kind::Torus:
                for (int len : lengths_)
                    if (len % 2 == 1 && (shortest_odd == 0 || len < shortest_odd))
                        shortest_odd = len;
                break;
        }
        if (shortest_odd == 0) return info;
        info.bipartite = false;
        if (shortest_odd <= search_cap) {
            info.odd_girth = shortest_odd;
            // Closed paths exist for every even length >= 2 (backtracking)
            // and every odd length >= the odd girth m, so every length
            // >= m-1 is realized.
            info.mu_g = shortest_odd - 1;
        }
        return info;
    }

    // Injective, deterministic, platform-independent serialization.
    ByteKey canonical_key(const Element& x) const {
        validate(x);
        ByteKey out;
        put_u32(out, static_cast<std::uint32_t>(x.data.size()));
        for (std::int64_t v : x.data) put_i64(out, v);
        return out;
    }

    // Word metric on the base graph.
    int base_distance(const Element& a, const Element& b) const {
        validate(a);
        validate(b);
        switch (kind_) {
            case Kind::IntegerLattice: {
                std::int64_t d = 0;
                for (int i = 0; i < rank_; ++i) d += std::llabs(a.data[i] - b.data[i]);
                return static_cast<int>(d);
            }
            case Kind::Cycle:
            case Kind::Torus: {
                std::int64_t d = 0;
                for (int i = 0; i < rank_; ++i) {
                    std::int64_t diff = std::llabs(a.data[i] - b.data[i]);
                    d += std::min(diff, lengths_[i] - diff);
                }
                return static_cast<int>(d);
            }
            case Kind::FreeGroup: {
                // |a^-1 b| = |a| + |b| - 2 * (common prefix length).
                std::size_t p = 0;
                while (p < a.data.size() && p < b.data.size() && a.data[p] == b.data[p]) ++p;
                return static_cast<int>(a.data.size() + b.data.size() - 2 * p);
            }
        }
        return 0;
    }

    std::string kind_name() const {
        switch (kind_) {
            case Kind::IntegerLattice: return "integer-lattice";
            case Kind::Cycle: return "cycle";
            case Kind::Torus: return "torus";
            case Kind::FreeGroup: return "free-group";
        }
        return "?";
    }

private:
    Kind kind_ = Kind::IntegerLattice;
    int rank_ = 1;
    std::vector<int> lengths_;
    int max_word_len_ = 64;
};

}  // namespace eden
