#pragma once

// Brute-force oracles for the test suites. Everything here is written
// independently of the library's computation paths: probabilities by
// per-coordinate products, optima by pruning-free enumeration, binomials
// by Pascal's rule.

#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "udcp/code.hpp"
#include "udcp/core.hpp"
#include "udcp/noise.hpp"

namespace oracle {

using udcp::BinaryCode;
using udcp::CodePair;
using udcp::Word;

// Pr[a in A, b in B] by summing per-coordinate factor products over all
// pairs (long double, linear space).
inline long double joint_probability(const CodePair& pair, double rho, const std::optional<Word>& l) {
    const int n = pair.length();
    Word mask = l ? *l : Word::full(n);
    long double total = 0.0L;
    for (const Word& a : pair.a().words()) {
        for (const Word& b : pair.b().words()) {
            long double p = std::pow(0.5L, n);
            for (int i = 0; i < n; ++i) {
                if (mask.bit(i))
                    p *= (a.bit(i) == b.bit(i)) ? (1.0L + rho) / 2.0L : (1.0L - rho) / 2.0L;
                else
                    p *= 0.5L;
            }
            total += p;
        }
    }
    return total;
}

// All nonempty subsets of {0,1}^n as codes (n small).
inline std::vector<BinaryCode> all_codes(int n) {
    std::vector<BinaryCode> out;
    const int cube = 1 << n;
    for (std::uint32_t m = 1; m < (1u << cube); ++m) {
        std::vector<Word> ws;
        for (int w = 0; w < cube; ++w)
            if (m & (1u << w)) ws.push_back(Word::from_bits(n, static_cast<std::uint64_t>(w)));
        out.emplace_back(n, std::move(ws));
    }
    return out;
}

// UDCP test from scratch: all integer sums pairwise distinct.
inline bool is_udcp_direct(const BinaryCode& a, const BinaryCode& b) {
    std::set<std::vector<int>> sums;
    for (const Word& x : a.words()) {
        for (const Word& y : b.words()) {
            std::vector<int> s(static_cast<size_t>(a.length()));
            for (int i = 0; i < a.length(); ++i) s[static_cast<size_t>(i)] = x.bit(i) + y.bit(i);
            if (!sums.insert(s).second) return false;
        }
    }
    return true;
}

// Pruning-free maximum of |A||B| over all UDCPs at length n (n <= 3).
inline std::uint64_t max_product_exhaustive(int n) {
    auto codes = all_codes(n);
    std::uint64_t best = 0;
    for (const auto& a : codes)
        for (const auto& b : codes)
            if (a.size() * b.size() > best && is_udcp_direct(a, b)) best = a.size() * b.size();
    return best;
}

// Max |B| over all UDCPs with |A| >= floor (n <= 3).
inline std::uint64_t max_b_for_floor_exhaustive(int n, std::uint64_t floor) {
    auto codes = all_codes(n);
    std::uint64_t best = 0;
    for (const auto& a : codes) {
        if (a.size() < floor) continue;
        for (const auto& b : codes)
            if (b.size() > best && is_udcp_direct(a, b)) best = b.size();
    }
    return best;
}

// Random codes / random verified UDCPs for property batteries.
struct Gen {
    std::mt19937_64 eng;
    explicit Gen(std::uint64_t seed) : eng(seed) {}

    Word word(int n) {
        Word w(n);
        for (int i = 0; i < n; ++i) w.set_bit(i, eng() & 1);
        return w;
    }

    BinaryCode code(int n, std::size_t size) {
        if (n < 62) size = std::min<std::size_t>(size, std::size_t(1) << n);
        std::set<Word> s;
        while (s.size() < size) s.insert(word(n));
        return BinaryCode(n, std::vector<Word>(s.begin(), s.end()));
    }

    // Greedily grown verified UDCP: random small A, then random words added
    // to B while the pair stays uniquely decodable.
    CodePair udcp(int n, int a_target, int b_tries) {
        if (n < 30) a_target = std::min(a_target, 1 << n);
        std::set<Word> a;
        a.insert(word(n));
        while (static_cast<int>(a.size()) < a_target) a.insert(word(n));
        std::vector<Word> b{word(n)};
        for (int t = 0; t < b_tries; ++t) {
            Word cand = word(n);
            std::vector<Word> nb = b;
            nb.push_back(cand);
            BinaryCode bc(n, nb);
            if (bc.size() == b.size()) continue;
            BinaryCode ac(n, std::vector<Word>(a.begin(), a.end()));
            if (is_udcp_direct(ac, bc)) b = std::vector<Word>(bc.words().begin(), bc.words().end());
        }
        CodePair p(BinaryCode(n, std::vector<Word>(a.begin(), a.end())), BinaryCode(n, b));
        return p;
    }
};

// C(n,k) by Pascal's rule in long double.
inline long double pascal_binom(int n, int k) {
    std::vector<long double> row(static_cast<size_t>(n) + 1, 0.0L);
    row[0] = 1.0L;
    for (int i = 1; i <= n; ++i)
        for (int j = i; j >= 1; --j) row[static_cast<size_t>(j)] += row[static_cast<size_t>(j - 1)];
    return row[static_cast<size_t>(k)];
}

}  // namespace oracle
