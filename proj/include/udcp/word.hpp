#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "udcp/errors.hpp"

namespace udcp {

// Fixed-length bitvector over coordinates 1..n. Coordinate i+1 (1-based,
// user facing) is stored in bit i (0-based). Lengths up to 64 live in a
// single machine word; longer words spill into extra limbs. Also doubles
// as a subset of [n] (vectors and sets are interchangeable here).
class Word {
public:
    Word() = default;

    explicit Word(int n) : n_(check_length(n)) {
        if (n_ > 64) hi_.assign((n_ + 63) / 64 - 1, 0);
    }

    // n <= 64 only.
    static Word from_bits(int n, std::uint64_t bits) {
        Word w(n);
        if (n > 64) throw ValidationError("from_bits: length > 64");
        w.lo_ = (n == 64) ? bits : (bits & ((n == 0) ? 0 : ((1ull << n) - 1)));
        return w;
    }

    static Word parse(std::string_view text) {
        Word w(static_cast<int>(text.size()));
        for (int i = 0; i < w.n_; ++i) {
            char c = text[static_cast<size_t>(i)];
            if (c == '1')
                w.set_bit(i, true);
            else if (c != '0')
                throw ValidationError("word must be over {0,1}, got '" + std::string(1, c) + "'");
        }
        return w;
    }

    int length() const { return n_; }
    int limb_count() const { return (n_ + 63) / 64; }

    std::uint64_t limb(int i) const { return i == 0 ? lo_ : hi_[static_cast<size_t>(i - 1)]; }

    bool bit(int i) const { return (limb(i >> 6) >> (i & 63)) & 1; }

    void set_bit(int i, bool v) {
        std::uint64_t& l = (i < 64) ? lo_ : hi_[static_cast<size_t>((i >> 6) - 1)];
        if (v)
            l |= 1ull << (i & 63);
        else
            l &= ~(1ull << (i & 63));
    }

    int popcount() const {
        int c = std::popcount(lo_);
        for (std::uint64_t h : hi_) c += std::popcount(h);
        return c;
    }

    bool is_zero() const {
        if (lo_ != 0) return false;
        for (std::uint64_t h : hi_)
            if (h != 0) return false;
        return true;
    }

    Word operator^(const Word& o) const { return zip(o, [](std::uint64_t a, std::uint64_t b) { return a ^ b; }); }
    Word operator&(const Word& o) const { return zip(o, [](std::uint64_t a, std::uint64_t b) { return a & b; }); }
    Word operator|(const Word& o) const { return zip(o, [](std::uint64_t a, std::uint64_t b) { return a | b; }); }
    // this & ~o (set difference when read as subsets)
    Word and_not(const Word& o) const { return zip(o, [](std::uint64_t a, std::uint64_t b) { return a & ~b; }); }

    Word complement() const {
        Word r(n_);
        for (int i = 0; i < limb_count(); ++i) r.set_limb(i, ~limb(i));
        r.trim();
        return r;
    }

    static Word full(int n) { return Word(n).complement(); }

    bool operator==(const Word& o) const {
        if (n_ != o.n_) return false;
        if (lo_ != o.lo_) return false;
        return hi_ == o.hi_;
    }
    bool operator!=(const Word& o) const { return !(*this == o); }

    // Numeric order (coordinate n is the most significant bit); words of
    // different lengths compare by length first.
    bool operator<(const Word& o) const {
        if (n_ != o.n_) return n_ < o.n_;
        for (int i = limb_count() - 1; i >= 1; --i) {
            if (limb(i) != o.limb(i)) return limb(i) < o.limb(i);
        }
        return lo_ < o.lo_;
    }

    // Concatenation: this occupies coordinates 1..n, other n+1..n+m.
    Word concat(const Word& other) const {
        Word r(n_ + other.n_);
        for (int i = 0; i < n_; ++i) r.set_bit(i, bit(i));
        for (int i = 0; i < other.n_; ++i) r.set_bit(n_ + i, other.bit(i));
        return r;
    }

    // Keep the coordinates where mask=1, in ascending order.
    Word project(const Word& mask) const {
        if (mask.n_ != n_) throw ValidationError("projection mask length mismatch");
        Word r(mask.popcount());
        int j = 0;
        for (int i = 0; i < n_; ++i) {
            if (mask.bit(i)) {
                if (bit(i)) r.set_bit(j, true);
                ++j;
            }
        }
        return r;
    }

    std::string str() const {
        std::string s(static_cast<size_t>(n_), '0');
        for (int i = 0; i < n_; ++i)
            if (bit(i)) s[static_cast<size_t>(i)] = '1';
        return s;
    }

    std::uint64_t hash() const {
        std::uint64_t h = 1469598103934665603ull ^ static_cast<std::uint64_t>(n_);
        for (int i = 0; i < limb_count(); ++i) {
            h ^= limb(i);
            h *= 1099511628211ull;
        }
        return h;
    }

private:
    static int check_length(int n) {
        if (n < 0) throw ValidationError("word length must be >= 0");
        return n;
    }

    void set_limb(int i, std::uint64_t v) {
        if (i == 0)
            lo_ = v;
        else
            hi_[static_cast<size_t>(i - 1)] = v;
    }

    void trim() {
        if (n_ == 0) {
            lo_ = 0;
            return;
        }
        int top = (n_ - 1) >> 6;
        int rem = n_ & 63;
        if (rem != 0) set_limb(top, limb(top) & ((1ull << rem) - 1));
    }

    template <class F>
    Word zip(const Word& o, F f) const {
        if (o.n_ != n_) throw ValidationError("word length mismatch");
        Word r(n_);
        r.lo_ = f(lo_, o.lo_);
        for (size_t i = 0; i < hi_.size(); ++i) r.hi_[i] = f(hi_[i], o.hi_[i]);
        return r;
    }

    int n_ = 0;
    std::uint64_t lo_ = 0;
    std::vector<std::uint64_t> hi_;  // limbs 2.. for n > 64
};

struct WordHash {
    std::size_t operator()(const Word& w) const { return static_cast<std::size_t>(w.hash()); }
};

// "1,3,5" (1-based coordinates) -> subset mask of [n].
Word parse_coord_set(const std::string& csv, int n);

// Ascending 1-based coordinate list of a subset mask.
std::vector<int> coords_1based(const Word& mask);

}  // namespace udcp
