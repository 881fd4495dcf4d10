#pragma once

#include <atomic>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "udcp/word.hpp"

namespace udcp {

// Word over {0,1,2} (a coordinatewise sum a+b) or over {-1,0,1} (a
// difference b-a), stored as two disjoint bitplanes.
struct TernaryWord {
    enum class Kind { Sum, Difference };

    Kind kind;
    Word p1;  // digit 1 (Sum) / digit +1 (Difference)
    Word p2;  // digit 2 (Sum) / digit -1 (Difference)

    int length() const { return p1.length(); }

    int digit(int i) const {
        if (kind == Kind::Sum) return p1.bit(i) ? 1 : (p2.bit(i) ? 2 : 0);
        return p1.bit(i) ? 1 : (p2.bit(i) ? -1 : 0);
    }

    static TernaryWord sum_of(const Word& a, const Word& b) {
        return {Kind::Sum, a ^ b, a & b};
    }
    // b - a per coordinate.
    static TernaryWord difference_of(const Word& a, const Word& b) {
        return {Kind::Difference, b.and_not(a), a.and_not(b)};
    }

    // Sums render as digits, differences as '-','0','+'.
    std::string str() const {
        std::string s(static_cast<size_t>(length()), '0');
        for (int i = 0; i < length(); ++i) {
            if (p1.bit(i))
                s[static_cast<size_t>(i)] = kind == Kind::Sum ? '1' : '+';
            else if (p2.bit(i))
                s[static_cast<size_t>(i)] = kind == Kind::Sum ? '2' : '-';
        }
        return s;
    }

    bool operator==(const TernaryWord& o) const {
        return kind == o.kind && p1 == o.p1 && p2 == o.p2;
    }
    bool operator<(const TernaryWord& o) const {
        if (!(p2 == o.p2)) return p2 < o.p2;
        return p1 < o.p1;
    }
};

// An ordered, deduplicated set of equal-length binary words. Words are
// kept sorted by numeric value; duplicates in the input are merged.
class BinaryCode {
public:
    BinaryCode(int n, std::vector<Word> words);

    static BinaryCode full_cube(int n);
    static BinaryCode parse_text(const std::string& text, const std::string& source = "<text>");
    static BinaryCode read_file(const std::string& path);

    int length() const { return n_; }
    std::size_t size() const { return words_.size(); }
    const std::vector<Word>& words() const { return words_; }
    const Word& word(std::size_t i) const { return words_[i]; }
    bool contains(const Word& w) const;

    // log2|X| / n
    double rate() const { return std::log2(static_cast<double>(words_.size())) / n_; }

    std::string to_text() const;
    void write_file(const std::string& path) const;

    bool operator==(const BinaryCode& o) const { return n_ == o.n_ && words_ == o.words_; }

private:
    int n_;
    std::vector<Word> words_;
};

// A pair of equal-length codes with its rates and a write-once cache of
// the unique-decodability check.
class CodePair {
public:
    enum class Udcp { Unchecked, No, Yes };

    CodePair(BinaryCode a, BinaryCode b);

    CodePair(const CodePair& o) : a_(o.a_), b_(o.b_), udcp_(o.udcp_.load()) {}
    CodePair& operator=(const CodePair& o) {
        a_ = o.a_;
        b_ = o.b_;
        udcp_.store(o.udcp_.load());
        return *this;
    }

    const BinaryCode& a() const { return a_; }
    const BinaryCode& b() const { return b_; }
    int length() const { return a_.length(); }

    double alpha() const { return a_.rate(); }
    double beta() const { return b_.rate(); }
    double epsilon() const { return 1.0 - alpha(); }

    Udcp udcp_status() const {
        int v = udcp_.load(std::memory_order_relaxed);
        return v < 0 ? Udcp::Unchecked : (v == 0 ? Udcp::No : Udcp::Yes);
    }

    // Write-once, idempotent.
    void cache_udcp(bool yes) const { udcp_.store(yes ? 1 : 0, std::memory_order_relaxed); }

private:
    BinaryCode a_;
    BinaryCode b_;
    mutable std::atomic<int> udcp_{-1};
};

}  // namespace udcp
