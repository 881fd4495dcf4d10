#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "udcp/code.hpp"
#include "udcp/json_writer.hpp"

namespace udcp {

using u128 = unsigned __int128;

// Exact binomial coefficient, n <= 64.
u128 binom128(int n, int k);

// Smallest positive integer m with m >= 2^e. Exact when e is integral
// (within 1e-9); otherwise ceil of long-double exp2, which at desk scale
// (e < 50) is far more precise than any threshold in use. e must be < 63.
std::uint64_t pow2_ceil(double e);

// ----- sumsets / difference sets / unique decodability -----

// {a+b : a in A, b in B}, addition over the integers per coordinate.
// Deterministic ascending order, at most min(|A||B|, 3^n) elements.
std::vector<TernaryWord> sumset(const CodePair& pair);

// {a-b : a in A, b in B}. |diffset| = |A||B| iff |sumset| = |A||B|.
std::vector<TernaryWord> diffset(const CodePair& pair);

struct Collision {
    Word a1, b1, a2, b2;  // a1+b1 = a2+b2, (a1,b1) != (a2,b2)
};

// First colliding pair of sums in deterministic order, if any.
std::optional<Collision> find_collision(const CodePair& pair);

// |A+B| = |A|*|B|? Short-circuits on the first collision and caches the
// tri-state verdict on the pair.
bool is_udcp(const CodePair& pair);

// ----- distance census and the van Tilborg cap -----

struct DistanceCensus {
    int n = 0;
    std::optional<Word> restriction;       // subset L of [n], absent = plain
    std::vector<std::uint64_t> counts;     // W_0..W_m, m = n or |L|
    std::uint64_t total() const;
    void to_json(JsonWriter& w) const;
};

// Counts pairs (a,b) by |a xor b| (restricted to L when given).
DistanceCensus distance_census(const CodePair& pair, const std::optional<Word>& l = {});

struct VanTilborgReport {
    struct Row {
        int d;
        std::uint64_t count;   // W_d
        double cap_log2;       // log2 of C(n,d) 2^{min(d,n-d)}
        bool within;           // W_d <= cap, exact integer comparison
    };
    int n = 0;
    std::vector<Row> rows;
    bool all_within = false;
    std::uint64_t total = 0;
};

// Per-distance margins W_d vs C(n,d) 2^{min(d,n-d)}. Requires a pair whose
// UDCP status has been verified yes; throws VerificationError if any count
// exceeds its cap (that would mean a bug, not a property of the pair).
VanTilborgReport van_tilborg_check(const CodePair& pair);

// C(n,d) 2^{min(d,n-d)}, exact.
u128 van_tilborg_cap(int n, int d);

// ----- the injective encoding (a,b) -> (a xor b, b \ a) -----

struct EncodedPair {
    Word sym_diff;  // a xor b
    Word residue;   // b \ a, componentwise contained in sym_diff
    struct SplitBlocks {
        Word l_mask;
        Word l_sym, l_a_not_b;  // a_L xor b_L, a_L \ b_L
        Word r_sym, r_a_not_b;  // a_R xor b_R, a_R \ b_R
    };
    std::optional<SplitBlocks> split;
};

EncodedPair encode_eta(const Word& a, const Word& b, const std::optional<Word>& split_l = {});

// Reconstructs b - a from an encoding (round-trip check for injectivity).
TernaryWord eta_decode_difference(const EncodedPair& e);

// ----- projections and products -----

// X_P: restrictions of the words to the coordinates of p, deduplicated.
BinaryCode project(const BinaryCode& code, const Word& p);

// Concatenation product (A1 x A2, B1 x B2); both inputs must be verified
// UDCPs, and the result then provably is one.
CodePair product_compose(const CodePair& p1, const CodePair& p2);

// ----- dense subcodes -----

struct DenseSubcodeReport {
    BinaryCode subset;
    Word l_set;
    double epsilon = 0;
    std::uint64_t parent_size = 0;
    std::uint64_t class_count_total = 0;   // distinct projections a_L in parent
    std::uint64_t class_count_kept = 0;
    std::uint64_t min_kept_class_size = 0;
    std::uint64_t keep_threshold = 0;      // class kept iff size*2^{|L|+1} >= |A|
    std::uint64_t class_count_floor = 0;   // guaranteed kept-class count
    bool class_count_floor_met = false;
    void to_json(JsonWriter& w) const;
};

// Keeps every projection class of size >= |A| / 2^{|L|+1} (exact integer
// comparison). Requires |A| >= 2^{(1-eps)n}; the output is eps-dense with
// respect to l.
DenseSubcodeReport extract_dense_subcode(const BinaryCode& a, const Word& l, double epsilon);

// Machine check of the eps-dense definition: |A_L| >= 2^{|L|-eps n-1} and
// every projection class has >= 2^{n-|L|-eps n-1} members.
bool is_eps_dense(const BinaryCode& a, const Word& l, double epsilon);

}  // namespace udcp
