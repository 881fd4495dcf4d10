#include "udcp/core.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "udcp/errors.hpp"
#include "udcp/rng.hpp"

namespace udcp {

namespace {

struct U128Hash {
    std::size_t operator()(u128 v) const {
        return rng::mix64(static_cast<std::uint64_t>(v) ^ rng::mix64(static_cast<std::uint64_t>(v >> 64)));
    }
};

// Packed ternary encoding of (p1, p2); for n <= 64 both planes fit one
// limb each.
u128 pack_planes64(const Word& p1, const Word& p2) {
    return (static_cast<u128>(p2.limb(0)) << 64) | p1.limb(0);
}

struct VecHash {
    std::size_t operator()(const std::vector<std::uint64_t>& v) const {
        std::uint64_t h = 1469598103934665603ull;
        for (std::uint64_t x : v) {
            h ^= x;
            h *= 1099511628211ull;
        }
        return h;
    }
};

std::vector<std::uint64_t> pack_planes_wide(const Word& p1, const Word& p2) {
    std::vector<std::uint64_t> k;
    k.reserve(2 * static_cast<size_t>(p1.limb_count()));
    for (int i = 0; i < p1.limb_count(); ++i) k.push_back(p1.limb(i));
    for (int i = 0; i < p2.limb_count(); ++i) k.push_back(p2.limb(i));
    return k;
}

template <class F>
void for_each_pair(const CodePair& pair, F f) {
    for (const Word& a : pair.a().words())
        for (const Word& b : pair.b().words()) f(a, b);
}

// Distinct ternary words of either kind, ascending.
std::vector<TernaryWord> distinct_ternary(const CodePair& pair, TernaryWord::Kind kind) {
    std::vector<TernaryWord> out;
    auto make = [&](const Word& a, const Word& b) {
        return kind == TernaryWord::Kind::Sum ? TernaryWord::sum_of(a, b)
                                              : TernaryWord::difference_of(a, b);
    };
    if (pair.length() <= 64) {
        std::unordered_set<u128, U128Hash> seen;
        seen.reserve(pair.a().size() * pair.b().size() * 2);
        for_each_pair(pair, [&](const Word& a, const Word& b) {
            TernaryWord t = make(a, b);
            if (seen.insert(pack_planes64(t.p1, t.p2)).second) out.push_back(std::move(t));
        });
    } else {
        std::unordered_set<std::vector<std::uint64_t>, VecHash> seen;
        for_each_pair(pair, [&](const Word& a, const Word& b) {
            TernaryWord t = make(a, b);
            if (seen.insert(pack_planes_wide(t.p1, t.p2)).second) out.push_back(std::move(t));
        });
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

u128 binom128(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    u128 r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<u128>(n - k + i) / static_cast<u128>(i);
    }
    return r;
}

std::uint64_t pow2_ceil(double e) {
    if (e >= 63.0) throw ValidationError("pow2_ceil: exponent too large");
    if (e < 0.0) return 1;
    double r = std::round(e);
    if (std::abs(e - r) < 1e-9) return 1ull << static_cast<int>(r);
    long double v = std::exp2(static_cast<long double>(e));
    // Snap values a float round-trip away from an integer, so a size that
    // meets its threshold exactly is not pushed over by the ceiling.
    long double nearest = std::round(v);
    if (nearest > 0 && std::abs(v - nearest) < v * 1e-9) return static_cast<std::uint64_t>(nearest);
    return static_cast<std::uint64_t>(std::ceil(v));
}

std::vector<TernaryWord> sumset(const CodePair& pair) {
    return distinct_ternary(pair, TernaryWord::Kind::Sum);
}

std::vector<TernaryWord> diffset(const CodePair& pair) {
    return distinct_ternary(pair, TernaryWord::Kind::Difference);
}

std::optional<Collision> find_collision(const CodePair& pair) {
    const auto& A = pair.a().words();
    const auto& B = pair.b().words();
    if (pair.length() <= 64) {
        std::unordered_map<u128, std::pair<std::uint32_t, std::uint32_t>, U128Hash> seen;
        seen.reserve(A.size() * B.size() * 2);
        for (std::uint32_t i = 0; i < A.size(); ++i) {
            for (std::uint32_t j = 0; j < B.size(); ++j) {
                TernaryWord t = TernaryWord::sum_of(A[i], B[j]);
                auto [it, fresh] = seen.emplace(pack_planes64(t.p1, t.p2), std::make_pair(i, j));
                if (!fresh) {
                    return Collision{A[it->second.first], B[it->second.second], A[i], B[j]};
                }
            }
        }
    } else {
        std::unordered_map<std::vector<std::uint64_t>, std::pair<std::uint32_t, std::uint32_t>, VecHash> seen;
        for (std::uint32_t i = 0; i < A.size(); ++i) {
            for (std::uint32_t j = 0; j < B.size(); ++j) {
                TernaryWord t = TernaryWord::sum_of(A[i], B[j]);
                auto [it, fresh] = seen.emplace(pack_planes_wide(t.p1, t.p2), std::make_pair(i, j));
                if (!fresh) {
                    return Collision{A[it->second.first], B[it->second.second], A[i], B[j]};
                }
            }
        }
    }
    return std::nullopt;
}

bool is_udcp(const CodePair& pair) {
    if (pair.udcp_status() != CodePair::Udcp::Unchecked)
        return pair.udcp_status() == CodePair::Udcp::Yes;
    bool ok = !find_collision(pair).has_value();
    pair.cache_udcp(ok);
    return ok;
}

std::uint64_t DistanceCensus::total() const {
    std::uint64_t t = 0;
    for (std::uint64_t c : counts) t += c;
    return t;
}

void DistanceCensus::to_json(JsonWriter& w) const {
    w.kv("n", n);
    w.key("restriction");
    if (restriction) {
        w.begin_array();
        for (int c : coords_1based(*restriction)) w.value(c);
        w.end_array();
    } else {
        w.null();
    }
    w.key("counts").begin_array();
    for (std::uint64_t c : counts) w.value(c);
    w.end_array();
    w.kv("total", total());
}

DistanceCensus distance_census(const CodePair& pair, const std::optional<Word>& l) {
    const int n = pair.length();
    int m = n;
    if (l) {
        if (l->length() != n) throw ValidationError("census restriction must be a subset of [n]");
        m = l->popcount();
    }
    DistanceCensus c;
    c.n = n;
    c.restriction = l;
    c.counts.assign(static_cast<size_t>(m) + 1, 0);
    for_each_pair(pair, [&](const Word& a, const Word& b) {
        Word x = a ^ b;
        int d = l ? (x & *l).popcount() : x.popcount();
        ++c.counts[static_cast<size_t>(d)];
    });
    return c;
}

u128 van_tilborg_cap(int n, int d) {
    return binom128(n, d) << std::min(d, n - d);
}

VanTilborgReport van_tilborg_check(const CodePair& pair) {
    if (pair.udcp_status() != CodePair::Udcp::Yes)
        throw ValidationError("van_tilborg_check needs a pair verified as UDCP");
    const int n = pair.length();
    if (n > 64) throw ValidationError("van_tilborg_check supports n <= 64");
    DistanceCensus c = distance_census(pair);
    VanTilborgReport r;
    r.n = n;
    r.total = c.total();
    r.all_within = true;
    for (int d = 0; d <= n; ++d) {
        u128 cap = van_tilborg_cap(n, d);
        std::uint64_t wd = c.counts[static_cast<size_t>(d)];
        bool ok = static_cast<u128>(wd) <= cap;
        r.rows.push_back({d, wd, std::log2(static_cast<double>(cap)), ok});
        r.all_within = r.all_within && ok;
    }
    if (!r.all_within)
        throw VerificationError("distance census exceeds its cap; the pair cannot be a UDCP");
    return r;
}

EncodedPair encode_eta(const Word& a, const Word& b, const std::optional<Word>& split_l) {
    if (a.length() != b.length()) throw ValidationError("encode_eta: length mismatch");
    EncodedPair e;
    e.sym_diff = a ^ b;
    e.residue = b.and_not(a);
    if (split_l) {
        if (split_l->length() != a.length()) throw ValidationError("encode_eta: split mask length mismatch");
        Word r_mask = split_l->complement();
        EncodedPair::SplitBlocks s;
        s.l_mask = *split_l;
        s.l_sym = e.sym_diff.project(*split_l);
        s.l_a_not_b = a.and_not(b).project(*split_l);
        s.r_sym = e.sym_diff.project(r_mask);
        s.r_a_not_b = a.and_not(b).project(r_mask);
        e.split = std::move(s);
    }
    return e;
}

TernaryWord eta_decode_difference(const EncodedPair& e) {
    // b-a is +1 on b\a and -1 on a\b = (a xor b) \ (b\a).
    return {TernaryWord::Kind::Difference, e.residue, e.sym_diff.and_not(e.residue)};
}

BinaryCode project(const BinaryCode& code, const Word& p) {
    if (p.length() != code.length()) throw ValidationError("projection set must be a subset of [n]");
    std::vector<Word> ws;
    ws.reserve(code.size());
    for (const Word& w : code.words()) ws.push_back(w.project(p));
    return BinaryCode(p.popcount(), std::move(ws));
}

CodePair product_compose(const CodePair& p1, const CodePair& p2) {
    if (p1.udcp_status() != CodePair::Udcp::Yes || p2.udcp_status() != CodePair::Udcp::Yes)
        throw ValidationError("product_compose needs both inputs verified as UDCPs");
    std::vector<Word> aw, bw;
    aw.reserve(p1.a().size() * p2.a().size());
    bw.reserve(p1.b().size() * p2.b().size());
    for (const Word& x : p1.a().words())
        for (const Word& y : p2.a().words()) aw.push_back(x.concat(y));
    for (const Word& x : p1.b().words())
        for (const Word& y : p2.b().words()) bw.push_back(x.concat(y));
    CodePair out(BinaryCode(p1.length() + p2.length(), std::move(aw)),
                 BinaryCode(p1.length() + p2.length(), std::move(bw)));
    // Products of UDCPs are UDCPs.
    out.cache_udcp(true);
    return out;
}

namespace {

// Projection classes of a code under a_L, as index lists keyed by the
// packed projection.
std::unordered_map<std::vector<std::uint64_t>, std::vector<std::uint32_t>, VecHash> partition_by_projection(
    const BinaryCode& a, const Word& l) {
    std::unordered_map<std::vector<std::uint64_t>, std::vector<std::uint32_t>, VecHash> classes;
    for (std::uint32_t i = 0; i < a.size(); ++i) {
        Word p = a.word(i).project(l);
        std::vector<std::uint64_t> key;
        for (int j = 0; j < p.limb_count(); ++j) key.push_back(p.limb(j));
        classes[key].push_back(i);
    }
    return classes;
}

}  // namespace

DenseSubcodeReport extract_dense_subcode(const BinaryCode& a, const Word& l, double epsilon) {
    const int n = a.length();
    if (l.length() != n) throw ValidationError("extract_dense_subcode: L must be a subset of [n]");
    if (epsilon < 0 || epsilon > 1) throw ValidationError("epsilon must be in [0,1]");
    const std::uint64_t need = pow2_ceil((1.0 - epsilon) * n);
    if (a.size() < need)
        throw ValidationError("extract_dense_subcode: |A| = " + std::to_string(a.size()) +
                              " is below the precondition threshold 2^{(1-eps)n} = " + std::to_string(need));

    const int lsz = l.popcount();
    auto classes = partition_by_projection(a, l);

    // Keep classes with size >= |A| / 2^{|L|+1}, i.e. size * 2^{|L|+1} >= |A|.
    // The largest class has size >= |A| / 2^{|L|}, so at least one is kept.
    std::vector<Word> kept;
    std::uint64_t kept_classes = 0, min_kept = 0;
    for (const auto& [key, idx] : classes) {
        u128 lhs = static_cast<u128>(idx.size()) << (lsz + 1);
        if (lhs >= static_cast<u128>(a.size())) {
            ++kept_classes;
            if (min_kept == 0 || idx.size() < min_kept) min_kept = idx.size();
            for (std::uint32_t i : idx) kept.push_back(a.word(i));
        }
    }
    DenseSubcodeReport r{BinaryCode(n, std::move(kept)), l, epsilon, a.size(), classes.size(), kept_classes,
                         min_kept, 0, 0, false};
    u128 den = static_cast<u128>(1) << (lsz + 1);
    r.keep_threshold = static_cast<std::uint64_t>((static_cast<u128>(a.size()) + den - 1) / den);
    r.class_count_floor = pow2_ceil(static_cast<double>(lsz) - epsilon * n - 1.0);
    r.class_count_floor_met = r.class_count_kept >= r.class_count_floor;
    return r;
}

bool is_eps_dense(const BinaryCode& a, const Word& l, double epsilon) {
    const int n = a.length();
    if (l.length() != n) throw ValidationError("is_eps_dense: L must be a subset of [n]");
    const int lsz = l.popcount();
    auto classes = partition_by_projection(a, l);
    const std::uint64_t t_classes = pow2_ceil(static_cast<double>(lsz) - epsilon * n - 1.0);
    if (classes.size() < t_classes) return false;
    const std::uint64_t t_size = pow2_ceil(static_cast<double>(n - lsz) - epsilon * n - 1.0);
    for (const auto& [key, idx] : classes)
        if (idx.size() < t_size) return false;
    return true;
}

void DenseSubcodeReport::to_json(JsonWriter& w) const {
    w.kv("epsilon", epsilon);
    w.key("l").begin_array();
    for (int c : coords_1based(l_set)) w.value(c);
    w.end_array();
    w.kv("parent_size", parent_size);
    w.kv("subset_size", static_cast<std::uint64_t>(subset.size()));
    w.kv("class_count_total", class_count_total);
    w.kv("class_count_kept", class_count_kept);
    w.kv("min_kept_class_size", min_kept_class_size);
    w.kv("keep_threshold", keep_threshold);
    w.kv("class_count_floor", class_count_floor);
    w.kv("class_count_floor_met", class_count_floor_met);
}

}  // namespace udcp
