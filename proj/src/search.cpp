#include "udcp/search.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <thread>

#include "udcp/errors.hpp"

namespace udcp {

namespace {

// Packed id of the ternary difference v - u for words of length n <= 6:
// low 6 bits the -1 plane, next 6 the +1 plane.
inline std::uint32_t diff_id(std::uint32_t u, std::uint32_t v) {
    return ((v & ~u) << 6) | (u & ~v);
}

struct Ctx {
    int n = 0;
    int nwords = 0;
    std::vector<std::vector<std::uint8_t>> transforms;  // word images under signed permutations
};

Ctx build_ctx(int n, bool with_transforms) {
    Ctx c;
    c.n = n;
    c.nwords = 1 << n;
    if (with_transforms) {
        std::vector<int> perm(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
        do {
            for (std::uint32_t flip = 0; flip < static_cast<std::uint32_t>(c.nwords); ++flip) {
                std::vector<std::uint8_t> t(static_cast<size_t>(c.nwords));
                for (std::uint32_t w = 0; w < static_cast<std::uint32_t>(c.nwords); ++w) {
                    std::uint32_t img = 0;
                    for (int i = 0; i < n; ++i)
                        if (w & (1u << i)) img |= 1u << perm[static_cast<size_t>(i)];
                    t[w] = static_cast<std::uint8_t>(img ^ flip);
                }
                c.transforms.push_back(std::move(t));
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    return c;
}

// Is this A-mask the numerically smallest in its orbit under simultaneous
// coordinate permutations and flips?
bool canonical_mask(const Ctx& c, std::uint64_t a_mask) {
    for (const auto& t : c.transforms) {
        std::uint64_t img = 0;
        std::uint64_t m = a_mask;
        while (m) {
            int w = std::countr_zero(m);
            m &= m - 1;
            img |= 1ull << t[static_cast<size_t>(w)];
        }
        if (img < a_mask) return false;
    }
    return true;
}

struct CliqueSearch {
    const std::vector<std::uint64_t>* adj;
    int best = 0;
    std::uint64_t best_mask = 0;
    std::uint64_t* budget = nullptr;
    bool exhausted = false;

    void expand(std::uint64_t cand, std::uint64_t cur, int size) {
        if (budget) {
            if (*budget == 0) {
                exhausted = true;
                return;
            }
            --*budget;
        }
        while (cand) {
            if (size + std::popcount(cand) <= best) return;
            int v = std::countr_zero(cand);
            cand &= cand - 1;
            std::uint64_t ncur = cur | (1ull << v);
            std::uint64_t ncand = cand & (*adj)[static_cast<size_t>(v)];
            if (size + 1 > best) {
                best = size + 1;
                best_mask = ncur;
            }
            if (ncand) expand(ncand, ncur, size + 1);
            if (exhausted) return;
        }
    }
};

// Max |B| compatible with the A given by a_mask; only improvements over
// `seed` are searched for, so a result <= seed means "no better than seed".
struct MaxBResult {
    int size = 0;
    std::uint64_t mask = 0;
    bool exhausted = false;
};

MaxBResult max_b_for_a(const Ctx& c, std::uint64_t a_mask, int seed, std::uint64_t* budget) {
    // Forbidden differences of A, symmetric by construction.
    bool forb[4096] = {};
    std::uint32_t words[64];
    int asz = 0;
    std::uint64_t m = a_mask;
    while (m) {
        words[asz++] = static_cast<std::uint32_t>(std::countr_zero(m));
        m &= m - 1;
    }
    for (int i = 0; i < asz; ++i)
        for (int j = 0; j < asz; ++j)
            if (i != j) forb[diff_id(words[i], words[j])] = true;

    std::vector<std::uint64_t> adj(static_cast<size_t>(c.nwords), 0);
    for (int u = 0; u < c.nwords; ++u)
        for (int v = u + 1; v < c.nwords; ++v)
            if (!forb[diff_id(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v))]) {
                adj[static_cast<size_t>(u)] |= 1ull << v;
                adj[static_cast<size_t>(v)] |= 1ull << u;
            }

    CliqueSearch cs;
    cs.adj = &adj;
    cs.best = seed;
    cs.budget = budget;
    std::uint64_t all = (c.nwords == 64) ? ~0ull : ((1ull << c.nwords) - 1);
    cs.expand(all, 0, 0);
    return {cs.best, cs.best_mask, cs.exhausted};
}

CodePair pair_from_masks(int n, std::uint64_t a_mask, std::uint64_t b_mask) {
    std::vector<Word> aw, bw;
    for (std::uint64_t m = a_mask; m;) {
        int w = std::countr_zero(m);
        m &= m - 1;
        aw.push_back(Word::from_bits(n, static_cast<std::uint64_t>(w)));
    }
    for (std::uint64_t m = b_mask; m;) {
        int w = std::countr_zero(m);
        m &= m - 1;
        bw.push_back(Word::from_bits(n, static_cast<std::uint64_t>(w)));
    }
    return CodePair(BinaryCode(n, std::move(aw)), BinaryCode(n, std::move(bw)));
}

struct Best {
    std::uint64_t product = 0;
    std::uint64_t a_mask = 0, b_mask = 0;
    // Fixed total order so merged results are scheduling-independent.
    bool better_than(const Best& o) const {
        if (product != o.product) return product > o.product;
        if (a_mask != o.a_mask) return a_mask < o.a_mask;
        return b_mask < o.b_mask;
    }
};

struct SizeBest {
    int b = 0;
    std::uint64_t a_mask = 0, b_mask = 0;
};

struct EnumResult {
    Best best;
    std::vector<SizeBest> by_size;  // index |A|
    bool complete = true;
};

// Complete enumeration over all A masks (n <= 4), optionally skipping
// non-canonical representatives.
EnumResult enumerate_masks(const Ctx& c, const SearchSpec& spec, std::uint64_t lo, std::uint64_t hi,
                           std::uint64_t budget_share, bool has_budget) {
    EnumResult r;
    r.by_size.assign(static_cast<size_t>(c.nwords) + 1, {});
    const bool bfloor = spec.objective == SearchSpec::Objective::BFloor;
    std::uint64_t budget = budget_share;
    std::uint64_t* bp = has_budget ? &budget : nullptr;
    const u128 cap = census_product_cap(c.n);
    for (std::uint64_t a_mask = lo; a_mask < hi; ++a_mask) {
        if (a_mask == 0) continue;
        if (bp) {
            if (*bp == 0) {
                r.complete = false;
                break;
            }
            --*bp;
        }
        const int asz = std::popcount(a_mask);
        int seed;
        if (bfloor) {
            seed = r.by_size[static_cast<size_t>(asz)].b;
        } else {
            // Improvement needs |B| > best.product / |A|.
            seed = static_cast<int>(
                std::min<std::uint64_t>(r.best.product / static_cast<std::uint64_t>(asz),
                                        static_cast<std::uint64_t>(c.nwords)));
            if (static_cast<u128>(asz) * static_cast<u128>(c.nwords) <= r.best.product &&
                r.best.product > 0)
                continue;  // even B = everything cannot beat the best
            if (static_cast<u128>(r.best.product) >= cap) break;  // cap reached, proved optimal
        }
        if (spec.symmetry_reduction && !canonical_mask(c, a_mask)) continue;
        MaxBResult mb = max_b_for_a(c, a_mask, seed, bp);
        if (mb.exhausted) {
            r.complete = false;
            break;
        }
        if (mb.size > seed) {
            if (bfloor) {
                auto& sb = r.by_size[static_cast<size_t>(asz)];
                sb = {mb.size, a_mask, mb.mask};
            } else {
                Best cand{static_cast<std::uint64_t>(asz) * static_cast<std::uint64_t>(mb.size), a_mask,
                          mb.mask};
                if (cand.better_than(r.best)) r.best = cand;
            }
        }
    }
    return r;
}

// Budgeted DFS for n >= 5: word 0 is fixed into A (every orbit under
// coordinate flips has a representative containing 0).
struct Dfs {
    const Ctx* c;
    std::uint64_t budget;
    bool complete = true;
    Best best;
    std::vector<SizeBest> by_size;
    bool bfloor = false;

    void visit(std::uint64_t a_mask, int next_word) {
        if (budget == 0) {
            complete = false;
            return;
        }
        --budget;
        const int asz = std::popcount(a_mask);
        int seed = 0;
        if (!bfloor)
            seed = static_cast<int>(std::min<std::uint64_t>(
                best.product / static_cast<std::uint64_t>(asz), static_cast<std::uint64_t>(c->nwords)));
        else
            seed = by_size[static_cast<size_t>(asz)].b;
        MaxBResult mb = max_b_for_a(*c, a_mask, seed, &budget);
        if (mb.exhausted) {
            complete = false;
            return;
        }
        if (mb.size > seed) {
            if (bfloor) {
                by_size[static_cast<size_t>(asz)] = {mb.size, a_mask, mb.mask};
            } else {
                Best cand{static_cast<std::uint64_t>(asz) * static_cast<std::uint64_t>(mb.size), a_mask,
                          mb.mask};
                if (cand.better_than(best)) best = cand;
            }
        }
        // Upper bound for any extension: (|A|+remaining) * current max B.
        int remaining = c->nwords - next_word;
        if (remaining <= 0) return;
        int omega = std::max(mb.size, seed);
        if (!bfloor && static_cast<std::uint64_t>(asz + remaining) * static_cast<std::uint64_t>(omega) <=
                           best.product)
            return;
        for (int w = next_word; w < c->nwords; ++w) {
            visit(a_mask | (1ull << w), w + 1);
            if (!complete) return;
        }
    }
};

FrontierPoint make_point(int n, std::uint64_t a_floor, std::uint64_t a_mask, std::uint64_t b_mask,
                         bool optimal) {
    CodePair w = pair_from_masks(n, a_mask, b_mask);
    if (!is_udcp(w)) throw VerificationError("search produced a witness that fails re-verification");
    FrontierPoint p{n,
                    a_floor,
                    w.a().size(),
                    w.b().size(),
                    w.alpha(),
                    w.beta(),
                    1.0 - std::log2(static_cast<double>(a_floor)) / n,
                    std::move(w),
                    optimal};
    return p;
}

EnumResult run_search(const SearchSpec& spec) {
    if (spec.n < 1 || spec.n > 6) throw ValidationError("search supports 1 <= n <= 6");
    const bool mask_path = spec.n <= 4;
    Ctx c = build_ctx(spec.n, mask_path && spec.symmetry_reduction);
    if (mask_path) {
        const std::uint64_t total = 1ull << c.nwords;
        const int threads = std::max(1, spec.threads);
        const bool has_budget = spec.node_budget.has_value();
        if (threads == 1) {
            return enumerate_masks(c, spec, 1, total, spec.node_budget.value_or(0), has_budget);
        }
        std::vector<EnumResult> parts(static_cast<size_t>(threads));
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            std::uint64_t lo = 1 + (total - 1) * static_cast<std::uint64_t>(t) / threads;
            std::uint64_t hi = 1 + (total - 1) * static_cast<std::uint64_t>(t + 1) / threads;
            std::uint64_t share = has_budget ? *spec.node_budget / threads : 0;
            pool.emplace_back([&, t, lo, hi, share] {
                parts[static_cast<size_t>(t)] = enumerate_masks(c, spec, lo, hi, share, has_budget);
            });
        }
        for (auto& th : pool) th.join();
        EnumResult merged;
        merged.by_size.assign(static_cast<size_t>(c.nwords) + 1, {});
        for (const auto& p : parts) {
            merged.complete = merged.complete && p.complete;
            if (p.best.product && p.best.better_than(merged.best)) merged.best = p.best;
            for (size_t s = 0; s < p.by_size.size(); ++s) {
                const SizeBest& sb = p.by_size[s];
                SizeBest& dst = merged.by_size[s];
                if (sb.b > dst.b || (sb.b == dst.b && sb.b > 0 && sb.a_mask < dst.a_mask)) dst = sb;
            }
        }
        return merged;
    }
    Dfs d;
    d.c = &c;
    d.budget = spec.node_budget.value_or(10000000ull);
    d.bfloor = spec.objective == SearchSpec::Objective::BFloor;
    d.by_size.assign(static_cast<size_t>(c.nwords) + 1, {});
    d.visit(1, 1);  // word 0 fixed into A
    EnumResult r;
    r.best = d.best;
    r.by_size = std::move(d.by_size);
    r.complete = d.complete;
    return r;
}

}  // namespace

u128 census_product_cap(int n) {
    if (n < 1 || n > 64) throw ValidationError("census cap supports n <= 64");
    u128 total = 0;
    for (int d = 0; d <= n; ++d) total += van_tilborg_cap(n, d);
    return total;
}

FrontierPoint exhaustive_max_product(const SearchSpec& spec_in) {
    SearchSpec spec = spec_in;
    spec.objective = SearchSpec::Objective::MaxProduct;
    EnumResult r = run_search(spec);
    if (r.best.product == 0) throw VerificationError("search found no pair at all");
    return make_point(spec.n, r.best.a_mask == 0 ? 1 : std::popcount(r.best.a_mask), r.best.a_mask,
                      r.best.b_mask, r.complete);
}

std::vector<FrontierPoint> unbalanced_frontier(const SearchSpec& spec_in) {
    SearchSpec spec = spec_in;
    spec.objective = SearchSpec::Objective::BFloor;
    EnumResult r = run_search(spec);
    const std::uint64_t floor_lo = spec.a_floor.value_or(1);
    const std::uint64_t nwords = 1ull << spec.n;
    std::vector<FrontierPoint> out;
    SizeBest running{};
    std::vector<SizeBest> best_at_floor(static_cast<size_t>(nwords) + 1);
    for (std::uint64_t s = nwords; s >= 1; --s) {
        const SizeBest& sb = r.by_size[static_cast<size_t>(s)];
        if (sb.b > running.b) running = sb;
        best_at_floor[static_cast<size_t>(s)] = running;
    }
    for (std::uint64_t f = nwords; f >= floor_lo; --f) {
        const SizeBest& sb = best_at_floor[static_cast<size_t>(f)];
        if (sb.b == 0) continue;  // no pair with |A| >= f (never happens for f <= 2^n)
        out.push_back(make_point(spec.n, f, sb.a_mask, sb.b_mask, r.complete));
    }
    return out;
}

CodePair kasami_tower(int k) {
    if (k < 1 || k > 16) throw ValidationError("kasami_tower supports 1 <= k <= 16");
    std::vector<Word> aw{Word::parse("00"), Word::parse("01"), Word::parse("11")};
    std::vector<Word> bw{Word::parse("10"), Word::parse("01")};
    CodePair base(BinaryCode(2, std::move(aw)), BinaryCode(2, std::move(bw)));
    if (!is_udcp(base)) throw VerificationError("base pair failed verification");
    CodePair out = base;
    for (int i = 1; i < k; ++i) out = product_compose(out, base);
    return out;
}

}  // namespace udcp
