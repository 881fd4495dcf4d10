#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "udcp/core.hpp"

namespace udcp {

struct SearchSpec {
    enum class Objective { MaxProduct, BFloor };
    int n = 1;
    Objective objective = Objective::MaxProduct;
    std::optional<std::uint64_t> a_floor;       // BFloor: lowest |A| floor to report
    bool symmetry_reduction = true;
    std::optional<std::uint64_t> node_budget;   // absent: unlimited (n <= 4) / default cap (n >= 5)
    int threads = 1;
};

struct FrontierPoint {
    int n = 0;
    std::uint64_t a_floor = 0;       // requested floor (BFloor mode; = a_size otherwise)
    std::uint64_t a_size = 0, b_size = 0;
    double alpha = 0, beta = 0;
    double epsilon_floor = 0;        // 1 - log2(a_floor)/n
    CodePair witness;
    bool optimal = false;            // proved vs budget-limited best-so-far
};

// Provably (or budget-limited) maximal |A||B| UDCP at word length n <= 6.
// Complete enumeration for n <= 4; n >= 5 runs a budgeted DFS that fixes
// 0 in A (sound by the coordinate-flip symmetry) and reports best-so-far
// when the budget runs out.
FrontierPoint exhaustive_max_product(const SearchSpec& spec);

// Max |B| for each |A| floor from 2^n down to spec.a_floor (default 1),
// sorted by floor descending; proved when the enumeration completed.
std::vector<FrontierPoint> unbalanced_frontier(const SearchSpec& spec);

// k-fold product of the {00,01,11} x {10,01} base pair: n = 2k, |A| = 3^k,
// |B| = 2^k, alpha + beta = (log2 3 + 1)/2.
CodePair kasami_tower(int k);

// Census feasibility cap: sum_d C(n,d) 2^{min(d,n-d)} >= |A||B| for every
// UDCP at length n.
u128 census_product_cap(int n);

}  // namespace udcp
