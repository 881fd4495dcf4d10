#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "udcp/core.hpp"

namespace udcp {

// Correlated-pair distribution on {0,1}^n: x uniform, y agrees with x on
// every coordinate of L independently with probability (1+rho)/2, and is
// uniform outside L. Absent L means all of [n].
struct CorrelationSpec {
    double rho;
    int n;
    std::optional<Word> l_set;

    CorrelationSpec(double rho_, int n_, std::optional<Word> l = {});

    Word l_mask() const { return l_set ? *l_set : Word::full(n); }
    int l_size() const { return l_set ? l_set->popcount() : n; }
    int r_size() const { return n - l_size(); }
};

// One correlated copy of x. rho = 1 is allowed here (y = x on L).
Word sample_correlated(const Word& x, const CorrelationSpec& spec, std::uint64_t seed);

// ----- exact joint probability -----

struct ProbabilityReport {
    double exact_log2 = 0;  // log2 Pr[a in A, b in B], -inf encoded by prob_zero
    bool prob_zero = false;
    double rho = 0;
    int n = 0;
    int l_size = 0, r_size = 0;
    DistanceCensus census;                 // L-restricted counts the formula used
    std::optional<double> direct_log2;     // independent pair-summation route
    struct Mc {
        double estimate = 0;
        std::uint64_t hits = 0;
        std::uint64_t samples = 0;
        double std_error = 0;
        std::uint64_t seed = 0;
    };
    std::optional<Mc> mc;
    std::optional<double> lower_rate, upper_rate;  // per-n log2 bounds, dense-split context
    struct LowerTerms {
        double asymptotic = 0, chain_half_deficit = 0, dense_half_deficit = 0, sqrt_deficit = 0;
    };
    std::optional<LowerTerms> lower_terms;
    bool bounds_assume_dense = false;
    void to_json(JsonWriter& w) const;
};

struct JointOptions {
    bool cross_check = true;               // run the direct route when |A||B| <= 1e6
    std::optional<std::uint64_t> mc_samples;
    std::uint64_t seed = 0;
    int threads = 1;
    bool attach_rate_bounds = false;       // fill lower/upper rate from the split formulas
};

// Census route: Pr = 2^{-n} sum_d ((1+rho)/2)^{m-d} ((1-rho)/2)^d 2^{-|R|} W_d,
// m = |L|, W_d the L-restricted census. Evaluated in log2 space with
// compensated summation; cross-checked against direct summation over all
// (a,b) pairs when feasible (VerificationError beyond 1e-12 relative).
ProbabilityReport exact_joint_probability(const CodePair& pair, const CorrelationSpec& spec,
                                          const JointOptions& opt = {});

// The same formula from explicit census counts (exposed so tests can feed
// capped counts); counts has l_size+1 entries.
double joint_log2_from_census(const std::vector<std::uint64_t>& counts, int n, int l_size, double rho);

// log2 of 2^{-2n} (3-rho)^n, the closed form the capped census reproduces.
double capped_census_envelope_log2(int n, double rho);

// ----- reverse small-set expansion -----

struct RssBoundInputs {
    int u_size;
    double f, g;  // |F| >= 2^{f|U|}, |G| >= 2^{g|U|}
    double rho;
};

// log2 lower bound -|U|((1-f)+(1-g)+2 rho sqrt((1-f)(1-g)))/(1-rho^2).
double rsse_lower_bound_log2(const RssBoundInputs& in);

struct RsseBatteryResult {
    std::uint64_t checked = 0;
    std::uint64_t violations = 0;
    double min_margin = 0;  // min over instances of exact_log2 - bound_log2
    std::string first_violation;
};

// exact >= bound for every nonempty F,G over {0,1}^u and each rho.
RsseBatteryResult rsse_dominance_exhaustive(int u_size, const std::vector<double>& rhos);
RsseBatteryResult rsse_dominance_random(int u_size, int instances, const std::vector<double>& rhos,
                                        std::uint64_t seed);

// ----- split finding -----

enum class SplitMode { Exhaustive, Greedy, Sampled };

struct SplitReport {
    bool window_empty = false;
    int min_size = 0, max_size = 0;   // integer |L| range inside the window
    double window_lo = 0, window_hi = 0;
    Word l_set;
    double lambda = 0;
    std::uint64_t b_l_size = 0;
    double pi = 0;                    // log2|B_L| / n
    double projection_floor = 0;      // beta - eps - 1/n
    bool floor_met = false;
    std::string mode;
    void to_json(JsonWriter& w) const;
};

// Finds L with |L|/n in 1/2 +- sqrt(ln2 eps/2) maximizing |B_L|
// (exhaustively, greedily, or by seeded sampling). eps is the pair's own
// 1 - alpha. Ties break toward the smallest mask value.
SplitReport find_split(const CodePair& pair, SplitMode mode, std::uint64_t seed = 0, int samples = 1024);

// ----- refined-distribution rate bounds at finite n -----

// Upper bound on log2(Pr)/n for an eps-dense UDCP:
// sqrt(ln2 eps/2) - 1/2 + lambda (log2(3-rho) - 3/2) + 1/n.
double refined_joint_upper_rate(double lambda, double eps, double rho, int n);

struct RefinedLowerTerms {
    double asymptotic = 0;          // the n -> inf form
    double chain_half_deficit = 0;  // 1/n, from the 1/2 factor in the chain-rule step
    double dense_half_deficit = 0;  // (1/n)/(1-rho^2), from |A_L| >= 2^{|L|-eps n-1}
    double sqrt_deficit = 0;        // sqrt(eps+1/n) vs sqrt(eps) inside the cross term
    double value = 0;               // asymptotic - deficits; valid at this exact n
};

// Lower bound on log2(Pr)/n with every finite-n deficit named; requires
// 0 <= pi <= lambda and rho < 1.
RefinedLowerTerms refined_joint_lower_rate(double lambda, double pi, double eps, double rho, int n);

// ----- fat layers -----

// sqrt(ln2 eps / 2): the gamma at which large sets start filling the layer.
double fat_layer_gamma(double eps);

struct FatLayerReport {
    double fraction = 0;
    bool premise_met = false;   // |X| >= 2^{(1-eps)n} and gamma >= fat_layer_gamma(eps)
    bool at_least_half = false;
    void to_json(JsonWriter& w) const;
};

// Fraction of x in X with |x xor z| within (1/2 +- gamma) n (closed window).
FatLayerReport fat_layer_fraction(const BinaryCode& x, const Word& z, double gamma, double eps);

// Same fraction for X = {0,1}^n by exact binomial summation, n <= 126.
double cube_fat_layer_fraction(int n, double gamma);

}  // namespace udcp
