#include "udcp/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "udcp/errors.hpp"
#include "udcp/rng.hpp"

namespace udcp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log2 of sum of 2^t over terms, compensated (Kahan) in the shifted
// linear domain. Terms of -inf are skipped.
double log_sum_exp2(const std::vector<double>& terms) {
    double m = kNegInf;
    for (double t : terms) m = std::max(m, t);
    if (m == kNegInf) return kNegInf;
    double sum = 0.0, comp = 0.0;
    for (double t : terms) {
        if (t == kNegInf) continue;
        double x = std::exp2(t - m) - comp;
        double next = sum + x;
        comp = (next - sum) - x;
        sum = next;
    }
    return m + std::log2(sum);
}

// Bits of mask gathered into the low bits of the result (n <= 64).
std::uint64_t gather_bits(std::uint64_t word, std::uint64_t mask) {
    std::uint64_t out = 0;
    int j = 0;
    while (mask) {
        std::uint64_t low = mask & (~mask + 1);
        if (word & low) out |= 1ull << j;
        ++j;
        mask ^= low;
    }
    return out;
}

double checked_sqrt(double x) { return std::sqrt(std::max(0.0, x)); }

}  // namespace

CorrelationSpec::CorrelationSpec(double rho_, int n_, std::optional<Word> l) : rho(rho_), n(n_), l_set(std::move(l)) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw ValidationError("rho must be in [0,1]");
    if (n < 1) throw ValidationError("spec needs n >= 1");
    if (l_set && l_set->length() != n) throw ValidationError("L must be a subset of [n]");
}

Word sample_correlated(const Word& x, const CorrelationSpec& spec, std::uint64_t seed) {
    if (x.length() != spec.n) throw ValidationError("sample_correlated: |x| != n");
    Word l = spec.l_mask();
    Word y(spec.n);
    const double p_copy = (1.0 + spec.rho) / 2.0;
    for (int i = 0; i < spec.n; ++i) {
        std::uint64_t r = rng::at(seed, static_cast<std::uint64_t>(i));
        if (l.bit(i)) {
            bool copy = rng::unit(r) < p_copy;
            y.set_bit(i, copy ? x.bit(i) : !x.bit(i));
        } else {
            y.set_bit(i, r & 1);
        }
    }
    return y;
}

double joint_log2_from_census(const std::vector<std::uint64_t>& counts, int n, int l_size, double rho) {
    const int r_size = n - l_size;
    const double la = std::log2((1.0 + rho) / 2.0);
    const double lb = rho < 1.0 ? std::log2((1.0 - rho) / 2.0) : kNegInf;
    std::vector<double> terms;
    terms.reserve(counts.size());
    for (int d = 0; d < static_cast<int>(counts.size()); ++d) {
        std::uint64_t wd = counts[static_cast<size_t>(d)];
        if (wd == 0) continue;
        if (d > 0 && lb == kNegInf) continue;
        terms.push_back(std::log2(static_cast<double>(wd)) + (l_size - d) * la + (d > 0 ? d * lb : 0.0) -
                        n - r_size);
    }
    return log_sum_exp2(terms);
}

double capped_census_envelope_log2(int n, double rho) {
    return -2.0 * n + n * std::log2(3.0 - rho);
}

namespace {

// Direct route: one log2 term per (a,b) pair, no census binning.
double joint_log2_direct(const CodePair& pair, const CorrelationSpec& spec) {
    const int n = spec.n;
    const Word mask = spec.l_mask();
    const int m = spec.l_size();
    const int r_size = spec.r_size();
    const double la = std::log2((1.0 + spec.rho) / 2.0);
    const double lb = spec.rho < 1.0 ? std::log2((1.0 - spec.rho) / 2.0) : kNegInf;
    std::vector<double> terms;
    terms.reserve(pair.a().size() * pair.b().size());
    for (const Word& a : pair.a().words()) {
        for (const Word& b : pair.b().words()) {
            int d = ((a ^ b) & mask).popcount();
            if (d > 0 && lb == kNegInf) continue;
            terms.push_back((m - d) * la + (d > 0 ? d * lb : 0.0) - n - r_size);
        }
    }
    return log_sum_exp2(terms);
}

Word random_word(int n, std::uint64_t sub_seed) {
    Word w(n);
    for (int limb = 0; limb * 64 < n; ++limb) {
        std::uint64_t bits = rng::at(sub_seed, static_cast<std::uint64_t>(limb));
        for (int i = limb * 64; i < std::min(n, (limb + 1) * 64); ++i)
            w.set_bit(i, (bits >> (i - limb * 64)) & 1);
    }
    return w;
}

}  // namespace

ProbabilityReport exact_joint_probability(const CodePair& pair, const CorrelationSpec& spec,
                                          const JointOptions& opt) {
    if (pair.length() != spec.n) throw ValidationError("pair and spec word lengths differ");
    ProbabilityReport rep;
    rep.rho = spec.rho;
    rep.n = spec.n;
    rep.l_size = spec.l_size();
    rep.r_size = spec.r_size();
    rep.census = distance_census(pair, spec.l_set);
    rep.exact_log2 = joint_log2_from_census(rep.census.counts, spec.n, rep.l_size, spec.rho);
    rep.prob_zero = rep.exact_log2 == kNegInf;

    const double pairs = static_cast<double>(pair.a().size()) * static_cast<double>(pair.b().size());
    if (opt.cross_check && pairs <= 1e6) {
        double direct = joint_log2_direct(pair, spec);
        rep.direct_log2 = direct;
        if (rep.prob_zero != (direct == kNegInf) ||
            (!rep.prob_zero && std::abs(std::exp2(direct - rep.exact_log2) - 1.0) > 1e-12)) {
            throw VerificationError("census and direct probability routes disagree");
        }
    }

    if (opt.mc_samples && *opt.mc_samples > 0) {
        const std::uint64_t total = *opt.mc_samples;
        const int nthreads = std::max(1, opt.threads);
        std::vector<std::uint64_t> hits(static_cast<size_t>(nthreads), 0);
        auto run = [&](int t) {
            std::uint64_t lo = total * static_cast<std::uint64_t>(t) / static_cast<std::uint64_t>(nthreads);
            std::uint64_t hi = total * static_cast<std::uint64_t>(t + 1) / static_cast<std::uint64_t>(nthreads);
            std::uint64_t h = 0;
            for (std::uint64_t j = lo; j < hi; ++j) {
                // Per-sample sub-seeds: the estimate does not depend on the
                // thread partition.
                Word a = random_word(spec.n, rng::derive(opt.seed, 2 * j));
                Word b = sample_correlated(a, spec, rng::derive(opt.seed, 2 * j + 1));
                if (pair.a().contains(a) && pair.b().contains(b)) ++h;
            }
            hits[static_cast<size_t>(t)] = h;
        };
        if (nthreads == 1) {
            run(0);
        } else {
            std::vector<std::thread> pool;
            for (int t = 0; t < nthreads; ++t) pool.emplace_back(run, t);
            for (auto& th : pool) th.join();
        }
        std::uint64_t h = 0;
        for (std::uint64_t v : hits) h += v;
        ProbabilityReport::Mc mc;
        mc.hits = h;
        mc.samples = total;
        mc.estimate = static_cast<double>(h) / static_cast<double>(total);
        mc.std_error = std::sqrt(std::max(0.0, mc.estimate * (1.0 - mc.estimate) / static_cast<double>(total)));
        mc.seed = opt.seed;
        rep.mc = mc;
    }

    if (opt.attach_rate_bounds) {
        if (spec.rho >= 1.0) throw ValidationError("rate bounds need rho < 1");
        const double eps = pair.epsilon();
        const double lambda = static_cast<double>(rep.l_size) / spec.n;
        BinaryCode bl = project(pair.b(), spec.l_mask());
        const double pi = std::log2(static_cast<double>(bl.size())) / spec.n;
        RefinedLowerTerms lt = refined_joint_lower_rate(lambda, pi, eps, spec.rho, spec.n);
        rep.lower_rate = lt.value;
        rep.lower_terms = ProbabilityReport::LowerTerms{lt.asymptotic, lt.chain_half_deficit,
                                                        lt.dense_half_deficit, lt.sqrt_deficit};
        rep.upper_rate = refined_joint_upper_rate(lambda, eps, spec.rho, spec.n);
        rep.bounds_assume_dense = true;
    }
    return rep;
}

void ProbabilityReport::to_json(JsonWriter& w) const {
    w.kv("n", n);
    w.kv("rho", rho);
    w.kv("l_size", l_size);
    w.kv("r_size", r_size);
    w.kv("prob_zero", prob_zero);
    if (prob_zero) {
        w.key("exact_log2").null();
        w.key("exact_prob").value(0.0);
    } else {
        w.kv("exact_log2", exact_log2);
        w.kv("exact_prob", std::exp2(exact_log2));
    }
    if (direct_log2) {
        if (*direct_log2 == kNegInf)
            w.key("direct_log2").null();
        else
            w.kv("direct_log2", *direct_log2);
    }
    if (mc) {
        w.key("mc").begin_object();
        w.kv("estimate", mc->estimate);
        w.kv("hits", mc->hits);
        w.kv("samples", mc->samples);
        w.kv("std_error", mc->std_error);
        w.kv("seed", mc->seed);
        w.end_object();
    }
    if (lower_rate) {
        w.kv("lower_rate", *lower_rate);
        w.kv("lower_bound_log2", *lower_rate * n);
        if (lower_terms) {
            w.key("lower_terms").begin_object();
            w.kv("asymptotic", lower_terms->asymptotic);
            w.kv("chain_half_deficit", lower_terms->chain_half_deficit);
            w.kv("dense_half_deficit", lower_terms->dense_half_deficit);
            w.kv("sqrt_deficit", lower_terms->sqrt_deficit);
            w.end_object();
        }
    }
    if (upper_rate) {
        w.kv("upper_rate", *upper_rate);
        w.kv("upper_bound_log2", *upper_rate * n);
    }
    if (lower_rate || upper_rate) w.kv("bounds_assume_dense", bounds_assume_dense);
    // Named intermediates of the census formula.
    const double la = std::log2((1.0 + rho) / 2.0);
    const bool flip_possible = rho < 1.0;
    w.key("terms").begin_object();
    w.kv("log2_copy_prob", la);
    if (flip_possible)
        w.kv("log2_flip_prob", std::log2((1.0 - rho) / 2.0));
    else
        w.key("log2_flip_prob").null();
    w.kv("uniform_offset_log2", static_cast<double>(-n - r_size));
    w.key("per_distance_log2").begin_array();
    for (int d = 0; d < static_cast<int>(census.counts.size()); ++d) {
        std::uint64_t wd = census.counts[static_cast<size_t>(d)];
        if (wd == 0 || (d > 0 && !flip_possible)) {
            w.null();
            continue;
        }
        double lb = flip_possible ? std::log2((1.0 - rho) / 2.0) : 0.0;
        w.value(std::log2(static_cast<double>(wd)) + (l_size - d) * la + (d > 0 ? d * lb : 0.0) - n -
                r_size);
    }
    w.end_array();
    w.end_object();
    w.key("census").begin_object();
    census.to_json(w);
    w.end_object();
}

double rsse_lower_bound_log2(const RssBoundInputs& in) {
    if (in.u_size < 1) throw ValidationError("|U| must be >= 1");
    if (!(in.f >= 0 && in.f <= 1 && in.g >= 0 && in.g <= 1))
        throw ValidationError("f and g must be in [0,1]");
    if (!(in.rho >= 0 && in.rho < 1)) throw ValidationError("rho must be in [0,1) here");
    const double uf = 1.0 - in.f, ug = 1.0 - in.g;
    return -in.u_size * (uf + ug + 2.0 * in.rho * std::sqrt(uf * ug)) / (1.0 - in.rho * in.rho);
}

namespace {

RsseBatteryResult rsse_check_censuses(
    int u_size, const std::vector<double>& rhos,
    const std::vector<std::tuple<int, int, std::vector<std::uint64_t>>>& instances) {
    RsseBatteryResult res;
    res.min_margin = std::numeric_limits<double>::infinity();
    for (const auto& [fs, gs, census] : instances) {
        const double f = std::log2(static_cast<double>(fs)) / u_size;
        const double g = std::log2(static_cast<double>(gs)) / u_size;
        for (double rho : rhos) {
            double exact = joint_log2_from_census(census, u_size, u_size, rho);
            double bound = rsse_lower_bound_log2({u_size, f, g, rho});
            double margin = exact - bound;
            ++res.checked;
            res.min_margin = std::min(res.min_margin, margin);
            if (margin < -1e-9) {
                ++res.violations;
                if (res.first_violation.empty())
                    res.first_violation = "|F|=" + std::to_string(fs) + " |G|=" + std::to_string(gs) +
                                          " rho=" + std::to_string(rho);
            }
        }
    }
    return res;
}

std::vector<std::uint64_t> pair_census(const std::vector<std::uint32_t>& F, const std::vector<std::uint32_t>& G,
                                       int u_size) {
    std::vector<std::uint64_t> census(static_cast<size_t>(u_size) + 1, 0);
    for (std::uint32_t x : F)
        for (std::uint32_t y : G) ++census[static_cast<size_t>(std::popcount(x ^ y))];
    return census;
}

}  // namespace

RsseBatteryResult rsse_dominance_exhaustive(int u_size, const std::vector<double>& rhos) {
    if (u_size < 1 || u_size > 3) throw ValidationError("exhaustive battery supports |U| <= 3");
    const int cube = 1 << u_size;
    const std::uint32_t subsets = (1u << cube) - 1;
    // Distance census per (F,G) via the precomputed member lists.
    std::vector<std::vector<std::uint32_t>> members(subsets + 1);
    for (std::uint32_t s = 1; s <= subsets; ++s)
        for (int wbit = 0; wbit < cube; ++wbit)
            if (s & (1u << wbit)) members[s].push_back(static_cast<std::uint32_t>(wbit));
    std::vector<std::tuple<int, int, std::vector<std::uint64_t>>> instances;
    instances.reserve(static_cast<size_t>(subsets) * subsets);
    for (std::uint32_t sf = 1; sf <= subsets; ++sf)
        for (std::uint32_t sg = 1; sg <= subsets; ++sg)
            instances.emplace_back(static_cast<int>(members[sf].size()), static_cast<int>(members[sg].size()),
                                   pair_census(members[sf], members[sg], u_size));
    return rsse_check_censuses(u_size, rhos, instances);
}

RsseBatteryResult rsse_dominance_random(int u_size, int instances, const std::vector<double>& rhos,
                                        std::uint64_t seed) {
    if (u_size < 1 || u_size > 20) throw ValidationError("random battery supports |U| <= 20");
    const std::uint64_t cube = 1ull << u_size;
    std::vector<std::tuple<int, int, std::vector<std::uint64_t>>> all;
    all.reserve(static_cast<size_t>(instances));
    for (int i = 0; i < instances; ++i) {
        rng::Stream s{rng::derive(seed, static_cast<std::uint64_t>(i))};
        auto sample_set = [&](std::uint64_t size) {
            // Floyd's uniform sampling of `size` distinct words.
            std::vector<std::uint32_t> v;
            std::vector<bool> in(cube, false);
            for (std::uint64_t j = cube - size; j < cube; ++j) {
                std::uint64_t t = s.next_below(j + 1);
                if (in[t]) t = j;
                in[t] = true;
                v.push_back(static_cast<std::uint32_t>(t));
            }
            return v;
        };
        std::uint64_t fs = 1 + s.next_below(cube);
        std::uint64_t gs = 1 + s.next_below(cube);
        auto F = sample_set(fs), G = sample_set(gs);
        all.emplace_back(static_cast<int>(fs), static_cast<int>(gs), pair_census(F, G, u_size));
    }
    return rsse_check_censuses(u_size, rhos, all);
}

// ----- split finding -----

namespace {

std::uint64_t count_projections(const std::vector<std::uint64_t>& b_words, std::uint64_t mask,
                                std::vector<std::uint64_t>& scratch) {
    scratch.clear();
    for (std::uint64_t w : b_words) scratch.push_back(gather_bits(w, mask));
    std::sort(scratch.begin(), scratch.end());
    return static_cast<std::uint64_t>(std::unique(scratch.begin(), scratch.end()) - scratch.begin());
}

}  // namespace

SplitReport find_split(const CodePair& pair, SplitMode mode, std::uint64_t seed, int samples) {
    if (!is_udcp(pair)) throw ValidationError("find_split requires a verified UDCP");
    const int n = pair.length();
    if (n > 63) throw ValidationError("find_split supports n <= 63");
    const double eps = pair.epsilon();
    const double w = fat_layer_gamma(eps);

    SplitReport rep;
    rep.window_lo = 0.5 - w;
    rep.window_hi = 0.5 + w;
    rep.mode = mode == SplitMode::Exhaustive ? "exhaustive" : (mode == SplitMode::Greedy ? "greedy" : "sampled");
    int smin = std::max(0, static_cast<int>(std::ceil(rep.window_lo * n - 1e-9)));
    int smax = std::min(n, static_cast<int>(std::floor(rep.window_hi * n + 1e-9)));
    rep.min_size = smin;
    rep.max_size = smax;
    if (smin > smax) {
        rep.window_empty = true;
        return rep;
    }

    std::vector<std::uint64_t> b_words;
    b_words.reserve(pair.b().size());
    for (const Word& bw : pair.b().words()) b_words.push_back(bw.limb(0));
    std::vector<std::uint64_t> scratch;
    scratch.reserve(b_words.size());

    std::uint64_t best_mask = 0, best_count = 0;
    bool have = false;
    auto consider = [&](std::uint64_t mask) {
        std::uint64_t c = count_projections(b_words, mask, scratch);
        if (!have || c > best_count || (c == best_count && mask < best_mask)) {
            have = true;
            best_count = c;
            best_mask = mask;
        }
    };

    if (mode == SplitMode::Exhaustive) {
        if (n > 24) throw ValidationError("exhaustive split supported for n <= 24");
        for (int s = smin; s <= smax; ++s) {
            if (s == 0) {
                consider(0);
                continue;
            }
            std::uint64_t mask = (1ull << s) - 1;
            const std::uint64_t limit = 1ull << n;
            while (mask < limit) {
                consider(mask);
                // Gosper's hack: next mask of equal popcount.
                std::uint64_t c = mask & (~mask + 1);
                std::uint64_t r = mask + c;
                mask = (((r ^ mask) >> 2) / c) | r;
            }
        }
    } else if (mode == SplitMode::Greedy) {
        std::uint64_t mask = 0;
        for (int step = 0; step < smax; ++step) {
            int pick = -1;
            std::uint64_t pick_count = 0;
            for (int i = 0; i < n; ++i) {
                if (mask & (1ull << i)) continue;
                std::uint64_t c = count_projections(b_words, mask | (1ull << i), scratch);
                if (pick < 0 || c > pick_count) {
                    pick = i;
                    pick_count = c;
                }
            }
            mask |= 1ull << pick;
        }
        consider(mask);
    } else {
        rng::Stream s{seed};
        for (int t = 0; t < samples; ++t) {
            int size = smin + static_cast<int>(s.next_below(static_cast<std::uint64_t>(smax - smin + 1)));
            std::uint64_t mask = 0;
            // Floyd's sampling of `size` coordinates.
            for (int j = n - size; j < n; ++j) {
                std::uint64_t pick = s.next_below(static_cast<std::uint64_t>(j) + 1);
                if (mask & (1ull << pick)) pick = static_cast<std::uint64_t>(j);
                mask |= 1ull << pick;
            }
            consider(mask);
        }
    }

    rep.l_set = Word::from_bits(n, best_mask);
    rep.lambda = static_cast<double>(rep.l_set.popcount()) / n;
    rep.b_l_size = best_count;
    rep.pi = std::log2(static_cast<double>(best_count)) / n;
    rep.projection_floor = pair.beta() - eps - 1.0 / n;
    rep.floor_met = rep.pi >= rep.projection_floor - 1e-9;
    return rep;
}

void SplitReport::to_json(JsonWriter& w) const {
    w.kv("mode", mode);
    w.kv("window_lo", window_lo);
    w.kv("window_hi", window_hi);
    w.kv("min_size", min_size);
    w.kv("max_size", max_size);
    w.kv("window_empty", window_empty);
    if (window_empty) return;
    w.key("l").begin_array();
    for (int c : coords_1based(l_set)) w.value(c);
    w.end_array();
    w.kv("lambda", lambda);
    w.kv("b_l_size", b_l_size);
    w.kv("pi", pi);
    w.kv("projection_floor", projection_floor);
    w.kv("floor_met", floor_met);
}

// ----- refined-distribution rate bounds -----

double refined_joint_upper_rate(double lambda, double eps, double rho, int n) {
    if (!(rho >= 0 && rho <= 1)) throw ValidationError("rho must be in [0,1]");
    if (!(lambda >= 0 && lambda <= 1)) throw ValidationError("lambda must be in [0,1]");
    if (eps < 0) throw ValidationError("eps must be >= 0");
    if (n < 1) throw ValidationError("n must be >= 1");
    return std::sqrt(std::numbers::ln2 * eps / 2.0) - 0.5 + lambda * (std::log2(3.0 - rho) - 1.5) + 1.0 / n;
}

RefinedLowerTerms refined_joint_lower_rate(double lambda, double pi, double eps, double rho, int n) {
    if (!(rho >= 0 && rho < 1)) throw ValidationError("rho = 1 is rejected (1 - rho^2 denominator)");
    if (pi > lambda + 1e-15) throw ValidationError("pi must be <= lambda");
    if (!(pi >= 0 && lambda <= 1)) throw ValidationError("need 0 <= pi <= lambda <= 1");
    if (eps < 0 || n < 1) throw ValidationError("need eps >= 0 and n >= 1");
    const double q = 1.0 - rho * rho;
    const double gap = std::max(0.0, lambda - pi);
    RefinedLowerTerms t;
    t.asymptotic = (pi - lambda - eps - 2.0 * rho * checked_sqrt(eps * gap)) / q + lambda - 1.0 - eps;
    t.chain_half_deficit = 1.0 / n;
    t.dense_half_deficit = (1.0 / n) / q;
    t.sqrt_deficit = 2.0 * rho * (checked_sqrt((eps + 1.0 / n) * gap) - checked_sqrt(eps * gap)) / q;
    t.value = t.asymptotic - t.chain_half_deficit - t.dense_half_deficit - t.sqrt_deficit;
    return t;
}

// ----- fat layers -----

double fat_layer_gamma(double eps) {
    if (eps < 0) throw ValidationError("eps must be >= 0");
    return std::sqrt(std::numbers::ln2 * eps / 2.0);
}

FatLayerReport fat_layer_fraction(const BinaryCode& x, const Word& z, double gamma, double eps) {
    if (!(gamma > 0 && gamma <= 0.5)) throw ValidationError("gamma must be in (0, 1/2]");
    if (z.length() != x.length()) throw ValidationError("|z| != n");
    const int n = x.length();
    const double lo = (0.5 - gamma) * n - 1e-9;
    const double hi = (0.5 + gamma) * n + 1e-9;
    std::uint64_t inside = 0;
    for (const Word& w : x.words()) {
        int d = (w ^ z).popcount();
        if (d >= lo && d <= hi) ++inside;
    }
    FatLayerReport r;
    r.fraction = static_cast<double>(inside) / static_cast<double>(x.size());
    r.premise_met = eps >= 0 && eps <= 1 && x.size() >= pow2_ceil((1.0 - eps) * n) &&
                    gamma >= fat_layer_gamma(eps) - 1e-12;
    r.at_least_half = r.fraction >= 0.5;
    return r;
}

double cube_fat_layer_fraction(int n, double gamma) {
    if (n < 1 || n > 126) throw ValidationError("cube fraction supports n <= 126");
    if (!(gamma > 0 && gamma <= 0.5)) throw ValidationError("gamma must be in (0, 1/2]");
    const int dlo = std::max(0, static_cast<int>(std::ceil((0.5 - gamma) * n - 1e-9)));
    const int dhi = std::min(n, static_cast<int>(std::floor((0.5 + gamma) * n + 1e-9)));
    u128 sum = 0;
    for (int d = dlo; d <= dhi; ++d) sum += binom128(n, d);
    return static_cast<double>(static_cast<long double>(sum) / std::exp2(static_cast<long double>(n)));
}

void FatLayerReport::to_json(JsonWriter& w) const {
    w.kv("fraction", fraction);
    w.kv("premise_met", premise_met);
    w.kv("at_least_half", at_least_half);
}

}  // namespace udcp
