#include "udcp/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "udcp/errors.hpp"
#include "udcp/interval.hpp"

namespace udcp {

namespace {

constexpr double kLn2 = std::numbers::ln2;

// Largest x in [lo, hi] with x <= f(x), for f monotone non-increasing.
// Plain iteration from hi converges when the map contracts; a bisection
// fallback guards the (theoretically impossible) non-convergent case.
template <class F>
double largest_consistent(F f, double lo, double hi) {
    if (hi <= f(hi)) return hi;
    double x = hi;
    for (int it = 0; it < 200; ++it) {
        double nx = std::clamp(f(x), lo, hi);
        if (std::abs(nx - x) < 1e-13) {
            x = nx;
            // Accept only a genuine fixed point; oscillation falls through.
            if (std::abs(f(x) - x) < 1e-11) return x;
            break;
        }
        x = nx;
    }
    double a = lo, b = hi;  // f(x)-x decreasing; root bracketed
    for (int it = 0; it < 200; ++it) {
        double m = 0.5 * (a + b);
        if (f(m) - m >= 0)
            a = m;
        else
            b = m;
    }
    return a;
}

// Golden-section minimum of a unimodal f on [a, b], seeded by the caller.
template <class F>
double golden_min(F f, double a, double b) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 120; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

double warmup_constant(double rho) { return (std::log2(3.0 - rho) - 2.0) * (1.0 - rho * rho) + 1.0; }

double warmup_fixed_point(double eps, double rho) {
    auto f = [&](double b) {
        return warmup_constant(rho) + eps + 2.0 * rho * std::sqrt(eps * std::max(0.0, 1.0 - b));
    };
    return largest_consistent(f, 0.0, 1.0);
}

struct MainSolve {
    double lambda, k_const, pi, beta;
};

MainSolve main_solve(double eps, double rho, std::optional<double> lambda_override) {
    MainSolve s;
    s.lambda = lambda_override ? *lambda_override : 0.5 + std::sqrt(kLn2 * eps / 2.0);
    const double q = 1.0 - rho * rho;
    s.k_const =
        (std::sqrt(kLn2 * eps / 2.0) + 0.5 + eps + s.lambda * (std::log2(3.0 - rho) - 2.5)) * q + eps + s.lambda;
    auto f = [&](double p) {
        return s.k_const + 2.0 * rho * std::sqrt(eps * std::max(0.0, s.lambda - p));
    };
    s.pi = largest_consistent(f, 0.0, s.lambda);
    s.beta = std::min(1.0, std::max(0.0, s.pi) + eps);
    return s;
}

}  // namespace

double binary_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("binary_entropy needs x in [0,1]");
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double entropy_half_bound_margin(double x) {
    if (!(x > 0.0 && x <= 0.5)) throw ValidationError("margin needs x in (0, 1/2]");
    const double y = 2.0 * x;
    if (y <= 0.9) {
        // margin = (1/ln2) sum_{k>=2} y^{2k} / (2k(2k-1)); the k=1 term is
        // exactly the quadratic bound, so cancellation never occurs.
        double y2 = y * y;
        double pow = y2 * y2;
        double sum = 0.0;
        for (int k = 2; k < 600; ++k) {
            double t = pow / (2.0 * k * (2.0 * k - 1.0));
            sum += t;
            if (t < sum * 1e-18) break;
            pow *= y2;
        }
        return sum / kLn2;
    }
    return 1.0 - (2.0 / kLn2) * x * x - binary_entropy(0.5 + x);
}

double classic_bound(double eps) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw ValidationError("classic_bound needs eps in [0,1]");
    return std::min(0.5 + eps, 1.0);
}

double BoundReport::term(const std::string& name) const {
    for (const auto& [k, v] : terms)
        if (k == name) return v;
    throw ValidationError("no such report term: " + name);
}

void BoundReport::to_json(JsonWriter& w) const {
    w.kv("method", method);
    w.kv("epsilon", inputs.epsilon);
    w.kv("rho", inputs.rho);
    w.kv("rho_optimized", rho_optimized);
    if (method == "main") w.kv("lambda", inputs.lambda);
    if (method == "main") w.kv("pi", inputs.pi);
    w.kv("beta_bound", beta_bound);
    w.kv("winner", winner);
    w.kv("asymptotic", asymptotic);
    w.kv("certified", certified);
    w.key("terms").begin_object();
    for (const auto& [k, v] : terms) w.kv(k, v);
    w.end_object();
}

BoundReport warmup_bound(double eps, std::optional<double> rho) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw ValidationError("warmup_bound needs eps in [0,1]");
    if (rho && !(*rho >= 0.0 && *rho < 1.0)) throw ValidationError("rho must be in [0,1)");

    BoundReport r;
    r.method = "warmup";
    r.asymptotic = true;
    r.rho_optimized = !rho.has_value();
    double chosen = rho.value_or(0.0);
    if (!rho) {
        // 1e-3 grid seed, then golden section around the best cell.
        double best_r = 0.0, best_v = warmup_fixed_point(eps, 0.0);
        for (int i = 1; i < 1000; ++i) {
            double rr = i * 1e-3;
            double v = warmup_fixed_point(eps, rr);
            if (v < best_v) {
                best_v = v;
                best_r = rr;
            }
        }
        chosen = golden_min([&](double rr) { return warmup_fixed_point(eps, rr); },
                            std::max(0.0, best_r - 2e-3), std::min(1.0 - 1e-9, best_r + 2e-3));
    }
    const double fp = warmup_fixed_point(eps, chosen);
    const double classic = classic_bound(eps);
    r.inputs.epsilon = eps;
    r.inputs.rho = chosen;
    r.inputs.beta = fp;
    r.terms.emplace_back("constant_term", warmup_constant(chosen));
    r.terms.emplace_back("two_rho", 2.0 * chosen);
    r.terms.emplace_back("fixed_point_beta", fp);
    r.terms.emplace_back("classic_cap", classic);
    // A pinned rho reports the inequality's own value at that rho; the
    // optimized call reports the best valid bound, so the counting bound
    // caps it where the fixed point is weaker.
    if (rho.has_value() || fp <= classic) {
        r.beta_bound = fp;
        r.winner = "warmup";
    } else {
        r.beta_bound = classic;
        r.winner = "classic";
    }
    return r;
}

BoundReport main_bound(double eps, std::optional<double> rho, std::optional<double> lambda_override,
                       bool allow_fallback) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw ValidationError("main_bound needs eps in [0,1]");
    if (rho && !(*rho >= 0.0 && *rho < 1.0)) throw ValidationError("rho must be in [0,1)");
    if (lambda_override && !(*lambda_override >= 0.0 && *lambda_override <= 1.0))
        throw ValidationError("lambda override must be in [0,1]");
    if (eps > 0.01 && !allow_fallback)
        throw ValidationError("main_bound is certified for eps <= 0.01; pass the fallback flag beyond");

    BoundReport r;
    r.method = "main";
    r.asymptotic = true;
    r.inputs.epsilon = eps;

    const BoundReport warm = warmup_bound(eps);
    const double classic = classic_bound(eps);

    if (eps > 0.01) {
        r.inputs.rho = warm.inputs.rho;
        r.rho_optimized = !rho.has_value();
        r.terms.emplace_back("warmup_bound", warm.beta_bound);
        r.terms.emplace_back("classic_bound", classic);
        if (warm.beta_bound < classic) {
            r.beta_bound = warm.beta_bound;
            r.winner = "warmup";
        } else {
            r.beta_bound = classic;
            r.winner = "classic";
        }
        return r;
    }

    r.rho_optimized = !rho.has_value();
    double chosen = rho.value_or(0.0);
    if (!rho) {
        double best_r = 0.0, best_v = main_solve(eps, 0.0, lambda_override).beta;
        for (int i = 1; i < 1000; ++i) {
            double rr = i * 1e-3;
            double v = main_solve(eps, rr, lambda_override).beta;
            if (v < best_v) {
                best_v = v;
                best_r = rr;
            }
        }
        chosen = golden_min([&](double rr) { return main_solve(eps, rr, lambda_override).beta; },
                            std::max(0.0, best_r - 2e-3), std::min(1.0 - 1e-9, best_r + 2e-3));
    }

    const MainSolve s = main_solve(eps, chosen, lambda_override);
    const double q = 1.0 - chosen * chosen;
    r.inputs.rho = chosen;
    r.inputs.lambda = s.lambda;
    r.inputs.pi = s.pi;
    r.inputs.beta = s.beta;
    r.terms.emplace_back("one_minus_rho2", q);
    r.terms.emplace_back("log2_3_minus_rho", std::log2(3.0 - chosen));
    r.terms.emplace_back("bracket", s.k_const);
    // Linear form in lambda: pi <= c0 + c1 lambda + (eps and sqrt terms).
    r.terms.emplace_back("linear_const", 0.5 * q);
    r.terms.emplace_back("linear_lambda_coeff", 1.0 + (std::log2(3.0 - chosen) - 2.5) * q);
    r.terms.emplace_back("eps_coeff", 1.0 + q);
    r.terms.emplace_back("sqrt_eps_coeff", q * std::sqrt(kLn2 / 2.0));
    r.terms.emplace_back("two_rho", 2.0 * chosen);
    r.terms.emplace_back("pi_bound", s.pi);
    r.terms.emplace_back("main_beta", s.beta);
    const double warm_fp = warm.term("fixed_point_beta");
    r.terms.emplace_back("warmup_bound", warm_fp);
    r.terms.emplace_back("classic_bound", classic);

    r.beta_bound = s.beta;
    r.winner = "main";
    if (warm_fp < r.beta_bound) {
        r.beta_bound = warm_fp;
        r.winner = "warmup";
    }
    if (classic < r.beta_bound) {
        r.beta_bound = classic;
        r.winner = "classic";
    }
    return r;
}

double ineq3_residual(double eps) {
    if (!(eps > 0.0)) throw ValidationError("residual needs eps > 0");
    const double rad = 0.0772 + std::sqrt(kLn2 * eps / 2.0) - std::sqrt(eps) - eps;
    if (rad < 0.0)
        throw ValidationError("residual radicand negative at eps = " + std::to_string(eps));
    return 2.573 * eps + (0.4979 - 1.0 + 1.308 * std::sqrt(rad)) * std::sqrt(eps);
}

namespace {

// Interval enclosure of the residual. Returns nullopt when the radicand
// enclosure straddles zero (caller bisects further).
std::optional<Interval> residual_interval(Interval e) {
    const Interval ln2 = interval_ln2();
    Interval rad = 0.0772 + interval_sqrt(0.5 * (ln2 * e)) - interval_sqrt(e) - e;
    if (rad.lo < 0.0) {
        if (rad.hi < 0.0)
            throw ValidationError("residual radicand negative on [" + std::to_string(e.lo) + ", " +
                                  std::to_string(e.hi) + "]");
        return std::nullopt;
    }
    Interval bracket = (0.4979 - 1.0) + 1.308 * interval_sqrt(rad);
    return 2.573 * e + bracket * interval_sqrt(e);
}

void envelope_constants(IneqCertificate& c) {
    // From sqrt(0.0772 + t) <= sqrt(0.0772) + sqrt(t) with t = sqrt(ln2 e/2):
    //   R(e) <= -(1 - 0.4979 - 1.308 sqrt(0.0772)) sqrt(e)
    //           + 1.308 (ln2/2)^{1/4} e^{3/4} + 2.573 e.
    Interval a = 1.0 - 0.4979 - 1.308 * interval_sqrt(Interval::exact(0.0772));
    Interval b = 1.308 * interval_sqrt(interval_sqrt(0.5 * interval_ln2()));
    c.env_c_sqrt_lo = a.lo;
    c.env_c_q_hi = b.hi;
    // Negative while c_q x + 2.573 x^2 < c_sqrt for x = e^{1/4}; conservative
    // radius by bisection with the outward-rounded coefficients.
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        double m = 0.5 * (lo + hi);
        if (c.env_c_q_hi * m + 2.573 * m * m < c.env_c_sqrt_lo)
            lo = m;
        else
            hi = m;
    }
    c.env_valid_below = lo * lo * lo * lo * 0.999;
}

}  // namespace

IneqCertificate verify_ineq3_float(double grid_step, double min_eps, double max_eps) {
    if (!(grid_step > 0.0)) throw ValidationError("grid_step must be > 0");
    if (!(min_eps > 0.0 && min_eps < max_eps)) throw ValidationError("need 0 < min_eps < max_eps");
    IneqCertificate c;
    c.mode = "float";
    c.min_eps = min_eps;
    c.max_eps = max_eps;
    c.grid_step = grid_step;
    c.punctured_radius = min_eps;
    envelope_constants(c);
    double worst = -std::numeric_limits<double>::infinity(), at = min_eps;
    std::uint64_t k = 0;
    for (double e = min_eps;; e = std::min(e + grid_step, max_eps)) {
        double rv = ineq3_residual(e);
        ++k;
        if (rv > worst) {
            worst = rv;
            at = e;
        }
        if (e >= max_eps) break;
    }
    c.points = k;
    c.max_residual = worst;
    c.argmax = at;
    c.certified = false;  // a float sweep is evidence, not a certificate
    c.max_upper = worst;
    return c;
}

IneqCertificate verify_ineq3_interval(double min_eps, double max_eps, double punctured_radius) {
    if (!(min_eps > 0.0 && min_eps < max_eps)) throw ValidationError("need 0 < min_eps < max_eps");
    IneqCertificate c;
    c.mode = "interval";
    c.min_eps = min_eps;
    c.max_eps = max_eps;
    c.punctured_radius = punctured_radius;
    envelope_constants(c);

    std::vector<std::pair<double, double>> work{{min_eps, max_eps}};
    c.certified = true;
    c.max_upper = -std::numeric_limits<double>::infinity();
    while (!work.empty()) {
        auto [lo, hi] = work.back();
        work.pop_back();
        if (c.subintervals.size() + work.size() > 2000000)
            throw VerificationError("interval certificate exceeded the subinterval budget");
        std::optional<Interval> rv = residual_interval({lo, hi});
        if (rv && rv->hi < 0.0) {
            c.subintervals.push_back({lo, hi, rv->hi});
            c.max_upper = std::max(c.max_upper, rv->hi);
            continue;
        }
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi || (hi - lo) < 1e-14 * hi) {
            c.certified = false;
            c.subintervals.push_back({lo, hi, rv ? rv->hi : std::numeric_limits<double>::infinity()});
            continue;
        }
        work.emplace_back(mid, hi);
        work.emplace_back(lo, mid);
    }
    std::sort(c.subintervals.begin(), c.subintervals.end(),
              [](const IneqCertificate::Sub& a, const IneqCertificate::Sub& b) { return a.lo < b.lo; });
    return c;
}

void IneqCertificate::header_json(JsonWriter& w) const {
    w.kv("mode", mode);
    w.kv("min_epsilon", min_eps);
    w.kv("max_epsilon", max_eps);
    w.kv("certified", certified);
    if (mode == "float") {
        w.kv("grid_step", grid_step);
        w.kv("points", points);
        w.kv("max_residual", max_residual);
        w.kv("argmax", argmax);
    } else {
        w.kv("subintervals", static_cast<std::uint64_t>(subintervals.size()));
        w.kv("max_upper", max_upper);
    }
    w.kv("punctured_radius", punctured_radius);
    w.key("envelope").begin_object();
    w.kv("c_sqrt_lo", env_c_sqrt_lo);
    w.kv("c_q_hi", env_c_q_hi);
    w.kv("c_lin", 2.573);
    w.kv("valid_below", env_valid_below);
    w.kv("form", "R(e) <= -c_sqrt_lo*sqrt(e) + c_q_hi*e^0.75 + c_lin*e");
    w.end_object();
}

std::string IneqCertificate::to_jsonl() const {
    JsonWriter h;
    h.begin_object();
    h.kv("schema", 1);
    h.kv("command", "verify-ineq3");
    header_json(h);
    h.end_object();
    std::string out = h.take();
    out += '\n';
    for (const Sub& s : subintervals) {
        JsonWriter l;
        l.begin_object().kv("lo", s.lo).kv("hi", s.hi).kv("upper_bound", s.upper).end_object();
        out += l.take();
        out += '\n';
    }
    return out;
}

}  // namespace udcp
