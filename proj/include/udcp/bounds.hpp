#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "udcp/json_writer.hpp"

namespace udcp {

// h(x) = -x log2 x - (1-x) log2(1-x), endpoints 0 by continuity.
double binary_entropy(double x);

// 1 - (2/ln2) x^2 - h(1/2 + x) for x in (0, 1/2]; positive everywhere.
// Evaluated by its power series for small x, where the direct formula
// cancels below double precision.
double entropy_half_bound_margin(double x);

// min(1/2 + eps, 1).
double classic_bound(double eps);

struct RateParams {
    double epsilon = 0;
    double beta = 0;
    double rho = 0;
    double lambda = 0;
    double pi = 0;
};

struct BoundReport {
    std::string method;  // warmup | main | classic
    RateParams inputs;
    std::vector<std::pair<std::string, double>> terms;
    double beta_bound = 0;
    bool certified = false;   // directed-rounding evaluation end to end
    bool asymptotic = false;  // o(1) terms dropped
    bool rho_optimized = false;
    std::string winner;       // which method produced beta_bound

    double term(const std::string& name) const;
    void to_json(JsonWriter& w) const;
};

// beta <= (log2(3-rho)-2)(1-rho^2) + 1 + eps + 2 rho sqrt(eps(1-beta)),
// solved for the largest consistent beta; rho absent = optimized by a
// 1e-3 grid plus golden section. Capped by classic_bound (both are valid
// upper bounds, so the minimum is reported).
BoundReport warmup_bound(double eps, std::optional<double> rho = {});

// The combined split bound: lambda pinned to 1/2 + sqrt(ln2 eps/2) unless
// overridden, pi solved as the largest value consistent with
//   pi <= (sqrt(ln2 eps/2) + 1/2 + eps + lambda(log2(3-rho) - 5/2))(1-rho^2)
//         + 2 rho sqrt(eps(lambda-pi)) + eps + lambda,
// and beta = pi + eps, reported as min against warmup and classic.
// Certified input range is eps <= 0.01; beyond it the classic bound is
// used (or a ValidationError if allow_fallback is false).
BoundReport main_bound(double eps, std::optional<double> rho = {},
                       std::optional<double> lambda_override = {}, bool allow_fallback = true);

// Residual of the final contradiction inequality:
//   R(e) = 2.573 e + (0.4979 - 1 + 1.308 sqrt(0.0772 + sqrt(ln2 e/2) - sqrt(e) - e)) sqrt(e).
// Throws if the inner radicand goes negative (it does not on (0, 0.01]).
double ineq3_residual(double eps);

struct IneqCertificate {
    std::string mode;  // float | interval
    double min_eps = 0, max_eps = 0;
    bool certified = false;  // R < 0 everywhere on [min_eps, max_eps]
    // float mode
    double grid_step = 0;
    std::uint64_t points = 0;
    double max_residual = 0;
    double argmax = 0;
    // interval mode
    struct Sub {
        double lo, hi, upper;  // rigorous upper bound of R on [lo, hi]
    };
    std::vector<Sub> subintervals;
    double max_upper = 0;
    // analytic envelope for (0, min_eps): R(e) <= -c_sqrt_lo sqrt(e)
    // + c_q_hi e^{3/4} + 2.573 e, negative for e <= env_valid_below.
    double env_c_sqrt_lo = 0, env_c_q_hi = 0, env_valid_below = 0;
    double punctured_radius = 0;

    void header_json(JsonWriter& w) const;
    std::string to_jsonl() const;  // header line + one line per subinterval
};

IneqCertificate verify_ineq3_float(double grid_step, double min_eps = 1e-8, double max_eps = 0.01);
IneqCertificate verify_ineq3_interval(double min_eps = 1e-8, double max_eps = 0.01,
                                      double punctured_radius = 1e-8);

}  // namespace udcp
