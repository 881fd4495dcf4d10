// Command-line front end: verification, censuses, probabilities, bounds,
// certificates, splits, searches and sampling, with reproducible seeds and
// machine-readable output. Results go to stdout (byte-identical across
// runs for identical inputs); the run manifest and all diagnostics go to
// stderr. Exit codes: 0 ok, 1 bad input, 2 verification/assertion failure,
// 3 budget exhausted.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "udcp/bounds.hpp"
#include "udcp/core.hpp"
#include "udcp/json_writer.hpp"
#include "udcp/noise.hpp"
#include "udcp/rng.hpp"
#include "udcp/search.hpp"
#include "udcp/version.hpp"

namespace {

using namespace udcp;

struct Common {
    bool json = false;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 1;
    std::vector<std::pair<std::string, std::string>> input_digests;
};

std::uint64_t env_seed() {
    const char* s = std::getenv("UDCP_SEED");
    if (!s) return 0;
    return std::strtoull(s, nullptr, 10);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

BinaryCode load_code(const std::string& path, Common& common) {
    std::string text = slurp(path);
    common.input_digests.emplace_back(path, fnv1a_hex(text));
    return BinaryCode::parse_text(text, path);
}

void emit(const Common&, JsonWriter& out) { std::cout << out.str() << "\n"; }

// One JSON line on stderr describing the run.
void manifest(const std::string& sub, int argc, char** argv, const Common& common, double wall_ms) {
    JsonWriter w;
    w.begin_object();
    w.kv("schema", 1);
    w.kv("tool", "udcp");
    w.kv("version", kVersion);
    w.kv("subcommand", sub);
    w.key("argv").begin_array();
    for (int i = 0; i < argc; ++i) w.value(std::string_view(argv[i]));
    w.end_array();
    w.kv("seed", common.seed);
    w.key("inputs").begin_object();
    for (const auto& [path, digest] : common.input_digests) w.kv(path, digest);
    w.end_object();
    w.kv("wall_ms", wall_ms);
    w.end_object();
    std::cerr << w.str() << "\n";
}

void word_list_json(JsonWriter& w, const char* key, const Word& mask) {
    w.key(key).begin_array();
    for (int c : coords_1based(mask)) w.value(c);
    w.end_array();
}

int cmd_verify(const std::string& a_path, const std::string& b_path, Common& common) {
    BinaryCode a = load_code(a_path, common);
    CodePair pair(std::move(a), load_code(b_path, common));
    std::optional<Collision> col = find_collision(pair);
    pair.cache_udcp(!col.has_value());
    JsonWriter w(!common.json);
    w.begin_object();
    w.kv("schema", 1);
    w.kv("command", "verify");
    w.kv("n", pair.length());
    w.kv("a_size", static_cast<std::uint64_t>(pair.a().size()));
    w.kv("b_size", static_cast<std::uint64_t>(pair.b().size()));
    w.kv("udcp", !col.has_value());
    w.kv("alpha", pair.alpha());
    w.kv("beta", pair.beta());
    w.kv("alpha_plus_beta", pair.alpha() + pair.beta());
    w.kv("epsilon", pair.epsilon());
    if (col) {
        w.key("collision").begin_object();
        w.kv("a1", col->a1.str());
        w.kv("b1", col->b1.str());
        w.kv("a2", col->a2.str());
        w.kv("b2", col->b2.str());
        w.kv("sum", TernaryWord::sum_of(col->a1, col->b1).str());
        w.end_object();
    }
    w.end_object();
    emit(common, w);
    return col ? 2 : 0;
}

int cmd_census(const std::string& a_path, const std::string& b_path, const std::string& l_csv, Common& common) {
    BinaryCode a = load_code(a_path, common);
    CodePair pair(std::move(a), load_code(b_path, common));
    std::optional<Word> l;
    if (!l_csv.empty()) l = parse_coord_set(l_csv, pair.length());
    DistanceCensus c = distance_census(pair, l);
    JsonWriter w(!common.json);
    w.begin_object();
    w.kv("schema", 1);
    w.kv("command", "census");
    c.to_json(w);
    w.end_object();
    emit(common, w);
    return 0;
}

int cmd_prob(const std::string& a_path, const std::string& b_path, double rho, const std::string& l_csv,
             bool has_l, std::uint64_t mc, bool attach_bounds, Common& common) {
    BinaryCode a = load_code(a_path, common);
    CodePair pair(std::move(a), load_code(b_path, common));
    std::optional<Word> l;
    if (has_l) l = parse_coord_set(l_csv, pair.length());
    CorrelationSpec spec(rho, pair.length(), l);
    JointOptions opt;
    if (mc > 0) opt.mc_samples = mc;
    opt.seed = common.seed;
    opt.threads = common.threads;
    opt.attach_rate_bounds = attach_bounds;
    ProbabilityReport rep = exact_joint_probability(pair, spec, opt);
    JsonWriter w(!common.json);
    w.begin_object();
    w.kv("schema", 1);
    w.kv("command", "prob");
    rep.to_json(w);
    w.end_object();
    emit(common, w);
    return 0;
}

int cmd_rsse(int u_size, double f, double g, double rho, const std::string& validate, int instances,
             Common& common) {
    JsonWriter w(!common.json);
    w.begin_object();
    w.kv("schema", 1);
    w.kv("command", "rsse-check");
    int rc = 0;
    if (validate.empty()) {
        double bound = rsse_lower_bound_log2({u_size, f, g, rho});
        w.kv("u_size", u_size);
        w.kv("f", f);
        w.kv("g", g);
        w.kv("rho", rho);
        w.kv("bound_log2", bound);
    } else {
        std::vector<double> rhos;
        for (int i = 1; i <= 9; ++i) rhos.push_back(i * 0.1);
        RsseBatteryResult res = validate == "exhaustive"
                                    ? rsse_dominance_exhaustive(u_size, rhos)
                                    : rsse_dominance_random(u_size, instances, rhos, common.seed);
        w.kv("u_size", u_size);
        w.kv("validate", validate);
        w.kv("instances", instances);
        w.kv("checked", res.checked);
        w.kv("violations", res.violations);
        w.kv("min_margin", res.min_margin);
        if (res.violations > 0) {
            w.kv("first_violation", res.first_violation);
            rc = 2;
        }
    }
    w.end_object();
    emit(common, w);
    return rc;
}

int cmd_split(const std::string& a_path, const std::string& b_path, const std::string& mode_s, int samples,
              Common& common) {
    BinaryCode a = load_code(a_path, common);
    CodePair pair(std::move(a), load_code(b_path, common));
    SplitMode mode = SplitMode::Exhaustive;
    if (mode_s == "greedy")
        mode = SplitMode::Greedy;
    else if (mode_s == "sampled")
        mode = SplitMode::Sampled;
    else if (mode_s != "exhaustive")
        throw ValidationError("split mode must be exhaustive|greedy|sampled");
    SplitReport rep = find_split(pair, mode, common.seed, samples);
    JsonWriter w(!common.json);
    w.begin_object();
    w.kv("schema", 1);
    w.kv("command", "split");
    w.kv("n", pair.length());
    w.kv("epsilon", pair.epsilon());
    w.kv("beta", pair.beta());
    rep.to_json(w);
    w.end_object();
    emit(common, w);
    return 0;
}

int cmd_dense(const std::string& a_path, const std::string& l_csv, double epsilon, const std::string& out,
              Common& common) {
    BinaryCode a = load_code(a_path, common);
    Word l = parse_coord_set(l_csv, a.length());
    DenseSubcodeReport rep = extract_dense_subcode(a, l, epsilon);
    bool dense = is_eps_dense(rep.subset, l, epsilon);
    if (!out.empty()) rep.subset.write_file(out);
    JsonWriter w(!common.json);
    w.begin_object();
    w.kv("schema", 1);
    w.kv("command", "dense");
    w.kv("n", a.length());
    rep.to_json(w);
    w.kv("subset_is_dense", dense);
    if (!out.empty()) w.kv("out", out);
    w.end_object();
    emit(common, w);
    return dense ? 0 : 2;
}

int cmd_bound(const std::string& method, double epsilon, std::optional<double> rho,
              std::optional<double> lambda, Common& common) {
    JsonWriter w(!common.json);
    w.begin_object();
    w.kv("schema", 1);
    w.kv("command", "bound");
    if (method == "classic") {
        w.kv("method", "classic");
        w.kv("epsilon", epsilon);
        w.kv("beta_bound", classic_bound(epsilon));
    } else {
        BoundReport rep = method == "warmup" ? warmup_bound(epsilon, rho)
                          : method == "main" ? main_bound(epsilon, rho, lambda, false)
                          : method == "best" ? main_bound(epsilon, rho, lambda, true)
                                             : throw ValidationError("bound method must be warmup|main|classic|best");
        rep.to_json(w);
    }
    w.end_object();
    emit(common, w);
    return 0;
}

int cmd_ineq3(const std::string& mode, double grid_step, double min_eps, const std::string& out,
              Common& common) {
    IneqCertificate cert = mode == "float" ? verify_ineq3_float(grid_step, min_eps)
                           : mode == "interval"
                               ? verify_ineq3_interval(min_eps)
                               : throw ValidationError("verify-ineq3 mode must be float|interval");
    if (!out.empty()) {
        std::ofstream f(out, std::ios::binary);
        if (!f) throw ValidationError("cannot write certificate: " + out);
        f << cert.to_jsonl();
        JsonWriter w(!common.json);
        w.begin_object();
        w.kv("schema", 1);
        w.kv("command", "verify-ineq3");
        cert.header_json(w);
        w.kv("out", out);
        w.end_object();
        emit(common, w);
    } else if (mode == "interval") {
        std::cout << cert.to_jsonl();
    } else {
        JsonWriter w(!common.json);
        w.begin_object();
        w.kv("schema", 1);
        w.kv("command", "verify-ineq3");
        cert.header_json(w);
        w.end_object();
        emit(common, w);
    }
    bool ok = mode == "interval" ? cert.certified : cert.max_residual < 0;
    return ok ? 0 : 2;
}

int cmd_search(int n, const std::string& objective, std::uint64_t a_floor, std::uint64_t budget,
               bool no_symmetry, const std::string& out_dir, Common& common) {
    SearchSpec spec;
    spec.n = n;
    spec.symmetry_reduction = !no_symmetry;
    spec.threads = common.threads;
    if (budget > 0) spec.node_budget = budget;
    JsonWriter w(!common.json);
    w.begin_object();
    w.kv("schema", 1);
    w.kv("command", "search");
    w.kv("objective", objective);
    w.kv("n", n);
    w.kv("symmetry_reduction", spec.symmetry_reduction);
    w.kv("threads", spec.threads);
    bool optimal = true;
    if (objective == "max-product") {
        FrontierPoint p = exhaustive_max_product(spec);
        optimal = p.optimal;
        w.key("best").begin_object();
        w.kv("a_size", p.a_size);
        w.kv("b_size", p.b_size);
        w.kv("product", p.a_size * p.b_size);
        w.kv("alpha", p.alpha);
        w.kv("beta", p.beta);
        w.kv("alpha_plus_beta", p.alpha + p.beta);
        w.kv("optimal", p.optimal);
        w.end_object();
        if (!out_dir.empty()) {
            p.witness.a().write_file(out_dir + "/a.codes");
            p.witness.b().write_file(out_dir + "/b.codes");
            w.kv("out", out_dir);
        }
    } else if (objective == "frontier") {
        spec.a_floor = a_floor == 0 ? 1 : a_floor;
        spec.objective = SearchSpec::Objective::BFloor;
        std::vector<FrontierPoint> pts = unbalanced_frontier(spec);
        w.key("frontier").begin_array();
        for (const auto& p : pts) {
            optimal = optimal && p.optimal;
            w.begin_object();
            w.kv("a_floor", p.a_floor);
            w.kv("epsilon_floor", p.epsilon_floor);
            w.kv("a_size", p.a_size);
            w.kv("b_size", p.b_size);
            w.kv("alpha", p.alpha);
            w.kv("beta", p.beta);
            w.kv("optimal", p.optimal);
            w.end_object();
        }
        w.end_array();
        if (!out_dir.empty()) {
            for (const auto& p : pts) {
                std::string stem = out_dir + "/floor" + std::to_string(p.a_floor);
                p.witness.a().write_file(stem + "_a.codes");
                p.witness.b().write_file(stem + "_b.codes");
            }
            w.kv("out", out_dir);
        }
    } else {
        throw ValidationError("search objective must be max-product|frontier");
    }
    w.kv("optimal", optimal);
    w.end_object();
    emit(common, w);
    return optimal ? 0 : 3;
}

int cmd_sample(const std::string& x_str, double rho, const std::string& l_csv, bool has_l,
               std::uint64_t count, Common& common) {
    Word x = Word::parse(x_str);
    std::optional<Word> l;
    if (has_l) l = parse_coord_set(l_csv, x.length());
    CorrelationSpec spec(rho, x.length(), l);
    Word mask = spec.l_mask();
    JsonWriter w(!common.json);
    w.begin_object();
    w.kv("schema", 1);
    w.kv("command", "sample");
    w.kv("n", x.length());
    w.kv("x", x.str());
    w.kv("rho", rho);
    word_list_json(w, "l", mask);
    w.kv("count", count);
    w.kv("seed", common.seed);
    std::uint64_t agree_l = 0, agree_r = 0;
    w.key("samples").begin_array();
    for (std::uint64_t j = 0; j < count; ++j) {
        Word y = sample_correlated(x, spec, udcp::rng::derive(common.seed, j));
        agree_l += static_cast<std::uint64_t>(mask.popcount() - ((x ^ y) & mask).popcount());
        agree_r += static_cast<std::uint64_t>((x ^ y).and_not(mask).popcount());
        w.value(y.str());
    }
    w.end_array();
    if (count > 0 && mask.popcount() > 0)
        w.kv("agree_fraction_l", static_cast<double>(agree_l) / (count * static_cast<double>(mask.popcount())));
    if (count > 0 && spec.r_size() > 0)
        w.kv("disagree_fraction_r", static_cast<double>(agree_r) / (count * static_cast<double>(spec.r_size())));
    w.end_object();
    emit(common, w);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"uniquely decodable code pair toolkit"};
    app.require_subcommand(1);

    Common common;
    common.seed = env_seed();

    std::string a_path, b_path, l_csv, mode, objective = "max-product", out, method = "best", x_str, validate;
    double rho = 0.0, epsilon = 0.0, grid_step = 1e-5, min_eps = 1e-8, f = 0.0, g = 0.0;
    std::optional<double> rho_opt, lambda_opt;
    int n = 2, u_size = 3, instances = 1000, samples = 1024;
    std::uint64_t mc = 0, count = 1, a_floor = 0, budget = 0;
    bool attach_bounds = false, no_symmetry = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_flag("--json", common.json, "compact single-line JSON output");
        sub->add_option("--seed", common.seed, "RNG seed (default: UDCP_SEED env or 0)");
        sub->add_option("--threads", common.threads, "worker threads")->check(CLI::Range(1, 256));
    };

    CLI::App* verify = app.add_subcommand("verify", "check the UDCP property of a code pair");
    verify->add_option("--a", a_path, "code file for A")->required();
    verify->add_option("--b", b_path, "code file for B")->required();
    add_common(verify);

    CLI::App* census = app.add_subcommand("census", "cross distance census W_0..W_m");
    census->add_option("--a", a_path)->required();
    census->add_option("--b", b_path)->required();
    census->add_option("--l", l_csv, "restrict to coordinates, e.g. 1,3,5");
    add_common(census);

    CLI::App* prob = app.add_subcommand("prob", "exact joint probability under the correlated pair");
    prob->add_option("--a", a_path)->required();
    prob->add_option("--b", b_path)->required();
    prob->add_option("--rho", rho)->required();
    CLI::Option* prob_l = prob->add_option("--l", l_csv, "correlate only these coordinates");
    prob->add_option("--mc", mc, "also Monte-Carlo estimate with this many samples");
    prob->add_flag("--bounds", attach_bounds, "attach dense-split rate bounds (requires --l)");
    add_common(prob);

    CLI::App* rsse = app.add_subcommand("rsse-check", "small-set expansion lower bound / dominance battery");
    rsse->add_option("--u-size", u_size)->required();
    rsse->add_option("--f", f);
    rsse->add_option("--g", g);
    rsse->add_option("--rho", rho);
    rsse->add_option("--validate", validate)->check(CLI::IsMember({"exhaustive", "random"}));
    rsse->add_option("--instances", instances);
    add_common(rsse);

    CLI::App* split = app.add_subcommand("split", "find L maximizing |B_L| within the size window");
    split->add_option("--a", a_path)->required();
    split->add_option("--b", b_path)->required();
    split->add_option("--mode", mode)->default_val("exhaustive");
    split->add_option("--samples", samples);
    add_common(split);

    CLI::App* dense = app.add_subcommand("dense", "extract a dense subcode with respect to L");
    dense->add_option("--a", a_path)->required();
    dense->add_option("--l", l_csv)->required();
    dense->add_option("--epsilon", epsilon)->required();
    dense->add_option("--out", out, "write the subset code file here");
    add_common(dense);

    CLI::App* bound = app.add_subcommand("bound", "rate bound calculators");
    bound->add_option("--method", method)->check(CLI::IsMember({"warmup", "main", "classic", "best"}));
    bound->add_option("--epsilon", epsilon)->required();
    double rho_in = -1, lambda_in = -1;
    bound->add_option("--rho", rho_in, "fix rho instead of optimizing")->check(CLI::Range(0.0, 1.0));
    bound->add_option("--lambda", lambda_in, "override the split size ratio")->check(CLI::Range(0.0, 1.0));
    add_common(bound);

    CLI::App* ineq = app.add_subcommand("verify-ineq3", "residual sweep / interval certificate");
    ineq->add_option("--mode", mode)->default_val("interval")->check(CLI::IsMember({"float", "interval"}));
    ineq->add_option("--grid-step", grid_step);
    ineq->add_option("--min-epsilon", min_eps);
    ineq->add_option("--out", out, "write the JSONL certificate here");
    add_common(ineq);

    CLI::App* search = app.add_subcommand("search", "extremal pair search at small n");
    search->add_option("--n", n)->required()->check(CLI::Range(1, 6));
    search->add_option("--objective", objective)->check(CLI::IsMember({"max-product", "frontier"}));
    search->add_option("--a-floor", a_floor);
    search->add_option("--budget", budget);
    search->add_flag("--no-symmetry", no_symmetry);
    search->add_option("--out", out, "directory for witness code files");
    add_common(search);

    CLI::App* sample = app.add_subcommand("sample", "correlated copies of a word");
    sample->add_option("--x", x_str)->required();
    sample->add_option("--rho", rho)->required();
    CLI::Option* sample_l = sample->add_option("--l", l_csv);
    sample->add_option("--count", count);
    add_common(sample);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);  // usage text on the error stream
    }

    const auto t0 = std::chrono::steady_clock::now();
    std::string sub = app.get_subcommands().front()->get_name();
    int rc = 0;
    try {
        if (sub == "verify")
            rc = cmd_verify(a_path, b_path, common);
        else if (sub == "census")
            rc = cmd_census(a_path, b_path, l_csv, common);
        else if (sub == "prob")
            rc = cmd_prob(a_path, b_path, rho, l_csv, prob_l->count() > 0, mc, attach_bounds, common);
        else if (sub == "rsse-check")
            rc = cmd_rsse(u_size, f, g, rho, validate, instances, common);
        else if (sub == "split")
            rc = cmd_split(a_path, b_path, mode, samples, common);
        else if (sub == "dense")
            rc = cmd_dense(a_path, l_csv, epsilon, out, common);
        else if (sub == "bound") {
            if (rho_in >= 0) rho_opt = rho_in;
            if (lambda_in >= 0) lambda_opt = lambda_in;
            rc = cmd_bound(method, epsilon, rho_opt, lambda_opt, common);
        } else if (sub == "verify-ineq3")
            rc = cmd_ineq3(mode, grid_step, min_eps, out, common);
        else if (sub == "search")
            rc = cmd_search(n, objective, a_floor, budget, no_symmetry, out, common);
        else if (sub == "sample")
            rc = cmd_sample(x_str, rho, l_csv, sample_l->count() > 0, count, common);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const VerificationError& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return 2;
    }
    const auto t1 = std::chrono::steady_clock::now();
    manifest(sub, argc, argv, common, std::chrono::duration<double, std::milli>(t1 - t0).count());
    return rc;
}
