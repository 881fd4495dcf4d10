#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "oracles.hpp"
#include "udcp/core.hpp"
#include "udcp/errors.hpp"
#include "udcp/search.hpp"

using namespace udcp;

namespace {

CodePair kasami_lin() {
    return CodePair(BinaryCode(2, {Word::parse("00"), Word::parse("01"), Word::parse("11")}),
                    BinaryCode(2, {Word::parse("10"), Word::parse("01")}));
}

std::set<std::string> ternary_strings(const std::vector<TernaryWord>& v) {
    std::set<std::string> s;
    for (const auto& t : v) s.insert(t.str());
    return s;
}

}  // namespace

TEST_CASE("word parsing, order and projection") {
    Word w = Word::parse("01");
    CHECK(w.length() == 2);
    CHECK_FALSE(w.bit(0));  // coordinate 1 is the leftmost character
    CHECK(w.bit(1));
    CHECK(w.str() == "01");
    CHECK(Word::parse("10") < Word::parse("01"));  // numeric order, coordinate n most significant

    Word x = Word::parse("10110");
    CHECK(x.project(parse_coord_set("1,3,4", 5)).str() == "111");
    CHECK(x.project(Word(5)).length() == 0);
    CHECK(Word::parse("10").concat(Word::parse("01")).str() == "1001");
    CHECK_THROWS_AS(Word::parse("012"), ValidationError);
}

TEST_CASE("multi-limb words") {
    const int n = 130;
    Word a(n), b(n);
    a.set_bit(0, true);
    a.set_bit(64, true);
    a.set_bit(129, true);
    b.set_bit(64, true);
    b.set_bit(100, true);
    CHECK(a.popcount() == 3);
    CHECK((a ^ b).popcount() == 3);
    CHECK((a & b).popcount() == 1);
    CHECK(a.and_not(b).popcount() == 2);
    Word mask(n);
    for (int i = 60; i < 70; ++i) mask.set_bit(i, true);
    CHECK(a.project(mask).length() == 10);
    CHECK(a.project(mask).popcount() == 1);
    CHECK(Word::parse(a.str()) == a);
}

TEST_CASE("code files: comments, blank lines, dedupe, errors") {
    BinaryCode c = BinaryCode::parse_text("# header\n01\n10\n01\n\n");
    CHECK(c.size() == 2);
    CHECK(c.length() == 2);
    CHECK(c.contains(Word::parse("01")));
    CHECK_THROWS_AS(BinaryCode::parse_text("01\n100\n"), ValidationError);
    CHECK_THROWS_AS(BinaryCode::parse_text("# nothing\n"), ValidationError);
    CHECK_THROWS_AS(BinaryCode(2, {}), ValidationError);
    BinaryCode back = BinaryCode::parse_text(c.to_text());
    CHECK(back == c);
}

TEST_CASE("sumset of the Kasami-Lin pair") {
    auto s = sumset(kasami_lin());
    CHECK(s.size() == 6);
    CHECK(ternary_strings(s) == std::set<std::string>{"10", "01", "11", "02", "21", "12"});
}

TEST_CASE("sumset identities") {
    // A = {0^n}: B re-tagged ternary
    CodePair p(BinaryCode(3, {Word(3)}), BinaryCode::full_cube(3));
    auto s = sumset(p);
    CHECK(s.size() == 8);
    // A = B = {0,1}^1 -> {0,1,2}
    CodePair q(BinaryCode::full_cube(1), BinaryCode::full_cube(1));
    CHECK(ternary_strings(sumset(q)) == std::set<std::string>{"0", "1", "2"});
    CHECK(sumset(q).size() == 3);
}

TEST_CASE("is_udcp basics and cache") {
    CodePair kl = kasami_lin();
    CHECK(kl.udcp_status() == CodePair::Udcp::Unchecked);
    CHECK(is_udcp(kl));
    CHECK(kl.udcp_status() == CodePair::Udcp::Yes);

    for (int n = 1; n <= 3; ++n) {
        CodePair cube(BinaryCode::full_cube(n), BinaryCode::full_cube(n));
        CHECK_FALSE(is_udcp(cube));
        CHECK(cube.udcp_status() == CodePair::Udcp::No);
    }
    CodePair single(BinaryCode(3, {Word::parse("000"), Word::parse("011"), Word::parse("101"), Word::parse("110")}),
                    BinaryCode(3, {Word::parse("000")}));
    CHECK(is_udcp(single));
}

TEST_CASE("collision witness is a genuine collision") {
    CodePair cube(BinaryCode::full_cube(2), BinaryCode::full_cube(2));
    auto col = find_collision(cube);
    REQUIRE(col.has_value());
    CHECK(TernaryWord::sum_of(col->a1, col->b1) == TernaryWord::sum_of(col->a2, col->b2));
    CHECK((col->a1 != col->a2 || col->b1 != col->b2));
}

TEST_CASE("diffset and sum/diff duality, exhaustive small n") {
    CHECK(diffset(kasami_lin()).size() == 6);
    CodePair z(BinaryCode(2, {Word(2)}), BinaryCode(2, {Word(2)}));
    CHECK(diffset(z).size() == 1);

    // every pair of nonempty codes at n <= 3
    for (int n = 1; n <= 3; ++n) {
        long bad = 0;
        auto codes = oracle::all_codes(n);
        for (const auto& a : codes) {
            for (const auto& b : codes) {
                CodePair p(a, b);
                const std::size_t full = a.size() * b.size();
                bool udcp = is_udcp(p);
                if ((sumset(p).size() == full) != udcp) ++bad;
                if ((diffset(p).size() == full) != udcp) ++bad;
            }
        }
        CHECK(bad == 0);
    }
    // sampled at n = 4
    oracle::Gen g(61);
    for (int t = 0; t < 300; ++t) {
        CodePair p(g.code(4, 1 + g.eng() % 16), g.code(4, 1 + g.eng() % 16));
        const std::size_t full = p.a().size() * p.b().size();
        bool udcp = is_udcp(p);
        CHECK((sumset(p).size() == full) == udcp);
        CHECK((diffset(p).size() == full) == udcp);
    }
}

TEST_CASE("distance census of the Kasami-Lin pair, against enumeration") {
    CodePair kl = kasami_lin();
    DistanceCensus c = distance_census(kl);
    // Direct enumeration of the 6 pairs gives W = [1, 4, 1].
    std::vector<std::uint64_t> direct(3, 0);
    for (const Word& a : kl.a().words())
        for (const Word& b : kl.b().words()) ++direct[static_cast<size_t>((a ^ b).popcount())];
    CHECK(c.counts == direct);
    CHECK(c.counts == std::vector<std::uint64_t>{1, 4, 1});
    CHECK(c.total() == 6);
}

TEST_CASE("census conservation and restriction") {
    oracle::Gen g(11);
    for (int t = 0; t < 20; ++t) {
        int n = 2 + static_cast<int>(g.eng() % 7);
        CodePair p(g.code(n, 1 + g.eng() % 10), g.code(n, 1 + g.eng() % 10));
        DistanceCensus plain = distance_census(p);
        CHECK(plain.total() == p.a().size() * p.b().size());
        Word l = g.word(n);
        DistanceCensus res = distance_census(p, l);
        CHECK(res.total() == plain.total());
        CHECK(static_cast<int>(res.counts.size()) == l.popcount() + 1);
    }
    CodePair zz(BinaryCode(4, {Word(4)}), BinaryCode(4, {Word(4)}));
    DistanceCensus c = distance_census(zz);
    CHECK(c.counts[0] == 1);
    CHECK(c.total() == 1);
    CHECK_THROWS_AS(distance_census(zz, Word(3)), ValidationError);
}

TEST_CASE("van Tilborg margins") {
    CodePair kl = kasami_lin();
    CHECK_THROWS_AS(van_tilborg_check(kl), ValidationError);  // not yet verified
    is_udcp(kl);
    VanTilborgReport r = van_tilborg_check(kl);
    CHECK(r.all_within);
    // The base pair saturates the cap at every distance.
    for (const auto& row : r.rows) CHECK(row.count == static_cast<std::uint64_t>(van_tilborg_cap(2, row.d)));

    CodePair singles(BinaryCode(3, {Word::parse("010")}), BinaryCode(3, {Word::parse("110")}));
    is_udcp(singles);
    CHECK(van_tilborg_check(singles).all_within);

    CodePair prod = product_compose(kl, kl);
    CHECK(is_udcp(prod));
    VanTilborgReport r4 = van_tilborg_check(prod);
    CHECK(r4.all_within);
    CHECK(r4.total == 36);
}

TEST_CASE("van Tilborg cap values") {
    CHECK(static_cast<std::uint64_t>(van_tilborg_cap(2, 1)) == 4);
    CHECK(static_cast<std::uint64_t>(van_tilborg_cap(4, 2)) == 24);
    CHECK(static_cast<std::uint64_t>(census_product_cap(1)) == 2);
    CHECK(static_cast<std::uint64_t>(census_product_cap(2)) == 6);
    CHECK(static_cast<std::uint64_t>(census_product_cap(3)) == 14);
    CHECK(static_cast<std::uint64_t>(census_product_cap(4)) == 42);
    // against the Pascal oracle
    for (int n = 1; n <= 10; ++n) {
        long double total = 0;
        for (int d = 0; d <= n; ++d)
            total += oracle::pascal_binom(n, d) * std::pow(2.0L, std::min(d, n - d));
        CHECK(static_cast<long double>(static_cast<double>(static_cast<long double>(census_product_cap(n)))) ==
              doctest::Approx(static_cast<double>(total)));
    }
}

TEST_CASE("eta encoding: examples and round trip") {
    EncodedPair e = encode_eta(Word::parse("01"), Word::parse("10"));
    CHECK(e.sym_diff.str() == "11");
    CHECK(e.residue.str() == "10");

    EncodedPair same = encode_eta(Word::parse("0110"), Word::parse("0110"));
    CHECK(same.sym_diff.is_zero());
    CHECK(same.residue.is_zero());

    oracle::Gen g(5);
    for (int t = 0; t < 200; ++t) {
        int n = 1 + static_cast<int>(g.eng() % 12);
        Word a = g.word(n), b = g.word(n);
        EncodedPair enc = encode_eta(a, b);
        CHECK(enc.residue.and_not(enc.sym_diff).is_zero());  // residue inside sym_diff
        CHECK(eta_decode_difference(enc) == TernaryWord::difference_of(a, b));
        // split variant determines the same difference blockwise
        Word l = g.word(n);
        EncodedPair sp = encode_eta(a, b, l);
        REQUIRE(sp.split.has_value());
        CHECK(sp.split->l_sym == (a ^ b).project(l));
        CHECK(sp.split->l_a_not_b == a.and_not(b).project(l));
        CHECK(sp.split->r_sym == (a ^ b).project(l.complement()));
    }
    CHECK_THROWS_AS(encode_eta(Word::parse("0"), Word::parse("00")), ValidationError);
}

TEST_CASE("eta injectivity iff UDCP, exhaustive n <= 2 plus samples at n = 3,4") {
    auto injective = [](const CodePair& p) {
        std::set<std::pair<std::string, std::string>> img;
        for (const Word& a : p.a().words())
            for (const Word& b : p.b().words()) {
                EncodedPair e = encode_eta(a, b);
                if (!img.insert({e.sym_diff.str(), e.residue.str()}).second) return false;
            }
        return true;
    };
    for (int n = 1; n <= 2; ++n) {
        auto codes = oracle::all_codes(n);
        for (const auto& a : codes)
            for (const auto& b : codes) {
                CodePair p(a, b);
                CHECK(injective(p) == is_udcp(p));
            }
    }
    oracle::Gen g(17);
    for (int t = 0; t < 60; ++t) {
        int n = 3 + static_cast<int>(g.eng() % 2);
        CodePair p(g.code(n, 1 + g.eng() % 12), g.code(n, 1 + g.eng() % 12));
        CHECK(injective(p) == is_udcp(p));
    }
    // verified UDCPs at n <= 8: no eta collisions
    for (int t = 0; t < 40; ++t) {
        int n = 2 + static_cast<int>(g.eng() % 7);
        CodePair p = g.udcp(n, 1 + static_cast<int>(g.eng() % 4), 30);
        REQUIRE(is_udcp(p));
        CHECK(injective(p));
    }
}

TEST_CASE("projection examples and monotonicity") {
    BinaryCode x(2, {Word::parse("00"), Word::parse("01"), Word::parse("11")});
    BinaryCode p1 = project(x, parse_coord_set("1", 2));
    CHECK(p1.size() == 2);
    CHECK(p1.length() == 1);
    CHECK(project(x, Word::full(2)) == x);
    BinaryCode empty_proj = project(x, Word(2));
    CHECK(empty_proj.size() == 1);
    CHECK(empty_proj.length() == 0);
    CHECK_THROWS_AS(project(x, Word(3)), ValidationError);

    oracle::Gen g(23);
    for (int t = 0; t < 100; ++t) {
        int n = 2 + static_cast<int>(g.eng() % 9);
        BinaryCode c = g.code(n, 1 + g.eng() % 20);
        Word p = g.word(n), q = g.word(n);
        CHECK(project(c, p).size() <= c.size());
        CHECK(project(c, p | q).size() >= project(c, p).size());
        CHECK(project(c, p).size() <= (1ull << std::min(62, p.popcount())));
    }
}

TEST_CASE("product composition") {
    CodePair kl = kasami_lin();
    CHECK_THROWS_AS(product_compose(kl, kl), ValidationError);  // inputs unverified
    is_udcp(kl);
    CodePair prod = product_compose(kl, kl);
    CHECK(prod.length() == 4);
    CHECK(prod.a().size() == 9);
    CHECK(prod.b().size() == 4);
    CHECK(prod.udcp_status() == CodePair::Udcp::Yes);
    // re-verify the cached claim by full enumeration
    CHECK(sumset(prod).size() == 36);
    CHECK(prod.alpha() + prod.beta() == doctest::Approx((std::log2(3.0) + 1.0) / 2.0).epsilon(1e-12));

    // dilution by the trivial length-1 pair
    CodePair trivial(BinaryCode::full_cube(1), BinaryCode(1, {Word(1)}));
    is_udcp(trivial);
    CodePair diluted = product_compose(kl, trivial);
    CHECK(diluted.length() == 3);
    CHECK(diluted.alpha() == doctest::Approx((std::log2(3.0) + 1.0) / 3.0));
    CHECK(is_udcp(diluted));

    // product closure on random verified UDCPs
    oracle::Gen g(31);
    for (int t = 0; t < 20; ++t) {
        CodePair p = g.udcp(2 + static_cast<int>(g.eng() % 3), 1 + static_cast<int>(g.eng() % 3), 20);
        CodePair q = g.udcp(2 + static_cast<int>(g.eng() % 3), 1 + static_cast<int>(g.eng() % 3), 20);
        REQUIRE(is_udcp(p));
        REQUIRE(is_udcp(q));
        CodePair pq = product_compose(p, q);
        pq.cache_udcp(true);  // idempotent write
        CHECK(sumset(pq).size() == pq.a().size() * pq.b().size());
        CHECK(pq.alpha() * pq.length() ==
              doctest::Approx(p.alpha() * p.length() + q.alpha() * q.length()).epsilon(1e-9));
    }
}

TEST_CASE("pow2_ceil") {
    CHECK(pow2_ceil(0.0) == 1);
    CHECK(pow2_ceil(10.0) == 1024);
    CHECK(pow2_ceil(-3.7) == 1);
    CHECK(pow2_ceil(2.5) == 6);  // 2^2.5 = 5.656...
    CHECK(pow2_ceil(10.0 + 1e-12) == 1024);  // snap to the integral exponent
    CHECK_THROWS_AS(pow2_ceil(64.0), ValidationError);
}

TEST_CASE("dense extraction: full cube, random instances, precondition") {
    BinaryCode cube = BinaryCode::full_cube(6);
    Word l = parse_coord_set("1,2,3", 6);
    DenseSubcodeReport r = extract_dense_subcode(cube, l, 0.0);
    CHECK(r.subset == cube);
    CHECK(r.class_count_kept == 8);
    CHECK(r.class_count_floor_met);
    CHECK(is_eps_dense(r.subset, l, 0.0));

    oracle::Gen g(41);
    for (int t = 0; t < 30; ++t) {
        const int n = 10;
        const double eps = 0.1;
        BinaryCode a = g.code(n, 512);  // 2^{(1-0.1)10} = 512
        Word lmask(n);
        while (lmask.popcount() != 5) lmask = g.word(n);
        DenseSubcodeReport rep = extract_dense_subcode(a, lmask, eps);
        CHECK(is_eps_dense(rep.subset, lmask, eps));
        CHECK(rep.class_count_floor_met);
        CHECK(rep.subset.size() <= a.size());
        for (const Word& w : rep.subset.words()) CHECK(a.contains(w));
    }

    CHECK_THROWS_WITH_AS(extract_dense_subcode(BinaryCode(8, {Word(8)}), Word::full(8), 0.1),
                         doctest::Contains("below the precondition"), ValidationError);
}

TEST_CASE("dense extraction keeps all qualifying classes") {
    // Skewed code: one heavy class, several light ones.
    std::vector<Word> ws;
    for (std::uint64_t v = 0; v < 16; ++v) ws.push_back(Word::from_bits(6, v << 2));  // class 00
    ws.push_back(Word::from_bits(6, 1));
    ws.push_back(Word::from_bits(6, 2));
    BinaryCode a(6, ws);
    Word l = parse_coord_set("1,2", 6);
    DenseSubcodeReport r = extract_dense_subcode(a, l, 0.5);
    // threshold = ceil(18/8) = 3: only the heavy class survives
    CHECK(r.keep_threshold == 3);
    CHECK(r.class_count_kept == 1);
    CHECK(r.subset.size() == 16);
}
