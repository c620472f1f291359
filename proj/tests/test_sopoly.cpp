#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstuple/interp.hpp>
#include <cstuple/parser.hpp>
#include <cstuple/sopoly.hpp>
#include <cstuple/strs.hpp>

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace cstuple;

namespace {

std::string read_file(const std::string& rel) {
    std::ifstream in(std::string(CSTUPLE_ROOT_DIR) + "/" + rel);
    std::string where = "cannot open " + rel;
    REQUIRE_MESSAGE(in.good(), where);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// canonical rendering of a polynomial given as text
std::string norm(const std::string& text) {
    return sopoly_to_string(simplify_sopoly(parse_sopoly(text)));
}

// the worked example used throughout: a cost polynomial with four
// oracle-cost occurrences, one of them nested inside another
const char* kWorked = "x*Fc(3 + Fs(9*x)) + Fc(12)*Fc(3 + x*Fc(2)) + 5";

SoPolyPtr random_poly(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 4);
    switch (pick(rng)) {
    case 0: return SoPoly::constant(rng() % 5);
    case 1: return SoPoly::var("x");
    case 2: return SoPoly::add(random_poly(rng, depth - 1), random_poly(rng, depth - 1));
    case 3: return SoPoly::mul(random_poly(rng, depth - 1), random_poly(rng, depth - 1));
    default: return SoPoly::app(rng() % 2 ? "Fs" : "Fc", random_poly(rng, depth - 1));
    }
}

Word random_word(std::mt19937_64& rng, size_t maxLen) {
    Word w;
    size_t len = rng() % (maxLen + 1);
    for (size_t i = 0; i < len; ++i) w.bits.push_back(rng() % 2 == 1);
    return w;
}

} // namespace

TEST_CASE("polynomial construction and accessors") {
    SoPolyPtr c = SoPoly::constant(7);
    CHECK(c->kind() == SoKind::Const);
    CHECK(c->value() == 7);
    CHECK_THROWS_AS((void)c->name(), std::logic_error);
    CHECK_THROWS_AS((void)c->a(), std::logic_error);

    SoPolyPtr x = SoPoly::var("x");
    CHECK(x->kind() == SoKind::Var);
    CHECK(x->name() == "x");
    CHECK_THROWS_AS((void)x->value(), std::logic_error);

    SoPolyPtr f = SoPoly::app("F", x);
    CHECK(f->kind() == SoKind::App);
    CHECK(f->name() == "F");
    CHECK(f->a()->name() == "x");
    CHECK_THROWS_AS((void)f->b(), std::logic_error);

    SoPolyPtr s = SoPoly::add(c, SoPoly::mul(x, f));
    CHECK(s->kind() == SoKind::Add);
    CHECK(s->b()->kind() == SoKind::Mul);
}

TEST_CASE("polynomial parsing and printing round-trip") {
    CHECK(sopoly_to_string(parse_sopoly("3 + 2*x + F(x + 1)*y")) == "3 + 2*x + F(x + 1)*y");
    CHECK(sopoly_to_string(parse_sopoly("x*(y + 1) + 3")) == "x*(y + 1) + 3");
    CHECK(sopoly_to_string(parse_sopoly("Fc(Fs(n))")) == "Fc(Fs(n))");
    CHECK(sopoly_to_string(parse_sopoly("(x + y)*(x + y)")) == "(x + y)*(x + y)");
    CHECK(sopoly_to_string(parse_sopoly("0")) == "0");

    // parentheses that only group are not remembered
    CHECK(sopoly_to_string(parse_sopoly("(x) + (3*y)")) == "x + 3*y");

    CHECK_THROWS_AS(parse_sopoly(""), ParseError);
    CHECK_THROWS_AS(parse_sopoly("x +"), ParseError);
    CHECK_THROWS_AS(parse_sopoly("x y"), ParseError);
    CHECK_THROWS_AS(parse_sopoly("F("), ParseError);
    CHECK_THROWS_AS(parse_sopoly("x + 1\ny + 2"), ParseError);
}

TEST_CASE("simplification folds constants and orders summands canonically") {
    CHECK(norm("x + 3 + x") == "3 + 2*x");
    CHECK(norm("2*(x + 1)") == "2 + 2*x");
    CHECK(norm("0*F(x) + x*1") == "x");
    CHECK(norm("x*0") == "0");
    CHECK(norm("0 + 0") == "0");
    CHECK(norm("2*3*x") == "6*x");
    CHECK(norm("x*x + x*x") == "2*x*x");
    CHECK(norm("F(2*3) + F(6)") == "2*F(6)");

    // the constant term leads, then lone applications, lone variables, products
    CHECK(norm("x + F(x) + 7 + 2*y") == "7 + F(x) + x + 2*y");

    // a constant times a lone sum distributes; other products stay factored
    CHECK(norm("3*(x + y)") == "3*x + 3*y");
    CHECK(norm("(x + 1)*(y + 1)") == "(1 + x)*(1 + y)");
    CHECK(norm("n*(11 + n + 7*F(n))") == "n*(11 + n + 7*F(n))");

    // arguments are normalized in place
    CHECK(norm("F(x + x)") == "F(2*x)");
}

TEST_CASE("simplification is idempotent and printing parses back") {
    std::mt19937_64 rng(20260816);
    for (int trial = 0; trial < 200; ++trial) {
        SoPolyPtr p = random_poly(rng, 4);
        SoPolyPtr s = simplify_sopoly(p);
        std::string rendered = sopoly_to_string(s);
        CHECK(sopoly_to_string(simplify_sopoly(s)) == rendered);
        CHECK(sopoly_to_string(parse_sopoly(rendered)) == rendered);

        // simplification preserves value
        SoEnv env;
        env.nums["x"] = rng() % 4;
        env.funs["Fc"] = [](uint64_t z) { return z + 1; };
        env.funs["Fs"] = [](uint64_t z) { return 2 * z + 1; };
        CHECK(eval_sopoly(p, env) == eval_sopoly(s, env));
    }
}

TEST_CASE("evaluation computes saturating natural values") {
    SoEnv env;
    env.nums["x"] = 2;
    env.funs["F"] = [](uint64_t z) { return z + 1; };
    CHECK(eval_sopoly(parse_sopoly("3*F(x) + x"), env) == 11);

    SoEnv env2;
    env2.nums["x"] = 3;
    env2.funs["F"] = [](uint64_t z) { return 2 * z; };
    CHECK(eval_sopoly(parse_sopoly("F(F(x))"), env2) == 12);

    CHECK(eval_sopoly(SoPoly::constant(7), SoEnv{}) == 7);

    CHECK_THROWS_WITH_AS(eval_sopoly(parse_sopoly("y + 1"), env), doctest::Contains("y"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(eval_sopoly(parse_sopoly("G(x)"), env), doctest::Contains("G"),
                         std::invalid_argument);

    SoEnv big;
    big.nums["x"] = UINT64_MAX;
    big.nums["y"] = 2;
    CHECK(eval_sopoly(parse_sopoly("x + y"), big) == UINT64_MAX);
    CHECK(eval_sopoly(parse_sopoly("x*y"), big) == UINT64_MAX);
}

TEST_CASE("variable listings") {
    SoPolyPtr p = parse_sopoly("3 + x*F(y + G(z))");
    CHECK(sopoly_num_vars(p) == std::set<std::string>{"x", "y", "z"});
    CHECK(sopoly_fun_vars(p) == std::set<std::string>{"F", "G"});
    CHECK(sopoly_num_vars(SoPoly::constant(4)).empty());
    CHECK(sopoly_fun_vars(SoPoly::constant(4)).empty());
}

TEST_CASE("substitution is simultaneous") {
    SoSubstitution swap;
    swap.vars["x"] = SoPoly::var("y");
    swap.vars["y"] = SoPoly::var("x");
    CHECK(sopoly_to_string(simplify_sopoly(subst_sopoly(parse_sopoly("x + 2*y"), swap))) ==
          "y + 2*x");

    SoSubstitution s;
    s.vars["y"] = parse_sopoly("2*z");
    s.funs["F"] = {"w", parse_sopoly("2*w + 3")};
    SoPolyPtr out = subst_sopoly(parse_sopoly("F(x + 1) + y"), s);
    CHECK(sopoly_to_string(simplify_sopoly(out)) == "5 + 2*x + 2*z");

    // the lambda body's own other variables pass through untouched
    SoSubstitution t;
    t.funs["F"] = {"w", parse_sopoly("mu*w + nu")};
    CHECK(sopoly_to_string(simplify_sopoly(subst_sopoly(parse_sopoly("F(5)"), t))) ==
          "nu + 5*mu");
}

TEST_CASE("query-argument sum collects every oracle-cost occurrence") {
    CHECK(sopoly_to_string(build_Q(parse_sopoly(kWorked))) == "20 + Fs(9*x) + x");
    CHECK(sopoly_to_string(build_Q(parse_sopoly("x*Fs(x) + 4"))) == "0");
    CHECK(sopoly_to_string(build_Q(parse_sopoly("Fc(x)"))) == "x");
    // a nested occurrence is counted once on its own and as 1 inside its host
    CHECK(sopoly_to_string(build_Q(parse_sopoly("Fc(Fc(x))"))) == "1 + x");
}

TEST_CASE("monitor bound substitutes the affine oracle envelope") {
    SoPolyPtr P = parse_sopoly(kWorked);
    SoPolyPtr symbolic = build_B(P, SoPoly::var("mu"), SoPoly::var("nu"));
    CHECK(sopoly_to_string(symbolic) == norm("20 + 2*nu + mu*G(9*mu*y + 9*nu) + mu*y"));

    CHECK(sopoly_to_string(build_B(parse_sopoly("x*Fs(x) + 4"), 3, 1)) == "0");
    CHECK(sopoly_to_string(build_B(parse_sopoly("Fc(x)"), 1, 0)) == "y");
}

TEST_CASE("derivation-height bound substitutes unit oracle cost") {
    SoPolyPtr P = parse_sopoly("2 + x + x*(10 + x + Fc(x) + 7*Fs(x))");
    SoPolyPtr D = build_D(P, 1, 0);
    CHECK(sopoly_to_string(D) == "2 + n + n*(11 + n + 7*F(n))");

    SoEnv env;
    env.nums["n"] = 4;
    env.funs["F"] = [](uint64_t) { return uint64_t{1}; };
    CHECK(eval_sopoly(D, env) == 94);

    CHECK(sopoly_to_string(build_D(SoPoly::constant(5), 2, 9)) == "5");
    CHECK(sopoly_to_string(build_D(parse_sopoly("Fs(x)"), 2, 3)) == norm("2*F(2*n + 3) + 3"));
}

TEST_CASE("bounds commute with evaluation") {
    std::mt19937_64 rng(404);
    for (int trial = 0; trial < 200; ++trial) {
        SoPolyPtr P = random_poly(rng, 4);
        uint64_t mu = rng() % 3 + 1, nu = rng() % 3;
        uint64_t slope = rng() % 3, offset = rng() % 4, point = rng() % 5;
        CsFun base = [=](uint64_t z) { return slope * z + offset; };

        SoEnv direct;
        direct.nums["x"] = mu * point + nu;
        direct.funs["Fc"] = [](uint64_t) { return uint64_t{1}; };
        direct.funs["Fs"] = [=](uint64_t z) { return mu * base(z) + nu; };

        SoEnv viaD;
        viaD.nums["n"] = point;
        viaD.funs["F"] = base;
        CHECK(eval_sopoly(build_D(P, mu, nu), viaD) == eval_sopoly(P, direct));

        SoEnv directQ;
        directQ.nums["x"] = mu * point + nu;
        directQ.funs["Fs"] = [=](uint64_t z) { return mu * base(z) + nu; };

        SoEnv viaB;
        viaB.nums["y"] = point;
        viaB.funs["G"] = base;
        CHECK(eval_sopoly(build_B(P, mu, nu), viaB) == eval_sopoly(build_Q(P), directQ));
    }
}

TEST_CASE("evaluation is weakly monotone") {
    std::mt19937_64 rng(911);
    for (int trial = 0; trial < 200; ++trial) {
        SoPolyPtr P = random_poly(rng, 4);
        uint64_t x = rng() % 5, bump = rng() % 3 + 1;
        uint64_t slope = rng() % 3, offset = rng() % 3, lift = rng() % 4 + 1;

        SoEnv lo;
        lo.nums["x"] = x;
        lo.funs["Fc"] = lo.funs["Fs"] = [=](uint64_t z) { return slope * z + offset; };

        SoEnv hiArg = lo;
        hiArg.nums["x"] = x + bump;
        CHECK(eval_sopoly(P, lo) <= eval_sopoly(P, hiArg));

        SoEnv hiFun = lo;
        hiFun.funs["Fc"] = hiFun.funs["Fs"] = [=](uint64_t z) {
            return slope * z + offset + lift;
        };
        CHECK(eval_sopoly(P, lo) <= eval_sopoly(P, hiFun));
    }
}

TEST_CASE("oracle-cost assignments agreeing below the monitor bound are interchangeable") {
    std::mt19937_64 rng(5353);
    for (int trial = 0; trial < 200; ++trial) {
        SoPolyPtr P = random_poly(rng, 4);

        OracleTable table;
        size_t count = rng() % 6;
        for (size_t i = 0; i < count; ++i)
            table.entries.emplace(random_word(rng, 3), random_word(rng, 5));
        CsFun tableBound = [&table](uint64_t z) { return table_length(table, z); };

        uint64_t inputLen = random_word(rng, 4).bits.size();
        SoEnv boundEnv;
        boundEnv.nums["y"] = inputLen;
        boundEnv.funs["G"] = tableBound;
        uint64_t bound = eval_sopoly(build_B(P, 1, 0), boundEnv);

        uint64_t jump = rng() % 100 + 2;
        SoEnv unit, deviating;
        unit.nums["x"] = deviating.nums["x"] = inputLen;
        unit.funs["Fs"] = deviating.funs["Fs"] = tableBound;
        unit.funs["Fc"] = [](uint64_t) { return uint64_t{1}; };
        deviating.funs["Fc"] = [=](uint64_t z) { return z <= bound ? 1 : jump + z; };
        CHECK(eval_sopoly(P, unit) == eval_sopoly(P, deviating));
    }
}

TEST_CASE("cost lambdas in the polynomial fragment convert to polynomials") {
    Strs bf = parse_strs(read_file("corpus/bruteforce.strs"));

    CsInterp weak = parse_interp(read_file("corpus/bruteforce_weak.csi"), bf);
    auto weakStart = sopoly_from_cost(weak.costs.at("start"));
    REQUIRE(weakStart.has_value());
    CHECK(sopoly_to_string(*weakStart) == "2 + x + x*(10 + Fc(x) + x + 7*Fs(x))");
    CHECK(sopoly_to_string(build_Q(*weakStart)) == "x");
    CHECK(sopoly_to_string(build_B(*weakStart, 1, 0)) == "y");

    CsInterp strong = parse_interp(read_file("corpus/bruteforce.csi"), bf);
    auto strongStart = sopoly_from_cost(strong.costs.at("start"));
    REQUIRE(strongStart.has_value());
    CHECK(sopoly_to_string(build_Q(*strongStart)) == "x");
    CHECK(sopoly_to_string(build_B(*strongStart, 1, 0)) == "y");

    // max falls outside the polynomial grammar
    CHECK_FALSE(sopoly_from_cost(strong.costs.at("compute")).has_value());

    // first-order symbols have no oracle-argument pair to track
    Strs binadd = parse_strs(read_file("corpus/binadd.strs"));
    CsInterp addInterp = parse_interp(read_file("corpus/binadd.csi"), binadd);
    CHECK_FALSE(sopoly_from_cost(addInterp.costs.at("addB")).has_value());
}

TEST_CASE("oracle tables parse, print, and answer queries") {
    OracleTable t = parse_otab("# doubling oracle\n_ -> 0101\n11 -> 1\n00 -> 010\n");
    CHECK(t.entries.size() == 3);
    CHECK(word_to_string(t.lookup(Word{})) == "0101");
    CHECK(word_to_string(t.lookup(parse_word("00"))) == "010");
    CHECK(t.covers(parse_word("11")));
    CHECK_FALSE(t.covers(parse_word("1")));
    CHECK_THROWS_WITH_AS((void)t.lookup(parse_word("1")), doctest::Contains("1"),
                         std::out_of_range);

    std::string printed = otab_to_string(t);
    CHECK(printed == "_ -> 0101\n00 -> 010\n11 -> 1\n");
    OracleTable again = parse_otab(printed);
    CHECK(otab_to_string(again) == printed);

    OracleTable withDefault = t;
    withDefault.fallback = parse_word("10");
    CHECK(withDefault.covers(parse_word("1")));
    CHECK(word_to_string(withDefault.lookup(parse_word("1"))) == "10");
    CHECK(word_to_string(withDefault.lookup(Word{})) == "0101");

    CHECK_THROWS_AS(parse_otab("0101\n"), ParseError);
    CHECK_THROWS_AS(parse_otab("01 -> 2\n"), ParseError);
    CHECK_THROWS_AS(parse_otab("0 -> 1\n0 -> 11\n"), ParseError);
    CHECK(parse_otab("").entries.empty());
    CHECK(parse_otab("# only a comment\n\n").entries.empty());
}

TEST_CASE("limitsize and table_length maxima") {
    OracleTable t = parse_otab("0 -> 111\n11 -> 1\n");
    std::vector<Word> A{parse_word("0"), parse_word("11")};
    CHECK(limitsize(t, A, 1) == 3);
    CHECK(limitsize(t, A, 2) == 3);
    CHECK(limitsize(t, A, 0) == 0);
    CHECK(limitsize(t, {}, 5) == 0);
    CHECK_THROWS_AS(limitsize(t, {parse_word("1010")}, 0), std::out_of_range);

    CHECK(table_length(t, 2) == 3);
    CHECK(table_length(t, 1) == 3);
    CHECK(table_length(t, 0) == 0);
    CHECK(table_length(OracleTable{}, 9) == 0);
    CHECK(table_length(parse_otab("_ -> 0101\n"), 0) == 4);
}
