#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstuple/interp.hpp>
#include <cstuple/otm.hpp>
#include <cstuple/parser.hpp>
#include <cstuple/rewrite.hpp>
#include <cstuple/sopoly.hpp>
#include <cstuple/strs.hpp>
#include <cstuple/term.hpp>

#include <fstream>
#include <map>
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

OtmSpec load_otm(const std::string& rel) { return parse_otm(read_file(rel)); }

Strs with_oracle(Strs sys, const std::string& name = "S") {
    TypePtr word = SimpleType::base("word");
    sys.sig.add_symbol(name, SimpleType::arrow(word, word), SymbolKind::Oracle);
    return sys;
}

TermPtr nat_term(const Signature& sig, uint64_t n) {
    TermPtr t = sig.make_symbol("0");
    for (uint64_t k = 0; k < n; ++k) t = Term::app(sig.make_symbol("s"), t);
    return t;
}

TermPtr nnat_term(const Signature& sig, uint64_t n) {
    TermPtr t = sig.make_symbol("n0");
    for (uint64_t k = 0; k < n; ++k) t = Term::app(sig.make_symbol("ns"), t);
    return t;
}

uint64_t nat_value(const TermPtr& t) {
    uint64_t n = 0;
    TermPtr cur = t;
    while (spine_head(cur)->name() == "s") {
        ++n;
        cur = spine_args(cur)[0];
    }
    REQUIRE(spine_head(cur)->name() == "0");
    return n;
}

TermPtr cells_term(const Signature& sig, const std::vector<TapeSymbol>& cells) {
    TermPtr t = sig.make_symbol("nil");
    for (auto it = cells.rbegin(); it != cells.rend(); ++it) {
        const char* n = *it == TapeSymbol::Zero ? "o" : *it == TapeSymbol::One ? "i" : "b";
        t = Term::app(sig.make_symbol("cons"), {sig.make_symbol(n), t});
    }
    return t;
}

TermPtr set_term(const Signature& sig, const std::vector<Word>& words) {
    TermPtr t = sig.make_symbol("empty");
    for (auto it = words.rbegin(); it != words.rend(); ++it)
        t = Term::app(sig.make_symbol("setcons"), {encode_word(*it, sig), t});
    return t;
}

Word random_word(std::mt19937_64& rng, size_t maxLen) {
    Word w;
    size_t len = rng() % (maxLen + 1);
    for (size_t k = 0; k < len; ++k) w.bits.push_back(static_cast<uint8_t>(rng() % 2));
    return w;
}

OracleTable random_table(std::mt19937_64& rng, size_t entries = 6, size_t maxLen = 5) {
    OracleTable t;
    for (size_t k = 0; k < entries; ++k)
        t.entries[random_word(rng, maxLen)] = random_word(rng, maxLen);
    t.fallback = random_word(rng, maxLen);
    return t;
}

// the normal form of a ground term over a compiled system extended with the
// oracle symbol S
TermPtr nf(const Strs& sys, const OracleTable& table, const TermPtr& t) {
    OracleBinding binding{{"S", table}};
    RunResult run = normalize(sys, &binding, t);
    REQUIRE(run.stats.normalForm);
    return run.result;
}

const CompiledOtm& identity_compiled() {
    static CompiledOtm c = compile_otm(load_otm("corpus/identity.otm"), parse_sopoly("1"));
    return c;
}

} // namespace

// ---------------------------------------------------------------------------

TEST_CASE("tape symbols map to their characters") {
    CHECK(tape_symbol_char(TapeSymbol::Zero) == '0');
    CHECK(tape_symbol_char(TapeSymbol::One) == '1');
    CHECK(tape_symbol_char(TapeSymbol::Blank) == 'B');
    CHECK(tape_symbol_of('0') == TapeSymbol::Zero);
    CHECK(tape_symbol_of('1') == TapeSymbol::One);
    CHECK(tape_symbol_of('B') == TapeSymbol::Blank);
    CHECK_FALSE(tape_symbol_of('2').has_value());
}

TEST_CASE("machine descriptions parse, print, and validate") {
    OtmSpec spec = parse_otm("start a  # entry\n"
                             "final h\n"
                             "query q\n"
                             "answer r\n"
                             "trans a 1 0 1 R h\n"
                             "trans a 2 B B L h\n");
    CHECK(spec.start == "a");
    CHECK(spec.final == "h");
    CHECK(spec.query == "q");
    CHECK(spec.answer == "r");
    CHECK(spec.states == std::vector<std::string>{"a", "h", "q", "r"});
    REQUIRE(spec.transitions.size() == 2);
    CHECK(spec.transitions[0].tape == 1);
    CHECK(spec.transitions[0].read == TapeSymbol::Zero);
    CHECK(spec.transitions[0].write == TapeSymbol::One);
    CHECK(spec.transitions[0].move == MoveDir::Right);
    CHECK(spec.transitions[1].read == TapeSymbol::Blank);
    CHECK(spec.transitions[1].move == MoveDir::Left);

    // printing then reparsing is the identity on the printed form
    std::string printed = otm_to_string(spec);
    CHECK(otm_to_string(parse_otm(printed)) == printed);

    SUBCASE("parse errors carry positions") {
        CHECK_THROWS_AS(parse_otm("start a\nfinal h\nquery q\n"), ParseError);   // no answer
        CHECK_THROWS_AS(parse_otm("start a\nstart b\nfinal h\nquery q\nanswer r\n"), ParseError);
        CHECK_THROWS_AS(parse_otm("bogus a\n"), ParseError);
        CHECK_THROWS_AS(parse_otm("start a\nfinal h\nquery q\nanswer r\n"
                                  "trans a 4 0 0 R h\n"),
                        ParseError); // tape out of range
        CHECK_THROWS_AS(parse_otm("start a\nfinal h\nquery q\nanswer r\n"
                                  "trans a 1 2 0 R h\n"),
                        ParseError); // bad read symbol
        CHECK_THROWS_AS(parse_otm("start a\nfinal h\nquery q\nanswer r\n"
                                  "trans a 1 0 0 X h\n"),
                        ParseError); // bad move
        CHECK_THROWS_AS(parse_otm("start a\nfinal h\nquery q\nanswer r\n"
                                  "trans a 1 0 0 R h junk\n"),
                        ParseError);
    }

    SUBCASE("validation rejects broken machines") {
        auto mk = [](const std::string& extra) {
            return parse_otm("start a\nfinal h\nquery q\nanswer r\n" + extra);
        };
        // a transition out of the final state
        CHECK_THROWS_AS(validate_otm(mk("trans h 1 0 0 R a\n")), std::invalid_argument);
        // a transition out of the query state
        CHECK_THROWS_AS(validate_otm(mk("trans q 1 0 0 R a\n")), std::invalid_argument);
        // one state watching two different tapes
        CHECK_THROWS_AS(validate_otm(mk("trans a 1 0 0 R h\ntrans a 2 1 1 R h\n")),
                        std::invalid_argument);
        // two transitions for the same (state, read symbol)
        CHECK_THROWS_AS(validate_otm(mk("trans a 1 0 0 R h\ntrans a 1 0 1 R h\n")),
                        std::invalid_argument);
        // any left-moving transition draws a stay-at-leftmost warning
        CHECK(validate_otm(mk("trans a 1 0 0 R h\n")).empty());
        CHECK(validate_otm(mk("trans a 1 0 0 L h\ntrans a 1 1 1 L h\n")).size() == 2);
    }
}

TEST_CASE("a single step writes, then moves") {
    OtmSpec spec = parse_otm("start q\nfinal h\nquery qq\nanswer qa\n"
                             "trans q 1 1 B R h\n");
    OracleTable none;

    // reading 1 on "10", writing B and moving right: the blank crosses to
    // the left half and only "0" remains ahead of the head
    OtmConfig c = initial_config(spec, parse_word("10"));
    CHECK(c.state == "q");
    CHECK(c.tapes[0].right == std::vector<TapeSymbol>{TapeSymbol::One, TapeSymbol::Zero});
    OtmConfig d = otm_step(spec, none, c);
    CHECK(d.state == "h");
    CHECK(d.tapes[0].left == std::vector<TapeSymbol>{TapeSymbol::Blank});
    CHECK(d.tapes[0].right == std::vector<TapeSymbol>{TapeSymbol::Zero});
    CHECK(d.tapes[1] == TapeHalves{});

    SUBCASE("an empty right half reads as blank") {
        OtmSpec bspec = parse_otm("start q\nfinal h\nquery qq\nanswer qa\n"
                                  "trans q 1 B 1 R h\n");
        OtmConfig e = otm_step(bspec, none, initial_config(bspec, Word{}));
        CHECK(e.state == "h");
        CHECK(e.tapes[0].left == std::vector<TapeSymbol>{TapeSymbol::One});
        CHECK(e.tapes[0].right.empty());
    }

    SUBCASE("a left move at the leftmost cell stays in place") {
        OtmSpec lspec = parse_otm("start q\nfinal h\nquery qq\nanswer qa\n"
                                  "trans q 1 B 1 L h\n");
        OtmConfig e = otm_step(lspec, none, initial_config(lspec, Word{}));
        CHECK(e.state == "h");
        CHECK(e.tapes[0].left.empty());
        CHECK(e.tapes[0].right == std::vector<TapeSymbol>{TapeSymbol::One});
    }

    SUBCASE("stepping a final or stuck configuration is an error") {
        OtmConfig f = initial_config(spec, Word{});
        f.state = "h";
        CHECK_THROWS_AS(otm_step(spec, none, f), std::invalid_argument);
        // q expects to read 1 but the tape is empty (blank)
        CHECK_THROWS_AS(otm_step(spec, none, initial_config(spec, Word{})),
                        std::invalid_argument);
    }
}

TEST_CASE("the query step consults the oracle in one move") {
    OtmSpec spec = parse_otm("start s\nfinal h\nquery qy\nanswer an\n"
                             "trans s 1 B B R h\n");
    OracleTable table;
    table.entries[parse_word("01")] = parse_word("111");

    OtmConfig c;
    c.state = "qy";
    c.tapes[0].right = {TapeSymbol::One};                  // untouched by the query
    c.tapes[1].left = {TapeSymbol::Blank};                 // erased with the rest of tape 2
    c.tapes[1].right = {TapeSymbol::Zero, TapeSymbol::One}; // the query word "01"
    c.tapes[2].right = {TapeSymbol::Zero};                 // overwritten by the answer

    OtmConfig d = otm_step(spec, table, c);
    CHECK(d.state == "an");
    CHECK(d.tapes[0].right == std::vector<TapeSymbol>{TapeSymbol::One});
    CHECK(d.tapes[1] == TapeHalves{});
    CHECK(d.tapes[2].left.empty());
    CHECK(d.tapes[2].right ==
          std::vector<TapeSymbol>{TapeSymbol::One, TapeSymbol::One, TapeSymbol::One});

    SUBCASE("the query word stops at the first blank") {
        c.tapes[1].right = {TapeSymbol::Zero, TapeSymbol::One, TapeSymbol::Blank,
                            TapeSymbol::One};
        OtmConfig e = otm_step(spec, table, c);
        CHECK(e.tapes[2].right.size() == 3);
    }

    SUBCASE("a lookup miss propagates") {
        c.tapes[1].right = {TapeSymbol::One};
        CHECK_THROWS_AS(otm_step(spec, table, c), std::out_of_range);
    }
}

TEST_CASE("whole runs of the corpus machines") {
    OracleTable table;
    table.entries[parse_word("101")] = parse_word("11");
    table.fallback = parse_word("");

    SUBCASE("identity halts immediately") {
        OtmRun run = otm_run(load_otm("corpus/identity.otm"), table, parse_word("101"));
        CHECK(word_to_string(run.output) == "101");
        CHECK(run.steps == 0);
        CHECK(run.oracleCalls == 0);
    }

    SUBCASE("flip complements every bit") {
        OtmSpec flip = load_otm("corpus/flip.otm");
        OtmRun run = otm_run(flip, table, parse_word("01"));
        CHECK(word_to_string(run.output) == "10");
        CHECK(run.steps == 19);
        CHECK(run.oracleCalls == 0);

        CHECK(word_to_string(otm_run(flip, table, parse_word("110010")).output) == "001101");
        CHECK(otm_run(flip, table, Word{}).steps == 7);

        // the documented runtime bound holds on every short input
        std::mt19937_64 rng(11);
        for (int k = 0; k < 40; ++k) {
            Word w = random_word(rng, 8);
            OtmRun r = otm_run(flip, table, w);
            Word expect;
            for (uint8_t bit : w.bits) expect.bits.push_back(bit ? 0 : 1);
            CHECK(r.output == expect);
            CHECK(r.steps <= 6 * w.bits.size() + 12);
        }
    }

    SUBCASE("onequery relays one oracle answer") {
        OtmSpec one = load_otm("corpus/onequery.otm");
        OtmRun run = otm_run(one, table, parse_word("101"));
        CHECK(word_to_string(run.output) == "11");
        CHECK(run.steps == 23);
        CHECK(run.oracleCalls == 1);

        std::mt19937_64 rng(12);
        for (int k = 0; k < 40; ++k) {
            Word w = random_word(rng, 8);
            OracleTable t = random_table(rng);
            OtmRun r = otm_run(one, t, w);
            CHECK(r.output == t.lookup(w));
            CHECK(r.oracleCalls == 1);
            CHECK(r.steps <= 3 * t.lookup(w).bits.size() + 6 * w.bits.size() + 18);
        }
    }

    SUBCASE("a diverging machine exhausts its budget") {
        OtmSpec loop = parse_otm("start l\nfinal h\nquery qq\nanswer qa\n"
                                 "trans l 1 B B R l\n");
        CHECK_THROWS_AS(otm_run(loop, table, Word{}, 10), BudgetExhausted);
    }
}

// ---------------------------------------------------------------------------

TEST_CASE("configurations encode to terms and back") {
    const CompiledOtm& c = identity_compiled();
    const Signature& sig = c.strs.sig;

    SUBCASE("cells left of the head are stored nearest-first") {
        // tape content 1 B 0 | 1 0 with the head on the fourth cell
        OtmConfig conf;
        conf.state = "halt";
        conf.tapes[0].left = {TapeSymbol::Zero, TapeSymbol::Blank, TapeSymbol::One};
        conf.tapes[0].right = {TapeSymbol::One, TapeSymbol::Zero};
        TermPtr t = encode_config(conf, sig);
        TermPtr expect = parse_ground_term(
            "st_halt (split (L (cons o (cons b (cons i nil)))) (R (cons i (cons o nil))))"
            " (split (L nil) (R nil)) (split (L nil) (R nil))",
            sig);
        CHECK(term_equal(t, expect));
    }

    SUBCASE("the initial configuration has empty left halves") {
        OtmSpec spec = load_otm("corpus/identity.otm");
        TermPtr t = encode_config(initial_config(spec, parse_word("10")), sig);
        TermPtr expect = parse_ground_term(
            "st_halt (split (L nil) (R (cons i (cons o nil))))"
            " (split (L nil) (R nil)) (split (L nil) (R nil))",
            sig);
        CHECK(term_equal(t, expect));
    }

    SUBCASE("random configurations round-trip exactly") {
        std::mt19937_64 rng(21);
        const char* states[] = {"halt", "qq", "qa"};
        for (int k = 0; k < 50; ++k) {
            OtmConfig conf;
            conf.state = states[rng() % 3];
            for (auto& tape : conf.tapes) {
                auto cells = [&] {
                    std::vector<TapeSymbol> cs;
                    for (size_t j = rng() % 6; j > 0; --j)
                        cs.push_back(static_cast<TapeSymbol>(rng() % 3));
                    return cs;
                };
                tape.left = cells();
                tape.right = cells();
            }
            CHECK(decode_config(encode_config(conf, sig)) == conf);
        }
    }

    SUBCASE("non-configuration terms are rejected") {
        CHECK_THROWS_AS(decode_config(parse_ground_term("nil", sig)), std::invalid_argument);
        CHECK_THROWS_AS(decode_config(parse_ground_term("st_halt", sig)),
                        std::invalid_argument);
        OtmConfig conf;
        conf.state = "nowhere";
        CHECK_THROWS_AS(encode_config(conf, sig), std::invalid_argument);
    }
}

// ---------------------------------------------------------------------------

TEST_CASE("budget terms mirror the polynomial structure") {
    const CompiledOtm& c = identity_compiled();
    Strs sys = with_oracle(c.strs);
    const Signature& sig = sys.sig;
    TypePtr word = SimpleType::base("word");
    TermPtr F = Term::var("F", SimpleType::arrow(word, word));
    TermPtr z = Term::var("z", SimpleType::base("nat"));
    TermPtr a = Term::var("a", SimpleType::base("set"));
    std::map<std::string, TypePtr> vars{
        {"F", F->type()}, {"z", z->type()}, {"a", a->type()}};
    auto expect = [&](const std::string& text) {
        return parse_term_with_vars(text, sig, vars);
    };

    CHECK(term_equal(build_theta(parse_sopoly("3"), F, z, a, sig), expect("s (s (s 0))")));
    CHECK(term_equal(build_theta(parse_sopoly("x"), F, z, a, sig), z));
    CHECK(term_equal(build_theta(parse_sopoly("F(x)"), F, z, a, sig), expect("tryall F a z")));
    CHECK(term_equal(build_theta(parse_sopoly("F(x) + 2"), F, z, a, sig),
                     expect("add (tryall F a z) (s (s 0))")));
    CHECK(term_equal(build_theta(parse_sopoly("2*x"), F, z, a, sig),
                     expect("mult (s (s 0)) z")));

    SUBCASE("more than one function or number name is rejected") {
        CHECK_THROWS_AS(build_theta(parse_sopoly("F(x) + G(x)"), F, z, a, sig),
                        std::invalid_argument);
        CHECK_THROWS_AS(build_theta(parse_sopoly("x + y"), F, z, a, sig),
                        std::invalid_argument);
    }

    SUBCASE("the budget term computes the bound over the query set") {
        std::mt19937_64 rng(31);
        SoPolyPtr p = parse_sopoly("3*F(x) + x");
        for (int k = 0; k < 25; ++k) {
            OracleTable table = random_table(rng);
            std::vector<Word> A;
            for (size_t j = rng() % 4; j > 0; --j) A.push_back(random_word(rng, 5));
            uint64_t n = rng() % 7;
            TermPtr theta = build_theta(p, sig.make_symbol("S"), nat_term(sig, n),
                                        set_term(sig, A), sig);
            uint64_t got = nat_value(nf(sys, table, theta));
            SoEnv env;
            env.nums["x"] = n;
            env.funs["F"] = [&](uint64_t m) { return limitsize(table, A, m); };
            CHECK(got == eval_sopoly(p, env));
        }
    }
}

// ---------------------------------------------------------------------------

TEST_CASE("compilation emits the documented rule shapes") {
    SUBCASE("a left move on a non-blank read becomes two rules") {
        OtmSpec spec = parse_otm("start q\nfinal l\nquery qq\nanswer qa\n"
                                 "trans q 1 0 1 L l\n");
        CompiledOtm c = compile_otm(spec, parse_sopoly("1"));
        const Signature& sig = c.strs.sig;
        TypePtr word = SimpleType::base("word");
        std::map<std::string, TypePtr> vars{
            {"F", SimpleType::arrow(word, word)}, {"x", SimpleType::base("bit")},
            {"y", word},                          {"z", word},
            {"t2", SimpleType::base("tape")},     {"t3", SimpleType::base("tape")}};
        std::vector<std::pair<std::string, std::string>> expected = {
            {"step F (st_q (split (L (cons x y)) (R (cons o z))) t2 t3)",
             "st_l (split (L y) (R (cons x (cons i z)))) t2 t3"},
            {"step F (st_q (split (L nil) (R (cons o z))) t2 t3)",
             "st_l (split (L nil) (R (cons i z))) t2 t3"}};
        size_t found = 0;
        for (const Rule& r : c.strs.rules) {
            if (spine_head(r.lhs)->name() != "step") continue;
            TermPtr inner = spine_args(r.lhs)[1];
            if (spine_head(inner)->name() != "st_q") continue;
            REQUIRE(found < expected.size());
            CHECK(term_equal(r.lhs, parse_term_with_vars(expected[found].first, sig, vars)));
            CHECK(term_equal(r.rhs, parse_term_with_vars(expected[found].second, sig, vars)));
            ++found;
        }
        CHECK(found == 2);
    }

    SUBCASE("the loop starts with budget bound-plus-one") {
        const CompiledOtm& c = identity_compiled();
        const Signature& sig = c.strs.sig;
        TypePtr word = SimpleType::base("word");
        std::map<std::string, TypePtr> vars{{"F", SimpleType::arrow(word, word)},
                                            {"z", SimpleType::base("nat")},
                                            {"c", SimpleType::base("config")}};
        bool found = false;
        for (const Rule& r : c.strs.rules) {
            if (spine_head(r.lhs)->name() != "mainAux") continue;
            found = true;
            CHECK(term_equal(r.rhs, parse_term_with_vars(
                                        "execute F (s (s 0)) n0 z empty c", sig, vars)));
        }
        CHECK(found);
    }

    SUBCASE("bad machines and bad bounds are rejected") {
        OtmSpec broken = parse_otm("start a\nfinal h\nquery q\nanswer r\n"
                                   "trans h 1 0 0 R a\n");
        CHECK_THROWS_AS(compile_otm(broken, parse_sopoly("1")), std::invalid_argument);
        OtmSpec ok = load_otm("corpus/identity.otm");
        CHECK_THROWS_AS(compile_otm(ok, parse_sopoly("F(x) + G(x)")), std::invalid_argument);
        CHECK_THROWS_AS(compile_otm(ok, parse_sopoly("x + y")), std::invalid_argument);
    }
}

// ---------------------------------------------------------------------------

TEST_CASE("helper rules compute their intended functions") {
    const CompiledOtm& c = identity_compiled();
    Strs sys = with_oracle(c.strs);
    const Signature& sig = sys.sig;
    std::mt19937_64 rng(41);
    OracleTable table = random_table(rng);

    auto app = [&](const std::string& f, std::vector<TermPtr> args) {
        return Term::app(sig.make_symbol(f), args);
    };

    for (int k = 0; k < 100; ++k) {
        Word w = random_word(rng, 6);
        Word v = random_word(rng, 6);
        uint64_t n = rng() % 8, m = rng() % 8;

        // len computes word length
        CHECK(nat_value(nf(sys, table, app("len", {encode_word(w, sig)}))) == w.bits.size());

        // max computes the larger of two naturals
        CHECK(nat_value(nf(sys, table, app("max", {nat_term(sig, n), nat_term(sig, m)}))) ==
              std::max(n, m));

        // minus computes truncating subtraction
        CHECK(nat_value(nf(sys, table, app("minus", {nat_term(sig, n), nnat_term(sig, m)}))) ==
              (n > m ? n - m : 0));

        // limit keeps at most the first n bits
        Word prefix;
        for (size_t j = 0; j < std::min<size_t>(n, w.bits.size()); ++j)
            prefix.bits.push_back(w.bits[j]);
        CHECK(decode_word(nf(sys, table, app("limit", {encode_word(w, sig), nat_term(sig, n)})))
                  .value() == prefix);

        // retif returns its default when the word fits in n, else nothing
        Word fallback = n >= w.bits.size() ? v : Word{};
        CHECK(decode_word(nf(sys, table, app("retif", {encode_word(w, sig), nat_term(sig, n),
                                                       encode_word(v, sig)})))
                  .value() == fallback);

        // clean keeps the bits before the first blank cell
        std::vector<TapeSymbol> cells;
        for (size_t j = rng() % 7; j > 0; --j)
            cells.push_back(static_cast<TapeSymbol>(rng() % 3));
        Word untilBlank;
        for (TapeSymbol s : cells) {
            if (s == TapeSymbol::Blank) break;
            untilBlank.bits.push_back(s == TapeSymbol::One ? 1 : 0);
        }
        CHECK(decode_word(nf(sys, table, app("clean", {cells_term(sig, cells)}))).value() ==
              untilBlank);

        // tryapply measures the oracle's answer on words that fit in n
        Word a = random_word(rng, 6);
        uint64_t applied =
            a.bits.size() <= n ? table.lookup(a).bits.size() : 0;
        CHECK(nat_value(nf(sys, table, app("tryapply", {sig.make_symbol("S"),
                                                        encode_word(a, sig),
                                                        nat_term(sig, n)}))) == applied);

        // tryall takes the maximum over a whole query set, which is exactly
        // the restricted length function of the table
        std::vector<Word> A;
        for (size_t j = rng() % 5; j > 0; --j) A.push_back(random_word(rng, 6));
        CHECK(nat_value(nf(sys, table, app("tryall", {sig.make_symbol("S"), set_term(sig, A),
                                                      nat_term(sig, n)}))) ==
              limitsize(table, A, n));

        // add and mult are arithmetic on numerals
        CHECK(nat_value(nf(sys, table, app("add", {nat_term(sig, n), nat_term(sig, m)}))) ==
              n + m);
        CHECK(nat_value(nf(sys, table, app("mult", {nat_term(sig, n), nat_term(sig, m)}))) ==
              n * m);
    }
}

// ---------------------------------------------------------------------------

namespace {

struct MachineFixture {
    OtmSpec spec;
    CompiledOtm compiled;
    Strs sys; // with the oracle symbol
};

std::vector<MachineFixture>& corpus_machines() {
    static std::vector<MachineFixture> ms = [] {
        std::vector<MachineFixture> out;
        auto add = [&](const std::string& rel, const std::string& poly) {
            MachineFixture f{load_otm(rel), {}, {}};
            f.compiled = compile_otm(f.spec, parse_sopoly(poly));
            f.sys = with_oracle(f.compiled.strs);
            out.push_back(std::move(f));
        };
        add("corpus/identity.otm", "1");
        add("corpus/flip.otm", "6*x + 12");
        add("corpus/onequery.otm", "3*F(x) + 6*x + 18");
        return out;
    }();
    return ms;
}

} // namespace

TEST_CASE("every machine step matches one rewrite of the step symbol") {
    std::mt19937_64 rng(51);
    size_t sampled = 0;
    for (const MachineFixture& m : corpus_machines()) {
        for (int k = 0; k < 4; ++k) {
            OracleTable table = random_table(rng);
            Word w = random_word(rng, 6);
            OtmConfig c = initial_config(m.spec, w);
            while (c.state != m.spec.final) {
                OtmConfig d = otm_step(m.spec, table, c);
                TermPtr stepTerm = Term::app(m.sys.sig.make_symbol("step"),
                                             {m.sys.sig.make_symbol("S"),
                                              encode_config(c, m.sys.sig)});
                TermPtr got = nf(m.sys, table, stepTerm);
                std::string why = "state " + c.state + ": " + to_string(got);
                CHECK_MESSAGE(term_equal(got, encode_config(d, m.sys.sig)), why);
                ++sampled;
                c = d;
            }
        }
    }
    CHECK(sampled >= 100);
}

TEST_CASE("compiled systems compute exactly what the machine computes") {
    std::mt19937_64 rng(61);
    for (const MachineFixture& m : corpus_machines()) {
        for (int k = 0; k < 10; ++k) {
            OracleTable table = random_table(rng);
            Word w = random_word(rng, 6);
            OtmRun direct = otm_run(m.spec, table, w);
            ComputeResult viaTerms = compute_type2(m.compiled.strs, "main", table, w);
            std::string why = word_to_string(w) + ": machine " + word_to_string(direct.output) +
                              " vs terms " + word_to_string(viaTerms.output);
            CHECK_MESSAGE(viaTerms.output == direct.output, why);
        }
    }
}

TEST_CASE("compiled systems are orthogonal and never falsified") {
    for (const MachineFixture& m : corpus_machines()) {
        CHECK(check_orthogonality(m.compiled.strs).orthogonal);
        CHECK(check_monotonicity(m.compiled.interp, m.compiled.strs).empty());
        SystemVerdict v = check_system(m.compiled.interp, m.compiled.strs, CheckMode::Falsify,
                                       1000, 7);
        for (size_t r = 0; r < v.rules.size(); ++r) {
            std::string why = to_string(m.compiled.strs.rules[r].lhs) + " -> " +
                              to_string(m.compiled.strs.rules[r].rhs) + ": " +
                              v.rules[r].to_string();
            CHECK_MESSAGE(v.rules[r].kind != Verdict::Kind::Falsified, why);
        }
    }
}
