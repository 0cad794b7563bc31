/* test_behavior.cc -- tests for run classifiers, decompositions and profiles */

#include <doctest.h>

#include <random>
#include <set>
#include <string>
#include <vector>

#include "cpg/behavior.hh"
#include "cpg/cps.hh"
#include "cpg/stack.hh"
#include "support.hh"

using namespace cpg;
using testsup::random_run;
using testsup::walk_labelled_runs;

namespace {

Configuration cf(const std::string& lit) { return parse_config(lit); }

Stack2 single(const Word& w) { return Stack2{{w}}; }

Stack2 two_copies(const Word& w) { return Stack2{{w, w}}; }

/// Extends start by the unique successor carrying each label in turn.
Run run_by_labels(const CPS& sys, const Configuration& start,
                  const std::vector<std::string>& labels) {
    Run rho{{start}, {}};
    for (const std::string& lab : labels) {
        std::vector<Configuration> next;
        for (const auto& [l, succ] : successors(sys, rho.back()))
            if (l == lab) next.push_back(succ);
        REQUIRE(next.size() == 1);
        rho.configs.push_back(next.front());
        rho.labels.push_back(lab);
    }
    return rho;
}

/// State pairs (start state, end state) of all runs from `start` of length
/// at most depth that classify as the given kind, the empty run included.
StatePairs enumerate_pairs(const CPS& sys, const Stack2& start, RunKind kind, int depth) {
    StatePairs found;
    for (const std::string& q : sys.states) {
        auto note = [&](const Run& r) {
            if (classify_run(sys, r, kind).ok) found.insert({q, r.back().state});
        };
        Run rho{{Configuration{q, start}}, {}};
        note(rho);
        walk_labelled_runs(sys, rho, depth, note);
    }
    return found;
}

bool pairs_subset(const StatePairs& inner, const StatePairs& outer) {
    return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

/// Every set of p grows into the matching set of q.
bool profile_subset(const BehaviorProfile& p, const BehaviorProfile& q) {
    return pairs_subset(p.ret, q.ret) && pairs_subset(p.loop, q.loop) &&
           pairs_subset(p.hloop, q.hloop) && pairs_subset(p.lloop, q.lloop) &&
           pairs_subset(p.oneloop, q.oneloop);
}

/// All canonical words of length at most maxlen: a bottom letter followed by
/// alphabet letters of either level, links zeroed.
std::vector<Word> canonical_words(const std::vector<std::string>& syms, int maxlen) {
    std::vector<Word> out{{plain(kBottomSym)}};
    for (size_t lo = 0, len = 1; static_cast<int>(len) < maxlen; ++len) {
        size_t hi = out.size();
        for (size_t i = lo; i < hi; ++i)
            for (const std::string& s : syms) {
                if (s == kBottomSym) continue;
                for (int lvl : {1, 2}) {
                    Word w = out[i];
                    w.push_back(lvl == 1 ? plain(s) : linked(s, 0));
                    out.push_back(std::move(w));
                }
            }
        lo = hi;
    }
    return out;
}

/// Fixture expectations shared by several cases: the bottom word of both
/// example systems has returns {(1,0)}, high loops {(0,0),(1,1),(1,2),(2,2)}
/// equal to its loops, no low loops, and 1-loops adding (0,1) and (0,2).
const StatePairs kFixRet{{"1", "0"}};
const StatePairs kFixLoop{{"0", "0"}, {"1", "1"}, {"1", "2"}, {"2", "2"}};
const StatePairs kFixOneLoop{{"0", "0"}, {"0", "1"}, {"0", "2"},
                             {"1", "1"}, {"1", "2"}, {"2", "2"}};

/// Four-state system whose only returns bounce through Pop1 of the start:
/// pop into the top word, push a linked letter, collapse out.
CPS toy_nested_return() {
    return parse_cps(
        "states: r0 r1 r2 r3\n"
        "stack_alphabet: _ a\n"
        "input_alphabet: dn up co\n"
        "initial: r0\n"
        "trans: r0 a dn r1 pop1\n"
        "trans: r1 * up r2 push a 2\n"
        "trans: r2 a co r3 collapse\n");
}

/// Two-state system with a genuine low loop: pop the level-1 letter, then
/// push it right back.
CPS toy_low_loop() {
    return parse_cps(
        "states: l0 l1\n"
        "stack_alphabet: _ a\n"
        "input_alphabet: dn up\n"
        "initial: l0\n"
        "trans: l0 a dn l1 pop1\n"
        "trans: l1 _ up l0 push a 1\n");
}

/// Four-state system whose 1-loops need a repairing return: clone, pop the
/// clone's top letter, pop2 back onto the original.
CPS toy_repaired_exposure() {
    return parse_cps(
        "states: o0 o1 o2 o3\n"
        "stack_alphabet: _ a\n"
        "input_alphabet: cl dn p2\n"
        "initial: o0\n"
        "trans: o0 * cl o1 clone2\n"
        "trans: o1 a dn o2 pop1\n"
        "trans: o2 _ p2 o3 pop2\n");
}

/// Like toy_repaired_exposure but the exposure is patched by a fresh push
/// instead of a return, which no 1-loop may do.
CPS toy_unrepaired_exposure() {
    return parse_cps(
        "states: t0 t1 t2 t3\n"
        "stack_alphabet: _ a\n"
        "input_alphabet: cl dn pu\n"
        "initial: t0\n"
        "trans: t0 * cl t1 clone2\n"
        "trans: t1 a dn t2 pop1\n"
        "trans: t2 _ pu t3 push a 1\n");
}

/// Three-state push chain with a push-pop high loop between the real pushes.
CPS toy_push_chain() {
    return parse_cps(
        "states: u0 u1 u2\n"
        "stack_alphabet: _ a\n"
        "input_alphabet: up gu gd\n"
        "initial: u0\n"
        "trans: u0 * up u1 push a 2\n"
        "trans: u1 * gu u2 push a 2\n"
        "trans: u2 a gd u1 pop1\n"
        "trans: u1 * up u0 push a 2\n");
}

}  // namespace

TEST_CASE("kind and scheme names") {
    CHECK(std::string(show_run_kind(RunKind::Return)) == "return");
    CHECK(std::string(show_run_kind(RunKind::Loop)) == "loop");
    CHECK(std::string(show_run_kind(RunKind::HighLoop)) == "high-loop");
    CHECK(std::string(show_run_kind(RunKind::LowLoop)) == "low-loop");
    CHECK(std::string(show_run_kind(RunKind::OneLoop)) == "1-loop");
    CHECK(std::string(show_scheme(DecompScheme::General4)) == "general4");
    CHECK(std::string(show_scheme(DecompScheme::RelAForms)) == "relA-forms");
    CHECK(std::string(show_scheme(DecompScheme::RelBHLoops)) == "relB-hloops");
    CHECK(std::string(show_scheme(DecompScheme::RelCHLoops)) == "relC-hloops");
    CHECK(std::string(show_scheme(DecompScheme::RelDLoops)) == "relD-loops");
}

TEST_CASE("returns on the example systems") {
    const CPS h = example_hague();
    const CPS n = example_nonelementary();

    SUBCASE("collapse ending") {
        // Push a letter linked below the clone, then collapse out of it.
        Run rho = run_by_labels(h, cf("1 | _ : _"), {"A'", "Co"});
        RunCertificate c = classify_run(h, rho, RunKind::Return);
        CHECK(c.ok);
        CHECK(c.reason == "final-collapse2");
        CHECK(c.cuts.empty());
    }

    SUBCASE("pop2 ending") {
        Run rho = run_by_labels(n, cf("2 | _ : _ a^2@1"), {"P2"});
        RunCertificate c = classify_run(n, rho, RunKind::Return);
        CHECK(c.ok);
        CHECK(c.reason == "final-pop2");
        CHECK(c.cuts.empty());
    }

    SUBCASE("early visit of the target is fatal") {
        // Touches the one-word stack mid-run and again at the end.
        Run rho = run_by_labels(h, cf("1 | _ : _"), {"A'", "Co", "Cl", "A'", "Co"});
        CHECK(rho.back().stack == parse_stack("_"));
        RunCertificate c = classify_run(h, rho, RunKind::Return);
        CHECK(!c.ok);
        CHECK(!c.reason.empty());
    }

    SUBCASE("invalid runs are rejected with a reason") {
        Run bogus{{cf("0 | _"), cf("2 | _ : _")}, {"Cl"}};
        RunCertificate c = classify_run(h, bogus, RunKind::Return);
        CHECK(!c.ok);
        CHECK(c.reason.find("invalid run") != std::string::npos);
    }
}

TEST_CASE("returns can nest through pop1 of the start") {
    const CPS sys = toy_nested_return();
    const Word w{plain(kBottomSym), linked("a", 0)};

    Run rho = run_by_labels(sys, Configuration{"r0", two_copies(w)}, {"dn", "up", "co"});
    RunCertificate c = classify_run(sys, rho, RunKind::Return);
    CHECK(c.ok);
    // One nesting of the re-entry clause, resolved by a collapse.
    CHECK(c.cuts == std::vector<int>{1});
    CHECK(c.reason == "final-collapse2");

    ProfileOracle oracle(sys);
    const BehaviorProfile& bot = oracle.profile({plain(kBottomSym)}, 16);
    const BehaviorProfile& top = oracle.profile(w, 16);
    CHECK(bot.ret == StatePairs{{"r1", "r3"}});
    CHECK(top.ret == StatePairs{{"r0", "r3"}, {"r1", "r3"}});
    // The system cannot clone, so both searches exhaust their frontiers.
    CHECK(bot.budget_used.frontier_exhausted);
    CHECK(top.budget_used.frontier_exhausted);

    for (const Word& word : {Word{plain(kBottomSym)}, w}) {
        const BehaviorProfile& p = oracle.profile(word, 16);
        CHECK(enumerate_pairs(sys, two_copies(word), RunKind::Return, 6) == p.ret);
        CHECK(enumerate_pairs(sys, single(word), RunKind::OneLoop, 6) == p.oneloop);
    }
}

TEST_CASE("low loops pop a letter and push it back") {
    const CPS sys = toy_low_loop();
    const Word w{plain(kBottomSym), plain("a")};

    Run rho = run_by_labels(sys, Configuration{"l0", single(w)}, {"dn", "up"});
    RunCertificate c = classify_run(sys, rho, RunKind::LowLoop);
    CHECK(c.ok);
    // Both pinned positions are the single middle configuration.
    CHECK(c.cuts == std::vector<int>{1, 1});
    CHECK(classify_run(sys, rho, RunKind::Loop).ok);
    CHECK(!classify_run(sys, rho, RunKind::HighLoop).ok);

    ProfileOracle oracle(sys);
    const BehaviorProfile& p = oracle.profile(w, 16);
    const StatePairs diag{{"l0", "l0"}, {"l1", "l1"}};
    CHECK(p.lloop == StatePairs{{"l0", "l0"}});
    CHECK(p.hloop == diag);
    CHECK(p.loop == diag);
    CHECK(p.ret.empty());
    CHECK(p.oneloop == diag);
    CHECK(p.loop == compose_loop(p.hloop, p.lloop));
    CHECK(p.budget_used.frontier_exhausted);

    CHECK(enumerate_pairs(sys, single(w), RunKind::LowLoop, 6) == p.lloop);
    CHECK(enumerate_pairs(sys, single(w), RunKind::Loop, 6) == p.loop);
    CHECK(enumerate_pairs(sys, single(w), RunKind::HighLoop, 6) == p.hloop);
}

TEST_CASE("one loops repair exposures of pop1 of the top word") {
    const CPS repaired = toy_repaired_exposure();
    const CPS unrepaired = toy_unrepaired_exposure();
    const Word w{plain(kBottomSym), plain("a")};

    SUBCASE("a return after the exposure repairs it") {
        Run rho = run_by_labels(repaired, Configuration{"o0", single(w)}, {"cl", "dn", "p2"});
        RunCertificate c = classify_run(repaired, rho, RunKind::OneLoop);
        CHECK(c.ok);
        // The exposure at index 2 is closed by the return ending at index 3.
        CHECK(c.cuts == std::vector<int>{2, 3});
        // The same run is also a high loop: it returns to the start without
        // ever standing on Pop1 of the whole stack.
        CHECK(classify_run(repaired, rho, RunKind::HighLoop).ok);
    }

    SUBCASE("a fresh push after the exposure does not repair it") {
        Run rho = run_by_labels(unrepaired, Configuration{"t0", single(w)}, {"cl", "dn", "pu"});
        CHECK(rho.back().stack.top2() == w);
        RunCertificate c = classify_run(unrepaired, rho, RunKind::OneLoop);
        CHECK(!c.ok);
        CHECK(!c.reason.empty());
    }

    SUBCASE("profiles agree with enumeration") {
        ProfileOracle ro(repaired);
        const BehaviorProfile& rp = ro.profile(w, 16);
        const StatePairs rdiag{{"o0", "o0"}, {"o1", "o1"}, {"o2", "o2"}, {"o3", "o3"}};
        StatePairs roneloop = rdiag;
        roneloop.insert({"o0", "o1"});
        roneloop.insert({"o0", "o3"});
        StatePairs rhloop = rdiag;
        rhloop.insert({"o0", "o3"});
        CHECK(rp.ret == StatePairs{{"o1", "o3"}});
        CHECK(rp.oneloop == roneloop);
        CHECK(rp.hloop == rhloop);
        CHECK(rp.loop == rhloop);
        CHECK(rp.lloop.empty());
        CHECK(rp.budget_used.frontier_exhausted);
        CHECK(enumerate_pairs(repaired, two_copies(w), RunKind::Return, 6) == rp.ret);
        CHECK(enumerate_pairs(repaired, single(w), RunKind::OneLoop, 6) == rp.oneloop);
        CHECK(enumerate_pairs(repaired, single(w), RunKind::HighLoop, 6) == rp.hloop);

        ProfileOracle uo(unrepaired);
        const BehaviorProfile& up = uo.profile(w, 16);
        const StatePairs udiag{{"t0", "t0"}, {"t1", "t1"}, {"t2", "t2"}, {"t3", "t3"}};
        StatePairs uoneloop = udiag;
        uoneloop.insert({"t0", "t1"});
        CHECK(up.ret.empty());
        CHECK(up.oneloop == uoneloop);
        CHECK(enumerate_pairs(unrepaired, single(w), RunKind::OneLoop, 6) == up.oneloop);
    }
}

TEST_CASE("profiles of the example systems") {
    const CPS h = example_hague();
    const CPS n = example_nonelementary();
    ProfileOracle oh(h);
    ProfileOracle on(n);
    const Word bot{plain(kBottomSym)};
    const Word bota{plain(kBottomSym), linked("a", 0)};
    const Word botb{plain(kBottomSym), linked("b", 0)};

    SUBCASE("bottom word") {
        for (ProfileOracle* o : {&oh, &on}) {
            const BehaviorProfile& p = o->profile(bot, 16);
            CHECK(p.ret == kFixRet);
            CHECK(p.hloop == kFixLoop);
            CHECK(p.loop == kFixLoop);
            CHECK(p.lloop.empty());
            CHECK(p.oneloop == kFixOneLoop);
            CHECK(p.sym == kBottomSym);
            CHECK(p.lvl == 1);
            CHECK(p.budget_used.limit == 16);
            // Both systems keep growing stacks, so the bound always cuts.
            CHECK(!p.budget_used.frontier_exhausted);
        }
    }

    SUBCASE("two-letter words") {
        const BehaviorProfile& ph = oh.profile(bota, 16);
        CHECK(ph.ret == kFixRet);
        CHECK(ph.loop == kFixLoop);
        CHECK(ph.oneloop == kFixOneLoop);
        CHECK(ph.sym == "a");
        CHECK(ph.lvl == 2);
        // The pop2 edges add a direct exit once a popped letter is on top.
        const StatePairs popret{{"1", "0"}, {"2", "0"}};
        CHECK(on.profile(bota, 16).ret == popret);
        CHECK(on.profile(botb, 16).ret == popret);
        CHECK(on.profile(botb, 16).sym == "b");
        CHECK(on.profile(bota, 16).oneloop == kFixOneLoop);
    }

    SUBCASE("empty word and bad budgets") {
        const BehaviorProfile& p = oh.profile({}, 16);
        CHECK(p.ret.empty());
        CHECK(p.loop.empty());
        CHECK(p.oneloop.empty());
        CHECK(p.sym == "");
        CHECK(p.lvl == 0);
        CHECK_THROWS_AS(oh.profile(bot, 0), std::invalid_argument);
        CHECK_THROWS_AS(oh.profile(bot, -3), std::invalid_argument);
    }

    SUBCASE("links are zeroed before lookup") {
        Word linked_high{plain(kBottomSym), linked("a", 7)};
        CHECK(same_profile(oh.profile(linked_high, 16), oh.profile(bota, 16)));
    }

    SUBCASE("free function agrees with the oracle") {
        CHECK(same_profile(profile(h, bota, 16), oh.profile(bota, 16)));
    }
}

TEST_CASE("enumerated short runs agree with the profiles") {
    const CPS h = example_hague();
    const CPS n = example_nonelementary();
    const Word bot{plain(kBottomSym)};
    const Word bota{plain(kBottomSym), linked("a", 0)};

    struct Case {
        const CPS* sys;
        Word w;
        int depth;
    };
    for (const Case& c : {Case{&h, bot, 7}, Case{&h, bota, 7}, Case{&n, bot, 6}, Case{&n, bota, 6}}) {
        ProfileOracle oracle(*c.sys);
        const BehaviorProfile& p = oracle.profile(c.w, 16);
        CHECK(enumerate_pairs(*c.sys, two_copies(c.w), RunKind::Return, c.depth) == p.ret);
        CHECK(enumerate_pairs(*c.sys, single(c.w), RunKind::Loop, c.depth) == p.loop);
        CHECK(enumerate_pairs(*c.sys, single(c.w), RunKind::HighLoop, c.depth) == p.hloop);
        CHECK(enumerate_pairs(*c.sys, single(c.w), RunKind::LowLoop, c.depth) == p.lloop);
        CHECK(enumerate_pairs(*c.sys, single(c.w), RunKind::OneLoop, c.depth) == p.oneloop);
    }
}

TEST_CASE("profiles grow with the budget and stabilize") {
    const CPS h = example_hague();
    const CPS n = example_nonelementary();
    const Word bota{plain(kBottomSym), linked("a", 0)};

    SUBCASE("monotone in the budget") {
        ProfileOracle oracle(h);
        BehaviorProfile prev = oracle.profile(bota, 1);
        for (int b : {2, 4, 8, 16}) {
            const BehaviorProfile& cur = oracle.profile(bota, b);
            CHECK(profile_subset(prev, cur));
            CHECK(cur.budget_used.limit == b);
            prev = cur;
        }
    }

    SUBCASE("budget 16 equals budget 32 on short words") {
        for (const CPS* sys : {&h, &n}) {
            ProfileOracle oracle(*sys);
            for (const Word& w : canonical_words(sys->stack_alphabet, 4))
                CHECK(same_profile(oracle.profile(w, 16), oracle.profile(w, 32)));
        }
    }
}

TEST_CASE("the general decomposition covers arbitrary runs") {
    const CPS h = example_hague();
    std::mt19937 rng(1234);
    auto g = bfs_explore(h, initial_config(h), ExploreBounds{6, 5, 6});
    const std::vector<std::string> phases{"head", "down", "low", "up"};
    int tried = 0;
    for (const auto& c : g.vertices) {
        if (++tried > 40) break;
        Run rho = random_run(rng, h, c, 8);
        RunDecomposition d = decompose_run(h, rho, DecompScheme::General4);
        CHECK(d.ok);
        CHECK(d.kinds == phases);
        REQUIRE(d.cuts.size() == 5);
        CHECK(d.cuts.front() == 0);
        CHECK(d.cuts.back() == rho.length());
        CHECK(std::is_sorted(d.cuts.begin(), d.cuts.end()));
        // The three inner cuts sit at the floor width.
        int floor = rho.configs[d.cuts[2]].stack.width();
        CHECK(rho.configs[d.cuts[1]].stack.width() == floor);
        CHECK(rho.configs[d.cuts[3]].stack.width() == floor);
        for (const auto& cc : rho.configs) CHECK(cc.stack.width() >= floor);
    }
}

TEST_CASE("relation decompositions find their segment forms") {
    const CPS h = example_hague();

    SUBCASE("returns and collapse loops") {
        // A return one level down, then a 1-loop closed by a collapse two
        // levels down.
        Run rho = run_by_labels(h, cf("1 | _ : _ a^2@1 : _ a^2@1"),
                                {"A'", "Co", "Cl", "A'", "P", "Co"});
        CHECK(rho.back() == cf("0 | _"));
        RunDecomposition d = decompose_run(h, rho, DecompScheme::RelAForms);
        CHECK(d.ok);
        CHECK(d.cuts == std::vector<int>{0, 2, 6});
        CHECK(d.kinds == std::vector<std::string>{"return", "oneloop-collapse2"});
    }

    SUBCASE("single collapse segment") {
        Run rho = run_by_labels(h, cf("2 | _ : _ a^2@1"), {"Co"});
        RunDecomposition d = decompose_run(h, rho, DecompScheme::RelAForms);
        CHECK(d.ok);
        CHECK(d.kinds == std::vector<std::string>{"oneloop-collapse2"});
    }

    SUBCASE("pops separated by high loops") {
        Run rho = run_by_labels(h, cf("1 | _ : _ a^2@1 a^2@1"), {"A'", "P", "P", "P"});
        CHECK(rho.back() == cf("2 | _ : _"));
        RunDecomposition d = decompose_run(h, rho, DecompScheme::RelBHLoops);
        CHECK(d.ok);
        CHECK(d.cuts == std::vector<int>{0, 2, 3, 4});
        CHECK(d.kinds == std::vector<std::string>{"hloop", "pop", "pop"});
    }

    SUBCASE("a run touching the target early fails the pop scheme") {
        // Dips onto the target stack before the final step.
        const CPS low = toy_low_loop();
        Run rho = run_by_labels(low, Configuration{"l0", parse_stack("_ a")},
                                {"dn", "up", "dn"});
        CHECK(rho.back().stack == parse_stack("_"));
        RunDecomposition d = decompose_run(low, rho, DecompScheme::RelBHLoops);
        CHECK(!d.ok);
        CHECK(!d.reason.empty());
    }

    SUBCASE("pushes separated by high loops") {
        const CPS chain = toy_push_chain();
        Run rho = run_by_labels(chain, Configuration{"u0", parse_stack("_")},
                                {"up", "gu", "gd", "up"});
        RunDecomposition d = decompose_run(chain, rho, DecompScheme::RelCHLoops);
        CHECK(d.ok);
        CHECK(d.cuts == std::vector<int>{0, 1, 3, 4});
        CHECK(d.kinds == std::vector<std::string>{"push", "hloop", "push"});

        // A trailing high loop is allowed on the push side.
        Run tail = run_by_labels(chain, Configuration{"u0", parse_stack("_")},
                                 {"up", "gu", "gd"});
        RunDecomposition dt = decompose_run(chain, tail, DecompScheme::RelCHLoops);
        CHECK(dt.ok);
        CHECK(dt.cuts == std::vector<int>{0, 1, 3});
        CHECK(dt.kinds == std::vector<std::string>{"push", "hloop"});
    }

    SUBCASE("milestone steps with loops between") {
        Run rho = run_by_labels(h, cf("0 | _"), {"Cl", "A"});
        RunDecomposition d = decompose_run(h, rho, DecompScheme::RelDLoops);
        CHECK(d.ok);
        CHECK(d.cuts == std::vector<int>{0, 1, 2});
        CHECK(d.kinds == std::vector<std::string>{"step", "step"});

        Run looped = run_by_labels(h, cf("0 | _"), {"Cl", "A'", "P"});
        CHECK(looped.back() == cf("2 | _ : _"));
        RunDecomposition dl = decompose_run(h, looped, DecompScheme::RelDLoops);
        CHECK(dl.ok);
        CHECK(dl.cuts == std::vector<int>{0, 1, 3});
        CHECK(dl.kinds == std::vector<std::string>{"step", "loop"});
    }

    SUBCASE("wrong endpoints are rejected up front") {
        Run rho = run_by_labels(h, cf("0 | _"), {"Cl"});
        // The end is not reached from the start by pops alone.
        CHECK(!decompose_run(h, rho, DecompScheme::RelAForms).ok);
        CHECK(!decompose_run(h, rho, DecompScheme::RelBHLoops).ok);
    }
}

TEST_CASE("loops split into high low high phases") {
    const CPS low = toy_low_loop();
    const CPS rep = toy_repaired_exposure();
    const CPS h = example_hague();
    const Word bota{plain(kBottomSym), linked("a", 0)};
    const Word wa{plain(kBottomSym), plain("a")};

    struct Case {
        const CPS* sys;
        Word w;
    };
    for (const Case& c : {Case{&low, wa}, Case{&rep, wa}, Case{&h, bota}}) {
        for (const std::string& q : c.sys->states) {
            Run rho{{Configuration{q, single(c.w)}}, {}};
            auto note = [&](const Run& r) {
                if (!classify_run(*c.sys, r, RunKind::Loop).ok) return;
                if (classify_run(*c.sys, r, RunKind::HighLoop).ok) return;
                // Not a high loop: there must be exactly one way to cut it
                // into high loop, low loop, high loop.
                int n = r.length(), splits = 0;
                for (int i = 0; i <= n; ++i)
                    for (int j = i; j <= n; ++j)
                        if (classify_run(*c.sys, r.slice(0, i), RunKind::HighLoop).ok &&
                            classify_run(*c.sys, r.slice(i, j), RunKind::LowLoop).ok &&
                            classify_run(*c.sys, r.slice(j, n), RunKind::HighLoop).ok)
                            ++splits;
                CHECK(splits == 1);
            };
            walk_labelled_runs(*c.sys, rho, 6, note);
        }
    }
}

TEST_CASE("determination laws hold on sampled words") {
    const CPS h = example_hague();
    const CPS n = example_nonelementary();
    for (const CPS* sys : {&h, &n}) {
        std::vector<Word> words = canonical_words(sys->stack_alphabet, 4);
        DeterminationReport rep = check_determinations(*sys, words, 16);
        CHECK(rep.ok());
        CHECK(rep.checked >= static_cast<int>(words.size()));
        CHECK(rep.violations.empty());
    }
    const CPS low = toy_low_loop();
    std::vector<Word> words{{plain(kBottomSym)},
                            {plain(kBottomSym), plain("a")},
                            {plain(kBottomSym), plain("a"), plain("a")}};
    CHECK(check_determinations(low, words, 16).ok());
}

TEST_CASE("profile automaton merges words with equal profiles") {
    const CPS h = example_hague();
    const CPS n = example_nonelementary();

    SUBCASE("state counts") {
        // hague: bottom, the bottom word, and one class per letter level.
        ProfileAutomaton ah(h, 16);
        for (const Word& w : canonical_words(h.stack_alphabet, 4)) ah.run_word(w);
        CHECK(ah.size() == 4);
        // nonelementary adds pop2 exits for longer words, so the bottom word
        // stays separate and each (symbol, level) pair forms a class.
        ProfileAutomaton an(n, 16);
        for (const Word& w : canonical_words(n.stack_alphabet, 4)) an.run_word(w);
        CHECK(an.size() == 6);
    }

    SUBCASE("steps and representatives") {
        ProfileAutomaton a(h, 16);
        CHECK(a.bottom() == 0);
        int s1 = a.start();
        CHECK(s1 == a.step(a.bottom(), kBottomSym, 1));
        int s2 = a.step(s1, "a", 2);
        CHECK(s2 != s1);
        CHECK(a.step(s2, "a", 2) == s2);
        int s3 = a.step(s1, "a", 1);
        CHECK(s3 != s2);
        CHECK(a.step(s3, "a", 2) == s2);
        CHECK(a.state_profile(s1).ret == kFixRet);
        CHECK(a.state_profile(s2).sym == "a");
        CHECK(a.state_profile(s2).lvl == 2);
        CHECK(a.representative(s1) == Word{plain(kBottomSym)});
        CHECK(a.budget() == 16);
    }

    SUBCASE("words are link-zeroed before stepping") {
        ProfileAutomaton a(h, 16);
        CHECK(a.run_word(parse_word("_ a^2@5")) == a.run_word(parse_word("_ a^2@0")));
    }

    SUBCASE("bad letters throw") {
        ProfileAutomaton a(h, 16);
        CHECK_THROWS_AS(a.step(a.start(), "zz", 1), std::invalid_argument);
        CHECK_THROWS_AS(a.step(a.start(), kBottomSym, 1), std::invalid_argument);
        CHECK_THROWS_AS(a.step(a.start(), "a", 3), std::invalid_argument);
    }
}

TEST_CASE("step operation sets") {
    const CPS h = example_hague();
    Run rho = run_by_labels(h, cf("0 | _"), {"Cl", "A'"});
    CHECK(step_ops(h, rho, 0) == std::set<OpKind>{OpKind::Clone2});
    CHECK(step_ops(h, rho, 1) == std::set<OpKind>{OpKind::Push2});

    // A level-1 collapse acts exactly like pop1, so a step can be justified
    // by two different operations at once.
    const CPS twin = parse_cps(
        "states: x0 x1\n"
        "stack_alphabet: _ a\n"
        "input_alphabet: g\n"
        "initial: x0\n"
        "trans: x0 a g x1 pop1\n"
        "trans: x0 a g x1 collapse\n");
    Run amb{{Configuration{"x0", parse_stack("_ a")}, Configuration{"x1", parse_stack("_")}},
            {"g"}};
    CHECK(step_ops(twin, amb, 0) == std::set<OpKind>{OpKind::Pop1, OpKind::Collapse});

    // No transition justifies a clone labelled like a push.
    Run wrong{{cf("0 | _"), cf("0 | _ a^2@0")}, {"Cl"}};
    CHECK(step_ops(h, wrong, 0).empty());
}
