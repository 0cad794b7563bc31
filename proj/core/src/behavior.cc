/* behavior.cc -- run classifiers, run decompositions and top-word behavior profiles */
#include "cpg/behavior.hh"

#include <algorithm>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace cpg {

namespace {

// Expansions allowed per unit of budget in one profile search. The frontier
// of a growing system never empties, so this secondary bound keeps a search
// at a fixed budget deterministic and finite; monotone in the budget.
constexpr long kExpansionsPerBudget = 512;

Word pop1_word(const Word& w) {
    return Word(w.begin(), w.end() - 1);
}

Stack2 one_word(const Word& w) {
    Stack2 s;
    s.words.push_back(w);
    return s;
}

Stack2 drop_top(const Stack2& s) {
    Stack2 r = s;
    r.words.pop_back();
    return r;
}

/// k >= 0 such that x == Pop1^k(s), if any.
std::optional<int> pop1_power(const Stack2& x, const Stack2& s) {
    if (x.width() != s.width()) return std::nullopt;
    for (int i = 0; i + 1 < x.width(); ++i)
        if (x.words[i] != s.words[i]) return std::nullopt;
    if (!word_prefix(x.top2(), s.top2())) return std::nullopt;
    return static_cast<int>(s.top2().size() - x.top2().size());
}

std::optional<Stack2> pop2_power(Stack2 s, int k) {
    for (int i = 0; i < k; ++i) {
        if (s.width() < 2) return std::nullopt;
        s.words.pop_back();
    }
    return s;
}

bool has_op(const std::set<OpKind>& ops, OpKind k) {
    return ops.count(k) != 0;
}

/// Step i of rho is justified by Pop1 or by a level-1 Collapse.
bool pop1_style_step(const CPS& sys, const Run& rho, int i) {
    std::set<OpKind> ops = step_ops(sys, rho, i);
    if (has_op(ops, OpKind::Pop1)) return true;
    return has_op(ops, OpKind::Collapse) && lvl_of(rho.configs[i].stack) == 1;
}

std::string fail_at(const std::string& what, int i) {
    std::ostringstream os;
    os << what << " at index " << i;
    return os.str();
}

}  // namespace

const char* show_run_kind(RunKind k) {
    switch (k) {
        case RunKind::Return: return "return";
        case RunKind::Loop: return "loop";
        case RunKind::HighLoop: return "high-loop";
        case RunKind::LowLoop: return "low-loop";
        case RunKind::OneLoop: return "1-loop";
    }
    return "?";
}

const char* show_scheme(DecompScheme s) {
    switch (s) {
        case DecompScheme::General4: return "general4";
        case DecompScheme::RelAForms: return "relA-forms";
        case DecompScheme::RelBHLoops: return "relB-hloops";
        case DecompScheme::RelCHLoops: return "relC-hloops";
        case DecompScheme::RelDLoops: return "relD-loops";
    }
    return "?";
}

std::set<OpKind> step_ops(const CPS& sys, const Run& rho, std::size_t i) {
    std::set<OpKind> ops;
    if (i + 1 >= rho.configs.size() || i >= rho.labels.size()) return ops;
    const Configuration& from = rho.configs[i];
    const Configuration& to = rho.configs[i + 1];
    if (from.stack.words.empty() || from.stack.top2().empty()) return ops;
    for (const Transition& t : sys.transitions) {
        if (t.from != from.state || t.to != to.state) continue;
        if (t.label != rho.labels[i]) continue;
        if (t.top != sym_of(from.stack)) continue;
        auto r = apply_op(from.stack, t.op);
        if (r && *r == to.stack) ops.insert(t.op.kind);
    }
    return ops;
}

namespace {

/// Return checker: rho.configs[lo].stack must be the current level's source;
/// the target is fixed. Appends the re-entry chain on success and reports
/// the base clause through *base.
bool return_from(const CPS& sys, const Run& rho, int lo, std::vector<int>* chain,
                 std::string* base) {
    int n = rho.length();
    const Stack2& src = rho.configs[lo].stack;
    const Word& w = src.top2();
    // first clause: the run ends with a Pop2
    std::set<OpKind> last = step_ops(sys, rho, n - 1);
    if (has_op(last, OpKind::Pop2)) {
        *base = "final-pop2";
        return true;
    }
    // second clause: level-2 collapse whose pre-collapse top word properly
    // extends the current top word
    const Stack2& pre = rho.configs[n - 1].stack;
    if (has_op(last, OpKind::Collapse) && lvl_of(pre) == 2 &&
        word_prefix(w, pre.top2()) && pre.top2() != w) {
        *base = "final-collapse2";
        return true;
    }
    // third clause: the run reaches Pop1 of the source and returns from there
    if (w.size() < 2) return false;
    Stack2 down = src;
    down.words.back().pop_back();
    for (int i = lo + 1; i < n; ++i) {
        if (rho.configs[i].stack != down) continue;
        chain->push_back(i);
        if (return_from(sys, rho, i, chain, base)) return true;
        chain->pop_back();
    }
    return false;
}

RunCertificate classify_return(const CPS& sys, const Run& rho) {
    RunCertificate cert;
    int n = rho.length();
    const Stack2& t0 = rho.front().stack;
    if (t0.width() < 2) {
        cert.reason = "start must have width at least 2";
        return cert;
    }
    Stack2 s = drop_top(t0);
    if (rho.back().stack != s) {
        cert.reason = "run must end at the start minus its top word";
        return cert;
    }
    for (int i = 0; i < n; ++i) {
        if (substack_le(rho.configs[i].stack, s)) {
            cert.reason = fail_at("visits a substack of the target", i);
            return cert;
        }
    }
    std::string base;
    if (return_from(sys, rho, 0, &cert.cuts, &base)) {
        cert.ok = true;
        cert.reason = base;
    } else {
        cert.cuts.clear();
        cert.reason = "no clause matches the final step";
    }
    return cert;
}

RunCertificate classify_loop(const CPS& sys, const Run& rho, RunKind kind) {
    (void)sys;
    RunCertificate cert;
    int n = rho.length();
    const Stack2& s = rho.front().stack;
    if (rho.back().stack != s) {
        cert.reason = "endpoint stacks differ";
        return cert;
    }
    auto below = apply_op(s, pop2());
    const Word& w = s.top2();
    for (int i = 0; i <= n; ++i) {
        const Stack2& cur = rho.configs[i].stack;
        if (below && substack_le(cur, *below)) {
            cert.reason = fail_at("visits a substack of Pop2 of the start", i);
            return cert;
        }
        auto k = pop1_power(cur, s);
        if (k && *k >= 1) {
            for (int d = 0; d < *k; ++d) {
                if (w[w.size() - 1 - d].lvl != 1) {
                    cert.reason = fail_at("pops below a level-2 letter", i);
                    return cert;
                }
            }
        }
    }
    if (kind == RunKind::Loop) {
        cert.ok = true;
        return cert;
    }
    auto p1 = apply_op(s, pop1());
    if (kind == RunKind::HighLoop) {
        if (p1) {
            for (int i = 0; i <= n; ++i) {
                if (rho.configs[i].stack == *p1) {
                    cert.reason = fail_at("visits Pop1 of the start", i);
                    return cert;
                }
            }
        }
        cert.ok = true;
        return cert;
    }
    // low loop: the second and second-to-last stacks are Pop1 of the start
    if (!p1) {
        cert.reason = "Pop1 of the start is undefined";
        return cert;
    }
    if (n < 2) {
        cert.reason = "a low loop needs at least two steps";
        return cert;
    }
    if (rho.configs[1].stack != *p1 || rho.configs[n - 1].stack != *p1) {
        cert.reason = "second or second-to-last stack is not Pop1 of the start";
        return cert;
    }
    cert.ok = true;
    cert.cuts = {1, n - 1};
    return cert;
}

RunCertificate classify_oneloop(const CPS& sys, const Run& rho) {
    RunCertificate cert;
    int n = rho.length();
    const Stack2& start = rho.front().stack;
    const Word& w = start.top2();
    int floor = start.width() - 1;
    for (int i = 0; i <= n; ++i) {
        if (rho.configs[i].stack.width() <= floor) {
            cert.reason = fail_at("width drops onto the floor", i);
            return cert;
        }
    }
    const Stack2& end = rho.back().stack;
    for (int j = 0; j < floor; ++j) {
        if (end.words[j] != start.words[j]) {
            cert.reason = "end modifies a word below the start's top";
            return cert;
        }
    }
    if (end.top2() != w) {
        cert.reason = "end top word differs from the start top word";
        return cert;
    }
    // every exposure of Pop1 of the top word starts a completed return
    if (w.size() >= 2) {
        Word down = pop1_word(w);
        for (int i = 0; i <= n; ++i) {
            if (rho.configs[i].stack.top2() != down) continue;
            bool repaired = false;
            for (int j = i + 1; j <= n; ++j) {
                if (classify_run(sys, rho.slice(i, j), RunKind::Return).ok) {
                    cert.cuts.push_back(i);
                    cert.cuts.push_back(j);
                    repaired = true;
                    break;
                }
            }
            if (!repaired) {
                cert.reason = fail_at("unrepaired exposure of Pop1 of the top word", i);
                cert.cuts.clear();
                return cert;
            }
        }
    }
    cert.ok = true;
    return cert;
}

}  // namespace

RunCertificate classify_run(const CPS& sys, const Run& rho, RunKind kind) {
    RunCertificate cert;
    std::string why;
    if (!check_run(sys, rho, &why)) {
        cert.reason = "invalid run: " + why;
        return cert;
    }
    switch (kind) {
        case RunKind::Return: return classify_return(sys, rho);
        case RunKind::Loop:
        case RunKind::HighLoop:
        case RunKind::LowLoop: return classify_loop(sys, rho, kind);
        case RunKind::OneLoop: return classify_oneloop(sys, rho);
    }
    cert.reason = "unknown kind";
    return cert;
}

namespace {

RunDecomposition fail_decomp(const std::string& reason) {
    RunDecomposition d;
    d.reason = reason;
    return d;
}

RunDecomposition decompose_general4(const CPS& sys, const Run& rho) {
    (void)sys;
    int n = rho.length();
    const Stack2& s1 = rho.front().stack;
    const Stack2& s2 = rho.back().stack;
    // minimal visited substack of the start; substacks of one stack form a
    // chain, so (width, top word length) picks the minimum
    std::optional<Stack2> t;
    for (int i = 0; i <= n; ++i) {
        const Stack2& cur = rho.configs[i].stack;
        if (!substack_le(cur, s1)) continue;
        if (!t || cur.width() < t->width() ||
            (cur.width() == t->width() && cur.top2().size() < t->top2().size()))
            t = cur;
    }
    if (!t) return fail_decomp("run never visits a substack of its start");
    if (s2.width() < t->width())
        return fail_decomp("end is narrower than the minimal visited substack");
    auto m1 = pop2_power(s1, s1.width() - t->width());
    auto m2 = pop2_power(s2, s2.width() - t->width());
    if (!m1 || !m2) return fail_decomp("cannot align the floor width");
    int i1 = -1, i2 = -1, i3 = -1;
    for (int i = 0; i <= n; ++i) {
        const Stack2& cur = rho.configs[i].stack;
        if (i1 < 0 && cur == *m1) i1 = i;
        if (i2 < 0 && cur == *t) i2 = i;
        if (cur.width() == t->width()) i3 = i;
    }
    if (i1 < 0 || i2 < 0 || i3 < 0 || i1 > i2 || i2 > i3)
        return fail_decomp("cut points out of order");
    if (rho.configs[i3].stack != *m2)
        return fail_decomp("last floor visit is not the end's floor stack");
    for (int i = 0; i < i1; ++i)
        if (substack_le(rho.configs[i].stack, *m1))
            return fail_decomp(fail_at("head phase visits a substack of its target", i));
    for (int i = i1; i < i2; ++i)
        if (substack_le(rho.configs[i].stack, *t))
            return fail_decomp(fail_at("descent phase visits a substack of the floor", i));
    auto p1t = apply_op(*t, pop1());
    if (p1t) {
        for (int i = i2; i <= i3; ++i)
            if (substack_le(rho.configs[i].stack, *p1t))
                return fail_decomp(fail_at("floor phase drops below the floor", i));
    }
    for (int i = i3 + 1; i <= n; ++i)
        if (substack_le(rho.configs[i].stack, *m2))
            return fail_decomp(fail_at("rebuild phase visits a substack of its source", i));
    RunDecomposition d;
    d.ok = true;
    d.cuts = {0, i1, i2, i3, n};
    d.kinds = {"head", "down", "low", "up"};
    return d;
}

/// Segment-pattern search shared by the three relation witnesses. Each move
/// inspects a candidate segment [pos, j] and yields a successor DP state;
/// the concrete schemes plug in their segment tests below.
struct SegmentEdge {
    int to_pos;
    int aux;
    std::string kind;
};

RunDecomposition decompose_rel_a(const CPS& sys, const Run& rho) {
    int n = rho.length();
    const Stack2& s1 = rho.front().stack;
    const Stack2& s2 = rho.back().stack;
    int k = s1.width() - s2.width();
    auto down = k >= 0 ? pop2_power(s1, k) : std::nullopt;
    if (!down || *down != s2)
        return fail_decomp("end is not a Pop2 power of the start");
    for (int i = 0; i < n; ++i)
        if (substack_le(rho.configs[i].stack, s2))
            return fail_decomp(fail_at("visits a substack of the target", i));
    // DP over (position, pending): pending means a pop-style segment awaits
    // its repairing collapse segment, allowing only pop-style segments between
    int states = 2 * (n + 1);
    std::vector<int> prev(states, -2), prev_kind(states, -1);
    std::vector<std::string> kind_names = {"return", "oneloop-collapse2", "oneloop-pop1"};
    std::vector<int> queue = {0};
    prev[0] = -1;
    auto id = [&](int pos, int pending) { return 2 * pos + pending; };
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        int cur = queue[qi];
        int pos = cur / 2, pending = cur % 2;
        for (int j = pos + 1; j <= n; ++j) {
            std::vector<std::pair<int, int>> moves;  // (kind index, next pending)
            if (!pending && classify_run(sys, rho.slice(pos, j), RunKind::Return).ok)
                moves.push_back({0, 0});
            if (classify_run(sys, rho.slice(pos, j - 1), RunKind::OneLoop).ok) {
                std::set<OpKind> ops = step_ops(sys, rho, j - 1);
                int lvl = rho.configs[j - 1].stack.top2().empty()
                              ? 0
                              : lvl_of(rho.configs[j - 1].stack);
                if (has_op(ops, OpKind::Collapse) && lvl == 2) moves.push_back({1, 0});
                if (has_op(ops, OpKind::Pop1) ||
                    (has_op(ops, OpKind::Collapse) && lvl == 1))
                    moves.push_back({2, 1});
            }
            for (auto [ki, np] : moves) {
                int nx = id(j, np);
                if (prev[nx] != -2) continue;
                prev[nx] = cur;
                prev_kind[nx] = ki;
                queue.push_back(nx);
            }
        }
    }
    int goal = id(n, 0);
    if (prev[goal] == -2)
        return fail_decomp("no segmentation into returns and 1-loop descents");
    RunDecomposition d;
    d.ok = true;
    for (int cur = goal; cur != 0; cur = prev[cur]) {
        d.cuts.push_back(cur / 2);
        d.kinds.push_back(kind_names[prev_kind[cur]]);
    }
    d.cuts.push_back(0);
    std::reverse(d.cuts.begin(), d.cuts.end());
    std::reverse(d.kinds.begin(), d.kinds.end());
    return d;
}

RunDecomposition decompose_rel_b(const CPS& sys, const Run& rho) {
    int n = rho.length();
    const Stack2& s1 = rho.front().stack;
    const Stack2& s2 = rho.back().stack;
    auto k = pop1_power(s2, s1);
    if (!k) return fail_decomp("end is not a Pop1 power of the start");
    for (int i = 0; i < n; ++i)
        if (substack_le(rho.configs[i].stack, s2))
            return fail_decomp(fail_at("visits a substack of the target", i));
    if (n == 0) {
        RunDecomposition d;
        d.ok = true;
        d.cuts = {0};
        return d;
    }
    // DP over (position, pops, last segment was a pop)
    struct Node {
        int prev = -2;
        int kind = -1;
    };
    int per = *k + 1;
    std::vector<Node> dp(2 * (n + 1) * per);
    auto id = [&](int pos, int pops, int last) { return (pos * per + pops) * 2 + last; };
    std::vector<int> queue = {id(0, 0, 0)};
    dp[queue[0]].prev = -1;
    while (!queue.empty()) {
        int cur = queue.back();
        queue.pop_back();
        int last = cur % 2, pops = (cur / 2) % per, pos = cur / 2 / per;
        auto push = [&](int nx, int kind) {
            if (dp[nx].prev != -2) return;
            dp[nx].prev = cur;
            dp[nx].kind = kind;
            queue.push_back(nx);
        };
        (void)last;
        if (pos < n && pops < *k && pop1_style_step(sys, rho, pos) &&
            apply_op(rho.configs[pos].stack, pop1()) ==
                std::optional<Stack2>(rho.configs[pos + 1].stack))
            push(id(pos + 1, pops + 1, 1), 0);
        for (int j = pos + 1; j <= n; ++j)
            if (classify_run(sys, rho.slice(pos, j), RunKind::HighLoop).ok)
                push(id(j, pops, 0), 1);
    }
    int goal = id(n, *k, 1);
    if (dp[goal].prev == -2)
        return fail_decomp("no alternation of high loops and pop steps ending on a pop");
    RunDecomposition d;
    d.ok = true;
    std::vector<std::string> names = {"pop", "hloop"};
    for (int cur = goal; dp[cur].prev != -1; cur = dp[cur].prev) {
        d.cuts.push_back(cur / 2 / per);
        d.kinds.push_back(names[dp[cur].kind]);
    }
    d.cuts.push_back(0);
    std::reverse(d.cuts.begin(), d.cuts.end());
    std::reverse(d.kinds.begin(), d.kinds.end());
    return d;
}

RunDecomposition decompose_rel_c(const CPS& sys, const Run& rho) {
    int n = rho.length();
    const Stack2& s1 = rho.front().stack;
    const Stack2& s2 = rho.back().stack;
    auto k = pop1_power(s1, s2);
    if (!k) return fail_decomp("start is not a Pop1 power of the end");
    for (int i = 0; i <= n; ++i) {
        const Stack2& cur = rho.configs[i].stack;
        if (cur != s1 && substack_le(cur, s1))
            return fail_decomp(fail_at("drops strictly below the start", i));
    }
    struct Node {
        int prev = -2;
        int kind = -1;
    };
    int per = *k + 1;
    std::vector<Node> dp((n + 1) * per);
    auto id = [&](int pos, int pushes) { return pos * per + pushes; };
    std::vector<int> queue = {id(0, 0)};
    dp[queue[0]].prev = -1;
    while (!queue.empty()) {
        int cur = queue.back();
        queue.pop_back();
        int pushes = cur % per, pos = cur / per;
        auto push = [&](int nx, int kind) {
            if (dp[nx].prev != -2) return;
            dp[nx].prev = cur;
            dp[nx].kind = kind;
            queue.push_back(nx);
        };
        if (pos < n && pushes < *k) {
            std::set<OpKind> ops = step_ops(sys, rho, pos);
            if ((has_op(ops, OpKind::Push1) || has_op(ops, OpKind::Push2)) &&
                apply_op(rho.configs[pos + 1].stack, pop1()) ==
                    std::optional<Stack2>(rho.configs[pos].stack))
                push(id(pos + 1, pushes + 1), 0);
        }
        for (int j = pos + 1; j <= n; ++j)
            if (classify_run(sys, rho.slice(pos, j), RunKind::HighLoop).ok)
                push(id(j, pushes), 1);
    }
    int goal = id(n, *k);
    if (dp[goal].prev == -2)
        return fail_decomp("no alternation of high loops and push steps");
    RunDecomposition d;
    d.ok = true;
    std::vector<std::string> names = {"push", "hloop"};
    for (int cur = goal; dp[cur].prev != -1; cur = dp[cur].prev) {
        d.cuts.push_back(cur / per);
        d.kinds.push_back(names[dp[cur].kind]);
    }
    d.cuts.push_back(0);
    std::reverse(d.cuts.begin(), d.cuts.end());
    std::reverse(d.kinds.begin(), d.kinds.end());
    return d;
}

RunDecomposition decompose_rel_d(const CPS& sys, const Run& rho) {
    int n = rho.length();
    const Stack2& s1 = rho.front().stack;
    const Stack2& s2 = rho.back().stack;
    int k = s2.width() - s1.width();
    auto down = k >= 0 ? pop2_power(s2, k) : std::nullopt;
    if (!down || *down != s1)
        return fail_decomp("start is not a Pop2 power of the end");
    for (int i = 1; i <= n; ++i)
        if (substack_le(rho.configs[i].stack, s1))
            return fail_decomp(fail_at("revisits a substack of the start", i));
    MilestoneChain chain = milestones(s2, true);
    int start_ci = -1;
    for (std::size_t ci = 0; ci < chain.size(); ++ci)
        if (chain[ci] == s1) start_ci = static_cast<int>(ci);
    if (start_ci < 0) return fail_decomp("start is not a generalised milestone of the end");
    int end_ci = static_cast<int>(chain.size()) - 1;
    if (chain[end_ci] != s2) return fail_decomp("milestone chain does not end at the end stack");
    struct Node {
        int prev = -2;
        int kind = -1;
    };
    int per = end_ci - start_ci + 1;
    std::vector<Node> dp((n + 1) * per);
    auto id = [&](int pos, int ci) { return pos * per + (ci - start_ci); };
    std::vector<int> queue = {id(0, start_ci)};
    dp[queue[0]].prev = -1;
    while (!queue.empty()) {
        int cur = queue.back();
        queue.pop_back();
        int ci = cur % per + start_ci, pos = cur / per;
        auto push = [&](int nx, int kind) {
            if (dp[nx].prev != -2) return;
            dp[nx].prev = cur;
            dp[nx].kind = kind;
            queue.push_back(nx);
        };
        if (pos < n && ci < end_ci && rho.configs[pos + 1].stack == chain[ci + 1])
            push(id(pos + 1, ci + 1), 0);
        for (int j = pos + 1; j <= n; ++j)
            if (classify_run(sys, rho.slice(pos, j), RunKind::Loop).ok)
                push(id(j, ci), 1);
    }
    int goal = id(n, end_ci);
    if (dp[goal].prev == -2)
        return fail_decomp("no path through the generalised milestones with loops between");
    RunDecomposition d;
    d.ok = true;
    std::vector<std::string> names = {"step", "loop"};
    for (int cur = goal; dp[cur].prev != -1; cur = dp[cur].prev) {
        d.cuts.push_back(cur / per);
        d.kinds.push_back(names[dp[cur].kind]);
    }
    d.cuts.push_back(0);
    std::reverse(d.cuts.begin(), d.cuts.end());
    std::reverse(d.kinds.begin(), d.kinds.end());
    return d;
}

}  // namespace

RunDecomposition decompose_run(const CPS& sys, const Run& rho, DecompScheme scheme) {
    std::string why;
    if (!check_run(sys, rho, &why)) return fail_decomp("invalid run: " + why);
    switch (scheme) {
        case DecompScheme::General4: return decompose_general4(sys, rho);
        case DecompScheme::RelAForms: return decompose_rel_a(sys, rho);
        case DecompScheme::RelBHLoops: return decompose_rel_b(sys, rho);
        case DecompScheme::RelCHLoops: return decompose_rel_c(sys, rho);
        case DecompScheme::RelDLoops: return decompose_rel_d(sys, rho);
    }
    return fail_decomp("unknown scheme");
}

bool same_profile(const BehaviorProfile& a, const BehaviorProfile& b) {
    return a.ret == b.ret && a.loop == b.loop && a.hloop == b.hloop &&
           a.lloop == b.lloop && a.oneloop == b.oneloop && a.sym == b.sym &&
           a.lvl == b.lvl;
}

StatePairs compose_loop(const StatePairs& hloop, const StatePairs& lloop) {
    StatePairs out = hloop;
    for (const auto& [q, q1] : hloop)
        for (const auto& [a, q2] : lloop) {
            if (a != q1) continue;
            for (const auto& [b, q3] : hloop)
                if (b == q2) out.insert({q, q3});
        }
    return out;
}

ProfileOracle::ProfileOracle(const CPS& sys) : sys_(sys) {
    std::string why;
    if (!valid_cps(sys_, &why))
        throw std::invalid_argument("ProfileOracle: invalid system: " + why);
    if (sys_.states.size() > 64)
        throw std::invalid_argument("ProfileOracle: at most 64 states supported");
    for (const std::string& q : sys_.states) {
        state_ids_.emplace(q, static_cast<int>(state_names_.size()));
        state_names_.push_back(q);
    }
    for (const std::string& s : sys_.stack_alphabet) {
        sym_ids_.emplace(s, static_cast<int>(sym_names_.size()));
        sym_names_.push_back(s);
    }
    edges_.assign(state_names_.size(),
                  std::vector<std::vector<Edge>>(sym_names_.size()));
    for (const Transition& t : sys_.transitions) {
        bool push = t.op.kind == OpKind::Push1 || t.op.kind == OpKind::Push2;
        if (push && t.op.sym == kBottomSym) continue;  // never applicable
        edges_[state_ids_.at(t.from)][sym_ids_.at(t.top)].push_back(
            Edge{state_ids_.at(t.to), t.op.kind, push ? sym_ids_.at(t.op.sym) : -1});
    }
}

const BehaviorProfile& ProfileOracle::profile(const Word& w, int budget) {
    if (budget <= 0) throw std::invalid_argument("profile: budget must be positive");
    Word w0 = down0(w);
    if (!w0.empty()) {
        std::string why;
        if (!valid_stack(one_word(w0), &why))
            throw std::invalid_argument("profile: invalid word: " + why);
    }
    auto key = std::make_pair(w0, budget);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    BehaviorProfile p = compute(w0, budget);
    return memo_.emplace(std::move(key), std::move(p)).first->second;
}

BehaviorProfile ProfileOracle::compute(const Word& w, int budget) {
    BehaviorProfile p;
    p.budget_used.limit = budget;
    if (w.empty()) return p;
    p.sym = w.back().sym;
    p.lvl = w.back().lvl;
    const BehaviorProfile& sub = profile(pop1_word(w), budget);
    SearchStats st;
    st.exhausted = sub.budget_used.frontier_exhausted;
    p.ret = search_pairs(SearchMode::Ret, w, budget, sub.ret, &st);
    p.hloop = search_pairs(SearchMode::HLoop, w, budget, sub.ret, &st);
    p.lloop = lloop_pairs(w, sub.loop);
    p.loop = compose_loop(p.hloop, p.lloop);
    p.oneloop = search_pairs(SearchMode::OneLoop, w, budget, p.ret, &st);
    p.budget_used.deepest_hit = st.deepest;
    p.budget_used.frontier_exhausted = st.exhausted;
    return p;
}

namespace {

/// Interned state of one profile search. Words and stacks are tries over
/// dense ids: a word is its parent word plus one letter, a stack its parent
/// stack plus a top word. Every node keeps the invariant that each of its
/// words extends the base word, so membership never needs a prefix check:
/// the only ops that could break it are Pop1-style steps on a top word
/// equal to the base word, and those are exactly the summary-jump entries.
struct SearchSpace {
    struct WordNode {
        int parent;
        int len;
        int sym;
        int lvl;
        int lnk;
    };
    struct StackNode {
        int parent;
        int word;
        int width;
    };

    std::vector<WordNode> words;
    std::vector<StackNode> stacks;
    std::map<std::tuple<int, int, int, int>, int> word_child;
    std::map<std::pair<int, int>, int> stack_child;
    int nstates;
    std::vector<std::uint64_t> seen;            ///< (stack, state) -> source mask
    std::vector<std::pair<int, int>> frontier;  ///< (state, stack)

    explicit SearchSpace(int nq) : nstates(nq) {}

    int intern_word(int parent, int sym, int lvl, int lnk) {
        auto [it, ins] = word_child.try_emplace(std::make_tuple(parent, sym, lvl, lnk),
                                                static_cast<int>(words.size()));
        if (ins)
            words.push_back({parent, parent < 0 ? 1 : words[parent].len + 1, sym, lvl, lnk});
        return it->second;
    }

    int intern_stack(int parent, int word) {
        auto [it, ins] = stack_child.try_emplace({parent, word},
                                                 static_cast<int>(stacks.size()));
        if (ins) {
            stacks.push_back({parent, word, parent < 0 ? 1 : stacks[parent].width + 1});
            seen.resize(stacks.size() * nstates, 0);
        }
        return it->second;
    }

    /// Merges mask into the node, returning true when it grew.
    bool reach(int state, int stack, std::uint64_t mask) {
        std::uint64_t& cell = seen[static_cast<std::size_t>(stack) * nstates + state];
        if ((cell | mask) == cell) return false;
        cell |= mask;
        return true;
    }
};

}  // namespace

StatePairs ProfileOracle::search_pairs(SearchMode mode, const Word& w, int budget,
                                       const StatePairs& jump_pairs, SearchStats* st) {
    int nq = static_cast<int>(state_names_.size());
    std::vector<std::vector<int>> jump(nq);
    for (const auto& [a, b] : jump_pairs)
        jump[state_ids_.at(a)].push_back(state_ids_.at(b));
    SearchSpace f(nq);
    int w_id = -1;
    for (const Letter& l : w) w_id = f.intern_word(w_id, sym_ids_.at(l.sym), l.lvl, l.lnk);
    int base_sid = f.intern_stack(-1, w_id);
    int start_sid = mode == SearchMode::Ret ? f.intern_stack(base_sid, w_id) : base_sid;
    std::vector<std::uint64_t> acc(nq, 0);  // pairs found, sources by target state
    for (int q = 0; q < nq; ++q) {
        f.reach(q, start_sid, std::uint64_t{1} << q);
        f.frontier.push_back({q, start_sid});
        if (mode != SearchMode::Ret) acc[q] |= std::uint64_t{1} << q;
    }
    auto note = [&](std::uint64_t mask, int to, int depth) {
        if ((acc[to] | mask) != acc[to]) {
            acc[to] |= mask;
            st->deepest = std::max(st->deepest, depth);
        }
    };
    // a successor stack becomes a node, and an accepting one where the mode
    // says so: hloop accepts the bare base stack, oneloop any stack whose
    // top word is the base word again
    long cap = kExpansionsPerBudget * static_cast<long>(budget);
    long used = 0;
    bool cut = false;
    for (int depth = 1; depth <= budget && !f.frontier.empty() && !cut; ++depth) {
        std::vector<std::pair<int, int>> next;
        for (std::size_t fi = 0; fi < f.frontier.size() && !cut; ++fi) {
            auto [q, sid] = f.frontier[fi];
            if (++used > cap) {
                cut = true;
                break;
            }
            std::uint64_t mask = f.seen[static_cast<std::size_t>(sid) * nq + q];
            int tw = f.stacks[sid].word;
            int parent = f.stacks[sid].parent;
            int width = f.stacks[sid].width;
            SearchSpace::WordNode twn = f.words[tw];
            auto node = [&](int rid, int to) {
                if (mode == SearchMode::HLoop && rid == base_sid) note(mask, to, depth);
                if (mode == SearchMode::OneLoop && f.stacks[rid].word == w_id)
                    note(mask, to, depth);
                if (f.reach(to, rid, mask)) next.push_back({to, rid});
            };
            for (const Edge& e : edges_[q][twn.sym]) {
                switch (e.kind) {
                    case OpKind::Push1:
                        node(f.intern_stack(parent, f.intern_word(tw, e.sym, 1, 0)), e.to);
                        break;
                    case OpKind::Push2:
                        node(f.intern_stack(parent, f.intern_word(tw, e.sym, 2, width - 1)),
                             e.to);
                        break;
                    case OpKind::Clone2:
                        node(f.intern_stack(sid, tw), e.to);
                        break;
                    case OpKind::Pop2: {
                        if (width <= 1) break;
                        if (mode == SearchMode::Ret && width == 2) {
                            note(mask, e.to, depth);
                            break;
                        }
                        node(parent, e.to);
                        break;
                    }
                    case OpKind::Pop1:
                    case OpKind::Collapse: {
                        if (e.kind == OpKind::Collapse && twn.lvl == 2) {
                            int k = twn.lnk;
                            if (k <= 0 || k >= width) break;
                            if (mode == SearchMode::Ret && k == 1) {
                                // landing on the bare base word; the final
                                // top word must properly extend it
                                if (tw != w_id) note(mask, e.to, depth);
                                break;
                            }
                            int p = sid;
                            for (int i = width; i > k; --i) p = f.stacks[p].parent;
                            node(p, e.to);
                            break;
                        }
                        if (twn.len <= 1) break;
                        if (tw == w_id) {
                            // pops into the base word leave the search space;
                            // they are legal only as the first step of a
                            // completed descent, summarized via jump_pairs
                            if (mode == SearchMode::OneLoop) break;
                            if (width < 2) break;
                            for (int land : jump[e.to]) {
                                if (mode == SearchMode::Ret && width == 2) {
                                    note(mask, land, depth);
                                    continue;
                                }
                                node(parent, land);
                            }
                            break;
                        }
                        node(f.intern_stack(parent, twn.parent), e.to);
                        break;
                    }
                }
            }
            // a completed return of the current top word, in one summary step
            if (mode == SearchMode::OneLoop && width >= 2 && tw == w_id)
                for (int land : jump[q]) node(parent, land);
        }
        f.frontier = std::move(next);
    }
    if (cut || !f.frontier.empty()) st->exhausted = false;
    StatePairs out;
    for (int to = 0; to < nq; ++to)
        for (int src = 0; src < nq; ++src)
            if ((acc[to] >> src) & 1) out.insert({state_names_[src], state_names_[to]});
    return out;
}

StatePairs ProfileOracle::lloop_pairs(const Word& w, const StatePairs& sub_loop) const {
    StatePairs out;
    if (w.size() < 2 || w.back().lvl != 1) return out;
    Stack2 base = one_word(w);
    Stack2 mid = one_word(pop1_word(w));
    std::vector<StatePair> first, last;
    for (const Transition& t : sys_.transitions) {
        if (t.top == sym_of(base) && apply_op(base, t.op) == std::optional<Stack2>(mid))
            first.push_back({t.from, t.to});
        if (t.top == sym_of(mid) && apply_op(mid, t.op) == std::optional<Stack2>(base))
            last.push_back({t.from, t.to});
    }
    for (const auto& [q, q1] : first)
        for (const auto& [a, q2] : sub_loop) {
            if (a != q1) continue;
            for (const auto& [b, qf] : last)
                if (b == q2) out.insert({q, qf});
        }
    return out;
}

BehaviorProfile profile(const CPS& sys, const Word& w0, int budget) {
    ProfileOracle oracle(sys);
    return oracle.profile(w0, budget);
}

ProfileAutomaton::ProfileAutomaton(const CPS& sys, int budget)
    : oracle_(sys), budget_(budget) {
    if (budget <= 0)
        throw std::invalid_argument("ProfileAutomaton: budget must be positive");
    reps_.push_back({});
    profiles_.push_back(oracle_.profile({}, budget));
}

int ProfileAutomaton::start() { return step(0, kBottomSym, 1); }

int ProfileAutomaton::step(int state, const std::string& sym, int lvl) {
    if (state < 0 || state >= static_cast<int>(reps_.size()))
        throw std::invalid_argument("ProfileAutomaton: no such state");
    if (lvl != 1 && lvl != 2)
        throw std::invalid_argument("ProfileAutomaton: level must be 1 or 2");
    if (!oracle_.system().has_stack_symbol(sym))
        throw std::invalid_argument("ProfileAutomaton: unknown stack symbol " + sym);
    if ((sym == kBottomSym) != (state == 0))
        throw std::invalid_argument(
            "ProfileAutomaton: the bottom symbol starts the word and appears nowhere else");
    if (sym == kBottomSym && lvl != 1)
        throw std::invalid_argument("ProfileAutomaton: the bottom letter has level 1");
    auto key = std::make_tuple(state, sym, lvl);
    auto it = delta_.find(key);
    if (it != delta_.end()) return it->second;
    Word w = reps_[state];
    w.push_back(Letter{sym, lvl, 0});
    int to = state_of(w);
    delta_.emplace(std::move(key), to);
    return to;
}

int ProfileAutomaton::run_word(const Word& w) {
    Word w0 = down0(w);
    int state = 0;
    for (const Letter& l : w0) state = step(state, l.sym, l.lvl);
    return state;
}

const BehaviorProfile& ProfileAutomaton::state_profile(int id) const {
    if (id < 0 || id >= static_cast<int>(profiles_.size()))
        throw std::invalid_argument("ProfileAutomaton: no such state");
    return profiles_[id];
}

const Word& ProfileAutomaton::representative(int id) const {
    if (id < 0 || id >= static_cast<int>(reps_.size()))
        throw std::invalid_argument("ProfileAutomaton: no such state");
    return reps_[id];
}

int ProfileAutomaton::state_of(const Word& w0) {
    BehaviorProfile p = oracle_.profile(w0, budget_);
    for (std::size_t i = 0; i < profiles_.size(); ++i)
        if (same_profile(profiles_[i], p)) return static_cast<int>(i);
    reps_.push_back(w0);
    profiles_.push_back(std::move(p));
    return static_cast<int>(profiles_.size()) - 1;
}

namespace {

std::string show_pairs_key(const StatePairs& ps) {
    std::ostringstream os;
    for (const auto& [a, b] : ps) os << a << "," << b << ";";
    return os.str();
}

}  // namespace

DeterminationReport check_determinations(const CPS& sys,
                                         const std::vector<Word>& sample_words,
                                         int budget) {
    DeterminationReport rep;
    ProfileOracle oracle(sys);
    std::set<Word> words;
    for (const Word& w : sample_words) {
        Word w0 = down0(w);
        if (w0.empty() || !valid_stack(one_word(w0), nullptr)) continue;
        words.insert(std::move(w0));
    }
    struct Info {
        const BehaviorProfile* p;
        const BehaviorProfile* sub;
    };
    std::map<Word, Info> info;
    for (const Word& w : words) {
        const BehaviorProfile& p = oracle.profile(w, budget);
        const BehaviorProfile& sub = oracle.profile(pop1_word(w), budget);
        info.emplace(w, Info{&p, &sub});
    }
    auto top = [](const Word& w) {
        std::ostringstream os;
        os << w.back().sym << "/" << w.back().lvl;
        return os.str();
    };
    auto run_rule = [&](const std::string& rule, auto det, auto set_of) {
        std::map<std::string, Word> firsts;
        for (const Word& w : words) {
            auto [it, ins] = firsts.try_emplace(det(w), w);
            if (ins) continue;
            ++rep.checked;
            if (set_of(info.at(it->second)) != set_of(info.at(w)))
                rep.violations.push_back({rule, it->second, w});
        }
    };
    run_rule(
        "ret",
        [&](const Word& w) { return show_pairs_key(info.at(w).sub->ret) + "|" + top(w); },
        [](const Info& i) { return i.p->ret; });
    run_rule(
        "hloop",
        [&](const Word& w) { return show_pairs_key(info.at(w).sub->ret) + "|" + top(w); },
        [](const Info& i) { return i.p->hloop; });
    run_rule(
        "lloop",
        [&](const Word& w) {
            std::string below = w.size() >= 2 ? w[w.size() - 2].sym : "";
            return top(w) + "|" + below + "|" + show_pairs_key(info.at(w).sub->loop);
        },
        [](const Info& i) { return i.p->lloop; });
    run_rule(
        "oneloop",
        [&](const Word& w) { return show_pairs_key(info.at(w).p->ret) + "|" + top(w); },
        [](const Info& i) { return i.p->oneloop; });
    for (const Word& w : words) {
        ++rep.checked;
        const Info& i = info.at(w);
        if (i.p->loop != compose_loop(i.p->hloop, i.p->lloop))
            rep.violations.push_back({"loop-identity", w, {}});
    }
    return rep;
}

}  // namespace cpg
