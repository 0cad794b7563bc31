/* cps.cc -- collapsible pushdown systems, runs, bounded exploration */

#include "cpg/cps.hh"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cpg {

namespace {

bool contains(const std::vector<std::string>& xs, const std::string& x) {
    return std::find(xs.begin(), xs.end(), x) != xs.end();
}

std::vector<std::string> tokenize(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

[[noreturn]] void parse_fail(size_t lineno, const std::string& msg) {
    throw std::runtime_error("line " + std::to_string(lineno) + ": " + msg);
}

void sort_unique(std::vector<std::string>& xs) {
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
}

}  // namespace

bool CPS::has_state(const std::string& q) const { return contains(states, q); }
bool CPS::has_stack_symbol(const std::string& s) const { return contains(stack_alphabet, s); }
bool CPS::has_label(const std::string& g) const { return contains(input_alphabet, g); }

bool valid_cps(const CPS& sys, std::string* why) {
    auto fail = [&](const std::string& m) {
        if (why) *why = m;
        return false;
    };
    if (sys.states.empty()) return fail("no states");
    if (!sys.has_state(sys.initial_state)) return fail("unknown initial state");
    if (!sys.has_stack_symbol(kBottomSym)) return fail("stack alphabet lacks the bottom symbol");
    if (!sys.has_label(kEpsLabel)) return fail("input alphabet lacks the silent label");
    for (const Transition& t : sys.transitions) {
        if (!sys.has_state(t.from) || !sys.has_state(t.to))
            return fail("transition uses an unknown state");
        if (!sys.has_stack_symbol(t.top)) return fail("transition tests an unknown top symbol");
        if (!sys.has_label(t.label)) return fail("transition uses an unknown label");
        if (t.op.kind == OpKind::Push1 || t.op.kind == OpKind::Push2) {
            if (!sys.has_stack_symbol(t.op.sym) || t.op.sym == kBottomSym)
                return fail("push of a symbol outside the pushable alphabet");
        }
    }
    return true;
}

Configuration initial_config(const CPS& sys) { return Configuration{sys.initial_state, bottom_stack()}; }

Run Run::slice(int i, int j) const {
    if (i < 0 || j < i || j >= static_cast<int>(configs.size()))
        throw std::invalid_argument("Run::slice: bad range");
    Run r;
    r.configs.assign(configs.begin() + i, configs.begin() + j + 1);
    r.labels.assign(labels.begin() + i, labels.begin() + j);
    return r;
}

bool check_run(const CPS& sys, const Run& rho, std::string* why) {
    auto fail = [&](const std::string& m) {
        if (why) *why = m;
        return false;
    };
    if (rho.configs.empty()) return fail("a run needs at least one configuration");
    if (rho.labels.size() + 1 != rho.configs.size()) return fail("label count mismatch");
    for (size_t i = 0; i < rho.labels.size(); ++i) {
        const Configuration& c = rho.configs[i];
        const Configuration& d = rho.configs[i + 1];
        bool ok = false;
        for (const Transition& t : sys.transitions) {
            if (t.from != c.state || t.label != rho.labels[i] || t.to != d.state) continue;
            if (t.top != sym_of(c.stack)) continue;
            auto r = apply_op(c.stack, t.op);
            if (r && *r == d.stack) {
                ok = true;
                break;
            }
        }
        if (!ok) return fail("step " + std::to_string(i) + " is not justified by any transition");
    }
    return true;
}

std::vector<std::pair<std::string, Configuration>> successors(const CPS& sys,
                                                              const Configuration& c) {
    std::vector<std::pair<std::string, Configuration>> out;
    const std::string& top = sym_of(c.stack);
    for (const Transition& t : sys.transitions) {
        if (t.from != c.state || t.top != top) continue;
        auto r = apply_op(c.stack, t.op);
        if (!r) continue;
        out.emplace_back(t.label, Configuration{t.to, std::move(*r)});
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::optional<int> ExploredGraph::index_of(const Configuration& c) const {
    for (size_t i = 0; i < vertices.size(); ++i)
        if (vertices[i] == c) return static_cast<int>(i);
    return std::nullopt;
}

ExploredGraph bfs_explore(const CPS& sys, const Configuration& c0, const ExploreBounds& bounds) {
    ExploredGraph g;
    g.bounds = bounds;
    std::map<Configuration, int> index;

    auto within = [&](const Configuration& c) {
        if (c.stack.width() > bounds.max_width) return false;
        for (const Word& w : c.stack.words)
            if (static_cast<int>(w.size()) > bounds.max_height) return false;
        return true;
    };
    if (!within(c0)) {
        g.truncated = true;
        return g;
    }
    index[c0] = 0;
    g.vertices.push_back(c0);
    g.depth.push_back(0);
    for (size_t at = 0; at < g.vertices.size(); ++at) {
        const int d = g.depth[at];
        if (d >= bounds.max_steps) {
            // Unexpanded frontier vertices may hide further configurations.
            if (!successors(sys, g.vertices[at]).empty()) g.truncated = true;
            continue;
        }
        const Configuration c = g.vertices[at];
        for (auto& [label, succ] : successors(sys, c)) {
            if (!within(succ)) {
                g.truncated = true;
                continue;
            }
            auto it = index.find(succ);
            int j;
            if (it == index.end()) {
                j = static_cast<int>(g.vertices.size());
                index.emplace(succ, j);
                g.vertices.push_back(succ);
                g.depth.push_back(d + 1);
            } else {
                j = it->second;
            }
            g.edges.emplace_back(static_cast<int>(at), label, j);
        }
    }
    return g;
}

namespace {

// Subset simulation machinery for WordNFA; desk-scale automata fit in a
// 64-bit mask.
struct NfaSim {
    std::map<std::string, int> id;
    uint64_t initial = 0;
    uint64_t finals = 0;
    std::map<std::string, std::vector<std::pair<int, int>>> by_label;

    explicit NfaSim(const WordNFA& nfa) {
        if (nfa.states.size() > 64)
            throw std::invalid_argument("word automaton too large for subset simulation");
        for (const auto& s : nfa.states)
            id.emplace(s, static_cast<int>(id.size()));
        initial = uint64_t{1} << id.at(nfa.initial);
        for (const auto& f : nfa.finals) finals |= uint64_t{1} << id.at(f);
        for (const auto& [p, a, q] : nfa.transitions)
            by_label[a].emplace_back(id.at(p), id.at(q));
    }

    uint64_t step(uint64_t mask, const std::string& a) const {
        auto it = by_label.find(a);
        if (it == by_label.end()) return 0;
        uint64_t out = 0;
        for (auto [p, q] : it->second)
            if (mask & (uint64_t{1} << p)) out |= uint64_t{1} << q;
        return out;
    }
};

}  // namespace

bool WordNFA::accepts_word(const std::vector<std::string>& word) const {
    NfaSim sim(*this);
    uint64_t mask = sim.initial;
    for (const auto& a : word) {
        mask = sim.step(mask, a);
        if (!mask) return false;
    }
    return (mask & sim.finals) != 0;
}

bool valid_word_nfa(const WordNFA& nfa, std::string* why) {
    auto fail = [&](const std::string& m) {
        if (why) *why = m;
        return false;
    };
    if (nfa.states.empty()) return fail("no states");
    if (!contains(nfa.states, nfa.initial)) return fail("unknown initial state");
    for (const auto& f : nfa.finals)
        if (!contains(nfa.states, f)) return fail("unknown final state");
    for (const auto& [p, a, q] : nfa.transitions) {
        if (!contains(nfa.states, p) || !contains(nfa.states, q))
            return fail("transition uses an unknown state");
        if (!contains(nfa.alphabet, a)) return fail("transition uses an unknown letter");
    }
    return true;
}

std::optional<Run> witness_run(const CPS& sys, const Configuration& c1, const Configuration& c2,
                               const std::optional<WordNFA>& lang, int max_steps) {
    std::optional<NfaSim> sim;
    if (lang) sim.emplace(*lang);
    const uint64_t mask0 = sim ? sim->initial : 1;

    struct Node {
        Configuration config;
        uint64_t mask;
        int parent;
        std::string label;
    };
    std::vector<Node> nodes{{c1, mask0, -1, ""}};
    std::vector<int> depth{0};
    std::set<std::pair<Configuration, uint64_t>> seen{{c1, mask0}};

    auto accepting = [&](const Node& n) {
        if (!(n.config == c2)) return false;
        return !sim || (n.mask & sim->finals) != 0;
    };
    auto build = [&](int at) {
        std::vector<Configuration> configs;
        std::vector<std::string> labels;
        for (int i = at; i != -1; i = nodes[i].parent) {
            configs.push_back(nodes[i].config);
            if (nodes[i].parent != -1) labels.push_back(nodes[i].label);
        }
        std::reverse(configs.begin(), configs.end());
        std::reverse(labels.begin(), labels.end());
        return Run{std::move(configs), std::move(labels)};
    };

    if (accepting(nodes[0])) return build(0);
    for (size_t at = 0; at < nodes.size(); ++at) {
        if (depth[at] >= max_steps) continue;
        const Node n = nodes[at];
        for (auto& [label, succ] : successors(sys, n.config)) {
            uint64_t mask = n.mask;
            if (sim) {
                mask = sim->step(mask, label);
                if (!mask) continue;
            }
            if (!seen.emplace(succ, mask).second) continue;
            nodes.push_back(Node{succ, mask, static_cast<int>(at), label});
            depth.push_back(depth[at] + 1);
            if (accepting(nodes.back())) return build(static_cast<int>(nodes.size()) - 1);
        }
    }
    return std::nullopt;
}

std::string product_state(const std::string& q, const std::string& p) { return q + "," + p; }

CPS product_word_nfa(const CPS& sys, const WordNFA& nfa) {
    std::vector<std::string> g1 = sys.input_alphabet;
    std::vector<std::string> g2 = nfa.alphabet;
    if (!contains(g2, kEpsLabel)) g2.push_back(kEpsLabel);
    sort_unique(g1);
    sort_unique(g2);
    if (g1 != g2) throw std::invalid_argument("product_word_nfa: input alphabets differ");

    CPS out;
    out.stack_alphabet = sys.stack_alphabet;
    out.input_alphabet = sys.input_alphabet;
    for (const auto& q : sys.states)
        for (const auto& p : nfa.states) out.states.push_back(product_state(q, p));
    out.initial_state = product_state(sys.initial_state, nfa.initial);
    for (const Transition& t : sys.transitions)
        for (const auto& [p, a, p2] : nfa.transitions) {
            if (a != t.label) continue;
            out.transitions.push_back(Transition{product_state(t.from, p), t.top, t.label,
                                                 product_state(t.to, p2), t.op});
        }
    std::sort(out.transitions.begin(), out.transitions.end());
    out.transitions.erase(std::unique(out.transitions.begin(), out.transitions.end()),
                          out.transitions.end());
    return out;
}

namespace {

const char* kHagueText = R"(# three-state clone/push/collapse cycle
states: 0 1 2
stack_alphabet: _ a
input_alphabet: Cl A A' P Co
initial: 0
trans: 0 * Cl 1 clone2
trans: 1 * A 0 push a 2
trans: 1 * A' 2 push a 2
trans: 2 a P 2 pop1
trans: 2 a Co 0 collapse
)";

const char* kNonelementaryText = R"(# clone/push/collapse cycle over two letters with pop2
states: 0 1 2
stack_alphabet: _ a b
input_alphabet: Cl A A' P Co P2
initial: 0
trans: 0 * Cl 1 clone2
trans: 1 * A 0 push a 2
trans: 1 * A' 2 push a 2
trans: 2 a P 2 pop1
trans: 2 a Co 0 collapse
trans: 2 a P2 0 pop2
trans: 1 * A 0 push b 2
trans: 1 * A' 2 push b 2
trans: 2 b P 2 pop1
trans: 2 b Co 0 collapse
trans: 2 b P2 0 pop2
)";

}  // namespace

CPS example_hague() { return parse_cps(kHagueText); }
CPS example_nonelementary() { return parse_cps(kNonelementaryText); }

namespace {

StackOp parse_op(const std::vector<std::string>& toks, size_t at, size_t lineno) {
    const size_t rest = toks.size() - at;
    const std::string& head = toks[at];
    if (head == "push") {
        if (rest != 3) parse_fail(lineno, "push needs a symbol and a level");
        if (toks[at + 2] == "1") return push1(toks[at + 1]);
        if (toks[at + 2] == "2") return push2(toks[at + 1]);
        parse_fail(lineno, "push level must be 1 or 2");
    }
    if (rest != 1) parse_fail(lineno, "trailing tokens after operation");
    if (head == "clone2") return clone2();
    if (head == "pop1") return pop1();
    if (head == "pop2") return pop2();
    if (head == "collapse") return collapse();
    parse_fail(lineno, "unknown operation '" + head + "'");
}

/// Strips a '#' comment and splits the remainder; empty result means the
/// line carries no content.
std::vector<std::string> content_tokens(std::string line) {
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    return tokenize(line);
}

}  // namespace

CPS parse_cps(const std::string& text) {
    CPS sys;
    std::vector<std::pair<size_t, std::vector<std::string>>> trans_lines;
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    bool saw_initial = false;
    while (std::getline(in, line)) {
        ++lineno;
        auto toks = content_tokens(line);
        if (toks.empty()) continue;
        const std::string key = toks[0];
        toks.erase(toks.begin());
        if (key == "states:") {
            sys.states.insert(sys.states.end(), toks.begin(), toks.end());
        } else if (key == "stack_alphabet:") {
            sys.stack_alphabet.insert(sys.stack_alphabet.end(), toks.begin(), toks.end());
        } else if (key == "input_alphabet:") {
            sys.input_alphabet.insert(sys.input_alphabet.end(), toks.begin(), toks.end());
        } else if (key == "initial:") {
            if (toks.size() != 1) parse_fail(lineno, "initial: needs exactly one state");
            sys.initial_state = toks[0];
            saw_initial = true;
        } else if (key == "trans:") {
            trans_lines.emplace_back(lineno, toks);
        } else {
            parse_fail(lineno, "unknown directive '" + key + "'");
        }
    }
    if (!saw_initial) throw std::runtime_error("missing initial: line");
    if (!contains(sys.input_alphabet, kEpsLabel)) sys.input_alphabet.push_back(kEpsLabel);
    for (auto& [ln, toks] : trans_lines) {
        if (toks.size() < 5) parse_fail(ln, "trans: needs q sigma gamma q' op");
        const StackOp op = parse_op(toks, 4, ln);
        std::vector<std::string> tops;
        if (toks[1] == "*")
            tops = sys.stack_alphabet;
        else
            tops.push_back(toks[1]);
        for (const auto& top : tops)
            sys.transitions.push_back(Transition{toks[0], top, toks[2], toks[3], op});
    }
    std::sort(sys.transitions.begin(), sys.transitions.end());
    sys.transitions.erase(std::unique(sys.transitions.begin(), sys.transitions.end()),
                          sys.transitions.end());
    std::string why;
    if (!valid_cps(sys, &why)) throw std::runtime_error("inconsistent system: " + why);
    return sys;
}

std::string show_cps(const CPS& sys) {
    std::ostringstream out;
    auto list = [&](const char* key, const std::vector<std::string>& xs) {
        out << key;
        for (const auto& x : xs) out << ' ' << x;
        out << '\n';
    };
    list("states:", sys.states);
    list("stack_alphabet:", sys.stack_alphabet);
    list("input_alphabet:", sys.input_alphabet);
    out << "initial: " << sys.initial_state << '\n';
    for (const Transition& t : sys.transitions) {
        out << "trans: " << t.from << ' ' << t.top << ' ' << t.label << ' ' << t.to << ' ';
        switch (t.op.kind) {
            case OpKind::Push1: out << "push " << t.op.sym << " 1"; break;
            case OpKind::Push2: out << "push " << t.op.sym << " 2"; break;
            case OpKind::Clone2: out << "clone2"; break;
            case OpKind::Pop1: out << "pop1"; break;
            case OpKind::Pop2: out << "pop2"; break;
            case OpKind::Collapse: out << "collapse"; break;
        }
        out << '\n';
    }
    return out.str();
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

CPS load_cps(const std::string& path) { return parse_cps(read_file(path)); }

WordNFA parse_nfa(const std::string& text) {
    WordNFA nfa;
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    bool saw_initial = false;
    while (std::getline(in, line)) {
        ++lineno;
        auto toks = content_tokens(line);
        if (toks.empty()) continue;
        const std::string key = toks[0];
        toks.erase(toks.begin());
        if (key == "states:") {
            nfa.states.insert(nfa.states.end(), toks.begin(), toks.end());
        } else if (key == "alphabet:") {
            nfa.alphabet.insert(nfa.alphabet.end(), toks.begin(), toks.end());
        } else if (key == "initial:") {
            if (toks.size() != 1) parse_fail(lineno, "initial: needs exactly one state");
            nfa.initial = toks[0];
            saw_initial = true;
        } else if (key == "final:") {
            nfa.finals.insert(nfa.finals.end(), toks.begin(), toks.end());
        } else if (key == "trans:") {
            if (toks.size() != 3) parse_fail(lineno, "trans: needs p gamma q");
            nfa.transitions.emplace_back(toks[0], toks[1], toks[2]);
        } else {
            parse_fail(lineno, "unknown directive '" + key + "'");
        }
    }
    if (!saw_initial) throw std::runtime_error("missing initial: line");
    std::string why;
    if (!valid_word_nfa(nfa, &why)) throw std::runtime_error("inconsistent automaton: " + why);
    return nfa;
}

std::string show_nfa(const WordNFA& nfa) {
    std::ostringstream out;
    auto list = [&](const char* key, const std::vector<std::string>& xs) {
        out << key;
        for (const auto& x : xs) out << ' ' << x;
        out << '\n';
    };
    list("states:", nfa.states);
    list("alphabet:", nfa.alphabet);
    out << "initial: " << nfa.initial << '\n';
    list("final:", nfa.finals);
    for (const auto& [p, a, q] : nfa.transitions)
        out << "trans: " << p << ' ' << a << ' ' << q << '\n';
    return out.str();
}

WordNFA load_nfa(const std::string& path) { return parse_nfa(read_file(path)); }

Configuration parse_config(const std::string& text) {
    const auto bar = text.find('|');
    if (bar == std::string::npos)
        throw std::runtime_error("configuration literal needs 'state | stack'");
    auto state_toks = tokenize(text.substr(0, bar));
    if (state_toks.size() != 1)
        throw std::runtime_error("configuration literal needs exactly one state");
    return Configuration{state_toks[0], parse_stack(text.substr(bar + 1))};
}

std::string show_config(const Configuration& c) {
    return c.state + " | " + show_stack(c.stack);
}

}  // namespace cpg
