/* cpg.cc -- command line front end */

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cpg/automata.hh"
#include "cpg/behavior.hh"
#include "cpg/cps.hh"
#include "cpg/encoding.hh"
#include "cpg/stack.hh"
#include "cpg/tree.hh"

namespace {

using namespace cpg;

std::string show_pairs(const StatePairs& ps) {
    if (ps.empty()) return "-";
    std::ostringstream os;
    bool first = true;
    for (const auto& [q, q2] : ps) {
        os << (first ? "" : " ") << "(" << q << "," << q2 << ")";
        first = false;
    }
    return os.str();
}

int run_encode(const std::string& config_lit) {
    LabelledTree t = encode_config(parse_config(config_lit));
    std::printf("%s\n", show_tree(t).c_str());
    return 0;
}

int run_decode(const std::string& system_path, const std::string& tree_lit) {
    CPS sys = load_cps(system_path);
    Configuration c = decode_config(parse_tree(tree_lit), sys);
    std::printf("%s\n", show_config(c).c_str());
    return 0;
}

int run_profile(const std::string& system_path, const std::string& word_lit, int budget) {
    CPS sys = load_cps(system_path);
    Word w = word_lit.empty() ? Word{} : parse_word(word_lit);
    ProfileOracle oracle(sys);
    const BehaviorProfile& p = oracle.profile(w, budget);
    std::printf("word: %s\n", show_word(down0(w)).c_str());
    std::printf("sym: %s\n", p.sym.empty() ? "-" : p.sym.c_str());
    std::printf("lvl: %d\n", p.lvl);
    std::printf("ret: %s\n", show_pairs(p.ret).c_str());
    std::printf("loop: %s\n", show_pairs(p.loop).c_str());
    std::printf("hloop: %s\n", show_pairs(p.hloop).c_str());
    std::printf("lloop: %s\n", show_pairs(p.lloop).c_str());
    std::printf("oneloop: %s\n", show_pairs(p.oneloop).c_str());
    std::printf("budget: %d\n", p.budget_used.limit);
    std::printf("deepest: %d\n", p.budget_used.deepest_hit);
    std::printf("exact: %s\n", p.budget_used.frontier_exhausted ? "yes" : "no");
    return 0;
}

/// DOT text of an explored fragment, vertices labelled "q | stack".
std::string graph_dot(const ExploredGraph& g) {
    std::ostringstream os;
    os << "digraph cpg {\n  rankdir=LR;\n  node [shape=box];\n";
    for (size_t i = 0; i < g.vertices.size(); ++i)
        os << "  n" << i << " [label=\"" << show_config(g.vertices[i]) << "\"];\n";
    for (const auto& [from, label, to] : g.edges)
        os << "  n" << from << " -> n" << to << " [label=\"" << label << "\"];\n";
    os << "}\n";
    return os.str();
}

int run_graph(const std::string& system_path, int depth, int max_width, int max_height,
              const std::string& dot_path) {
    CPS sys = load_cps(system_path);
    ExploredGraph g = bfs_explore(sys, initial_config(sys), {depth, max_width, max_height});
    std::string text = graph_dot(g);
    if (dot_path.empty()) {
        std::fputs(text.c_str(), stdout);
        return 0;
    }
    std::ofstream out(dot_path);
    if (!out || !(out << text)) {
        std::fprintf(stderr, "error: cannot write %s\n", dot_path.c_str());
        return 2;
    }
    std::fprintf(stderr, "wrote %s: %zu vertices, %zu edges\n", dot_path.c_str(),
                 g.vertices.size(), g.edges.size());
    return 0;
}

/// One self-test row: run the check, print pass/fail, accumulate failures.
struct SelfTest {
    int failures = 0;

    template <typename F>
    void row(const std::string& name, F&& f) {
        bool ok = false;
        std::string note;
        try {
            ok = f();
        } catch (const std::exception& e) {
            note = e.what();
        }
        std::printf("%-28s %s%s%s\n", name.c_str(), ok ? "pass" : "FAIL",
                    note.empty() ? "" : "  ", note.c_str());
        if (!ok) ++failures;
    }
};

/// A pseudo-random valid stack produced by an operation walk from bottom.
Stack2 walk_stack(std::mt19937& rng, const std::vector<std::string>& syms, int steps) {
    std::vector<StackOp> ops;
    for (const std::string& s : syms)
        if (s != kBottomSym) {
            ops.push_back(push1(s));
            ops.push_back(push2(s));
        }
    ops.push_back(clone2());
    ops.push_back(pop1());
    ops.push_back(pop2());
    ops.push_back(collapse());
    Stack2 s = bottom_stack();
    for (int i = 0; i < steps; ++i) {
        const StackOp& op = ops[std::uniform_int_distribution<size_t>(0, ops.size() - 1)(rng)];
        if (auto next = apply_op(s, op)) s = std::move(*next);
    }
    return s;
}

int run_selftest(const std::string& system_path) {
    CPS sys = system_path.empty() ? example_hague() : load_cps(system_path);
    std::string why;
    if (!valid_cps(sys, &why)) {
        std::fprintf(stderr, "error: invalid system: %s\n", why.c_str());
        return 2;
    }
    std::mt19937 rng(20240811);
    SelfTest st;

    st.row("stack: literals round trip", [&] {
        for (int i = 0; i < 200; ++i) {
            Stack2 s = walk_stack(rng, sys.stack_alphabet, 24);
            if (!valid_stack(s)) return false;
            if (parse_stack(show_stack(s)) != s) return false;
        }
        return true;
    });

    st.row("stack: milestones ordered", [&] {
        for (int i = 0; i < 100; ++i) {
            Stack2 s = walk_stack(rng, sys.stack_alphabet, 24);
            for (bool gen : {false, true}) {
                MilestoneChain chain = milestones(s, gen);
                for (size_t j = 1; j < chain.size(); ++j)
                    if (ll_compare(chain[j - 1], chain[j]) != LLOrder::Less) return false;
            }
        }
        return true;
    });

    st.row("system: text round trip", [&] { return show_cps(parse_cps(show_cps(sys))) == show_cps(sys); });

    st.row("encoding: decode inverts", [&] {
        for (int i = 0; i < 200; ++i) {
            Configuration c{sys.states[i % sys.states.size()],
                            walk_stack(rng, sys.stack_alphabet, 24)};
            LabelledTree t = encode_config(c);
            if (config_tree_violation(t, sys)) return false;
            if (decode_config(t, sys) != c) return false;
        }
        return true;
    });

    st.row("encoding: checker accepts", [&] {
        TreeAutomaton a = enc_trees_nfta(sys);
        for (int i = 0; i < 100; ++i) {
            Configuration c{sys.states[i % sys.states.size()],
                            walk_stack(rng, sys.stack_alphabet, 20)};
            if (!accepts(a, encode_config(c))) return false;
        }
        return true;
    });

    st.row("automata: boolean laws", [&] {
        TreeAutomaton a = enc_trees_nfta(sys);
        TreeAutomaton both = product_automaton(a, complement_automaton(a));
        return empty_language(both) && !empty_language(union_automaton(a, a));
    });

    st.row("behavior: determinations", [&] {
        std::vector<Word> words{{plain(kBottomSym)}};
        for (const std::string& s : sys.stack_alphabet) {
            if (s == kBottomSym) continue;
            words.push_back({plain(kBottomSym), linked(s, 0)});
            words.push_back({plain(kBottomSym), plain(s), linked(s, 0)});
        }
        return check_determinations(sys, words, 8).ok();
    });

    std::printf("%d failure(s)\n", st.failures);
    return st.failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"collapsible pushdown reachability toolkit"};
    app.require_subcommand(0, 1);

    std::string system_path, config_lit, tree_lit, word_lit, dot_path;
    int budget = 16, depth = 6, max_width = 8, max_height = 8;

    CLI::App* enc = app.add_subcommand("encode", "print the tree literal of a configuration");
    enc->add_option("--config", config_lit, "configuration literal \"q | stack\"")->required();

    CLI::App* dec = app.add_subcommand("decode", "print the configuration of a tree literal");
    dec->add_option("--system", system_path, "system file")->required()->check(CLI::ExistingFile);
    dec->add_option("--tree", tree_lit, "tree literal")->required();

    CLI::App* prof = app.add_subcommand("profile", "print the behavior profile of a word");
    prof->add_option("--system", system_path, "system file")->required()->check(CLI::ExistingFile);
    prof->add_option("--word", word_lit, "word literal, links are zeroed")->required();
    prof->add_option("--budget", budget, "search bound")->capture_default_str();

    CLI::App* graph = app.add_subcommand("graph", "emit the explored configuration graph as DOT");
    graph->add_option("--system", system_path, "system file")->required()->check(CLI::ExistingFile);
    graph->add_option("--depth", depth, "exploration depth")->capture_default_str();
    graph->add_option("--max-width", max_width, "stack width bound")->capture_default_str();
    graph->add_option("--max-height", max_height, "word length bound")->capture_default_str();
    graph->add_option("--dot", dot_path, "output file (stdout when absent)");

    CLI::App* self = app.add_subcommand("selftest", "run the module invariant checks");
    self->add_option("--system", system_path, "system file")->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
        if (enc->parsed()) return run_encode(config_lit);
        if (dec->parsed()) return run_decode(system_path, tree_lit);
        if (prof->parsed()) return run_profile(system_path, word_lit, budget);
        if (graph->parsed()) return run_graph(system_path, depth, max_width, max_height, dot_path);
        if (self->parsed()) return run_selftest(system_path);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    std::fputs(app.help().c_str(), stdout);
    return 0;
}
