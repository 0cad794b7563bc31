/* support.hh -- shared helpers for the test suite */

#ifndef CPG_TESTS_SUPPORT_HH_
#define CPG_TESTS_SUPPORT_HH_

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cpg/automata.hh"
#include "cpg/cps.hh"
#include "cpg/stack.hh"
#include "cpg/tree.hh"

namespace testsup {

using cpg::Stack2;
using cpg::StackOp;

/// All operations over the given pushable symbols (bottom excluded).
inline std::vector<StackOp> all_ops(const std::vector<std::string>& syms) {
    std::vector<StackOp> ops{cpg::clone2(), cpg::pop1(), cpg::pop2(), cpg::collapse()};
    for (const auto& s : syms) {
        ops.push_back(cpg::push1(s));
        ops.push_back(cpg::push2(s));
    }
    return ops;
}

/// A random stack built by applying up to max_ops random applicable
/// operations to the bottom stack, with mild size caps so that milestone
/// enumeration stays cheap.
inline Stack2 random_stack(std::mt19937& rng, const std::vector<std::string>& syms,
                           int max_ops, int max_width = 7, int max_height = 9) {
    Stack2 s = cpg::bottom_stack();
    const auto ops = all_ops(syms);
    std::uniform_int_distribution<size_t> pick(0, ops.size() - 1);
    const int steps = std::uniform_int_distribution<int>(0, max_ops)(rng);
    for (int i = 0; i < steps; ++i) {
        const StackOp& op = ops[pick(rng)];
        auto t = cpg::apply_op(s, op);
        if (!t) continue;
        if (t->width() > max_width || static_cast<int>(t->top2().size()) > max_height)
            continue;
        s = std::move(*t);
    }
    return s;
}

/// The worked five-word stack with mixed fresh and cloned links that the
/// documentation examples use throughout.
inline Stack2 linked_sample_stack() {
    return cpg::parse_stack(
        "_ a^2@0 b^2@0 : _ a^2@0 b^2@0 c^2@1 : _ a^2@2 c : _ a^2@2 d^2@3 e : _ a^2@2");
}

/// A random system over small state/symbol/label sets.  Transitions are
/// drawn uniformly; the result is always internally consistent.
inline cpg::CPS random_cps(std::mt19937& rng, int nstates, int nsyms, int nlabels, int ntrans) {
    cpg::CPS sys;
    for (int i = 0; i < nstates; ++i) sys.states.push_back("q" + std::to_string(i));
    sys.stack_alphabet.push_back(cpg::kBottomSym);
    for (int i = 0; i < nsyms; ++i) sys.stack_alphabet.push_back(std::string(1, char('a' + i)));
    for (int i = 0; i < nlabels; ++i) sys.input_alphabet.push_back("g" + std::to_string(i));
    sys.input_alphabet.push_back(cpg::kEpsLabel);
    sys.initial_state = sys.states[0];
    auto pick = [&](const std::vector<std::string>& xs) {
        return xs[std::uniform_int_distribution<size_t>(0, xs.size() - 1)(rng)];
    };
    std::vector<std::string> pushable(sys.stack_alphabet.begin() + 1, sys.stack_alphabet.end());
    std::vector<std::string> labels(sys.input_alphabet.begin(), sys.input_alphabet.end() - 1);
    for (int i = 0; i < ntrans; ++i) {
        StackOp op = cpg::clone2();
        switch (std::uniform_int_distribution<int>(0, 5)(rng)) {
            case 0: op = cpg::push1(pick(pushable)); break;
            case 1: op = cpg::push2(pick(pushable)); break;
            case 2: op = cpg::clone2(); break;
            case 3: op = cpg::pop1(); break;
            case 4: op = cpg::pop2(); break;
            case 5: op = cpg::collapse(); break;
        }
        sys.transitions.push_back(cpg::Transition{pick(sys.states), pick(sys.stack_alphabet),
                                                  pick(labels), pick(sys.states), op});
    }
    std::sort(sys.transitions.begin(), sys.transitions.end());
    sys.transitions.erase(std::unique(sys.transitions.begin(), sys.transitions.end()),
                          sys.transitions.end());
    return sys;
}

/// Depth-first enumeration of all run prefixes from c, calling visit on
/// every nonempty extension with the configuration path.
template <typename Visit>
inline void walk_runs(const cpg::CPS& sys, std::vector<cpg::Configuration>& path, int depth,
                      Visit&& visit) {
    if (depth == 0) return;
    for (auto& [label, succ] : successors(sys, path.back())) {
        (void)label;
        path.push_back(succ);
        visit(path);
        walk_runs(sys, path, depth - 1, visit);
        path.pop_back();
    }
}

/// Depth-first enumeration of all runs from rho.back(), calling visit on
/// every nonempty extension with the full labelled run.
template <typename Visit>
inline void walk_labelled_runs(const cpg::CPS& sys, cpg::Run& rho, int depth, Visit&& visit) {
    if (depth == 0) return;
    for (auto& [label, succ] : successors(sys, rho.back())) {
        rho.configs.push_back(succ);
        rho.labels.push_back(label);
        visit(rho);
        walk_labelled_runs(sys, rho, depth - 1, visit);
        rho.configs.pop_back();
        rho.labels.pop_back();
    }
}

/// A random tree over the given label atoms with at most max_nodes
/// nodes, grown by repeatedly attaching a child to a present node.
inline cpg::LabelledTree random_labelled_tree(std::mt19937& rng,
                                              const std::vector<cpg::Atom>& base,
                                              int max_nodes) {
    cpg::LabelledTree t;
    auto pick_atom = [&] {
        return base[std::uniform_int_distribution<size_t>(0, base.size() - 1)(rng)];
    };
    const int nodes = std::uniform_int_distribution<int>(1, max_nodes)(rng);
    t.nodes[""] = pick_atom();
    std::vector<std::string> frontier{"0", "1"};
    for (int i = 1; i < nodes && !frontier.empty(); ++i) {
        const size_t at =
            std::uniform_int_distribution<size_t>(0, frontier.size() - 1)(rng);
        const std::string addr = frontier[at];
        frontier.erase(frontier.begin() + static_cast<long>(at));
        t.nodes[addr] = pick_atom();
        frontier.push_back(addr + "0");
        frontier.push_back(addr + "1");
    }
    return t;
}

/// A random single-track automaton over the given base atoms.
inline cpg::TreeAutomaton random_automaton(std::mt19937& rng,
                                           const std::vector<cpg::Atom>& base,
                                           int max_states, int ntrans) {
    cpg::TreeAutomaton a;
    a.alphabet.bases = {base};
    a.num_states = std::uniform_int_distribution<int>(2, max_states)(rng);
    a.initial = 0;
    auto pick_state = [&] {
        return std::uniform_int_distribution<int>(0, a.num_states - 1)(rng);
    };
    a.finals.insert(pick_state());
    if (std::uniform_int_distribution<int>(0, 1)(rng) == 0) a.finals.insert(pick_state());
    for (int i = 0; i < ntrans; ++i) {
        const cpg::Atom atom =
            base[std::uniform_int_distribution<size_t>(0, base.size() - 1)(rng)];
        a.add_trans({atom}, pick_state(), pick_state(), pick_state());
    }
    return a;
}

/// Acceptance decided by brute force: every assignment of states to the
/// nodes is tried against the transition table.
inline bool naive_accepts(const cpg::TreeAutomaton& a, const cpg::TrackedTree& t) {
    if (t.nodes.empty()) return a.finals.count(a.initial) != 0;
    std::vector<std::pair<std::string, cpg::TrackLabel>> nodes(t.nodes.begin(),
                                                               t.nodes.end());
    std::map<std::string, int> assigned;
    // Nodes are assigned children-first so each constraint is checked as
    // soon as its node receives a state.
    std::reverse(nodes.begin(), nodes.end());
    std::function<bool(size_t)> go = [&](size_t i) -> bool {
        if (i == nodes.size()) return a.finals.count(assigned.at("")) != 0;
        const auto& [addr, label] = nodes[i];
        auto child = [&](char bit) {
            auto found = assigned.find(addr + bit);
            return found == assigned.end() ? a.initial : found->second;
        };
        auto bucket = a.delta.find(label);
        if (bucket == a.delta.end()) return false;
        for (const auto& tr : bucket->second) {
            if (tr.child0 != child('0') || tr.child1 != child('1')) continue;
            assigned[addr] = tr.state;
            if (go(i + 1)) return true;
            assigned.erase(addr);
        }
        return false;
    };
    return go(0);
}

/// Exact language equality through complementation.
inline bool same_language(const cpg::TreeAutomaton& a, const cpg::TreeAutomaton& b) {
    return cpg::empty_language(cpg::product_automaton(a, cpg::complement_automaton(b))) &&
           cpg::empty_language(cpg::product_automaton(b, cpg::complement_automaton(a)));
}

/// The automaton accepting exactly the given tree.
inline cpg::TreeAutomaton singleton_automaton(const cpg::TrackedTree& t,
                                              const cpg::TrackAlphabet& alphabet) {
    cpg::TreeAutomaton a;
    a.alphabet = alphabet;
    a.initial = 0;
    std::map<std::string, int> state_of;
    int next = 1;
    for (const auto& [addr, label] : t.nodes) state_of[addr] = next++;
    a.num_states = next;
    a.finals = {t.nodes.empty() ? 0 : state_of.at("")};
    for (const auto& [addr, label] : t.nodes) {
        auto child = [&](char bit) {
            auto found = state_of.find(addr + bit);
            return found == state_of.end() ? 0 : found->second;
        };
        a.add_trans(label, state_of.at(addr), child('0'), child('1'));
    }
    return a;
}

/// A random walk from c of at most max_steps successor steps.
inline cpg::Run random_run(std::mt19937& rng, const cpg::CPS& sys, const cpg::Configuration& c,
                           int max_steps) {
    cpg::Run rho{{c}, {}};
    for (int i = 0; i < max_steps; ++i) {
        auto succ = successors(sys, rho.configs.back());
        if (succ.empty()) break;
        auto& [label, next] = succ[std::uniform_int_distribution<size_t>(0, succ.size() - 1)(rng)];
        rho.configs.push_back(next);
        rho.labels.push_back(label);
    }
    return rho;
}

}  // namespace testsup

#endif  // CPG_TESTS_SUPPORT_HH_
