/* cps.hh -- collapsible pushdown systems, runs, bounded exploration */

#ifndef CPG_CPS_HH_
#define CPG_CPS_HH_

#include <compare>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "cpg/stack.hh"

namespace cpg {

/// The reserved silent input label.  Systems keep it in their input
/// alphabet even when no transition uses it.
inline const std::string kEpsLabel = "eps";

/// One transition (q, sigma, gamma, q', op).  The top-symbol wildcard of
/// the input format is expanded before a Transition is constructed, so
/// `top` always names a concrete stack symbol.
struct Transition {
    std::string from;
    std::string top;
    std::string label;
    std::string to;
    StackOp op;

    friend auto operator<=>(const Transition&, const Transition&) = default;
};

/// A collapsible pushdown system of level 2.
struct CPS {
    std::vector<std::string> states;
    std::vector<std::string> stack_alphabet;  ///< contains kBottomSym
    std::vector<std::string> input_alphabet;  ///< contains kEpsLabel
    std::string initial_state;
    std::vector<Transition> transitions;

    bool has_state(const std::string& q) const;
    bool has_stack_symbol(const std::string& s) const;
    bool has_label(const std::string& g) const;
};

/// Checks internal consistency; on failure optionally reports the reason.
bool valid_cps(const CPS& sys, std::string* why = nullptr);

struct Configuration {
    std::string state;
    Stack2 stack;

    friend auto operator<=>(const Configuration&, const Configuration&) = default;
};

/// The initial configuration (q0, bottom stack).
Configuration initial_config(const CPS& sys);

/// A run: configurations joined by labelled transitions of one system.
struct Run {
    std::vector<Configuration> configs;  ///< nonempty
    std::vector<std::string> labels;     ///< one label per step

    int length() const { return static_cast<int>(labels.size()); }
    const Configuration& front() const { return configs.front(); }
    const Configuration& back() const { return configs.back(); }

    /// The subrun on configuration positions [i, j].
    Run slice(int i, int j) const;

    friend auto operator<=>(const Run&, const Run&) = default;
};

/// Checks that every step of the run is justified by a transition.
bool check_run(const CPS& sys, const Run& rho, std::string* why = nullptr);

/// All defined one-step successors of c, with edge labels.
std::vector<std::pair<std::string, Configuration>> successors(const CPS& sys,
                                                              const Configuration& c);

struct ExploreBounds {
    int max_steps = 0;
    int max_width = 0;
    int max_height = 0;
};

/// Finite fragment of the configuration graph produced by bfs_explore.
struct ExploredGraph {
    std::vector<Configuration> vertices;  ///< in BFS discovery order
    std::vector<int> depth;               ///< BFS distance from the root
    /// Edges (source index, label, target index); sources are only
    /// vertices that were expanded, i.e. whose depth is below max_steps.
    std::vector<std::tuple<int, std::string, int>> edges;
    ExploreBounds bounds;
    bool truncated = false;  ///< some successor fell outside the bounds

    std::optional<int> index_of(const Configuration& c) const;
};

/// Breadth-first exploration from c0 up to the given bounds.  Successors
/// whose stack exceeds max_width words or max_height letters per word are
/// dropped and recorded as truncation.
ExploredGraph bfs_explore(const CPS& sys, const Configuration& c0, const ExploreBounds& bounds);

/// A nondeterministic finite automaton over the input alphabet.
struct WordNFA {
    std::vector<std::string> states;
    std::vector<std::string> alphabet;
    std::string initial;
    std::vector<std::string> finals;
    std::vector<std::tuple<std::string, std::string, std::string>> transitions;

    bool accepts_word(const std::vector<std::string>& word) const;
};

bool valid_word_nfa(const WordNFA& nfa, std::string* why = nullptr);

/// Shortest run from c1 to c2 within max_steps whose label word lies in
/// the language of lang (all words when lang is absent).  A nullopt answer
/// is sound only relative to the step bound.
std::optional<Run> witness_run(const CPS& sys, const Configuration& c1, const Configuration& c2,
                               const std::optional<WordNFA>& lang, int max_steps);

/// The product system tracking an input-word automaton alongside the CPS.
/// Product states are spelled "q,p".
CPS product_word_nfa(const CPS& sys, const WordNFA& nfa);
std::string product_state(const std::string& q, const std::string& p);

/// The three-state clone/push/pop cycle system from the literature.
CPS example_hague();
/// example_hague extended by a pop2 transition and a second pushable
/// letter b duplicating every transition that mentions a.
CPS example_nonelementary();

/// Parse the line-oriented system format (states:, stack_alphabet:,
/// input_alphabet:, initial:, trans: lines).  Throws std::runtime_error
/// with a line number on malformed input.
CPS parse_cps(const std::string& text);
std::string show_cps(const CPS& sys);
CPS load_cps(const std::string& path);

WordNFA parse_nfa(const std::string& text);
std::string show_nfa(const WordNFA& nfa);
WordNFA load_nfa(const std::string& path);

/// Configuration literal "q | <stack literal>".
Configuration parse_config(const std::string& text);
std::string show_config(const Configuration& c);

}  // namespace cpg

#endif  // CPG_CPS_HH_
