/* automata.hh -- nondeterministic bottom-up automata on binary trees */

#ifndef CPG_AUTOMATA_HH_
#define CPG_AUTOMATA_HH_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cpg/cps.hh"
#include "cpg/tree.hh"

namespace cpg {

/// The per-track base alphabets of a tracked-tree language.  The label
/// universe of a k-track alphabet is the product of the bases extended
/// with "#", minus the all-padding label; for one track it is the base
/// itself, with no padding.
struct TrackAlphabet {
    std::vector<std::vector<Atom>> bases;

    int tracks() const { return static_cast<int>(bases.size()); }
    std::vector<TrackLabel> universe() const;
    bool contains(const TrackLabel& l) const;

    friend auto operator<=>(const TrackAlphabet&, const TrackAlphabet&) = default;
};

/// One transition for a fixed label: the state assumed at the node given
/// the states of its children.  Absent children count as the initial
/// state.
struct TreeTrans {
    int state = 0;
    int child0 = 0;
    int child1 = 0;

    friend auto operator<=>(const TreeTrans&, const TreeTrans&) = default;
};

/// A bottom-up tree automaton.  Runs label every node with a state; below
/// the leaves both child slots read the initial state; acceptance asks
/// for a final state at the root.  The empty tree is accepted exactly
/// when the initial state is final.
struct TreeAutomaton {
    TrackAlphabet alphabet;
    int num_states = 0;
    int initial = 0;
    std::set<int> finals;
    std::map<TrackLabel, std::vector<TreeTrans>> delta;
    /// Optional display names, one per state when nonempty.
    std::vector<std::string> state_names;

    void add_trans(const TrackLabel& label, int state, int child0, int child1);
    std::string name_of(int state) const;
};

/// Checks state ranges, label membership and name-table consistency.
bool valid_automaton(const TreeAutomaton& a, std::string* why = nullptr);

/// The set of states realisable at the root of t, and acceptance.
std::set<int> run_states(const TreeAutomaton& a, const TrackedTree& t);
bool accepts(const TreeAutomaton& a, const TrackedTree& t);
bool accepts(const TreeAutomaton& a, const LabelledTree& t);

/// Emptiness test; returns an accepted tree when the language is
/// inhabited.
std::optional<TrackedTree> nonempty_witness(const TreeAutomaton& a);
bool empty_language(const TreeAutomaton& a);

/// Boolean operations.  Arguments must share their alphabet.
TreeAutomaton product_automaton(const TreeAutomaton& a, const TreeAutomaton& b);
TreeAutomaton union_automaton(const TreeAutomaton& a, const TreeAutomaton& b);
/// Complement relative to all trees over the alphabet, via the subset
/// construction.
TreeAutomaton complement_automaton(const TreeAutomaton& a);

/// Inserts a new track at the given position; the automaton ignores it,
/// allowing any base atom or padding there.
TreeAutomaton cylindrify(const TreeAutomaton& a, int position,
                         const std::vector<Atom>& new_base);

/// Removes the given track, deleting nodes that carried padding on every
/// remaining track.
TreeAutomaton project(const TreeAutomaton& a, int position);

/// Accepts exactly the convolutions of nonempty trees: every track is
/// nonempty and padding never sits above a proper label.
TreeAutomaton well_formed_convolution(const TrackAlphabet& alphabet);

/// Composes two binary relations given as automata on 2-track trees:
/// accepts (t1,t3) whenever some t2 has (t1,t2) in r and (t2,t3) in s.
TreeAutomaton rel_compose(const TreeAutomaton& r, const TreeAutomaton& s);

/// Textual form, one directive per line:
///   states: n, initial: q, final: q..., trans: q label q0 q1
std::string show_automaton(const TreeAutomaton& a);
TreeAutomaton parse_automaton(const std::string& text);
TreeAutomaton load_automaton(const std::string& path);

/// Product of word automata over the same alphabet.
WordNFA product_nfa(const WordNFA& a, const WordNFA& b);

/// The run-label languages used to contract silent steps: "all" accepts
/// label words that end every silent stretch with a proper label, and
/// each proper label g gets the language of silent stretches followed by
/// that g.  Every automaton has exactly two states.
struct ContractionLanguages {
    WordNFA all;
    std::map<std::string, WordNFA> per_label;
};
ContractionLanguages contraction_languages(const std::vector<std::string>& labels);

}  // namespace cpg

#endif  // CPG_AUTOMATA_HH_
