/* tree.hh -- finite binary trees with textual labels */

#ifndef CPG_TREE_HH_
#define CPG_TREE_HH_

#include <compare>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace cpg {

/// One tree-label atom: a state "q:NAME", a letter "(a,1)" or "(a,2)"
/// (bottom spelled B inside letters), the empty-word marker "e", or the
/// track padding "#".
using Atom = std::string;

inline const Atom kEpsAtom = "e";
inline const Atom kPadAtom = "#";
/// Spelling of the bottom symbol inside tree-label letters.
inline const std::string kBottomTreeSym = "B";

Atom state_atom(const std::string& q);
Atom letter_atom(const std::string& sym, int lvl);
bool is_state_atom(const Atom& a);
bool is_letter_atom(const Atom& a);
bool is_eps_atom(const Atom& a);
std::string state_of_atom(const Atom& a);
/// Symbol and level of a letter atom, with B mapped back to the bottom
/// symbol.
std::pair<std::string, int> letter_of_atom(const Atom& a);

/// A binary tree as a map from {0,1}-addresses to atoms.  The map order
/// is the tree order: prefixes first, then the 0-branch before the
/// 1-branch, so iteration is in tree order and std::string comparison
/// decides the order directly.
struct LabelledTree {
    std::map<std::string, Atom> nodes;

    bool has(const std::string& d) const { return nodes.count(d) != 0; }
    const Atom& at(const std::string& d) const { return nodes.at(d); }
    size_t size() const { return nodes.size(); }
    bool empty() const { return nodes.empty(); }

    friend auto operator<=>(const LabelledTree&, const LabelledTree&) = default;
};

/// Checks that addresses use only 0/1 and that the domain is closed
/// under parents.
bool valid_tree(const LabelledTree& t, std::string* why = nullptr);

/// The subtree rooted at d, re-addressed to the root.
LabelledTree subtree(const LabelledTree& t, const std::string& d);

/// The maximal address of the tree (its rightmost leaf in tree order).
std::string rightmost_leaf(const LabelledTree& t);

/// True iff d lies on the branch that always prefers the 1-child and
/// falls back to the 0-child.
bool on_rightmost_branch(const LabelledTree& t, const std::string& d);

/// Tree literal "LABEL(left,right)" with "-" for an absent subtree.
std::string show_tree(const LabelledTree& t);
LabelledTree parse_tree(const std::string& text);

/// A k-track label: one atom per track, padded tracks holding "#".
using TrackLabel = std::vector<Atom>;

/// A tree whose labels carry one atom per track.
struct TrackedTree {
    int tracks = 1;
    std::map<std::string, TrackLabel> nodes;

    bool has(const std::string& d) const { return nodes.count(d) != 0; }
    const TrackLabel& at(const std::string& d) const { return nodes.at(d); }
    size_t size() const { return nodes.size(); }

    friend auto operator<=>(const TrackedTree&, const TrackedTree&) = default;
};

/// A single tree viewed as a 1-track tree.
TrackedTree tracked(const LabelledTree& t);

/// The convolution: domain is the union of the domains, with "#" filling
/// tracks that lack a node.
TrackedTree convolution(const std::vector<LabelledTree>& ts);

/// Extracts one track, dropping padded nodes.
LabelledTree track_of(const TrackedTree& t, int track);

std::string show_track_label(const TrackLabel& l);
TrackLabel parse_track_label(const std::string& text);

}  // namespace cpg

#endif  // CPG_TREE_HH_
