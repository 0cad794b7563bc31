/* encoding.hh -- stacks and configurations as binary trees */

#ifndef CPG_ENCODING_HH_
#define CPG_ENCODING_HH_

#include <optional>
#include <string>
#include <vector>

#include "cpg/automata.hh"
#include "cpg/cps.hh"
#include "cpg/stack.hh"
#include "cpg/tree.hh"

namespace cpg {

/// The tree of a valid stack: letters become nodes labelled with symbol
/// and level only, runs of words sharing a prefix share the nodes above
/// it, and the remainder of a word line hangs off to the right under an
/// "e" node.  Links are dropped; decode restores them from the counts of
/// right-hand nodes.
LabelledTree encode_stack(const Stack2& s);
/// The stack tree under a root naming the control state.
LabelledTree encode_config(const Configuration& c);

/// The first reason a tree fails to be a stack encoding, if any.
/// stack_alphabet lists the symbols letters may use.
std::optional<std::string> stack_tree_violation(const LabelledTree& t,
                                                const std::vector<std::string>& stack_alphabet);
/// Likewise for configuration trees rooted in a control state of sys.
std::optional<std::string> config_tree_violation(const LabelledTree& t, const CPS& sys);

/// Inverses of the encoders.  They reject trees with a violation by
/// throwing std::runtime_error naming the failed condition.
Stack2 decode_stack(const LabelledTree& t, const std::vector<std::string>& stack_alphabet);
Configuration decode_config(const LabelledTree& t, const CPS& sys);

/// The link a level-2 letter at node d receives when decoding: the
/// number of right-hand nodes at or before d in tree order.
int restore_link(const LabelledTree& t, const std::string& d);

/// The restriction of t to the nodes at or before d in tree order.
LabelledTree left_tree(const LabelledTree& t, const std::string& d);

/// The stack decoded from the left tree at d.  Works on stack trees (any
/// d, the root giving the bare bottom stack) and on configuration trees
/// (d inside the stack subtree).
Stack2 left_stack(const LabelledTree& t, const std::string& d);

/// The widest generalised milestone of the decoded stack whose prefix is
/// the left stack at d.  On the rightmost branch this is the full stack;
/// elsewhere the nodes at or before d together with the subtree at d
/// decode to the answer short of one final word, a copy of the top word
/// of the left stack.
Stack2 induced_gen_milestone(const LabelledTree& t, const std::string& d);

/// Every atom a configuration tree of sys may use: control states,
/// letter atoms over the stack alphabet and the "e" marker.
std::vector<Atom> encoding_alphabet(const CPS& sys);

/// The automaton accepting exactly the configuration trees of sys, with
/// 2 + 3 * |stack alphabet| states.
TreeAutomaton enc_trees_nfta(const CPS& sys);

}  // namespace cpg

#endif  // CPG_ENCODING_HH_
