/* encoding.cc -- stack trees, their inverses and their automaton */

#include "cpg/encoding.hh"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace cpg {

namespace {

/// Writes the subtree for words[lo..hi) at addr.  All these words agree
/// on their letters up to index depth; the label covers index depth (an
/// "e" label stands for a letter already covered further up).  The block
/// of words that also agree at depth+1 descends to the left child and the
/// remainder of the line moves to the right child.
void encode_line(const std::vector<Word>& words, int lo, int hi, int depth,
                 const Atom& label, const std::string& addr, LabelledTree& out) {
    out.nodes[addr] = label;
    const Word& first = words[lo];
    if (static_cast<int>(first.size()) == depth + 1) {
        if (hi - lo > 1) encode_line(words, lo + 1, hi, depth, kEpsAtom, addr + "1", out);
        return;
    }
    const Letter& next = first[depth + 1];
    int j = lo;
    while (j + 1 < hi && static_cast<int>(words[j + 1].size()) > depth + 1 &&
           words[j + 1][depth + 1] == next)
        ++j;
    const Atom next_label = letter_atom(next.sym, next.lvl);
    encode_line(words, lo, j + 1, depth + 1, next_label, addr + "0", out);
    if (j + 1 < hi) encode_line(words, j + 1, hi, depth, kEpsAtom, addr + "1", out);
}

/// Decodes the line below addr; g is the number of right-hand nodes at
/// or before addr in tree order.  The label's letter, when present,
/// becomes the first letter of every returned word.
std::vector<Word> decode_line(const LabelledTree& t, const std::string& addr, int g) {
    const Atom& a = t.at(addr);
    std::optional<Letter> letter;
    if (!is_eps_atom(a)) {
        const auto [sym, lvl] = letter_of_atom(a);
        letter = Letter{sym, lvl, lvl == 2 ? g : 0};
    }
    const bool has0 = t.has(addr + "0");
    const bool has1 = t.has(addr + "1");
    std::vector<Word> words;
    if (has0) {
        words = decode_line(t, addr + "0", g);
    } else {
        words.push_back({});
    }
    if (has1) {
        std::vector<Word> rest =
            decode_line(t, addr + "1", g + static_cast<int>(words.size()));
        words.insert(words.end(), rest.begin(), rest.end());
    }
    if (letter.has_value())
        for (Word& w : words) w.insert(w.begin(), *letter);
    return words;
}

const Atom kBottomAtom = letter_atom(kBottomSym, 1);

/// Shared conditions on the stack part of an encoding, rooted at base:
/// the root must carry the bottom letter, left-hand nodes carry proper
/// letters, right-hand nodes carry "e", and a block may not be followed
/// by a block starting with the same level-1 letter.
std::optional<std::string> line_violation(const LabelledTree& t, const std::string& base,
                                          const std::vector<std::string>& stack_alphabet) {
    if (!t.has(base)) return "missing stack root";
    if (t.at(base) != kBottomAtom) return "stack root is not the level-1 bottom letter";
    for (auto it = t.nodes.lower_bound(base); it != t.nodes.end(); ++it) {
        const auto& [addr, atom] = *it;
        if (addr.compare(0, base.size(), base) != 0) break;
        if (addr == base) continue;
        if (addr.back() == '1') {
            if (!is_eps_atom(atom))
                return "right-hand node " + addr + " is not the empty-word marker";
            continue;
        }
        if (!is_letter_atom(atom)) return "left-hand node " + addr + " is not a letter";
        std::string sym;
        try {
            sym = letter_of_atom(atom).first;
        } catch (const std::invalid_argument&) {
            return "malformed letter at node " + addr;
        }
        if (sym == kBottomSym) return "bottom letter below the stack root at node " + addr;
        if (std::find(stack_alphabet.begin(), stack_alphabet.end(), sym) ==
            stack_alphabet.end())
            return "letter at node " + addr + " outside the stack alphabet";
    }
    for (const auto& [addr, atom] : t.nodes) {
        auto level1 = [&](const std::string& d) -> std::string {
            auto found = t.nodes.find(d);
            if (found == t.nodes.end() || !is_letter_atom(found->second)) return "";
            const auto [sym, lvl] = letter_of_atom(found->second);
            return lvl == 1 ? sym : "";
        };
        const std::string here = level1(addr + "0");
        if (!here.empty() && here == level1(addr + "10"))
            return "adjacent blocks starting with the same level-1 letter at node " + addr;
    }
    return std::nullopt;
}

}  // namespace

LabelledTree encode_stack(const Stack2& s) {
    std::string why;
    if (!valid_stack(s, &why)) throw std::invalid_argument("encode_stack: " + why);
    LabelledTree out;
    encode_line(s.words, 0, s.width(), 0, kBottomAtom, "", out);
    return out;
}

LabelledTree encode_config(const Configuration& c) {
    std::string why;
    if (!valid_stack(c.stack, &why)) throw std::invalid_argument("encode_config: " + why);
    LabelledTree out;
    out.nodes[""] = state_atom(c.state);
    encode_line(c.stack.words, 0, c.stack.width(), 0, kBottomAtom, "0", out);
    return out;
}

std::optional<std::string> stack_tree_violation(const LabelledTree& t,
                                                const std::vector<std::string>& stack_alphabet) {
    std::string why;
    if (!valid_tree(t, &why)) return why;
    if (t.nodes.empty()) return "empty tree";
    return line_violation(t, "", stack_alphabet);
}

std::optional<std::string> config_tree_violation(const LabelledTree& t, const CPS& sys) {
    std::string why;
    if (!valid_tree(t, &why)) return why;
    if (t.nodes.empty()) return "empty tree";
    const Atom& root = t.at("");
    if (!is_state_atom(root) || !sys.has_state(state_of_atom(root)))
        return "root is not a control state of the system";
    if (t.has("1")) return "state root has a right child";
    if (!t.has("0")) return "state root has no stack below it";
    return line_violation(t, "0", sys.stack_alphabet);
}

Stack2 decode_stack(const LabelledTree& t, const std::vector<std::string>& stack_alphabet) {
    if (auto why = stack_tree_violation(t, stack_alphabet); why.has_value())
        throw std::runtime_error("decode_stack: " + *why);
    return Stack2{decode_line(t, "", 0)};
}

Configuration decode_config(const LabelledTree& t, const CPS& sys) {
    if (auto why = config_tree_violation(t, sys); why.has_value())
        throw std::runtime_error("decode_config: " + *why);
    return Configuration{state_of_atom(t.at("")), Stack2{decode_line(t, "0", 0)}};
}

int restore_link(const LabelledTree& t, const std::string& d) {
    if (!t.has(d)) throw std::invalid_argument("restore_link: no node at \"" + d + "\"");
    int count = 0;
    for (auto it = t.nodes.begin(); it != t.nodes.upper_bound(d); ++it)
        if (!it->first.empty() && it->first.back() == '1') ++count;
    return count;
}

LabelledTree left_tree(const LabelledTree& t, const std::string& d) {
    if (!t.has(d)) throw std::invalid_argument("left_tree: no node at \"" + d + "\"");
    LabelledTree out;
    out.nodes.insert(t.nodes.begin(), t.nodes.upper_bound(d));
    return out;
}

namespace {

/// Strips a configuration root, if any, and maps d into the stack
/// subtree.  Left stacks at the state root itself are not defined.
std::pair<LabelledTree, std::string> stack_rooted(const LabelledTree& t,
                                                  const std::string& d) {
    if (t.nodes.empty()) throw std::invalid_argument("empty tree");
    if (!is_state_atom(t.at(""))) return {t, d};
    if (d.empty() || d[0] != '0')
        throw std::invalid_argument("address \"" + d + "\" is outside the stack subtree");
    return {subtree(t, "0"), d.substr(1)};
}

}  // namespace

Stack2 left_stack(const LabelledTree& t, const std::string& d) {
    const auto [st, sd] = stack_rooted(t, d);
    if (!st.has(sd)) throw std::invalid_argument("left_stack: no node at \"" + d + "\"");
    return Stack2{decode_line(left_tree(st, sd), "", 0)};
}

Stack2 induced_gen_milestone(const LabelledTree& t, const std::string& d) {
    const auto [st, sd] = stack_rooted(t, d);
    if (!st.has(sd))
        throw std::invalid_argument("induced_gen_milestone: no node at \"" + d + "\"");
    if (on_rightmost_branch(st, sd)) return Stack2{decode_line(st, "", 0)};
    LabelledTree cut = left_tree(st, sd);
    for (auto it = st.nodes.lower_bound(sd); it != st.nodes.end(); ++it) {
        if (it->first.compare(0, sd.size(), sd) != 0) break;
        cut.nodes.insert(*it);
    }
    Stack2 out{decode_line(cut, "", 0)};
    Stack2 left{decode_line(left_tree(st, sd), "", 0)};
    out.words.push_back(left.words.back());
    return out;
}

std::vector<Atom> encoding_alphabet(const CPS& sys) {
    std::vector<Atom> out;
    for (const auto& q : sys.states) out.push_back(state_atom(q));
    for (const auto& sym : sys.stack_alphabet) {
        out.push_back(letter_atom(sym, 1));
        out.push_back(letter_atom(sym, 2));
    }
    out.push_back(kEpsAtom);
    std::sort(out.begin(), out.end());
    return out;
}

TreeAutomaton enc_trees_nfta(const CPS& sys) {
    TreeAutomaton out;
    out.alphabet.bases = {encoding_alphabet(sys)};
    // One frontier state, one accepting state, a state per letter atom
    // and a state per "rest of line" marker.
    const int frontier = 0;
    const int accept = 1;
    out.state_names = {"frontier", "accept"};
    std::map<std::pair<std::string, int>, int> at_state;
    std::map<std::string, int> rest_state;
    for (const auto& sym : sys.stack_alphabet) {
        for (int lvl : {1, 2}) {
            at_state[{sym, lvl}] = static_cast<int>(out.state_names.size());
            out.state_names.push_back("at" + letter_atom(sym, lvl));
        }
        rest_state[sym] = static_cast<int>(out.state_names.size());
        out.state_names.push_back("rest(" + (sym == kBottomSym ? kBottomTreeSym : sym) +
                                  ")");
    }
    out.num_states = static_cast<int>(out.state_names.size());
    out.initial = frontier;
    out.finals = {accept};
    // Child slots: a left child is a further letter (never the bottom),
    // a right child is a rest-of-line marker, either may be absent, and
    // a block must not be followed by one starting with the same level-1
    // letter.
    std::vector<std::pair<int, std::string>> lefts{{frontier, ""}};
    for (const auto& sym : sys.stack_alphabet)
        if (sym != kBottomSym) {
            lefts.push_back({at_state[{sym, 1}], sym});
            lefts.push_back({at_state[{sym, 2}], ""});
        }
    std::vector<std::pair<int, std::string>> rights{{frontier, ""}};
    for (const auto& sym : sys.stack_alphabet) rights.push_back({rest_state[sym], sym});
    auto letter_transitions = [&](const Atom& label, int state) {
        for (const auto& [left, lsym] : lefts)
            for (const auto& [right, rsym] : rights) {
                if (!lsym.empty() && lsym == rsym) continue;
                out.add_trans({label}, state, left, right);
            }
    };
    for (const auto& sym : sys.stack_alphabet) {
        if (sym == kBottomSym) continue;
        letter_transitions(letter_atom(sym, 1), at_state[{sym, 1}]);
        letter_transitions(letter_atom(sym, 2), at_state[{sym, 2}]);
    }
    letter_transitions(kBottomAtom, at_state[{kBottomSym, 1}]);
    for (const auto& [left, lsym] : lefts)
        for (const auto& [right, rsym] : rights) {
            if (!lsym.empty() && lsym == rsym) continue;
            const int state = lsym.empty() ? rest_state[kBottomSym] : rest_state[lsym];
            out.add_trans({kEpsAtom}, state, left, right);
        }
    for (const auto& q : sys.states)
        out.add_trans({state_atom(q)}, accept, at_state[{kBottomSym, 1}], frontier);
    return out;
}

}  // namespace cpg
