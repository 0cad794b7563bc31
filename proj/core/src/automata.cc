/* automata.cc -- bottom-up tree automata and the track calculus */

#include "cpg/automata.hh"

#include <algorithm>
#include <deque>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace cpg {

namespace {

[[noreturn]] void automata_fail(const std::string& what) {
    throw std::invalid_argument("automata: " + what);
}

std::vector<Atom> padded_base(const std::vector<Atom>& base) {
    std::vector<Atom> out = base;
    out.push_back(kPadAtom);
    return out;
}

bool all_padding(const TrackLabel& l) {
    return std::all_of(l.begin(), l.end(), [](const Atom& a) { return a == kPadAtom; });
}

}  // namespace

std::vector<TrackLabel> TrackAlphabet::universe() const {
    if (bases.empty()) automata_fail("alphabet with no tracks");
    std::vector<TrackLabel> out;
    if (tracks() == 1) {
        for (const Atom& a : bases[0]) out.push_back({a});
        return out;
    }
    out.push_back({});
    for (const auto& base : bases) {
        std::vector<TrackLabel> next;
        for (const auto& prefix : out)
            for (const Atom& a : padded_base(base)) {
                TrackLabel l = prefix;
                l.push_back(a);
                next.push_back(std::move(l));
            }
        out = std::move(next);
    }
    std::erase_if(out, all_padding);
    return out;
}

bool TrackAlphabet::contains(const TrackLabel& l) const {
    if (static_cast<int>(l.size()) != tracks()) return false;
    for (int i = 0; i < tracks(); ++i) {
        if (l[i] == kPadAtom) {
            if (tracks() == 1) return false;
            continue;
        }
        if (std::find(bases[i].begin(), bases[i].end(), l[i]) == bases[i].end()) return false;
    }
    return !all_padding(l);
}

void TreeAutomaton::add_trans(const TrackLabel& label, int state, int child0, int child1) {
    auto& bucket = delta[label];
    const TreeTrans t{state, child0, child1};
    if (std::find(bucket.begin(), bucket.end(), t) == bucket.end()) bucket.push_back(t);
}

std::string TreeAutomaton::name_of(int state) const {
    if (state >= 0 && state < static_cast<int>(state_names.size()) &&
        !state_names[state].empty())
        return state_names[state];
    return "s" + std::to_string(state);
}

bool valid_automaton(const TreeAutomaton& a, std::string* why) {
    auto fail = [&](const std::string& reason) {
        if (why != nullptr) *why = reason;
        return false;
    };
    auto in_range = [&](int q) { return q >= 0 && q < a.num_states; };
    if (a.num_states <= 0) return fail("no states");
    if (!in_range(a.initial)) return fail("initial state out of range");
    for (int f : a.finals)
        if (!in_range(f)) return fail("final state out of range");
    for (const auto& [label, bucket] : a.delta) {
        if (!a.alphabet.contains(label))
            return fail("transition label outside the alphabet: " + show_track_label(label));
        for (const auto& t : bucket)
            if (!in_range(t.state) || !in_range(t.child0) || !in_range(t.child1))
                return fail("transition state out of range");
    }
    if (!a.state_names.empty() &&
        static_cast<int>(a.state_names.size()) != a.num_states)
        return fail("state name table has the wrong size");
    return true;
}

std::set<int> run_states(const TreeAutomaton& a, const TrackedTree& t) {
    if (t.tracks != a.alphabet.tracks())
        automata_fail("tree has " + std::to_string(t.tracks) + " tracks, automaton expects " +
                      std::to_string(a.alphabet.tracks()));
    if (t.nodes.empty()) return {a.initial};
    std::map<std::string, std::set<int>> states;
    for (auto it = t.nodes.rbegin(); it != t.nodes.rend(); ++it) {
        const auto& [addr, label] = *it;
        if (!a.alphabet.contains(label))
            automata_fail("tree label outside the alphabet: " + show_track_label(label));
        auto child_states = [&](char bit) -> std::set<int> {
            auto found = states.find(addr + bit);
            if (found == states.end()) return {a.initial};
            return found->second;
        };
        const std::set<int> s0 = child_states('0');
        const std::set<int> s1 = child_states('1');
        std::set<int> here;
        auto bucket = a.delta.find(label);
        if (bucket != a.delta.end())
            for (const auto& tr : bucket->second)
                if (s0.count(tr.child0) != 0 && s1.count(tr.child1) != 0) here.insert(tr.state);
        states[addr] = std::move(here);
    }
    return states[""];
}

bool accepts(const TreeAutomaton& a, const TrackedTree& t) {
    if (t.nodes.empty()) return a.finals.count(a.initial) != 0;
    const std::set<int> roots = run_states(a, t);
    return std::any_of(roots.begin(), roots.end(),
                       [&](int q) { return a.finals.count(q) != 0; });
}

bool accepts(const TreeAutomaton& a, const LabelledTree& t) { return accepts(a, tracked(t)); }

std::optional<TrackedTree> nonempty_witness(const TreeAutomaton& a) {
    const int tracks = a.alphabet.tracks();
    if (a.finals.count(a.initial) != 0) return TrackedTree{tracks, {}};
    std::map<int, TrackedTree> witness;
    auto graft = [&](TrackedTree& into, const std::string& prefix, int child) {
        if (child == a.initial) return;
        for (const auto& [addr, label] : witness.at(child).nodes)
            into.nodes.emplace(prefix + addr, label);
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& [label, bucket] : a.delta)
            for (const auto& tr : bucket) {
                if (witness.count(tr.state) != 0) continue;
                const bool ok0 = tr.child0 == a.initial || witness.count(tr.child0) != 0;
                const bool ok1 = tr.child1 == a.initial || witness.count(tr.child1) != 0;
                if (!ok0 || !ok1) continue;
                TrackedTree t{tracks, {{"", label}}};
                graft(t, "0", tr.child0);
                graft(t, "1", tr.child1);
                witness.emplace(tr.state, std::move(t));
                changed = true;
            }
    }
    for (int f : a.finals) {
        auto found = witness.find(f);
        if (found != witness.end()) return found->second;
    }
    return std::nullopt;
}

bool empty_language(const TreeAutomaton& a) { return !nonempty_witness(a).has_value(); }

TreeAutomaton product_automaton(const TreeAutomaton& a, const TreeAutomaton& b) {
    if (a.alphabet != b.alphabet) automata_fail("product over different alphabets");
    TreeAutomaton out;
    out.alphabet = a.alphabet;
    out.num_states = a.num_states * b.num_states;
    auto id = [&](int q, int p) { return q * b.num_states + p; };
    out.initial = id(a.initial, b.initial);
    for (int f : a.finals)
        for (int g : b.finals) out.finals.insert(id(f, g));
    for (const auto& [label, bucket] : a.delta) {
        auto other = b.delta.find(label);
        if (other == b.delta.end()) continue;
        auto& combined = out.delta[label];
        for (const auto& x : bucket)
            for (const auto& y : other->second)
                combined.push_back({id(x.state, y.state), id(x.child0, y.child0),
                                    id(x.child1, y.child1)});
    }
    return out;
}

TreeAutomaton union_automaton(const TreeAutomaton& a, const TreeAutomaton& b) {
    if (a.alphabet != b.alphabet) automata_fail("union over different alphabets");
    TreeAutomaton out;
    out.alphabet = a.alphabet;
    out.num_states = a.num_states + b.num_states + 1;
    out.initial = a.num_states + b.num_states;
    auto copy_side = [&](const TreeAutomaton& side, int offset) {
        for (int f : side.finals) out.finals.insert(f + offset);
        if (side.finals.count(side.initial) != 0) out.finals.insert(out.initial);
        for (const auto& [label, bucket] : side.delta)
            for (const auto& tr : bucket) {
                std::vector<int> c0{tr.child0 + offset};
                std::vector<int> c1{tr.child1 + offset};
                if (tr.child0 == side.initial) c0.push_back(out.initial);
                if (tr.child1 == side.initial) c1.push_back(out.initial);
                for (int x : c0)
                    for (int y : c1) out.add_trans(label, tr.state + offset, x, y);
            }
    };
    copy_side(a, 0);
    copy_side(b, a.num_states);
    return out;
}

TreeAutomaton complement_automaton(const TreeAutomaton& a) {
    const std::vector<TrackLabel> labels = a.alphabet.universe();
    std::map<std::set<int>, int> ids;
    std::vector<std::set<int>> subsets;
    auto intern = [&](const std::set<int>& s) {
        auto found = ids.find(s);
        if (found != ids.end()) return found->second;
        const int id = static_cast<int>(subsets.size());
        ids.emplace(s, id);
        subsets.push_back(s);
        return id;
    };
    auto step = [&](const TrackLabel& label, const std::set<int>& s0, const std::set<int>& s1) {
        std::set<int> next;
        auto bucket = a.delta.find(label);
        if (bucket != a.delta.end())
            for (const auto& tr : bucket->second)
                if (s0.count(tr.child0) != 0 && s1.count(tr.child1) != 0) next.insert(tr.state);
        return next;
    };
    TreeAutomaton out;
    out.alphabet = a.alphabet;
    out.initial = intern({a.initial});
    // Closes the discovered subsets under the deterministic step on every
    // label; each (label, child pair) is handled exactly once.
    for (size_t fresh = 0; fresh < subsets.size(); ++fresh)
        for (const auto& label : labels)
            for (size_t other = 0; other <= fresh; ++other) {
                for (const auto& [s0, s1] :
                     {std::pair(fresh, other), std::pair(other, fresh)}) {
                    const std::set<int> next = step(label, subsets[s0], subsets[s1]);
                    const int next_id = intern(next);
                    out.add_trans(label, next_id, static_cast<int>(s0),
                                  static_cast<int>(s1));
                }
            }
    out.num_states = static_cast<int>(subsets.size());
    for (int i = 0; i < out.num_states; ++i) {
        const auto& s = subsets[i];
        const bool hits_final = std::any_of(s.begin(), s.end(), [&](int q) {
            return a.finals.count(q) != 0;
        });
        if (!hits_final) out.finals.insert(i);
    }
    return out;
}

TreeAutomaton cylindrify(const TreeAutomaton& a, int position,
                         const std::vector<Atom>& new_base) {
    const int k = a.alphabet.tracks();
    if (position < 0 || position > k) automata_fail("cylindrify position out of range");
    TreeAutomaton out;
    out.alphabet = a.alphabet;
    out.alphabet.bases.insert(out.alphabet.bases.begin() + position, new_base);
    // Nodes carried by the new track alone are invisible to the original
    // automaton; a dedicated state consumes such subtrees wherever the
    // original expected its frontier.
    const int pad = a.num_states;
    out.num_states = a.num_states + 1;
    out.initial = a.initial;
    out.finals = a.finals;
    for (const auto& [label, bucket] : a.delta)
        for (const Atom& x : padded_base(new_base)) {
            TrackLabel widened = label;
            widened.insert(widened.begin() + position, x);
            for (const auto& tr : bucket) {
                std::vector<int> c0{tr.child0};
                std::vector<int> c1{tr.child1};
                if (tr.child0 == a.initial) c0.push_back(pad);
                if (tr.child1 == a.initial) c1.push_back(pad);
                for (int y : c0)
                    for (int z : c1) out.add_trans(widened, tr.state, y, z);
            }
        }
    for (const Atom& x : new_base) {
        TrackLabel pure(static_cast<size_t>(k) + 1, kPadAtom);
        pure[position] = x;
        for (int y : {a.initial, pad})
            for (int z : {a.initial, pad}) out.add_trans(pure, pad, y, z);
    }
    // A tree living on the new track alone projects to the empty tree.
    if (a.finals.count(a.initial) != 0) out.finals.insert(pad);
    return out;
}

TreeAutomaton project(const TreeAutomaton& a, int position) {
    const int k = a.alphabet.tracks();
    if (k < 2) automata_fail("cannot project the only track");
    if (position < 0 || position >= k) automata_fail("project position out of range");
    auto invisible = [&](const TrackLabel& label) {
        for (int i = 0; i < k; ++i)
            if (i != position && label[i] != kPadAtom) return false;
        return true;
    };
    // States realisable at the root of a tree that is padding on every
    // surviving track; such trees vanish from the projection.
    std::set<int> ghost;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& [label, bucket] : a.delta) {
            if (!invisible(label)) continue;
            for (const auto& tr : bucket) {
                if (ghost.count(tr.state) != 0) continue;
                const bool ok0 = tr.child0 == a.initial || ghost.count(tr.child0) != 0;
                const bool ok1 = tr.child1 == a.initial || ghost.count(tr.child1) != 0;
                if (ok0 && ok1) {
                    ghost.insert(tr.state);
                    changed = true;
                }
            }
        }
    }
    TreeAutomaton out;
    out.alphabet = a.alphabet;
    out.alphabet.bases.erase(out.alphabet.bases.begin() + position);
    out.num_states = a.num_states;
    out.initial = a.initial;
    out.finals = a.finals;
    out.state_names = a.state_names;
    for (const auto& [label, bucket] : a.delta) {
        if (invisible(label)) continue;
        TrackLabel narrowed = label;
        narrowed.erase(narrowed.begin() + position);
        for (const auto& tr : bucket) {
            std::vector<int> c0{tr.child0};
            std::vector<int> c1{tr.child1};
            if (ghost.count(tr.child0) != 0) c0.push_back(a.initial);
            if (ghost.count(tr.child1) != 0) c1.push_back(a.initial);
            for (int x : c0)
                for (int y : c1) out.add_trans(narrowed, tr.state, x, y);
        }
    }
    for (int f : a.finals)
        if (ghost.count(f) != 0) out.finals.insert(out.initial);
    return out;
}

TreeAutomaton well_formed_convolution(const TrackAlphabet& alphabet) {
    const int k = alphabet.tracks();
    TreeAutomaton out;
    out.alphabet = alphabet;
    // State 0 sits below the leaves; state 1 + m records the set m of
    // tracks still live at a node.
    out.num_states = 1 + (1 << k);
    out.initial = 0;
    out.finals = {1 + ((1 << k) - 1)};
    for (const auto& label : alphabet.universe()) {
        int live = 0;
        for (int i = 0; i < k; ++i)
            if (label[i] != kPadAtom) live |= 1 << i;
        std::vector<int> child_states{0};
        for (int m = live;; m = (m - 1) & live) {
            if (m != 0) child_states.push_back(1 + m);
            if (m == 0) break;
        }
        for (int x : child_states)
            for (int y : child_states) out.add_trans(label, 1 + live, x, y);
    }
    return out;
}

TreeAutomaton rel_compose(const TreeAutomaton& r, const TreeAutomaton& s) {
    if (r.alphabet.tracks() != 2 || s.alphabet.tracks() != 2)
        automata_fail("rel_compose expects 2-track automata");
    if (r.alphabet.bases[1] != s.alphabet.bases[0])
        automata_fail("rel_compose over mismatched middle alphabets");
    const TreeAutomaton r3 = cylindrify(r, 2, s.alphabet.bases[1]);
    const TreeAutomaton s3 = cylindrify(s, 0, r.alphabet.bases[0]);
    const TreeAutomaton wf = well_formed_convolution(r3.alphabet);
    const TreeAutomaton joint = product_automaton(product_automaton(r3, s3), wf);
    return project(joint, 1);
}

std::string show_automaton(const TreeAutomaton& a) {
    std::ostringstream out;
    out << "states:";
    for (int q = 0; q < a.num_states; ++q) out << ' ' << a.name_of(q);
    out << '\n';
    out << "initial: " << a.name_of(a.initial) << '\n';
    out << "final:";
    for (int f : a.finals) out << ' ' << a.name_of(f);
    out << '\n';
    for (const auto& [label, bucket] : a.delta)
        for (const auto& tr : bucket)
            out << "trans: " << a.name_of(tr.state) << ' ' << show_track_label(label) << ' '
                << a.name_of(tr.child0) << ' ' << a.name_of(tr.child1) << '\n';
    return out.str();
}

TreeAutomaton parse_automaton(const std::string& text) {
    TreeAutomaton out;
    std::map<std::string, int> ids;
    std::istringstream lines(text);
    std::string line;
    int lineno = 0;
    bool saw_states = false;
    auto fail = [&](const std::string& what) -> void {
        throw std::runtime_error("automaton parse error at line " + std::to_string(lineno) +
                                 ": " + what);
    };
    auto id_of = [&](const std::string& name) {
        auto found = ids.find(name);
        if (found == ids.end()) fail("unknown state " + name);
        return found->second;
    };
    std::vector<std::set<Atom>> seen_atoms;
    while (std::getline(lines, line)) {
        ++lineno;
        // A comment starts at a '#' that opens a token; the padding atom
        // inside a track label never does.
        for (size_t at = line.find('#'); at != std::string::npos;
             at = line.find('#', at + 1)) {
            if (at == 0 || std::isspace(static_cast<unsigned char>(line[at - 1]))) {
                line.resize(at);
                break;
            }
        }
        std::istringstream words(line);
        std::string directive;
        if (!(words >> directive)) continue;
        if (directive == "states:") {
            std::string name;
            while (words >> name) {
                if (!ids.emplace(name, static_cast<int>(out.state_names.size())).second)
                    fail("duplicate state " + name);
                out.state_names.push_back(name);
            }
            out.num_states = static_cast<int>(out.state_names.size());
            saw_states = true;
        } else if (directive == "initial:") {
            std::string name;
            if (!(words >> name)) fail("missing initial state");
            out.initial = id_of(name);
        } else if (directive == "final:") {
            std::string name;
            while (words >> name) out.finals.insert(id_of(name));
        } else if (directive == "trans:") {
            std::string state, label, c0, c1;
            if (!(words >> state >> label >> c0 >> c1)) fail("malformed transition");
            const TrackLabel l = parse_track_label(label);
            if (seen_atoms.empty()) seen_atoms.resize(l.size());
            if (l.size() != seen_atoms.size()) fail("inconsistent track count");
            for (size_t i = 0; i < l.size(); ++i)
                if (l[i] != kPadAtom) seen_atoms[i].insert(l[i]);
            out.add_trans(l, id_of(state), id_of(c0), id_of(c1));
        } else {
            fail("unknown directive " + directive);
        }
    }
    if (!saw_states) {
        lineno = 0;
        fail("missing states: line");
    }
    if (seen_atoms.empty()) seen_atoms.resize(1);
    for (const auto& atoms : seen_atoms)
        out.alphabet.bases.emplace_back(atoms.begin(), atoms.end());
    std::string why;
    if (!valid_automaton(out, &why)) {
        lineno = 0;
        fail(why);
    }
    return out;
}

TreeAutomaton load_automaton(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_automaton(buffer.str());
}

WordNFA product_nfa(const WordNFA& a, const WordNFA& b) {
    std::set<std::string> left(a.alphabet.begin(), a.alphabet.end());
    std::set<std::string> right(b.alphabet.begin(), b.alphabet.end());
    if (left != right) automata_fail("word product over different alphabets");
    WordNFA out;
    out.alphabet = a.alphabet;
    for (const auto& q : a.states)
        for (const auto& p : b.states) out.states.push_back(product_state(q, p));
    out.initial = product_state(a.initial, b.initial);
    for (const auto& q : a.finals)
        for (const auto& p : b.finals) out.finals.push_back(product_state(q, p));
    for (const auto& [qf, x, qt] : a.transitions)
        for (const auto& [pf, y, pt] : b.transitions)
            if (x == y) out.transitions.emplace_back(product_state(qf, pf), x,
                                                     product_state(qt, pt));
    return out;
}

ContractionLanguages contraction_languages(const std::vector<std::string>& labels) {
    std::vector<std::string> alphabet = labels;
    if (std::find(alphabet.begin(), alphabet.end(), kEpsLabel) == alphabet.end())
        alphabet.push_back(kEpsLabel);
    std::sort(alphabet.begin(), alphabet.end());
    ContractionLanguages out;
    // "all": words where every silent stretch is closed by a proper label.
    out.all.states = {"done", "open"};
    out.all.alphabet = alphabet;
    out.all.initial = "done";
    out.all.finals = {"done"};
    for (const auto& g : alphabet) {
        if (g == kEpsLabel) {
            out.all.transitions.emplace_back("done", g, "open");
            out.all.transitions.emplace_back("open", g, "open");
        } else {
            out.all.transitions.emplace_back("done", g, "done");
            out.all.transitions.emplace_back("open", g, "done");
        }
    }
    for (const auto& g : alphabet) {
        if (g == kEpsLabel) continue;
        WordNFA lang;
        lang.states = {"wait", "hit"};
        lang.alphabet = alphabet;
        lang.initial = "wait";
        lang.finals = {"hit"};
        lang.transitions.emplace_back("wait", kEpsLabel, "wait");
        lang.transitions.emplace_back("wait", g, "hit");
        out.per_label.emplace(g, lang);
    }
    return out;
}

}  // namespace cpg
