/* tree.cc -- binary trees, tree literals and track convolutions */

#include "cpg/tree.hh"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "cpg/stack.hh"

namespace cpg {

namespace {

[[noreturn]] void parse_fail(const std::string& what, const std::string& text) {
    throw std::invalid_argument("tree parse error: " + what + " in \"" + text + "\"");
}

}  // namespace

Atom state_atom(const std::string& q) { return "q:" + q; }

Atom letter_atom(const std::string& sym, int lvl) {
    const std::string spelled = sym == kBottomSym ? kBottomTreeSym : sym;
    return "(" + spelled + "," + std::to_string(lvl) + ")";
}

bool is_state_atom(const Atom& a) { return a.rfind("q:", 0) == 0; }

bool is_letter_atom(const Atom& a) {
    return a.size() >= 2 && a.front() == '(' && a.back() == ')';
}

bool is_eps_atom(const Atom& a) { return a == kEpsAtom; }

std::string state_of_atom(const Atom& a) {
    if (!is_state_atom(a)) throw std::invalid_argument("not a state atom: " + a);
    return a.substr(2);
}

std::pair<std::string, int> letter_of_atom(const Atom& a) {
    if (!is_letter_atom(a)) throw std::invalid_argument("not a letter atom: " + a);
    const auto comma = a.rfind(',');
    if (comma == std::string::npos || comma < 2 || comma + 2 != a.size() - 1)
        throw std::invalid_argument("malformed letter atom: " + a);
    std::string sym = a.substr(1, comma - 1);
    const char lvl = a[comma + 1];
    if (lvl != '1' && lvl != '2')
        throw std::invalid_argument("malformed letter atom: " + a);
    if (sym == kBottomTreeSym) sym = kBottomSym;
    return {sym, lvl - '0'};
}

bool valid_tree(const LabelledTree& t, std::string* why) {
    auto fail = [&](const std::string& reason) {
        if (why != nullptr) *why = reason;
        return false;
    };
    for (const auto& [addr, atom] : t.nodes) {
        if (atom.empty()) return fail("empty label at address \"" + addr + "\"");
        for (char c : addr)
            if (c != '0' && c != '1')
                return fail("bad address character in \"" + addr + "\"");
        if (!addr.empty() && t.nodes.count(addr.substr(0, addr.size() - 1)) == 0)
            return fail("address \"" + addr + "\" lacks its parent");
    }
    return true;
}

LabelledTree subtree(const LabelledTree& t, const std::string& d) {
    LabelledTree out;
    for (auto it = t.nodes.lower_bound(d); it != t.nodes.end(); ++it) {
        if (it->first.compare(0, d.size(), d) != 0) break;
        out.nodes.emplace(it->first.substr(d.size()), it->second);
    }
    return out;
}

std::string rightmost_leaf(const LabelledTree& t) {
    if (t.nodes.empty()) throw std::invalid_argument("rightmost_leaf of empty tree");
    return t.nodes.rbegin()->first;
}

bool on_rightmost_branch(const LabelledTree& t, const std::string& d) {
    if (!t.has(d)) return false;
    const std::string leaf = rightmost_leaf(t);
    return leaf.compare(0, d.size(), d) == 0;
}

namespace {

void show_tree_at(const LabelledTree& t, const std::string& d, std::string& out) {
    if (!t.has(d)) {
        out += '-';
        return;
    }
    out += t.at(d);
    out += '(';
    show_tree_at(t, d + "0", out);
    out += ',';
    show_tree_at(t, d + "1", out);
    out += ')';
}

struct TreeParser {
    const std::string& text;
    size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    char peek() {
        skip_ws();
        if (pos >= text.size()) parse_fail("unexpected end of input", text);
        return text[pos];
    }

    void expect(char c) {
        if (peek() != c)
            parse_fail(std::string("expected '") + c + "'", text);
        ++pos;
    }

    Atom read_atom() {
        skip_ws();
        if (pos >= text.size()) parse_fail("missing label", text);
        if (text[pos] == '(') {
            const auto close = text.find(')', pos);
            if (close == std::string::npos) parse_fail("unterminated letter", text);
            Atom a = text.substr(pos, close - pos + 1);
            pos = close + 1;
            return a;
        }
        size_t end = pos;
        while (end < text.size() && text[end] != '(' && text[end] != ',' &&
               text[end] != ')' && !std::isspace(static_cast<unsigned char>(text[end])))
            ++end;
        if (end == pos) parse_fail("missing label", text);
        Atom a = text.substr(pos, end - pos);
        pos = end;
        return a;
    }

    void parse_node(const std::string& addr, LabelledTree& t) {
        t.nodes[addr] = read_atom();
        expect('(');
        parse_child(addr + "0", t);
        expect(',');
        parse_child(addr + "1", t);
        expect(')');
    }

    void parse_child(const std::string& addr, LabelledTree& t) {
        if (peek() == '-') {
            ++pos;
            return;
        }
        parse_node(addr, t);
    }
};

}  // namespace

std::string show_tree(const LabelledTree& t) {
    std::string out;
    show_tree_at(t, "", out);
    return out;
}

LabelledTree parse_tree(const std::string& text) {
    TreeParser p{text};
    LabelledTree t;
    p.parse_child("", t);
    p.skip_ws();
    if (p.pos != text.size()) parse_fail("trailing input", text);
    return t;
}

TrackedTree tracked(const LabelledTree& t) {
    TrackedTree out;
    out.tracks = 1;
    for (const auto& [addr, atom] : t.nodes) out.nodes[addr] = {atom};
    return out;
}

TrackedTree convolution(const std::vector<LabelledTree>& ts) {
    if (ts.empty()) throw std::invalid_argument("convolution of no trees");
    TrackedTree out;
    out.tracks = static_cast<int>(ts.size());
    std::set<std::string> domain;
    for (const auto& t : ts)
        for (const auto& [addr, atom] : t.nodes) domain.insert(addr);
    for (const auto& addr : domain) {
        TrackLabel label;
        label.reserve(ts.size());
        for (const auto& t : ts)
            label.push_back(t.has(addr) ? t.at(addr) : kPadAtom);
        out.nodes.emplace(addr, std::move(label));
    }
    return out;
}

LabelledTree track_of(const TrackedTree& t, int track) {
    if (track < 0 || track >= t.tracks)
        throw std::invalid_argument("track index out of range");
    LabelledTree out;
    for (const auto& [addr, label] : t.nodes)
        if (label[track] != kPadAtom) out.nodes.emplace(addr, label[track]);
    return out;
}

std::string show_track_label(const TrackLabel& l) {
    if (l.size() == 1) return l[0];
    std::string out = "(";
    for (size_t i = 0; i < l.size(); ++i) {
        if (i > 0) out += '|';
        out += l[i];
    }
    out += ')';
    return out;
}

TrackLabel parse_track_label(const std::string& text) {
    if (text.find('|') == std::string::npos) return {text};
    if (text.size() < 2 || text.front() != '(' || text.back() != ')')
        throw std::invalid_argument("malformed track label: " + text);
    TrackLabel out;
    const std::string inner = text.substr(1, text.size() - 2);
    size_t start = 0;
    while (true) {
        const auto bar = inner.find('|', start);
        if (bar == std::string::npos) {
            out.push_back(inner.substr(start));
            break;
        }
        out.push_back(inner.substr(start, bar - start));
        start = bar + 1;
    }
    for (const auto& a : out)
        if (a.empty()) throw std::invalid_argument("malformed track label: " + text);
    return out;
}

}  // namespace cpg
