/* stack.cc -- level-2 collapsible stacks and their operations */

#include "cpg/stack.hh"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace cpg {

Letter plain(std::string sym) { return Letter{std::move(sym), 1, 0}; }

Letter linked(std::string sym, int lnk) { return Letter{std::move(sym), 2, lnk}; }

Stack2 bottom_stack() { return Stack2{{{plain(kBottomSym)}}}; }

StackOp push1(std::string sym) { return StackOp{OpKind::Push1, std::move(sym)}; }
StackOp push2(std::string sym) { return StackOp{OpKind::Push2, std::move(sym)}; }
StackOp clone2() { return StackOp{OpKind::Clone2, ""}; }
StackOp pop1() { return StackOp{OpKind::Pop1, ""}; }
StackOp pop2() { return StackOp{OpKind::Pop2, ""}; }
StackOp collapse() { return StackOp{OpKind::Collapse, ""}; }

std::string show_op(const StackOp& op) {
    switch (op.kind) {
        case OpKind::Push1: return "push " + op.sym + " 1";
        case OpKind::Push2: return "push " + op.sym + " 2";
        case OpKind::Clone2: return "clone2";
        case OpKind::Pop1: return "pop1";
        case OpKind::Pop2: return "pop2";
        case OpKind::Collapse: return "collapse";
    }
    return "?";
}

std::optional<Stack2> apply_op(const Stack2& s, const StackOp& op) {
    const int n = s.width();
    const Word& top = s.words.back();
    Stack2 r = s;
    switch (op.kind) {
        case OpKind::Push1:
            if (op.sym == kBottomSym) return std::nullopt;
            r.words.back().push_back(plain(op.sym));
            return r;
        case OpKind::Push2:
            // A fresh level-2 link always points one word below the top.
            if (op.sym == kBottomSym) return std::nullopt;
            r.words.back().push_back(linked(op.sym, n - 1));
            return r;
        case OpKind::Clone2:
            r.words.push_back(top);
            return r;
        case OpKind::Pop1:
            if (top.size() <= 1) return std::nullopt;
            r.words.back().pop_back();
            return r;
        case OpKind::Pop2:
            if (n <= 1) return std::nullopt;
            r.words.pop_back();
            return r;
        case OpKind::Collapse: {
            const Letter& t1 = top.back();
            if (t1.lvl == 2) {
                if (t1.lnk <= 0) return std::nullopt;
                r.words.resize(t1.lnk);
                return r;
            }
            // Level-1 links always point to the preceding letter.
            if (top.size() <= 1) return std::nullopt;
            r.words.back().pop_back();
            return r;
        }
    }
    return std::nullopt;
}

const std::string& sym_of(const Stack2& s) { return s.top1().sym; }

int lvl_of(const Stack2& s) { return s.top1().lvl; }

int lnk_of(const Stack2& s) {
    const Letter& t = s.top1();
    return t.lvl == 2 ? t.lnk : static_cast<int>(s.top2().size()) - 1;
}

bool valid_stack(const Stack2& s, std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (s.words.empty()) return fail("stack has no words");
    for (size_t i = 0; i < s.words.size(); ++i) {
        const Word& w = s.words[i];
        if (w.empty()) return fail("word " + std::to_string(i + 1) + " is empty");
        for (size_t p = 0; p < w.size(); ++p) {
            const Letter& a = w[p];
            if (a.lvl != 1 && a.lvl != 2)
                return fail("letter with collapse level other than 1 or 2");
            if (a.sym == kBottomSym) {
                if (p != 0 || a.lvl != 1)
                    return fail("bottom symbol away from a word start in word " +
                                std::to_string(i + 1));
            } else if (p == 0) {
                return fail("word " + std::to_string(i + 1) +
                            " does not start with the bottom symbol");
            }
            if (a.lvl == 2) {
                if (a.lnk < 0) return fail("negative link target");
                if (a.lnk == static_cast<int>(i)) continue;  // fresh push at width i+1
                // Otherwise the letter must be cloned from the word below,
                // including everything to its left.
                if (i == 0 || s.words[i - 1].size() <= p ||
                    !std::equal(w.begin(), w.begin() + static_cast<long>(p) + 1,
                                s.words[i - 1].begin()))
                    return fail("link target " + std::to_string(a.lnk) + " in word " +
                                std::to_string(i + 1) + " is neither fresh nor cloned");
            }
        }
    }
    return true;
}

bool word_prefix(const Word& w, const Word& v) {
    return w.size() <= v.size() && std::equal(w.begin(), w.end(), v.begin());
}

Word word_lcp(const Word& w, const Word& v) {
    size_t i = 0;
    while (i < w.size() && i < v.size() && w[i] == v[i]) ++i;
    return Word(w.begin(), w.begin() + static_cast<long>(i));
}

bool substack_le(const Stack2& s1, const Stack2& s2) {
    const int n1 = s1.width(), n2 = s2.width();
    if (n1 > n2) return false;
    for (int i = 0; i + 1 < n1; ++i)
        if (s1.words[i] != s2.words[i]) return false;
    // Pop2 down to width n1, then Pop1 within the remaining top word.
    return !s1.words.back().empty() && word_prefix(s1.words.back(), s2.words[n1 - 1]);
}

bool prefix_le(const Stack2& s, const Stack2& t) {
    const int n = s.width();
    if (n > t.width()) return false;
    for (int i = 0; i + 1 < n; ++i)
        if (s.words[i] != t.words[i]) return false;
    for (int i = n - 1; i < t.width(); ++i)
        if (!word_prefix(s.words.back(), t.words[i])) return false;
    return true;
}

ReplacedStack replace_prefix(const Stack2& t, const Stack2& s, const Stack2& u) {
    if (!prefix_le(s, t)) throw std::invalid_argument("replace_prefix: s is not a prefix of t");
    if (s.width() != u.width())
        throw std::invalid_argument("replace_prefix: replacement width differs");
    const int n = s.width();
    Stack2 r;
    r.words.assign(u.words.begin(), u.words.end() - 1);
    for (int i = n - 1; i < t.width(); ++i) {
        // t's word i = s's last word followed by a residue; keep the residue
        // and put u's last word in front of it.
        Word w = u.words.back();
        w.insert(w.end(), t.words[i].begin() + static_cast<long>(s.words.back().size()),
                 t.words[i].end());
        r.words.push_back(std::move(w));
    }
    return ReplacedStack{r, valid_stack(r)};
}

LLOrder ll_compare(const Stack2& s, const Stack2& t) {
    if (s == t) return LLOrder::Equal;
    const int k = s.width();
    if (k != t.width()) return k < t.width() ? LLOrder::Less : LLOrder::Greater;
    for (int i = 0; i + 1 < k; ++i)
        if (s.words[i] != t.words[i]) return LLOrder::Incomparable;
    // Equal widths and equal lower words: compare the top words against the
    // word below the top (the bottom word itself for width 1).
    const Word below = k >= 2 ? s.words[k - 2] : Word{plain(kBottomSym)};
    const Word& x = s.words.back();
    const Word& y = t.words.back();
    const bool x_below = word_prefix(x, below);
    const bool y_below = word_prefix(y, below);
    // Tops that sit inside the word below come first, longer before shorter;
    // tops extending beyond it come after, shorter before longer.  Chains of
    // the two generating clauses connect exactly these combinations.
    if (x_below && y_below) return word_prefix(y, x) ? LLOrder::Less : LLOrder::Greater;
    if (x_below && !y_below) return LLOrder::Less;
    if (!x_below && y_below) return LLOrder::Greater;
    if (word_prefix(x, y)) return LLOrder::Less;
    if (word_prefix(y, x)) return LLOrder::Greater;
    return LLOrder::Incomparable;
}

MilestoneChain milestones(const Stack2& s, bool generalised) {
    const int k = s.width();
    std::vector<Stack2> out;
    Word w_prev{plain(kBottomSym)};
    for (int i = 0; i < k; ++i) {
        const Word& w_next = s.words[i];
        const Word& w_here = i == 0 ? w_prev : s.words[i - 1];
        const Word g = word_lcp(w_here, w_next);
        std::vector<Word> tops;
        for (size_t len = g.size(); len <= w_next.size(); ++len)
            tops.emplace_back(w_next.begin(), w_next.begin() + static_cast<long>(len));
        if (generalised)
            for (size_t len = g.size() + 1; len <= w_here.size(); ++len)
                tops.emplace_back(w_here.begin(), w_here.begin() + static_cast<long>(len));
        for (Word& v : tops) {
            Stack2 m;
            m.words.assign(s.words.begin(), s.words.begin() + i);
            m.words.push_back(std::move(v));
            out.push_back(std::move(m));
        }
    }
    std::sort(out.begin(), out.end(), [&](const Stack2& a, const Stack2& b) {
        return ll_compare(a, b) == LLOrder::Less;
    });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Word down0(const Word& w) {
    Word r = w;
    for (Letter& a : r)
        if (a.lvl == 2) a.lnk = 0;
    return r;
}

Stack2 down0(const Stack2& s) {
    Stack2 r = s;
    for (Word& w : r.words) w = down0(w);
    return r;
}

std::string show_word(const Word& w) {
    std::string out;
    for (size_t i = 0; i < w.size(); ++i) {
        if (i) out += ' ';
        out += w[i].sym;
        if (w[i].lvl == 2) out += "^2@" + std::to_string(w[i].lnk);
    }
    return out;
}

std::string show_stack(const Stack2& s) {
    std::string out;
    for (size_t i = 0; i < s.words.size(); ++i) {
        if (i) out += " : ";
        out += show_word(s.words[i]);
    }
    return out;
}

namespace {

Letter parse_letter(const std::string& tok, size_t pos) {
    const size_t caret = tok.find('^');
    if (caret == std::string::npos) return plain(tok);
    const size_t at = tok.find('@', caret);
    if (tok.compare(caret, 2, "^2") != 0 || at != caret + 2 || at + 1 >= tok.size())
        throw std::runtime_error("bad letter '" + tok + "' at offset " + std::to_string(pos));
    const std::string sym = tok.substr(0, caret);
    int lnk = 0;
    try {
        size_t used = 0;
        lnk = std::stoi(tok.substr(at + 1), &used);
        if (used != tok.size() - at - 1 || lnk < 0) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw std::runtime_error("bad link target in '" + tok + "' at offset " +
                                 std::to_string(pos));
    }
    return linked(sym, lnk);
}

Word parse_word_at(const std::string& text, size_t base) {
    Word w;
    size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && text[i] == ' ') ++i;
        if (i >= text.size()) break;
        size_t j = i;
        while (j < text.size() && text[j] != ' ') ++j;
        w.push_back(parse_letter(text.substr(i, j - i), base + i));
        i = j;
    }
    if (w.empty()) throw std::runtime_error("empty word at offset " + std::to_string(base));
    return w;
}

}  // namespace

Word parse_word(const std::string& text) { return parse_word_at(text, 0); }

Stack2 parse_stack(const std::string& text) {
    Stack2 s;
    size_t start = 0;
    while (true) {
        size_t colon = text.find(':', start);
        const std::string part =
            colon == std::string::npos ? text.substr(start) : text.substr(start, colon - start);
        s.words.push_back(parse_word_at(part, start));
        if (colon == std::string::npos) break;
        start = colon + 1;
    }
    return s;
}

}  // namespace cpg
