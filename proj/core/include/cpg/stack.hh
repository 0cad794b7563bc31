/* stack.hh -- level-2 collapsible stacks and their operations
 *
 * A level-2 stack is a nonempty sequence of nonempty words over
 * Sigma extended by linked letters (sigma,2,k).  The link target k is
 * stored as the absolute width of the substack a Collapse jumps to,
 * which is the representation under which Clone2 may copy letters
 * verbatim.
 */

#ifndef CPG_STACK_HH_
#define CPG_STACK_HH_

#include <compare>
#include <optional>
#include <string>
#include <vector>

namespace cpg {

/// Reserved spelling of the bottom-of-stack symbol.
inline const std::string kBottomSym = "_";

/// One stack letter.  Level-1 letters have lvl == 1 and lnk == 0; level-2
/// letters carry the absolute width of their collapse target in lnk.
struct Letter {
    std::string sym;
    int lvl = 1;
    int lnk = 0;

    auto operator<=>(const Letter&) const = default;
};

Letter plain(std::string sym);             // level-1 letter
Letter linked(std::string sym, int lnk);   // level-2 letter with target width

using Word = std::vector<Letter>;

/// A level-2 stack.  words.front() is the bottommost word; the top of the
/// stack is words.back().back().
struct Stack2 {
    std::vector<Word> words;

    auto operator<=>(const Stack2&) const = default;

    int width() const { return static_cast<int>(words.size()); }
    const Word& top2() const { return words.back(); }
    const Letter& top1() const { return words.back().back(); }
};

/// The one-word one-letter stack [_].
Stack2 bottom_stack();

enum class OpKind { Push1, Push2, Clone2, Pop1, Pop2, Collapse };

/// A stack operation; sym is meaningful for Push1/Push2 only and must never
/// be the bottom symbol.
struct StackOp {
    OpKind kind;
    std::string sym;

    auto operator<=>(const StackOp&) const = default;
};

StackOp push1(std::string sym);
StackOp push2(std::string sym);
StackOp clone2();
StackOp pop1();
StackOp pop2();
StackOp collapse();

std::string show_op(const StackOp& op);

/// Applies op to s.  Returns nullopt exactly in the "undefined otherwise"
/// cases: popping the last word or letter, or collapsing a level-2 link
/// with target width 0 or a level-1 link on a one-letter top word.
std::optional<Stack2> apply_op(const Stack2& s, const StackOp& op);

/// Topmost symbol of s, i.e. the symbol of words.back().back().
const std::string& sym_of(const Stack2& s);

/// Collapse level of the topmost letter: 1 or 2.
int lvl_of(const Stack2& s);

/// Collapse link of the topmost letter: the stored target width for level-2
/// letters, m-1 for a level-1 letter in a top word of length m.
int lnk_of(const Stack2& s);

/// Checks the stack invariants: every word is nonempty and starts with the
/// bottom symbol, the bottom symbol occurs nowhere else and always at level
/// 1, and every level-2 letter is constructible: a letter with target k in
/// word i (1-based) either satisfies k == i-1 (a fresh push) or is a clone,
/// i.e. word i-1 carries the identical letter at the same position with an
/// identical prefix up to it.  On failure *why (if given) names the first
/// violated property.
bool valid_stack(const Stack2& s, std::string* why = nullptr);

/// True iff w is a (non-strict) prefix of v.
bool word_prefix(const Word& w, const Word& v);

/// Longest common prefix of two words.
Word word_lcp(const Word& w, const Word& v);

/// True iff s1 = Pop1^n(Pop2^m(s2)) for some n, m >= 0.
bool substack_le(const Stack2& s1, const Stack2& s2);

/// True iff the first |s|-1 words of s and t are equal and the last word of
/// s is a word-prefix of every remaining word of t.
bool prefix_le(const Stack2& s, const Stack2& t);

/// Result of a prefix replacement.  The raw word sequence need not satisfy
/// the stack invariants; callers must consult `valid`.
struct ReplacedStack {
    Stack2 raw;
    bool valid;
};

/// The stack obtained from t by replacing its prefix s by u.  Requires
/// prefix_le(s, t) and |s| == |u|; violations throw std::invalid_argument.
/// Always valid when s = Pop2^k(t).
ReplacedStack replace_prefix(const Stack2& t, const Stack2& s, const Stack2& u);

/// Outcome of comparing two stacks in the construction order.
enum class LLOrder { Less, Equal, Greater, Incomparable };

/// The partial construction order on stacks: the least reflexive transitive
/// relation with (1) |s| < |t|, (2) equal widths and shared lower words with
/// t's top a strict prefix of s's top which is a prefix of the word below,
/// (3) equal widths and shared lower words with s's top a strict prefix of
/// t's top which is not a prefix of the word below.  Incomparable is a legal
/// outcome for stacks that no chain of these clauses connects.
LLOrder ll_compare(const Stack2& s, const Stack2& t);

/// Milestones of s, sorted strictly ascending in the construction order.
using MilestoneChain = std::vector<Stack2>;

/// Enumerates the milestones of s: stacks w_1:...:w_i:v with
/// lcp(w_i, w_{i+1}) <= v <= w_{i+1} (and, if generalised, also those with
/// v <= w_i), where w_0 is the one-letter bottom word.  The result is
/// sorted by the construction order, which is linear on this set.
MilestoneChain milestones(const Stack2& s, bool generalised);

/// Replaces every level-2 link target by 0; level-1 letters are unchanged.
Word down0(const Word& w);

/// Applies down0 to every word of s.
Stack2 down0(const Stack2& s);

/* Textual stack literals: words separated by ':', letters separated by
 * spaces; '_' denotes the bottom letter, 'a' a level-1 letter and 'a^2@k'
 * a level-2 letter with target width k. */

std::string show_word(const Word& w);
std::string show_stack(const Stack2& s);

/// Parses a stack literal; throws std::runtime_error with a position on
/// malformed input.  The result is not implicitly validated.
Stack2 parse_stack(const std::string& text);
Word parse_word(const std::string& text);

}  // namespace cpg

#endif  // CPG_STACK_HH_
