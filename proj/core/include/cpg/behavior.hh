/* behavior.hh -- run classifiers, run decompositions and top-word behavior profiles */
#ifndef CPG_BEHAVIOR_HH
#define CPG_BEHAVIOR_HH

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cpg/cps.hh"
#include "cpg/stack.hh"

namespace cpg {

/// Pair (q, q') of system states: a run exists from a q-configuration to a
/// q'-configuration of the shape the surrounding context prescribes.
using StatePair = std::pair<std::string, std::string>;
using StatePairs = std::set<StatePair>;

/// The distinguished run shapes.
///
///   Return:   from s:w to s, never visiting a substack of s before the end,
///             finishing with Pop2, with a Collapse on a level-2 link whose
///             pre-collapse top word properly extends w, or by reaching Pop1
///             of the start and returning from there.
///   Loop:     from (q, s) to (q', s), never visiting a substack of Pop2(s),
///             and visiting Pop1^k(s) only if the top k letters of the top
///             word of s are all level 1.
///   HighLoop: a Loop that never visits Pop1(s).
///   LowLoop:  a Loop whose second and second-to-last stacks are Pop1(s).
///   OneLoop:  from s:w to s:s':w for some word sequence s', keeping the
///             width above |s| throughout, where every stack whose top word
///             is Pop1(w) starts a completed Return inside the run.
enum class RunKind { Return, Loop, HighLoop, LowLoop, OneLoop };

const char* show_run_kind(RunKind k);

/// Outcome of classify_run. On success `cuts` holds the witnessing indices:
/// for Return the chain of re-entry positions (one per nesting of the third
/// clause), for LowLoop the two pinned Pop1 positions, for OneLoop the
/// (start, end) index pairs of the repairing returns, flattened. `reason`
/// carries the matched final clause on success ("final-pop2" or
/// "final-collapse2" for returns) and the failure explanation otherwise.
struct RunCertificate {
  bool ok = false;
  std::vector<int> cuts;
  std::string reason;
};

/// Decides whether rho is a run of the requested kind, with certificate.
/// The run must be valid for sys; steps are justified by any transition of
/// sys matching the observed configurations.
RunCertificate classify_run(const CPS& sys, const Run& rho, RunKind kind);

/// Decomposition schemes for the run shapes the relation constructions rely
/// on. Each checks its hypotheses first and then searches for cut points.
///
///   General4:   any run; cuts it at the minimal visited substack of the
///               start into descent, floor and rebuild phases.
///   RelAForms:  run from c to Pop2^k(c) avoiding substacks of the target
///               before the end; segments are returns, 1-loops ending in a
///               level-2 collapse, or 1-loops ending in a Pop1-style step
///               that a later collapse segment repairs.
///   RelBHLoops: run from c to Pop1^k(c) avoiding substacks of the target
///               before the end; alternates high loops with single
///               Pop1-style steps and ends on a step.
///   RelCHLoops: run from c to a Push^k extension staying at or above the
///               start; alternates high loops with single push steps, with
///               leading and trailing loops allowed.
///   RelDLoops:  run from Pop2^k(c) up to c avoiding substacks of the start
///               after index 0; single steps through consecutive
///               generalised milestones of the target, with loops between.
enum class DecompScheme { General4, RelAForms, RelBHLoops, RelCHLoops, RelDLoops };

const char* show_scheme(DecompScheme s);

/// Result of decompose_run: `cuts` lists the segment boundaries
/// (0 = cuts[0] <= ... <= cuts.back() = length), `kinds` names each segment.
struct RunDecomposition {
  bool ok = false;
  std::vector<int> cuts;
  std::vector<std::string> kinds;
  std::string reason;
};

RunDecomposition decompose_run(const CPS& sys, const Run& rho, DecompScheme scheme);

/// Set of operation kinds of transitions justifying step i of rho: every
/// transition whose source state, top symbol, label and target state match
/// and whose operation maps rho(i) to rho(i+1).
std::set<OpKind> step_ops(const CPS& sys, const Run& rho, std::size_t i);

/// Search bound metadata for a profile computation. `limit` is the macro
/// step bound (summary jumps count as one step); `deepest_hit` is the depth
/// at which the last new state pair appeared; `frontier_exhausted` is true
/// when every search ran out of configurations below the bound, so the
/// profile is exact rather than a lower approximation.
struct SearchBudget {
  int limit = 0;
  int deepest_hit = 0;
  bool frontier_exhausted = true;
};

/// Behavior profile of a link-zeroed word w: which state pairs admit
/// returns from w:w to [w], loops, high loops, low loops from [w] to [w],
/// and 1-loops growing [w] into a taller stack with top word w. `sym` and
/// `lvl` are the top letter's symbol and level ("" and 0 for the empty
/// word, whose profile is the distinguished bottom with all sets empty).
struct BehaviorProfile {
  StatePairs ret, loop, hloop, lloop, oneloop;
  std::string sym;
  int lvl = 0;
  SearchBudget budget_used;
};

/// Equality on the semantic fields (the five sets, sym, lvl), ignoring the
/// search metadata.
bool same_profile(const BehaviorProfile& a, const BehaviorProfile& b);

/// loop set derived from hloop and lloop: hloop united with
/// hloop . lloop . hloop compositions.
StatePairs compose_loop(const StatePairs& hloop, const StatePairs& lloop);

/// Memoizing profile computer for one system. Profiles are computed by
/// bounded breadth-first search over real configurations from the canonical
/// stacks w:w and [w]. Descents that pop into w itself are taken in one
/// summary step via the recursively computed profile of Pop1(w), following
/// the segment decompositions of returns and loops; everything else is
/// explored concretely. Results are memoized per (word, budget) and are
/// monotone in the budget. Single-threaded.
class ProfileOracle {
 public:
  explicit ProfileOracle(const CPS& sys);

  /// Profile of down0(w) at the given budget. Throws std::invalid_argument
  /// if the budget is not positive or [down0(w)] is not a valid stack; the
  /// empty word yields the bottom profile.
  const BehaviorProfile& profile(const Word& w, int budget);

  const CPS& system() const { return sys_; }

 private:
  struct SearchStats {
    int deepest = 0;
    bool exhausted = true;
  };

  enum class SearchMode { Ret, HLoop, OneLoop };

  BehaviorProfile compute(const Word& w, int budget);
  StatePairs search_pairs(SearchMode mode, const Word& w, int budget,
                          const StatePairs& jump_pairs, SearchStats* st);
  StatePairs lloop_pairs(const Word& w, const StatePairs& sub_loop) const;

  /// One transition with names resolved to dense ids; sym is the pushed
  /// symbol for push edges and unused otherwise.
  struct Edge {
    int to;
    OpKind kind;
    int sym;
  };

  CPS sys_;
  std::vector<std::string> state_names_;
  std::map<std::string, int> state_ids_;
  std::vector<std::string> sym_names_;
  std::map<std::string, int> sym_ids_;
  std::vector<std::vector<std::vector<Edge>>> edges_;  ///< [state][top symbol]
  std::map<std::pair<Word, int>, BehaviorProfile> memo_;
};

/// One-off profile computation; equivalent to ProfileOracle(sys).profile(...)
/// but without a shared memo across calls.
BehaviorProfile profile(const CPS& sys, const Word& w0, int budget);

/// Deterministic automaton over letters (sym, lvl) whose states are the
/// distinct behavior profiles of the words read so far, with level-2 links
/// zeroed. State 0 is the empty-word bottom; reading the bottom symbol from
/// it yields start(), the profile of the one-letter bottom word; reading
/// (sym, lvl) from the profile of w yields the profile of w.(sym,lvl,0).
/// Transitions are computed on demand through a shared oracle and cached;
/// each state keeps the first word that produced it as representative.
class ProfileAutomaton {
 public:
  ProfileAutomaton(const CPS& sys, int budget);

  /// State reached after reading the one-letter bottom word.
  int start();

  /// The empty-word bottom state.
  int bottom() const { return 0; }

  /// Target of the transition on (sym, lvl). Throws std::invalid_argument
  /// for symbols outside the stack alphabet, for the bottom symbol anywhere
  /// but on the first letter, and for levels other than 1 and 2.
  int step(int state, const std::string& sym, int lvl);

  /// Folds step over down0(w) starting from the bottom state.
  int run_word(const Word& w);

  const BehaviorProfile& state_profile(int id) const;
  const Word& representative(int id) const;
  std::size_t size() const { return profiles_.size(); }
  int budget() const { return budget_; }

 private:
  int state_of(const Word& w0);

  ProfileOracle oracle_;
  int budget_;
  std::vector<Word> reps_;
  std::vector<BehaviorProfile> profiles_;
  std::map<std::tuple<int, std::string, int>, int> delta_;
};

/// A violated determination: two sampled words agree on the determinants of
/// `rule` but disagree on the determined set. w2 is empty for the per-word
/// loop composition identity.
struct DeterminationViolation {
  std::string rule;
  Word w1, w2;
};

struct DeterminationReport {
  int checked = 0;
  std::vector<DeterminationViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Cross-checks the determination laws on the sampled words at one budget:
/// ret and hloop are determined by (ret of Pop1, sym, lvl); lloop by
/// (sym, lvl, sym of Pop1, loop of Pop1); oneloop by (ret, sym, lvl); and
/// loop equals the hloop/lloop composition. Words are link-zeroed first;
/// entries that do not form valid one-word stacks are skipped. A violation
/// signals an under-budget oracle rather than a broken law.
DeterminationReport check_determinations(const CPS& sys,
                                         const std::vector<Word>& sample_words,
                                         int budget);

}  // namespace cpg

#endif  // CPG_BEHAVIOR_HH
