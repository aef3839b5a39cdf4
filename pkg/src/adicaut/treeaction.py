"""Words in automaton states acting as tree automorphisms.

A group word is a reduced sequence of (state id, exponent) factors over one
automaton; it acts on digit words letter by letter, the leftmost factor
applied last.  Products and inverses decompose by wreath recursion: the
root permutation of a product composes outermost-first, and the section of
a product below a letter is the product of the factor sections along the
letters each suffix produces.  Inverse factors act without being expanded:
reading through a state backwards just means inverting its output
permutation before stepping.

The word problem is decided by closing a word under sections: a word acts
trivially on the whole tree exactly when every word reachable from it by
taking sections has the identity root permutation.  Sections never have more
factors than their parent and draw states from a finite set, so the closure
is finite and the search terminates (a node budget still guards against
pathological blowup and is reported, never treated as an answer).
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass

from .automaton import Automaton
from .linalg import format_letter, inverse_unimodular
from .nadic import DigitWord

DEFAULT_NODE_BUDGET = 10 ** 6


class WordError(ValueError):
    "Malformed word: bad syntax, unknown state, or mismatched automaton."


class BudgetExceededError(RuntimeError):
    "The word-problem closure ran out of nodes before reaching an answer."

    def __init__(self, visited: int):
        super().__init__(f"word-problem search exhausted its node budget after {visited} words")
        self.visited = visited


def _reduce(factors):
    out = []
    for sid, e in factors:
        if out and out[-1][0] == sid and out[-1][1] == -e:
            out.pop()
        else:
            out.append((sid, e))
    return tuple(out)


def _word(aut, reduced_factors) -> "GroupWord":
    w = object.__new__(GroupWord)
    w.aut = aut
    w.factors = reduced_factors
    return w


class GroupWord:
    """A freely reduced word over the states of one automaton.

    Factors are (state id, +1|-1) pairs; adjacent inverse pairs are cancelled
    on construction, so the empty word is the identity.  Words are tied to
    their automaton instance; mixing instances is rejected.  `==` is
    structural (same factors); use `equal` for equality as group elements.
    """

    __slots__ = ("aut", "factors")

    def __init__(self, aut: Automaton, factors=()):
        nstates = len(aut.states)
        checked = []
        for sid, e in factors:
            if e not in (1, -1):
                raise WordError(f"factor exponent must be +1 or -1, got {e}")
            if not 0 <= sid < nstates:
                raise WordError(f"state id {sid} out of range (automaton has {nstates} states)")
            checked.append((sid, e))
        self.aut = aut
        self.factors = _reduce(checked)

    @classmethod
    def from_state(cls, aut: Automaton, sid: int, exponent: int = 1) -> "GroupWord":
        return cls(aut, ((sid, exponent),))

    def __len__(self):
        return len(self.factors)

    def __eq__(self, other):
        if not isinstance(other, GroupWord):
            return NotImplemented
        return self.aut is other.aut and self.factors == other.factors

    def __hash__(self):
        return hash((id(self.aut), self.factors))

    def __mul__(self, other: "GroupWord") -> "GroupWord":
        if not isinstance(other, GroupWord):
            return NotImplemented
        if self.aut is not other.aut:
            raise WordError("cannot multiply words over different automata")
        return _word(self.aut, _reduce(self.factors + other.factors))

    def __invert__(self) -> "GroupWord":
        return _word(self.aut, tuple((sid, -e) for sid, e in reversed(self.factors)))

    def inverse(self) -> "GroupWord":
        return ~self

    def __pow__(self, k: int) -> "GroupWord":
        base = self if k >= 0 else ~self
        w = _word(self.aut, ())
        for _ in range(abs(k)):
            w = w * base
        return w

    def __repr__(self):
        return f"GroupWord({self.format() or '<identity>'})"

    def format(self) -> str:
        """Word in the `m[i]:(v)` token grammar, runs collapsed to powers,
        factors joined with ` * `.  The identity formats as the empty string."""
        parts = []
        i = 0
        fs = self.factors
        while i < len(fs):
            sid, e = fs[i]
            j = i
            while j < len(fs) and fs[j] == (sid, e):
                j += 1
            st = self.aut.states[sid]
            tok = f"m[{st.matrix_index}]:({format_letter(st.offset)})"
            exp = e * (j - i)
            if exp != 1:
                tok += f"^{exp}"
            parts.append(tok)
            i = j
        return " * ".join(parts)

    def act(self, u: DigitWord) -> DigitWord:
        """Image of a digit word, same length, factors applied rightmost
        first.  Positive factors walk the transition tables; negative factors
        walk them backwards through the inverted output permutation."""
        aut = self.aut
        if u.base != aut.n or u.dim != aut.d:
            raise WordError(f"word over base {aut.n} dim {aut.d} cannot act on a digit word of base {u.base} dim {u.dim}")
        states = aut.states
        seq = [aut.letter_index(x) for x in u.letters]
        for sid, e in reversed(self.factors):
            cur = sid
            if e == 1:
                for i, x in enumerate(seq):
                    st = states[cur]
                    seq[i] = st.out[x]
                    cur = st.nxt[x]
            else:
                for i, y in enumerate(seq):
                    x = aut.inv_out(cur)[y]
                    seq[i] = x
                    cur = states[cur].nxt[x]
        return DigitWord(tuple(aut.letter_digits(i) for i in seq), u.base, u.dim)

    def root_and_sections(self):
        """The permutation this word induces on first letters, and the reduced
        word acting below each letter (dense-indexed).  Every section has at
        most as many factors as this word."""
        aut = self.aut
        states = aut.states
        perm = []
        sections = []
        for x in range(aut.alphabet_size):
            xi = x
            sec = []
            for sid, e in reversed(self.factors):
                st = states[sid]
                if e == 1:
                    sec.append((st.nxt[xi], 1))
                    xi = st.out[xi]
                else:
                    x0 = aut.inv_out(sid)[xi]
                    sec.append((st.nxt[x0], -1))
                    xi = x0
            perm.append(xi)
            sections.append(_word(aut, _reduce(reversed(sec))))
        return tuple(perm), sections

    def is_identity(self, budget: int = DEFAULT_NODE_BUDGET) -> bool:
        """Decide whether this word acts trivially on every digit word, by
        exhausting the closure of the word under sections.  Raises
        BudgetExceededError when the closure exceeds `budget` visited words;
        exhaustion is an explicit outcome, never reported as False."""
        ok, _ = _closure_is_identity(self, budget)
        return ok


def _closure_is_identity(w: GroupWord, budget: int):
    "Returns (answer, visited-count); see GroupWord.is_identity."
    aut = w.aut
    if not w.factors:
        return True, 1
    idperm = tuple(range(aut.alphabet_size))
    visited = {w.factors}
    queue = deque([w.factors])
    while queue:
        fac = queue.popleft()
        perm, sections = _word(aut, fac).root_and_sections()
        if perm != idperm:
            return False, len(visited)
        for s in sections:
            f = s.factors
            if f and f not in visited:
                if len(visited) >= budget:
                    raise BudgetExceededError(len(visited))
                visited.add(f)
                queue.append(f)
    return True, len(visited)


def equal(w1: GroupWord, w2: GroupWord, budget: int = DEFAULT_NODE_BUDGET) -> bool:
    "Equality as tree automorphisms: w1 * w2^-1 acts trivially."
    return (w1 * ~w2).is_identity(budget)


def translation_word(aut: Automaton, matrix_index: int = 0, axis: int = 1) -> GroupWord:
    """The two-factor word m_0 * m_{-e_axis}^-1 from the given component; it
    acts on digit words as +1 on coordinate `axis` (1-based), carries
    included.  Both states exist in every component."""
    d = aut.d
    if not 1 <= axis <= d:
        raise WordError(f"axis {axis} out of range 1..{d}")
    zero = (0,) * d
    neg = tuple(-1 if i == axis - 1 else 0 for i in range(d))
    try:
        a = aut.state_id(matrix_index, zero)
        b = aut.state_id(matrix_index, neg)
    except KeyError:
        raise WordError(
            f"component {matrix_index} has no states {zero} / {neg}; "
            f"is this a deduplicated automaton?") from None
    return _word(aut, _reduce([(a, 1), (b, -1)]))


@dataclass
class RelationReport:
    matrix_index: int
    axis: int
    ok: bool
    visited: int
    lhs: GroupWord
    rhs: GroupWord

    def __str__(self):
        status = "PASS" if self.ok else "FAIL"
        return f"M[{self.matrix_index}] j={self.axis} {status} visited={self.visited}"


def verify_relation(aut: Automaton, matrix_index: int, axis: int,
                    budget: int = DEFAULT_NODE_BUDGET, inverse: bool = False) -> RelationReport:
    """Check that conjugating the axis translation by the matrix state m_0
    equals the product of axis translations with exponents from the matrix
    column: m_0 t_j m_0^-1 = t_1^{M[1][j]} * ... * t_d^{M[d][j]}.

    With inverse=True the matrix must be invertible over the integers and the
    conjugation runs the other way, with exponents drawn from the inverse
    matrix's column.  Exponents are expanded into repeated factors; the
    decision runs through the word-problem closure, whose budget exhaustion
    propagates."""
    M = aut.matrices[matrix_index]
    d = aut.d
    if not 1 <= axis <= d:
        raise WordError(f"axis {axis} out of range 1..{d}")
    m0 = _word(aut, ((aut.state_id(matrix_index, (0,) * d), 1),))
    tau = translation_word(aut, matrix_index, axis)
    if inverse:
        col_matrix = inverse_unimodular(M)
        lhs = ~m0 * tau * m0
    else:
        col_matrix = M
        lhs = m0 * tau * ~m0
    rhs = _word(aut, ())
    for i in range(1, d + 1):
        e = col_matrix[i - 1][axis - 1]
        if e:
            rhs = rhs * translation_word(aut, matrix_index, i) ** e
    ok, visited = _closure_is_identity(lhs * ~rhs, budget)
    return RelationReport(matrix_index, axis, ok, visited, lhs, rhs)


def conjugacy_search_bounded(w1: GroupWord, w2: GroupWord, max_length: int,
                             budget: int = DEFAULT_NODE_BUDGET):
    """Breadth-first search for a conjugator c with c * w1 * c^-1 = w2 among
    freely reduced words of at most max_length factors over all states.

    Returns the first certified conjugator (verified through `equal`), or
    None when no candidate within the bounds checks out.  This is a bounded
    semi-decision procedure: None only means the search was inconclusive and
    never certifies that the two words are non-conjugate.  Candidates whose
    verification exhausts the node budget are skipped."""
    if w1.aut is not w2.aut:
        raise WordError("cannot search for conjugators across different automata")
    aut = w1.aut
    gens = [(sid, e) for sid in range(len(aut.states)) for e in (1, -1)]
    level = [()]
    for _ in range(max_length + 1):
        for fac in level:
            c = _word(aut, fac)
            try:
                if equal(c * w1 * ~c, w2, budget):
                    return c
            except BudgetExceededError:
                continue
        level = [fac + (g,) for fac in level for g in gens
                 if not (fac and fac[-1][0] == g[0] and fac[-1][1] == -g[1])]
    return None


_STATE_TOKEN = re.compile(r"m\[(\d+)\]:\((-?\d+(?:,-?\d+)*)\)(?:\^(-?\d+))?$")
_TRANS_TOKEN = re.compile(r"t\[(\d+)\](?:@(\d+))?(?:\^(-?\d+))?$")


def parse_word(aut: Automaton, text: str) -> GroupWord:
    """Parse the word grammar: `m[i]:(v1,...,vd)` names the state with offset
    v in component i, `t[j]` the axis-j translation (component 0 unless a
    `@i` suffix picks another), either with an optional `^k` power; factors
    separated by whitespace or `*`.  Empty text is the identity."""
    w = _word(aut, ())
    for tok in text.replace("*", " ").split():
        m = _STATE_TOKEN.match(tok)
        if m:
            mi = int(m.group(1))
            coords = tuple(int(p) for p in m.group(2).split(","))
            k = int(m.group(3)) if m.group(3) else 1
            if mi >= len(aut.matrices):
                raise WordError(f"no component {mi} in this automaton")
            if len(coords) != aut.d:
                raise WordError(f"state offset {tok!r} has {len(coords)} coordinates, expected {aut.d}")
            try:
                sid = aut.state_id(mi, coords)
            except KeyError:
                raise WordError(f"no state m[{mi}]:({format_letter(coords)}) in this automaton") from None
            base = _word(aut, ((sid, 1),))
        else:
            m = _TRANS_TOKEN.match(tok)
            if not m:
                raise WordError(f"cannot parse word token {tok!r}")
            axis = int(m.group(1))
            comp = int(m.group(2)) if m.group(2) else 0
            k = int(m.group(3)) if m.group(3) else 1
            if comp >= len(aut.matrices):
                raise WordError(f"no component {comp} in this automaton")
            base = translation_word(aut, comp, axis)
        w = w * base ** k
    return w
