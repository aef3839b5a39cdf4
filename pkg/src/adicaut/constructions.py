"""Block-diagonal extensions, a stock free pair of 2x2 matrices, and group
presentations read off a matrix family.

The presentation for matrices M_1..M_m over dimension d has commuting
generators a_1..a_d (the coordinate translations) and one stable letter per
matrix, with each stable letter conjugating a_j to the product of the a_i
raised to the j-th column entries of its matrix.  When every matrix is
invertible over the integers these are defining relators of a semidirect
product; otherwise the same relators present an ascending HNN extension and
the emitted presentation is tagged as one-sided.
"""

from __future__ import annotations

from dataclasses import dataclass

from .automaton import Automaton
from .linalg import Matrix, block_diag, is_unimodular, mat_mul, matrix, identity, inverse_unimodular
from .treeaction import (
    BudgetExceededError,
    DEFAULT_NODE_BUDGET,
    _closure_is_identity,
    _word,
    translation_word,
)


def block_extend(uppers, lowers):
    """Pair up one list of (d-2)x(d-2) matrices with one list of 2x2 matrices
    into block-diagonal d x d matrices diag(upper, lower).  The outputs map
    onto the group generated by the lower blocks, so a free lower family
    keeps the extended family free."""
    ups = [matrix(m) for m in uppers]
    lows = [matrix(m) for m in lowers]
    if len(ups) != len(lows):
        raise ValueError(f"got {len(ups)} upper blocks but {len(lows)} lower blocks")
    if not ups:
        raise ValueError("need at least one pair of blocks")
    du = len(ups[0])
    for m in ups:
        if len(m) != du:
            raise ValueError("upper blocks must all have the same size")
    for m in lows:
        if len(m) != 2:
            raise ValueError("lower blocks must be 2x2")
    return [block_diag(u, l) for u, l in zip(ups, lows)]


def sanov_pair():
    """The classical pair of unimodular 2x2 matrices generating a free group
    of rank 2: [[1,2],[0,1]] and [[1,0],[2,1]].  Freeness is evidenced at
    desk scale by the word-distinctness enumeration in the tests, not proven
    here."""
    return ((1, 2), (0, 1)), ((1, 0), (2, 1))


def reduced_words(rank: int, max_length: int):
    """All freely reduced words up to max_length over `rank` generators and
    their inverses, as tuples of (generator index, +1|-1), shortest first."""
    gens = [(i, e) for i in range(rank) for e in (1, -1)]
    level = [()]
    yield ()
    for _ in range(max_length):
        level = [w + (g,) for w in level for g in gens
                 if not (w and w[-1][0] == g[0] and w[-1][1] == -g[1])]
        yield from level


def word_matrix(word, mats) -> Matrix:
    "Evaluate a reduced word as a matrix product; inverses must be integral."
    ms = [matrix(m) for m in mats]
    invs = {}
    result = identity(len(ms[0]))
    for i, e in word:
        if e == 1:
            factor = ms[i]
        else:
            if i not in invs:
                invs[i] = inverse_unimodular(ms[i])
            factor = invs[i]
        result = mat_mul(result, factor)
    return result


@dataclass(frozen=True)
class Presentation:
    """Finite presentation with commuting generators plus stable letters.

    Relators are freely reduced (name, exponent) words.  `ascending_hnn` is
    set when some matrix is not invertible over the integers; the relators
    then hold only in the one-sided (ascending) form."""

    abelian_generators: tuple
    stable_generators: tuple
    relators: tuple
    ascending_hnn: bool

    def format(self) -> str:
        "Plain text `< gens | relators >`; commutators print as [x,y]."
        gens = ", ".join(self.abelian_generators + self.stable_generators)
        rels = ", ".join(self.format_relator(r) for r in self.relators)
        return f"< {gens} | {rels} >"

    @staticmethod
    def format_relator(relator) -> str:
        if (len(relator) == 4
                and relator[0][1] == relator[1][1] == 1
                and relator[2] == (relator[0][0], -1)
                and relator[3] == (relator[1][0], -1)):
            return f"[{relator[0][0]},{relator[1][0]}]"
        parts = []
        for name, e in relator:
            parts.append(name if e == 1 else f"{name}^{e}")
        return " ".join(parts)


def _reduce_named(factors):
    out = []
    for name, e in factors:
        if e == 0:
            continue
        if out and out[-1][0] == name:
            s = out[-1][1] + e
            if s == 0:
                out.pop()
            else:
                out[-1] = (name, s)
        else:
            out.append((name, e))
    return tuple(out)


def presentation_for(Ms) -> Presentation:
    """Presentation of the group generated by the coordinate translations and
    the given matrices: translations commute, and each stable letter t_k
    conjugates a_j to a_1^{m_1j} ... a_d^{m_dj} read off column j of M_k."""
    mats = [matrix(M) for M in Ms]
    d = len(mats[0])
    for M in mats:
        if len(M) != d:
            raise ValueError("matrices must all have the same dimension")
    a = tuple(f"a{i}" for i in range(1, d + 1))
    if len(mats) == 1:
        t = ("t",)
    else:
        t = tuple(f"t{k}" for k in range(1, len(mats) + 1))
    relators = []
    for i in range(d):
        for j in range(i + 1, d):
            relators.append(((a[i], 1), (a[j], 1), (a[i], -1), (a[j], -1)))
    for k, M in enumerate(mats):
        for j in range(d):
            word = [(t[k], 1), (a[j], 1), (t[k], -1)]
            for i in reversed(range(d)):
                word.append((a[i], -M[i][j]))
            relators.append(_reduce_named(word))
    ascending = any(not is_unimodular(M) for M in mats)
    return Presentation(a, t, tuple(relators), ascending)


@dataclass
class RelatorResult:
    relator: str
    outcome: str  # "pass" | "fail" | "budget-exceeded"
    visited: int


@dataclass
class RelatorCheckReport:
    ok: bool
    results: list

    def __str__(self):
        lines = [f"{r.relator}: {r.outcome.upper()} visited={r.visited}" for r in self.results]
        return "\n".join(lines)


def relator_check(aut: Automaton, pres: Presentation,
                  budget: int = DEFAULT_NODE_BUDGET) -> RelatorCheckReport:
    """Rewrite every relator into a word over the automaton states (a_j as
    the axis-j translation from component 0, t_k as the zero-offset state of
    component k) and decide it through the word problem.  Budget exhaustion
    is recorded per relator instead of aborting the report."""
    d = aut.d
    if len(pres.abelian_generators) != d:
        raise ValueError(f"presentation has {len(pres.abelian_generators)} translation generators, automaton dimension is {d}")
    if len(pres.stable_generators) != len(aut.matrices):
        raise ValueError(f"presentation has {len(pres.stable_generators)} stable letters, automaton has {len(aut.matrices)} components")
    words = {}
    for j, name in enumerate(pres.abelian_generators, start=1):
        words[name] = translation_word(aut, 0, j)
    for k, name in enumerate(pres.stable_generators):
        words[name] = _word(aut, ((aut.state_id(k, (0,) * d), 1),))

    results = []
    ok = True
    for relator in pres.relators:
        w = _word(aut, ())
        for name, e in relator:
            if name not in words:
                raise ValueError(f"relator uses unknown generator {name!r}")
            w = w * words[name] ** e
        text = Presentation.format_relator(relator)
        try:
            answer, visited = _closure_is_identity(w, budget)
        except BudgetExceededError as e:
            results.append(RelatorResult(text, "budget-exceeded", e.visited))
            ok = False
            continue
        results.append(RelatorResult(text, "pass" if answer else "fail", visited))
        ok = ok and answer
    return RelatorCheckReport(ok, results)
