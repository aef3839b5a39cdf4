import random

import pytest

from adicaut import (
    AffineMap,
    BudgetExceededError,
    DigitWord,
    GroupWord,
    WordError,
    affine_apply_prefix,
    build_single,
    build_union,
    conjugacy_search_bounded,
    decode,
    encode,
    equal,
    identity,
    parse_word,
    translation_word,
    verify_relation,
)
from adicaut.treeaction import _closure_is_identity

from conftest import random_digit_word, random_group_word


# --- action ---------------------------------------------------------------

def test_act_translation_examples():
    aut = build_single(identity(1), 3)
    tau = translation_word(aut, 0, 1)
    assert tau.act(DigitWord.parse("0 0", 3, 1)).format() == "1 0"
    # 8 + 1 = 9 = 0 mod 9: the carry ripples through both digits
    assert tau.act(DigitWord.parse("2 2", 3, 1)).format() == "0 0"


def test_act_empty_word(doubling3):
    u = DigitWord.parse("2 1 0", 3, 1)
    assert GroupWord(doubling3).act(u) == u


def test_act_single_state(doubling3):
    w = parse_word(doubling3, "m[0]:(0)")
    assert w.act(DigitWord.parse("2 1", 3, 1)).format() == "1 0"


def test_act_matches_oracle_per_state(doubling3, shear2):
    rng = random.Random(31)
    for aut in (doubling3, shear2):
        for sid, st in enumerate(aut.states):
            f = AffineMap(aut.matrices[st.matrix_index], st.offset)
            for _ in range(25):
                u = random_digit_word(rng, aut.n, aut.d, 8)
                assert GroupWord.from_state(aut, sid).act(u) == affine_apply_prefix(f, u)


def test_act_inverse_state_matches_oracle(odometer2):
    # acting with the inverse of the decrement state adds one
    w = ~GroupWord.from_state(odometer2, odometer2.state_id(0, (-1,)))
    assert w.act(DigitWord.parse("0 0 0", 2, 1)).format() == "1 0 0"
    assert w.act(DigitWord.parse("1 1 0", 2, 1)).format() == "0 0 1"


def test_act_checks_base_and_dim(doubling3):
    with pytest.raises(WordError):
        GroupWord(doubling3).act(DigitWord.parse("0", 2, 1))


# --- wreath recursion -------------------------------------------------------

def test_root_and_sections_single_state(doubling3):
    w = parse_word(doubling3, "m[0]:(0)")
    perm, secs = w.root_and_sections()
    assert perm == (0, 2, 1)
    assert [s.format() for s in secs] == ["m[0]:(0)", "m[0]:(0)", "m[0]:(1)"]


def test_root_and_sections_cancelling_word(doubling3):
    w = parse_word(doubling3, "m[0]:(1) m[0]:(1)^-1")
    assert w.factors == ()
    perm, secs = w.root_and_sections()
    assert perm == (0, 1, 2)
    assert all(s.factors == () for s in secs)


def test_sections_never_grow(shear2):
    rng = random.Random(32)
    for _ in range(100):
        w = random_group_word(rng, shear2, 8)
        _, secs = w.root_and_sections()
        assert all(len(s) <= len(w) for s in secs)


def test_root_permutation_composes_outermost_first(doubling3):
    rng = random.Random(33)
    for _ in range(100):
        w1 = random_group_word(rng, doubling3, 4)
        w2 = random_group_word(rng, doubling3, 4)
        p1, _ = w1.root_and_sections()
        p2, _ = w2.root_and_sections()
        p12, _ = (w1 * w2).root_and_sections()
        assert p12 == tuple(p1[p2[x]] for x in range(len(p1)))


# --- word problem -----------------------------------------------------------

def test_is_identity_empty(doubling3):
    assert GroupWord(doubling3).is_identity()


def test_is_identity_translation_is_not(odometer2, doubling3):
    assert not translation_word(odometer2, 0, 1).is_identity()
    assert not translation_word(doubling3, 0, 1).is_identity()


def test_translations_commute_d2(shear2):
    t1 = translation_word(shear2, 0, 1)
    t2 = translation_word(shear2, 0, 2)
    assert (t1 * t2 * ~t1 * ~t2).is_identity()


def test_is_identity_budget_is_explicit(shear2):
    t1 = translation_word(shear2, 0, 1)
    t2 = translation_word(shear2, 0, 2)
    comm = t1 * t2 * ~t1 * ~t2
    with pytest.raises(BudgetExceededError) as exc:
        comm.is_identity(budget=1)
    assert exc.value.visited >= 1


def test_is_identity_agrees_with_finite_action():
    # finite-depth triviality is necessary, never sufficient: use it only to
    # falsify, and demand the closure confirms every claimed identity
    rng = random.Random(34)
    auts = [build_single(identity(1), 2), build_single([[3]], 2),
            build_single([[1, 1], [0, 1]], 2)]
    from itertools import product
    for aut in auts:
        letters = [aut.letter_digits(i) for i in range(aut.alphabet_size)]
        words = [DigitWord(ls, aut.n, aut.d) for k in range(7)
                 for ls in product(letters, repeat=k)]
        for _ in range(60):
            w = random_group_word(rng, aut, 4)
            claimed = w.is_identity()
            fixes_all = all(w.act(u) == u for u in words)
            if claimed:
                assert fixes_all
            if not fixes_all:
                assert not claimed


def test_equal(doubling3, shear2):
    rng = random.Random(35)
    w = random_group_word(rng, doubling3, 5)
    assert equal(w, w)
    t1 = translation_word(shear2, 0, 1)
    t2 = translation_word(shear2, 0, 2)
    assert equal(t1 * t2, t2 * t1)
    assert not equal(t1, t1 * t1)


# --- group laws -------------------------------------------------------------

def test_homomorphism_inverse_prefix_properties(doubling3, shear2):
    rng = random.Random(36)
    for _ in range(300):
        aut = rng.choice((doubling3, shear2))
        w1 = random_group_word(rng, aut, 8)
        w2 = random_group_word(rng, aut, 8)
        u = random_digit_word(rng, aut.n, aut.d, 8)
        assert (w1 * w2).act(u) == w1.act(w2.act(u))
        assert (w1 * ~w1).act(u) == u
        t = rng.randint(0, len(u))
        assert w1.act(u).prefix(t) == w1.act(u.prefix(t))
        assert (w1 * ~w1).is_identity()


# --- translations and relations ---------------------------------------------

def test_translation_word_is_odometer(odometer2):
    tau = translation_word(odometer2, 0, 1)
    for k in range(1, 7):
        for val in range(2 ** k):
            u = encode((val,), 2, k)
            assert decode(tau.act(u)) == ((val + 1) % 2 ** k,)


def test_translation_word_axis():
    aut = build_single(identity(2), 2)
    t2 = translation_word(aut, 0, 2)
    assert t2.act(DigitWord.parse("0,0", 2, 2)).format() == "0,1"
    t1 = translation_word(aut, 0, 1)
    assert t1.act(DigitWord.parse("0,0", 2, 2)).format() == "1,0"


def test_translation_word_against_oracle():
    rng = random.Random(37)
    for M, n in (([[2]], 3), ([[1, 1], [0, 1]], 2), ([[1, 0], [2, 1]], 3)):
        aut = build_single(M, n)
        d = aut.d
        for axis in range(1, d + 1):
            tau = translation_word(aut, 0, axis)
            f = AffineMap(identity(d), tuple(1 if i == axis - 1 else 0 for i in range(d)))
            for _ in range(50):
                u = random_digit_word(rng, n, d, 8)
                assert tau.act(u) == affine_apply_prefix(f, u)


def test_verify_relation_shear():
    aut = build_single([[1, 1], [0, 1]], 2)
    for axis in (1, 2):
        rep = verify_relation(aut, 0, axis)
        assert rep.ok
    # second column (1,1): conjugation turns t2 into t1*t2
    rhs = verify_relation(aut, 0, 2).rhs
    t1 = translation_word(aut, 0, 1)
    t2 = translation_word(aut, 0, 2)
    assert equal(rhs, t1 * t2)


def test_verify_relation_doubling(doubling3):
    rep = verify_relation(doubling3, 0, 1)
    assert rep.ok
    tau = translation_word(doubling3, 0, 1)
    assert equal(rep.rhs, tau * tau)


def test_verify_relation_identity_matrix():
    aut = build_single(identity(2), 3)
    for axis in (1, 2):
        assert verify_relation(aut, 0, axis).ok


def test_verify_relation_inverse_side():
    aut = build_single([[1, 1], [0, 1]], 2)
    for axis in (1, 2):
        assert verify_relation(aut, 0, axis, inverse=True).ok
    with pytest.raises(ValueError):
        verify_relation(build_single([[2]], 3), 0, 1, inverse=True)


def test_verify_relation_union_components():
    Ms = [[[1, 2], [0, 1]], [[1, 0], [2, 1]]]
    aut = build_union(Ms, 3)
    for mi in range(2):
        for axis in (1, 2):
            assert verify_relation(aut, mi, axis).ok


# --- conjugacy search --------------------------------------------------------

def test_conjugacy_search_equal_words(doubling3):
    tau = translation_word(doubling3, 0, 1)
    c = conjugacy_search_bounded(tau, tau, 0)
    assert c is not None and c.factors == ()


def test_conjugacy_search_finds_short_conjugator(doubling3):
    tau = translation_word(doubling3, 0, 1)
    m0 = parse_word(doubling3, "m[0]:(0)")
    target = m0 * tau * ~m0
    c = conjugacy_search_bounded(tau, target, 1)
    assert c is not None and len(c) <= 1
    assert equal(c * tau * ~c, target)


def test_conjugacy_search_inconclusive_is_none(odometer2):
    tau = translation_word(odometer2, 0, 1)
    # tau and tau^2 are not conjugate (the group is abelian); the search must
    # come back empty-handed, never claim non-conjugacy
    assert conjugacy_search_bounded(tau, tau * tau, 2) is None


# --- word grammar ------------------------------------------------------------

def test_parse_word_tokens(doubling3):
    w = parse_word(doubling3, "m[0]:(0) * m[0]:(-1)^-1")
    assert w == translation_word(doubling3, 0, 1)
    assert parse_word(doubling3, "t[1]") == w
    assert parse_word(doubling3, "t[1]^-1") == ~w
    assert parse_word(doubling3, "t[1]^3") == w * w * w
    assert parse_word(doubling3, "").factors == ()
    assert parse_word(doubling3, "t[1]^0").factors == ()


def test_parse_word_spaces_and_stars():
    aut = build_single(identity(2), 2)
    a = parse_word(aut, "m[0]:(0,0) * t[2]^-1 * m[0]:(0,0)^-1")
    b = parse_word(aut, "m[0]:(0,0) t[2]^-1 m[0]:(0,0)^-1")
    assert a == b


def test_parse_word_component_suffix():
    aut = build_union([identity(1), [[3]]], 2)
    t_at_1 = parse_word(aut, "t[1]@1")
    assert t_at_1 == translation_word(aut, 1, 1)
    assert t_at_1 != translation_word(aut, 0, 1)
    assert equal(t_at_1, translation_word(aut, 0, 1))


def test_parse_word_errors(doubling3):
    with pytest.raises(WordError):
        parse_word(doubling3, "m[0]:(7)")  # offset outside the box
    with pytest.raises(WordError):
        parse_word(doubling3, "m[1]:(0)")  # no such component
    with pytest.raises(WordError):
        parse_word(doubling3, "nonsense")
    with pytest.raises(WordError):
        parse_word(doubling3, "m[0]:(0,0)")  # wrong dimension
    with pytest.raises(WordError):
        parse_word(doubling3, "t[2]")  # axis out of range


def test_format_parse_round_trip(shear2):
    rng = random.Random(38)
    for _ in range(100):
        w = random_group_word(rng, shear2, 6)
        assert parse_word(shear2, w.format()) == w


def test_words_are_tied_to_their_automaton(doubling3):
    other = build_single([[2]], 3)
    with pytest.raises(WordError):
        GroupWord(doubling3) * GroupWord(other)


def test_free_reduction_nested(doubling3):
    w = GroupWord(doubling3, [(0, 1), (1, 1), (1, -1), (0, -1), (2, 1)])
    assert w.factors == ((2, 1),)
    with pytest.raises(WordError):
        GroupWord(doubling3, [(0, 2)])
    with pytest.raises(WordError):
        GroupWord(doubling3, [(9, 1)])


def test_closure_visited_counts(shear2):
    t1 = translation_word(shear2, 0, 1)
    ok, visited = _closure_is_identity(t1 * ~t1, 10 ** 6)
    assert ok and visited == 1
    ok, visited = _closure_is_identity(t1 * t1 * ~t1 * ~t1, 10 ** 6)
    assert ok and visited >= 1
