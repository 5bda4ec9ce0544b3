from collections import deque
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from heckelab.weyl import DatumError, WeylGroup, build_aut, build_root_datum

from conftest import get_ctx

RANK2 = [("A1", None), ("A2", None), ("A2", "flip"), ("B2", None), ("G2", None), ("A1xA1", None), ("A1xA1", "flip")]


def group(kind, aut=None) -> WeylGroup:
    return get_ctx(kind, 2, aut).G


def test_datum_examples():
    d = build_root_datum("A1")
    assert d.rank == 1 and d.simple_roots == ((2,),) and d.simple_coroots == ((1,),)
    assert build_root_datum("A2").cartan() == [[2, -1], [-1, 2]]


@pytest.mark.parametrize("bad", [
    {"simple_roots": [[3]], "simple_coroots": [[1]]},
    {"simple_roots": [[2, -2], [-2, 2]], "simple_coroots": [[1, 0], [0, 1]]},  # affine A1
    "Z3",
])
def test_invalid_data_rejected(bad):
    with pytest.raises(DatumError):
        build_root_datum(bad)


@pytest.mark.parametrize("kind,order", [("A1", 2), ("A2", 6), ("B2", 8), ("G2", 12), ("A3", 24), ("A1xA1", 4)])
def test_group_orders(kind, order):
    assert group(kind).size == order


def _word_lengths(G):
    """Length as distance from 1 in the Cayley graph (independent of inversions)."""
    dist = {0: 0}
    queue = deque([0])
    while queue:
        w = queue.popleft()
        for s in G.simple:
            x = G.mul[w][s]
            if x not in dist:
                dist[x] = dist[w] + 1
                queue.append(x)
    return dist


@pytest.mark.parametrize("kind", ["A1", "A2", "B2", "G2", "A3"])
def test_length_is_inversion_count_and_word_length(kind):
    G = group(kind)
    dist = _word_lengths(G)
    for w in range(G.size):
        assert G.lengths[w] == dist[w] == len(G.words[w])
        assert G.from_word(G.words[w]) == w


def test_length_and_word_examples():
    G = group("A2")
    assert G.length_and_word(0) == (0, ())
    assert group("A1").length_and_word(group("A1").simple[0]) == (1, (0,))
    assert G.length_and_word(G.longest_element()) == (3, (0, 1, 0))


def test_words_are_shortlex_minimal():
    G = group("B2")
    for w in range(G.size):
        others = [word for word in product(range(2), repeat=G.lengths[w]) if G.from_word(word) == w]
        assert G.words[w] == min(others)


def _inversions(G, w):
    return {a for a in range(G.nroots) if G.positive[a] and not G.positive[G.root_perm[w][a]]}


@pytest.mark.parametrize("kind,aut", RANK2)
def test_length_subadditive_and_additivity_criterion(kind, aut):
    G = group(kind, aut)
    for w in range(G.size):
        for x in range(G.size):
            lw = G.lengths[G.mul[w][x]]
            assert lw <= G.lengths[w] + G.lengths[x]
            disjoint = not (_inversions(G, w) & _inversions(G, G.inv[x]))
            assert (lw == G.lengths[w] + G.lengths[x]) == disjoint


def _bruhat_by_reflections(G):
    """Transitive closure of t w < w over all reflections t."""
    refl = {G.reflection(a) for a in range(G.nroots)}
    below = {w: {w} for w in range(G.size)}
    for w in sorted(range(G.size), key=lambda i: G.lengths[i]):
        for t in refl:
            y = G.mul[t][w]
            if G.lengths[y] < G.lengths[w]:
                below[w] |= below[y]
    return below


@pytest.mark.parametrize("kind", ["A1", "A2", "B2", "G2"])
def test_bruhat_subword_matches_reflection_order(kind):
    G = group(kind)
    below = _bruhat_by_reflections(G)
    for w in range(G.size):
        assert G.bruhat_interval(w) == frozenset(below[w])


def test_bruhat_examples_and_partial_order():
    G = group("A2")
    s1, s2 = G.simple
    assert all(G.bruhat_leq(0, w) for w in range(G.size))
    assert not G.bruhat_leq(s1, s2)
    assert G.bruhat_leq(s1, G.from_word((0, 1, 0)))
    for x in range(G.size):
        for y in range(G.size):
            if G.bruhat_leq(x, y) and G.bruhat_leq(y, x):
                assert x == y
            if G.bruhat_leq(x, y) and x != y:
                assert G.lengths[x] < G.lengths[y]


def test_longest_elements_and_parabolics():
    G = group("A2")
    assert G.longest_element(()) == 0
    assert group("A1").longest_element((0,)) == group("A1").simple[0]
    assert G.lengths[G.longest_element((0, 1))] == 3
    assert len(group("A1").enumerate((0,))) == 2
    assert len(G.enumerate((0, 1))) == 6
    assert len(group("B2").enumerate((0, 1))) == 8


@pytest.mark.parametrize("kind,aut", RANK2)
def test_eps_is_length_preserving_automorphism(kind, aut):
    G = group(kind, aut)
    for p in range(G.k):
        for a in range(G.size):
            assert G.lengths[G.eps(a, p)] == G.lengths[a]
            for b in range(G.size):
                assert G.eps(G.mul[a][b], p) == G.mul[G.eps(a, p)][G.eps(b, p)]


def test_flip_examples():
    G = group("A2", "flip")
    s1, s2 = G.simple
    assert G.k == 2
    assert G.eps(s1) == s2
    assert G.eps(G.from_word((0, 1))) == G.from_word((1, 0))
    triv = group("A2")
    assert all(triv.eps(w) == w for w in range(triv.size))


def test_aut_maps_simple_roots_and_has_finite_order():
    d = build_root_datum("A2")
    aut = build_aut(d, "flip")
    assert sorted(aut.root_permutation) == [0, 1]
    assert aut.order == 2


@given(st.data())
def test_extended_multiplication_associative(data):
    G = group("A2", "flip")
    e = st.integers(0, G.ext_size - 1)
    x, y, z = data.draw(e), data.draw(e), data.draw(e)
    assert G.ext_mul(G.ext_mul(x, y), z) == G.ext_mul(x, G.ext_mul(y, z))
    assert G.ext_mul(x, G.ext_inv(x)) == 0
    assert G.ext_length(G.ext(1, G.ext_parts(x)[1])) == G.lengths[G.ext_parts(x)[1]]
