from functools import lru_cache

from hypothesis import given, strategies as st

from bxsynth.search import (
    TIMEOUT, Stream, bind, choose, empty, fmap, from_levels, product, pure, take_within,
)


def grammar() -> Stream:
    """E ::= x (1) | S E (1) | P E E (2)"""
    return choose([
        (1, lambda: pure("x")),
        (1, lambda: fmap(grammar(), lambda e: ("S", e))),
        (2, lambda: fmap(product([grammar(), grammar()]), lambda p: ("P",) + p)),
    ])


@lru_cache(maxsize=None)
def count(c: int) -> int:
    """Closed-form counter for the grammar above, by cost."""
    if c <= 0:
        return 0
    n = 1 if c == 1 else 0
    n += count(c - 1)
    n += sum(count(a) * count(c - 2 - a) for a in range(1, c - 2))
    return n


def test_choose_orders_by_weight():
    s = choose([(2, lambda: pure("B")), (1, lambda: pure("A"))])
    assert list(s) == [(1, "A"), (2, "B")]
    assert list(choose([(0, lambda: pure("x"))])) == [(0, "x")]
    assert list(choose([])) == []


def test_equal_cost_ties_go_left():
    s = choose([(1, lambda: pure("first")), (1, lambda: pure("second"))])
    assert [v for _, v in s] == ["first", "second"]


def test_recursive_grammar_sorted_and_unique():
    items = grammar().take(100)
    costs = [c for c, _ in items]
    assert costs == sorted(costs)
    assert len({v for _, v in items}) == len(items)


def test_counts_match_closed_form():
    got = take_within(grammar(), 7)
    for c in range(1, 8):
        assert sum(1 for v in got if _cost(v) == c) == count(c)


def _cost(e):
    if e == "x":
        return 1
    if e[0] == "S":
        return 1 + _cost(e[1])
    return 2 + _cost(e[1]) + _cost(e[2])


def nats() -> Stream:
    return choose([(1, lambda: pure(0)), (1, lambda: fmap(nats(), lambda n: n + 1))])


def test_take_within_budget_and_deadline():
    assert take_within(nats(), 3) == [0, 1, 2]
    assert take_within(nats(), 3, deadline=0) == [TIMEOUT]


def test_laziness():
    calls = []

    def level(c):
        calls.append(c)
        return [c]

    s = from_levels(level, 100)
    assert calls == []
    assert s.get(2) == (2, 2)
    assert calls == [0, 1, 2]
    s.get(1)
    assert calls == [0, 1, 2]


def test_bind_adds_costs():
    s = bind(from_levels(lambda c: [c], 3), lambda v: pure(v * 10, v))
    assert list(s) == [(0, 0), (2, 10), (4, 20), (6, 30)]


def test_empty():
    assert empty().get(0) is None


@given(st.lists(st.tuples(st.integers(0, 5), st.lists(st.integers(0, 9), max_size=4)), max_size=5))
def test_choose_is_monotone(alts):
    streams = [(w, lambda xs=sorted(xs): Stream(lambda: [(x, x) for x in xs])) for w, xs in alts]
    costs = [c for c, _ in choose(streams)]
    assert costs == sorted(costs)
    assert len(costs) == sum(len(xs) for _, xs in alts)


@given(st.lists(st.lists(st.integers(0, 4), max_size=3), min_size=1, max_size=3))
def test_product_is_monotone_and_complete(parts):
    streams = [Stream(lambda xs=sorted(xs): [(x, x) for x in xs]) for xs in parts]
    got = list(product(streams))
    costs = [c for c, _ in got]
    assert costs == sorted(costs)
    expected = 1
    for xs in parts:
        expected *= len(xs)
    assert len(got) == expected
    assert all(c == sum(v) for c, v in got)
