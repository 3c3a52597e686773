"""Weighted lazy search streams.

A `Stream` yields `(cost, value)` pairs in non-decreasing cost order and
does no work until it is consumed.  Produced elements are cached, so a
stream can be re-read (by index or by iteration) without recomputation.
Alternatives are merged with a heap; an alternative of weight w is only
started once nothing cheaper than w is left, which keeps infinite
alternatives lazy."""

from __future__ import annotations

import heapq
import time
from typing import Callable, Iterable, Iterator


class _Timeout:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "TIMEOUT"


TIMEOUT = _Timeout()


class Stream:
    """Lazily produced, cached sequence of (cost, value) pairs."""

    __slots__ = ("_factory", "_it", "_cache", "_done")

    def __init__(self, factory: Callable[[], Iterable]):
        self._factory = factory
        self._it: Iterator | None = None
        self._cache: list = []
        self._done = False

    def _advance(self) -> bool:
        if self._done:
            return False
        if self._it is None:
            self._it = iter(self._factory())
        try:
            item = next(self._it)
        except StopIteration:
            self._done = True
            self._it = None
            return False
        self._cache.append(item)
        return True

    def get(self, i: int):
        """The i-th element, or None past the end."""
        while len(self._cache) <= i:
            if not self._advance():
                return None
        return self._cache[i]

    def __iter__(self):
        i = 0
        while True:
            item = self.get(i)
            if item is None:
                return
            yield item
            i += 1

    def take(self, n: int) -> list:
        out = []
        for item in self:
            if len(out) >= n:
                break
            out.append(item)
        return out

    def upto(self, budget: int) -> list:
        out = []
        for c, v in self:
            if c > budget:
                break
            out.append((c, v))
        return out


def pure(value, cost: int = 0) -> Stream:
    return Stream(lambda: [(cost, value)])


def empty() -> Stream:
    return Stream(lambda: [])


def from_sorted(items: Iterable) -> Stream:
    """Wrap pairs that are already in non-decreasing cost order."""
    return Stream(lambda: items)


def from_levels(level: Callable[[int], list], max_cost: int, min_cost: int = 0) -> Stream:
    """Stream over `level(c)` for c = min_cost..max_cost; each level lists
    the values of exactly that cost."""

    def gen():
        for c in range(min_cost, max_cost + 1):
            for v in level(c):
                yield c, v

    return Stream(gen)


def _merge(sources: Iterator) -> Iterator:
    """Merge sources `(offset, thunk)` given in non-decreasing offset order.
    Each thunk returns a cost-ordered iterable; its costs are shifted by
    the offset.  Ties go to the earlier source, then to production order."""
    heap: list = []
    seq = 0
    order = 0
    pending = next(sources, None)
    while True:
        # a source is started only when it could beat everything started so
        # far; on a tie the started (earlier) source wins anyway
        while pending is not None and (not heap or pending[0] < heap[0][0]):
            off, thunk = pending
            it = iter(thunk())
            first = next(it, None)
            if first is not None:
                heapq.heappush(heap, (off + first[0], order, seq, first[1], it, off))
                seq += 1
            order += 1
            pending = next(sources, None)
        if not heap:
            return
        c, o, _, v, it, off = heapq.heappop(heap)
        yield c, v
        nxt = next(it, None)
        if nxt is not None:
            if nxt[0] + off < c:
                raise ValueError("stream costs must not decrease")
            heapq.heappush(heap, (off + nxt[0], o, seq, nxt[1], it, off))
            seq += 1


def choose(alternatives: list) -> Stream:
    """Weighted choice over `(weight, thunk)` pairs; a thunk returns a Stream."""
    alts = sorted(enumerate(alternatives), key=lambda x: (x[1][0], x[0]))

    def gen():
        return _merge(iter([(w, th) for _, (w, th) in alts]))

    return Stream(gen)


def bind(s: Stream, f: Callable[[object], Stream]) -> Stream:
    """Run `f` on every value of `s`; costs add up."""

    def sources():
        for c, v in s:
            yield c, (lambda v=v: f(v))

    return Stream(lambda: _merge(sources()))


def fmap(s: Stream, f: Callable) -> Stream:
    return Stream(lambda: ((c, f(v)) for c, v in s))


def product(streams: list) -> Stream:
    """All tuples picking one value from each stream, costs summed."""
    if not streams:
        return pure(())
    head, rest = streams[0], streams[1:]
    tail = product(rest)
    return bind(head, lambda x: fmap(tail, lambda xs: (x,) + xs))


def take_within(s: Stream, budget: int, deadline: float | None = None) -> list:
    """Values of cost <= budget in order; `deadline` is in seconds from now.
    When time runs out the list ends with TIMEOUT."""
    end = None if deadline is None else time.monotonic() + deadline
    out = []
    if end is not None and deadline <= 0:
        return [TIMEOUT]
    for c, v in s:
        if end is not None and time.monotonic() >= end:
            out.append(TIMEOUT)
            return out
        if c > budget:
            break
        out.append(v)
    return out
