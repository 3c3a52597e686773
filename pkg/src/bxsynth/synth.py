"""Best-first synthesis driver.

Work items share one priority queue ordered by accumulated cost: pulling
the next sketch, trying the k-th candidate for a reconciliation slot, and
trying the k-th surviving candidate for an exit-condition slot.  The cost
of an item is the sketch cost plus the cost of every filler chosen so
far, plus, for each exit slot still open, the cost of its cheapest
candidate consistent with the constraints gathered so far."""

from __future__ import annotations

import heapq
import itertools
import time
from dataclasses import dataclass, field

from .config import Config
from .filtering import (
    FilteredStream, Prepared, SearchTimeout, constraint_key, final_check, group_constraints, original_get,
    precheck, prepare, substitute_holes, test_recon,
)
from .holes import Enumerator
from .sketch import SketchGenerator
from .surface import print_program, show_data, show_expr
from .syntax import show_value
from .syntax import Con, SynthesisInput


@dataclass
class Solution:
    program: dict       # every definition, in output order
    types: dict
    entry: object
    cost: int
    text: str


@dataclass
class Outcome:
    status: str                     # "ok", "timeout", "nosolution"
    solutions: list = field(default_factory=list)
    seconds: float = 0.0
    sketches: int = 0
    candidates: int = 0
    dump: list = field(default_factory=list)

    @property
    def solution(self):
        return self.solutions[0] if self.solutions else None


@dataclass
class _Work:
    prep: Prepared
    runs: list
    enum: Enumerator
    streams: dict = field(default_factory=dict)
    filters: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)


def render(inp: SynthesisInput, sk, prep: Prepared, fills: dict, components: dict) -> Solution:
    defs = {}
    types = {}
    for n, e in components.items():
        defs[n] = e
        types[n] = inp.types[n]
    for n, e in prep.program.items():
        if n in sk.defs and n != sk.main:
            defs[n] = substitute_holes(e, fills)
            types[n] = sk.types[n]
    entry = substitute_holes(prep.program[sk.main], fills)
    parts = [show_data(d) for d in inp.datas.user_decls()]
    text = ("\n".join(parts) + "\n" if parts else "") + print_program(defs, types)
    text += f"#entry {show_expr(entry)}\n"
    return Solution(defs, types, entry, 0, text)


def synthesize(inp: SynthesisInput, config: Config | None = None, limit: int = 1,
               trace_dump: bool = False, log=None) -> Outcome:
    cfg = config or Config()
    start = time.monotonic()
    deadline = start + cfg.seconds
    out = Outcome("nosolution")

    def finish(status):
        out.status = status
        out.seconds = time.monotonic() - start
        return out

    if cfg.seconds <= 0:
        return finish("timeout")
    gen = SketchGenerator(inp, cfg.weights)
    components = {n: inp.program[n] for n, _ in gen.components}
    originals = [original_get(inp, ex.source, cfg.fuel) for ex in inp.examples]
    reserved = set(inp.program) | {gen.main}
    sketches = gen.sketches()

    heap: list = []
    seq = itertools.count()

    def push(cost, item):
        if cost <= cfg.max_cost:
            heapq.heappush(heap, (cost, next(seq), item))

    def push_sketch(i):
        try:
            nxt = sketches.get(i)
        except RecursionError:
            nxt = None
        if nxt is not None:
            push(nxt[0], ("sketch", i, nxt[1]))

    def hole_stream(work, info):
        s = work.streams.get(info.id)
        if s is None:
            s = work.enum.for_hole(info, cfg.hole_cost)
            work.streams[info.id] = s
        return s

    def filters_for(work, grouped):
        """Filtered candidate streams for the constrained exit slots."""
        filtered = {}
        for h in work.prep.exit_holes:
            cs = grouped.get(h.id)
            if cs:
                key = (h.id, constraint_key(cs))
                f = work.filters.get(key)
                if f is None:
                    f = FilteredStream(hole_stream(work, h), work.prep.program, cs, cfg.fuel,
                                       deadline, work.verdicts.setdefault(h.id, {}))
                    work.filters[key] = f
                filtered[h.id] = f
        return filtered

    def exit_bounds(work, filtered):
        """Cheapest surviving candidate cost per exit slot, or None when
        some slot has no candidate left."""
        bounds = []
        for h in work.prep.exit_holes:
            f = filtered.get(h.id)
            if f is None:
                bounds.append(1)
                continue
            first = f.get(0)
            if first is None:
                return None
            bounds.append(first[0])
        return bounds

    def after_recon(work, fills, base):
        out.candidates += 1
        r = test_recon(work.prep, work.runs, fills, cfg.fuel)
        if r[0] == "fail":
            return
        grouped = group_constraints(r[2] if r[0] == "need" else r[1])
        if grouped is None:
            return
        filtered = filters_for(work, grouped)
        bounds = exit_bounds(work, filtered)
        if bounds is None:
            return
        if r[0] == "need":
            # constraints seen before the missing slot still bound every exit
            h = r[1]
            first = hole_stream(work, h).get(0)
            if first is not None:
                push(base + first[0] + sum(bounds), ("recon", work, fills, h, 0, base, sum(bounds)))
            return
        state = {"grouped": grouped, "events": r[2], "filtered": filtered, "bounds": bounds}
        push(base + sum(bounds), ("exit", work, state, 0, 0, dict(fills), base))

    def exit_candidate(work, state, i, k):
        h = work.prep.exit_holes[i]
        f = state["filtered"].get(h.id)
        if f is None:
            # unconstrained: the cheapest condition, True
            return (1, Con("True")) if k == 0 else None
        return f.get(k)

    push_sketch(0)
    while heap:
        if time.monotonic() > deadline:
            return finish("timeout")
        cost, _, item = heapq.heappop(heap)
        kind = item[0]
        try:
            if kind == "sketch":
                _, i, sk = item
                out.sketches += 1
                push_sketch(i + 1)
                prep = prepare(inp, sk, components)
                runs = precheck(prep, inp, originals, cfg.fuel)
                if log:
                    log(f"sketch {i} cost {cost}: {'viable' if runs is not None else 'pruned'}")
                if runs is None:
                    continue
                enum = Enumerator(inp.datas, gen.components, cfg.weights, cfg.case_depth,
                                  cfg.max_atoms, reserved)
                after_recon(_Work(prep, runs, enum), {}, cost)
            elif kind == "recon":
                _, work, fills, h, k, base, bound = item
                s = hole_stream(work, h)
                cand = s.get(k)
                if cand is None:
                    continue
                nxt = s.get(k + 1)
                if nxt is not None:
                    push(base + nxt[0] + bound, ("recon", work, fills, h, k + 1, base, bound))
                after_recon(work, {**fills, h.id: cand[1]}, base + cand[0])
            elif kind == "exit":
                _, work, state, i, k, fills, base = item
                exits = work.prep.exit_holes
                if i == len(exits):
                    full = dict(fills)
                    for hid, d in work.prep.defaults.items():
                        full.setdefault(hid, d)
                    program = {n: substitute_holes(e, full) for n, e in work.prep.program.items()}
                    entry = program[work.prep.sketch.main]
                    why = final_check(program, entry, inp, originals, cfg.fuel)
                    if log:
                        log(f"final check at cost {cost}: {why or 'accepted'}")
                    if why is None:
                        sol = render(inp, work.prep.sketch, work.prep, full, components)
                        sol.cost = cost
                        out.solutions.append(sol)
                        if trace_dump:
                            out.dump.extend(_dump(state))
                        if len(out.solutions) >= limit:
                            return finish("ok")
                    continue
                cand = exit_candidate(work, state, i, k)
                if cand is None:
                    continue
                rest = sum(state["bounds"][i + 1:])
                nxt = exit_candidate(work, state, i, k + 1)
                if nxt is not None:
                    push(base + nxt[0] + rest, ("exit", work, state, i, k + 1, fills, base))
                h = exits[i]
                push(base + cand[0] + rest, ("exit", work, state, i + 1, 0,
                                             {**fills, h.id: cand[1]}, base + cand[0]))
        except SearchTimeout:
            return finish("timeout")
        except RecursionError:
            continue
    return finish("ok" if out.solutions else "nosolution")


def _dump(state) -> list:
    lines = []
    for ev in state["events"]:
        orig = "-" if ev.orig is None else ev.orig
        lines.append(f"BR site={ev.site} taken={ev.taken} orig={orig}")
    for hid, cs in sorted(state["grouped"].items()):
        for env, expected in cs:
            body = ", ".join(f"{k}={_show_env_value(v)}" for k, v in env.items())
            lines.append(f"CONSTR hole={hid} expect={expected} env={{{body}}}")
    return lines


def _show_env_value(v) -> str:
    return show_value(v) if hasattr(v, "con") else repr(v)
