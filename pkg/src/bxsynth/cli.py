"""Command-line driver: `synth`, `repl` and `bench`."""

from __future__ import annotations

import argparse
import glob
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from .bx import BXError, run_get, run_put
from .config import Config, load_config
from .evaluate import EvalError, Evaluator, with_deep_stack
from .filtering import final_check, original_get
from .surface import ParseError, parse_expr, parse_spec, to_value, ValueError_
from .synth import Outcome, synthesize
from .syntax import App, Lam, TFun, TParam, TBX, Val, Var, show_type, show_value
from .typecheck import TypeCheckError, build_input, check_program, entry_type

EXIT_OK, EXIT_ERROR, EXIT_TIMEOUT, EXIT_NOSOLUTION = 0, 1, 2, 3

CORPUS = os.path.join(os.path.dirname(__file__), "corpus")


def _config(args) -> Config:
    cfg = load_config(args.weights) if getattr(args, "weights", None) else Config()
    if getattr(args, "timeout", None) is not None:
        cfg.seconds = args.timeout
    if getattr(args, "max_cost", None) is not None:
        cfg.max_cost = args.max_cost
    return cfg


def load_input(path: str, require_examples: bool = True):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    spec = parse_spec(text, path)
    return spec, build_input(spec, require_examples)


def cmd_synth(args) -> int:
    try:
        cfg = _config(args)
        _, inp = load_input(args.spec)
    except (OSError, ValueError, ParseError, TypeCheckError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    out = synthesize(inp, cfg, limit=max(1, args.all or 1), trace_dump=args.trace_dump)
    if out.solutions:
        for n, sol in enumerate(out.solutions):
            if n:
                print()
            print(sol.text, end="")
        print(f"# {out.seconds:.3f}s, {out.sketches} sketches, {out.candidates} candidates, "
              f"cost {out.solution.cost}", file=sys.stderr)
        for line in out.dump:
            print(line, file=sys.stderr)
        return EXIT_OK
    if out.status == "timeout":
        print("TIMEOUT")
        print(f"# {out.seconds:.3f}s, {out.sketches} sketches, {out.candidates} candidates", file=sys.stderr)
        return EXIT_TIMEOUT
    print("NO SOLUTION")
    print(f"# {out.seconds:.3f}s, {out.sketches} sketches, {out.candidates} candidates", file=sys.stderr)
    return EXIT_NOSOLUTION


# ---------------------------------------------------------------- repl

class Session:
    """State of an interactive get/put session over one loaded program."""

    def __init__(self, spec=None):
        from .syntax import DataEnv
        self.datas = spec.datas if spec else DataEnv()
        self.program = dict(spec.definitions) if spec else {}
        self.types = dict(spec.signatures) if spec else {}
        if "id" not in self.program:
            self.program["id"] = Lam("x", Var("x"))
            self.types["id"] = TFun(TParam("a"), TParam("a"))

    def _split(self, text: str, nvals: int):
        e = parse_expr(text, self.datas)
        spine = []
        while isinstance(e, App) and len(spine) < nvals:
            spine.append(e.arg)
            e = e.fun
        if len(spine) < nvals:
            raise ValueError(f"expected an entry expression and {nvals} value(s)")
        return e, list(reversed(spine))

    def _types(self, entry):
        try:
            src, view = entry_type(self.datas, self.types, entry)
        except TypeCheckError:
            return None
        return src, view

    def get(self, text: str) -> str:
        entry, (s,) = self._split(text, 1)
        ts = self._types(entry)
        if ts is not None and isinstance(ts[0], TBX):
            src = to_value(s, ts[0].inner, self.datas)
            return show_value(run_get(self.program, entry, src))
        # unidirectional (or polymorphic) function: plain application
        sv = to_value(s, ts[0] if ts else None, self.datas)
        ev = Evaluator(self.program)
        r = ev.apply(ev.eval(entry, {}), sv)
        if not isinstance(r, Val):
            raise EvalError("result is not a first-order value")
        return show_value(r)

    def put(self, text: str) -> str:
        entry, (s, v) = self._split(text, 2)
        ts = self._types(entry)
        if ts is None or not isinstance(ts[0], TBX):
            raise BXError("entry is not a bidirectional transformation")
        src = to_value(s, ts[0].inner, self.datas)
        view = to_value(v, ts[1].inner, self.datas)
        return show_value(run_put(self.program, entry, src, view))

    def handle(self, line: str) -> str | None:
        """Reply to one command; None means quit."""
        line = line.strip()
        if not line:
            return ""
        cmd, _, rest = line.partition(" ")
        try:
            if cmd in (":q", ":quit"):
                return None
            if cmd == ":get":
                return self.get(rest)
            if cmd == ":put":
                return self.put(rest)
            if cmd == ":type":
                ts = self._types(parse_expr(rest, self.datas))
                return "ambiguous" if ts is None else show_type(TFun(*ts))
            if cmd == ":help":
                return ":get <entry> <source>\n:put <entry> <source> <view>\n:type <entry>\n:q"
            return f"Error: unknown command {cmd}"
        except (ParseError, TypeCheckError, ValueError, ValueError_, BXError, EvalError, RecursionError) as exc:
            return f"Error: {type(exc).__name__}: {exc}"


def cmd_repl(args) -> int:
    spec = None
    if args.program:
        try:
            with open(args.program, encoding="utf-8") as fh:
                spec = parse_spec(fh.read(), args.program)
            check_program(spec.datas, spec.definitions, spec.signatures)
        except (OSError, ParseError, TypeCheckError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_ERROR
    sess = Session(spec)
    interactive = sys.stdin.isatty()
    while True:
        try:
            line = input("> " if interactive else "")
        except EOFError:
            break
        reply = sess.handle(line)
        if reply is None:
            break
        if reply:
            print(reply, flush=True)
    return EXIT_OK


# ---------------------------------------------------------------- bench

OUTCOME = {"ok": "Yes", "nosolution": "NoSolution", "timeout": "Timeout"}


def run_benchmark(path: str, cfg: Config) -> dict:
    """Synthesize one corpus entry and re-verify any answer after a
    print/parse round trip."""
    row = {"name": os.path.splitext(os.path.basename(path))[0], "class": "-",
           "outcome": "Error", "seconds": 0.0, "expect": None, "note": ""}
    try:
        spec, inp = load_input(path)
    except (OSError, ParseError, TypeCheckError, ValueError) as exc:
        row["note"] = str(exc)
        return row
    row["name"] = inp.name
    row["class"] = spec.meta.get("class", "-")
    row["expect"] = spec.meta.get("expect")
    t0 = time.monotonic()
    out: Outcome = synthesize(inp, cfg)
    row["seconds"] = time.monotonic() - t0
    row["outcome"] = OUTCOME[out.status]
    if out.solution is not None:
        again = parse_spec(out.solution.text, path)
        originals = [original_get(inp, ex.source, cfg.fuel) for ex in inp.examples]
        why = final_check(again.definitions, again.entry, inp, originals, cfg.fuel)
        if why is not None:
            row["outcome"] = "Error"
            row["note"] = f"re-check failed: {why}"
    return row


def _meets(row: dict) -> bool:
    want = row["expect"]
    if want == "yes":
        return row["outcome"] == "Yes"
    if want == "fail":
        return row["outcome"] in ("Timeout", "NoSolution")
    return row["outcome"] != "Error"


def cmd_bench(args) -> int:
    cfg = _config(args)
    paths = sorted(glob.glob(os.path.join(args.corpus, "*.bxs")))
    if args.only:
        keep = set(args.only.split(","))
        paths = [p for p in paths if os.path.splitext(os.path.basename(p))[0] in keep]
    if args.jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(run_benchmark, paths, [cfg] * len(paths)))
    else:
        rows = [run_benchmark(p, cfg) for p in paths]
    lines = ["name\tclass\toutcome\tseconds"]
    lines += [f"{r['name']}\t{r['class']}\t{r['outcome']}\t{r['seconds']:.3f}" for r in rows]
    text = "\n".join(lines) + "\n"
    if args.report in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    bad = [r for r in rows if not _meets(r)]
    for r in bad:
        print(f"unexpected: {r['name']} {r['outcome']} (expected {r['expect']}) {r['note']}",
              file=sys.stderr)
    return EXIT_OK if not bad else EXIT_ERROR


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bxsynth", description="Synthesize bidirectional programs from examples.")
    sub = ap.add_subparsers(dest="command", required=True)

    def knobs(p):
        p.add_argument("--timeout", type=float, default=600.0, help="wall-clock budget in seconds")
        p.add_argument("--max-cost", type=int, default=None, help="cost bound for candidate programs")
        p.add_argument("--weights", default=None, help="configuration file of key = value lines")

    p = sub.add_parser("synth", help="synthesize a program from a spec file")
    p.add_argument("spec")
    knobs(p)
    p.add_argument("--trace-dump", action="store_true", help="print branch events and exit constraints")
    p.add_argument("--all", type=int, nargs="?", const=5, default=None, metavar="K",
                   help="emit up to K solutions (default 5)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("repl", help="interactive :get / :put session")
    p.add_argument("program", nargs="?")
    p.set_defaults(func=cmd_repl)

    p = sub.add_parser("bench", help="run a benchmark corpus and write a TSV report")
    p.add_argument("corpus", nargs="?", default=CORPUS)
    p.add_argument("report", nargs="?", default=None)
    knobs(p)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--only", default=None, help="comma-separated benchmark names")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return with_deep_stack(args.func, args)


if __name__ == "__main__":
    sys.exit(main())
