"""Search weights and budgets, loadable from a `key = value` file."""

from __future__ import annotations

from dataclasses import dataclass, field, fields


@dataclass
class Weights:
    # term enumeration
    var: int = 1
    component: int = 2
    app: int = 1
    con: int = 1
    lam: int = 1
    case: int = 3
    branch: int = 1
    literal: int = 1
    neg: int = 1
    conj: int = 1
    disj: int = 1
    # sketch generation
    bcase: int = 0
    ucase: int = 1
    lift: int = 2
    bx: int = 1


@dataclass
class Config:
    weights: Weights = field(default_factory=Weights)
    max_cost: int = 60
    seconds: float = 600.0
    case_depth: int = 2
    max_atoms: int = 3
    hole_cost: int = 16
    fuel: int = 200_000

    def set(self, key: str, value: str) -> None:
        key = key.strip()
        if key.startswith("weights."):
            name = key[len("weights."):]
            if name not in {f.name for f in fields(Weights)}:
                raise KeyError(f"unknown weight {name}")
            w = int(value)
            if w < 0:
                raise ValueError(f"weight {name} must be non-negative")
            setattr(self.weights, name, w)
            return
        table = {
            "budget.cost": ("max_cost", int),
            "budget.seconds": ("seconds", float),
            "enum.case_depth": ("case_depth", int),
            "enum.max_atoms": ("max_atoms", int),
            "enum.hole_cost": ("hole_cost", int),
            "eval.fuel": ("fuel", int),
        }
        if key not in table:
            raise KeyError(f"unknown configuration key {key}")
        attr, conv = table[key]
        setattr(self, attr, conv(value))


def parse_config(text: str, base: Config | None = None) -> Config:
    cfg = base or Config()
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {n}: expected key = value")
        k, v = line.split("=", 1)
        try:
            cfg.set(k, v.strip())
        except (KeyError, ValueError) as exc:
            raise ValueError(f"line {n}: {exc}") from None
    return cfg


def load_config(path: str, base: Config | None = None) -> Config:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), base)
