"""Loading the key=value parameter ledger."""

from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, fields, replace
from importlib import resources
from pathlib import Path


@dataclass(frozen=True)
class Ledger:
    k: int = 3
    r: int = 2
    n_values: tuple[int, ...] = (24, 36, 48, 60)
    epsilon: float = 0.1
    p: float = 0.8
    mu0: float = 0.1
    tol_pfm: float = 1e-9
    clean_t: int = 2
    eta: float = 0.01
    zeta: float = 0.05
    grid_attempts: int = 100_000
    grid_stall: int = 2000
    exhaustive_ceiling: float = 1e9
    extend_budget: int = 20_000
    extend_tries: int = 20
    gadget_target: int = 12
    mono_fraction: float = 0.001
    path_order: int = 5
    sample_factor: float = 3.0
    max_attempts: int = 1000
    beta: float = 0.3
    nibble_quality: float = 0.9
    nibble_passes: int = 20
    mu_reserve: float = 0.12
    connect_max_order: int = 8
    spanning_ceiling: int = 14
    spanning_budget: int = 200_000
    pipeline_retries: int = 3
    disc_target: float = 0.02

    def caps(self, n: int) -> list[float]:
        """Per-intersection caps ``eta**0.5 * n**(k-1-j)`` for ``j = 0..k-1``."""
        return [self.eta ** 0.5 * n ** (self.k - 1 - j) for j in range(self.k)]

    def disc_target_for(self, n: int) -> float:
        return self.disc_target * n

    def with_(self, **changes) -> Ledger:
        return replace(self, **changes)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["n_values"] = list(self.n_values)
        return d


def _coerce(name: str, raw: str):
    kind = {f.name: f.type for f in fields(Ledger)}[name]
    if kind == "tuple[int, ...]":
        return tuple(int(x) for x in raw.split(",") if x.strip())
    if kind == "int":
        return int(float(raw))
    return float(raw)


def parse_ledger(text: str, base: Ledger | None = None) -> Ledger:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    cp.read_string("[ledger]\n" + text)
    known = {f.name for f in fields(Ledger)}
    changes = {}
    for key, raw in cp["ledger"].items():
        if key not in known:
            raise ValueError(f"unknown ledger key {key!r}")
        changes[key] = _coerce(key, raw.strip())
    return replace(base or Ledger(), **changes)


def load_ledger(path: str | Path | None = None) -> Ledger:
    """The shipped ledger, optionally overlaid with a user file."""
    shipped = resources.files("hamdisc").joinpath("ledger.cfg").read_text()
    ledger = parse_ledger(shipped)
    if path is not None:
        ledger = parse_ledger(Path(path).read_text(), ledger)
    return ledger
