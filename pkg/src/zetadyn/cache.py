"""On-disk zero cache (one CSV file) and run configuration."""
from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .zeros import BINARY64_DIGITS, ZeroRecord, find_zeros, load_zeros, store_zeros
from .rotation import ensure_cached

CACHE_ENV = "ZETADYN_CACHE_DIR"
CONFIG_ENV = "ZETADYN_CONFIG"
CACHE_FILE = "zeros.csv"


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "zetadyn"


@dataclass(frozen=True)
class Config:
    """Settings shared by CLI commands.

    Config files use ``key = value`` lines (``#`` comments allowed) with the
    keys below; flags override the file, the file overrides defaults.
    """

    precision: str = "binary64"     # binary64 | extended
    digits: int = BINARY64_DIGITS
    cache_dir: str = ""
    budget: int = 4_000_000
    conv_tol: float = 1e-8
    target_abs_err: float = 1e-10
    threads: int = 1

    def __post_init__(self):
        if self.precision not in ("binary64", "extended"):
            raise ValueError("precision must be binary64 or extended")
        if self.precision == "extended" and self.digits < 17:
            raise ValueError("extended precision needs digits >= 17")
        if self.budget <= 0:
            raise ValueError("budget must be positive")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    @property
    def cache_path(self) -> Path:
        d = Path(self.cache_dir) if self.cache_dir else default_cache_dir()
        return d / CACHE_FILE

    @classmethod
    def from_file(cls, path) -> "Config":
        parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
        text = Path(path).read_text(encoding="utf-8")
        parser.read_string("[zetadyn]\n" + text)
        known = {f.name: f.type for f in fields(cls)}
        values = {}
        for key, raw in parser["zetadyn"].items():
            key = key.replace("-", "_")
            if key not in known:
                raise ValueError(f"unknown config key {key!r} in {path}")
            conv = {"int": int, "float": float}.get(known[key], str)
            values[key] = conv(raw.strip())
        return cls(**values)

    def merged(self, **overrides) -> "Config":
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


class ZeroCache:
    """Zero records keyed by index, persisted as a zeros CSV."""

    def __init__(self, path):
        self.path = Path(path)
        self.records: dict[int, ZeroRecord] = {}
        if self.path.exists():
            for r in load_zeros(self.path):
                self.records[r.index] = r

    def merge(self, records) -> None:
        """Add records, keeping the more precise one per index."""
        for r in records:
            old = self.records.get(r.index)
            if old is None or r.precision_digits > old.precision_digits:
                self.records[r.index] = r

    def save(self) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        store_zeros([self.records[k] for k in sorted(self.records)], self.path)

    def get(self, indices, digits: int = BINARY64_DIGITS) -> list[ZeroRecord]:
        """Records for ``indices`` with at least ``digits`` digits, computing
        and caching what is missing."""
        indices = list(indices)
        have = all(k in self.records and self.records[k].precision_digits >= digits
                   for k in indices)
        if not have:
            full = ensure_cached(list(self.records.values()), indices, digits)
            self.merge(full)
            self.save()
        return [self.records[k] for k in indices]

    def scan(self, t_lo: float, t_hi: float, digits: int) -> list[ZeroRecord]:
        recs = find_zeros(t_lo, t_hi, digits)
        self.merge(recs)
        self.save()
        return recs
