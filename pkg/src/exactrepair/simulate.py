"""Exhaustive measurement on concrete codes, plus the brute-force ``M_k`` oracle."""

from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Optional, Sequence

import numpy as np

from .codes import GluedCode, repair
from .exactmath import to_decimal, to_exact
from .tradeoff import ParameterError, SystemParams, match_small_code

ORACLE_MAX_N = 20
ORACLE_MAX_PAIRS = 2 * 10**9


class RepairMismatchError(AssertionError):
    def __init__(self, failed: int, helpers: tuple[int, ...], copies: list[int]):
        self.failed, self.helpers, self.copies = failed, helpers, copies
        super().__init__(
            f"repair of node {failed} from helpers {helpers} is not exact "
            f"(copies {copies[:5]}{'...' if len(copies) > 5 else ''})"
        )


class OracleCapError(RuntimeError):
    pass


@dataclass
class RepairLedger:
    """Bandwidth tallies of an exhaustive single-failure sweep.

    Every gamma is normalized by the file size it is averaged against: whole
    glued file for ``gamma`` and ``node_gamma``, one copy's file for the
    per-role figures.
    """

    n: int
    copies: int
    file_symbols: int
    storage_symbols: int
    pair_bandwidth: dict[tuple[int, tuple[int, ...]], int]
    role_bandwidth: dict[Optional[int], list[int]] = field(default_factory=dict)

    @property
    def total_file(self) -> int:
        return self.copies * self.file_symbols

    @property
    def alpha(self) -> Fraction:
        return Fraction(self.storage_symbols, self.total_file)

    @property
    def gamma(self) -> Fraction:
        vals = self.pair_bandwidth.values()
        return Fraction(sum(vals), len(vals) * self.total_file)

    def node_gamma(self) -> dict[int, Fraction]:
        out = {}
        for i in range(self.n):
            vals = [b for (f, _), b in self.pair_bandwidth.items() if f == i]
            out[i] = Fraction(sum(vals), len(vals) * self.total_file)
        return out

    def role_gamma(self) -> dict[Optional[int], Fraction]:
        """Average per-copy repair download by the failed node's role
        (small-code index, or None when the node is empty in that copy)."""
        return {
            role: Fraction(total, count * self.file_symbols)
            for role, (total, count) in sorted(
                self.role_bandwidth.items(), key=lambda kv: (kv[0] is None, kv[0] or 0)
            )
        }

    @property
    def nonempty_gamma(self) -> Fraction:
        total = sum(t for r, (t, _) in self.role_bandwidth.items() if r is not None)
        count = sum(c for r, (_, c) in self.role_bandwidth.items() if r is not None)
        return Fraction(total, count * self.file_symbols)

    def rows(self) -> list[dict]:
        rows = []
        for (f, helpers), b in sorted(self.pair_bandwidth.items()):
            g = Fraction(b, self.total_file)
            rows.append(
                {
                    "failed": f,
                    "helpers": " ".join(map(str, helpers)),
                    "subsymbols": b,
                    "gamma_exact": to_exact(g),
                    "gamma": to_decimal(g),
                }
            )
        return rows

    def summary(self) -> dict:
        def pair(x: Fraction) -> dict:
            return {"exact": to_exact(x), "decimal": to_decimal(x)}

        return {
            "n": self.n,
            "copies": self.copies,
            "file_symbols": self.file_symbols,
            "alpha": pair(self.alpha),
            "gamma": pair(self.gamma),
            "nonempty_gamma": pair(self.nonempty_gamma),
            "node_gamma": {str(i): pair(g) for i, g in self.node_gamma().items()},
            "role_gamma": {
                ("empty" if r is None else f"s{r}"): pair(g) for r, g in self.role_gamma().items()
            },
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(
            buf, ["failed", "helpers", "subsymbols", "gamma_exact", "gamma"], lineterminator="\n"
        )
        w.writeheader()
        w.writerows(self.rows())
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"summary": self.summary(), "pairs": self.rows()}, indent=2) + "\n"


def sweep_repairs(code: GluedCode, d: int) -> RepairLedger:
    """Repair every node from every size-``d`` helper set and tally bandwidth.

    Raises :class:`RepairMismatchError` at the first inexact repair.
    """
    if not 1 <= d <= code.n - 1:
        raise ParameterError(f"repair degree d={d} outside [1, {code.n - 1}]")
    storage = set(code.storage_per_node())
    if len(storage) != 1:
        raise ParameterError(f"glued code storage is not homogeneous: {sorted(storage)}")
    pair_bw: dict = {}
    role_bw: dict = {}
    for failed in range(code.n):
        others = [i for i in range(code.n) if i != failed]
        for helpers in itertools.combinations(others, d):
            out = repair(code, failed, helpers)
            if not out.exact:
                raise RepairMismatchError(failed, helpers, out.mismatched)
            pair_bw[(failed, helpers)] = out.total
            for c in range(code.copies):
                role = code.placements[c].index(failed) if code.present[c, failed] else None
                acc = role_bw.setdefault(role, [0, 0])
                acc[0] += int(out.per_copy[c])
                acc[1] += 1
    return RepairLedger(
        code.n, code.copies, code.small.file_symbols, storage.pop(), pair_bw, role_bw
    )


def subset_information(code: GluedCode, positions: Sequence[int]) -> Fraction:
    """Linear dimension of the contents at ``positions``, per unit of total file."""
    positions = tuple(positions)
    if not positions:
        return Fraction(0)
    small, fld = code.small, code.field
    ranks: dict[tuple[int, ...], int] = {}
    total = 0
    for c in range(code.copies):
        nodes = tuple(code.small_nodes_at(c, positions))
        if nodes not in ranks:
            ranks[nodes] = fld.rank(small.stacked(nodes)) if nodes else 0
        total += ranks[nodes]
    return Fraction(total, code.copies * small.file_symbols)


def _masks(n: int, r: int) -> np.ndarray:
    return np.array(
        [sum(1 << i for i in s) for s in itertools.combinations(range(n), r)], dtype=np.uint64
    )


@lru_cache(maxsize=None)
def _mean_capped_overlap(n: int, n_hat: int, k: int, cap: int) -> Fraction:
    """Average of min(|P & K|, cap) over every n_hat-set P and k-set K of n."""
    placements = _masks(n, n_hat)
    subsets = _masks(n, k)
    total = 0
    chunk = max(1, 2_000_000 // len(subsets))
    for start in range(0, len(placements), chunk):
        block = placements[start : start + chunk, None] & subsets[None, :]
        total += int(np.minimum(np.bitwise_count(block), cap).sum(dtype=np.int64))
    return Fraction(total, len(placements) * len(subsets))


def mk_oracle(
    params: SystemParams,
    k_hat: int,
    max_n: int = ORACLE_MAX_N,
    max_pairs: int = ORACLE_MAX_PAIRS,
) -> Fraction:
    """Average information held by ``k`` nodes, by enumerating every placement
    of the small code against every ``k``-subset.

    Each overlap of ``w`` small-code nodes is credited ``min(w, k_hat)`` node
    loads, the information content of ``w`` nodes of an MSR code.
    """
    small = match_small_code(params, k_hat, "repair")
    n = params.n
    if n > max_n:
        raise OracleCapError(f"n={n} exceeds the oracle cap n <= {max_n}")
    pairs = comb(n, small.n_hat) * comb(n, params.k)
    if pairs > max_pairs:
        raise OracleCapError(f"{pairs} placement/subset pairs exceed the cap of {max_pairs}")
    return _mean_capped_overlap(n, small.n_hat, params.k, k_hat) * small.alpha_hat
