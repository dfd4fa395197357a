"""Plot-ready output records with exact and decimal columns."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .exactmath import from_exact, to_decimal, to_exact
from .tradeoff import SystemParams, TradeoffPoint

CSV_COLUMNS = ["series", "khat", "alpha_exact", "gamma_exact", "alpha", "gamma"]


@dataclass
class OutputRecord:
    params: SystemParams
    series: str
    points: list[TradeoffPoint]
    metadata: dict = field(default_factory=dict)

    def rows(self) -> list[dict]:
        return [
            {
                "series": self.series,
                "khat": "" if p.k_hat is None else p.k_hat,
                "alpha_exact": to_exact(p.alpha),
                "gamma_exact": to_exact(p.gamma),
                "alpha": to_decimal(p.alpha),
                "gamma": to_decimal(p.gamma),
            }
            for p in self.points
        ]

    def to_dict(self) -> dict:
        return {
            "params": {"n": self.params.n, "k": self.params.k, "d": self.params.d},
            "series": self.series,
            "points": [
                {k: v for k, v in row.items() if k != "series"} | {"provenance": p.label}
                for row, p in zip(self.rows(), self.points)
            ],
            "metadata": self.metadata,
        }


def render_csv(records: Iterable[OutputRecord]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in records:
        w.writerows(r.rows())
    return buf.getvalue()


def render_json(records: Iterable[OutputRecord]) -> str:
    return json.dumps([r.to_dict() for r in records], indent=2) + "\n"


def parse_csv(text: str) -> list[tuple[str, Optional[int], Fraction, Fraction]]:
    """Read back ``(series, khat, alpha, gamma)`` from the exact columns."""
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        khat = int(row["khat"]) if row["khat"] else None
        out.append((row["series"], khat, from_exact(row["alpha_exact"]), from_exact(row["gamma_exact"])))
    return out
