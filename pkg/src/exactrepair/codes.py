"""Concrete small-to-big regenerating codes over GF(q).

The building block is a small ``(n_hat, k_hat = n_hat - 2)`` MSR code with two
subsymbols per node. It is realized by shortening a ``(n_hat + s, 3, 4)``
product-matrix MSR code: the ``s = 3 - k_hat`` extra nodes are forced to store
zeros, so they contribute nothing to repair downloads. Whatever evaluation
points are chosen, the result is only accepted after exhaustively checking
reconstruction from every ``k_hat``-subset and exact repair from every helper
set.

A :class:`HeterogeneousCode` places the small code on ``n_hat`` of ``n``
positions (the rest are empty). :class:`GluedCode` concatenates one copy per
permutation of the ``n`` node labels, each copy carrying its own file.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import tradeoff
from .gf import NoSolutionError, PrimeField

DEFAULT_FIELD = 11
DEFAULT_MAX_N = 7

_PM_K = 3  # the product-matrix parent code is (n', 3, 4) with alpha = 2
_PM_D = 4
SUBSYMBOLS = 2


class CodeValidationError(ValueError):
    """A constructed code violates one of its defining invariants."""


class ResourceCapError(RuntimeError):
    """An exhaustive build would exceed the configured size cap."""


@dataclass
class RepairScheme:
    """Exact repair of ``failed`` from ``helpers`` (small-code indices).

    Helper ``h`` sends ``transmit[h] @ content_h``; the newcomer applies
    ``combine`` to the concatenation of everything received (in helper order).
    """

    failed: int
    helpers: tuple[int, ...]
    transmit: dict[int, np.ndarray]
    combine: np.ndarray

    @property
    def degree(self) -> int:
        return len(self.helpers)

    @property
    def bandwidth(self) -> int:
        return sum(t.shape[0] for t in self.transmit.values())


@dataclass(eq=False)
class MsrSmallCode:
    field: PrimeField
    n_hat: int
    k_hat: int
    generators: list[np.ndarray]
    schemes: dict[tuple[int, tuple[int, ...]], RepairScheme]
    eval_points: tuple[int, ...]
    _decoders: dict = field(default_factory=dict, repr=False)

    @property
    def alpha_hat(self) -> int:
        return self.generators[0].shape[0]

    @property
    def file_symbols(self) -> int:
        return self.generators[0].shape[1]

    @property
    def supported_degrees(self) -> tuple[int, ...]:
        return tuple(sorted({s.degree for s in self.schemes.values()}))

    def stacked(self, nodes: Sequence[int]) -> np.ndarray:
        if not nodes:
            return np.zeros((0, self.file_symbols), dtype=np.int64)
        return np.vstack([self.generators[j] for j in nodes])

    def encode(self, file: np.ndarray) -> np.ndarray:
        """Node contents, shape ``(n_hat, alpha_hat)``."""
        g = np.stack(self.generators)  # (n_hat, alpha_hat, M)
        return np.mod(g @ np.asarray(file, dtype=np.int64), self.field.q)

    def decoder(self, nodes: tuple[int, ...]) -> np.ndarray:
        """Matrix taking the stacked contents of ``nodes`` back to the file."""
        if nodes not in self._decoders:
            a = self.stacked(nodes)
            # left inverse: solve a x = I for a square full-rank subset
            self._decoders[nodes] = self.field.inverse(a)
        return self._decoders[nodes]

    def scheme_for(self, failed: int, available: Sequence[int]) -> RepairScheme:
        """Repair scheme at the largest supported degree the helpers allow."""
        avail = sorted(available)
        for deg in reversed(self.supported_degrees):
            if len(avail) >= deg:
                return self.schemes[(failed, tuple(avail[:deg]))]
        raise CodeValidationError(
            f"only {len(avail)} small-code helpers available for node {failed}; "
            f"need at least {self.k_hat}"
        )

    def as_small_code(self) -> tradeoff.SmallCode:
        return tradeoff.SmallCode(self.n_hat, self.k_hat, Fraction(self.alpha_hat))


def _pm_generator(fld: PrimeField, x: int) -> np.ndarray:
    """Rows mapping the 6 free message symbols (two symmetric 2x2 matrices)
    to the content of the product-matrix node evaluated at ``x``."""
    q = fld.q
    phi = (1, x % q)
    lam = (x * x) % q
    sym = {(0, 0): 0, (0, 1): 1, (1, 0): 1, (1, 1): 2}
    g = np.zeros((SUBSYMBOLS, 6), dtype=np.int64)
    for j in range(SUBSYMBOLS):
        for r in range(SUBSYMBOLS):
            g[j, sym[(r, j)]] += phi[r]
            g[j, 3 + sym[(r, j)]] += lam * phi[r]
    return np.mod(g, q)


def _try_build(fld: PrimeField, n_hat: int, k_hat: int, points: tuple[int, ...]) -> MsrSmallCode:
    real, zeroed = points[:n_hat], points[n_hat:]
    raw = [_pm_generator(fld, x) for x in points]
    if zeroed:
        kernel = fld.nullspace(np.vstack(raw[n_hat:]))
    else:
        kernel = fld.identity(6)
    if kernel.shape[1] != SUBSYMBOLS * k_hat:
        raise CodeValidationError(
            f"file size: shortened code carries {kernel.shape[1]} symbols, "
            f"expected {SUBSYMBOLS * k_hat}"
        )
    gens = [fld.matmul(g, kernel) for g in raw[:n_hat]]
    m = SUBSYMBOLS * k_hat

    for nodes in itertools.combinations(range(n_hat), k_hat):
        if fld.rank(np.vstack([gens[j] for j in nodes])) != m:
            raise CodeValidationError(f"reconstruction: nodes {nodes} do not span the file")

    schemes: dict = {}
    for f in range(n_hat):
        others = [j for j in range(n_hat) if j != f]
        phi = fld.array([[1, real[f]]])
        for deg in sorted({k_hat, n_hat - 1}):
            for helpers in itertools.combinations(others, deg):
                if deg == k_hat:
                    transmit = {h: fld.identity(SUBSYMBOLS) for h in helpers}
                else:
                    transmit = {h: phi.copy() for h in helpers}
                received = np.vstack([fld.matmul(transmit[h], gens[h]) for h in helpers])
                try:
                    combine = fld.solve(received.T, gens[f].T).T
                except NoSolutionError:
                    raise CodeValidationError(
                        f"exact repair: node {f} not recoverable from helpers {helpers}"
                    ) from None
                schemes[(f, helpers)] = RepairScheme(f, helpers, transmit, combine)

    small = MsrSmallCode(fld, n_hat, k_hat, gens, schemes, tuple(points))
    ideal = small.as_small_code()
    for s in schemes.values():
        if tradeoff.small_code_bandwidth(ideal, s.degree) != s.bandwidth:
            raise CodeValidationError(
                f"bandwidth: degree-{s.degree} repair sends {s.bandwidth} subsymbols, "
                f"ideal is {tradeoff.small_code_bandwidth(ideal, s.degree)}"
            )
    return small


def build_small_msr(n_hat: int, k_hat: int, field: int = DEFAULT_FIELD) -> MsrSmallCode:
    """Validated ``(n_hat, k_hat)`` MSR code with two subsymbols per node.

    Only the two-parity regime ``n_hat = k_hat + 2`` with ``k_hat <= 3`` is
    covered by the shortened product-matrix family.
    """
    if n_hat - k_hat != 2:
        raise CodeValidationError(f"need n_hat - k_hat = 2, got ({n_hat}, {k_hat})")
    if not 1 <= k_hat <= _PM_K:
        raise CodeValidationError(
            f"construction unsatisfiable: the shortened product-matrix family covers "
            f"k_hat <= {_PM_K}, got {k_hat}"
        )
    fld = PrimeField(field)
    total = n_hat + (_PM_K - k_hat)
    last_error: Optional[CodeValidationError] = None
    for points in itertools.permutations(range(fld.q), total):
        try:
            return _try_build(fld, n_hat, k_hat, points)
        except CodeValidationError as e:
            last_error = e
    raise CodeValidationError(
        f"field too small: GF({field}) admits no valid ({n_hat}, {k_hat}) code"
        + (f"; last failure: {last_error}" if last_error else "")
    )


@dataclass(eq=False)
class HeterogeneousCode:
    small: MsrSmallCode
    n: int
    placement: tuple[int, ...]  # placement[j] = position hosting small-code node j

    def role(self, position: int) -> Optional[int]:
        try:
            return self.placement.index(position)
        except ValueError:
            return None

    def storage(self) -> list[int]:
        return [self.small.alpha_hat if p in self.placement else 0 for p in range(self.n)]


def extend_with_empty_nodes(
    small: MsrSmallCode, n: int, placement: Optional[Sequence[int]] = None
) -> HeterogeneousCode:
    if placement is None:
        placement = range(small.n_hat)
    placement = tuple(placement)
    if len(placement) != small.n_hat or len(set(placement)) != small.n_hat:
        raise ValueError(f"placement must list {small.n_hat} distinct positions, got {placement}")
    if any(not 0 <= p < n for p in placement):
        raise ValueError(f"placement {placement} outside positions 0..{n - 1}")
    return HeterogeneousCode(small, n, placement)


@dataclass(eq=False)
class GluedCode:
    small: MsrSmallCode
    n: int
    placements: list[tuple[int, ...]]
    files: np.ndarray  # (copies, M)
    contents: np.ndarray  # (copies, n, alpha_hat); zero rows for empty slots
    present: np.ndarray  # (copies, n) bool
    seed: int

    @property
    def copies(self) -> int:
        return len(self.placements)

    @property
    def field(self) -> PrimeField:
        return self.small.field

    def storage_per_node(self) -> list[int]:
        return [int(c) * self.small.alpha_hat for c in self.present.sum(axis=0)]

    @property
    def alpha(self) -> Fraction:
        """Per-node storage over total file size (requires uniform storage)."""
        per_node = set(self.storage_per_node())
        if len(per_node) != 1:
            raise CodeValidationError(f"storage is not homogeneous: {self.storage_per_node()}")
        return Fraction(per_node.pop(), self.copies * self.small.file_symbols)

    def small_nodes_at(self, copy: int, positions) -> list[int]:
        pos = set(positions)
        return [j for j, p in enumerate(self.placements[copy]) if p in pos]


def glue_all_permutations(
    het: HeterogeneousCode, seed: int = 0, max_n: int = DEFAULT_MAX_N
) -> GluedCode:
    n = het.n
    if n > max_n:
        raise ResourceCapError(
            f"gluing n={n} needs {math.factorial(n)} copies, above the cap n <= {max_n}; "
            f"raise it with --cap-override"
        )
    small = het.small
    rng = np.random.default_rng(seed)
    perms = list(itertools.permutations(range(n)))
    files = rng.integers(0, small.field.q, size=(len(perms), small.file_symbols), dtype=np.int64)
    contents = np.zeros((len(perms), n, small.alpha_hat), dtype=np.int64)
    present = np.zeros((len(perms), n), dtype=bool)
    placements = []
    for c, sigma in enumerate(perms):
        placement = tuple(sigma[p] for p in het.placement)
        placements.append(placement)
        encoded = small.encode(files[c])
        for j, p in enumerate(placement):
            contents[c, p] = encoded[j]
            present[c, p] = True
    return GluedCode(small, n, placements, files, contents, present, seed)


def build_concrete(
    params: tradeoff.SystemParams,
    k_hat: int,
    field: int = DEFAULT_FIELD,
    seed: int = 0,
    max_n: int = DEFAULT_MAX_N,
) -> GluedCode:
    """Glued code realizing Construction 1 for a two-parity system."""
    if params.n - params.k != 2:
        raise tradeoff.ParameterError(
            f"concrete codes need n - k = 2, got n={params.n}, k={params.k}"
        )
    shape = tradeoff.match_small_code(params, k_hat, "reconstruction")
    small = build_small_msr(shape.n_hat, shape.k_hat, field)
    return glue_all_permutations(extend_with_empty_nodes(small, params.n), seed, max_n)


def reconstruct(code: GluedCode, positions: Sequence[int]) -> np.ndarray:
    """Recover every copy's file from the nodes at ``positions``."""
    small = code.small
    out = np.zeros_like(code.files)
    for c in range(code.copies):
        nodes = code.small_nodes_at(c, positions)
        if len(nodes) < small.k_hat:
            raise CodeValidationError(
                f"copy {c}: positions {tuple(positions)} hold only {len(nodes)} small-code nodes"
            )
        chosen = tuple(nodes[: small.k_hat])
        data = np.concatenate([code.contents[c, code.placements[c][j]] for j in chosen])
        out[c] = np.mod(small.decoder(chosen) @ data, small.field.q)
    return out


@dataclass
class RepairOutcome:
    failed: int
    helpers: tuple[int, ...]
    replacement: np.ndarray  # (copies, alpha_hat); zero rows where the node is empty
    per_copy: np.ndarray  # transmitted subsymbols per copy
    mismatched: list[int]  # copies whose replacement differs from the stored content

    @property
    def total(self) -> int:
        return int(self.per_copy.sum())

    @property
    def exact(self) -> bool:
        return not self.mismatched


def repair(code: GluedCode, failed: int, helpers: Sequence[int]) -> RepairOutcome:
    helpers = tuple(sorted(helpers))
    if failed in helpers:
        raise ValueError(f"failed node {failed} cannot help its own repair")
    if len(set(helpers)) != len(helpers) or any(not 0 <= h < code.n for h in helpers):
        raise ValueError(f"invalid helper set {helpers} for n={code.n}")
    small, q = code.small, code.field.q
    replacement = np.zeros((code.copies, small.alpha_hat), dtype=np.int64)
    per_copy = np.zeros(code.copies, dtype=np.int64)

    # copies sharing (role of failed, roles of helpers) share a repair scheme
    groups: dict[tuple, list[int]] = {}
    for c in range(code.copies):
        role = code.placements[c].index(failed) if code.present[c, failed] else None
        if role is None:
            continue
        key = (role, tuple(code.small_nodes_at(c, helpers)))
        groups.setdefault(key, []).append(c)

    for (role, avail), cs in groups.items():
        scheme = small.scheme_for(role, avail)
        idx = np.array(cs)
        parts = []
        for h in scheme.helpers:
            pos = np.array([code.placements[c][h] for c in cs])
            stored = code.contents[idx, pos]  # (g, alpha_hat)
            parts.append(stored @ scheme.transmit[h].T)
        received = np.mod(np.hstack(parts), q)
        replacement[idx] = np.mod(received @ scheme.combine.T, q)
        per_copy[idx] = scheme.bandwidth

    mismatched = [
        c
        for c in range(code.copies)
        if code.present[c, failed] and not np.array_equal(replacement[c], code.contents[c, failed])
    ]
    return RepairOutcome(failed, helpers, replacement, per_copy, mismatched)


def _fmt_matrix(m: np.ndarray, indent: str = "    ") -> list[str]:
    return [indent + " ".join(str(int(v)) for v in row) for row in m]


def dumps(code: GluedCode) -> str:
    """Deterministic text rendering of a glued code."""
    small = code.small
    lines = [
        "glued-code v1",
        f"field {small.field.q}",
        f"small n_hat={small.n_hat} k_hat={small.k_hat} alpha_hat={small.alpha_hat} "
        f"file_symbols={small.file_symbols}",
        "eval_points " + " ".join(map(str, small.eval_points)),
    ]
    for j, g in enumerate(small.generators):
        lines.append(f"generator s{j}")
        lines.extend(_fmt_matrix(g))
    for (f, helpers), s in sorted(small.schemes.items()):
        lines.append(
            f"repair s{f} from " + ",".join(f"s{h}" for h in helpers) + f" bandwidth={s.bandwidth}"
        )
        for h in helpers:
            lines.append(f"  transmit s{h}")
            lines.extend(_fmt_matrix(s.transmit[h]))
        lines.append("  combine")
        lines.extend(_fmt_matrix(s.combine))
    lines.append(f"n {code.n}")
    lines.append(f"seed {code.seed}")
    lines.append(f"copies {code.copies}")
    for c, placement in enumerate(code.placements):
        roles = ["-"] * code.n
        for j, p in enumerate(placement):
            roles[p] = f"s{j}"
        file = " ".join(str(int(v)) for v in code.files[c])
        lines.append(f"copy {c} nodes " + " ".join(roles) + f" file {file}")
    return "\n".join(lines) + "\n"
