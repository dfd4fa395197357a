"""Storage / repair-bandwidth tradeoff curves and achievable regions.

Every function returns exact :class:`~fractions.Fraction` values. Points are
normalized to a unit file size unless ``normalize=False`` is passed, in which
case they are reported at the scale of ``SystemParams.file_size`` (and, for
Construction 2, before division by the achievable file size ``M_k``).

Small-code conventions: a small ``(n_hat, k_hat)`` MSR code stores
``alpha_hat`` per node and a file of ``k_hat * alpha_hat``; it is embedded
in the big ``n``-node system next to ``n - n_hat`` empty nodes, and the
result is homogenized by gluing all node permutations.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Literal, Optional

from .exactmath import binomial, hypergeom_support, hypergeom_weight

ParityRule = Literal["reconstruction", "repair"]


class ParameterError(ValueError):
    """Raised when a parameter combination violates a documented constraint."""


class InfeasibleError(ValueError):
    """Raised when no repair bandwidth can meet the file size at a given storage."""


class Provenance(str, enum.Enum):
    MSR = "MSR"
    MBR = "MBR"
    FUNCTIONAL_VERTEX = "FUNCTIONAL-VERTEX"
    SPACE_SHARE = "SPACE-SHARE"
    BASELINE = "BASELINE"
    CONSTRUCTION1 = "CONSTRUCTION1"
    CONSTRUCTION2 = "CONSTRUCTION2"


# tie-break order when two anchors carry identical coordinates
_PROVENANCE_RANK = {p: i for i, p in enumerate(Provenance)}


@dataclass(frozen=True)
class SystemParams:
    n: int
    k: int
    d: int
    file_size: Fraction = Fraction(1)

    def __post_init__(self):
        if not 1 <= self.k <= self.d <= self.n - 1:
            raise ParameterError(
                f"need 1 <= k <= d <= n-1, got (n, k, d) = ({self.n}, {self.k}, {self.d})"
            )
        object.__setattr__(self, "file_size", Fraction(self.file_size))
        if self.file_size <= 0:
            raise ParameterError(f"file_size must be positive, got {self.file_size}")


@dataclass(frozen=True)
class SmallCode:
    n_hat: int
    k_hat: int
    alpha_hat: Fraction

    def __post_init__(self):
        if not 1 <= self.k_hat < self.n_hat:
            raise ParameterError(f"need 1 <= k_hat < n_hat, got ({self.n_hat}, {self.k_hat})")
        object.__setattr__(self, "alpha_hat", Fraction(self.alpha_hat))
        if self.alpha_hat <= 0:
            raise ParameterError(f"alpha_hat must be positive, got {self.alpha_hat}")

    @property
    def file_size(self) -> Fraction:
        return self.k_hat * self.alpha_hat


@dataclass(frozen=True)
class TradeoffPoint:
    alpha: Fraction
    gamma: Fraction
    provenance: Provenance
    k_hat: Optional[int] = None

    @property
    def coords(self) -> tuple[Fraction, Fraction]:
        return (self.alpha, self.gamma)

    @property
    def label(self) -> str:
        if self.k_hat is None:
            return self.provenance.value
        return f"{self.provenance.value}({self.k_hat})"

    def dominates(self, other: "TradeoffPoint") -> bool:
        """True if ``self`` is at least as good in both coordinates and
        strictly better in one."""
        return (
            self.alpha <= other.alpha
            and self.gamma <= other.gamma
            and self.coords != other.coords
        )


# ---------------------------------------------------------------------------
# functional-repair outer bound and the two extreme points


def functional_capacity(params: SystemParams, alpha: Fraction, gamma: Fraction) -> Fraction:
    """Largest file storable under functional repair at (alpha, gamma)."""
    if alpha < 0 or gamma < 0:
        raise ParameterError("alpha and gamma must be non-negative")
    d = params.d
    return sum(
        (min(Fraction(alpha), Fraction((d - i) * gamma, d)) for i in range(params.k)),
        Fraction(0),
    )


def min_functional_gamma(params: SystemParams, alpha: Fraction) -> Fraction:
    """Smallest gamma whose functional capacity at ``alpha`` reaches the file size.

    With the first ``j`` terms saturated at ``alpha`` the capacity is linear in
    gamma; the answer lies on the unique segment whose saturation pattern is
    self-consistent.
    """
    k, d, m = params.k, params.d, params.file_size
    alpha = Fraction(alpha)
    if alpha < m / k:
        raise InfeasibleError(f"alpha={alpha} is below the minimum storage {m / k}")
    for j in range(k):
        slope = Fraction(sum(d - i for i in range(j, k)), d)
        gamma = (m - j * alpha) / slope
        if gamma < 0:
            continue
        # terms i < j saturated, terms i >= j not
        if j > 0 and Fraction(d - j + 1, d) * gamma < alpha:
            continue
        if Fraction(d - j, d) * gamma > alpha:
            continue
        return gamma
    raise AssertionError("unreachable: alpha >= M/k always has a consistent segment")  # pragma: no cover


def functional_vertices(params: SystemParams, normalize: bool = True) -> list[TradeoffPoint]:
    """Corner points of the functional-repair curve, ordered MSR to MBR."""
    k, d = params.k, params.d
    m = Fraction(1) if normalize else params.file_size
    pts = []
    for j in reversed(range(k)):
        # gamma chosen so that term j sits exactly at alpha
        per_alpha = (j + 1) + sum(Fraction(d - i, d - j) for i in range(j + 1, k))
        alpha = m / per_alpha
        gamma = Fraction(d, d - j) * alpha
        pts.append(TradeoffPoint(alpha, gamma, Provenance.FUNCTIONAL_VERTEX))
    return pts


def msr_point(params: SystemParams, normalize: bool = True) -> TradeoffPoint:
    k, d = params.k, params.d
    m = Fraction(1) if normalize else params.file_size
    return TradeoffPoint(m / k, d * m / (k * (d - k + 1)), Provenance.MSR)


def mbr_point(params: SystemParams, normalize: bool = True) -> TradeoffPoint:
    k, d = params.k, params.d
    m = Fraction(1) if normalize else params.file_size
    v = 2 * d * m / (k * (2 * d - k + 1))
    return TradeoffPoint(v, v, Provenance.MBR)


# ---------------------------------------------------------------------------
# small-code building blocks


def small_code_bandwidth(code: SmallCode, d_hat: int) -> Fraction:
    """Ideal MSR repair download at repair degree ``d_hat``."""
    if not code.k_hat <= d_hat <= code.n_hat - 1:
        raise ParameterError(
            f"d_hat={d_hat} outside [{code.k_hat}, {code.n_hat - 1}] for small code "
            f"({code.n_hat}, {code.k_hat})"
        )
    return Fraction(d_hat, d_hat - code.k_hat + 1) * code.alpha_hat


def match_small_code(params: SystemParams, k_hat: int, parity_rule: ParityRule) -> SmallCode:
    """Small MSR code with as many parities as the big code (``reconstruction``)
    or as many parities as non-helpers (``repair``)."""
    if parity_rule == "reconstruction":
        top, parities = params.k, params.n - params.k
    elif parity_rule == "repair":
        top, parities = params.d, params.n - params.d
    else:
        raise ParameterError(f"unknown parity rule {parity_rule!r}")
    if not 1 <= k_hat <= top:
        raise ParameterError(f"k_hat={k_hat} outside [1, {top}] for parity rule {parity_rule!r}")
    return SmallCode(k_hat + parities, k_hat, params.file_size / k_hat)


def repair_degree_distribution(n: int, d: int, small: SmallCode) -> dict[int, Fraction]:
    """Fraction of helper sets (for a failed small-code node) that contain
    exactly ``d_hat`` small-code nodes, keyed by ``d_hat``."""
    n_hat, k_hat = small.n_hat, small.k_hat
    dist = {
        dh: hypergeom_weight(n - 1, n_hat - 1, d, dh)
        for dh in hypergeom_support(n - 1, n_hat - 1, d)
    }
    if sum(dist.values()) != 1:
        raise ArithmeticError(f"helper-set weights do not sum to 1: {dist}")
    lo = max(k_hat, d - (n - n_hat))
    if min(dist) < lo:
        raise ParameterError(
            f"some helper sets hold fewer than k_hat={k_hat} small-code nodes; "
            f"repair cannot be inherited (n={n}, d={d}, n_hat={n_hat})"
        )
    return dist


def nonempty_repair_bandwidth(n: int, d: int, small: SmallCode) -> Fraction:
    """Average download to repair a small-code node, over uniform helper sets."""
    dist = repair_degree_distribution(n, d, small)
    return sum((small_code_bandwidth(small, dh) * w for dh, w in dist.items()), Fraction(0))


def _c1_pieces(params: SystemParams, k_hat: int):
    small = match_small_code(params, k_hat, "reconstruction")
    alpha = Fraction(small.n_hat, params.n) * small.alpha_hat
    gamma1 = nonempty_repair_bandwidth(params.n, params.d, small)
    gamma = Fraction(small.n_hat, params.n) * gamma1
    return small, alpha, gamma, gamma1


def construction1_point(params: SystemParams, k_hat: int, normalize: bool = True) -> TradeoffPoint:
    small, alpha, gamma, _ = _c1_pieces(params, k_hat)
    m = small.file_size
    if normalize:
        alpha, gamma = alpha / m, gamma / m
    return TradeoffPoint(alpha, gamma, Provenance.CONSTRUCTION1, k_hat)


def construction1_nonempty_gamma(params: SystemParams, k_hat: int) -> Fraction:
    """Average repair bandwidth of a non-empty node, per unit file."""
    small, _, _, gamma1 = _c1_pieces(params, k_hat)
    return gamma1 / small.file_size


def construction2_file_size(params: SystemParams, small: SmallCode) -> Fraction:
    """Average information held by ``k`` nodes when the small code is placed
    uniformly at random among the ``n`` positions."""
    n, k = params.n, params.k
    if small.n_hat - small.k_hat != n - params.d:
        raise ParameterError(
            f"small code ({small.n_hat}, {small.k_hat}) does not follow the repair parity "
            f"rule n_hat - k_hat = n - d = {n - params.d}"
        )
    total = Fraction(0)
    for w in range(k + 1):
        total += min(w, small.k_hat) * Fraction(
            binomial(small.n_hat, w) * binomial(n - small.n_hat, k - w), binomial(n, k)
        )
    return total * small.alpha_hat


def _c2_pieces(params: SystemParams, k_hat: int):
    small = match_small_code(params, k_hat, "repair")
    alpha = Fraction(small.n_hat, params.n) * small.alpha_hat
    mk = construction2_file_size(params, small)
    return small, alpha, mk


def construction2_point(params: SystemParams, k_hat: int, normalize: bool = True) -> TradeoffPoint:
    small, alpha, mk = _c2_pieces(params, k_hat)
    gamma = Fraction(small.n_hat, params.n) * nonempty_repair_bandwidth(params.n, params.d, small)
    if normalize:
        alpha, gamma = alpha / mk, gamma / mk
    return TradeoffPoint(alpha, gamma, Provenance.CONSTRUCTION2, k_hat)


def baseline_point(params: SystemParams, k_hat: int, normalize: bool = True) -> TradeoffPoint:
    """Layered point where every repair downloads the whole small-code file.

    ``k_hat`` ranges over ``1..d``; for ``d = k`` this is the classical
    ``d = k`` layered construction, for ``d > k`` its Construction-2 style
    extension normalized by ``M_k``.
    """
    small, alpha, mk = _c2_pieces(params, k_hat)
    gamma = k_hat * alpha
    if normalize:
        alpha, gamma = alpha / mk, gamma / mk
    return TradeoffPoint(alpha, gamma, Provenance.BASELINE, k_hat)


# ---------------------------------------------------------------------------
# regions


@dataclass(frozen=True)
class Region:
    """Convex hull of the union of up-right quadrants anchored at ``anchors``.

    Dominated anchors are kept (useful for plotting) but never appear in
    :meth:`hull_vertices`.
    """

    anchors: tuple[TradeoffPoint, ...]
    _hull: tuple[TradeoffPoint, ...] = field(default=(), init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "anchors", tuple(self.anchors))

    def hull_vertices(self) -> list[TradeoffPoint]:
        if not self._hull:
            object.__setattr__(self, "_hull", tuple(_lower_envelope(self.anchors)))
        return list(self._hull)

    def min_gamma(self, alpha: Fraction) -> Optional[Fraction]:
        """Lowest achievable gamma at storage ``alpha``; None left of the region."""
        hull = self.hull_vertices()
        alpha = Fraction(alpha)
        if alpha < hull[0].alpha:
            return None
        if alpha >= hull[-1].alpha:
            return hull[-1].gamma
        for a, b in zip(hull, hull[1:]):
            if a.alpha <= alpha <= b.alpha:
                t = (alpha - a.alpha) / (b.alpha - a.alpha)
                return a.gamma + t * (b.gamma - a.gamma)
        raise AssertionError("unreachable")  # pragma: no cover

    def contains(self, alpha: Fraction, gamma: Fraction) -> bool:
        g = self.min_gamma(alpha)
        return g is not None and Fraction(gamma) >= g

    def union(self, other: "Region") -> "Region":
        return Region(self.anchors + other.anchors)


def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _lower_envelope(anchors: Iterable[TradeoffPoint]) -> list[TradeoffPoint]:
    pts = sorted(
        anchors,
        key=lambda p: (p.alpha, p.gamma, _PROVENANCE_RANK[p.provenance], p.k_hat or 0),
    )
    if not pts:
        raise ValueError("region has no anchors")
    pareto: list[TradeoffPoint] = []
    for p in pts:
        if not pareto or p.gamma < pareto[-1].gamma:
            pareto.append(p)
    hull: list[TradeoffPoint] = []
    for p in pareto:
        while len(hull) >= 2 and _cross(hull[-2].coords, hull[-1].coords, p.coords) <= 0:
            hull.pop()
        hull.append(p)
    return hull


def hull_vertices(region: Region) -> list[TradeoffPoint]:
    return region.hull_vertices()


def space_sharing_curve(params: SystemParams) -> Region:
    return Region((msr_point(params), mbr_point(params)))


def theorem1_region(params: SystemParams) -> Region:
    """Achievable region of the ``d = k`` construction plus both extreme points."""
    if params.d != params.k:
        raise ParameterError(f"this region needs d = k, got k={params.k}, d={params.d}")
    anchors = [construction1_point(params, kh) for kh in range(1, params.k + 1)]
    return Region((*anchors, msr_point(params), mbr_point(params)))


def theorem2_region(params: SystemParams) -> Region:
    """Achievable region combining both constructions and the extreme points."""
    c1 = [construction1_point(params, kh) for kh in range(1, params.k + 1)]
    c2 = [construction2_point(params, kh) for kh in range(1, params.d + 1)]
    return Region((*c1, *c2, msr_point(params), mbr_point(params)))


def baseline_region(params: SystemParams) -> Region:
    pts = [baseline_point(params, kh) for kh in range(1, params.d + 1)]
    return Region((*pts, msr_point(params), mbr_point(params)))


def inner_bound_region(params: SystemParams) -> Region:
    return theorem1_region(params) if params.d == params.k else theorem2_region(params)
