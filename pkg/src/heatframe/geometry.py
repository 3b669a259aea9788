"""Discretized metric measure spaces on an interval.

A space is a finite quadrature rule (points, positive weights) together with
a metric on the points.  Three metrics are supported:

* ``arccos``    d(x, y) = |arccos x - arccos y|, the intrinsic metric under
                which Jacobi-type weights are doubling up to the endpoints;
* ``euclidean`` d(x, y) = |x - y|;
* ``custom-table`` an explicit symmetric distance matrix over the points.

Balls are open: B(s, r) = {x : d(s, x) < r}, and sigma(B) is the sum of the
quadrature weights inside.  On top of ball volumes the module estimates a
doubling exponent and checks the three quantitative growth bounds used by
every later estimate: scaled growth

    sigma(B(s, beta r)) <= (2 beta)^k sigma(B(s, r)),   beta >= 1,

center-shifted comparison

    sigma(B(s1, r)) <= 2^k (1 + d(s1, s2)/r)^k sigma(B(s2, r)),

and the volume floor sigma(B(s, r)) >= 2^(-k) a r^k for 0 < r <= 1, where a
is the smallest unit-ball mass seen on the sample.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from ._recurrence import gauss_nodes
from .errors import (
    ContractError,
    DegenerateBallError,
    DomainError,
    ResolutionError,
    SamplingError,
)
from .reporting import VerificationReport, make_report

METRIC_ARCCOS = "arccos"
METRIC_EUCLIDEAN = "euclidean"
METRIC_TABLE = "custom-table"
_METRIC_KINDS = (METRIC_ARCCOS, METRIC_EUCLIDEAN, METRIC_TABLE)

_TRIANGLE_TOL = 1e-12
_MATCH_TOL = 1e-12


@dataclass(frozen=True)
class MetricMeasureSpace:
    """Finite point set with positive weights and one of the supported metrics."""

    points: np.ndarray
    weights: np.ndarray
    metric_kind: str = METRIC_EUCLIDEAN
    dist_table: np.ndarray | None = None

    def __post_init__(self) -> None:
        points = np.asarray(self.points, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)
        if points.ndim != 1 or points.size == 0:
            raise DomainError("points must be a nonempty 1-d array")
        if weights.shape != points.shape:
            raise ContractError("weights must align with points")
        if not np.all(weights > 0.0):
            raise DomainError("weights must be strictly positive")
        if self.metric_kind not in _METRIC_KINDS:
            raise DomainError(f"unknown metric kind: {self.metric_kind!r}")
        if self.metric_kind == METRIC_ARCCOS:
            if np.any(points < -1.0) or np.any(points > 1.0):
                raise DomainError("arccos metric needs points in [-1, 1]")
        if self.metric_kind == METRIC_TABLE:
            table = self.dist_table
            if table is None:
                raise ContractError("custom-table metric needs dist_table")
            table = np.asarray(table, dtype=float)
            object.__setattr__(self, "dist_table", table)
            n = points.size
            if table.shape != (n, n):
                raise ContractError("dist_table must be square over the points")
            if np.abs(np.diag(table)).max(initial=0.0) > _TRIANGLE_TOL:
                raise DomainError("dist_table diagonal must vanish")
            if np.abs(table - table.T).max() > _TRIANGLE_TOL:
                raise DomainError("dist_table must be symmetric")
            if np.any(table < -_TRIANGLE_TOL):
                raise DomainError("distances must be nonnegative")
            self._check_triangle(table)
        elif self.dist_table is not None:
            raise ContractError("dist_table only applies to the custom-table metric")

    @staticmethod
    def _check_triangle(table: np.ndarray) -> None:
        n = table.shape[0]
        if n <= 40:
            triples = [(i, j, k) for i in range(n) for j in range(n) for k in range(n)]
        else:
            rng = np.random.default_rng(0)
            triples = rng.integers(0, n, size=(500, 3)).tolist()
        for i, j, k in triples:
            if table[i, j] > table[i, k] + table[k, j] + _TRIANGLE_TOL:
                raise DomainError("dist_table violates the triangle inequality")

    @property
    def n(self) -> int:
        return int(self.points.size)

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    @cached_property
    def _theta(self) -> np.ndarray:
        return np.arccos(self.points)

    @cached_property
    def distance_matrix(self) -> np.ndarray:
        if self.metric_kind == METRIC_TABLE:
            return self.dist_table
        coords = self._theta if self.metric_kind == METRIC_ARCCOS else self.points
        return np.abs(coords[:, None] - coords[None, :])

    @cached_property
    def diameter(self) -> float:
        return float(self.distance_matrix.max())

    def _locate(self, center: float) -> int:
        idx = int(np.argmin(np.abs(self.points - center)))
        if abs(self.points[idx] - center) > _MATCH_TOL:
            raise DomainError("custom-table metric only measures distances from stored points")
        return idx

    def distances_from(self, center: float) -> np.ndarray:
        """Distances from an arbitrary coordinate to every space point."""
        if self.metric_kind == METRIC_TABLE:
            return self.dist_table[self._locate(center)]
        if self.metric_kind == METRIC_ARCCOS:
            if center < -1.0 or center > 1.0:
                raise DomainError("arccos metric needs a center in [-1, 1]")
            return np.abs(self._theta - math.acos(center))
        return np.abs(self.points - float(center))

    def distance(self, a: float, b: float) -> float:
        """Metric distance between two coordinates."""
        if self.metric_kind == METRIC_TABLE:
            return float(self.dist_table[self._locate(a), self._locate(b)])
        if self.metric_kind == METRIC_ARCCOS:
            for value in (a, b):
                if value < -1.0 or value > 1.0:
                    raise DomainError("arccos metric needs coordinates in [-1, 1]")
            return abs(math.acos(a) - math.acos(b))
        return abs(float(a) - float(b))


def make_jacobi_space(gamma: float, alpha: float, n_nodes: int) -> MetricMeasureSpace:
    """Gauss quadrature space for the weight (1-x)^gamma (1+x)^alpha.

    The rule integrates polynomials up to degree 2 n_nodes - 1 exactly, so
    the discrete measure reproduces every moment a basis of degree
    n_nodes - 1 can probe.  The metric is the intrinsic arccos metric.
    """
    if n_nodes < 2:
        raise DomainError("need at least two quadrature nodes")
    x, w = gauss_nodes(gamma, alpha, n_nodes)
    return MetricMeasureSpace(points=x, weights=w, metric_kind=METRIC_ARCCOS)


def ball_volume(space: MetricMeasureSpace, center: float, r: float) -> float:
    """Quadrature mass of the open ball B(center, r)."""
    if r < 0.0:
        raise DomainError("radius must be nonnegative")
    if r == 0.0:
        return 0.0
    d = space.distances_from(center)
    return float(space.weights[d < r].sum())


def ball_volumes_at_nodes(space: MetricMeasureSpace, r: float) -> np.ndarray:
    """sigma(B(x_j, r)) for every node x_j at once."""
    if r < 0.0:
        raise DomainError("radius must be nonnegative")
    if r == 0.0:
        return np.zeros(space.n)
    return (space.distance_matrix < r) @ space.weights


def mean_value(space: MetricMeasureSpace, f: np.ndarray, center: float, r: float) -> float:
    """Weighted average of nodal values over B(center, r)."""
    f = np.asarray(f, dtype=float)
    if f.shape != space.points.shape:
        raise ContractError("nodal values must align with the space points")
    d = space.distances_from(center)
    mask = d < r
    if not mask.any():
        raise DegenerateBallError("ball carries no quadrature mass")
    w = space.weights[mask]
    return float(np.dot(w, f[mask]) / w.sum())


@dataclass(frozen=True)
class DoublingProfile:
    """Empirical doubling data: exponents and the unit-ball mass floor.

    k_hat bounds sigma(B(s, 2r))/sigma(B(s, r)) <= 2^k_hat over the sample,
    alpha_hat is the matching reverse exponent on radii <= diameter/3,
    a_noncollapse is the smallest sampled unit-ball mass, and a_caret is the
    derived floor constant 2^(-k_hat) a_noncollapse.
    """

    k_hat: float
    alpha_hat: float
    a_noncollapse: float
    a_caret: float

    def __post_init__(self) -> None:
        if not (self.k_hat >= self.alpha_hat >= 0.0):
            raise DomainError("exponents must satisfy k_hat >= alpha_hat >= 0")
        if self.a_noncollapse <= 0.0:
            raise DomainError("unit-ball mass floor must be positive")

    @property
    def k(self) -> int:
        """k_hat rounded up to the next integer, at least 1."""
        return max(1, math.ceil(self.k_hat - 1e-9))

    def to_dict(self) -> dict[str, float | int]:
        return {
            "k_hat": float(self.k_hat),
            "alpha_hat": float(self.alpha_hat),
            "a_noncollapse": float(self.a_noncollapse),
            "a_caret": float(self.a_caret),
            "k": self.k,
        }


def estimate_doubling(
    space: MetricMeasureSpace,
    centers: Sequence[float],
    radii: Sequence[float],
) -> DoublingProfile:
    """Measure doubling ratios sigma(B(s, 2r))/sigma(B(s, r)) over a sample.

    Every (center, radius) pair must produce a ball with positive mass; a
    zero-mass inner ball means the grid cannot resolve the radius.  The
    reverse exponent alpha_hat is read off the radii not exceeding
    diameter/3 (ratios there are bounded away from 1 on a connected space);
    if no sampled radius qualifies it degrades to the trivial value 0.
    """
    centers = list(centers)
    radii = [float(r) for r in radii]
    if not centers or not radii:
        raise SamplingError("need at least one center and one radius")
    if any(r <= 0.0 for r in radii):
        raise DomainError("radii must be positive")
    reverse_cut = space.diameter / 3.0
    ratios: list[float] = []
    reverse_ratios: list[float] = []
    unit_masses: list[float] = []
    for c in centers:
        d = space.distances_from(c)
        unit_masses.append(float(space.weights[d < 1.0].sum()))
        for r in radii:
            inner = float(space.weights[d < r].sum())
            if inner <= 0.0:
                raise ResolutionError("ball with zero mass; grid too coarse for the radius")
            outer = float(space.weights[d < 2.0 * r].sum())
            ratio = outer / inner
            ratios.append(ratio)
            if r <= reverse_cut:
                reverse_ratios.append(ratio)
    k_hat = math.log2(max(ratios))
    alpha_hat = math.log2(min(reverse_ratios)) if reverse_ratios else 0.0
    a_noncollapse = min(unit_masses)
    if a_noncollapse <= 0.0:
        raise ResolutionError("a sampled unit ball carries no mass")
    return DoublingProfile(
        k_hat=k_hat,
        alpha_hat=alpha_hat,
        a_noncollapse=a_noncollapse,
        a_caret=2.0 ** (-k_hat) * a_noncollapse,
    )


def verify_ball_growth(
    space: MetricMeasureSpace,
    profile: DoublingProfile,
    samples: Iterable[tuple[float, float, float, float]],
) -> list[VerificationReport]:
    """Check the three growth bounds on (s1, s2, r, beta) samples.

    Uses k = profile.k (the integer roundup) in every constant.  The volume
    floor is only asserted for r <= 1, its stated range.
    """
    k = profile.k
    a_floor = 2.0 ** (-k) * profile.a_noncollapse
    reports: list[VerificationReport] = []
    for s1, s2, r, beta in samples:
        if r <= 0.0:
            raise DomainError("growth samples need positive radii")
        if beta < 1.0:
            raise DomainError("growth samples need beta >= 1")
        d12 = space.distance(s1, s2)
        vol_r = ball_volume(space, s1, r)
        vol_beta = ball_volume(space, s1, beta * r)
        scaled_const = (2.0 * beta) ** k
        reports.append(
            make_report(
                "growth.scaled",
                vol_beta,
                scaled_const * vol_r,
                paper_constant=scaled_const,
                context={"s1": s1, "r": r, "beta": beta, "k": k},
            )
        )
        vol_other = ball_volume(space, s2, r)
        shift_const = 2.0 ** k * (1.0 + d12 / r) ** k
        reports.append(
            make_report(
                "growth.shifted",
                vol_r,
                shift_const * vol_other,
                paper_constant=shift_const,
                context={"s1": s1, "s2": s2, "r": r, "k": k},
            )
        )
        if r <= 1.0:
            reports.append(
                make_report(
                    "growth.floor",
                    vol_r,
                    a_floor * r ** k,
                    lower=True,
                    paper_constant=a_floor,
                    context={"s1": s1, "r": r, "k": k},
                )
            )
    return reports


def space_to_csv(space: MetricMeasureSpace, path: str) -> None:
    """Write the quadrature rule as CSV with columns point, weight."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["point", "weight"])
        for p, w in zip(space.points, space.weights):
            writer.writerow([repr(float(p)), repr(float(w))])


def space_from_csv(path: str, metric_kind: str = METRIC_EUCLIDEAN) -> MetricMeasureSpace:
    """Read a space back from the point, weight CSV layout."""
    points: list[float] = []
    weights: list[float] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [c.strip() for c in reader.fieldnames] != ["point", "weight"]:
            raise DomainError("expected CSV header: point, weight")
        for row in reader:
            points.append(float(row["point"]))
            weights.append(float(row["weight"]))
    return MetricMeasureSpace(points=np.array(points), weights=np.array(weights), metric_kind=metric_kind)
