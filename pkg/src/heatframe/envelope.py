"""Localization envelope and its closed-form estimate constants.

The envelope at scale delta with decay exponent sigma_exp is

    E(s1, s2) = (sigma(B(s1, delta)) sigma(B(s2, delta)))^(-1/2)
                * (1 + d(s1, s2)/delta)^(-sigma_exp),

the standard majorant for kernels localized at scale delta on a space with
doubling exponent k.  The companion constants, all explicit in (k, sigma_exp),
are

    a1      = (2^-k - 2^-sigma_exp)^-1                    (sigma_exp > k)
    a2      = 2^(sigma_exp+k+1) / (2^-k - 2^(k-sigma_exp)) (sigma_exp > 2k)
    a_p(p)  = (2^(kp/2) / (2^-k - 2^(-(sigma_exp-k/2)p)))^(1/p)
                                        (sigma_exp > k(1/2 + 1/p))

controlling the decay integral, envelope self-reproduction, and the L^p
norms of envelope slices.  The verifiers below check each printed inequality
on explicit samples and report margins.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._parallel import ordered_map
from .errors import DomainError, ResolutionError, SamplingError
from .geometry import MetricMeasureSpace, ball_volume, ball_volumes_at_nodes
from .reporting import VerificationReport, make_report



@dataclass(frozen=True)
class EnvelopeParams:
    """Scale, decay exponent, and the integer doubling exponent in force."""

    delta: float
    sigma_exp: float
    k: int

    def __post_init__(self) -> None:
        if self.delta <= 0.0:
            raise DomainError("delta must be positive")
        if self.sigma_exp <= 0.0:
            raise DomainError("sigma_exp must be positive")
        if int(self.k) != self.k or self.k < 1:
            raise DomainError("k must be a positive integer")
        object.__setattr__(self, "k", int(self.k))


@dataclass(frozen=True)
class EstimateConstants:
    """Closed-form constants attached to a (k, sigma_exp) pair."""

    k: int
    sigma_exp: float

    @property
    def a1(self) -> float:
        """Decay-integral constant; needs sigma_exp > k."""
        if self.sigma_exp <= self.k:
            raise DomainError("a1 needs sigma_exp > k")
        return 1.0 / (2.0 ** (-self.k) - 2.0 ** (-self.sigma_exp))

    @property
    def a2(self) -> float:
        """Self-reproduction constant; needs sigma_exp > 2k."""
        if self.sigma_exp <= 2 * self.k:
            raise DomainError("a2 needs sigma_exp > 2k")
        return 2.0 ** (self.sigma_exp + self.k + 1) / (
            2.0 ** (-self.k) - 2.0 ** (self.k - self.sigma_exp)
        )

    def a_p(self, p: float) -> float:
        """L^p-norm constant; needs sigma_exp > k (1/2 + 1/p).

        Nonincreasing in p with limit 2^(k/2) as p grows; p = inf returns
        the limit directly.
        """
        if p < 1.0:
            raise DomainError("p must be at least 1")
        if math.isinf(p):
            if self.sigma_exp <= self.k / 2.0:
                raise DomainError("a_p(inf) needs sigma_exp > k/2")
            return 2.0 ** (self.k / 2.0)
        if self.sigma_exp <= self.k * (0.5 + 1.0 / p):
            raise DomainError("a_p needs sigma_exp > k (1/2 + 1/p)")
        return (
            2.0 ** (self.k * p / 2.0)
            / (2.0 ** (-self.k) - 2.0 ** (-(self.sigma_exp - self.k / 2.0) * p))
        ) ** (1.0 / p)


def constants_for(params: EnvelopeParams) -> EstimateConstants:
    return EstimateConstants(k=params.k, sigma_exp=params.sigma_exp)


def envelope(space: MetricMeasureSpace, params: EnvelopeParams, s1: float, s2: float) -> float:
    """E(s1, s2) at scale params.delta with exponent params.sigma_exp."""
    vol1 = ball_volume(space, s1, params.delta)
    vol2 = ball_volume(space, s2, params.delta)
    if vol1 <= 0.0 or vol2 <= 0.0:
        raise ResolutionError("envelope needs positive ball mass at both slots")
    d = space.distance(s1, s2)
    return (vol1 * vol2) ** -0.5 * (1.0 + d / params.delta) ** -params.sigma_exp


def envelope_profile(space: MetricMeasureSpace, params: EnvelopeParams, s: float) -> np.ndarray:
    """E(s, x_j) over all nodes x_j, vectorized through the node ball table."""
    vols = ball_volumes_at_nodes(space, params.delta)
    if np.any(vols <= 0.0):
        raise ResolutionError("a node ball at scale delta carries no mass")
    vol_s = ball_volume(space, s, params.delta)
    if vol_s <= 0.0:
        raise ResolutionError("center ball at scale delta carries no mass")
    d = space.distances_from(s)
    return (vol_s * vols) ** -0.5 * (1.0 + d / params.delta) ** -params.sigma_exp


def envelope_matrix(space: MetricMeasureSpace, params: EnvelopeParams) -> np.ndarray:
    """E(x_i, x_j) over all node pairs."""
    vols = ball_volumes_at_nodes(space, params.delta)
    if np.any(vols <= 0.0):
        raise ResolutionError("a node ball at scale delta carries no mass")
    scale = (vols[:, None] * vols[None, :]) ** -0.5
    return scale * (1.0 + space.distance_matrix / params.delta) ** -params.sigma_exp


def envelope_lp_norm(space: MetricMeasureSpace, params: EnvelopeParams, s1: float, p: float) -> float:
    """Weighted L^p norm of the slice E(s1, .) over the space."""
    if p < 1.0:
        raise DomainError("p must be at least 1")
    profile = envelope_profile(space, params, s1)
    if math.isinf(p):
        return float(np.abs(profile).max())
    return float((space.weights @ np.abs(profile) ** p) ** (1.0 / p))


def verify_envelope_lp(
    space: MetricMeasureSpace,
    params: EnvelopeParams,
    p: float,
    sample_points: Sequence[float],
) -> list[VerificationReport]:
    """Check ||E(s1, .)||_p <= a_p(p) sigma(B(s1, delta))^(1/p - 1) on samples."""
    if len(sample_points) == 0:
        raise SamplingError("need at least one sample point")
    const = constants_for(params).a_p(p)
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    reports = []
    for s1 in sample_points:
        norm = envelope_lp_norm(space, params, s1, p)
        vol = ball_volume(space, s1, params.delta)
        rhs = const * vol ** (inv_p - 1.0)
        reports.append(
            make_report(
                "envelope.lp_norm",
                norm,
                rhs,
                paper_constant=const,
                context={"s1": s1, "p": p, "delta": params.delta, "sigma_exp": params.sigma_exp, "k": params.k},
            )
        )
    return reports


def verify_envelope_scaling(
    space: MetricMeasureSpace,
    params: EnvelopeParams,
    beta: float,
    pairs: Sequence[tuple[float, float]],
) -> list[VerificationReport]:
    """Compare envelopes across scale changes delta -> beta delta.

    For beta < 1 the printed bound is E_{beta delta} <= (2/beta)^k E_delta;
    for beta >= 1 it is E_{beta delta} <= beta^sigma_exp E_delta.  Each pair
    also receives the one-volume comparison
    E <= 2^(k/2) sigma(B(s1, delta))^-1 (1 + d/delta)^(sigma_exp - k/2),
    with the exponent written exactly as stated so a failure would surface
    here rather than be papered over.
    """
    if beta <= 0.0:
        raise DomainError("beta must be positive")
    if len(pairs) == 0:
        raise SamplingError("need at least one pair")
    scaled = EnvelopeParams(delta=beta * params.delta, sigma_exp=params.sigma_exp, k=params.k)
    k = params.k
    reports = []
    for s1, s2 in pairs:
        base = envelope(space, params, s1, s2)
        moved = envelope(space, scaled, s1, s2)
        if beta < 1.0:
            const = (2.0 / beta) ** k
            check_id = "envelope.shrink"
        else:
            const = beta ** params.sigma_exp
            check_id = "envelope.grow"
        context = {"s1": s1, "s2": s2, "beta": beta, "delta": params.delta, "k": k}
        reports.append(make_report(check_id, moved, const * base, paper_constant=const, context=context))
        d = space.distance(s1, s2)
        vol1 = ball_volume(space, s1, params.delta)
        one_vol_rhs = 2.0 ** (k / 2.0) / vol1 * (1.0 + d / params.delta) ** (params.sigma_exp - k / 2.0)
        reports.append(
            make_report(
                "envelope.one_volume",
                base,
                one_vol_rhs,
                paper_constant=2.0 ** (k / 2.0),
                context=context,
            )
        )
    return reports


def verify_lemma_integrals(
    space: MetricMeasureSpace,
    params: EnvelopeParams,
    pairs: Sequence[tuple[float, float]],
) -> list[VerificationReport]:
    """Check the decay-integral family against its printed constants.

    Per (s1, s2) pair, in order of strengthening hypotheses:

    * decay integral (sigma_exp > k):
        int (1 + d(s1, v)/delta)^-sigma_exp  <= a1 sigma(B(s1, delta));
    * pairwise product, three successive majorants (sigma_exp > k):
        int prod_i (1 + d(s_i, v)/delta)^-sigma_exp
          <= 2^sigma_exp a1 (sigma B1 + sigma B2) (1 + d12/delta)^-sigma_exp
          <= 2^sigma_exp (2^k + 1) a1 sigma(B1) (1 + d12/delta)^-(sigma_exp-k)
          <= 2^sigma_exp (2^k + 1) a1 sigma(B1);
    * volume-weighted product and envelope self-reproduction (sigma_exp > 2k):
        int sigma(B(v, delta))^-1 prod_i (...)^-sigma_exp
          <= a2 (1 + d12/delta)^-sigma_exp,
        int E(s1, v) E(v, s2) dsigma(v)  <= a2 E(s1, s2).

    Parts whose exponent hypothesis fails for the supplied params are
    skipped; everything that is emitted was checked under its own
    hypothesis.
    """
    if len(pairs) == 0:
        raise SamplingError("need at least one pair")
    delta = params.delta
    s_exp = params.sigma_exp
    k = params.k
    consts = constants_for(params)
    with_a1 = s_exp > k
    with_a2 = s_exp > 2 * k
    w = space.weights
    vols = ball_volumes_at_nodes(space, delta)
    if np.any(vols <= 0.0):
        raise ResolutionError("a node ball at scale delta carries no mass")

    def one_pair(pair: tuple[float, float]) -> list[VerificationReport]:
        s1, s2 = pair
        out: list[VerificationReport] = []
        d1 = space.distances_from(s1)
        d2 = space.distances_from(s2)
        decay1 = (1.0 + d1 / delta) ** -s_exp
        decay2 = (1.0 + d2 / delta) ** -s_exp
        vol1 = ball_volume(space, s1, delta)
        vol2 = ball_volume(space, s2, delta)
        d12 = space.distance(s1, s2)
        far = (1.0 + d12 / delta) ** -s_exp
        context = {"s1": s1, "s2": s2, "delta": delta, "sigma_exp": s_exp, "k": k}
        if with_a1:
            a1 = consts.a1
            out.append(
                make_report(
                    "lemma.decay_integral",
                    float(w @ decay1),
                    a1 * vol1,
                    paper_constant=a1,
                    context=context,
                )
            )
            product_integral = float(w @ (decay1 * decay2))
            out.append(
                make_report(
                    "lemma.product_pair_volume",
                    product_integral,
                    2.0 ** s_exp * a1 * (vol1 + vol2) * far,
                    paper_constant=2.0 ** s_exp * a1,
                    context=context,
                )
            )
            one_vol_const = 2.0 ** s_exp * (2.0 ** k + 1.0) * a1
            out.append(
                make_report(
                    "lemma.product_one_volume",
                    product_integral,
                    one_vol_const * vol1 * (1.0 + d12 / delta) ** -(s_exp - k),
                    paper_constant=one_vol_const,
                    context=context,
                )
            )
            out.append(
                make_report(
                    "lemma.product_flat",
                    product_integral,
                    one_vol_const * vol1,
                    paper_constant=one_vol_const,
                    context=context,
                )
            )
        if with_a2:
            a2 = consts.a2
            weighted = float(w @ (decay1 * decay2 / vols))
            out.append(
                make_report(
                    "lemma.weighted_product",
                    weighted,
                    a2 * far,
                    paper_constant=a2,
                    context=context,
                )
            )
            prof1 = (vol1 * vols) ** -0.5 * decay1
            prof2 = (vol2 * vols) ** -0.5 * decay2
            out.append(
                make_report(
                    "envelope.self_reproduction",
                    float(w @ (prof1 * prof2)),
                    a2 * envelope(space, params, s1, s2),
                    paper_constant=a2,
                    context=context,
                )
            )
        return out

    reports: list[VerificationReport] = []
    for chunk in ordered_map(one_pair, list(pairs)):
        reports.extend(chunk)
    return reports
