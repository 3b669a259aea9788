"""Kernel operators, mapping bounds, and dyadic band decompositions.

An operator is a nodal kernel table H(x_i, x_j) acting by quadrature in the
first slot.  When |H| is dominated pointwise by a' E for the localization
envelope E at scale delta, the operator inherits the full L^p -> L^q mapping
scale: with 1/p - 1/q = 1 - 1/r and the volume floor constant a_hat,

    ||H f||_q <= a' a_hat^(k (1/r - 1)) 2^(2k+1) delta^(k (1/q - 1/p)) ||f||_p.

A Schur test is provided alongside as the measured counterpart: bounded
weighted L^r norms of rows and columns give ||H f||_q <= C ||f||_p for the
same exponent relation, with C read off the kernel rather than printed.

Band decomposition splits the spectrum dyadically: block 0 holds beta <= 1
and block j holds 2^(2(j-1)) < beta <= 2^(2j).  The block projectors are
spectral multipliers with indicator symbols, so their images are exactly
orthogonal and block energies sum to ||f||^2; sampling each block on a net
weighted by sqrt-cell-masses gives the frame coefficients whose energy is
compared against the block energy.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .envelope import EnvelopeParams, envelope_matrix
from .errors import ContractError, DomainError, PreconditionError
from .geometry import DoublingProfile, MetricMeasureSpace
from .jacobi import SpectralBasis, coefficients, synthesize
from .nets import Net, cell_masses
from .reporting import VerificationReport, make_report


def lp_norm(weights: np.ndarray, f: np.ndarray, p: float) -> float:
    """Weighted L^p norm; p = inf is the sup over nodes."""
    if p < 1.0:
        raise DomainError("p must be at least 1")
    f = np.abs(np.asarray(f, dtype=float))
    if math.isinf(p):
        return float(f.max())
    return float((weights @ f ** p) ** (1.0 / p))


@dataclass(frozen=True)
class DominationCertificate:
    """Witness that |H| <= a_prime * E holds at every node pair."""

    a_prime: float
    params: EnvelopeParams


@dataclass(frozen=True)
class KernelOperator:
    """Nodal kernel with an optional envelope domination certificate."""

    table: np.ndarray
    domination: DominationCertificate | None = None


def make_operator(table: np.ndarray) -> KernelOperator:
    table = np.asarray(table, dtype=float)
    if table.ndim != 2 or table.shape[0] != table.shape[1]:
        raise ContractError("kernel table must be square")
    return KernelOperator(table=table)


def dominated_operator(
    space: MetricMeasureSpace,
    table: np.ndarray,
    params: EnvelopeParams,
    a_prime: float | None = None,
) -> KernelOperator:
    """Attach a domination certificate, fitted tight when a_prime is omitted.

    With an explicit a_prime the pointwise inequality is checked on every
    node pair and a violation is a contract error, so a certificate can
    never overstate the localization of its kernel.
    """
    table = np.asarray(table, dtype=float)
    if table.shape != (space.n, space.n):
        raise ContractError("kernel table must cover all node pairs")
    env = envelope_matrix(space, params)
    ratios = np.abs(table) / env
    needed = float(ratios.max())
    if a_prime is None:
        a_prime = needed
    elif needed > a_prime * (1.0 + 1e-12):
        raise ContractError(
            f"domination fails: needs a_prime >= {needed:.6g}, certificate says {a_prime:.6g}"
        )
    return KernelOperator(table=table, domination=DominationCertificate(float(a_prime), params))


def apply_operator(space: MetricMeasureSpace, op: KernelOperator, f: np.ndarray) -> np.ndarray:
    """(H f)(y) = integral of H(x, y) f(x) dsigma(x)."""
    f = np.asarray(f, dtype=float)
    if f.shape != (space.n,):
        raise ContractError("nodal values must align with the space")
    if op.table.shape != (space.n, space.n):
        raise ContractError("operator does not act on this space")
    return (space.weights * f) @ op.table


def _exponent_inverse(p: float) -> float:
    if p < 1.0:
        raise DomainError("exponents must be at least 1")
    return 0.0 if math.isinf(p) else 1.0 / p


def verify_young(
    space: MetricMeasureSpace,
    op: KernelOperator,
    profile: DoublingProfile,
    p: float,
    q: float,
    trials: np.ndarray,
) -> VerificationReport:
    """Check the mapping bound carried by the domination certificate.

    Requires q >= p, a certificate with sigma_exp >= 2k + 1, and a scale
    delta <= 1 (the volume floor only holds below unit radius).  The report
    compares the worst measured ratio ||H f||_q / ||f||_p over the trial
    functions against the closed-form constant.
    """
    if op.domination is None:
        raise PreconditionError("mapping bound needs a domination certificate")
    cert = op.domination
    k = cert.params.k
    delta = cert.params.delta
    if cert.params.sigma_exp < 2 * k + 1:
        raise PreconditionError("mapping bound needs sigma_exp >= 2k + 1")
    if delta > 1.0:
        raise PreconditionError("mapping bound needs delta <= 1")
    inv_p = _exponent_inverse(p)
    inv_q = _exponent_inverse(q)
    if inv_q > inv_p:
        raise DomainError("mapping bound needs q >= p")
    inv_r = 1.0 - inv_p + inv_q
    a_hat = 2.0 ** (-k) * profile.a_noncollapse
    a_const = cert.a_prime * a_hat ** (k * (inv_r - 1.0)) * 2.0 ** (2 * k + 1)
    rhs = a_const * delta ** (k * (inv_q - inv_p))
    trials = np.atleast_2d(np.asarray(trials, dtype=float))
    if trials.shape[1] != space.n:
        raise ContractError("trial functions must align with the space")
    worst = 0.0
    for f in trials:
        denom = lp_norm(space.weights, f, p)
        if denom == 0.0:
            continue
        image = apply_operator(space, op, f)
        worst = max(worst, lp_norm(space.weights, image, q) / denom)
    return make_report(
        "young",
        worst,
        rhs,
        paper_constant=a_const,
        context={
            "p": p,
            "q": q,
            "r": math.inf if inv_r == 0.0 else 1.0 / inv_r,
            "delta": delta,
            "sigma_exp": cert.params.sigma_exp,
            "k": k,
            "a_prime": cert.a_prime,
            "a_hat": a_hat,
            "n_trials": int(trials.shape[0]),
        },
    )


def verify_schur(
    space: MetricMeasureSpace,
    op: KernelOperator,
    p: float,
    q: float,
    r: float,
    trials: np.ndarray,
) -> VerificationReport:
    """Schur test: C = max weighted L^r norm over rows and columns bounds
    ||H f||_q / ||f||_p whenever 1/p - 1/q = 1 - 1/r."""
    inv_p = _exponent_inverse(p)
    inv_q = _exponent_inverse(q)
    inv_r = _exponent_inverse(r)
    if abs((inv_p - inv_q) - (1.0 - inv_r)) > 1e-12:
        raise DomainError("exponents must satisfy 1/p - 1/q = 1 - 1/r")
    if op.table.shape != (space.n, space.n):
        raise ContractError("operator does not act on this space")
    w = space.weights
    absH = np.abs(op.table)
    if math.isinf(r):
        first_slot = absH.max(axis=0)
        second_slot = absH.max(axis=1)
    else:
        first_slot = (w @ absH ** r) ** (1.0 / r)
        second_slot = (absH ** r @ w) ** (1.0 / r)
    C = float(max(first_slot.max(), second_slot.max()))
    trials = np.atleast_2d(np.asarray(trials, dtype=float))
    if trials.shape[1] != space.n:
        raise ContractError("trial functions must align with the space")
    worst = 0.0
    for f in trials:
        denom = lp_norm(w, f, p)
        if denom == 0.0:
            continue
        worst = max(worst, lp_norm(w, apply_operator(space, op, f), q) / denom)
    return make_report(
        "schur",
        worst,
        C,
        paper_constant=C,
        context={"p": p, "q": q, "r": r, "n_trials": int(trials.shape[0])},
    )


def spectral_multiplier(basis: SpectralBasis, symbol: Callable[[np.ndarray], np.ndarray]) -> KernelOperator:
    """Kernel of m(L): sum_i m(beta_i) P_i(x) P_i(y)."""
    values = np.asarray(symbol(basis.eigenvalues), dtype=float)
    if values.shape != basis.eigenvalues.shape:
        raise ContractError("symbol must map the eigenvalue grid elementwise")
    if not np.all(np.isfinite(values)):
        raise DomainError("symbol values must be finite")
    table = basis.values.T @ (values[:, None] * basis.values)
    return KernelOperator(table=0.5 * (table + table.T))


def band_index(beta: float) -> int:
    """Dyadic block of an eigenvalue: 0 for beta <= 1, else the smallest j
    with beta <= 2^(2j)."""
    if beta < 0.0:
        raise DomainError("eigenvalues are nonnegative")
    if beta <= 1.0:
        return 0
    return max(1, math.ceil(math.log2(beta) / 2.0))


@dataclass(frozen=True)
class BandDecomposition:
    """Blockwise spectral pieces of one function sampled on a net."""

    blocks: list[tuple[int, np.ndarray]]
    components: np.ndarray
    block_energies: np.ndarray
    center_indices: np.ndarray
    net_coefficients: np.ndarray
    reconstruction: np.ndarray
    frame_ratio: float
    f_norm_sq: float


def band_decompose(basis: SpectralBasis, net: Net, f: np.ndarray) -> BandDecomposition:
    """Split f into dyadic spectral blocks and sample them on the net.

    Net coefficients are sqrt(sigma(P_center)) * (Q_j f)(center); their
    blockwise energy is compared to ||Q_j f||^2 through the frame ratio
    (worst two-sided energy distortion over blocks carrying energy).
    """
    space = basis.space
    if net.assignment is None:
        raise ContractError("net has no partition; call build_partition first")
    if net.centers.max(initial=0) >= space.n:
        raise ContractError("net centers do not index this space")
    f = np.asarray(f, dtype=float)
    if f.shape != (space.n,):
        raise ContractError("nodal values must align with the space")
    c = coefficients(basis, f)
    block_of = np.array([band_index(b) for b in basis.eigenvalues], dtype=int)
    n_blocks = int(block_of.max()) + 1
    blocks: list[tuple[int, np.ndarray]] = []
    components = np.zeros((n_blocks, space.n))
    for j in range(n_blocks):
        idx = np.nonzero(block_of == j)[0]
        blocks.append((j, idx))
        if idx.size:
            masked = np.zeros_like(c)
            masked[idx] = c[idx]
            components[j] = synthesize(basis, masked)
    energies = (components * components) @ space.weights
    masses = cell_masses(space, net)
    net_coeffs = np.sqrt(masses)[None, :] * components[:, net.centers]
    reconstruction = components.sum(axis=0)
    f_norm_sq = float((f * f) @ space.weights)
    if f_norm_sq <= 0.0:
        raise DomainError("band decomposition needs a nonzero function")
    ratio = 1.0
    for j in range(n_blocks):
        if energies[j] <= 1e-14 * f_norm_sq:
            continue
        net_energy = float((net_coeffs[j] ** 2).sum())
        if net_energy <= 0.0:
            ratio = float("inf")
            continue
        r = net_energy / energies[j]
        ratio = max(ratio, r, 1.0 / r)
    return BandDecomposition(
        blocks=blocks,
        components=components,
        block_energies=np.asarray(energies, dtype=float),
        center_indices=net.centers.copy(),
        net_coefficients=net_coeffs,
        reconstruction=reconstruction,
        frame_ratio=float(ratio),
        f_norm_sq=f_norm_sq,
    )


def verify_band_decomposition(
    basis: SpectralBasis,
    net: Net,
    f: np.ndarray,
    tol: float = 1e-10,
) -> tuple[BandDecomposition, list[VerificationReport]]:
    """Parseval and reconstruction checks plus the frame-ratio fit report."""
    space = basis.space
    decomp = band_decompose(basis, net, f)
    context = {
        "n_blocks": len(decomp.blocks),
        "n_centers": net.size,
        "delta": net.delta,
        "frame_ratio": decomp.frame_ratio,
        "n_nodes": space.n,
        "degree": basis.degree,
    }
    f = np.asarray(f, dtype=float)
    parseval = make_report(
        "band.parseval",
        float(abs(decomp.block_energies.sum() - decomp.f_norm_sq)),
        tol * max(1.0, decomp.f_norm_sq),
        context=context,
    )
    recon = make_report(
        "band.reconstruction",
        float(np.abs(decomp.reconstruction - f).max()),
        tol * max(1.0, float(np.abs(f).max())),
        context=context,
    )
    frame = make_report(
        "frame.ratio",
        0.0 if math.isfinite(decomp.frame_ratio) else 1.0,
        0.0,
        context=context,
    )
    return decomp, [parseval, recon, frame]


def decomposition_to_csv(decomp: BandDecomposition, path: str) -> None:
    """Write net coefficients as rows (j, center_index, coefficient)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["j", "center_index", "coefficient"])
        n_blocks, m = decomp.net_coefficients.shape
        for j in range(n_blocks):
            for idx in range(m):
                writer.writerow(
                    [
                        str(j),
                        str(int(decomp.center_indices[idx])),
                        repr(float(decomp.net_coefficients[j, idx])),
                    ]
                )
