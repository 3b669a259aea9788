"""Three-term recurrence for orthonormal polynomials of the weight
(1-x)^gamma (1+x)^alpha on [-1, 1].

Everything downstream (quadrature refinement, spectral bases) evaluates
polynomials through these routines so that nodes, weights, and basis tables
are consistent to machine precision.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DomainError


def recurrence_coefficients(gamma: float, alpha: float, n: int) -> tuple[np.ndarray, np.ndarray, float]:
    """Return (a, b, mu0) for the orthonormal recurrence up to degree n.

    The monic recurrence p_{k+1} = (x - a_k) p_k - b_k p_{k-1} is stated in
    the usual normalized form below; mu0 is the total mass of the weight.
    The k = 0 and k = 1 entries use algebraically canceled expressions so
    the formulas stay finite when gamma + alpha + 1 = 0.
    """
    if gamma <= -1.0 or alpha <= -1.0:
        raise DomainError("weight exponents must exceed -1")
    if n < 0:
        raise DomainError("degree must be nonnegative")
    s = gamma + alpha
    a = np.zeros(n + 1)
    b = np.zeros(n + 1)
    a[0] = (alpha - gamma) / (s + 2.0)
    for k in range(1, n + 1):
        a[k] = (alpha * alpha - gamma * gamma) / ((2.0 * k + s) * (2.0 * k + s + 2.0))
        if k == 1:
            b[1] = 4.0 * (1.0 + gamma) * (1.0 + alpha) / ((2.0 + s) ** 2 * (3.0 + s))
        else:
            b[k] = (
                4.0 * k * (k + gamma) * (k + alpha) * (k + s)
                / ((2.0 * k + s) ** 2 * (2.0 * k + s + 1.0) * (2.0 * k + s - 1.0))
            )
    mu0 = 2.0 ** (s + 1.0) * math.gamma(gamma + 1.0) * math.gamma(alpha + 1.0) / math.gamma(s + 2.0)
    return a, b, mu0


def evaluate_orthonormal(
    gamma: float, alpha: float, degree: int, x: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Tabulate the orthonormal polynomials p_0..p_degree and their derivatives.

    Returns (values, derivatives), each of shape (degree + 1, len(x)).  The
    derivative rows follow from differentiating the recurrence, so they are
    exact for the tabulated polynomials rather than a finite difference.
    """
    x = np.asarray(x, dtype=float)
    a, b, mu0 = recurrence_coefficients(gamma, alpha, degree)
    values = np.zeros((degree + 1, x.size))
    derivs = np.zeros((degree + 1, x.size))
    values[0] = 1.0 / math.sqrt(mu0)
    if degree >= 1:
        sb1 = math.sqrt(b[1])
        values[1] = (x - a[0]) * values[0] / sb1
        derivs[1] = values[0] / sb1
    for k in range(1, degree):
        sb_next = math.sqrt(b[k + 1])
        sb_prev = math.sqrt(b[k])
        values[k + 1] = ((x - a[k]) * values[k] - sb_prev * values[k - 1]) / sb_next
        derivs[k + 1] = ((x - a[k]) * derivs[k] + values[k] - sb_prev * derivs[k - 1]) / sb_next
    return values, derivs


def gauss_nodes(gamma: float, alpha: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss nodes and weights for the weight (1-x)^gamma (1+x)^alpha.

    scipy supplies the initial rule; two Newton corrections on the degree-n
    orthonormal polynomial then push the nodes to machine precision, and the
    weights are rebuilt as Christoffel numbers 1 / sum_i p_i(x_j)^2.  The
    refined rule keeps the discrete Gram matrix of p_0..p_{n-1} within a few
    ulp of the identity, which the spectral modules rely on.
    """
    if n < 1:
        raise DomainError("need at least one quadrature node")
    from scipy.special import roots_jacobi

    x, _ = roots_jacobi(n, gamma, alpha)
    for _ in range(2):
        values, derivs = evaluate_orthonormal(gamma, alpha, n, x)
        x = x - values[n] / derivs[n]
    x = np.clip(x, -1.0, 1.0)
    values, _ = evaluate_orthonormal(gamma, alpha, n, x)
    w = 1.0 / np.sum(values[:n] ** 2, axis=0)
    order = np.argsort(x)
    return x[order], w[order]
