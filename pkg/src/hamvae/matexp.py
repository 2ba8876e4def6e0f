"""Matrix exponential by scaling and squaring of a fixed-degree Taylor polynomial.

The directional (Frechet) derivative is obtained by differentiating the exact
same Horner + squaring recurrence, so gradients are always consistent with the
forward value.  All arithmetic runs in float64 regardless of the input dtype;
callers cast back if they need single precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ExpConfig:
    """Taylor degree, the 1-norm threshold below which no scaling happens, and
    a hard cap on squaring steps."""

    degree: int = 18
    theta: float = 1.0
    max_squarings: int = 32

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError(f"degree must be >= 1, got {self.degree}")
        if self.theta <= 0:
            raise ValueError(f"theta must be positive, got {self.theta}")


DEFAULT_CONFIG = ExpConfig()


def _as_square(A) -> np.ndarray:
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def one_norm(A) -> float:
    """Induced 1-norm (maximum absolute column sum)."""
    A = np.asarray(A)
    if A.size == 0:
        return 0.0
    return float(np.abs(A).sum(axis=0).max())


def scaling_steps(A, cfg: ExpConfig = DEFAULT_CONFIG) -> int:
    """Number of halvings s with norm(A) / 2**s <= theta."""
    nrm = one_norm(A)
    if nrm <= cfg.theta or nrm == 0.0:
        return 0
    s = int(math.ceil(math.log2(nrm / cfg.theta)))
    if s > cfg.max_squarings:
        raise OverflowError(
            f"matrix 1-norm {nrm:g} needs {s} squarings, cap is {cfg.max_squarings}"
        )
    return max(s, 0)


def _taylor_horner(B: np.ndarray, degree: int) -> np.ndarray:
    I = np.eye(B.shape[0], dtype=B.dtype)
    P = I / math.factorial(degree)
    for n in range(degree - 1, -1, -1):
        P = B @ P + I / math.factorial(n)
    return P


def _taylor_horner_frechet(B: np.ndarray, E: np.ndarray, degree: int):
    # Product rule applied to each Horner step: P <- B P + c I turns into
    # L <- E P + B L evaluated before P is overwritten.
    I = np.eye(B.shape[0], dtype=B.dtype)
    P = I / math.factorial(degree)
    L = np.zeros_like(P)
    for n in range(degree - 1, -1, -1):
        L = E @ P + B @ L
        P = B @ P + I / math.factorial(n)
    return P, L


def expm_core(A: np.ndarray, s: int, degree: int) -> np.ndarray:
    """exp(A) with an explicit number of scaling/squaring steps."""
    P = _taylor_horner(A / 2.0**s, degree)
    for _ in range(s):
        P = P @ P
    return P


def frechet_core(A: np.ndarray, E: np.ndarray, s: int, degree: int):
    """(exp(A), L(A, E)) with an explicit number of scaling/squaring steps.

    The derivative recurrence mirrors expm_core exactly: the map E -> L is a
    sum of words A^a E A^b, so its adjoint under the Frobenius inner product
    is this same routine evaluated at A.T with identical s and degree.
    """
    P, L = _taylor_horner_frechet(A / 2.0**s, E / 2.0**s, degree)
    for _ in range(s):
        L = L @ P + P @ L
        P = P @ P
    return P, L


def expm(A, cfg: ExpConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Matrix exponential of a square real matrix."""
    A = _as_square(A)
    return expm_core(A, scaling_steps(A, cfg), cfg.degree)


def expm_frechet(A, E, cfg: ExpConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Directional derivative L(A, E) = d/deps exp(A + eps E) at eps = 0."""
    A = _as_square(A)
    E = _as_square(E)
    if A.shape != E.shape:
        raise ValueError(f"direction shape {E.shape} does not match {A.shape}")
    return frechet_core(A, E, scaling_steps(A, cfg), cfg.degree)[1]
