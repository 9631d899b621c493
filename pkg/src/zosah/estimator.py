"""Gradient and curvature estimation for 2-d coordinate slices.

The slice gradient is measured with two forward differences sharing the
already-known value at the current point. The 2x2 curvature matrix comes from
a least-squares fit of a quadratic model to nearby function values: with the
current point mapped to the origin and the constant and linear terms pinned
to f(theta) and the measured gradient, each sample contributes one row of
second-order monomials. The fitted matrix is then eigen-decomposed in closed
form and repaired to be positive definite so the resulting Newton direction
always points downhill for the local model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .oracle import CountedOracle
from .subspace import PairProjection

__all__ = [
    "GAMMA_FLOOR",
    "GradientEstimate",
    "FitSystem",
    "InsufficientSamplesError",
    "HessianUnavailableError",
    "estimate_gradient",
    "quad_monomials",
    "build_fit_system",
    "solve_hessian",
    "eig2x2",
    "make_pd",
    "newton_direction",
    "fd_subspace_hessian",
]

# Conditioning floor for the fit's 3x3 Gram matrix; below it the solve
# switches to a ridge fallback.
GAMMA_FLOOR = 1e-10


class InsufficientSamplesError(ValueError):
    """Fewer than 3 samples: the 3-parameter quadratic fit is underdetermined."""


class HessianUnavailableError(RuntimeError):
    """The fit system could not be solved even with the ridge fallback."""


@dataclass(frozen=True)
class GradientEstimate:
    """Forward-difference slice gradient plus the probe evaluations behind it.

    ``probes`` holds the two perturbed subspace points (absolute slice
    coordinates theta + eps*e_i) with their f-values so the driver can bank
    them for curvature fitting in later steps.
    """

    g: np.ndarray
    probes: tuple[tuple[np.ndarray, float], ...]
    epsilon: float


@dataclass(frozen=True)
class FitSystem:
    """Design matrix and targets of the quadratic-model least squares.

    ``min_eig_gram`` is the smallest eigenvalue of phi^T phi; the solver uses
    it to decide between the exact normal-equation solve and the ridge
    fallback.
    """

    phi: np.ndarray  # (s, 3) rows of second-order monomials
    q: np.ndarray  # (s,) residual targets
    min_eig_gram: float


def estimate_gradient(
    oracle: CountedOracle,
    x: np.ndarray,
    p: PairProjection,
    eps: float,
    f_x: float,
) -> GradientEstimate:
    """Two-point forward-difference gradient of the pair's 2-d slice.

    ``f_x`` is the already-paid value at x, so this costs exactly 2 queries.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    theta = p.project(x)
    g = np.empty(2)
    probes = []
    for i, delta in enumerate(((eps, 0.0), (0.0, eps))):
        f_probe = oracle(p.lift(delta, x))
        if not np.isfinite(f_probe):
            raise FloatingPointError(
                f"objective returned non-finite value {f_probe} at a gradient probe"
            )
        g[i] = (f_probe - f_x) / eps
        probes.append((theta + np.asarray(delta), f_probe))
    return GradientEstimate(g, tuple(probes), eps)


def quad_monomials(theta_bar: np.ndarray) -> np.ndarray:
    """Second-order monomial row [t1*t1/2, t1*t2, t2*t2/2] of a slice point."""
    t1 = float(theta_bar[0])
    t2 = float(theta_bar[1])
    return np.array([0.5 * t1 * t1, t1 * t2, 0.5 * t2 * t2])


def build_fit_system(
    samples: list[tuple[np.ndarray, float]],
    g_hat: np.ndarray,
    f_theta: float,
) -> FitSystem:
    """Assemble the least-squares system for the 2x2 curvature fit.

    ``samples`` are (theta_bar, f_value) with theta_bar relative to the
    current slice point (current point at the origin). Each target is the
    function value minus the pinned constant and linear model terms:
    q_i = f_i - g_hat . theta_bar_i - f_theta.
    """
    if len(samples) < 3:
        raise InsufficientSamplesError(
            f"quadratic fit needs at least 3 samples, got {len(samples)}"
        )
    g_hat = np.asarray(g_hat, dtype=float)
    phi = np.empty((len(samples), 3))
    q = np.empty(len(samples))
    for i, (theta_bar, f_value) in enumerate(samples):
        tb = np.asarray(theta_bar, dtype=float)
        phi[i] = quad_monomials(tb)
        q[i] = f_value - g_hat @ tb - f_theta
    gram = phi.T @ phi
    min_eig = float(np.linalg.eigvalsh(gram)[0])
    return FitSystem(phi, q, min_eig)


def solve_hessian(
    sys: FitSystem,
    gamma_floor: float = GAMMA_FLOOR,
    ridge: float | None = None,
) -> np.ndarray:
    """Solve the normal equations and arrange the solution as a symmetric 2x2.

    Solves phi^T phi h = phi^T q exactly when the Gram matrix clears
    ``gamma_floor``; otherwise retries with a small ridge (default
    1e-8 * trace/3). Raises :class:`HessianUnavailableError` if even that
    fails, signalling the caller to fall back to a scaled gradient step.
    """
    gram = sys.phi.T @ sys.phi
    rhs = sys.phi.T @ sys.q
    try:
        if sys.min_eig_gram >= gamma_floor:
            h = np.linalg.solve(gram, rhs)
        else:
            if ridge is None:
                ridge = 1e-8 * float(np.trace(gram)) / 3.0
            h = np.linalg.solve(gram + ridge * np.eye(3), rhs)
    except np.linalg.LinAlgError as exc:
        raise HessianUnavailableError(str(exc)) from None
    if not np.all(np.isfinite(h)):
        raise HessianUnavailableError("non-finite fit solution")
    return np.array([[h[0], h[1]], [h[1], h[2]]])


def eig2x2(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form eigendecomposition of a symmetric 2x2 matrix.

    Returns (lam, V): eigenvalues ordered by descending absolute value
    (ties broken by descending signed value) and the matching orthonormal
    eigenvectors as columns of V.
    """
    a = float(A[0, 0])
    b = float(A[0, 1])
    d = float(A[1, 1])

    if b == 0.0:
        # Already diagonal; eigenvectors are the axes.
        if (abs(a), a) >= (abs(d), d):
            return np.array([a, d]), np.eye(2)
        return np.array([d, a]), np.array([[0.0, 1.0], [1.0, 0.0]])

    half_tr = 0.5 * (a + d)
    disc = float(np.hypot(0.5 * (a - d), b))
    hi = half_tr + disc
    lo = half_tr - disc
    # hi >= lo always; put the larger magnitude first (signed ties keep hi).
    lam1, lam2 = (lo, hi) if abs(lo) > abs(hi) else (hi, lo)

    # Eigenvector for lam1 from (A - lam1 I) v = 0; of the two candidate rows
    # pick the one with the larger norm for stability.
    v_a = np.array([b, lam1 - a])
    v_b = np.array([lam1 - d, b])
    v = v_a if v_a @ v_a >= v_b @ v_b else v_b
    e1 = v / np.linalg.norm(v)
    e2 = np.array([-e1[1], e1[0]])  # perpendicular; the other eigenvector
    return np.array([lam1, lam2]), np.column_stack([e1, e2])


def make_pd(A: np.ndarray, kappa: float = 0.1) -> np.ndarray:
    """Positive-definite repair: eigenvalues become max(|lam_i|, kappa).

    Keeps the eigenvectors, flips negative curvature to its magnitude, and
    floors everything at kappa, so the result is symmetric with both
    eigenvalues >= kappa.
    """
    if kappa <= 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    lam, V = eig2x2(A)
    lam_bar = np.maximum(np.abs(lam), kappa)
    return (V * lam_bar) @ V.T


def newton_direction(A_bar: np.ndarray, g_hat: np.ndarray) -> np.ndarray:
    """Solve A_bar w = g_hat for a positive-definite 2x2 via the adjugate."""
    a = float(A_bar[0, 0])
    b = float(A_bar[0, 1])
    d = float(A_bar[1, 1])
    det = a * d - b * b
    g0 = float(g_hat[0])
    g1 = float(g_hat[1])
    return np.array([(d * g0 - b * g1) / det, (a * g1 - b * g0) / det])


def fd_subspace_hessian(
    oracle: CountedOracle,
    x: np.ndarray,
    p: PairProjection,
    eps: float,
    f_x: float,
    f_probe1: float,
    f_probe2: float,
) -> np.ndarray:
    """Coordinate finite-difference 2x2 curvature (cache-free ablation).

    Reuses the gradient probe values f(theta + eps e1), f(theta + eps e2) and
    pays exactly 3 new queries: f(theta + 2 eps e1), f(theta + 2 eps e2), and
    f(theta + eps e1 + eps e2).
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    f_2e1 = oracle(p.lift((2.0 * eps, 0.0), x))
    f_2e2 = oracle(p.lift((0.0, 2.0 * eps), x))
    f_e1e2 = oracle(p.lift((eps, eps), x))
    for value in (f_2e1, f_2e2, f_e1e2):
        if not np.isfinite(value):
            raise FloatingPointError(
                f"objective returned non-finite value {value} at a curvature probe"
            )
    eps2 = eps * eps
    a11 = (f_2e1 - 2.0 * f_probe1 + f_x) / eps2
    a22 = (f_2e2 - 2.0 * f_probe2 + f_x) / eps2
    a12 = (f_e1e2 - f_probe1 - f_probe2 + f_x) / eps2
    return np.array([[a11, a12], [a12, a22]])
