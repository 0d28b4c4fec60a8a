"""Small dense complex-matrix helpers.

Matrices are plain ``numpy`` complex128 arrays. The helpers add shape
checking and the two decompositions the phase-space code needs: rank-one
projector splitting and (for estimators) Hermitian spectral clipping.
"""

from __future__ import annotations

import numpy as np

from .errors import NotRankOneProjector, ShapeMismatch, UsageError

EQ_TOL = 1e-10
PROJ_TOL = 1e-8


def as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise ShapeMismatch(f"expected a matrix, got shape {a.shape}")
    return a


def _square(a) -> np.ndarray:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got shape {a.shape}")
    return a


def mul(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeMismatch(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def add(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise ShapeMismatch(f"cannot add {a.shape} and {b.shape}")
    return a + b


def scale(c: complex, a) -> np.ndarray:
    return complex(c) * as_matrix(a)


def dagger(a) -> np.ndarray:
    return as_matrix(a).conj().T


def trace(a) -> complex:
    return complex(np.trace(_square(a)))


def tensor(*factors) -> np.ndarray:
    """Kronecker product; the first factor is the most significant subsystem."""
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        out = np.kron(out, as_matrix(f))
    return out


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product tr(a^dagger b)."""
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise ShapeMismatch(f"cannot pair {a.shape} with {b.shape}")
    return complex(np.vdot(a, b))


def frob_dist(a, b) -> float:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise ShapeMismatch(f"cannot compare {a.shape} with {b.shape}")
    return float(np.linalg.norm(a - b))


_OPS = {
    "mul": mul,
    "add": add,
    "scale": scale,
    "dagger": dagger,
    "trace": trace,
    "tensor": tensor,
    "hs_inner": hs_inner,
    "frob_dist": frob_dist,
}


def mat_algebra(op: str, *args):
    """Dispatch by name, for callers that select the operation dynamically."""
    try:
        fn = _OPS[op]
    except KeyError:
        raise UsageError(f"unknown matrix operation {op!r}") from None
    return fn(*args)


def projector_residual(P) -> float:
    """Worst of Hermiticity, idempotence and unit-trace defects of ``P``."""
    P = _square(P)
    return max(
        float(np.abs(P - P.conj().T).max()),
        float(np.abs(P @ P - P).max()),
        abs(np.trace(P) - 1),
    )


def extract_pure_state(P, tol: float = PROJ_TOL) -> np.ndarray:
    """Return the unit vector ``v`` with ``P = v v^dagger``.

    The largest-norm column is normalised, then rotated so its first entry
    of modulus above ``tol`` is real and positive, which makes the output
    deterministic.
    """
    P = _square(P)
    residual = projector_residual(P)
    if residual > tol:
        raise NotRankOneProjector(f"not a rank-one projector (residual {residual:.3g})", residual)
    col = P[:, int(np.argmax(np.linalg.norm(P, axis=0)))]
    v = col / np.linalg.norm(col)
    lead = v[np.flatnonzero(np.abs(v) > tol)[0]]
    v = v * (abs(lead) / lead)
    residual = float(np.abs(np.outer(v, v.conj()) - P).max())
    if residual > tol:
        raise NotRankOneProjector(f"rank exceeds one (residual {residual:.3g})", residual)
    return v


def is_density(rho, tol: float = EQ_TOL) -> bool:
    rho = _square(rho)
    if np.abs(rho - rho.conj().T).max() > tol or abs(np.trace(rho) - 1) > tol:
        return False
    return bool(np.linalg.eigvalsh((rho + rho.conj().T) / 2).min() >= -tol)


def check_density(rho, tol: float = EQ_TOL) -> np.ndarray:
    rho = _square(rho)
    if not is_density(rho, tol):
        raise UsageError("input is not a density matrix (Hermitian, unit trace, PSD)")
    return rho


def psd_projection(a) -> np.ndarray:
    """Closest unit-trace PSD matrix by clipping and renormalising the spectrum.

    Eigenvalues are projected onto the probability simplex, the standard
    fix-up for linear-inversion estimates.
    """
    a = _square(a)
    h = (a + a.conj().T) / 2
    vals, vecs = np.linalg.eigh(h)
    # Euclidean projection of the spectrum onto {x >= 0, sum x = 1}
    u = np.sort(vals)[::-1]
    css = np.cumsum(u) - 1
    k = np.nonzero(u - css / np.arange(1, len(u) + 1) > 0)[0][-1]
    theta = css[k] / (k + 1)
    clipped = np.clip(vals - theta, 0, None)
    return (vecs * clipped) @ vecs.conj().T


def sqrt_psd(a) -> np.ndarray:
    h = _square(a)
    vals, vecs = np.linalg.eigh((h + h.conj().T) / 2)
    return (vecs * np.sqrt(np.clip(vals, 0, None))) @ vecs.conj().T


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))**2."""
    s = sqrt_psd(rho)
    inner = s @ _square(sigma) @ s
    vals = np.linalg.eigvalsh((inner + inner.conj().T) / 2)
    return float(np.sum(np.sqrt(np.clip(vals, 0, None))) ** 2)


def trace_distance(rho, sigma) -> float:
    diff = _square(rho) - _square(sigma)
    return 0.5 * float(np.abs(np.linalg.eigvalsh((diff + diff.conj().T) / 2)).sum())


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random density matrix from the Ginibre ensemble."""
    g = rng.normal(size=(d, rank or d)) + 1j * rng.normal(size=(d, rank or d))
    rho = g @ g.conj().T
    return rho / np.trace(rho)
