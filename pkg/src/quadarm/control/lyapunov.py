import numpy as np
import scipy.linalg

from ..errors import NotHurwitz


def is_hurwitz(a) -> bool:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    return bool(np.all(np.linalg.eigvals(a).real < 0.0))


def lyapunov_residual(a_m, p, q) -> float:
    a_m = np.atleast_2d(np.asarray(a_m, dtype=float))
    p = np.atleast_2d(p)
    q = np.atleast_2d(q)
    return float(np.max(np.abs(a_m.T @ p + p @ a_m + q)))


def solve_lyapunov(a_m, q) -> np.ndarray:
    """Symmetric positive-definite ``P`` with ``A_m^T P + P A_m + Q = 0``."""
    a_m = np.atleast_2d(np.asarray(a_m, dtype=float))
    q = np.atleast_2d(np.asarray(q, dtype=float))
    if a_m.shape[0] != a_m.shape[1] or q.shape != a_m.shape:
        raise ValueError(f"shape mismatch: A_m {a_m.shape}, Q {q.shape}")
    if not is_hurwitz(a_m):
        raise NotHurwitz("reference model matrix has an eigenvalue with Re >= 0")
    if not np.allclose(q, q.T) or np.min(np.linalg.eigvalsh(0.5 * (q + q.T))) <= 0.0:
        raise ValueError("Q must be symmetric positive definite")
    # scipy solves A X + X A^H = Q
    p = scipy.linalg.solve_continuous_lyapunov(a_m.T, -q)
    return 0.5 * (p + p.T)
