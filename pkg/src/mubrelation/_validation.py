"""Input validation helpers shared by the functional API and the estimators."""

import numpy as np

from .exceptions import DimMismatch, InvalidState, NotHermitian

# Construction checks (orthonormality, projector algebra, traces).
CONSTRUCTION_TOL = 1e-12
# Decomposition and relation checks.
DECOMPOSITION_TOL = 1e-10


def check_square(m, name="matrix"):
    """Return ``m`` as a complex 2-D square array, raising ``DimMismatch`` otherwise."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise DimMismatch(f"{name} must be a non-empty square matrix, got shape {a.shape}")
    return a


def check_same_dim(a, b):
    if a.shape != b.shape:
        raise DimMismatch(f"dimension mismatch: {a.shape} vs {b.shape}")


def check_hermitian(m, tol=DECOMPOSITION_TOL, name="matrix"):
    a = check_square(m, name)
    dev = np.linalg.norm(a - a.conj().T)
    if not dev <= tol:
        raise NotHermitian(f"{name} is not Hermitian: ||M - M^H||_F = {dev:.3e} > {tol:.1e}")
    return a


def check_density_matrix(rho, *, herm_tol=CONSTRUCTION_TOL, trace_tol=CONSTRUCTION_TOL,
                         psd_tol=DECOMPOSITION_TOL, name="rho"):
    """Validate a density matrix and return it as a read-only complex array.

    Raises
    ------
    DimMismatch
        If ``rho`` is not square.
    InvalidState
        If ``rho`` is not Hermitian, not unit-trace or not positive semidefinite.
    """
    a = check_square(rho, name)
    if not np.all(np.isfinite(a)):
        raise InvalidState(f"{name} has non-finite entries")
    dev = np.linalg.norm(a - a.conj().T)
    if dev > herm_tol:
        raise InvalidState(f"{name} is not Hermitian (deviation {dev:.3e})")
    tr = np.trace(a)
    if abs(tr - 1.0) > trace_tol:
        raise InvalidState(f"{name} does not have unit trace (trace {tr:.15g})")
    # Symmetrise before the eigenvalue test so tiny anti-Hermitian noise is ignored.
    lo = np.linalg.eigvalsh(0.5 * (a + a.conj().T))[0]
    if lo < -psd_tol:
        raise InvalidState(f"{name} is not positive semidefinite (min eigenvalue {lo:.3e})")
    out = np.array(a, copy=True)
    out.setflags(write=False)
    return out


def check_density_stack(X, **kwargs):
    """Validate a single density matrix or a stack of them; always returns shape (n, N, N)."""
    a = np.asarray(X, dtype=complex)
    if a.ndim == 2:
        a = a[np.newaxis]
    if a.ndim != 3 or a.shape[1] != a.shape[2] or a.shape[0] == 0:
        raise DimMismatch(f"expected an (n, N, N) stack of density matrices, got shape {a.shape}")
    return np.stack([check_density_matrix(r, **kwargs) for r in a])


def check_probabilities(p, dim, tol=CONSTRUCTION_TOL, name="probs"):
    """Clamp round-off negatives and renormalise a probability vector of length ``dim``."""
    v = np.asarray(p, dtype=float).reshape(-1)
    if v.shape[0] != dim:
        raise DimMismatch(f"{name} has {v.shape[0]} entries, expected {dim}")
    if not np.all(np.isfinite(v)) or np.any(v < -tol):
        raise InvalidState(f"{name} has negative or non-finite entries: {v}")
    total = v.sum()
    if abs(total - 1.0) > tol:
        raise InvalidState(f"{name} sums to {total:.15g}, not 1")
    v = np.clip(v, 0.0, 1.0)
    return v / v.sum()
