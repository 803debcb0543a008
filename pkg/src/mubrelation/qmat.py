"""Dense complex-matrix kernel: bases, projectors, Hermitian eigensolver, random states.

Matrices are plain ``numpy`` complex arrays. A density matrix is any ``(N, N)``
array that passes :func:`mubrelation._validation.check_density_matrix`; the
record types below wrap the few objects that carry their own invariants.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import (
    CONSTRUCTION_TOL,
    DECOMPOSITION_TOL,
    check_density_matrix,
    check_hermitian,
    check_same_dim,
    check_square,
)
from .exceptions import IndexOutOfRange, InvalidDim, NoConvergence, NotOrthonormal

__all__ = [
    "OrthonormalBasis",
    "Spectrum",
    "computational_basis",
    "hermitian_eig",
    "projector",
    "random_density",
    "random_pure_vector",
    "random_unitary",
    "frobenius_distance",
    "fidelity",
    "purity",
]


@dataclass(frozen=True)
class OrthonormalBasis:
    """``N`` orthonormal vectors; ``vectors[j]`` is the ket ``|j>``.

    The constructor checks ``<i|j> = delta_ij`` to ``tol`` and stores a
    read-only copy of the vectors.
    """

    vectors: np.ndarray
    tol: float = CONSTRUCTION_TOL

    def __post_init__(self):
        v = check_square(self.vectors, "basis vectors")
        gram = v.conj() @ v.T
        dev = np.max(np.abs(gram - np.eye(v.shape[0])))
        if dev > self.tol:
            raise NotOrthonormal(f"basis vectors are not orthonormal (max deviation {dev:.3e})")
        v = np.array(v, copy=True)
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def dim(self):
        return self.vectors.shape[0]

    def __len__(self):
        return self.dim

    def projector(self, j):
        return projector(self, j)

    def projectors(self):
        """All ``N`` projectors as an ``(N, N, N)`` array."""
        return np.einsum("ja,jb->jab", self.vectors, self.vectors.conj())

    def unitary(self):
        """Unitary whose columns are the basis kets."""
        return self.vectors.T.copy()

    def rotated(self, u):
        """Basis ``{U|j>}`` for a unitary ``u``."""
        return OrthonormalBasis((np.asarray(u) @ self.vectors.T).T, tol=self.tol)


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in descending order with the matching eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: OrthonormalBasis

    def reconstruct(self):
        v = self.eigenvectors.vectors
        return np.einsum("j,ja,jb->ab", self.eigenvalues, v, v.conj())

    def subspace_projector(self, indices):
        """Projector onto the span of the selected eigenvectors.

        Use this instead of individual eigenvectors inside a degenerate cluster.
        """
        v = self.eigenvectors.vectors[list(indices)]
        return v.T @ v.conj()


def computational_basis(dim):
    return OrthonormalBasis(np.eye(dim, dtype=complex))


def projector(basis, j):
    """``|j><j|`` for the ``j``-th vector of ``basis``."""
    if not 0 <= j < basis.dim:
        raise IndexOutOfRange(f"index {j} out of range for dimension {basis.dim}")
    v = basis.vectors[j]
    return np.outer(v, v.conj())


def _off_norm(a):
    return np.linalg.norm(a[~np.eye(a.shape[0], dtype=bool)])


def hermitian_eig(m, tol=DECOMPOSITION_TOL, max_sweeps=60):
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Each rotation first removes the phase of the pivot ``a_pq`` and then
    applies a real plane rotation, so the off-diagonal Frobenius mass
    decreases monotonically. Sweeps stop once that mass falls below
    ``8 N eps ||m||_F``, the level at which round-off stalls further progress.

    Parameters
    ----------
    m : array_like
        Hermitian matrix; checked to ``tol`` in Frobenius norm.
    tol : float
        Hermiticity tolerance.
    max_sweeps : int
        Bound on full cyclic sweeps before ``NoConvergence`` is raised.

    Returns
    -------
    Spectrum
        Eigenvalues sorted descending, eigenvectors as an :class:`OrthonormalBasis`.
    """
    a = check_hermitian(m, tol)
    a = 0.5 * (a + a.conj().T)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = np.linalg.norm(a)
    threshold = 8 * n * np.finfo(float).eps * max(scale, np.finfo(float).tiny)

    for _ in range(max_sweeps):
        if _off_norm(a) <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r <= np.finfo(float).eps * scale * 1e-2:
                    continue
                phase = apq / r
                tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                # G = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                g = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ g
    else:
        if _off_norm(a) > threshold:
            raise NoConvergence(f"Jacobi iteration did not converge in {max_sweeps} sweeps")

    w = np.real(np.diag(a))
    order = np.argsort(-w, kind="stable")
    return Spectrum(eigenvalues=w[order], eigenvectors=OrthonormalBasis(v[:, order].T))


def random_pure_vector(dim, seed=None):
    """Haar-random unit vector: normalised vector of i.i.d. standard complex Gaussians."""
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def random_density(dim, kind="mixed", seed=None):
    """Random density matrix.

    ``kind="pure"`` gives a Haar-random projector; ``kind="mixed"`` gives a
    Hilbert-Schmidt draw ``G G^H / tr(G G^H)`` with complex Ginibre ``G``.
    ``seed`` may be an integer or a ``numpy.random.Generator``; equal integer
    seeds give bitwise-identical matrices.
    """
    if int(dim) != dim or dim < 2:
        raise InvalidDim(f"dimension must be an integer >= 2, got {dim}")
    dim = int(dim)
    rng = np.random.default_rng(seed)
    if kind == "pure":
        psi = random_pure_vector(dim, rng)
        rho = np.outer(psi, psi.conj())
    elif kind == "mixed":
        g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        rho = g @ g.conj().T
        rho = rho / np.trace(rho).real
    else:
        raise ValueError(f"kind must be 'pure' or 'mixed', got {kind!r}")
    rho = 0.5 * (rho + rho.conj().T)
    return check_density_matrix(rho)


def random_unitary(dim, angle, seed=None):
    """``exp(-i angle H)`` for a random Hermitian ``H`` with unit operator norm."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = 0.5 * (g + g.conj().T)
    w, u = np.linalg.eigh(h)
    w = w / np.max(np.abs(w))
    return (u * np.exp(-1j * angle * w)) @ u.conj().T


def frobenius_distance(a, b):
    a = check_square(a, "a")
    b = check_square(b, "b")
    check_same_dim(a, b)
    return float(np.linalg.norm(a - b))


def purity(rho):
    rho = np.asarray(rho)
    return float(np.real(np.trace(rho @ rho)))


def fidelity(rho, sigma):
    """Uhlmann fidelity ``(tr sqrt(sqrt(rho) sigma sqrt(rho)))**2``.

    Reduces to ``tr(rho sigma)`` when either argument is pure, which avoids
    square roots of round-off eigenvalues.
    """
    rho = check_square(rho, "rho")
    sigma = check_square(sigma, "sigma")
    check_same_dim(rho, sigma)
    if abs(purity(rho) - 1.0) <= DECOMPOSITION_TOL or abs(purity(sigma) - 1.0) <= DECOMPOSITION_TOL:
        return float(np.real(np.trace(rho @ sigma)))
    sp = hermitian_eig(rho)
    root = sp.eigenvectors.vectors
    sqrt_rho = np.einsum("j,ja,jb->ab", np.sqrt(np.clip(sp.eigenvalues, 0, None)), root, root.conj())
    inner = sqrt_rho @ sigma @ sqrt_rho
    lam = hermitian_eig(0.5 * (inner + inner.conj().T)).eigenvalues
    return float(np.sum(np.sqrt(np.clip(lam, 0, None))) ** 2)
