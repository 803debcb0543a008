"""Mutually unbiased bases: construction for prime dimensions, verification, design tensor."""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ._validation import CONSTRUCTION_TOL, DECOMPOSITION_TOL
from .exceptions import (
    DimMismatch,
    InvalidWeights,
    NotMub,
    NotPrime,
    UnsupportedDim,
    WrongBasisCount,
)
from .qmat import OrthonormalBasis, computational_basis, random_unitary

__all__ = [
    "MixtureWeights",
    "MubSet",
    "MubReport",
    "DesignTensor",
    "generate_mub",
    "qubit_pauli_bases",
    "verify_mub",
    "overlap_coefficients",
    "design_tensor",
    "criterion_target",
    "criterion_holds",
    "perturb_basis_set",
    "as_bases",
]

MAX_PRIME_DIM = 13


@dataclass(frozen=True)
class MixtureWeights:
    """Convex weights ``c^(alpha)`` used to mix the per-basis ensembles."""

    weights: np.ndarray
    tol: float = CONSTRUCTION_TOL

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if w.size == 0 or not np.all(np.isfinite(w)):
            raise InvalidWeights("weights must be a non-empty finite vector")
        if np.any(w < 0):
            raise InvalidWeights(f"weights must be nonnegative, got {w}")
        if abs(w.sum() - 1.0) > self.tol:
            raise InvalidWeights(f"weights sum to {w.sum():.15g}, not 1")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, n):
        return cls(np.full(n, 1.0 / n))

    def __len__(self):
        return self.weights.size

    @property
    def is_unbiased(self):
        return bool(np.all(np.abs(self.weights - 1.0 / self.weights.size) <= self.tol))


@dataclass(frozen=True)
class MubSet:
    """``N + 1`` pairwise unbiased orthonormal bases.

    ``overlaps[alpha, i, j]`` caches ``<j^(0)|i^(alpha)>``, taking ``bases[0]``
    as the reference basis.
    """

    bases: tuple
    tol: float = DECOMPOSITION_TOL
    overlaps: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        bases = tuple(self.bases)
        object.__setattr__(self, "bases", bases)
        dim = _common_dim(bases)
        if len(bases) != dim + 1:
            raise WrongBasisCount(f"a complete MUB set in dimension {dim} has {dim + 1} bases, got {len(bases)}")
        report = verify_mub(bases, self.tol)
        if not report.is_mub:
            raise NotMub(f"bases are not mutually unbiased (max deviation {report.max_deviation:.3e} "
                         f"at pair {report.worst_pair})")
        c = overlap_coefficients(bases)
        c.setflags(write=False)
        object.__setattr__(self, "overlaps", c)

    @property
    def dim(self):
        return self.bases[0].dim

    def __len__(self):
        return len(self.bases)

    def __iter__(self):
        return iter(self.bases)

    def __getitem__(self, alpha):
        return self.bases[alpha]


class MubReport(NamedTuple):
    is_mub: bool
    max_deviation: float
    worst_pair: tuple


def as_bases(bases):
    """Normalise a ``MubSet`` or a sequence of bases / unitary arrays to a tuple of bases."""
    if isinstance(bases, MubSet):
        return bases.bases
    out = []
    for b in bases:
        out.append(b if isinstance(b, OrthonormalBasis) else OrthonormalBasis(np.asarray(b)))
    return tuple(out)


def _common_dim(bases):
    if len(bases) == 0:
        raise WrongBasisCount("at least one basis is required")
    dims = {b.dim for b in bases}
    if len(dims) != 1:
        raise DimMismatch(f"bases have differing dimensions {sorted(dims)}")
    return dims.pop()


def _is_prime(n):
    if n < 2:
        return False
    return all(n % k for k in range(2, int(n ** 0.5) + 1))


def qubit_pauli_bases():
    """Eigenbases of ``S_z``, ``S_x`` and ``S_y`` (``+`` eigenvector first)."""
    s = 1.0 / np.sqrt(2.0)
    z = np.eye(2, dtype=complex)
    x = np.array([[s, s], [s, -s]], dtype=complex)
    y = np.array([[s, 1j * s], [s, -1j * s]], dtype=complex)
    return tuple(OrthonormalBasis(b) for b in (z, x, y))


def generate_mub(dim):
    """Complete set of ``dim + 1`` MUBs for a prime ``dim`` up to 13.

    Basis 0 is computational. For odd primes, basis ``a + 1`` (``0 <= a < dim``)
    has vectors ``|j> = sum_k exp(2 pi i (a k^2 + j k) / dim) |k> / sqrt(dim)``;
    ``a = 0`` is the Fourier basis. The quadratic construction degenerates for
    ``dim = 2``, where the Pauli eigenbases are used instead.
    """
    if int(dim) != dim:
        raise NotPrime(f"dimension must be an integer, got {dim}")
    dim = int(dim)
    if not _is_prime(dim):
        raise UnsupportedDim(f"dimension {dim} is not prime; only prime dimensions are supported")
    if dim > MAX_PRIME_DIM:
        raise UnsupportedDim(f"dimension {dim} exceeds the supported maximum {MAX_PRIME_DIM}")
    if dim == 2:
        return MubSet(qubit_pauli_bases())

    k = np.arange(dim)
    bases = [computational_basis(dim)]
    for a in range(dim):
        # Reduce the exponent mod dim before exponentiating to keep phases exact.
        expo = (a * k[np.newaxis, :] ** 2 + np.outer(k, k)) % dim
        vecs = np.exp(2j * np.pi * expo / dim) / np.sqrt(dim)
        bases.append(OrthonormalBasis(vecs))
    return MubSet(tuple(bases))


def verify_mub(bases, tol=DECOMPOSITION_TOL):
    """Check orthonormality of each basis and ``|<v|w>|^2 = 1/N`` across bases.

    ``max_deviation`` is the largest violation seen: either an entry of
    ``<i|j> - delta_ij`` within a basis, or of ``|<v|w>|^2 - 1/N`` across a pair.
    ``worst_pair`` is ``(alpha, beta)``, with ``alpha == beta`` when the worst
    offence is within a single basis.
    """
    bases = as_bases(bases)
    dim = _common_dim(bases)
    if len(bases) < 2:
        raise WrongBasisCount("verify_mub needs at least two bases")
    worst, pair = 0.0, (0, 0)
    vecs = [b.vectors for b in bases]
    for a, va in enumerate(vecs):
        dev = float(np.max(np.abs(va.conj() @ va.T - np.eye(dim))))
        if dev > worst:
            worst, pair = dev, (a, a)
    for a in range(len(vecs)):
        for b in range(a + 1, len(vecs)):
            ov = np.abs(vecs[a].conj() @ vecs[b].T) ** 2
            dev = float(np.max(np.abs(ov - 1.0 / dim)))
            if dev > worst:
                worst, pair = dev, (a, b)
    return MubReport(is_mub=worst <= tol, max_deviation=worst, worst_pair=pair)


def overlap_coefficients(bases):
    """``C[alpha, i, j] = <j^(0)|i^(alpha)>`` with ``bases[0]`` as reference."""
    bases = as_bases(bases)
    ref = bases[0].vectors
    return np.stack([b.vectors @ ref.conj().T for b in bases])


def criterion_target(dim, lam):
    """``(lam / N) delta_kl delta_pq + (1 - lam) delta_kp delta_lq`` as an ``(N,)*4`` array."""
    eye = np.eye(dim)
    return (lam / dim) * np.einsum("kl,pq->klpq", eye, eye) + (1.0 - lam) * np.einsum("kp,lq->klpq", eye, eye)


@dataclass(frozen=True)
class DesignTensor:
    """Coefficients ``d[k, l, p, q]`` of the linear map ``rho_ini -> rho_msmt``.

    ``(rho_msmt)_kl = sum_pq d[k, l, p, q] (rho_ini)_pq`` in the reference basis.
    """

    entries: np.ndarray
    fitted_lambda: float
    residual: float

    @property
    def dim(self):
        return self.entries.shape[0]

    def target(self):
        return criterion_target(self.dim, self.fitted_lambda)

    def max_entry_error(self, lam=None):
        lam = self.fitted_lambda if lam is None else lam
        return float(np.max(np.abs(self.entries - criterion_target(self.dim, lam))))

    def apply(self, rho):
        return np.einsum("klpq,pq->kl", self.entries, rho)


def design_tensor(bases, weights):
    """Build the design tensor of a basis set and mixture, and fit ``lambda``.

    ``d[k,l,p,q] = sum_{i,alpha} c_alpha C_ik conj(C_il) conj(C_ip) C_iq`` with
    ``C = overlap_coefficients(bases)``. With the conjugation placed this way,
    applying ``d`` to ``rho_ini`` gives exactly the mixed post-measurement state.
    ``lambda`` is the least-squares point on the trace-preserving line
    ``target(lambda)``, which has a closed form.
    """
    bases = as_bases(bases)
    dim = _common_dim(bases)
    if len(bases) != dim + 1:
        raise WrongBasisCount(f"design tensor needs {dim + 1} bases in dimension {dim}, got {len(bases)}")
    if not isinstance(weights, MixtureWeights):
        weights = MixtureWeights(weights)
    if len(weights) != len(bases):
        raise WrongBasisCount(f"{len(weights)} weights for {len(bases)} bases")

    c = overlap_coefficients(bases)
    # Fixed summation order over alpha keeps the result bit-stable.
    d = np.zeros((dim,) * 4, dtype=complex)
    for alpha in range(len(bases)):
        ca = c[alpha]
        d += weights.weights[alpha] * np.einsum("ik,il,ip,iq->klpq", ca, ca.conj(), ca.conj(), ca)
    # Exact symmetrisation: float addition commutes, so d[k,l,p,q] == conj(d[l,k,q,p]) bitwise.
    d = 0.5 * (d + np.conj(d.transpose(1, 0, 3, 2)))

    eye = np.eye(dim)
    dd = np.einsum("kl,pq->klpq", eye, eye)
    dx = np.einsum("kp,lq->klpq", eye, eye)
    direction = dd / dim - dx
    lam = float(np.real(np.vdot(direction, d - dx)) / np.real(np.vdot(direction, direction)))
    residual = float(np.linalg.norm(d - criterion_target(dim, lam)))
    return DesignTensor(entries=d, fitted_lambda=lam, residual=residual)


def criterion_holds(tensor, tol=1e-9):
    return bool(tensor.residual <= tol)


def perturb_basis_set(bases, angle, seed=None, index=-1):
    """Rotate one basis of a set by a random unitary ``exp(-i angle H)``, ``||H||_op = 1``."""
    bases = list(as_bases(bases))
    u = random_unitary(bases[0].dim, angle, seed)
    bases[index] = bases[index].rotated(u)
    return tuple(bases)
