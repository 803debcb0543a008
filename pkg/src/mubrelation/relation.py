"""The relation ``rho_msmt = (I + rho_ini) / (N + 1)``: prediction, inversion, checks, counterexample."""

import warnings
from dataclasses import dataclass, field

import numpy as np

from ._validation import CONSTRUCTION_TOL, DECOMPOSITION_TOL, check_density_matrix, check_density_stack
from .exceptions import (
    CoplanarDirections,
    DegenerateLeadingEigenvalue,
    DegenerateTrialSet,
    DimMismatch,
    InvalidWeights,
    NotInRelationImage,
    NotPositiveWarning,
    SpectrumMismatch,
)
from .measure import OutcomeDistribution, post_measurement_state
from .mub import MixtureWeights, as_bases
from .qmat import hermitian_eig, random_density

__all__ = [
    "RelationParams",
    "RelationReport",
    "DirectionTriple",
    "AffineFitReport",
    "PAULI",
    "predict_post",
    "recover_initial_affine",
    "recover_pure_by_leading_eigenvector",
    "tomographic_reconstruct",
    "trial_states",
    "fit_lambda",
    "fit_affine",
    "verify_relation",
    "spin_component",
    "bloch_vector",
    "nonorthogonal_post_state",
    "expectation_identity_residual",
    "affine_fit_counterexample",
]

PAULI = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)


@dataclass(frozen=True)
class RelationParams:
    """Mixing parameter of ``rho_msmt = (lam / N) I + (1 - lam) rho_ini``."""

    dim: int
    lam: float = None

    def __post_init__(self):
        if self.lam is None:
            object.__setattr__(self, "lam", self.dim / (self.dim + 1.0))
        if not 0.0 < self.lam < 1.0:
            raise ValueError(f"lambda must lie in (0, 1), got {self.lam}")

    def apply(self, rho):
        return (self.lam / self.dim) * np.eye(self.dim) + (1.0 - self.lam) * np.asarray(rho)


def predict_post(rho_ini):
    rho = check_density_matrix(rho_ini)
    n = rho.shape[0]
    return (np.eye(n) + rho) / (n + 1)


def recover_initial_affine(rho_msmt, strict=True, tol=DECOMPOSITION_TOL):
    """Invert the relation: ``(N + 1) rho_msmt - I``.

    With ``strict=True`` a result with an eigenvalue below ``-tol`` raises
    ``NotInRelationImage``. With ``strict=False`` it is returned unclamped and a
    ``NotPositiveWarning`` is issued, which suits noisy estimates that are
    post-processed by the caller.
    """
    rho = check_density_matrix(rho_msmt)
    n = rho.shape[0]
    out = (n + 1) * rho - np.eye(n)
    lo = np.linalg.eigvalsh(out)[0]
    if lo < -tol:
        msg = f"(N+1) rho - I has eigenvalue {lo:.6g}; input is not a post-measurement state of this scheme"
        if strict:
            raise NotInRelationImage(msg)
        warnings.warn(msg, NotPositiveWarning, stacklevel=2)
    return out


def recover_pure_by_leading_eigenvector(rho_msmt, tol=1e-8):
    """Return ``|l><l|`` for the leading eigenvector of a post-measurement state.

    The spectrum must be ``2/(N+1)`` once and ``1/(N+1)`` with multiplicity
    ``N - 1`` (to ``tol``); that is exactly the image of a pure input state.
    """
    rho = check_density_matrix(rho_msmt)
    n = rho.shape[0]
    sp = hermitian_eig(rho)
    w = sp.eigenvalues
    if w[0] - w[1] <= tol:
        raise DegenerateLeadingEigenvalue(
            f"leading eigenvalue {w[0]:.6g} is degenerate with {w[1]:.6g}; input did not come from a pure state")
    expected = np.full(n, 1.0 / (n + 1))
    expected[0] = 2.0 / (n + 1)
    dev = np.max(np.abs(w - expected))
    if dev > tol:
        raise SpectrumMismatch(f"spectrum {np.round(w, 6)} deviates from the pure-state image by {dev:.3e}")
    v = sp.eigenvectors.vectors[0]
    return np.outer(v, v.conj())


def tomographic_reconstruct(distributions, bases, tol=DECOMPOSITION_TOL):
    """Linear-inversion estimate ``sum_{i,alpha} p_i^(alpha) P_i^(alpha) - I``.

    Exact for a complete MUB set. ``distributions`` may hold
    :class:`OutcomeDistribution` objects or plain probability vectors, one
    per basis. A non-positive result (typical for shot-noise frequencies) is
    returned unclamped with a ``NotPositiveWarning``.
    """
    bases = as_bases(bases)
    dists = list(distributions)
    if len(dists) != len(bases):
        raise DimMismatch(f"{len(dists)} distributions for {len(bases)} bases")
    n = bases[0].dim
    out = -np.eye(n, dtype=complex)
    for d, b in zip(dists, bases):
        p = np.asarray(d.probs if isinstance(d, OutcomeDistribution) else d, dtype=float)
        if p.shape != (n,):
            raise DimMismatch(f"distribution of shape {p.shape} for a basis of dimension {n}")
        out += np.einsum("j,ja,jb->ab", p, b.vectors, b.vectors.conj())
    lo = np.linalg.eigvalsh(0.5 * (out + out.conj().T))[0]
    if lo < -tol:
        warnings.warn(f"reconstructed state has eigenvalue {lo:.6g}", NotPositiveWarning, stacklevel=2)
    return out


def trial_states(dim, n, seed=None, include_basis_states=True):
    """Trial set for universality scans.

    Computational basis states first (when ``n >= 2 * dim``), then alternating
    Haar-random pure and Hilbert-Schmidt mixed draws.
    """
    rng = np.random.default_rng(seed)
    states = []
    if include_basis_states and n >= 2 * dim:
        for k in range(dim):
            e = np.zeros((dim, dim), dtype=complex)
            e[k, k] = 1.0
            states.append(e)
    kinds = ("pure", "mixed")
    while len(states) < n:
        states.append(random_density(dim, kinds[len(states) % 2], rng))
    return np.stack(states)


def _spans_operator_space(states):
    n = states.shape[1]
    return np.linalg.matrix_rank(states.reshape(len(states), -1), tol=1e-8) == n * n


def fit_lambda(pre, post):
    """Least-squares ``lambda`` for ``post ~ (lambda / N) I + (1 - lambda) pre`` over a stack.

    Returns ``(lambda, residuals)``; ``lambda`` is ``nan`` when every ``pre``
    equals ``I / N``, so the fit carries no information.
    """
    pre = np.asarray(pre)
    post = np.asarray(post)
    n = pre.shape[-1]
    a = np.eye(n) / n - pre
    b = post - pre
    denom = float(np.sum(np.abs(a) ** 2))
    if denom <= 1e-24:
        lam = float("nan")
        resid = np.linalg.norm(b, axis=(1, 2))
    else:
        lam = float(np.real(np.vdot(a, b)) / denom)
        resid = np.linalg.norm(b - lam * a, axis=(1, 2))
    return lam, resid


def fit_affine(pre, post):
    """Least-squares ``(alpha, beta)`` for ``post ~ alpha pre + beta I`` over a stack.

    Returns ``(alpha, beta, residuals)`` with per-state Frobenius residuals.
    """
    pre = np.asarray(pre, dtype=complex)
    post = np.asarray(post, dtype=complex)
    n = pre.shape[-1]
    eye = np.broadcast_to(np.eye(n), pre.shape)
    design = np.stack([pre.ravel(), eye.ravel()], axis=1)
    design = np.concatenate([design.real, design.imag])
    target = np.concatenate([post.ravel().real, post.ravel().imag])
    coef, _, rank, _ = np.linalg.lstsq(design, target, rcond=None)
    if rank < 2:
        raise DegenerateTrialSet("trial states are all proportional to the identity")
    alpha, beta = float(coef[0]), float(coef[1])
    resid = np.linalg.norm(post - alpha * pre - beta * np.eye(n), axis=(1, 2))
    return alpha, beta, resid


@dataclass
class RelationReport:
    """Outcome of a relation scan; ``holds`` requires a residual at or below ``tol``.

    ``universality_tested`` is true only when the trial states span the full
    operator space, so a vanishing residual certifies the linear map itself.
    """

    dim: int
    lambda_fit: float
    residual: float
    holds: bool
    worst_state: np.ndarray
    worst_index: int
    trials: int
    universality_tested: bool
    weights_unbiased: bool
    residuals: np.ndarray = field(repr=False)


def verify_relation(rho_ini, bases, weights=None, tol=DECOMPOSITION_TOL, lambda_tol=1e-9):
    """Fit ``rho_msmt = (lam / N) I + (1 - lam) rho_ini`` jointly over trial states.

    ``rho_ini`` is one density matrix or a stack of them; ``rho_msmt`` is
    computed for each by measuring in every basis and mixing with
    ``weights`` (uniform by default). One ``lam`` is shared by all states,
    since the relation is claimed to be universal. ``residual`` is the worst
    per-state Frobenius error at the fitted ``lam``. When the weights are
    unbiased, ``holds`` additionally needs ``|lam - N/(N+1)| <= lambda_tol``.
    """
    pre = check_density_stack(rho_ini)
    bases = as_bases(bases)
    n = pre.shape[1]
    if bases[0].dim != n:
        raise DimMismatch(f"states have dimension {n}, bases have {bases[0].dim}")
    if weights is None:
        weights = MixtureWeights.uniform(len(bases))
    elif not isinstance(weights, MixtureWeights):
        weights = MixtureWeights(weights)

    post = np.stack([post_measurement_state(r, bases, weights) for r in pre])
    lam, resid = fit_lambda(pre, post)
    worst = int(np.argmax(resid))
    residual = float(resid[worst])
    holds = residual <= tol
    if holds and weights.is_unbiased and np.isfinite(lam):
        holds = abs(lam - n / (n + 1.0)) <= lambda_tol
    return RelationReport(
        dim=n,
        lambda_fit=lam,
        residual=residual,
        holds=bool(holds),
        worst_state=pre[worst],
        worst_index=worst,
        trials=len(pre),
        universality_tested=bool(_spans_operator_space(pre)),
        weights_unbiased=weights.is_unbiased,
        residuals=resid,
    )


# Qubit geometry for measurements along arbitrary spin directions.

def spin_component(n):
    """``S . n = (n_x sigma_x + n_y sigma_y + n_z sigma_z) / 2``."""
    return 0.5 * np.einsum("i,iab->ab", np.asarray(n, dtype=float), PAULI)


def bloch_vector(rho):
    """``<S>`` for a qubit state, i.e. half the usual Bloch vector."""
    rho = np.asarray(rho)
    return 0.5 * np.real(np.einsum("iab,ba->i", PAULI, rho))


@dataclass(frozen=True)
class DirectionTriple:
    """Three non-coplanar unit vectors with their Gram matrix and its inverse."""

    directions: np.ndarray
    tol: float = CONSTRUCTION_TOL
    gram: np.ndarray = field(init=False, repr=False)
    gram_inverse: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        d = np.asarray(self.directions, dtype=float)
        if d.shape != (3, 3):
            raise DimMismatch(f"expected three 3-vectors, got shape {d.shape}")
        norms = np.linalg.norm(d, axis=1)
        if np.any(np.abs(norms - 1.0) > self.tol):
            raise ValueError(f"directions must be unit vectors, got norms {norms}")
        if abs(np.dot(d[0], np.cross(d[1], d[2]))) <= 1e-6:
            raise CoplanarDirections("directions are coplanar (triple product vanishes)")
        gram = d @ d.T
        inv = np.linalg.inv(gram)
        if np.max(np.abs(gram @ inv - np.eye(3))) > DECOMPOSITION_TOL:
            raise CoplanarDirections("Gram matrix is too ill-conditioned to invert")
        for name, arr in (("directions", d), ("gram", gram), ("gram_inverse", inv)):
            arr = np.array(arr, copy=True)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_vectors(cls, vectors):
        """Normalise three nonzero vectors, then validate."""
        v = np.asarray(vectors, dtype=float).reshape(3, 3)
        norms = np.linalg.norm(v, axis=1)
        if np.any(norms == 0):
            raise CoplanarDirections("zero-length direction")
        return cls(v / norms[:, np.newaxis])

    @classmethod
    def orthonormal(cls):
        return cls(np.eye(3))

    def components(self, rho):
        """Observed spin components ``<S . n_i>``."""
        return self.directions @ bloch_vector(rho)

    def spin_from_components(self, components):
        """``<S> = sum_ij d_ij <S . n_j> n_i`` with ``d`` the inverse Gram matrix."""
        return self.directions.T @ (self.gram_inverse @ np.asarray(components, dtype=float))

    def reconstruct(self, components):
        """Qubit state ``I/2 + 2 <S> . S`` from the three observed components."""
        s = self.spin_from_components(components)
        return 0.5 * np.eye(2) + 2.0 * spin_component(s)


def _qubit_weights(weights):
    w = np.asarray(weights, dtype=float).reshape(-1)
    if w.shape != (3,) or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
        raise InvalidWeights(f"expected three nonnegative weights summing to 1, got {w}")
    return w


def nonorthogonal_post_state(rho_ini, dirs, weights):
    """``I/2 + sum_i 2 x_i <S . n_i> S . n_i`` for measurements along ``dirs`` mixed with ``weights``."""
    rho = check_density_matrix(rho_ini)
    if rho.shape != (2, 2):
        raise DimMismatch("non-orthogonal direction measurements are defined for qubits only")
    w = _qubit_weights(weights)
    comps = dirs.components(rho)
    out = 0.5 * np.eye(2, dtype=complex)
    for x, s, n in zip(w, comps, dirs.directions):
        out += 2.0 * x * s * spin_component(n)
    return out


def expectation_identity_residual(rho_ini, dirs, weights):
    """Max deviation of ``<S.n_i>_post`` from ``sum_j x_j (n_i . n_j) <S.n_j>_ini``."""
    w = _qubit_weights(weights)
    post = nonorthogonal_post_state(rho_ini, dirs, w)
    lhs = dirs.components(post)
    rhs = dirs.gram @ (w * dirs.components(rho_ini))
    return float(np.max(np.abs(lhs - rhs)))


@dataclass
class AffineFitReport:
    best_alpha: float
    best_beta: float
    worst_case_residual: float
    worst_index: int
    identity_residual: float
    trials: int
    residuals: np.ndarray = field(repr=False)


def affine_fit_counterexample(dirs, weights, trial_states):
    """Best constant ``(alpha, beta)`` with ``rho_msmt ~ alpha rho_ini + beta I`` over qubit trials.

    For non-orthogonal directions no constant pair fits every state, and the
    worst-case residual stays well away from zero. ``identity_residual`` is
    the largest violation of the spin-component identity over the trials.
    """
    states = check_density_stack(trial_states)
    if states.shape[1] != 2:
        raise DimMismatch("affine counterexample is defined for qubit states")
    if len(states) < 10:
        raise DegenerateTrialSet(f"need at least 10 trial states, got {len(states)}")
    blochs = np.stack([bloch_vector(r) for r in states])
    if np.linalg.matrix_rank(blochs, tol=1e-8) < 3:
        raise DegenerateTrialSet("trial Bloch vectors do not span three dimensions")
    w = _qubit_weights(weights)
    post = np.stack([nonorthogonal_post_state(r, dirs, w) for r in states])
    alpha, beta, resid = fit_affine(states, post)
    ident = max(expectation_identity_residual(r, dirs, w) for r in states)
    worst = int(np.argmax(resid))
    return AffineFitReport(
        best_alpha=alpha,
        best_beta=beta,
        worst_case_residual=float(resid[worst]),
        worst_index=worst,
        identity_residual=ident,
        trials=len(states),
        residuals=resid,
    )
