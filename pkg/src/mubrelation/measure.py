"""Complete projective measurements: Born probabilities, dephased ensembles, mixtures, sampling.

Shot sampling uses numpy's PCG64 generator. Basis ``alpha`` of a record with
seed ``s`` draws from ``PCG64(SeedSequence(s, spawn_key=(alpha,)))`` so each
row is reproducible on its own and independent of evaluation order. Outcomes
are drawn by inverse-CDF lookup of ``shots`` uniform variates.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import CONSTRUCTION_TOL, check_density_matrix, check_probabilities
from .exceptions import DimMismatch, InvalidState, WeightCountMismatch
from .mub import MixtureWeights, as_bases

__all__ = [
    "OutcomeDistribution",
    "EnsembleState",
    "SampleRecord",
    "born_probabilities",
    "dephase",
    "mix",
    "post_measurement_state",
    "sample_measurements",
    "sample_counts",
    "empirical_post_state",
    "basis_generator",
]


@dataclass(frozen=True)
class OutcomeDistribution:
    basis_index: int
    probs: np.ndarray


@dataclass(frozen=True)
class EnsembleState:
    """Non-selective post-measurement state ``sum_j p_j P_j`` of one basis."""

    basis_index: int
    rho: np.ndarray


@dataclass(frozen=True)
class SampleRecord:
    """Outcome counts, one row per basis, each row summing to ``shots``."""

    seed: int
    shots: int
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 2:
            raise DimMismatch(f"counts must be 2-D, got shape {counts.shape}")
        if int(self.shots) < 1:
            raise ValueError(f"shots must be >= 1, got {self.shots}")
        if np.any(counts < 0) or np.any(counts.sum(axis=1) != self.shots):
            raise ValueError("every counts row must be nonnegative and sum to shots")
        counts = counts.copy()
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "shots", int(self.shots))
        object.__setattr__(self, "seed", int(self.seed))

    def frequencies(self):
        return self.counts / self.shots


def _check_basis_dim(rho, basis):
    if rho.shape[0] != basis.dim:
        raise DimMismatch(f"state has dimension {rho.shape[0]}, basis has {basis.dim}")


def _born(rho, basis, tol=CONSTRUCTION_TOL):
    v = basis.vectors
    diag = np.einsum("ja,ab,jb->j", v.conj(), rho, v)
    if np.max(np.abs(diag.imag)) > tol:
        raise InvalidState("Born probabilities have a non-negligible imaginary part")
    return check_probabilities(diag.real, basis.dim, tol)


def born_probabilities(rho, basis, basis_index=0):
    """``p_j = <j|rho|j>`` for every vector of ``basis``.

    Round-off negatives above ``-1e-12`` are clamped to zero; anything more
    negative, or a total that misses 1 by more than ``1e-12``, raises
    ``InvalidState``.
    """
    rho = check_density_matrix(rho)
    _check_basis_dim(rho, basis)
    return OutcomeDistribution(basis_index, _born(rho, basis))


def _ensemble(probs, basis):
    v = basis.vectors
    return np.einsum("j,ja,jb->ab", probs, v, v.conj())


def dephase(rho, basis, basis_index=0):
    rho = check_density_matrix(rho)
    _check_basis_dim(rho, basis)
    return EnsembleState(basis_index, _ensemble(_born(rho, basis), basis))


def mix(states, weights):
    """Convex combination of ensemble states (or plain matrices)."""
    states = list(states)
    if not isinstance(weights, MixtureWeights):
        weights = MixtureWeights(weights)
    if len(weights) != len(states):
        raise WeightCountMismatch(f"{len(weights)} weights for {len(states)} states")
    mats = [np.asarray(s.rho if isinstance(s, EnsembleState) else s, dtype=complex) for s in states]
    if len({m.shape for m in mats}) != 1:
        raise DimMismatch("states have differing dimensions")
    out = np.zeros_like(mats[0])
    for w, m in zip(weights.weights, mats):
        out += w * m
    return check_density_matrix(out)


def post_measurement_state(rho, bases, weights=None):
    """Measure ``rho`` in every basis and mix the ensembles (uniform weights by default)."""
    bases = as_bases(bases)
    rho = check_density_matrix(rho)
    if weights is None:
        weights = MixtureWeights.uniform(len(bases))
    states = []
    for alpha, b in enumerate(bases):
        _check_basis_dim(rho, b)
        states.append(EnsembleState(alpha, _ensemble(_born(rho, b), b)))
    return mix(states, weights)


def basis_generator(seed, alpha):
    """Generator used for row ``alpha`` of a record seeded with ``seed``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(alpha),))
    return np.random.Generator(np.random.PCG64(ss))


def sample_counts(probs, shots, rng):
    """Multinomial counts by inverse-CDF lookup of ``shots`` uniform draws."""
    cdf = np.cumsum(probs)
    u = rng.random(shots)
    idx = np.searchsorted(cdf, u, side="right")
    # u < cdf[-1] can fail only through round-off in the cumulative sum.
    np.minimum(idx, len(probs) - 1, out=idx)
    return np.bincount(idx, minlength=len(probs))


def sample_measurements(rho, bases, shots, seed):
    """Simulate ``shots`` projective measurements of ``rho`` in each basis."""
    if int(shots) < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    shots = int(shots)
    bases = as_bases(bases)
    rho = check_density_matrix(rho)
    rows = []
    for alpha, b in enumerate(bases):
        _check_basis_dim(rho, b)
        rows.append(sample_counts(_born(rho, b), shots, basis_generator(seed, alpha)))
    return SampleRecord(seed=seed, shots=shots, counts=np.stack(rows))


def empirical_post_state(record, bases, weights=None):
    """``sum_{i,alpha} c_alpha (counts[alpha, i] / shots) P_i^(alpha)``."""
    bases = as_bases(bases)
    freqs = record.frequencies()
    if freqs.shape != (len(bases), bases[0].dim):
        raise DimMismatch(f"counts shape {freqs.shape} does not match {len(bases)} bases "
                          f"of dimension {bases[0].dim}")
    if weights is None:
        weights = MixtureWeights.uniform(len(bases))
    return mix([EnsembleState(a, _ensemble(freqs[a], b)) for a, b in enumerate(bases)], weights)
