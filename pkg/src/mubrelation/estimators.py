"""scikit-learn style wrappers around the functional API.

``X`` is always a stack of density matrices with shape ``(n_states, N, N)``
(a single ``(N, N)`` matrix is accepted and promoted).
"""

import warnings

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import DECOMPOSITION_TOL, check_density_stack
from .exceptions import DimMismatch, NotInRelationImage
from .measure import SampleRecord, empirical_post_state, post_measurement_state
from .mub import MixtureWeights, as_bases, criterion_holds, design_tensor, generate_mub
from .relation import fit_affine, fit_lambda, recover_initial_affine, tomographic_reconstruct

__all__ = ["MubMeasurement", "AffineRelationFit", "MubTomography"]


def _resolve_scheme(bases, weights, dim):
    bases = generate_mub(dim) if bases is None else bases
    bases = as_bases(bases)
    if bases[0].dim != dim:
        raise DimMismatch(f"bases have dimension {bases[0].dim}, data has {dim}")
    if weights is None:
        weights = MixtureWeights.uniform(len(bases))
    elif not isinstance(weights, MixtureWeights):
        weights = MixtureWeights(weights)
    return bases, weights


class MubMeasurement(TransformerMixin, BaseEstimator):
    """Measurement channel: measure in every basis, then mix the ensembles.

    Parameters
    ----------
    bases : MubSet, sequence of OrthonormalBasis, or None
        Measurement bases. ``None`` generates the prime-dimension MUB set
        matching the data at ``fit`` time.
    weights : array_like or None
        Mixture weights, uniform when ``None``.
    tol : float
        Tolerance on the design-tensor residual used to decide whether the
        channel satisfies the relation (``relation_holds_``) and can be
        inverted by ``inverse_transform``.

    Attributes
    ----------
    bases_, weights_, dim_ : fitted scheme.
    design_tensor_ : DesignTensor of the scheme.
    relation_holds_ : bool
    """

    def __init__(self, bases=None, weights=None, tol=1e-9):
        self.bases = bases
        self.weights = weights
        self.tol = tol

    def fit(self, X, y=None):
        X = check_density_stack(X)
        self.dim_ = X.shape[1]
        self.bases_, self.weights_ = _resolve_scheme(self.bases, self.weights, self.dim_)
        self.design_tensor_ = design_tensor(self.bases_, self.weights_)
        self.relation_holds_ = criterion_holds(self.design_tensor_, self.tol)
        return self

    def _check_X(self, X):
        check_is_fitted(self, "bases_")
        X = check_density_stack(X)
        if X.shape[1] != self.dim_:
            raise DimMismatch(f"fitted for dimension {self.dim_}, got {X.shape[1]}")
        return X

    def transform(self, X):
        X = self._check_X(X)
        return np.stack([post_measurement_state(r, self.bases_, self.weights_) for r in X])

    def inverse_transform(self, X):
        X = self._check_X(X)
        if not self.relation_holds_:
            raise NotInRelationImage("scheme does not satisfy the relation, so it has no affine inverse "
                                     f"(design-tensor residual {self.design_tensor_.residual:.3e})")
        return np.stack([recover_initial_affine(r) for r in X])


class AffineRelationFit(BaseEstimator):
    """Fit a universal affine map ``post ~ alpha pre + beta I`` over pairs of states.

    ``family="affine"`` fits ``alpha`` and ``beta`` freely.
    ``family="lambda"`` fits the trace-preserving line
    ``(lambda / N) I + (1 - lambda) pre`` and also sets ``lambda_``.

    ``score`` is the negated worst-case Frobenius residual, so larger is better.
    """

    def __init__(self, family="affine"):
        self.family = family

    def fit(self, X, y):
        X = check_density_stack(X)
        y = np.asarray(y, dtype=complex)
        if y.ndim == 2:
            y = y[np.newaxis]
        if y.shape != X.shape:
            raise DimMismatch(f"pre/post stacks differ in shape: {X.shape} vs {y.shape}")
        n = X.shape[1]
        if self.family == "affine":
            self.alpha_, self.beta_, resid = fit_affine(X, y)
            self.lambda_ = None
        elif self.family == "lambda":
            lam, resid = fit_lambda(X, y)
            self.lambda_ = lam
            self.alpha_, self.beta_ = 1.0 - lam, lam / n
        else:
            raise ValueError(f"family must be 'affine' or 'lambda', got {self.family!r}")
        self.dim_ = n
        self.residuals_ = resid
        self.worst_index_ = int(np.argmax(resid))
        self.worst_residual_ = float(resid[self.worst_index_])
        return self

    def predict(self, X):
        check_is_fitted(self, "alpha_")
        X = check_density_stack(X)
        return self.alpha_ * X + self.beta_ * np.eye(self.dim_)

    def score(self, X, y):
        pred = self.predict(X)
        y = np.asarray(y, dtype=complex).reshape(pred.shape)
        return -float(np.max(np.linalg.norm(pred - y, axis=(1, 2))))


class MubTomography(BaseEstimator):
    """Linear-inversion state tomography from counts in a complete MUB set.

    ``fit`` takes a :class:`SampleRecord` or an ``(N + 1, N)`` count array
    (rows are bases). The estimate is returned unclamped; ``is_positive_``
    reports whether it is a valid state.
    """

    def __init__(self, bases=None, weights=None, tol=DECOMPOSITION_TOL):
        self.bases = bases
        self.weights = weights
        self.tol = tol

    def fit(self, X, y=None):
        record = X if isinstance(X, SampleRecord) else None
        if record is None:
            counts = np.asarray(X)
            if counts.ndim != 2:
                raise DimMismatch(f"counts must be an (N + 1, N) array, got shape {counts.shape}")
            record = SampleRecord(seed=0, shots=int(counts[0].sum()), counts=counts)
        dim = record.counts.shape[1]
        self.bases_, self.weights_ = _resolve_scheme(self.bases, self.weights, dim)
        freqs = record.frequencies()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            self.density_matrix_ = tomographic_reconstruct(freqs, self.bases_, self.tol)
        self.post_state_ = empirical_post_state(record, self.bases_, self.weights_)
        lo = np.linalg.eigvalsh(0.5 * (self.density_matrix_ + self.density_matrix_.conj().T))[0]
        self.is_positive_ = bool(lo >= -self.tol)
        return self

    def score(self, X, y=None):
        """Negated Frobenius distance between the estimate and a reference state ``X``."""
        check_is_fitted(self, "density_matrix_")
        return -float(np.linalg.norm(self.density_matrix_ - np.asarray(X)))
