"""scikit-learn style wrapper: fit an arrangement, transform points into basis-form values."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import arrangement as arr
from .exceptions import DimensionMismatch


class EllipticCohomology(TransformerMixin, BaseEstimator):
    """Degree-k cohomology of an elliptic arrangement complement.

    ``fit`` takes an :class:`EllipticArrangement` (or its JSON dict) and builds
    one normalized form per nbc subset at every vertex; these forms span
    H^k(M_C; L_w).  ``transform`` evaluates the dt_1 ^ ... ^ dt_k coefficient of
    each basis form at points of C^k, giving an (n_points, betti_) array.

    Parameters
    ----------
    check_residues : bool
        After fitting, recompute the residue of each form at its own vertex
        and store the largest deviation from 1 in ``residue_defect_``.
    """

    def __init__(self, check_residues: bool = False):
        self.check_residues = check_residues

    def fit(self, X, y=None):
        C = X if isinstance(X, arr.EllipticArrangement) else arr.EllipticArrangement.from_json(X)
        total, per = arr.betti(C)
        basis = []
        for i, vx in enumerate(per):
            for S, fd in arr.vertex_forms(C, vx):
                basis.append((i, S, fd))
        self.arrangement_ = C
        self.betti_ = total
        self.vertices_ = list(per)
        self.local_dims_ = [per[vx] for vx in self.vertices_]
        self.basis_ = basis
        self.n_features_out_ = len(basis)
        if self.check_residues:
            from .form_builder import point_residue
            self.residue_defect_ = max((abs(point_residue(fd, fd.label) - 1) for _, _, fd in basis),
                                       default=0.0)
        return self

    def _validate_points(self, T) -> np.ndarray:
        T = np.asarray(T, dtype=complex)
        if T.ndim == 1:
            T = T[None, :]
        k = self.arrangement_.k
        if T.ndim != 2 or T.shape[1] != k:
            raise DimensionMismatch(f"expected points of shape (n, {k}), got {T.shape}")
        if not np.all(np.isfinite(T)):
            raise ValueError("points must be finite")
        return T

    def transform(self, X):
        check_is_fitted(self, "basis_")
        T = self._validate_points(X)
        out = np.empty((T.shape[0], self.n_features_out_), dtype=complex)
        for col, (_, _, fd) in enumerate(self.basis_):
            out[:, col] = fd.evaluate(T)
        return out

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "basis_")
        return np.array([f"v{i}_H" + "_".join(str(j) for j in S) for i, S, _ in self.basis_],
                        dtype=object)
