"""Scikit-learn style estimators wrapping the fractional graph transforms.

Each estimator is fitted on the factor graphs of a Cartesian product
(a sequence of adjacency matrices; the signal index is column-major over
the factors, last factor fastest) and then transforms batches of signals
shaped ``(n_samples, n_vertices)``.  They follow the usual conventions:
parameters are plain constructor attributes, fitted state carries a
trailing underscore, and ``get_params``/``set_params``/``clone`` work.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .denoise import bandlimit_box, bandlimit_dgfrft, bandlimit_m_kron
from .graph import DirectedGraph, hermitian_laplacian, laplacian
from .spectral import (
    fractional_laplacian,
    hermitian_fractional,
    m_product_fractional_laplacian,
    product_fractional_laplacian,
)
from .transform import (
    box_forward,
    box_inverse,
    dgfrft_forward,
    dgfrft_inverse,
    frequency_order,
    kron_forward,
    kron_inverse,
    m_kron_forward,
    m_kron_inverse,
    SpectrumPair,
    TAG_BOX,
    TAG_DGFRFT,
    TAG_KRON,
    TAG_M_BOX,
    TAG_M_KRON,
)


def _as_adjacency_list(graphs) -> list:
    if isinstance(graphs, (np.ndarray, DirectedGraph)):
        graphs = [graphs]
    out = []
    for g in graphs:
        if isinstance(g, DirectedGraph):
            out.append(g)
        else:
            out.append(DirectedGraph(np.asarray(g, dtype=float)))
    if not out:
        raise ValueError("need at least one factor graph")
    return out


def _maybe_real(arr: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(arr) and np.abs(arr.imag).max(initial=0.0) <= 1e-10 * max(
        np.abs(arr.real).max(initial=0.0), 1.0
    ):
        return np.ascontiguousarray(arr.real)
    return arr


class _FittedOnGraphs(BaseEstimator, TransformerMixin):
    """Common fit plumbing: factor graphs in, factor operators out."""

    def _signals(self, X) -> np.ndarray:
        check_is_fitted(self, "dims_")
        X = check_array(X, dtype="numeric", ensure_2d=True)
        if X.shape[1] != self.n_vertices_:
            raise ValueError(
                f"signals must have {self.n_vertices_} columns, got {X.shape[1]}"
            )
        return X


class KronGFRFT(_FittedOnGraphs):
    """Separable fractional transform over the factor operators.

    Parameters
    ----------
    alpha : float, default=0.7
        Fractional order in (0, 1].

    Attributes
    ----------
    factors_ : list of FractionalLaplacian
        One fractional operator per factor graph.
    dims_ : tuple of int
        Factor vertex counts.
    n_vertices_ : int
        Product of the factor sizes; signals have this many entries.
    """

    def __init__(self, alpha: float = 0.7):
        self.alpha = alpha

    def fit(self, X, y=None):
        graphs = _as_adjacency_list(X)
        self.factors_ = [fractional_laplacian(laplacian(g), self.alpha) for g in graphs]
        self.dims_ = tuple(f.n for f in self.factors_)
        self.n_vertices_ = int(np.prod(self.dims_))
        self.frequency_order_ = frequency_order(*self.factors_)
        return self

    def _forward_one(self, x) -> SpectrumPair:
        if len(self.factors_) == 1:
            return box_forward(self.factors_[0], x)
        if len(self.factors_) == 2:
            return kron_forward(self.factors_[0], self.factors_[1], x)
        return m_kron_forward(self.factors_, x)

    def _inverse_one(self, sp: SpectrumPair) -> np.ndarray:
        if len(self.factors_) == 1:
            return box_inverse(self.factors_[0], sp)
        if len(self.factors_) == 2:
            from .transform import vec

            return vec(kron_inverse(self.factors_[0], self.factors_[1], sp))
        return m_kron_inverse(self.factors_, sp)

    def transform(self, X) -> np.ndarray:
        X = self._signals(X)
        rows = [self._forward_one(x).stacked() for x in X]
        return _maybe_real(np.array(rows))

    def inverse_transform(self, Y) -> np.ndarray:
        check_is_fitted(self, "dims_")
        Y = np.asarray(Y)
        n = self.n_vertices_
        if Y.ndim != 2 or Y.shape[1] != 2 * n:
            raise ValueError(f"spectra must have {2 * n} columns, got shape {Y.shape}")
        tag = TAG_BOX if len(self.factors_) == 1 else (
            TAG_KRON if len(self.factors_) == 2 else TAG_M_KRON
        )
        rows = []
        for y in Y:
            sp = SpectrumPair(y1=y[:n], y2=y[n:], tag=tag, alpha=self.alpha, dims=self.dims_)
            rows.append(self._inverse_one(sp))
        return _maybe_real(np.array(rows))


class BoxGFRFT(_FittedOnGraphs):
    """Fractional transform through one factorization of the assembled
    product operator.

    Parameters
    ----------
    alpha : float, default=0.7
        Fractional order in (0, 1].

    Attributes
    ----------
    product_ : FractionalLaplacian
        Factorized Kronecker-sum operator of all factors.
    """

    def __init__(self, alpha: float = 0.7):
        self.alpha = alpha

    def fit(self, X, y=None):
        graphs = _as_adjacency_list(X)
        self.factors_ = [fractional_laplacian(laplacian(g), self.alpha) for g in graphs]
        if len(self.factors_) == 1:
            self.product_ = self.factors_[0]
        elif len(self.factors_) == 2:
            self.product_ = product_fractional_laplacian(*self.factors_)
        else:
            self.product_ = m_product_fractional_laplacian(self.factors_)
        self.dims_ = tuple(f.n for f in self.factors_)
        self.n_vertices_ = self.product_.n
        return self

    def transform(self, X) -> np.ndarray:
        X = self._signals(X)
        rows = [box_forward(self.product_, x).stacked() for x in X]
        return _maybe_real(np.array(rows))

    def inverse_transform(self, Y) -> np.ndarray:
        check_is_fitted(self, "dims_")
        Y = np.asarray(Y)
        n = self.n_vertices_
        if Y.ndim != 2 or Y.shape[1] != 2 * n:
            raise ValueError(f"spectra must have {2 * n} columns, got shape {Y.shape}")
        tag = TAG_M_BOX if self.product_.origin == "product-m" else TAG_BOX
        rows = []
        for y in Y:
            sp = SpectrumPair(y1=y[:n], y2=y[n:], tag=tag, alpha=self.alpha,
                              dims=self.dims_)
            rows.append(box_inverse(self.product_, sp))
        return _maybe_real(np.array(rows))


class HermitianGFRFT(_FittedOnGraphs):
    """Fractional transform in the product Hermitian-Laplacian basis.

    Parameters
    ----------
    alpha : float, default=0.7
        Fractional order in (0, 1].
    q : float, default=0.5
        Phase parameter of the Hermitian Laplacian.

    Attributes
    ----------
    bases_ : list of HermitianFractional
        One powered unitary basis per factor graph.
    """

    def __init__(self, alpha: float = 0.7, q: float = 0.5):
        self.alpha = alpha
        self.q = q

    def fit(self, X, y=None):
        graphs = _as_adjacency_list(X)
        self.bases_ = [
            hermitian_fractional(hermitian_laplacian(g, self.q), self.alpha) for g in graphs
        ]
        self.dims_ = tuple(h.n for h in self.bases_)
        self.n_vertices_ = int(np.prod(self.dims_))
        return self

    def transform(self, X) -> np.ndarray:
        X = self._signals(X)
        return np.array([dgfrft_forward(self.bases_, x).y1 for x in X])

    def inverse_transform(self, Y) -> np.ndarray:
        check_is_fitted(self, "dims_")
        Y = np.asarray(Y)
        n = self.n_vertices_
        if Y.ndim != 2 or Y.shape[1] != n:
            raise ValueError(f"spectra must have {n} columns, got shape {Y.shape}")
        rows = []
        for y in Y:
            sp = SpectrumPair(y1=y, y2=np.zeros(0), tag=TAG_DGFRFT, alpha=self.alpha,
                              dims=self.dims_)
            rows.append(dgfrft_inverse(self.bases_, sp))
        return _maybe_real(np.array(rows))


class GFRFTDenoiser(_FittedOnGraphs):
    """Bandlimited low-frequency denoiser, pipeline-composable.

    Parameters
    ----------
    method : {"kron", "box", "dgfrft"}, default="kron"
        Which transform family to bandlimit.
    alpha : float, default=0.7
        Fractional order in (0, 1].
    omega : int, default=40
        Number of retained low frequencies.
    q : float, default=0.5
        Phase parameter (Hermitian method only).
    """

    def __init__(self, method: str = "kron", alpha: float = 0.7, omega: int = 40,
                 q: float = 0.5):
        self.method = method
        self.alpha = alpha
        self.omega = omega
        self.q = q

    def fit(self, X, y=None):
        if self.method not in ("kron", "box", "dgfrft"):
            raise ValueError(f"unknown method {self.method!r}")
        graphs = _as_adjacency_list(X)
        if self.method == "dgfrft":
            if len(graphs) != 2:
                raise ValueError("dgfrft denoising needs exactly two factor graphs")
            self.bases_ = [
                hermitian_fractional(hermitian_laplacian(g, self.q), self.alpha)
                for g in graphs
            ]
            self.dims_ = tuple(h.n for h in self.bases_)
        else:
            self.factors_ = [fractional_laplacian(laplacian(g), self.alpha) for g in graphs]
            if self.method == "box":
                if len(self.factors_) == 1:
                    self.product_ = self.factors_[0]
                elif len(self.factors_) == 2:
                    self.product_ = product_fractional_laplacian(*self.factors_)
                else:
                    self.product_ = m_product_fractional_laplacian(self.factors_)
            self.dims_ = tuple(f.n for f in self.factors_)
        self.n_vertices_ = int(np.prod(self.dims_))
        return self

    def transform(self, X) -> np.ndarray:
        X = self._signals(X)
        rows = []
        for x in X:
            if self.method == "box":
                rows.append(bandlimit_box(self.product_, x, self.omega))
            elif self.method == "kron":
                rows.append(bandlimit_m_kron(self.factors_, x, self.omega))
            else:
                rows.append(bandlimit_dgfrft(self.bases_[0], self.bases_[1], x, self.omega))
        return _maybe_real(np.array(rows))
