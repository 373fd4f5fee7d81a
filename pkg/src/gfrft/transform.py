"""Fractional spectral transforms on directed product graphs.

Two transform families are implemented against :class:`FractionalLaplacian`
factorizations:

* the "box" family applies the SVD triple of the assembled product
  operator directly (one big factorization);
* the "kron" family applies the factor triples separably, two-sided for
  two factors and mode-wise along every tensor axis for m factors, never
  materializing an N x N Kronecker operator.

A Hermitian-basis transform over the factor Hermitian Laplacians is also
provided.  Every forward maps a length-N signal to a stacked pair of
length-N components (the Hermitian transform has a single complex
component); all transforms preserve the 2-norm and invert exactly.

Signals over a two-factor product are (N2 x N1) matrices whose columns
index the first factor's vertices; the vectorized view is column-major so
that ``vec(A X B^T) == (B kron A) vec(X)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .spectral import (
    ORIGIN_BOX,
    ORIGIN_M,
    FractionalLaplacian,
    HermitianFractional,
)
from .validation import check_finite

TAG_BOX = "box"
TAG_KRON = "kron"
TAG_M_BOX = "m-box"
TAG_M_KRON = "m-kron"
TAG_DGFRFT = "dgfrft"


def vec(matrix) -> np.ndarray:
    """Column-major vectorization."""
    return np.asarray(matrix).reshape(-1, order="F")


def unvec(x, shape) -> np.ndarray:
    """Inverse of :func:`vec` for a (rows, cols) shape."""
    return np.asarray(x).reshape(shape, order="F")


@dataclass(frozen=True)
class GraphSignal:
    """Signal on a two-factor product graph, held as an (N2 x N1) matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=float)
        if mat.ndim != 2:
            raise ValueError(f"signal matrix must be 2-D, got shape {mat.shape}")
        check_finite(mat, "signal matrix")
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def from_vec(cls, x, shape) -> "GraphSignal":
        return cls(matrix=unvec(np.asarray(x, dtype=float), tuple(shape)))

    @property
    def vec(self) -> np.ndarray:
        return vec(self.matrix)

    @property
    def shape(self) -> tuple:
        return self.matrix.shape


@dataclass(frozen=True)
class SpectrumPair:
    """Stacked transform output (y1, y2) with its provenance tag.

    The Hermitian transform is single-component: ``y1`` is complex and
    ``y2`` is empty.
    """

    y1: np.ndarray
    y2: np.ndarray
    tag: str
    alpha: float
    dims: tuple

    @property
    def n(self) -> int:
        return self.y1.shape[0]

    def stacked(self) -> np.ndarray:
        return np.concatenate([self.y1, self.y2])


@dataclass(frozen=True)
class ProductFrequencyOrder:
    """Nondecreasing arrangement of all factor frequency sums.

    ``taus[k]`` is the k-th smallest sum and ``pairs[k]`` the index tuple
    producing it; exact ties are broken lexicographically by index tuple.
    """

    taus: np.ndarray
    pairs: tuple

    @property
    def n(self) -> int:
        return self.taus.shape[0]


def _factor_values(factor) -> np.ndarray:
    if isinstance(factor, (FractionalLaplacian, HermitianFractional)):
        return np.asarray(factor.values, dtype=float)
    return np.asarray(factor, dtype=float).ravel()


def frequency_order(*factors) -> ProductFrequencyOrder:
    """Ascending order of all sums of per-factor frequencies.

    Accepts factor operators (their ``values`` are used) or raw value
    arrays; any number of factors >= 1.
    """
    values = [_factor_values(f) for f in factors]
    if not values:
        raise ValueError("need at least one factor")
    grids = np.meshgrid(*values, indexing="ij")
    sums = np.zeros_like(grids[0])
    for g in grids:
        sums = sums + g
    flat = sums.ravel()  # C order: lexicographic by index tuple
    order = np.argsort(flat, kind="stable")
    shape = sums.shape
    pairs = tuple(tuple(int(i) for i in np.unravel_index(k, shape)) for k in order)
    return ProductFrequencyOrder(taus=flat[order], pairs=pairs)


# ---------------------------------------------------------------------------
# signal coercion
# ---------------------------------------------------------------------------

def _as_vec(x, n: int) -> np.ndarray:
    if isinstance(x, GraphSignal):
        x = x.vec
    x = np.asarray(x)
    if x.ndim == 2:
        x = vec(x)
    if x.ndim != 1 or x.shape[0] != n:
        raise ValueError(f"signal must have {n} entries, got shape {x.shape}")
    return check_finite(x, "signal")


def _as_matrix(x, shape) -> np.ndarray:
    if isinstance(x, GraphSignal):
        x = x.matrix
    x = np.asarray(x)
    if x.ndim == 1:
        if x.shape[0] != shape[0] * shape[1]:
            raise ValueError(f"signal must have {shape[0] * shape[1]} entries, got {x.shape[0]}")
        x = unvec(x, shape)
    if x.shape != tuple(shape):
        raise ValueError(f"signal matrix must have shape {tuple(shape)}, got {x.shape}")
    return check_finite(x, "signal")


def _mode_apply(mats, x, dims) -> np.ndarray:
    """Apply one matrix along each tensor axis of the vectorized signal."""
    t = np.asarray(x).reshape(tuple(dims))
    for axis, mat in enumerate(mats):
        t = np.moveaxis(np.tensordot(mat, t, axes=(1, axis)), 0, axis)
    return t.reshape(-1)


# ---------------------------------------------------------------------------
# box family: one factorization of the assembled product operator
# ---------------------------------------------------------------------------

def _pair_forward(p, q, x):
    yp = p.conj().T @ x
    yq = q.conj().T @ x
    return 0.5 * (yp + yq), 0.5 * (yp - yq)


def _pair_inverse(p, q, y1, y2):
    return 0.5 * (p @ (y1 + y2) + q @ (y1 - y2))


def box_forward(fl: FractionalLaplacian, x) -> SpectrumPair:
    """Two-component transform through the product operator's own triple."""
    x = _as_vec(x, fl.n)
    y1, y2 = _pair_forward(fl.left, fl.right, x)
    tag = TAG_M_BOX if fl.origin == ORIGIN_M else TAG_BOX
    return SpectrumPair(y1=y1, y2=y2, tag=tag, alpha=fl.alpha, dims=fl.dims)


def box_inverse(fl: FractionalLaplacian, sp: SpectrumPair) -> np.ndarray:
    expected = TAG_M_BOX if fl.origin == ORIGIN_M else TAG_BOX
    if sp.tag != expected:
        raise ValueError(f"spectrum tag {sp.tag!r} does not match transform {expected!r}")
    if sp.n != fl.n or sp.y2.shape[0] != fl.n:
        raise ValueError(f"spectrum size {sp.n} does not match operator size {fl.n}")
    return _pair_inverse(fl.left, fl.right, sp.y1, sp.y2)


def m_box_forward(fl: FractionalLaplacian, x) -> SpectrumPair:
    if fl.origin != ORIGIN_M:
        raise ValueError(f"expected an m-fold product operator, got origin {fl.origin!r}")
    return box_forward(fl, x)


def m_box_inverse(fl: FractionalLaplacian, sp: SpectrumPair) -> np.ndarray:
    if fl.origin != ORIGIN_M:
        raise ValueError(f"expected an m-fold product operator, got origin {fl.origin!r}")
    return box_inverse(fl, sp)


# ---------------------------------------------------------------------------
# kron family: separable application of the factor triples
# ---------------------------------------------------------------------------

def kron_forward(f1: FractionalLaplacian, f2: FractionalLaplacian, x) -> SpectrumPair:
    """Separable two-factor transform (two-sided thin products).

    Runs ``Z = P2* X conj(P1)`` and the Q analogue, then splits into the
    half-sum and half-difference components; the N x N Kronecker operators
    are never formed.
    """
    if f1.alpha != f2.alpha:
        raise ValueError("factors must share one fractional order")
    shape = (f2.n, f1.n)
    xm = _as_matrix(x, shape)
    z = f2.left.conj().T @ xm @ np.conj(f1.left)
    zt = f2.right.conj().T @ xm @ np.conj(f1.right)
    return SpectrumPair(
        y1=vec(0.5 * (z + zt)),
        y2=vec(0.5 * (z - zt)),
        tag=TAG_KRON,
        alpha=f1.alpha,
        dims=(f1.n, f2.n),
    )


def kron_inverse(f1: FractionalLaplacian, f2: FractionalLaplacian, sp: SpectrumPair) -> np.ndarray:
    """Inverse of :func:`kron_forward`; returns the (N2 x N1) signal matrix."""
    if sp.tag != TAG_KRON:
        raise ValueError(f"spectrum tag {sp.tag!r} does not match transform {TAG_KRON!r}")
    shape = (f2.n, f1.n)
    if sp.n != f1.n * f2.n:
        raise ValueError(f"spectrum size {sp.n} does not match operator size {f1.n * f2.n}")
    y1 = unvec(sp.y1, shape)
    y2 = unvec(sp.y2, shape)
    w = (y1 + y2) @ f1.left.T
    wt = (y1 - y2) @ f1.right.T
    return 0.5 * (f2.left @ w + f2.right @ wt)


def m_kron_forward(factors, x) -> SpectrumPair:
    """Separable m-factor transform via mode-wise tensor contractions."""
    factors = list(factors)
    if len(factors) < 2:
        raise ValueError(f"need at least two factors, got {len(factors)}")
    alphas = {f.alpha for f in factors}
    if len(alphas) != 1:
        raise ValueError("factors must share one fractional order")
    dims = tuple(f.n for f in factors)
    n = int(np.prod(dims))
    xv = _as_vec(x, n)
    yp = _mode_apply([f.left.conj().T for f in factors], xv, dims)
    yq = _mode_apply([f.right.conj().T for f in factors], xv, dims)
    return SpectrumPair(
        y1=0.5 * (yp + yq),
        y2=0.5 * (yp - yq),
        tag=TAG_M_KRON,
        alpha=factors[0].alpha,
        dims=dims,
    )


def m_kron_inverse(factors, sp: SpectrumPair) -> np.ndarray:
    factors = list(factors)
    if sp.tag != TAG_M_KRON:
        raise ValueError(f"spectrum tag {sp.tag!r} does not match transform {TAG_M_KRON!r}")
    dims = tuple(f.n for f in factors)
    n = int(np.prod(dims))
    if sp.n != n:
        raise ValueError(f"spectrum size {sp.n} does not match operator size {n}")
    wp = _mode_apply([f.left for f in factors], sp.y1 + sp.y2, dims)
    wq = _mode_apply([f.right for f in factors], sp.y1 - sp.y2, dims)
    return 0.5 * (wp + wq)


# ---------------------------------------------------------------------------
# Hermitian-basis transform over the factor Hermitian Laplacians
# ---------------------------------------------------------------------------

def dgfrft_forward(hfs, x) -> SpectrumPair:
    """Single-component transform in the product Hermitian fractional basis.

    ``hfs`` is one :class:`HermitianFractional` per factor; the adjoint of
    their Kronecker-product basis is applied mode-wise.  The output is
    complex; the second component is empty.
    """
    hfs = list(hfs)
    if not hfs:
        raise ValueError("need at least one factor basis")
    dims = tuple(h.n for h in hfs)
    n = int(np.prod(dims))
    xv = _as_vec(x, n)
    y1 = _mode_apply([h.basis.conj().T for h in hfs], xv.astype(complex), dims)
    return SpectrumPair(
        y1=y1,
        y2=np.zeros(0),
        tag=TAG_DGFRFT,
        alpha=hfs[0].alpha,
        dims=dims,
    )


def dgfrft_inverse(hfs, sp: SpectrumPair) -> np.ndarray:
    hfs = list(hfs)
    if sp.tag != TAG_DGFRFT:
        raise ValueError(f"spectrum tag {sp.tag!r} does not match transform {TAG_DGFRFT!r}")
    dims = tuple(h.n for h in hfs)
    n = int(np.prod(dims))
    if sp.n != n:
        raise ValueError(f"spectrum size {sp.n} does not match operator size {n}")
    return _mode_apply([h.basis for h in hfs], sp.y1, dims)


# ---------------------------------------------------------------------------
# spectrum interchange
# ---------------------------------------------------------------------------

def save_spectrum(path, freqs, y1, y2=None, meta=None) -> None:
    """Plot-ready CSV ``k,tau_or_r,y1,y2`` plus an optional JSON sidecar.

    ``y1``/``y2`` must already be arranged in frequency-rank order.  A
    complex ``y1`` with ``y2=None`` is written as its real and imaginary
    parts.  ``meta`` is dumped next to the CSV with suffix ``.json``.
    """
    path = Path(path)
    freqs = np.asarray(freqs, dtype=float)
    y1 = np.asarray(y1)
    if y2 is None or np.asarray(y2).size == 0:
        col1, col2 = y1.real, y1.imag
    else:
        y2 = np.asarray(y2)
        col1, col2 = y1.real, y2.real
    with open(path, "w", newline="") as fh:
        fh.write("k,tau_or_r,y1,y2\n")
        for k in range(freqs.shape[0]):
            fh.write(f"{k},{freqs[k]:.17g},{col1[k]:.17g},{col2[k]:.17g}\n")
    if meta is not None:
        Path(str(path) + ".json").write_text(json.dumps(meta, indent=2))
