"""Ascending-ordered SVD with a deterministic sign convention, principal
matrix powers of orthogonal/unitary matrices, and fractional Laplacians for
factor graphs, two-factor products and m-fold products.

Fractional powers follow the principal branch: an orthogonal matrix M is
diagonalized as ``M = W diag(exp(i theta_j)) W*`` with ``theta_j`` in
(-pi, pi], and ``M**a = W diag(exp(i a theta_j)) W*``.  A real matrix with
an eigenvalue at -1 (an unpaired reflection) has a genuinely complex
principal power; such results are returned complex and flagged via
:class:`ComplexPowerWarning` instead of being silently truncated.  All
downstream machinery is complex-safe: product operators assembled from
complex factor powers are factorized with a complex SVD, and adjoints are
conjugate transposes throughout.

All factorizations are dense; results are deterministic for fixed inputs.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg

from .graph import HermitianLaplacian
from .validation import as_square_matrix, check_alpha

#: identifies the sign-fixing rule in exported factorization sidecars
SIGN_CONVENTION = "largest-entry-nonnegative-v1"

ORTHONORMAL_TOL = 1e-8
RECONSTRUCTION_RTOL = 1e-9
#: eigenvalues within this distance of -1 sit on the branch cut
REFLECTION_TOL = 1e-8
#: imaginary part below this fraction of the real part is rounding noise
REAL_TRUNCATION_RTOL = 1e-8

ORIGIN_FACTOR = "factor-graph"
ORIGIN_BOX = "product-box"
ORIGIN_M = "product-m"


class ComplexPowerWarning(UserWarning):
    """A principal matrix power came out genuinely complex (eigenvalue -1)."""


@dataclass(frozen=True)
class SpectralFactorization:
    """SVD triple with nondecreasing values and pinned signs/phases."""

    left: np.ndarray
    values: np.ndarray
    right: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class FractionalLaplacian:
    """Triple (P, R, Q) realizing ``L**alpha = P diag(R) Q*``.

    ``origin`` records how the operator was built: from a single factor
    graph, from a two-factor Kronecker-sum assembly, or from an m-fold
    assembly.  ``dims`` keeps the factor vertex counts (their product is
    the operator size).  ``complex_flagged`` is True when a factor power
    hit the -1 branch cut, in which case P and Q are complex unitary.
    """

    factorization: SpectralFactorization
    alpha: float
    origin: str
    dims: tuple
    source: np.ndarray
    complex_flagged: bool = False

    @property
    def n(self) -> int:
        return self.factorization.n

    @property
    def left(self) -> np.ndarray:
        return self.factorization.left

    @property
    def values(self) -> np.ndarray:
        return self.factorization.values

    @property
    def right(self) -> np.ndarray:
        return self.factorization.right

    def matrix(self) -> np.ndarray:
        """Dense ``L**alpha``."""
        return self.source


@dataclass(frozen=True)
class HermitianFractional:
    """Unitary basis ``P_q = U_q**alpha`` and powered eigenvalues of a
    Hermitian Laplacian."""

    basis: np.ndarray
    values: np.ndarray
    q: float
    alpha: float
    complex_flagged: bool = False

    @property
    def n(self) -> int:
        return self.values.shape[0]


def _pin_phases(vectors: np.ndarray) -> np.ndarray:
    """Unit phases that make each column's largest-magnitude entry real
    positive (lowest index on magnitude ties); for real input these are
    plain sign flips."""
    anchors = np.argmax(np.abs(vectors), axis=0)
    pivots = vectors[anchors, np.arange(vectors.shape[1])]
    mags = np.abs(pivots)
    safe = np.where(mags > 0.0, mags, 1.0)
    return np.where(mags > 0.0, np.conj(pivots) / safe, 1.0)


def svd_ascending(m) -> SpectralFactorization:
    """SVD with singular values sorted nondecreasing and deterministic signs.

    Ties in the ascending sort keep the backend's output order (stable
    sort), making repeated values deterministic.  Each left vector's
    largest-magnitude entry is made real positive and the paired right
    vector is rotated identically, which leaves every dyad ``s u v*``
    unchanged; for numerically zero singular values the dyad vanishes, so
    left and right vectors are pinned independently there.  Complex input
    yields a complex unitary triple under the same convention.

    Hermitian input is factorized through its eigendecomposition
    (``sigma = |lambda|``, right vectors the eigenvectors, left vectors
    sign-adjusted), so positive semidefinite matrices get ``left ==
    right`` exactly; a general SVD backend may pair them inconsistently
    inside near-degenerate clusters and in the null space.
    """
    m = as_square_matrix(m, "matrix", allow_complex=True)
    n = m.shape[0]
    scale = np.abs(m).max(initial=0.0)
    herm_defect = np.abs(m - m.conj().T).max(initial=0.0)
    if herm_defect <= 100.0 * np.finfo(float).eps * scale:
        if herm_defect > 0.0:
            m = 0.5 * (m + m.conj().T)
        lam, w = np.linalg.eigh(m)
        if np.iscomplexobj(w) and np.abs(w.imag).max(initial=0.0) == 0.0:
            w = np.ascontiguousarray(w.real)
        s = np.abs(lam)
        v = w
        u = w * np.where(lam < 0.0, -1.0, 1.0)
    else:
        u, s, vh = np.linalg.svd(m)
        v = vh.conj().T

    order = np.argsort(s, kind="stable")
    u = np.ascontiguousarray(u[:, order])
    s = np.ascontiguousarray(s[order])
    v = np.ascontiguousarray(v[:, order])

    zero_tol = n * np.finfo(float).eps * (s[-1] if n else 0.0)

    phase = _pin_phases(u)
    u = u * phase
    v = v * phase
    # independent pinning on the null space: the zero dyad does not tie v to u
    null = s <= zero_tol
    if np.any(null):
        v[:, null] = v[:, null] * _pin_phases(v[:, null])
    return SpectralFactorization(left=u, values=s, right=v)


def _principal_power(m: np.ndarray, alpha: float) -> tuple[np.ndarray, bool]:
    """Principal power of a unitary matrix; returns (result, branch_cut_hit)."""
    t, z = scipy.linalg.schur(m.astype(complex), output="complex")
    eigs = np.diag(t)
    theta = np.angle(eigs)
    # np.angle maps -1 - 0j to -pi; fold back onto the (-pi, pi] branch
    theta = np.where(theta <= -np.pi + 1e-12, theta + 2.0 * np.pi, theta)
    flagged = bool(np.any(np.abs(eigs + 1.0) <= REFLECTION_TOL))
    powered = (z * np.exp(1j * alpha * theta)) @ z.conj().T
    if not flagged:
        imag_norm = np.linalg.norm(powered.imag)
        real_norm = np.linalg.norm(powered.real)
        if imag_norm <= REAL_TRUNCATION_RTOL * real_norm:
            return np.ascontiguousarray(powered.real), False
    return powered, flagged


def orthogonal_fractional_power(m, alpha: float) -> np.ndarray:
    """Principal matrix power ``M**alpha`` of an orthogonal/unitary matrix.

    The result is unitary.  When the imaginary part is rounding noise the
    matrix is truncated to real; a branch-cut hit (eigenvalue -1) keeps the
    complex result and emits :class:`ComplexPowerWarning`.
    """
    m = as_square_matrix(m, "matrix", allow_complex=True)
    gram = m.conj().T @ m
    if np.abs(gram - np.eye(m.shape[0])).max(initial=0.0) > ORTHONORMAL_TOL:
        raise ValueError("matrix is not orthonormal within 1e-8")
    powered, flagged = _principal_power(m, float(alpha))
    if flagged:
        warnings.warn(
            "matrix has an eigenvalue at -1; principal power is complex",
            ComplexPowerWarning,
            stacklevel=2,
        )
    return powered


def fractional_laplacian(
    l, alpha: float, allow_any_alpha: bool = False
) -> FractionalLaplacian:
    """Fractional Laplacian of one factor graph.

    Computes ``svd_ascending(L) = (U, S, V)`` and returns the triple
    ``P = U**alpha``, ``R = S**alpha`` (elementwise, with ``0**alpha = 0``),
    ``Q = V**alpha``.  ``alpha = 1`` reproduces the plain factorization
    exactly.
    """
    l = as_square_matrix(l, "laplacian")
    alpha = check_alpha(alpha, allow_any=allow_any_alpha)
    fact = svd_ascending(l)
    if alpha == 1.0:
        return FractionalLaplacian(
            factorization=fact,
            alpha=alpha,
            origin=ORIGIN_FACTOR,
            dims=(l.shape[0],),
            source=l,
        )
    p, flag_p = _principal_power(fact.left, alpha)
    q, flag_q = _principal_power(fact.right, alpha)
    # common per-pair phases pin the powered columns deterministically
    # without changing P diag(R) Q*
    phase = _pin_phases(p)
    p = p * phase
    q = q * phase
    r = np.where(fact.values > 0.0, fact.values, 0.0) ** alpha
    powered = SpectralFactorization(left=p, values=r, right=q)
    source = (p * r) @ q.conj().T
    return FractionalLaplacian(
        factorization=powered,
        alpha=alpha,
        origin=ORIGIN_FACTOR,
        dims=(l.shape[0],),
        source=source,
        complex_flagged=flag_p or flag_q,
    )


def _assemble_kron_sum(matrices) -> np.ndarray:
    """``sum_i I x ... x M_i x ... x I`` over the factor list."""
    sizes = [m.shape[0] for m in matrices]
    total = int(np.prod(sizes))
    dtype = complex if any(np.iscomplexobj(m) for m in matrices) else float
    out = np.zeros((total, total), dtype=dtype)
    for i, m in enumerate(matrices):
        pre = int(np.prod(sizes[:i])) if i else 1
        post = int(np.prod(sizes[i + 1:])) if i + 1 < len(matrices) else 1
        out += np.kron(np.kron(np.eye(pre), m), np.eye(post))
    return out


def _product_from_factors(factors, origin: str) -> FractionalLaplacian:
    alphas = {f.alpha for f in factors}
    if len(alphas) != 1:
        raise ValueError(f"factors must share one fractional order, got {sorted(alphas)}")
    assembled = _assemble_kron_sum([f.matrix() for f in factors])
    fact = svd_ascending(assembled)
    dims = tuple(d for f in factors for d in f.dims)
    return FractionalLaplacian(
        factorization=fact,
        alpha=factors[0].alpha,
        origin=origin,
        dims=dims,
        source=assembled,
        complex_flagged=any(f.complex_flagged for f in factors),
    )


def product_fractional_laplacian(
    f1: FractionalLaplacian, f2: FractionalLaplacian
) -> FractionalLaplacian:
    """Kronecker-sum assembly of two factor operators, freshly factorized."""
    return _product_from_factors([f1, f2], ORIGIN_BOX)


def m_product_fractional_laplacian(factors) -> FractionalLaplacian:
    """m-fold Kronecker-sum assembly, freshly factorized (m >= 2)."""
    factors = list(factors)
    if len(factors) < 2:
        raise ValueError(f"need at least two factors, got {len(factors)}")
    return _product_from_factors(factors, ORIGIN_M)


def hermitian_fractional(
    lq: HermitianLaplacian, alpha: float, allow_any_alpha: bool = False
) -> HermitianFractional:
    """Fractional basis of a Hermitian Laplacian.

    Eigendecomposes ``L_q = U_q diag(lambda) U_q*`` with ascending
    eigenvalues, pins each eigenvector's phase (largest-magnitude entry
    made real positive) and returns ``P_q = U_q**alpha`` together with the
    powered eigenvalues.  ``L_q`` must be positive semidefinite; tiny
    negative eigenvalues are clamped to zero.
    """
    alpha = check_alpha(alpha, allow_any=allow_any_alpha)
    lam, u = np.linalg.eigh(lq.matrix)
    if lam[0] < -1e-10:
        raise ValueError(
            f"Hermitian Laplacian is not positive semidefinite (min eigenvalue {lam[0]})"
        )
    lam = np.where(lam > 0.0, lam, 0.0)
    u = u * _pin_phases(u)
    if np.iscomplexobj(u) and np.abs(u.imag).max(initial=0.0) == 0.0:
        u = np.ascontiguousarray(u.real)

    if alpha == 1.0:
        return HermitianFractional(basis=u, values=lam, q=lq.q, alpha=alpha)
    basis, flagged = _principal_power(u, alpha)
    return HermitianFractional(
        basis=basis, values=lam**alpha, q=lq.q, alpha=alpha, complex_flagged=flagged
    )


# ---------------------------------------------------------------------------
# factorization interchange (CSV triple + JSON sidecar)
# ---------------------------------------------------------------------------

def save_factorization(fl: FractionalLaplacian, directory) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name, arr in (("P", fl.left), ("R", fl.values), ("Q", fl.right)):
        np.savetxt(directory / f"{name}.csv", np.atleast_2d(arr), delimiter=",", fmt="%.18e")
    meta = {
        "alpha": fl.alpha,
        "origin": fl.origin,
        "dims": list(fl.dims),
        "complex": bool(np.iscomplexobj(fl.left) or np.iscomplexobj(fl.right)),
        "complex_flagged": fl.complex_flagged,
        "sign_convention": SIGN_CONVENTION,
        "tolerances": {
            "orthonormal": ORTHONORMAL_TOL,
            "reconstruction_rtol": RECONSTRUCTION_RTOL,
        },
    }
    (directory / "factorization.json").write_text(json.dumps(meta, indent=2))


def load_factorization(directory) -> FractionalLaplacian:
    directory = Path(directory)
    meta = json.loads((directory / "factorization.json").read_text())
    dtype = complex if meta.get("complex") else float
    p = np.loadtxt(directory / "P.csv", delimiter=",", dtype=dtype, ndmin=2)
    r = np.loadtxt(directory / "R.csv", delimiter=",", dtype=float, ndmin=2).ravel()
    q = np.loadtxt(directory / "Q.csv", delimiter=",", dtype=dtype, ndmin=2)
    fact = SpectralFactorization(left=p, values=r, right=q)
    source = (p * r) @ q.conj().T
    return FractionalLaplacian(
        factorization=fact,
        alpha=float(meta["alpha"]),
        origin=meta["origin"],
        dims=tuple(meta["dims"]),
        source=source,
        complex_flagged=bool(meta["complex_flagged"]),
    )
