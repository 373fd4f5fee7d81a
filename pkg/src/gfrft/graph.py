"""Directed graphs, their Laplacians, Cartesian-product assembly, and
geodesic k-nearest-neighbour graph construction.

Conventions used throughout:

* adjacency entry ``(m, n)`` is the weight of the directed edge ``m -> n``;
* degrees are out-degrees (row sums), so every Laplacian has zero row sums
  and ``L @ 1 == 0``;
* all matrices are dense float arrays.

Values are immutable after construction; every routine is a pure function
of its inputs plus an explicit seed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .validation import as_square_matrix, check_finite

EARTH_RADIUS_KM = 6371.0

#: half-width of the uniform edge-weight perturbation u(i, j)
DEFAULT_PERTURBATION = 0.2

WEIGHT_SCHEMES = ("w1", "w2", "w3")


@dataclass(frozen=True)
class DirectedGraph:
    """Weighted directed graph held as a dense adjacency matrix."""

    adjacency: np.ndarray

    def __post_init__(self):
        adj = as_square_matrix(self.adjacency, "adjacency")
        if adj.shape[0] < 1:
            raise ValueError("graph needs at least one vertex")
        if np.any(np.diag(adj) != 0.0):
            raise ValueError("self-loops are not supported (nonzero diagonal)")
        if np.any(adj < 0.0):
            raise ValueError("negative edge weights are not supported")
        object.__setattr__(self, "adjacency", adj)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    def is_undirected(self, tol: float = 0.0) -> bool:
        return bool(np.abs(self.adjacency - self.adjacency.T).max(initial=0.0) <= tol)


@dataclass(frozen=True)
class HermitianLaplacian:
    """Complex Hermitian Laplacian of a directed graph with phase parameter q."""

    matrix: np.ndarray
    q: float = 0.5

    def __post_init__(self):
        mat = as_square_matrix(self.matrix, "matrix", allow_complex=True)
        if np.abs(mat - mat.conj().T).max(initial=0.0) > 1e-12:
            raise ValueError("matrix is not Hermitian within 1e-12")
        object.__setattr__(self, "matrix", mat)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class StationTable:
    """Station identifiers and their latitude/longitude in degrees."""

    ids: tuple
    coords: np.ndarray  # (n, 2) rows of (lat, lon)

    def __post_init__(self):
        ids = tuple(str(s) for s in self.ids)
        if len(set(ids)) != len(ids):
            raise ValueError("station ids must be unique")
        coords = check_finite(np.asarray(self.coords, dtype=float), "coords")
        if coords.shape != (len(ids), 2):
            raise ValueError(f"coords must have shape ({len(ids)}, 2), got {coords.shape}")
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "coords", coords)

    @property
    def n(self) -> int:
        return len(self.ids)

    def index_of(self, station_id: str) -> int:
        try:
            return self.ids.index(str(station_id))
        except ValueError:
            raise ValueError(f"unknown station id {station_id!r}") from None


def directed_line_graph(n: int, weight: float = 1.0) -> DirectedGraph:
    """Unweighted (or uniformly weighted) directed path 0 -> 1 -> ... -> n-1."""
    if n < 1:
        raise ValueError("n must be positive")
    adj = np.zeros((n, n))
    idx = np.arange(n - 1)
    adj[idx, idx + 1] = weight
    return DirectedGraph(adj)


def laplacian(g: DirectedGraph) -> np.ndarray:
    """Out-degree Laplacian ``L = D - A``; rows sum to zero."""
    adj = g.adjacency
    return np.diag(adj.sum(axis=1)) - adj


def kronecker_sum(m1, m2) -> np.ndarray:
    """``M1 (+) M2 = M1 x I + I x M2`` for square matrices."""
    m1 = np.asarray(m1)
    m2 = np.asarray(m2)
    if m1.ndim != 2 or m1.shape[0] != m1.shape[1]:
        raise ValueError(f"first operand must be square, got shape {m1.shape}")
    if m2.ndim != 2 or m2.shape[0] != m2.shape[1]:
        raise ValueError(f"second operand must be square, got shape {m2.shape}")
    n1, n2 = m1.shape[0], m2.shape[0]
    return np.kron(m1, np.eye(n2)) + np.kron(np.eye(n1), m2)


def product_adjacency(g1: DirectedGraph, g2: DirectedGraph) -> np.ndarray:
    """Adjacency of the Cartesian product graph of two directed graphs."""
    return kronecker_sum(g1.adjacency, g2.adjacency)


def symmetrized_adjacency(g: DirectedGraph) -> np.ndarray:
    """Direction-blind adjacency with entries ``(a_mn + a_nm) / 2``."""
    adj = g.adjacency
    return 0.5 * (adj + adj.T)


def hermitian_laplacian(g: DirectedGraph, q: float = 0.5) -> HermitianLaplacian:
    """Magnetic-style Hermitian Laplacian ``L_q = D_s - Gamma_q . A_s``.

    ``A_s`` is the symmetrized adjacency, ``D_s`` its degree diagonal and
    ``Gamma_q`` carries unit-modulus phases ``exp(i 2 pi q (a_mn - a_nm))``
    that encode edge direction.  The result is Hermitian and positive
    semidefinite for every real q; q = 0 (or an undirected graph) recovers
    the real symmetric Laplacian of the symmetrized graph.
    """
    adj = g.adjacency
    a_sym = 0.5 * (adj + adj.T)
    phase = np.exp(1j * 2.0 * np.pi * float(q) * (adj - adj.T))
    herm_adj = phase * a_sym
    mat = np.diag(a_sym.sum(axis=1)).astype(complex) - herm_adj
    # enforce exact Hermitian symmetry against rounding in the phases
    mat = 0.5 * (mat + mat.conj().T)
    if np.abs(mat.imag).max(initial=0.0) == 0.0:
        mat = mat.real
    return HermitianLaplacian(matrix=mat, q=float(q))


def haversine_km(lat1, lon1, lat2, lon2) -> np.ndarray:
    """Great-circle distance in km between points given in degrees."""
    lat1, lon1, lat2, lon2 = map(np.radians, (lat1, lon1, lat2, lon2))
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    a = np.sin(dlat / 2.0) ** 2 + np.cos(lat1) * np.cos(lat2) * np.sin(dlon / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(a))


def _pairwise_distances(st: StationTable) -> np.ndarray:
    lat = st.coords[:, 0][:, None]
    lon = st.coords[:, 1][:, None]
    return haversine_km(lat, lon, lat.T, lon.T)


def knn_graph(
    st: StationTable,
    k: int,
    scheme: str = "w1",
    signals: np.ndarray | None = None,
    seed: int = 0,
    perturbation: float = DEFAULT_PERTURBATION,
) -> DirectedGraph:
    """Directed k-nearest-neighbour station graph.

    For every station ``i`` the k geodesically nearest stations ``j`` each
    contribute a directed edge ``j -> i``.  Edge weights follow one of three
    schemes:

    * ``w1``: ``1 + u(i, j)``
    * ``w2``: ``max(|corr(x_i, x_j)| + u(i, j), 0)``
    * ``w3``: ``max(|mean(x_i) - mean(x_j)| + u(i, j), 0)``

    where ``u(i, j)`` are i.i.d. uniform on ``[-perturbation, perturbation]``
    from the seeded generator, drawn with ``i`` outer and the selected
    neighbours ``j`` inner (nearest first) so graphs are bit-reproducible.
    ``signals`` (one row per station) is required for w2/w3.  Weights of
    exactly zero keep their edge; they simply vanish in the Laplacian.

    Setting ``perturbation=0`` gives the deterministic zero-perturbation
    variant used for smoke checks.
    """
    n = st.n
    k = int(k)
    if not 1 <= k < n:
        raise ValueError(f"k must satisfy 1 <= k < {n}, got {k}")
    if scheme not in WEIGHT_SCHEMES:
        raise ValueError(f"unknown weight scheme {scheme!r}; expected one of {WEIGHT_SCHEMES}")
    if scheme in ("w2", "w3"):
        if signals is None:
            raise ValueError(f"scheme {scheme!r} requires per-station signals")
        signals = check_finite(np.asarray(signals, dtype=float), "signals")
        if signals.ndim != 2 or signals.shape[0] != n:
            raise ValueError(f"signals must have shape ({n}, T), got {signals.shape}")

    if scheme == "w2":
        sd = signals.std(axis=1)
        if np.any(sd == 0.0):
            raise ValueError("w2 needs non-constant station signals (zero standard deviation)")
        centered = signals - signals.mean(axis=1, keepdims=True)
        corr = (centered @ centered.T) / signals.shape[1]
        corr /= np.outer(sd, sd)
    elif scheme == "w3":
        means = signals.mean(axis=1)

    dist = _pairwise_distances(st)
    rng = np.random.default_rng(seed)
    adj = np.zeros((n, n))
    for i in range(n):
        candidates = [j for j in range(n) if j != i]
        candidates.sort(key=lambda j: (dist[i, j], j))
        for j in candidates[:k]:
            u = rng.uniform(-perturbation, perturbation) if perturbation > 0.0 else 0.0
            if scheme == "w1":
                w = 1.0 + u
            elif scheme == "w2":
                w = max(abs(corr[i, j]) + u, 0.0)
            else:
                w = max(abs(means[i] - means[j]) + u, 0.0)
            adj[j, i] = w
    return DirectedGraph(adj)


# ---------------------------------------------------------------------------
# CSV interchange
# ---------------------------------------------------------------------------

def save_stations(st: StationTable, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "lat", "lon"])
        for sid, (lat, lon) in zip(st.ids, st.coords):
            writer.writerow([sid, f"{lat:.17g}", f"{lon:.17g}"])


def load_stations(path) -> StationTable:
    ids = []
    coords = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["id", "lat", "lon"]:
            raise ValueError(f"{path}: expected header 'id,lat,lon', got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ValueError(f"{path}: line {lineno}: expected 3 fields, got {len(row)}")
            try:
                ids.append(row[0])
                coords.append((float(row[1]), float(row[2])))
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: malformed coordinates {row[1:]}") from None
    if not ids:
        raise ValueError(f"{path}: no stations found")
    return StationTable(ids=tuple(ids), coords=np.array(coords))


def save_edge_list(g: DirectedGraph, path) -> None:
    """Edge-list CSV prefixed by a single ``n=<count>`` header line."""
    with open(path, "w", newline="") as fh:
        fh.write(f"n={g.n}\n")
        writer = csv.writer(fh)
        writer.writerow(["src", "dst", "weight"])
        src, dst = np.nonzero(g.adjacency)
        for s, d in zip(src, dst):
            writer.writerow([int(s), int(d), f"{g.adjacency[s, d]:.17g}"])


def load_edge_list(path) -> DirectedGraph:
    with open(path, newline="") as fh:
        first = fh.readline().strip()
        if not first.startswith("n="):
            raise ValueError(f"{path}: expected 'n=<count>' header, got {first!r}")
        try:
            n = int(first[2:])
        except ValueError:
            raise ValueError(f"{path}: malformed vertex count {first!r}") from None
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["src", "dst", "weight"]:
            raise ValueError(f"{path}: expected header 'src,dst,weight', got {header}")
        adj = np.zeros((n, n))
        for lineno, row in enumerate(reader, start=3):
            if not row:
                continue
            if len(row) != 3:
                raise ValueError(f"{path}: line {lineno}: expected 3 fields, got {len(row)}")
            try:
                s, d, w = int(row[0]), int(row[1]), float(row[2])
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: malformed edge {row}") from None
            if not (0 <= s < n and 0 <= d < n):
                raise ValueError(f"{path}: line {lineno}: vertex out of range")
            adj[s, d] = w
    return DirectedGraph(adj)
