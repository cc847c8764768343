"""Combinatorial 2-complexes and their boundary matrices.

A 2-complex is a vertex count plus oriented edge and triangle lists that are
closed under taking faces.  Every simplex is oriented by increasing vertex
index: an edge is a pair (i, j) with i < j, a triangle a triple (i, j, k)
with i < j < k.  Vertex indices are 0-based everywhere in this package.

The boundary of an oriented triangle [i, j, k] is [j, k] - [i, k] + [i, j],
which fixes the signs of the incidence matrix B2; B1 holds -1 at the tail
and +1 at the head of each edge.  With these conventions B1 @ B2 = 0 holds
in exact integer arithmetic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ClosureViolation, InvalidComplex, LayerMismatch

# Relative singular-value cutoff below which a direction counts as null.
RANK_TOL = 1e-10


@dataclass
class SimplicialComplex2:
    """A simplicial complex of order 2.

    Parameters
    ----------
    num_vertices : int
        Number of vertices V; vertex labels are 0 .. V-1.
    edges : sequence of (i, j)
        Oriented edges with i < j.  Order fixes the columns of B1.
    triangles : sequence of (i, j, k)
        Oriented filled triangles with i < j < k.  Order fixes the
        columns of B2.  Every pair-face must appear in `edges`.
    """

    num_vertices: int
    edges: tuple = ()
    triangles: tuple = ()

    def __post_init__(self):
        if not isinstance(self.num_vertices, int) or self.num_vertices <= 0:
            raise InvalidComplex(
                f"num_vertices must be a positive integer, got {self.num_vertices!r}")
        self.edges = tuple(tuple(int(v) for v in e) for e in self.edges)
        self.triangles = tuple(tuple(int(v) for v in t) for t in self.triangles)

        seen = set()
        for e in self.edges:
            if len(e) != 2 or not e[0] < e[1]:
                raise InvalidComplex(f"edge {e} is not an increasing pair")
            if not (0 <= e[0] and e[1] < self.num_vertices):
                raise InvalidComplex(f"edge {e} has a vertex outside [0, {self.num_vertices})")
            if e in seen:
                raise InvalidComplex(f"duplicate edge {e}")
            seen.add(e)

        edge_set = seen
        seen = set()
        for t in self.triangles:
            if len(t) != 3 or not (t[0] < t[1] < t[2]):
                raise InvalidComplex(f"triangle {t} is not an increasing triple")
            if not (0 <= t[0] and t[2] < self.num_vertices):
                raise InvalidComplex(f"triangle {t} has a vertex outside [0, {self.num_vertices})")
            if t in seen:
                raise InvalidComplex(f"duplicate triangle {t}")
            seen.add(t)
            i, j, k = t
            for face in ((j, k), (i, k), (i, j)):
                if face not in edge_set:
                    raise ClosureViolation(
                        f"triangle {t} needs edge {face}, which is not in the edge list")

    @property
    def num_edges(self):
        return len(self.edges)

    @property
    def num_triangles(self):
        return len(self.triangles)


@dataclass
class IncidencePair:
    """Signed incidence matrices B1 (V x E) and B2 (E x T), integer valued."""

    b1: np.ndarray
    b2: np.ndarray

    @property
    def num_vertices(self):
        return self.b1.shape[0]

    @property
    def num_edges(self):
        return self.b1.shape[1]

    @property
    def num_triangles(self):
        return self.b2.shape[1]


@dataclass
class LayerSignal:
    """A real signal living on one layer: 0 = vertices, 1 = edges, 2 = triangles."""

    layer: int
    values: np.ndarray

    def __post_init__(self):
        if self.layer not in (0, 1, 2):
            raise LayerMismatch(f"layer must be 0, 1 or 2, got {self.layer!r}")
        self.values = np.array(self.values, dtype=float).reshape(-1)


def layer_size(ip: IncidencePair, layer: int) -> int:
    return (ip.num_vertices, ip.num_edges, ip.num_triangles)[layer]


def require_layer(sig: LayerSignal, layer: int, ip: IncidencePair) -> np.ndarray:
    """Check a signal's layer tag and length against the complex; return values."""
    if sig.layer != layer:
        raise LayerMismatch(f"expected a layer-{layer} signal, got layer {sig.layer}")
    n = layer_size(ip, layer)
    if sig.values.shape[0] != n:
        raise LayerMismatch(
            f"layer-{layer} signal has length {sig.values.shape[0]}, complex has {n}")
    return sig.values


def build_incidence(c: SimplicialComplex2) -> IncidencePair:
    """Build the oriented incidence matrices of a 2-complex.

    The B1 column of edge (i, j) holds -1 at row i and +1 at row j.  The B2
    column of triangle (i, j, k) holds +1 on edge (j, k), -1 on edge (i, k)
    and +1 on edge (i, j).

    Returns
    -------
    IncidencePair
        Integer matrices with B1 @ B2 = 0 exactly.
    """
    V, E, T = c.num_vertices, c.num_edges, c.num_triangles
    b1 = np.zeros((V, E), dtype=np.int64)
    for col, (i, j) in enumerate(c.edges):
        b1[i, col] = -1
        b1[j, col] = 1

    col_of = {e: m for m, e in enumerate(c.edges)}
    b2 = np.zeros((E, T), dtype=np.int64)
    for col, (i, j, k) in enumerate(c.triangles):
        for face, sign in (((j, k), 1), ((i, k), -1), ((i, j), 1)):
            m = col_of.get(face)
            if m is None:
                raise ClosureViolation(
                    f"triangle {(i, j, k)} needs edge {face}, which is not in the edge list")
            b2[m, col] = sign
    return IncidencePair(b1, b2)


def enumerate_3cliques(c: SimplicialComplex2) -> list:
    """All vertex triples whose three pair-edges exist, sorted lexicographically.

    These are the candidate (possibly unfilled) triangles.  The count equals
    trace(A^3)/6 for the 0/1 adjacency matrix A.
    """
    above = [set() for _ in range(c.num_vertices)]
    for i, j in c.edges:
        above[i].add(j)
    cliques = []
    for i, j in c.edges:
        for k in above[i] & above[j]:
            cliques.append((i, j, k))
    cliques.sort()
    return cliques


def numeric_rank(a: np.ndarray, tol: float = RANK_TOL) -> int:
    """Rank by SVD with a relative singular-value cutoff."""
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def integer_rank(a: np.ndarray) -> int:
    """Exact rank of an integer matrix by Gaussian elimination over rationals.

    Slower than the SVD route but exempt from floating-point tolerance
    questions; intended as the reference answer for incidence matrices.
    """
    a = np.asarray(a)
    m, n = a.shape if a.ndim == 2 else (0, 0)
    if m == 0 or n == 0:
        return 0
    rows = [[Fraction(int(x)) for x in row] for row in a]
    rank = 0
    for col in range(n):
        piv = next((r for r in range(rank, m) if rows[r][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        lead = rows[rank]
        for r in range(rank + 1, m):
            if rows[r][col] != 0:
                f = rows[r][col] / lead[col]
                rows[r] = [x - f * y for x, y in zip(rows[r], lead)]
        rank += 1
        if rank == m:
            break
    return rank


def betti_numbers(ip: IncidencePair) -> tuple:
    """Betti numbers (b0, b1, b2) of the complex.

    b0 counts connected components, b1 independent 1-cycles not bounding a
    filled region, b2 enclosed cavities (always 0 for planar-style inputs).
    """
    V, E, T = ip.num_vertices, ip.num_edges, ip.num_triangles
    r1 = numeric_rank(ip.b1)
    r2 = numeric_rank(ip.b2)
    return (V - r1, E - r1 - r2, T - r2)


def connected_components(c: SimplicialComplex2) -> int:
    """Number of connected components by union-find over the edge list."""
    parent = list(range(c.num_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in c.edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
    return sum(1 for v in range(c.num_vertices) if find(v) == v)


# ---------------------------------------------------------------------------
# JSON interchange: {"num_vertices": V, "edges": [[i,j],...], "triangles": [...]}

def complex_from_dict(d: dict) -> SimplicialComplex2:
    if "num_vertices" not in d:
        raise InvalidComplex("missing field 'num_vertices'")
    if "edges" not in d:
        raise InvalidComplex("missing field 'edges'")
    if not isinstance(d["num_vertices"], int):
        raise InvalidComplex(f"field 'num_vertices' must be an integer, got {d['num_vertices']!r}")
    return SimplicialComplex2(
        num_vertices=d["num_vertices"],
        edges=tuple(tuple(e) for e in d["edges"]),
        triangles=tuple(tuple(t) for t in d.get("triangles", ())),
    )


def complex_to_dict(c: SimplicialComplex2) -> dict:
    return {
        "num_vertices": c.num_vertices,
        "edges": [list(e) for e in c.edges],
        "triangles": [list(t) for t in c.triangles],
    }


def load_complex(path) -> SimplicialComplex2:
    with open(path) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidComplex(f"{path}: not valid JSON ({exc})") from exc
    return complex_from_dict(d)


def save_complex(c: SimplicialComplex2, path) -> None:
    with open(path, "w") as fh:
        json.dump(complex_to_dict(c), fh, indent=1)
        fh.write("\n")
