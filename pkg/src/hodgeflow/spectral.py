"""Hodge Laplacians, their eigenstructure, and spectral operators on flows.

The edge Laplacian L1 = B1^T B1 + B2 B2^T splits edge-signal space into three
orthogonal pieces: gradients of vertex potentials (irrotational, img B1^T),
curls of triangle potentials (solenoidal, img B2), and the harmonic kernel of
L1.  `hodge_basis` eigendecomposes all three Laplacians and labels every L1
eigenvector with its subspace; everything else here (Fourier transforms,
curl/divergence/gradient, total-variation functionals) is a thin layer over
those matrices.

Dense linear algebra throughout: the intended problem sizes (a few hundred
edges) never warrant sparsity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .complexes import IncidencePair, LayerSignal, require_layer
from .errors import ClassificationAmbiguity, LayerMismatch

# Relative eigenvalue tolerance separating "zero" from "nonzero" frequencies.
SPECTRAL_TOL = 1e-8
# Entries smaller than this cannot anchor an eigenvector's sign.
SIGN_TOL = 1e-12


def laplacian(ip: IncidencePair, k: int) -> np.ndarray:
    """Combinatorial Hodge Laplacian of order k.

    L0 = B1 B1^T (the graph Laplacian), L1 = B1^T B1 + B2 B2^T,
    L2 = B2^T B2.  All are symmetric positive semidefinite.
    """
    b1 = ip.b1.astype(float)
    b2 = ip.b2.astype(float)
    if k == 0:
        return b1 @ b1.T
    if k == 1:
        return b1.T @ b1 + b2 @ b2.T
    if k == 2:
        return b2.T @ b2
    raise ValueError(f"k must be 0, 1 or 2, got {k!r}")


def _fix_signs(u: np.ndarray, tol: float = SIGN_TOL) -> np.ndarray:
    """Flip eigenvector columns so the first above-tolerance entry is positive."""
    u = u.copy()
    for col in range(u.shape[1]):
        nz = np.flatnonzero(np.abs(u[:, col]) > tol)
        if nz.size and u[nz[0], col] < 0:
            u[:, col] *= -1.0
    return u


def eigh_ascending(m: np.ndarray):
    """Symmetric eigendecomposition, eigenvalues ascending, signs normalized."""
    w, u = np.linalg.eigh(m)
    return w, _fix_signs(u)


def orthonormal_image_basis(mat: np.ndarray, evals: np.ndarray, evecs: np.ndarray,
                            tol: float) -> tuple:
    """Orthonormal basis of img(mat) lifted from an eigenbasis of mat^T mat
    (equivalently mat mat^T on the source side).

    For each eigenpair (lam, v) of the source Laplacian with lam above the
    cutoff, mat @ v has norm sqrt(lam) and the lifted columns are mutually
    orthogonal, so normalizing yields an orthonormal basis.  Returns the
    basis and the source eigenvalues of the kept columns.
    """
    scale = float(evals.max(initial=0.0))
    keep = evals > tol * scale if scale > 0 else np.zeros(evals.shape, dtype=bool)
    cols = mat @ evecs[:, keep]
    norms = np.linalg.norm(cols, axis=0)
    return cols / norms, evals[keep]


@dataclass
class HodgeBasis:
    """Eigenpairs of L0, L1, L2 plus the subspace partition of the L1 basis.

    irr_idx / sol_idx / harm_idx partition {0..E-1} (columns of evecs1,
    eigenvalue-ascending order).  u_irr, u_sol, u_harm are the corresponding
    column blocks spanning img(B1^T), img(B2) and ker(L1).
    """

    evals0: np.ndarray
    evecs0: np.ndarray
    evals1: np.ndarray
    evecs1: np.ndarray
    evals2: np.ndarray
    evecs2: np.ndarray
    irr_idx: np.ndarray
    sol_idx: np.ndarray
    harm_idx: np.ndarray
    u_irr: np.ndarray
    u_sol: np.ndarray
    u_harm: np.ndarray
    tol: float

    def eigenvalues(self, layer: int) -> np.ndarray:
        return (self.evals0, self.evals1, self.evals2)[layer]

    def eigenvectors(self, layer: int) -> np.ndarray:
        return (self.evecs0, self.evecs1, self.evecs2)[layer]

    def layer_size(self, layer: int) -> int:
        return self.eigenvectors(layer).shape[0]


def _rebuild_degenerate_cluster(cols: np.ndarray, q_irr: np.ndarray,
                                q_sol: np.ndarray) -> np.ndarray:
    """Re-orthogonalize a repeated-eigenvalue block against the explicit
    img(B1^T) and img(B2) bases.

    The block spans (cluster ∩ img B1^T) ⊕ (cluster ∩ img B2); projecting it
    onto either image and keeping the singular directions with singular value
    near 1 recovers clean per-subspace bases.  Gradient columns come first.
    """
    pieces = []
    for q in (q_irr, q_sol):
        if q.shape[1] == 0:
            continue
        proj = q @ (q.T @ cols)
        uu, ss, _ = np.linalg.svd(proj, full_matrices=False)
        pieces.append(uu[:, ss > 0.5])
    rebuilt = np.hstack(pieces) if pieces else np.zeros_like(cols)
    if rebuilt.shape[1] != cols.shape[1]:
        raise ClassificationAmbiguity(
            f"degenerate eigenvalue cluster of size {cols.shape[1]} split into "
            f"{rebuilt.shape[1]} subspace directions")
    return _fix_signs(rebuilt)


def hodge_basis(ip: IncidencePair, tol: float = SPECTRAL_TOL) -> HodgeBasis:
    """Eigendecompose L0, L1, L2 and classify the L1 eigenvectors.

    A unit L1 eigenvector v is solenoidal when ||B2^T v||^2 exceeds
    tol * max(eigenvalue), irrotational when ||B1 v||^2 does, harmonic when
    neither does.  An exact eigenvector can never trip both tests, but a
    dense eigensolver may mix degenerate eigenvectors across the two image
    subspaces when the same eigenvalue appears in both; such clusters are
    re-orthogonalized against explicitly lifted bases of img(B1^T) and
    img(B2) before classification.

    Parameters
    ----------
    ip : IncidencePair
    tol : float
        Relative zero tolerance, measured against the largest L1 eigenvalue.

    Raises
    ------
    ClassificationAmbiguity
        If any eigenvector still tests positive on both subspaces.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    b1 = ip.b1.astype(float)
    b2 = ip.b2.astype(float)
    evals0, evecs0 = eigh_ascending(laplacian(ip, 0))
    evals2, evecs2 = eigh_ascending(laplacian(ip, 2))
    evals1, evecs1 = eigh_ascending(laplacian(ip, 1))

    scale = float(evals1.max(initial=0.0))
    thresh = tol * scale if scale > 0 else tol

    def energies(u):
        return (np.sum((b1 @ u) ** 2, axis=0), np.sum((b2.T @ u) ** 2, axis=0))

    e_low, e_up = energies(evecs1)
    ambiguous = (e_low > thresh) & (e_up > thresh)
    if ambiguous.any():
        q_irr, _ = orthonormal_image_basis(b1.T, evals0, evecs0, tol)
        q_sol, _ = orthonormal_image_basis(b2, evals2, evecs2, tol)
        # Walk maximal runs of (numerically) equal eigenvalues.
        start = 0
        E = evals1.shape[0]
        while start < E:
            stop = start + 1
            while stop < E and evals1[stop] - evals1[stop - 1] <= thresh:
                stop += 1
            if ambiguous[start:stop].any():
                evecs1[:, start:stop] = _rebuild_degenerate_cluster(
                    evecs1[:, start:stop], q_irr, q_sol)
            start = stop
        e_low, e_up = energies(evecs1)
        ambiguous = (e_low > thresh) & (e_up > thresh)
        if ambiguous.any():
            j = int(np.flatnonzero(ambiguous)[0])
            raise ClassificationAmbiguity(
                f"eigenvector {j} (eigenvalue {evals1[j]:.6g}) has gradient energy "
                f"{e_low[j]:.3g} and curl energy {e_up[j]:.3g}, both above {thresh:.3g}")

    is_irr = e_low > thresh
    is_sol = e_up > thresh
    irr_idx = np.flatnonzero(is_irr & ~is_sol)
    sol_idx = np.flatnonzero(is_sol & ~is_irr)
    harm_idx = np.flatnonzero(~is_irr & ~is_sol)
    return HodgeBasis(
        evals0=evals0, evecs0=evecs0,
        evals1=evals1, evecs1=evecs1,
        evals2=evals2, evecs2=evecs2,
        irr_idx=irr_idx, sol_idx=sol_idx, harm_idx=harm_idx,
        u_irr=evecs1[:, irr_idx], u_sol=evecs1[:, sol_idx],
        u_harm=evecs1[:, harm_idx], tol=tol)


# ---------------------------------------------------------------------------
# Discrete vector calculus

def curl(ip: IncidencePair, s1: LayerSignal) -> LayerSignal:
    """Signed circulation of an edge flow around each filled triangle: B2^T s1."""
    x = require_layer(s1, 1, ip)
    return LayerSignal(2, ip.b2.T.astype(float) @ x)


def divergence(ip: IncidencePair, s1: LayerSignal) -> LayerSignal:
    """Net outflow of an edge flow at each vertex: B1 s1."""
    x = require_layer(s1, 1, ip)
    return LayerSignal(0, ip.b1.astype(float) @ x)


def gradient(ip: IncidencePair, s0: LayerSignal) -> LayerSignal:
    """Potential differences of a vertex signal along each edge: B1^T s0."""
    x = require_layer(s0, 0, ip)
    return LayerSignal(1, ip.b1.T.astype(float) @ x)


# ---------------------------------------------------------------------------
# Fourier transforms

def gft(basis: HodgeBasis, s: LayerSignal) -> np.ndarray:
    """Fourier coefficients of a layer signal: U_k^T s."""
    u = basis.eigenvectors(s.layer)
    if s.values.shape[0] != u.shape[0]:
        raise LayerMismatch(
            f"layer-{s.layer} signal has length {s.values.shape[0]}, basis has {u.shape[0]}")
    return u.T @ s.values


def inverse_gft(basis: HodgeBasis, coeffs: np.ndarray, layer: int) -> LayerSignal:
    u = basis.eigenvectors(layer)
    coeffs = np.asarray(coeffs, dtype=float).reshape(-1)
    if coeffs.shape[0] != u.shape[1]:
        raise LayerMismatch(
            f"expected {u.shape[1]} coefficients for layer {layer}, got {coeffs.shape[0]}")
    return LayerSignal(layer, u @ coeffs)


# ---------------------------------------------------------------------------
# Total variation

def lovasz_tv(ip: IncidencePair, x1: LayerSignal) -> float:
    """Sum of absolute triangle curls: the convex (Lovasz) extension of the
    triangle-cut set function evaluated at an arbitrary edge signal."""
    x = require_layer(x1, 1, ip)
    return float(np.abs(ip.b2.T.astype(float) @ x).sum())


def relaxed_tv(ip: IncidencePair, x1: LayerSignal) -> float:
    """Quadratic relaxation of the total variation: x^T B2 B2^T x."""
    x = require_layer(x1, 1, ip)
    y = ip.b2.T.astype(float) @ x
    return float(y @ y)
