"""Hodge decomposition of edge flows and subspace projections.

Any edge signal splits uniquely as x = B1^T s0 + B2 s2 + harmonic remainder.
The potentials solve two decoupled least-squares problems (fit a vertex
potential to the flow, fit a triangle potential to the flow); taking the
minimum-norm solutions via pseudoinverse makes the answer canonical even on
disconnected graphs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .complexes import IncidencePair, LayerSignal, require_layer
from .errors import LayerMismatch
from .spectral import SPECTRAL_TOL, HodgeBasis


def pinv_psd(m: np.ndarray, tol: float = SPECTRAL_TOL) -> np.ndarray:
    """Pseudoinverse of a symmetric PSD matrix via eigendecomposition.

    Eigenvalues at or below tol * (largest eigenvalue) are treated as zero,
    the same cutoff the spectral classification uses, so the two modules
    agree on kernel dimensions.
    """
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        return m.copy()
    w, u = np.linalg.eigh(m)
    scale = float(w.max(initial=0.0))
    if scale <= 0:
        return np.zeros_like(m)
    inv = np.where(w > tol * scale, 1.0, 0.0)
    nonzero = w > tol * scale
    inv[nonzero] = 1.0 / w[nonzero]
    inv[~nonzero] = 0.0
    return (u * inv) @ u.T


@dataclass
class HodgeComponents:
    """The three orthogonal pieces of an edge flow plus their potentials."""

    s_irr: np.ndarray
    s_sol: np.ndarray
    s_harm: np.ndarray
    s0_hat: np.ndarray
    s2_hat: np.ndarray

    def energies(self) -> dict:
        return {
            "irr": float(self.s_irr @ self.s_irr),
            "sol": float(self.s_sol @ self.s_sol),
            "harm": float(self.s_harm @ self.s_harm),
        }


def decompose(ip: IncidencePair, x1: LayerSignal,
              tol: float = SPECTRAL_TOL) -> HodgeComponents:
    """Split an edge flow into irrotational, solenoidal and harmonic parts.

    s0_hat = (B1 B1^T)^+ B1 x is the minimum-norm vertex potential with
    B1^T s0_hat closest to x; s2_hat = (B2^T B2)^+ B2^T x likewise on
    triangles.  The harmonic part is the residual, so the three components
    always sum back to x.
    """
    x = require_layer(x1, 1, ip)
    b1 = ip.b1.astype(float)
    b2 = ip.b2.astype(float)
    s0_hat = pinv_psd(b1 @ b1.T, tol) @ (b1 @ x)
    s2_hat = pinv_psd(b2.T @ b2, tol) @ (b2.T @ x)
    s_irr = b1.T @ s0_hat
    s_sol = b2 @ s2_hat
    return HodgeComponents(
        s_irr=s_irr, s_sol=s_sol, s_harm=x - s_irr - s_sol,
        s0_hat=s0_hat, s2_hat=s2_hat)


_COMPLEMENTS = {"not_irr": "irr", "not_sol": "sol"}


def project_component(basis: HodgeBasis, x1: LayerSignal, which: str) -> LayerSignal:
    """Orthogonal projection of an edge flow onto one Hodge subspace.

    `which` is one of "irr", "sol", "harm", or the complements "not_irr" /
    "not_sol" (e.g. suppressing circulation to expose divergence sources).
    """
    if x1.layer != 1:
        raise LayerMismatch(f"expected a layer-1 signal, got layer {x1.layer}")
    n = basis.layer_size(1)
    if x1.values.shape[0] != n:
        raise LayerMismatch(f"signal has length {x1.values.shape[0]}, basis has {n}")
    complement = which in _COMPLEMENTS
    name = _COMPLEMENTS.get(which, which)
    blocks = {"irr": basis.u_irr, "sol": basis.u_sol, "harm": basis.u_harm}
    if name not in blocks:
        raise ValueError(f"unknown subspace {which!r}")
    u = blocks[name]
    y = u @ (u.T @ x1.values)
    return LayerSignal(1, x1.values - y if complement else y)
