"""Sampling and recovery of bandlimited signals on a 2-complex.

A layer signal is F-bandlimited when its Fourier transform is supported on a
frequency index set F; it can be recovered from samples on a simplex set S
exactly when no F-bandlimited signal hides entirely outside S, i.e. when
||(I - D_S) F_F||_2 < 1.  Single-layer recovery inverts the Gram matrix of
the sampled eigenvector rows; the multi-layer recoveries chain per-layer
inverses through block operators that peel the gradient (and curl)
contributions off the edge samples.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .complexes import IncidencePair, LayerSignal
from .errors import BudgetTooSmall, NotRecoverable, SingularSystem
from .spectral import HodgeBasis, orthonormal_image_basis

# Refuse to invert when the localization norm is within this margin of 1;
# the inverse exists in exact arithmetic but is numerically meaningless.
RECOVERY_MARGIN = 1e-6
# Condition number beyond which recovery results carry a warning.
COND_WARN = 1e12

_LAYER_NAMES = {0: "vertex", 1: "edge", 2: "triangle"}


@dataclass
class BandModel:
    """Frequency index sets per layer, against HodgeBasis column order."""

    f0: tuple = ()
    f1: tuple = ()
    f2: tuple = ()

    def __post_init__(self):
        self.f0 = _clean_indices(self.f0, "F0")
        self.f1 = _clean_indices(self.f1, "F1")
        self.f2 = _clean_indices(self.f2, "F2")

    def frequencies(self, layer: int) -> tuple:
        return (self.f0, self.f1, self.f2)[layer]


@dataclass
class SampleSet:
    """Sorted indices of the sampled simplices on one layer."""

    layer: int
    indices: tuple = ()

    def __post_init__(self):
        self.indices = tuple(sorted(_clean_indices(self.indices, "sample set")))

    def __len__(self):
        return len(self.indices)


def _clean_indices(idx, what):
    out = tuple(int(i) for i in idx)
    if any(i < 0 for i in out):
        raise ValueError(f"{what} contains a negative index")
    if len(set(out)) != len(out):
        raise ValueError(f"{what} contains duplicate indices")
    return out


def _check_range(idx, n, what):
    for i in idx:
        if i >= n:
            raise ValueError(f"{what} index {i} out of range [0, {n})")


def _mask(n, indices):
    d = np.zeros(n)
    d[list(indices)] = 1.0
    return d


def _band_projector(basis: HodgeBasis, layer: int, freqs) -> np.ndarray:
    u = basis.eigenvectors(layer)[:, list(freqs)]
    return u @ u.T


def check_recoverable(basis: HodgeBasis, s: SampleSet, freqs) -> float:
    """Spectral norm of (I - D_S) F_F; sampling is invertible iff < 1."""
    freqs = _clean_indices(freqs, "frequency set")
    n = basis.layer_size(s.layer)
    _check_range(s.indices, n, "sample")
    _check_range(freqs, basis.eigenvectors(s.layer).shape[1], "frequency")
    if not freqs:
        return 0.0
    ff = _band_projector(basis, s.layer, freqs)
    complement = 1.0 - _mask(n, s.indices)
    return float(np.linalg.norm(complement[:, None] * ff, 2))


def recover_single_layer(basis: HodgeBasis, values, s: SampleSet, freqs) -> LayerSignal:
    """Recover an F-bandlimited layer signal from its samples on S.

    Computes U_F (U_F^T D_S U_F)^{-1} U_F^T s_S.  `values` holds the samples
    in the order of the sorted sample set.

    Raises
    ------
    NotRecoverable
        If |S| < |F| or the localization norm is at or beyond 1 - margin.
    SingularSystem
        If the Gram matrix is numerically singular anyway.
    """
    freqs = _clean_indices(freqs, "frequency set")
    values = np.asarray(values, dtype=float).reshape(-1)
    if values.shape[0] != len(s):
        raise ValueError(f"expected {len(s)} sample values, got {values.shape[0]}")
    norm = check_recoverable(basis, s, freqs)
    layer_name = _LAYER_NAMES[s.layer]
    if len(s) < len(freqs):
        raise NotRecoverable(
            f"{len(s)} samples cannot determine {len(freqs)} frequencies on the "
            f"{layer_name} layer (localization norm {norm:.6g})",
            norm=norm, layer=s.layer)
    if norm >= 1.0 - RECOVERY_MARGIN:
        raise NotRecoverable(
            f"bandlimited signals can hide outside the {layer_name} sample set: "
            f"localization norm {norm:.6g}", norm=norm, layer=s.layer)
    u_f = basis.eigenvectors(s.layer)[:, list(freqs)]
    rows = u_f[list(s.indices), :]
    gram = rows.T @ rows
    if gram.size:
        sv = np.linalg.svd(gram, compute_uv=False)
        if sv[0] == 0.0 or sv[-1] <= 1e-14 * sv[0]:
            raise SingularSystem(
                f"sampled Gram matrix is singular (smallest/largest singular "
                f"value {sv[-1]:.3g}/{sv[0]:.3g})")
    coeffs = np.linalg.solve(gram, rows.T @ values) if gram.size else np.zeros(0)
    return LayerSignal(s.layer, u_f @ coeffs)


def select_samples_greedy(basis: HodgeBasis, layer: int, freqs, budget: int) -> SampleSet:
    """Grow a sample set maximizing det(U_F^T D_S U_F), one simplex at a time.

    While the Gram matrix is rank deficient the determinant gain of a row is
    its squared residual against the span of the rows already chosen (the
    first pick is therefore the largest-leverage row); once full rank it is
    1 + u G^{-1} u^T.  Ties resolve to the lowest index.  The result is not
    guaranteed to pass check_recoverable; callers must re-check.
    """
    freqs = _clean_indices(freqs, "frequency set")
    n = basis.layer_size(layer)
    _check_range(freqs, basis.eigenvectors(layer).shape[1], "frequency")
    if budget < len(freqs):
        raise BudgetTooSmall(
            f"budget {budget} is below the bandwidth {len(freqs)}")
    if budget > n:
        raise ValueError(f"budget {budget} exceeds the layer size {n}")
    u = basis.eigenvectors(layer)[:, list(freqs)]
    f = u.shape[1]
    chosen: list = []
    q = np.zeros((f, 0))  # orthonormal basis of the chosen rows' span
    while len(chosen) < budget:
        rank = q.shape[1]
        if rank < f:
            resid = u - (u @ q) @ q.T
            scores = np.sum(resid ** 2, axis=1)
        else:
            rows = u[chosen, :]
            sol = np.linalg.solve(rows.T @ rows, u.T)
            scores = np.sum(u * sol.T, axis=1)
        scores[chosen] = -np.inf
        pick = int(np.argmax(scores))
        chosen.append(pick)
        if rank < f:
            vec = u[pick, :].copy()
            vec -= q @ (q.T @ vec)
            nrm = np.linalg.norm(vec)
            if nrm > 1e-12:
                q = np.hstack([q, (vec / nrm)[:, None]])
    return SampleSet(layer, chosen)


def lift_irr_basis(ip: IncidencePair, basis: HodgeBasis) -> np.ndarray:
    """Orthonormal gradient-subspace basis lifted from the vertex spectrum:
    normalized columns of B1^T U0 over the nonzero L0 eigenvalues."""
    q, _ = orthonormal_image_basis(ip.b1.T.astype(float), basis.evals0,
                                   basis.evecs0, basis.tol)
    return q


def lift_sol_basis(ip: IncidencePair, basis: HodgeBasis) -> np.ndarray:
    """Orthonormal curl-subspace basis lifted from the triangle spectrum:
    normalized columns of B2 U2 over the nonzero L2 eigenvalues."""
    q, _ = orthonormal_image_basis(ip.b2.astype(float), basis.evals2,
                                   basis.evecs2, basis.tol)
    return q


@dataclass
class TwoLayerRecovery:
    s0: np.ndarray
    s1_bar: np.ndarray  # solenoidal + harmonic part of the edge flow
    s1: np.ndarray
    metadata: dict = field(default_factory=dict)


@dataclass
class ThreeLayerRecovery:
    s0: np.ndarray
    s1_harm: np.ndarray
    s2: np.ndarray
    s1: np.ndarray
    metadata: dict = field(default_factory=dict)


def _layer_inverse_factor(basis, layer, freqs, sample_set, metadata, tag):
    """Shared setup for one block: the matrix I - (I - D_S) F_F, its norm
    check, and the zero-padded sample vector slot."""
    n = basis.layer_size(layer)
    _check_range(sample_set.indices, n, "sample")
    norm = check_recoverable(basis, sample_set, freqs)
    metadata[f"norm_{tag}"] = norm
    if norm >= 1.0 - RECOVERY_MARGIN:
        raise NotRecoverable(
            f"{tag}-layer condition failed: ||(I - D)F|| = {norm:.6g}",
            norm=norm, layer=layer)
    ff = _band_projector(basis, layer, freqs)
    d = _mask(n, sample_set.indices)
    m = np.eye(n) - (1.0 - d)[:, None] * ff
    cond = float(np.linalg.cond(m)) if n else 1.0
    metadata[f"cond_{tag}"] = cond
    if cond > COND_WARN:
        metadata.setdefault("warnings", []).append(
            f"{tag}-layer system condition number {cond:.3g} exceeds {COND_WARN:.0e}")
    return m, d, ff


def _pad(values, sample_set, n, what):
    values = np.asarray(values, dtype=float).reshape(-1)
    if values.shape[0] != len(sample_set):
        raise ValueError(f"expected {len(sample_set)} {what} samples, got {values.shape[0]}")
    out = np.zeros(n)
    out[list(sample_set.indices)] = values
    return out


def recover_two_layer(ip: IncidencePair, basis: HodgeBasis,
                      s0_values, a: SampleSet, s1_values, s: SampleSet,
                      f0, f_sh=None) -> TwoLayerRecovery:
    """Jointly recover a vertex signal and an edge flow from samples of both.

    The edge flow is modeled as s1 = B1^T s0 + s1_bar with s0 F0-bandlimited
    and s1_bar bandlimited on the solenoidal + harmonic frequencies F_sH
    (taken from the basis classification when not given).  Solves the block
    system: the vertex samples determine s0 alone, then the gradient's trace
    on the sampled edges is subtracted before inverting the edge block.
    """
    if a.layer != 0 or s.layer != 1:
        raise ValueError("sample sets must live on layers 0 and 1")
    if f_sh is None:
        f_sh = tuple(sorted(set(basis.sol_idx) | set(basis.harm_idx)))
    f0 = _clean_indices(f0, "F0")
    f_sh = _clean_indices(f_sh, "F_sH")
    meta: dict = {}
    m_a, _, f0_proj = _layer_inverse_factor(basis, 0, f0, a, meta, "vertex")
    m_s, d_s, _ = _layer_inverse_factor(basis, 1, f_sh, s, meta, "edge")

    b1t = ip.b1.T.astype(float)
    s0_a = _pad(s0_values, a, ip.num_vertices, "vertex")
    s1_s = _pad(s1_values, s, ip.num_edges, "edge")
    s0 = np.linalg.solve(m_a, s0_a)
    gradient_on_samples = d_s * (b1t @ (f0_proj @ s0))
    s1_bar = np.linalg.solve(m_s, s1_s - gradient_on_samples)
    return TwoLayerRecovery(s0=s0, s1_bar=s1_bar, s1=s1_bar + b1t @ s0,
                            metadata=meta)


def recover_three_layer(ip: IncidencePair, basis: HodgeBasis,
                        s0_values, a: SampleSet, s1_values, s: SampleSet,
                        s2_values, m: SampleSet, f0, f2, f_h=None) -> ThreeLayerRecovery:
    """Recover (s0, harmonic edge part, s2) from samples on all three layers.

    Models s1 = B1^T s0 + s1_H + B2 s2 with s0, s2 bandlimited on F0, F2 and
    s1_H bandlimited on harmonic frequencies F_H (defaults to all of them).
    The outer layers are recovered independently; both of their contributions
    on the sampled edges are subtracted before inverting the harmonic block.
    """
    if a.layer != 0 or s.layer != 1 or m.layer != 2:
        raise ValueError("sample sets must live on layers 0, 1 and 2")
    if f_h is None:
        f_h = tuple(basis.harm_idx)
    f0 = _clean_indices(f0, "F0")
    f2 = _clean_indices(f2, "F2")
    f_h = _clean_indices(f_h, "F_H")
    meta: dict = {}
    m_a, _, f0_proj = _layer_inverse_factor(basis, 0, f0, a, meta, "vertex")
    m_s, d_s, _ = _layer_inverse_factor(basis, 1, f_h, s, meta, "edge")
    m_m, _, f2_proj = _layer_inverse_factor(basis, 2, f2, m, meta, "triangle")

    b1t = ip.b1.T.astype(float)
    b2 = ip.b2.astype(float)
    s0_a = _pad(s0_values, a, ip.num_vertices, "vertex")
    s1_s = _pad(s1_values, s, ip.num_edges, "edge")
    s2_m = _pad(s2_values, m, ip.num_triangles, "triangle")
    s0 = np.linalg.solve(m_a, s0_a)
    s2 = np.linalg.solve(m_m, s2_m)
    known = d_s * (b1t @ (f0_proj @ s0) + b2 @ (f2_proj @ s2))
    s1_harm = np.linalg.solve(m_s, s1_s - known)
    return ThreeLayerRecovery(s0=s0, s1_harm=s1_harm, s2=s2,
                              s1=b1t @ s0 + s1_harm + b2 @ s2, metadata=meta)
