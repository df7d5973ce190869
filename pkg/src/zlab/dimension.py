"""Hausdorff dimension of the limit set of continued fractions with
partial quotients restricted to a finite alphabet.

The dimension is the root of lambda(s) = 1, where lambda(s) is the leading
eigenvalue of the weighted transfer operator

    (L_s f)(x) = sum_{d in alphabet} (d + x)^(-2s) f(1/(d + x)),   x in [0,1].

The operator improves analyticity, so polynomial collocation at Chebyshev
nodes converges spectrally; no rigorous certification is attempted, the
residual and mesh-convergence drift are reported instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cfcore import Alphabet
from .errors import InputError

__all__ = ["DimensionEstimate", "transfer_eigenvalue", "hausdorff_dimension"]

DEFAULT_MESH = 32
MAX_MESH = 256
S_FLOOR = 1e-4  # below this the dimension is reported as 0


@dataclass(frozen=True)
class DimensionEstimate:
    alphabet: Alphabet
    delta: float
    residual: float
    mesh_size: int
    tolerance: float
    drift: float  # |delta(mesh) - delta(mesh/2)| at the accepted mesh

    @property
    def gamma(self) -> float:
        """The co-dimension 1 - delta."""
        return 1.0 - self.delta


def _cheb_nodes(m: int):
    """Chebyshev-Lobatto nodes mapped to [0,1], plus barycentric weights."""
    k = np.arange(m)
    x = 0.5 * (1.0 + np.cos(np.pi * k / (m - 1)))
    w = np.where(k % 2 == 0, 1.0, -1.0)
    w[0] *= 0.5
    w[-1] *= 0.5
    return x, w


def _lagrange_eval_matrix(nodes, weights, points):
    """Rows: values of all Lagrange basis polynomials at each point."""
    diff = points[:, None] - nodes[None, :]
    exact = np.isclose(diff, 0.0, atol=1e-15)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = weights[None, :] / diff
        basis = terms / terms.sum(axis=1, keepdims=True)
    hit_rows = exact.any(axis=1)
    if hit_rows.any():
        basis[hit_rows] = exact[hit_rows].astype(float)
    return basis


def _collocation_matrix(letters, s: float, m: int):
    nodes, weights = _cheb_nodes(m)
    mat = np.zeros((m, m))
    for d in letters:
        shifted = d + nodes
        mapped = 1.0 / shifted
        mat += shifted[:, None] ** (-2.0 * s) * _lagrange_eval_matrix(nodes, weights, mapped)
    return mat


def transfer_eigenvalue(alphabet: Alphabet, s: float, mesh_size: int = DEFAULT_MESH) -> float:
    """Leading eigenvalue lambda(s) of the discretized transfer operator.

    lambda is positive and strictly decreasing in s on (0, 1].
    """
    if not 0.0 < s <= 1.0:
        raise InputError("s must lie in (0, 1]")
    if mesh_size < 8:
        raise InputError("mesh_size must be >= 8")
    mat = _collocation_matrix(alphabet.letters, s, int(mesh_size))
    ev = np.linalg.eigvals(mat)
    if not np.isfinite(ev).all():
        raise InputError("eigensolver failed: non-finite spectrum")
    lead = ev[np.argmax(np.abs(ev))]
    return float(lead.real)


def _solve_at_mesh(alphabet, mesh, tolerance):
    """Root of lambda(s) = 1 at fixed mesh: bisection then secant polish."""

    def f(s):
        return transfer_eigenvalue(alphabet, s, mesh) - 1.0

    lo, hi = S_FLOOR, 1.0
    flo, fhi = f(lo), f(hi)
    if flo <= 0.0:
        # Limit set too thin to resolve (e.g. one-letter alphabets).
        return 0.0, abs(flo)
    if fhi >= 0.0:
        raise InputError("degenerate alphabet or mesh too coarse: no sign change on (0,1]")
    # bisect to a coarse width, then polish
    target = max(10.0 * tolerance, 1e-14)
    while hi - lo > target:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm > 0.0:
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    a, b, fa, fb = lo, hi, flo, fhi
    for _ in range(8):
        if fb == fa:
            break
        c = b - fb * (b - a) / (fb - fa)
        if not (S_FLOOR <= c <= 1.0):
            break
        fc = f(c)
        a, fa, b, fb = b, fb, c, fc
        if abs(fc) < 1e-15:
            break
    return b, abs(fb)


def hausdorff_dimension(
    alphabet: Alphabet,
    tolerance: float = 1e-8,
    mesh0: int = DEFAULT_MESH,
    mesh_max: int = MAX_MESH,
) -> DimensionEstimate:
    """Estimate delta by refining the collocation mesh until two successive
    doublings move the root by less than tolerance/2."""
    if tolerance <= 0:
        raise InputError("tolerance must be positive")
    mesh = mesh0
    delta, residual = _solve_at_mesh(alphabet, mesh, tolerance)
    drift = np.inf
    while mesh < mesh_max:
        mesh2 = mesh * 2
        delta2, residual2 = _solve_at_mesh(alphabet, mesh2, tolerance)
        drift = abs(delta2 - delta)
        delta, residual, mesh = delta2, residual2, mesh2
        if drift < tolerance / 2:
            break
    return DimensionEstimate(
        alphabet=alphabet,
        delta=float(delta),
        residual=float(residual),
        mesh_size=mesh,
        tolerance=tolerance,
        drift=float(drift),
    )
