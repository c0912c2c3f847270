"""Stellar representation of spin states and operator symmetry detection.

A spin-j state maps to 2j points on the unit sphere (its constellation)
through the roots of a degree-2j polynomial. Each rank-L part of an
operator transforms like a spin-L state, so it has a constellation too,
and every rotation that leaves the operator unchanged permutes the stars
of each constellation. The stars therefore pin down the candidate
symmetry axes that ``detect_point_group`` tests directly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .rotations import (
    IDENTITY,
    GroupClosureError,
    Rotation,
    generate_group,
    rotation_from_axis_angle,
)
from .spin_algebra import multipole_decompose
from .multispin import SpinEnsemble, as_ensemble, total_spin_ops
from .symmetrize import global_unitary

INFINITE_ROOT = 1e8
SYMMETRY_TOL = 1e-9
MAX_AXIS_ORDER = 12


@dataclass(frozen=True)
class Constellation:
    stars: np.ndarray  # shape (n, 3)

    def __len__(self) -> int:
        return len(self.stars)


def majorana_roots(state: Sequence[complex]) -> Constellation:
    """Constellation of a spin state given in the m = j..-j basis.

    Roots of ``p(z) = sum_m (-1)^(j-m) sqrt(C(2j, j-m)) c_m z^(j+m)`` are
    sent to the sphere with ``z = tan(theta/2) exp(i phi)``; missing or
    very large roots count as the south pole.
    """
    c = np.asarray(state, dtype=complex).ravel()
    if c.size < 1 or not np.any(np.abs(c) > 0):
        raise ValueError("state must be a nonzero vector")
    n = c.size - 1
    # coefficients from the highest power z^(2j) (m = j) downwards
    coeffs = np.array([(-1) ** i * math.sqrt(math.comb(n, i)) * c[i] for i in range(n + 1)])
    scale = np.abs(coeffs).max()
    lead = 0
    while lead <= n and abs(coeffs[lead]) <= 1e-14 * scale:
        lead += 1
    roots = np.roots(coeffs[lead:]) if lead < n else np.array([], dtype=complex)
    stars = [_root_to_star(z) for z in roots]
    stars += [np.array([0.0, 0.0, -1.0])] * (n - len(roots))
    return Constellation(np.array(stars).reshape(-1, 3))


def _root_to_star(z: complex) -> np.ndarray:
    r2 = abs(z) ** 2
    if abs(z) > INFINITE_ROOT:
        return np.array([0.0, 0.0, -1.0])
    return np.array([2 * z.real, 2 * z.imag, 1 - r2]) / (1 + r2)


@dataclass(frozen=True)
class MultipoleConstellation:
    L: int
    norm: float
    constellation: Constellation


def operator_multipole_constellations(H: np.ndarray, j, min_norm: float = 1e-12) -> list[MultipoleConstellation]:
    """Constellations of the rank ``L >= 1`` parts of an operator on spin ``j``."""
    out = []
    for part in multipole_decompose(H, j):
        if part.L == 0 or part.norm <= min_norm:
            continue
        out.append(MultipoleConstellation(part.L, part.norm, majorana_roots(part.components)))
    return out


# ---------------------------------------------------------------------------
# Covariant spinors for ensembles


def _adjoint(A: np.ndarray) -> np.ndarray:
    """Matrix of ``X -> [A, X]`` acting on row-major ``vec(X)``."""
    d = A.shape[0]
    I = np.eye(d)
    return np.kron(A, I) - np.kron(I, A.T)


def covariant_spinors(S: np.ndarray, ensemble: SpinEnsemble, min_norm: float = 1e-10) -> list[tuple[int, np.ndarray]]:
    """Rank-L coefficient vectors of ``S`` under global rotations.

    For a single spin these are the multipole components ``h_L``. For
    ensembles the operator space is split by highest-weight vectors of the
    adjoint action of the total spin, then lowered to a standard basis; the
    coefficients in each copy transform like a spin-L state.
    """
    if len(ensemble) == 1:
        return [(p.L, p.components) for p in multipole_decompose(S, ensemble.spins[0]) if p.L and p.norm > min_norm]
    d = ensemble.dim
    jx, jy, jz = total_spin_ops(ensemble)
    jp = jx + 1j * jy
    jm = jx - 1j * jy
    mz = np.real(np.diag(jz))
    ad_p = _adjoint(jp)
    ad_m = _adjoint(jm)
    s = S.reshape(-1)
    out = []
    Lmax = int(round(mz.max() - mz.min()))
    for L in range(1, Lmax + 1):
        # matrix units |p><q| with m_p - m_q = L span the weight-L space
        idx = [p * d + q for p in range(d) for q in range(d) if abs(mz[p] - mz[q] - L) < 1e-9]
        if not idx:
            continue
        sub = ad_p[:, idx]
        _, sv, vh = np.linalg.svd(sub, full_matrices=True)
        rank = int(np.sum(sv > 1e-9))
        null = vh[rank:].conj().T
        for k in range(null.shape[1]):
            top = np.zeros(d * d, dtype=complex)
            top[idx] = null[:, k]
            vecs = [top]
            for M in range(L, -L, -1):
                nxt = ad_m @ vecs[-1] / math.sqrt((L + M) * (L - M + 1))
                vecs.append(nxt)
            coeffs = np.array([np.vdot(v, s) for v in vecs])
            if np.linalg.norm(coeffs) > min_norm:
                out.append((L, coeffs))
    return out


# ---------------------------------------------------------------------------
# Point-group detection


@dataclass(frozen=True)
class PointGroupReport:
    name: str
    axes: tuple[tuple[int, tuple[float, float, float]], ...] = ()
    is_axially_continuous: bool = False
    elements: tuple[Rotation, ...] = field(default=(), repr=False)

    def describe(self) -> str:
        if self.name == "SO(3)":
            return "SO(3) (identity multiple)" if not self.axes else "SO(3)"
        if self.is_axially_continuous:
            ax = self.axes[0][1]
            return f"{self.name} about ({_fmt(ax[0])},{_fmt(ax[1])},{_fmt(ax[2])})"
        return self.name


def _fmt(x: float) -> str:
    x = 0.0 if abs(x) < 5e-10 else x
    r = round(x)
    if abs(x - r) < 5e-10:
        return str(int(r))
    return f"{x:.6g}"


def _canonical_axis(v: np.ndarray) -> np.ndarray | None:
    n = np.linalg.norm(v)
    if n < 1e-6:
        return None
    v = v / n
    for c in v:
        if abs(c) > 1e-6:
            return v if c > 0 else -v
    return v


def merge_close_stars(stars: np.ndarray, tol: float = 1e-4) -> list[np.ndarray]:
    """Distinct star directions, each the normalised mean of its cluster.

    A k-fold root comes out of the eigenvalue solver split into k points
    about ``eps**(1/k)`` apart, placed symmetrically; their mean is accurate
    to machine precision, which the exact axis tests need.
    """
    clusters: list[list[np.ndarray]] = []
    for s in stars:
        for cl in clusters:
            if np.linalg.norm(s - cl[0]) < tol:
                cl.append(s)
                break
        else:
            clusters.append([s])
    out = []
    for cl in clusters:
        m = np.mean(cl, axis=0)
        out.append(m / np.linalg.norm(m))
    return out


def candidate_axes(stars_per_L: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Lines through stars, pair sums, pair cross products and triple-plane normals."""
    seen = {}

    def add(v):
        a = _canonical_axis(v)
        if a is None:
            return
        key = tuple(np.round(a / 1e-6).astype(np.int64))
        seen.setdefault(key, a)

    for stars in stars_per_L:
        uniq = merge_close_stars(stars)
        for s in uniq:
            add(s)
        for a, b in itertools.combinations(uniq, 2):
            add(a + b)
            add(np.cross(a, b))
        for a, b, c in itertools.combinations(uniq, 3):
            add(np.cross(b - a, c - a))
    return list(seen.values())


def _conj_residual(S: np.ndarray, U: np.ndarray) -> float:
    return float(np.linalg.norm(U.conj().T @ S @ U - S))


def _axis_order(S: np.ndarray, axis: np.ndarray, J: Sequence[np.ndarray]) -> int:
    """Largest n <= MAX_AXIS_ORDER with S invariant under rotation by 2 pi/n.

    In the eigenbasis of ``J.n`` the rotation multiplies entry (p, q) by
    ``exp(-2 pi i (w_p - w_q)/n)``; the differences are integers, so the
    invariant orders are the divisors of their gcd over nonzero entries.
    """
    gen = axis[0] * J[0] + axis[1] * J[1] + axis[2] * J[2]
    w, V = np.linalg.eigh(gen)
    St = V.conj().T @ S @ V
    diffs = np.rint(w[:, None] - w[None, :]).astype(int)
    mask = np.abs(St) > 1e-10
    g = 0
    for dlt in np.unique(np.abs(diffs[mask])):
        g = math.gcd(g, int(dlt))
    if g == 0:
        return 0  # continuous
    for n in range(min(g, MAX_AXIS_ORDER), 1, -1):
        if g % n == 0:
            return n
    return 1


def _classify(elements: Sequence[Rotation]) -> tuple[str, list[tuple[int, tuple[float, float, float]]]]:
    order = len(elements)
    axes: dict = {}
    for e in elements:
        if e == IDENTITY or e.rotation_angle() < 1e-9:
            continue
        ax, _ = e.axis_angle()
        a = _canonical_axis(ax)
        key = tuple(np.round(a / 1e-6).astype(np.int64))
        axes.setdefault(key, [a, 0])
        axes[key][1] += 1
    # elements about one axis plus identity form a cyclic group
    axis_list = sorted(((cnt + 1, tuple(float(c) for c in a)) for a, cnt in axes.values()), key=lambda t: -t[0])
    by_angle: dict = {}
    for e in elements:
        k = round(e.rotation_angle(), 6)
        by_angle[k] = by_angle.get(k, 0) + 1
    c3 = by_angle.get(round(2 * math.pi / 3, 6), 0)
    c4 = by_angle.get(round(math.pi / 2, 6), 0)
    if order == 1:
        return "trivial", []
    if order == 60:
        return "I", axis_list
    if order == 24 and c4 == 6:
        return "O", axis_list
    if order == 12 and c3 == 8:
        return "T", axis_list
    if len(axis_list) == 1:
        return f"C{order}", axis_list
    return f"D{order // 2}", axis_list


def detect_point_group(H: np.ndarray, spins) -> PointGroupReport:
    """Largest rotation group leaving ``H`` unchanged under global rotations."""
    ensemble = as_ensemble(spins)
    H = np.asarray(H, dtype=complex)
    d = ensemble.dim
    if H.shape != (d, d):
        raise ValueError(f"operator shape {H.shape} does not match dimension {d}")
    S = H - np.trace(H) / d * np.eye(d)
    nrm = np.linalg.norm(S)
    if nrm < 1e-12 * max(1.0, np.linalg.norm(H)):
        return PointGroupReport("SO(3)")
    S = S / nrm
    J = total_spin_ops(ensemble)

    # continuous symmetry: null space of n -> [n.J, S]
    C = [Ja @ S - S @ Ja for Ja in J]
    G = np.array([[np.vdot(a, b).real for b in C] for a in C])
    w, V = np.linalg.eigh(G)
    null = V[:, w < 1e-12 * max(1.0, w.max())]
    if null.shape[1] >= 2:
        return PointGroupReport("SO(3)", ((0, (0.0, 0.0, 1.0)),), True)
    if null.shape[1] == 1:
        n = _canonical_axis(null[:, 0])
        perp = np.cross(n, [1.0, 0.0, 0.0] if abs(n[0]) < 0.9 else [0.0, 1.0, 0.0])
        perp /= np.linalg.norm(perp)
        U = global_unitary(rotation_from_axis_angle(perp, math.pi), ensemble.spins)
        name = "D-inf" if _conj_residual(S, U) < SYMMETRY_TOL else "C-inf"
        return PointGroupReport(name, ((0, tuple(float(c) for c in n)),), True)

    stars = [majorana_roots(vec).stars for _, vec in covariant_spinors(S, ensemble)]
    found = []
    for axis in candidate_axes(stars):
        k = _axis_order(S, axis, J)
        if k >= 2:
            r = rotation_from_axis_angle(axis, 2 * math.pi / k)
            if _conj_residual(S, global_unitary(r, ensemble.spins)) < SYMMETRY_TOL:
                found.append(r)
    if not found:
        return PointGroupReport("trivial", (), False, (IDENTITY,))
    try:
        elements = generate_group(found, max_order=120)
    except GroupClosureError:
        # numerically inconsistent axes; keep only the verified generators
        elements = [IDENTITY, *found]
    name, axes = _classify(elements)
    return PointGroupReport(name, tuple(axes), False, tuple(elements))
