"""Group averaging over point groups and decoupling-group selection."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .rotations import PointGroup, Rotation
from .spin_algebra import multipole_basis, spin_dim, wigner_d

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class SymmetrizedResult:
    averaged: np.ndarray
    is_identity_multiple: bool
    residual_norm: float


def global_unitary(r: Rotation, spins: Sequence) -> np.ndarray:
    """``D^(j1)(r) (x) D^(j2)(r) (x) ...`` over the listed spins."""
    U = np.ones((1, 1), dtype=complex)
    for j in spins:
        U = np.kron(U, wigner_d(j, r))
    return U


def group_unitaries(group: PointGroup, spins: Sequence) -> np.ndarray:
    return np.stack([global_unitary(g, spins) for g in group.elements])


def identity_residual(S: np.ndarray) -> float:
    """HS norm of ``S - (Tr S / d) 1``."""
    d = S.shape[0]
    return float(np.linalg.norm(S - np.trace(S) / d * np.eye(d)))


def group_average(
    S: np.ndarray, group: PointGroup, spins: Sequence, tol: float = DEFAULT_TOL
) -> SymmetrizedResult:
    """``(1/|G|) sum_g U_g^dagger S U_g`` with ``U_g`` the global rotation."""
    S = np.asarray(S, dtype=complex)
    d = int(np.prod([spin_dim(j) for j in spins]))
    if S.shape != (d, d):
        raise ValueError(f"operator shape {S.shape} does not match spins {list(spins)} (d={d})")
    Us = group_unitaries(group, spins)
    avg = np.einsum("gji,jk,gkl->il", Us.conj(), S, Us) / len(Us)
    res = identity_residual(avg)
    return SymmetrizedResult(avg, res < tol, res)


def rank_projector(group: PointGroup, L: int) -> np.ndarray:
    """Average of the rank-L rotation matrices over the group.

    In the coordinates ``(h_LL, ..., h_L,-L)`` this is the orthogonal
    projector onto the group-invariant rank-L multipoles.
    """
    return np.mean([wigner_d(L, g) for g in group.elements], axis=0)


def invariant_subspace(group: PointGroup, j, L: int, threshold: float = 1e-8) -> list[np.ndarray]:
    """Orthonormal operators spanning the invariant part of rank ``L``."""
    if not 0 <= L <= spin_dim(j) - 1:
        raise ValueError(f"rank {L} is out of range for spin {j}")
    P = rank_projector(group, L)
    P = (P + P.conj().T) / 2
    w, v = np.linalg.eigh(P)
    basis = multipole_basis(j, L)
    out = []
    for k in np.flatnonzero(np.abs(w - 1) < threshold):
        c = v[:, k]
        out.append(sum(ci * T for ci, T in zip(c, basis)))
    return out


def is_decoupling_group(
    group: PointGroup, spins: Sequence, subspace: Sequence[np.ndarray], tol: float = DEFAULT_TOL
) -> bool:
    """True iff every operator in ``subspace`` averages to an identity multiple."""
    for X in subspace:
        X = np.asarray(X, dtype=complex)
        n = np.linalg.norm(X)
        if n == 0:
            continue
        if not group_average(X / n, group, spins, tol).is_identity_multiple:
            return False
    return True


def multipoles_up_to(j, L_max: int) -> list[np.ndarray]:
    return [T for L in range(1, L_max + 1) for T in multipole_basis(j, L)]


_SMALLEST = {1: "D2", 2: "T", 3: "O", 4: "I", 5: "I"}


def smallest_decoupling_group(L_max: int) -> str | None:
    """Smallest Platonic group annihilating every rank ``1..L_max``."""
    if L_max < 1:
        raise ValueError("L_max must be at least 1")
    return _SMALLEST.get(L_max)


def multispin_decoupling_group(K: int, L_max_per_site: Sequence[int]) -> str | None:
    """Group for K-body anisotropic interactions.

    The relevant rank is the sum of the K largest per-site ranks.
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    ranks = sorted(L_max_per_site, reverse=True)
    if K > len(ranks):
        raise ValueError("K exceeds the number of sites")
    return smallest_decoupling_group(sum(ranks[:K]))
