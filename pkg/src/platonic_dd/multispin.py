"""Hamiltonians on ensembles of spins.

Covers embedding single-site operators, multilinear K-body interactions
``sum h_{a1..aK} J_a1 (x) ... (x) J_aK``, anisotropy conditions on their
tensors, rotation-invariant two-site operators and random sampling.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .rotations import Rotation
from .spin_algebra import angular_momentum_ops, multipole_operator, spin_dim, twice
from .symmetrize import global_unitary

DIM_CAP = 4096


@dataclass(frozen=True)
class SpinEnsemble:
    spins: tuple
    cap: int = DIM_CAP

    def __post_init__(self):
        spins = tuple(twice(j) / 2 for j in self.spins)
        if not spins:
            raise ValueError("ensemble needs at least one spin")
        if any(j <= 0 for j in spins):
            raise ValueError("spins must be positive half-integers")
        object.__setattr__(self, "spins", spins)
        if self.dim > self.cap:
            raise ValueError(f"total dimension {self.dim} exceeds the cap {self.cap}")

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(spin_dim(j) for j in self.spins)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def __len__(self) -> int:
        return len(self.spins)


def as_ensemble(spins) -> SpinEnsemble:
    return spins if isinstance(spins, SpinEnsemble) else SpinEnsemble(tuple(spins))


def embed_operator(op: np.ndarray, site: int, ensemble: SpinEnsemble) -> np.ndarray:
    """``1 (x) ... (x) op (x) ... (x) 1`` with ``op`` at ``site``."""
    if not 0 <= site < len(ensemble):
        raise IndexError(f"site {site} out of range for {len(ensemble)} spins")
    dims = ensemble.dims
    if op.shape != (dims[site], dims[site]):
        raise ValueError(f"operator shape {op.shape} does not match site dimension {dims[site]}")
    left = int(np.prod(dims[:site]))
    right = int(np.prod(dims[site + 1 :]))
    return np.kron(np.kron(np.eye(left), op), np.eye(right))


def site_spin_ops(site: int, ensemble: SpinEnsemble) -> list[np.ndarray]:
    return [embed_operator(J, site, ensemble) for J in angular_momentum_ops(ensemble.spins[site])]


def global_rotation(r: Rotation, ensemble: SpinEnsemble) -> np.ndarray:
    return global_unitary(r, ensemble.spins)


def total_spin_ops(ensemble: SpinEnsemble) -> list[np.ndarray]:
    ops = [np.zeros((ensemble.dim, ensemble.dim), dtype=complex) for _ in range(3)]
    for k in range(len(ensemble)):
        for a, J in enumerate(site_spin_ops(k, ensemble)):
            ops[a] += J
    return ops


# ---------------------------------------------------------------------------
# Multilinear interactions


@dataclass(frozen=True)
class InteractionTensor:
    sites: tuple[int, ...]
    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=float)
        K = len(self.sites)
        if e.shape != (3,) * K:
            raise ValueError(f"tensor over {K} sites must have shape {(3,) * K}, got {e.shape}")
        if len(set(self.sites)) != K:
            raise ValueError(f"repeated site in {self.sites}")
        object.__setattr__(self, "entries", e)
        object.__setattr__(self, "sites", tuple(int(s) for s in self.sites))

    @property
    def K(self) -> int:
        return len(self.sites)


def multilinear_hamiltonian(tensor: InteractionTensor, ensemble: SpinEnsemble) -> np.ndarray:
    for s in tensor.sites:
        if not 0 <= s < len(ensemble):
            raise IndexError(f"site {s} out of range")
    ops = [site_spin_ops(s, ensemble) for s in tensor.sites]
    H = np.zeros((ensemble.dim, ensemble.dim), dtype=complex)
    for idx in itertools.product(range(3), repeat=tensor.K):
        c = tensor.entries[idx]
        if c == 0:
            continue
        term = ops[0][idx[0]]
        for k in range(1, tensor.K):
            term = term @ ops[k][idx[k]]
        H += c * term
    return H


def levi_civita() -> np.ndarray:
    eps = np.zeros((3, 3, 3))
    for (a, b, c), s in (((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1), ((0, 2, 1), -1), ((2, 1, 0), -1), ((1, 0, 2), -1)):
        eps[a, b, c] = s
    return eps


def isotropic_tensors(K: int) -> list[np.ndarray]:
    """Linearly independent rotation-invariant Cartesian tensors of rank K."""
    d = np.eye(3)
    if K == 1:
        return []
    if K == 2:
        return [d]
    if K == 3:
        return [levi_civita()]
    if K == 4:
        return [
            np.einsum("ab,cd->abcd", d, d),
            np.einsum("ac,bd->abcd", d, d),
            np.einsum("ad,bc->abcd", d, d),
        ]
    raise ValueError(f"isotropic tensor basis not available for rank {K}")


def anisotropy_check(tensor: InteractionTensor | np.ndarray, tol: float = 1e-12) -> tuple[bool, dict]:
    """Evaluate the anisotropy contractions of a rank 2, 3 or 4 tensor.

    Returns ``(ok, report)`` where ``report`` maps each contraction name
    to its value.
    """
    h = tensor.entries if isinstance(tensor, InteractionTensor) else np.asarray(tensor, dtype=float)
    K = h.ndim
    if K == 2:
        report = {"trace": float(np.trace(h))}
    elif K == 3:
        report = {"epsilon": float(np.einsum("abc,abc->", levi_civita(), h))}
    elif K == 4:
        report = {
            "aabb": float(np.einsum("aabb->", h)),
            "abab": float(np.einsum("abab->", h)),
            "abba": float(np.einsum("abba->", h)),
        }
    else:
        raise ValueError(f"anisotropy conditions are defined for rank 2, 3, 4; got {K}")
    scale = max(1.0, float(np.abs(h).max(initial=0.0)))
    ok = all(abs(v) <= tol * scale for v in report.values())
    return ok, report


def project_anisotropic(h: np.ndarray) -> np.ndarray:
    """Remove the isotropic-tensor components of ``h`` (Frobenius projection)."""
    h = np.asarray(h, dtype=float)
    basis = isotropic_tensors(h.ndim)
    if not basis:
        return h.copy()
    B = np.stack([b.ravel() for b in basis], axis=1)
    Q, _ = np.linalg.qr(B)
    v = h.ravel()
    return (v - Q @ (Q.T @ v)).reshape(h.shape)


def dipolar_tensor(e: Sequence[float]) -> np.ndarray:
    """``3 e e^T - 1`` for a unit vector along ``e``."""
    e = np.asarray(e, dtype=float)
    e = e / np.linalg.norm(e)
    return 3 * np.outer(e, e) - np.eye(3)


def disorder_dipolar_hamiltonian(
    ensemble: SpinEnsemble,
    deltas: Sequence[float],
    directions: Sequence[Sequence[float]] | None,
    couplings: Mapping[tuple[int, int], float],
    bonds: Mapping[tuple[int, int], Sequence[float]] | None = None,
) -> np.ndarray:
    """On-site disorder plus dipole-dipole couplings.

    ``directions`` and ``bonds`` default to the z axis, which gives the
    secular form ``sum d_i Jz^i + sum D_ij (3 Jz^i Jz^j - J^i.J^j)``.
    """
    z = (0.0, 0.0, 1.0)
    H = np.zeros((ensemble.dim, ensemble.dim), dtype=complex)
    for i, dl in enumerate(deltas):
        m = np.asarray(directions[i] if directions is not None else z, dtype=float)
        m = m / np.linalg.norm(m)
        H += dl * multilinear_hamiltonian(InteractionTensor((i,), m), ensemble)
    for (i, j), Dij in couplings.items():
        e = bonds[(i, j)] if bonds is not None else z
        H += Dij * multilinear_hamiltonian(InteractionTensor((i, j), dipolar_tensor(e)), ensemble)
    return H


# ---------------------------------------------------------------------------
# Rotation-invariant two-site operators


def isotropic_operator(j1, j2, L: int) -> np.ndarray:
    """``I_L = sum_M (-1)^M / sqrt(2L+1) T_LM (x) T_L,-M`` (unit HS norm)."""
    if not 0 <= L <= min(spin_dim(j1), spin_dim(j2)) - 1:
        raise ValueError(f"rank {L} out of range for spins {j1}, {j2}")
    out = 0
    for M in range(-L, L + 1):
        out = out + (-1) ** M / math.sqrt(2 * L + 1) * np.kron(
            multipole_operator(j1, L, M), multipole_operator(j2, L, -M)
        )
    return np.asarray(out, dtype=complex)


def embedded_isotropic(a: int, b: int, L: int, ensemble: SpinEnsemble) -> np.ndarray:
    """``I_L`` acting on sites ``a`` and ``b``, normalised to unit HS norm."""
    ja, jb = ensemble.spins[a], ensemble.spins[b]
    out = np.zeros((ensemble.dim, ensemble.dim), dtype=complex)
    for M in range(-L, L + 1):
        out += (-1) ** M / math.sqrt(2 * L + 1) * (
            embed_operator(multipole_operator(ja, L, M), a, ensemble)
            @ embed_operator(multipole_operator(jb, L, -M), b, ensemble)
        )
    return out / np.linalg.norm(out)


def remove_isotropic(H: np.ndarray, ensemble: SpinEnsemble) -> np.ndarray:
    """Project out every pairwise ``I_L`` (L >= 1) component of ``H``.

    Embedded ``I_L`` for distinct pairs or ranks are mutually orthogonal,
    so one pass of projections suffices.
    """
    H = np.array(H, dtype=complex)
    n = len(ensemble)
    for a, b in itertools.combinations(range(n), 2):
        Lmax = min(ensemble.dims[a], ensemble.dims[b]) - 1
        for L in range(1, Lmax + 1):
            X = embedded_isotropic(a, b, L, ensemble)
            H -= np.vdot(X, H) * X
    return H


def operator_norm(H: np.ndarray) -> float:
    """Largest singular value; uses eigenvalues when ``H`` is Hermitian."""
    H = np.asarray(H)
    if np.allclose(H, H.conj().T, atol=1e-12 * max(1.0, np.abs(H).max(initial=0.0))):
        return float(np.abs(np.linalg.eigvalsh(H)).max(initial=0.0))
    return float(np.linalg.norm(H, 2))


def cross_kerr_hamiltonian(alphas: np.ndarray) -> np.ndarray:
    """``sum_{i,j>=1} alpha_ij |ij><ij|`` on two qudits of dimension d."""
    a = np.atleast_2d(np.asarray(alphas, dtype=float))
    if a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError("alphas must be a square (d-1)x(d-1) matrix")
    d = a.shape[0] + 1
    diag = np.zeros((d, d))
    diag[1:, 1:] = a
    return np.diag(diag.ravel()).astype(complex)


# ---------------------------------------------------------------------------
# Random sampling


def rng_stream(seed: int, *keys: int) -> np.random.Generator:
    """Counter-based generator keyed by ``(seed, *keys)``.

    Streams for different keys are independent and do not depend on the
    order in which they are requested.
    """
    ss = np.random.SeedSequence([int(seed) & (2**64 - 1), *(int(k) for k in keys)])
    return np.random.Generator(np.random.Philox(ss))


def gue(rng: np.random.Generator, d: int) -> np.ndarray:
    """Hermitised matrix of independent standard complex Gaussians."""
    A = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (A + A.conj().T) / 2


@dataclass(frozen=True)
class BodyTerm:
    """All K-site subsets of ``sites`` carry independent random tensors."""

    sites: tuple[int, ...]
    K: int


def random_multilinear_term(
    rng: np.random.Generator, ensemble: SpinEnsemble, term: BodyTerm, anisotropic: bool
) -> np.ndarray:
    H = np.zeros((ensemble.dim, ensemble.dim), dtype=complex)
    for subset in itertools.combinations(term.sites, term.K):
        h = rng.standard_normal((3,) * term.K)
        if anisotropic:
            h = project_anisotropic(h)
        H += multilinear_hamiltonian(InteractionTensor(subset, h), ensemble)
    return H


def random_hamiltonian(
    seed: int,
    ensemble: SpinEnsemble,
    structure: Sequence[BodyTerm | tuple] | None = None,
    anisotropic: bool = True,
    norms: Sequence[float] | None = None,
    keys: Iterable[int] = (),
) -> np.ndarray:
    """Random Hamiltonian for ``ensemble``.

    Without ``structure`` this is a GUE matrix on the full space, rescaled
    to ``norms[0]`` when given. Otherwise each entry of ``structure`` adds
    a multilinear term with standard-normal tensors, projected onto the
    anisotropic subspace when requested and rescaled so its operator norm
    equals the matching entry of ``norms``. Term ``k`` draws from the
    stream ``(seed, *keys, k)``.
    """
    keys = tuple(keys)
    if structure is None:
        H = gue(rng_stream(seed, *keys, 0), ensemble.dim)
        if norms is not None:
            H *= norms[0] / operator_norm(H)
        return H
    terms = [t if isinstance(t, BodyTerm) else BodyTerm(tuple(t[0]), int(t[1])) for t in structure]
    if norms is not None and len(norms) != len(terms):
        raise ValueError("need one norm per term")
    H = np.zeros((ensemble.dim, ensemble.dim), dtype=complex)
    for k, term in enumerate(terms):
        Hk = random_multilinear_term(rng_stream(seed, *keys, k), ensemble, term, anisotropic)
        if norms is not None:
            nk = operator_norm(Hk)
            Hk = Hk * (norms[k] / nk) if nk > 0 else Hk
        H += Hk
    return H


# ---------------------------------------------------------------------------
# Hamiltonian spec files
#
#   spins = 1/2, 1/2
#   [term]
#   sites = 0, 1
#   tensor = -1, 0, 0, 0, -1, 0, 0, 0, 2
#   anisotropic = false
#   norm = 1.0


def _parse_bool(v: str) -> bool:
    v = v.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def parse_hamiltonian_spec(text: str) -> tuple[SpinEnsemble, np.ndarray, list[InteractionTensor]]:
    header: dict[str, str] = {}
    blocks: list[dict[str, str]] = []
    cur = header
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "[term]":
            cur = {}
            blocks.append(cur)
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        cur[k] = v
    if "spins" not in header:
        raise ValueError("missing 'spins' line")
    ensemble = SpinEnsemble(tuple(twice(s.strip()) / 2 for s in header["spins"].split(",")))
    H = np.zeros((ensemble.dim, ensemble.dim), dtype=complex)
    tensors = []
    for n, blk in enumerate(blocks, 1):
        try:
            sites = tuple(int(s) for s in blk["sites"].split(","))
            vals = np.array([float(s) for s in blk["tensor"].split(",")])
        except KeyError as e:
            raise ValueError(f"term {n}: missing {e.args[0]!r}") from None
        K = len(sites)
        if vals.size != 3**K:
            raise ValueError(f"term {n}: expected {3**K} tensor entries, got {vals.size}")
        h = vals.reshape((3,) * K)
        if _parse_bool(blk.get("anisotropic", "false")) and K >= 2:
            h = project_anisotropic(h)
        t = InteractionTensor(sites, h)
        Hk = multilinear_hamiltonian(t, ensemble)
        if "norm" in blk:
            Hk *= float(blk["norm"]) / operator_norm(Hk)
        H += Hk
        tensors.append(t)
    return ensemble, H, tensors


def read_hamiltonian_spec(path: str | Path):
    return parse_hamiltonian_spec(Path(path).read_text())
