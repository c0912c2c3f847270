"""Spin-j matrices, rotation operators and spherical tensor operators.

The basis of a spin-j space is ordered ``m = j, j-1, ..., -j``. Operators
are plain complex numpy arrays; multi-site operators are Kronecker
products in site order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np

from .rotations import Rotation


def twice(x) -> int:
    """Return ``2x`` as an int, raising ``ValueError`` unless x is a half-integer."""
    if isinstance(x, str):
        x = Fraction(x)
    y = 2 * x
    r = round(float(y))
    if abs(float(y) - r) > 1e-9:
        raise ValueError(f"{x!r} is not a half-integer")
    return int(r)


def spin_dim(j) -> int:
    tj = twice(j)
    if tj < 0:
        raise ValueError("spin must be non-negative")
    return tj + 1


@lru_cache(maxsize=None)
def _jops(tj: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    j = tj / 2
    m = j - np.arange(tj + 1)
    jz = np.diag(m).astype(complex)
    # <m+1|J+|m> sits one row above the diagonal in the m = j..-j ordering
    jp = np.zeros((tj + 1, tj + 1), dtype=complex)
    for i in range(1, tj + 1):
        mm = m[i]
        jp[i - 1, i] = math.sqrt(j * (j + 1) - mm * (mm + 1))
    jx = (jp + jp.conj().T) / 2
    jy = (jp - jp.conj().T) / 2j
    for a in (jx, jy, jz):
        a.setflags(write=False)
    return jx, jy, jz


def angular_momentum_ops(j) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(Jx, Jy, Jz)`` for spin ``j``. Returned arrays are read-only."""
    return _jops(spin_dim(j) - 1)


def wigner_d(j, r: Rotation) -> np.ndarray:
    """Rotation operator ``exp(-i theta J.n)`` on a spin-j space.

    The exponential is taken through the eigendecomposition of the
    Hermitian generator ``J.n``. For half-integer ``j`` the result is
    fixed only up to an overall sign, which never matters for conjugation.
    """
    axis, angle = r.axis_angle()
    return spin_rotation(j, axis, angle)


def spin_rotation(j, axis: Sequence[float], angle: float) -> np.ndarray:
    jx, jy, jz = angular_momentum_ops(j)
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    gen = n[0] * jx + n[1] * jy + n[2] * jz
    w, v = np.linalg.eigh(gen)
    return (v * np.exp(-1j * angle * w)) @ v.conj().T


# ---------------------------------------------------------------------------
# Clebsch-Gordan coefficients


@lru_cache(maxsize=None)
def _fact(n: int) -> int:
    return math.factorial(n)


@lru_cache(maxsize=65536)
def _cg_twice(tj1: int, tm1: int, tj2: int, tm2: int, tJ: int, tM: int) -> float:
    if tm1 + tm2 != tM:
        return 0.0
    if abs(tm1) > tj1 or abs(tm2) > tj2 or abs(tM) > tJ:
        return 0.0
    if (tj1 + tm1) % 2 or (tj2 + tm2) % 2 or (tJ + tM) % 2:
        return 0.0
    if tJ < abs(tj1 - tj2) or tJ > tj1 + tj2 or (tj1 + tj2 + tJ) % 2:
        return 0.0

    # all quantities below are integers (half the doubled values)
    a = (tj1 + tj2 - tJ) // 2
    b = (tj1 - tm1) // 2
    c = (tj2 + tm2) // 2
    d = (tJ - tj2 + tm1) // 2
    e = (tJ - tj1 - tm2) // 2

    pref = Fraction(
        (tJ + 1)
        * _fact((tJ + tj1 - tj2) // 2)
        * _fact((tJ - tj1 + tj2) // 2)
        * _fact(a),
        _fact((tj1 + tj2 + tJ) // 2 + 1),
    )
    pref *= (
        _fact((tJ + tM) // 2)
        * _fact((tJ - tM) // 2)
        * _fact((tj1 - tm1) // 2)
        * _fact((tj1 + tm1) // 2)
        * _fact((tj2 - tm2) // 2)
        * _fact((tj2 + tm2) // 2)
    )

    kmin = max(0, -d, -e)
    kmax = min(a, b, c)
    s = Fraction(0)
    for k in range(kmin, kmax + 1):
        den = _fact(k) * _fact(a - k) * _fact(b - k) * _fact(c - k) * _fact(d + k) * _fact(e + k)
        s += Fraction((-1) ** k, den)
    if s == 0:
        return 0.0
    mag = math.sqrt(pref * s * s)
    return mag if s > 0 else -mag


def clebsch_gordan(j1, m1, j2, m2, J, M) -> float:
    """``<j1 m1; j2 m2 | J M>`` with the Condon-Shortley phase.

    Arguments are integers or half-integers (floats, Fractions or strings
    like ``"3/2"``). Values outside the selection rules are zero.
    """
    return _cg_twice(twice(j1), twice(m1), twice(j2), twice(m2), twice(J), twice(M))


# ---------------------------------------------------------------------------
# Multipole operators


@lru_cache(maxsize=None)
def _multipole(tj: int, L: int, M: int) -> np.ndarray:
    d = tj + 1
    out = np.zeros((d, d), dtype=complex)
    scale = math.sqrt((2 * L + 1) / d)
    for ip in range(d):
        tmp = tj - 2 * ip
        for i in range(d):
            tm = tj - 2 * i
            if tm + 2 * M != tmp:
                continue
            out[ip, i] = scale * _cg_twice(tj, tm, 2 * L, 2 * M, tj, tmp)
    out.setflags(write=False)
    return out


def multipole_operator(j, L: int, M: int) -> np.ndarray:
    """Spherical tensor operator ``T_LM`` on spin ``j`` (unit HS norm).

    Matrix elements are ``sqrt((2L+1)/(2j+1)) <j m; L M | j m'>``.
    """
    tj = spin_dim(j) - 1
    if not (0 <= L <= tj) or abs(M) > L or int(L) != L or int(M) != M:
        raise ValueError(f"need 0 <= L <= 2j and |M| <= L, got L={L}, M={M}, j={tj}/2")
    return _multipole(tj, int(L), int(M))


def multipole_basis(j, L: int) -> list[np.ndarray]:
    """``[T_LL, T_L,L-1, ..., T_L,-L]``."""
    return [multipole_operator(j, L, M) for M in range(L, -L - 1, -1)]


@dataclass(frozen=True)
class MultipoleVector:
    """Rank-L components ``h_LM = Tr(T_LM^dagger H)`` ordered M = L..-L."""

    L: int
    components: np.ndarray

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.components))

    def component(self, M: int) -> complex:
        return complex(self.components[self.L - M])


def multipole_decompose(H: np.ndarray, j) -> list[MultipoleVector]:
    """Split an operator on a single spin ``j`` into its ranks ``L = 0..2j``."""
    H = np.asarray(H)
    d = spin_dim(j)
    if H.shape != (d, d):
        raise ValueError(f"operator shape {H.shape} does not match spin {d - 1}/2")
    out = []
    for L in range(d):
        comps = np.array([np.vdot(T, H) for T in multipole_basis(j, L)])
        out.append(MultipoleVector(L, comps))
    return out


def multipole_reconstruct(parts: Sequence[MultipoleVector], j) -> np.ndarray:
    d = spin_dim(j)
    H = np.zeros((d, d), dtype=complex)
    for p in parts:
        for T, c in zip(multipole_basis(j, p.L), p.components):
            H += c * T
    return H


def is_hermitian(A: np.ndarray, tol: float = 1e-12) -> bool:
    A = np.asarray(A)
    scale = max(1.0, float(np.abs(A).max(initial=0.0)))
    return bool(np.abs(A - A.conj().T).max(initial=0.0) <= tol * scale)


# ---------------------------------------------------------------------------
# Operator text format: "dim d" then d rows of "re,im" entries.


def format_operator(A: np.ndarray) -> str:
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("operator must be a square matrix")
    lines = [f"dim {A.shape[0]}"]
    for row in A:
        lines.append(" ".join(f"{z.real:.17g},{z.imag:.17g}" for z in row))
    return "\n".join(lines) + "\n"


def parse_operator(text: str) -> np.ndarray:
    rows = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    rows = [r for r in rows if r]
    if not rows:
        raise ValueError("empty operator file")
    head = rows[0].split()
    if len(head) != 2 or head[0] != "dim":
        raise ValueError("first line must be 'dim <d>'")
    try:
        d = int(head[1])
    except ValueError:
        raise ValueError("dimension must be an integer") from None
    if d < 1 or len(rows) != d + 1:
        raise ValueError(f"expected {d} matrix rows, found {len(rows) - 1}")
    A = np.zeros((d, d), dtype=complex)
    for i, row in enumerate(rows[1:]):
        entries = row.split()
        if len(entries) != d:
            raise ValueError(f"row {i + 1}: expected {d} entries, got {len(entries)}")
        for k, ent in enumerate(entries):
            try:
                re, im = ent.split(",")
                A[i, k] = complex(float(re), float(im))
            except ValueError:
                raise ValueError(f"row {i + 1}: bad entry {ent!r}") from None
    return A


def read_operator(path: str | Path) -> np.ndarray:
    return parse_operator(Path(path).read_text())


def write_operator(A: np.ndarray, path: str | Path) -> None:
    Path(path).write_text(format_operator(A))
