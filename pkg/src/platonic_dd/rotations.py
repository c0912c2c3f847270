"""Unit-quaternion rotations and finite rotation groups.

A rotation is stored as a unit quaternion ``(w, x, y, z)``. The two
quaternions ``q`` and ``-q`` describe the same element of SO(3), so every
comparison in this module is sign-insensitive.

Composition follows the operator convention: ``compose(r1, r2)`` is the
rotation that applies ``r2`` first and then ``r1``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

EQ_TOL = 1e-9
_KEY_GRID = 1e-9


class GroupClosureError(RuntimeError):
    """Raised when generated elements exceed the allowed group order."""


@dataclass(frozen=True)
class Rotation:
    """A rotation in SO(3) represented by a unit quaternion."""

    w: float
    x: float
    y: float
    z: float

    @property
    def quaternion(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def axis_angle(self) -> tuple[np.ndarray, float]:
        """Return ``(axis, angle)`` with angle in ``[0, 2*pi)``.

        The identity reports the z axis and angle zero.
        """
        v = np.array([self.x, self.y, self.z])
        s = float(np.linalg.norm(v))
        if s < 1e-15:
            return np.array([0.0, 0.0, 1.0]), 0.0
        angle = 2.0 * math.atan2(s, self.w)
        return v / s, angle

    def rotation_angle(self) -> float:
        """Angle of the SO(3) element, folded into ``[0, pi]``."""
        s = math.sqrt(self.x**2 + self.y**2 + self.z**2)
        return 2.0 * math.atan2(s, abs(self.w))

    def canonical(self) -> tuple[int, int, int, int]:
        """Hashable key shared by ``q`` and ``-q``.

        The sign is fixed so the first component that is nonzero on the
        rounding grid is positive; entries are then rounded to the grid.
        """
        q = self.quaternion
        for c in q:
            if abs(c) > _KEY_GRID / 2:
                if c < 0:
                    q = -q
                break
        return tuple(int(round(c / _KEY_GRID)) for c in q)

    def __matmul__(self, other: "Rotation") -> "Rotation":
        return compose(self, other)


IDENTITY = Rotation(1.0, 0.0, 0.0, 0.0)


def rotation_from_axis_angle(axis: Sequence[float], angle: float) -> Rotation:
    """Build a rotation by ``angle`` (radians) about ``axis``.

    The axis is normalised; a zero axis raises ``ValueError``.
    """
    n = np.asarray(axis, dtype=float)
    if n.shape != (3,) or not np.all(np.isfinite(n)):
        raise ValueError(f"axis must be a finite 3-vector, got {axis!r}")
    norm = float(np.linalg.norm(n))
    if norm < 1e-12:
        raise ValueError("rotation axis must be nonzero")
    if not math.isfinite(angle):
        raise ValueError("rotation angle must be finite")
    n = n / norm
    s = math.sin(angle / 2.0)
    return Rotation(math.cos(angle / 2.0), *(float(c) for c in s * n))


def compose(r1: Rotation, r2: Rotation) -> Rotation:
    """Hamilton product ``r1 * r2`` (apply ``r2`` first)."""
    w1, x1, y1, z1 = r1.w, r1.x, r1.y, r1.z
    w2, x2, y2, z2 = r2.w, r2.x, r2.y, r2.z
    w = w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2
    x = w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2
    y = w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2
    z = w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2
    n = math.sqrt(w * w + x * x + y * y + z * z)
    return Rotation(w / n, x / n, y / n, z / n)


def inverse(r: Rotation) -> Rotation:
    return Rotation(r.w, -r.x, -r.y, -r.z)


def rotation_matrix(r: Rotation) -> np.ndarray:
    """3x3 orthogonal matrix acting on column vectors."""
    w, x, y, z = r.w, r.x, r.y, r.z
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def same_rotation(r1: Rotation, r2: Rotation, tol: float = EQ_TOL) -> bool:
    """SO(3) equality: ``min(|q1 - q2|, |q1 + q2|) < tol``."""
    a, b = r1.quaternion, r2.quaternion
    return min(np.linalg.norm(a - b), np.linalg.norm(a + b)) < tol


@dataclass(frozen=True)
class PointGroup:
    """A finite rotation group with labelled generators.

    ``elements[0]`` is always the identity. ``generators`` maps a single
    letter to its rotation; ``generator_axis_angle`` keeps the axis and
    angle each generator was built from so pulses can be realised with
    the intended rotation angle.
    """

    name: str
    elements: tuple[Rotation, ...]
    generators: tuple[tuple[str, Rotation], ...]
    generator_axis_angle: tuple[tuple[str, tuple[float, float, float], float], ...] = ()

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.generators)

    def generator(self, label: str) -> Rotation:
        for lab, r in self.generators:
            if lab == label:
                return r
        raise KeyError(label)

    def index(self, r: Rotation) -> int:
        """Position of ``r`` in ``elements``; ``LookupError`` if absent."""
        idx = self._index.get(r.canonical())
        if idx is None:
            for i, e in enumerate(self.elements):
                if same_rotation(e, r):
                    return i
            raise LookupError("rotation is not an element of the group")
        return idx

    @cached_property
    def _index(self) -> dict:
        return {e.canonical(): i for i, e in enumerate(self.elements)}

    def class_sizes(self, decimals: int = 6) -> dict[float, int]:
        """Number of elements per rotation angle (angles in ``[0, pi]``)."""
        out: dict[float, int] = {}
        for e in self.elements:
            key = round(e.rotation_angle(), decimals)
            out[key] = out.get(key, 0) + 1
        return dict(sorted(out.items()))


def generate_group(
    generators: Iterable[Rotation], max_order: int = 360
) -> list[Rotation]:
    """Breadth-first closure of ``generators`` under left multiplication.

    Returns the element list starting with the identity. Raises
    ``GroupClosureError`` if more than ``max_order`` distinct elements
    appear, which signals an infinite (or unexpectedly large) group.
    """
    gens = list(generators)
    seen = {IDENTITY.canonical()}
    elements = [IDENTITY]
    queue = deque([IDENTITY])
    while queue:
        cur = queue.popleft()
        for g in gens:
            nxt = compose(g, cur)
            key = nxt.canonical()
            if key in seen:
                continue
            # grid rounding can split one element across two keys
            if any(same_rotation(nxt, e) for e in _near(elements, nxt)):
                continue
            seen.add(key)
            elements.append(nxt)
            if len(elements) > max_order:
                raise GroupClosureError(
                    f"closure exceeded max_order={max_order}; generators do "
                    "not generate a finite group of that size"
                )
            queue.append(nxt)
    return elements


def _near(elements: list[Rotation], r: Rotation) -> list[Rotation]:
    # Cheap prefilter on |w| before the exact comparison.
    aw = abs(r.w)
    return [e for e in elements if abs(abs(e.w) - aw) < 1e-8]


def contains(group: PointGroup | Sequence[Rotation], r: Rotation) -> bool:
    elements = group.elements if isinstance(group, PointGroup) else group
    return any(same_rotation(e, r) for e in elements)


def make_group(
    name: str,
    generators: Sequence[tuple[str, Sequence[float], float]],
    max_order: int = 360,
) -> PointGroup:
    """Build a :class:`PointGroup` from ``(label, axis, angle)`` triples."""
    labelled = []
    aa = []
    for label, axis, angle in generators:
        if len(label) != 1 or label == "e":
            raise ValueError(f"generator label must be one letter other than 'e': {label!r}")
        n = np.asarray(axis, dtype=float)
        n = n / np.linalg.norm(n)
        labelled.append((label, rotation_from_axis_angle(n, angle)))
        aa.append((label, tuple(float(c) for c in n), float(angle)))
    elements = generate_group([r for _, r in labelled], max_order=max_order)
    return PointGroup(name, tuple(elements), tuple(labelled), tuple(aa))


PHI = (1.0 + math.sqrt(5.0)) / 2.0

_STANDARD = {
    "D2": [("a", (1.0, 0.0, 0.0), math.pi), ("b", (0.0, 1.0, 0.0), math.pi)],
    "T": [
        ("a", (0.0, 0.0, 1.0), 2 * math.pi / 3),
        ("b", (math.sqrt(2) / 3, math.sqrt(2.0 / 3.0), 1.0 / 3.0), 2 * math.pi / 3),
    ],
    "O": [
        ("a", (0.0, 0.0, 1.0), math.pi / 2),
        ("b", (1.0, 1.0, 1.0), 2 * math.pi / 3),
    ],
    "I": [
        ("a", (0.0, -1.0, PHI), 2 * math.pi / 5),
        ("b", (1.0 - PHI, 0.0, PHI), 2 * math.pi / 3),
    ],
}

_STANDARD_CACHE: dict[str, PointGroup] = {}


def standard_group(name: str) -> PointGroup:
    """One of ``"D2"``, ``"T"``, ``"O"``, ``"I"`` with generators ``a``, ``b``."""
    key = name.upper() if name.upper() in _STANDARD else name
    if key not in _STANDARD:
        raise ValueError(f"unknown group {name!r}; expected one of {sorted(_STANDARD)}")
    if key not in _STANDARD_CACHE:
        _STANDARD_CACHE[key] = make_group(key, _STANDARD[key])
    return _STANDARD_CACHE[key]


def cyclic_group(n: int, axis: Sequence[float] = (0, 0, 1)) -> PointGroup:
    if n < 1:
        raise ValueError("cyclic order must be >= 1")
    if n == 1:
        return PointGroup("C1", (IDENTITY,), ())
    return make_group(f"C{n}", [("a", axis, 2 * math.pi / n)])


def dihedral_group(
    n: int, axis: Sequence[float] = (0, 0, 1), perp: Sequence[float] = (1, 0, 0)
) -> PointGroup:
    """``D_n``: an n-fold axis plus a two-fold axis perpendicular to it."""
    if n < 2:
        raise ValueError("dihedral order must be >= 2")
    if abs(np.dot(axis, perp)) > 1e-9 * np.linalg.norm(axis) * np.linalg.norm(perp):
        raise ValueError("two-fold axis must be perpendicular to the main axis")
    return make_group(f"D{n}", [("a", axis, 2 * math.pi / n), ("b", perp, math.pi)])


def conjugate_group(group: PointGroup, r: Rotation, name: str | None = None) -> PointGroup:
    """Return ``r G r^-1``, with generators carried along."""
    ri = inverse(r)
    elements = tuple(compose(r, compose(e, ri)) for e in group.elements)
    gens = tuple((lab, compose(r, compose(g, ri))) for lab, g in group.generators)
    R = rotation_matrix(r)
    aa = tuple(
        (lab, tuple(float(c) for c in R @ np.asarray(ax)), ang)
        for lab, ax, ang in group.generator_axis_angle
    )
    return PointGroup(name or group.name, elements, gens, aa)
