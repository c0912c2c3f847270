"""Reference operators with large rotational symmetry.

Each entry names a rank-L operator built from ``T_LM`` and a point group,
in a concrete orientation, that leaves it unchanged. The axial groups C-inf
and D-inf are represented by finite cyclic/dihedral groups whose order
exceeds 2L, which act identically on rank-L operators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .rotations import PointGroup, cyclic_group, dihedral_group, make_group, standard_group
from .spin_algebra import multipole_operator

_AXIAL_ORDER = 16


def _c_inf() -> PointGroup:
    return cyclic_group(_AXIAL_ORDER)


def _d_inf() -> PointGroup:
    return dihedral_group(_AXIAL_ORDER, (0, 0, 1), (1, 0, 0))


def _tetrahedral_cubic() -> PointGroup:
    """T with its two-fold axes on x, y, z."""
    return make_group("T", [("a", (0, 0, 1), math.pi), ("b", (1, 1, 1), 2 * math.pi / 3)])


def _tetrahedral_diagonal() -> PointGroup:
    """T with two-fold axes on z and on the xy diagonals."""
    return make_group(
        "T", [("a", (0, 0, 1), math.pi), ("b", (0, math.sqrt(2), 1), 2 * math.pi / 3)]
    )


def _icosahedral_z() -> PointGroup:
    """I with a five-fold axis on z and a two-fold axis on y."""
    th = math.atan(2.0)
    ph = math.pi / 5
    return make_group(
        "I",
        [
            ("a", (0, 0, 1), 2 * math.pi / 5),
            ("b", (math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th)), 2 * math.pi / 5),
        ],
    )


@dataclass(frozen=True)
class InvariantExample:
    L: int
    group_name: str
    coefficients: tuple[tuple[int, float], ...]
    group_factory: Callable[[], PointGroup]

    @property
    def spin(self) -> float:
        return self.L / 2

    def operator(self, j=None) -> np.ndarray:
        j = self.spin if j is None else j
        return sum(c * multipole_operator(j, self.L, M) for M, c in self.coefficients)

    def group(self) -> PointGroup:
        return self.group_factory()


def _ex(L, name, coeffs, factory) -> InvariantExample:
    return InvariantExample(L, name, tuple(coeffs.items()), factory)


INVARIANT_EXAMPLES: tuple[InvariantExample, ...] = (
    _ex(1, "C-inf", {0: 1.0}, _c_inf),
    _ex(2, "D-inf", {0: 1.0}, _d_inf),
    _ex(3, "C-inf", {0: 1.0}, _c_inf),
    _ex(3, "D3", {3: 1.0, -3: -1.0}, lambda: dihedral_group(3)),
    _ex(3, "T", {2: 1.0, -2: 1.0}, _tetrahedral_diagonal),
    _ex(4, "D-inf", {0: 1.0}, _d_inf),
    _ex(4, "O", {4: 1.0, -4: 1.0, 0: math.sqrt(14 / 5)}, lambda: standard_group("O")),
    _ex(5, "C-inf", {0: 1.0}, _c_inf),
    _ex(5, "D5", {5: 1.0, -5: -1.0}, lambda: dihedral_group(5)),
    _ex(6, "D-inf", {0: 1.0}, _d_inf),
    _ex(6, "O", {4: 1.0, -4: 1.0, 0: -math.sqrt(2 / 7)}, lambda: standard_group("O")),
    _ex(6, "I", {5: 1.0, -5: -1.0, 0: math.sqrt(11 / 7)}, _icosahedral_z),
    _ex(7, "C-inf", {0: 1.0}, _c_inf),
    _ex(7, "D7", {7: 1.0, -7: -1.0}, lambda: dihedral_group(7)),
    _ex(
        7,
        "T",
        {6: 1.0, -6: -1.0, 2: math.sqrt(13 / 11), -2: -math.sqrt(13 / 11)},
        _tetrahedral_cubic,
    ),
)

# (group, L) pairs with no invariant rank-L operator
EMPTY_INVARIANTS = {"T": (1, 2), "O": (1, 2, 3, 5), "I": (1, 2, 3, 4, 5)}
