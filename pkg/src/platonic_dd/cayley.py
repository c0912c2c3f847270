"""Cayley graphs of point groups and Eulerian pulse-sequence synthesis.

Vertices are group elements (vertex 0 is the identity) and a directed edge
``(u, v, g)`` joins ``u`` to ``v`` when ``element(v) = generator(g) * element(u)``.
Walking the graph from the identity and applying the generator of each
edge as a pulse reproduces the running pulse product at every vertex, so
an Eulerian cycle visits every element once per generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .rotations import (
    IDENTITY,
    PointGroup,
    Rotation,
    compose,
    rotation_from_axis_angle,
    same_rotation,
    standard_group,
)

IDENTITY_LABEL = "e"

# Letter strings of the published Platonic sequences.
EDD_WORD = "ababbaba"
TEDD_WORD = "abaababbbaababbbaababbaa"
OEDD_WORD = "abaaabbbabaabbbaababbaaa" "ababbbabaabbaaaababbbabb"
IEDD_WORD = (
    "baaabbaabaaaaabbaaab"
    "abbbabaabbaabbabbabb"
    "abbbaaaababbbaaababb"
    "baaababbbaababbaabba"
    "abbaabbbabbbaababbba"
    "ababbbaababbbabaaaaa"
)

PUBLISHED_WORDS = {"D2": EDD_WORD, "T": TEDD_WORD, "O": OEDD_WORD, "I": IEDD_WORD}

SEQUENCE_GROUPS = {"edd": "D2", "tedd": "T", "oedd": "O", "iedd": "I"}


class NoEulerianCycleError(ValueError):
    """The graph is unbalanced or not strongly connected."""


class NotFoundError(LookupError):
    """A search finished without finding a solution."""


@dataclass(frozen=True)
class CayleyGraph:
    group: PointGroup
    labels: tuple[str, ...]
    edges: tuple[tuple[int, int, str], ...]

    @property
    def n_vertices(self) -> int:
        return self.group.order

    def out_edges(self, u: int) -> list[tuple[int, int, str]]:
        return [e for e in self.edges if e[0] == u]

    def successor(self, u: int, label: str) -> int:
        for a, b, g in self.edges:
            if a == u and g == label:
                return b
        raise ValueError(f"no edge labelled {label!r} leaves vertex {u}")


def build_cayley_graph(group: PointGroup, identity_loops: bool = False) -> CayleyGraph:
    """Cayley graph of ``group`` over its labelled generators.

    With ``identity_loops`` each vertex also gets an ``"e"`` self-loop;
    this is the augmented graph used for corrected-gate paths.
    """
    if not group.generators:
        raise ValueError("group has no generators")
    edges = []
    for u, elem in enumerate(group.elements):
        for label, gen in group.generators:
            try:
                v = group.index(compose(gen, elem))
            except LookupError:
                raise ValueError(f"generator {label!r} does not close on the group") from None
            edges.append((u, v, label))
        if identity_loops:
            edges.append((u, u, IDENTITY_LABEL))
    labels = group.labels + ((IDENTITY_LABEL,) if identity_loops else ())
    return CayleyGraph(group, labels, tuple(edges))


def eulerian_cycle(graph: CayleyGraph, start: int = 0) -> str:
    """Hierholzer's algorithm; returns the letter word of the cycle.

    Outgoing edges are consumed in ``(label, target)`` order so the output
    is reproducible. The cycle begins and ends at ``start``.
    """
    n = graph.n_vertices
    out: list[list[tuple[int, int, str]]] = [[] for _ in range(n)]
    indeg = [0] * n
    for e in graph.edges:
        out[e[0]].append(e)
        indeg[e[1]] += 1
    for u in range(n):
        if len(out[u]) != indeg[u]:
            raise NoEulerianCycleError(f"vertex {u} is unbalanced")
    # reversed so that pop() yields the smallest (label, target) first
    stacks = [sorted(es, key=lambda e: (e[2], e[1]), reverse=True) for es in out]

    path: list[tuple[int, int, str]] = []
    stack: list[tuple[int, tuple[int, int, str] | None]] = [(start, None)]
    while stack:
        u, via = stack[-1]
        if stacks[u]:
            e = stacks[u].pop()
            stack.append((e[1], e))
        else:
            stack.pop()
            if via is not None:
                path.append(via)
    path.reverse()
    if len(path) != len(graph.edges):
        raise NoEulerianCycleError("graph is not connected")
    return "".join(e[2] for e in path)


def walk(word: str, group: PointGroup) -> list[int]:
    """Vertex indices visited by ``word`` starting at the identity.

    The result has ``len(word) + 1`` entries.
    """
    gens = dict(group.generators)
    gens[IDENTITY_LABEL] = IDENTITY
    cur = IDENTITY
    visited = [0]
    for ch in word:
        if ch not in gens:
            raise ValueError(f"unknown letter {ch!r} for group {group.name}")
        cur = compose(gens[ch], cur)
        visited.append(group.index(cur))
    return visited


def verify_word(word: str, group: PointGroup, identity_loops: bool = False) -> bool:
    """True iff ``word`` traverses every Cayley edge exactly once and closes.

    Unknown letters raise ``ValueError``; every other failure returns False.
    """
    allowed = set(group.labels) | ({IDENTITY_LABEL} if identity_loops else set())
    for ch in word:
        if ch not in allowed:
            raise ValueError(f"unknown letter {ch!r} for group {group.name}")
    n_edges = group.order * len(allowed)
    if len(word) != n_edges:
        return False
    vertices = walk(word, group)
    used = set()
    for u, ch in zip(vertices[:-1], word):
        if (u, ch) in used:
            return False
        used.add((u, ch))
    if vertices[-1] != 0:
        return False
    return same_rotation(word_product(word, group), IDENTITY, 1e-10)


def word_product(word: str, group: PointGroup) -> Rotation:
    """Rotation ``P_N ... P_1`` for the letters of ``word``."""
    gens = dict(group.generators)
    gens[IDENTITY_LABEL] = IDENTITY
    cur = IDENTITY
    for ch in word:
        cur = compose(gens[ch], cur)
    return cur


def hamiltonian_cycle(graph: CayleyGraph, budget: int = 1_000_000) -> str:
    """Backtracking search for a closed walk visiting each vertex once."""
    n = graph.n_vertices
    succ = {u: sorted(((g, v) for a, v, g in graph.edges if a == u and g != IDENTITY_LABEL)) for u in range(n)}
    visited = [False] * n
    visited[0] = True
    letters: list[str] = []
    steps = 0

    def extend(u: int, depth: int) -> bool:
        nonlocal steps
        steps += 1
        if steps > budget:
            raise NotFoundError("hamiltonian cycle search exceeded its budget")
        if depth == n:
            for g, v in succ[u]:
                if v == 0:
                    letters.append(g)
                    return True
            return False
        for g, v in succ[u]:
            if not visited[v]:
                visited[v] = True
                letters.append(g)
                if extend(v, depth + 1):
                    return True
                letters.pop()
                visited[v] = False
        return False

    if not extend(0, 1):
        raise NotFoundError("graph has no hamiltonian cycle")
    return "".join(letters)


def dcg_path(graph: CayleyGraph) -> str:
    """Eulerian cycle of the identity-augmented graph ending in an ``e`` edge.

    The cycle is rotated so that the self-loop at the identity vertex is
    the final letter; the walk therefore still starts and ends at the
    identity, and that last slot is the one reserved for the target gate.
    """
    aug = graph if IDENTITY_LABEL in graph.labels else build_cayley_graph(graph.group, identity_loops=True)
    word = eulerian_cycle(aug)
    vertices = walk(word, aug.group)
    for k, ch in enumerate(word):
        if ch == IDENTITY_LABEL and vertices[k] == 0:
            return word[k + 1 :] + word[: k + 1]
    raise AssertionError("augmented graph lacks an identity loop at the identity")


# ---------------------------------------------------------------------------
# Timed pulse sequences


@dataclass(frozen=True)
class Step:
    """A free interval followed by an instantaneous pulse.

    ``axis is None`` marks an identity slot: the interval happens but no
    rotation follows.
    """

    interval: float
    axis: tuple[float, float, float] | None
    angle: float = 0.0

    @property
    def is_identity(self) -> bool:
        return self.axis is None

    def rotation(self) -> Rotation:
        if self.axis is None:
            return IDENTITY
        return rotation_from_axis_angle(self.axis, self.angle)


@dataclass(frozen=True)
class PulseSequence:
    steps: tuple[Step, ...]
    trailing: float = 0.0
    word: str = ""
    group: str = ""
    gate_slot: int | None = None
    name: str = ""

    def __post_init__(self):
        for s in self.steps:
            if s.interval < 0:
                raise ValueError("intervals must be non-negative")
        if self.trailing < 0:
            raise ValueError("trailing interval must be non-negative")

    @property
    def n_pulses(self) -> int:
        return sum(1 for s in self.steps if not s.is_identity)

    @property
    def duration(self) -> float:
        return sum(s.interval for s in self.steps) + self.trailing

    def pulse_product(self) -> Rotation:
        cur = IDENTITY
        for s in self.steps:
            cur = compose(s.rotation(), cur)
        return cur

    def frames(self) -> list[Rotation]:
        """Toggling-frame rotations ``g_k``: pulses applied before interval k.

        One entry per step, plus one for the trailing interval.
        """
        cur = IDENTITY
        out = []
        for s in self.steps:
            out.append(cur)
            cur = compose(s.rotation(), cur)
        out.append(cur)
        return out


def word_to_pulses(word: str, group: PointGroup, tau0: float, name: str = "") -> PulseSequence:
    """Realise a letter word as pulses, each preceded by an interval ``tau0``.

    The letter ``e`` becomes an identity slot. Generators keep the axis and
    angle they were defined with.
    """
    if tau0 < 0:
        raise ValueError("tau0 must be non-negative")
    aa = {lab: (ax, ang) for lab, ax, ang in group.generator_axis_angle}
    for lab, r in group.generators:
        if lab not in aa:
            ax, ang = r.axis_angle()
            aa[lab] = (tuple(float(c) for c in ax), ang)
    steps = []
    for ch in word:
        if ch == IDENTITY_LABEL:
            steps.append(Step(tau0, None))
        elif ch in aa:
            ax, ang = aa[ch]
            steps.append(Step(tau0, tuple(ax), float(ang)))
        else:
            raise ValueError(f"unknown letter {ch!r} for group {group.name}")
    gate = None
    if word.endswith(IDENTITY_LABEL):
        gate = len(word) - 1
    return PulseSequence(tuple(steps), 0.0, word, group.name, gate, name or group.name)


def named_sequence(name: str, tau0: float = 1.0, synthesize: bool = False) -> PulseSequence:
    """``edd``, ``tedd``, ``oedd`` or ``iedd`` as a pulse sequence.

    By default the published letter strings are used; with ``synthesize``
    the word comes from this module's Hierholzer search instead.
    """
    key = name.lower()
    if key not in SEQUENCE_GROUPS:
        raise ValueError(f"unknown sequence {name!r}; expected one of {sorted(SEQUENCE_GROUPS)}")
    group = standard_group(SEQUENCE_GROUPS[key])
    word = eulerian_cycle(build_cayley_graph(group)) if synthesize else PUBLISHED_WORDS[group.name]
    return word_to_pulses(word, group, tau0, name=key.upper())


# ---------------------------------------------------------------------------
# Plain-text sequence format: "<interval> <ax> <ay> <az> <angle>" per step.


def format_sequence(seq: PulseSequence) -> str:
    lines = []
    if seq.name or seq.word:
        lines.append(f"# {seq.name} {seq.word}".rstrip())
    lines.append("# interval axis_x axis_y axis_z angle")
    for s in seq.steps:
        ax = s.axis if s.axis is not None else (0.0, 0.0, 1.0)
        ang = s.angle if s.axis is not None else 0.0
        lines.append(f"{s.interval:.17g} {ax[0]:.17g} {ax[1]:.17g} {ax[2]:.17g} {ang:.17g}")
    if seq.trailing:
        lines.append(f"{seq.trailing:.17g} 0 0 1 0")
    return "\n".join(lines) + "\n"


def parse_sequence(text: str, name: str = "") -> PulseSequence:
    """Inverse of :func:`format_sequence`; zero-angle lines are identity slots."""
    steps = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 5:
            raise ValueError(f"line {lineno}: expected 5 fields, got {len(parts)}")
        try:
            t, x, y, z, ang = (float(p) for p in parts)
        except ValueError:
            raise ValueError(f"line {lineno}: non-numeric field") from None
        if ang == 0.0:
            steps.append(Step(t, None))
            continue
        n = np.array([x, y, z])
        norm = float(np.linalg.norm(n))
        if not math.isclose(norm, 1.0, abs_tol=1e-6):
            raise ValueError(f"line {lineno}: axis is not a unit vector")
        steps.append(Step(t, tuple(float(c) for c in n / norm), ang))
    return PulseSequence(tuple(steps), name=name)


def read_sequence(path: str | Path) -> PulseSequence:
    p = Path(path)
    return parse_sequence(p.read_text(), name=p.stem)


def write_sequence(seq: PulseSequence, path: str | Path) -> None:
    Path(path).write_text(format_sequence(seq))
