"""Exact propagators for pulse sequences acting on spin Hamiltonians.

All propagator routines accept either one Hamiltonian ``(d, d)`` or a
stack ``(n, d, d)``; stacks are evolved together so ensembles of random
Hamiltonians share the same pulse unitaries.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cayley import PulseSequence, Step, named_sequence
from .families import get_family
from .multispin import SpinEnsemble, as_ensemble, rng_stream, total_spin_ops
from .rotations import rotation_from_axis_angle
from .symmetrize import global_unitary

UNITARITY_WARN = 1e-8
UNITARITY_REJECT = 1e-4
# lower edge sits two decades above the measured distance noise floor (~1e-14)
FIT_WINDOW = (1e-12, 0.1)


@dataclass(frozen=True)
class ErrorModel:
    """Systematic pulse imperfections.

    ``chi`` is the pulse amplitude (rad/s); ``math.inf`` means
    instantaneous pulses.
    """

    flip_angle_eps: float = 0.0
    axis_misspec_eps: float = 0.0
    chi: float = math.inf

    def __post_init__(self):
        if not 0.0 <= self.axis_misspec_eps < 1 / math.sqrt(2):
            raise ValueError("axis_misspec_eps must lie in [0, 1/sqrt(2))")
        if not self.chi > 0:
            raise ValueError("chi must be positive or infinite")


IDEAL = ErrorModel()


def _check_hermitian(H: np.ndarray) -> None:
    scale = max(1.0, float(np.abs(H).max(initial=0.0)))
    if np.abs(H - np.swapaxes(H.conj(), -1, -2)).max(initial=0.0) > 1e-10 * scale:
        raise ValueError("Hamiltonian is not Hermitian")


def _expm_herm(H: np.ndarray, t: float) -> np.ndarray:
    w, V = np.linalg.eigh(H)
    return (V * np.exp(-1j * t * w)[..., None, :]) @ np.swapaxes(V.conj(), -1, -2)


def free_propagator(H: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i H t)`` for Hermitian ``H`` (or a stack of them)."""
    H = np.asarray(H, dtype=complex)
    _check_hermitian(H)
    return _expm_herm(H, t)


class _Evolver:
    """Caches ``exp(-iHt)`` for a stack of Hamiltonians."""

    def __init__(self, H: np.ndarray):
        self.H = H
        self.w, self.V = np.linalg.eigh(H)
        self.Vh = np.swapaxes(self.V.conj(), -1, -2)
        self._cache: dict[float, np.ndarray] = {}

    def free(self, t: float) -> np.ndarray:
        U = self._cache.get(t)
        if U is None:
            U = (self.V * np.exp(-1j * t * self.w)[..., None, :]) @ self.Vh
            self._cache[t] = U
        return U


def perturbed_pulse(axis: Sequence[float], angle: float, model: ErrorModel) -> tuple[tuple[float, float, float], float]:
    """Axis and angle actually applied under ``model``.

    The angle is scaled by ``1 + flip_angle_eps``. The axis is tilted to
    ``sqrt(1 - 2e^2) n + e p1 + e p2`` where ``p1 = normalize(n x z)``
    (``n x x`` when n is along z) and ``p2 = p1 x n``.
    """
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    eps = model.axis_misspec_eps
    if not 0.0 <= eps < 1 / math.sqrt(2):
        raise ValueError("axis_misspec_eps must lie in [0, 1/sqrt(2))")
    new_angle = angle * (1.0 + model.flip_angle_eps)
    if eps == 0.0:
        return tuple(float(c) for c in n), new_angle
    p1 = np.cross(n, [0.0, 0.0, 1.0])
    if np.linalg.norm(p1) < 1e-12:
        p1 = np.cross(n, [1.0, 0.0, 0.0])
    p1 /= np.linalg.norm(p1)
    p2 = np.cross(p1, n)
    m = math.sqrt(1 - 2 * eps * eps) * n + eps * p1 + eps * p2
    m /= np.linalg.norm(m)
    return tuple(float(c) for c in m), new_angle


def _as_stack(H: np.ndarray, ensemble: SpinEnsemble) -> tuple[np.ndarray, bool]:
    H = np.asarray(H, dtype=complex)
    single = H.ndim == 2
    if single:
        H = H[None]
    d = ensemble.dim
    if H.shape[-2:] != (d, d):
        raise ValueError(f"Hamiltonian shape {H.shape[-2:]} does not match ensemble dimension {d}")
    _check_hermitian(H)
    return H, single


def _pulse_unitary(step: Step, ensemble: SpinEnsemble, model: ErrorModel, cache: dict) -> np.ndarray:
    key = (step.axis, step.angle)
    U = cache.get(key)
    if U is None:
        axis, angle = perturbed_pulse(step.axis, step.angle, model)
        U = global_unitary(rotation_from_axis_angle(axis, angle), ensemble.spins)
        cache[key] = U
    return U


def sequence_propagator(
    H: np.ndarray,
    seq: PulseSequence,
    ensemble,
    model: ErrorModel = IDEAL,
) -> np.ndarray:
    """Full propagator of ``seq`` under ``H`` with the given pulse errors.

    Each step evolves freely for its interval and then applies its pulse.
    With finite ``model.chi`` a pulse about ``n`` by ``theta`` becomes
    ``exp(-i (H + chi J.n) theta / chi)``; otherwise it is instantaneous.
    """
    ensemble = as_ensemble(ensemble)
    Hs, single = _as_stack(H, ensemble)
    ev = _Evolver(Hs)
    d = ensemble.dim
    U = np.broadcast_to(np.eye(d, dtype=complex), Hs.shape).copy()
    finite = math.isfinite(model.chi)
    J = total_spin_ops(ensemble) if finite else None
    cache: dict = {}
    for step in seq.steps:
        if step.interval:
            U = ev.free(step.interval) @ U
        if step.is_identity:
            continue
        if finite:
            P = cache.get((step.axis, step.angle))
            if P is None:
                axis, angle = perturbed_pulse(step.axis, step.angle, model)
                Jn = axis[0] * J[0] + axis[1] * J[1] + axis[2] * J[2]
                P = _expm_herm(Hs + model.chi * Jn, angle / model.chi)
                cache[(step.axis, step.angle)] = P
            U = P @ U
        else:
            U = _pulse_unitary(step, ensemble, model, cache) @ U
    if seq.trailing:
        U = ev.free(seq.trailing) @ U
    return U[0] if single else U


def ideal_sequence_propagator(H: np.ndarray, seq: PulseSequence, ensemble) -> np.ndarray:
    """``P_N e^{-iH t_N} ... P_1 e^{-iH t_1}`` with instantaneous ideal pulses."""
    return sequence_propagator(H, seq, ensemble, IDEAL)


def finite_pulse_propagator(H: np.ndarray, seq: PulseSequence, model: ErrorModel, ensemble) -> np.ndarray:
    if not math.isfinite(model.chi):
        raise ValueError("finite-pulse propagation needs a finite chi")
    return sequence_propagator(H, seq, ensemble, model)


def sequence_duration(seq: PulseSequence, model: ErrorModel = IDEAL) -> float:
    t = seq.duration
    if math.isfinite(model.chi):
        t += sum(perturbed_pulse(s.axis, s.angle, model)[1] for s in seq.steps if not s.is_identity) / model.chi
    return t


def first_order_epo(H: np.ndarray, seq: PulseSequence, ensemble) -> np.ndarray:
    """``sum_k g_k^dagger (H t_k) g_k`` over the toggling frames of ``seq``."""
    ensemble = as_ensemble(ensemble)
    H = np.asarray(H, dtype=complex)
    frames = seq.frames()
    intervals = [s.interval for s in seq.steps] + [seq.trailing]
    out = np.zeros_like(H)
    for g, t in zip(frames, intervals):
        if t == 0:
            continue
        U = global_unitary(g, ensemble.spins)
        out += t * (U.conj().T @ H @ U)
    return out


def time_antisymmetric(seq: PulseSequence) -> PulseSequence:
    """The sequence followed by its mirror image with inverted pulses.

    Writing the original as ``t1 P1 t2 P2 ... tN PN [tail]``, the mirror is
    ``[tail] PN^-1 tN ... P2^-1 t2 P1^-1 t1``, so the toggling-frame history
    of the result is symmetric in time.
    """
    steps = list(seq.steps)
    mirrored = []
    intervals = [seq.trailing] + [s.interval for s in reversed(steps)]
    for k, s in enumerate(reversed(steps)):
        axis = None if s.axis is None else tuple(0.0 - c for c in s.axis)
        mirrored.append(Step(intervals[k], axis, s.angle))
    trailing = steps[0].interval if steps else seq.trailing
    name = f"({seq.name})({seq.name})^dag" if seq.name else ""
    return PulseSequence(tuple(steps + mirrored), trailing, seq.word, seq.group, None, name)


def distance(U: np.ndarray, d: int | None = None) -> np.ndarray | float:
    """``sqrt(1 - |Tr U| / d)`` clamped to [0, 1]; accepts stacks.

    Evaluated from the eigenvalues ``l_k`` of ``U`` through
    ``1 - |Tr U|^2/d^2 = sum_{k,l} |l_k - l_l|^2 / (2 d^2)``, which keeps full
    relative precision when ``U`` is close to a multiple of the identity.
    """
    U = np.asarray(U, dtype=complex)
    single = U.ndim == 2
    Us = U[None] if single else U
    d = Us.shape[-1] if d is None else d
    if Us.shape[-1] != d:
        raise ValueError("dimension mismatch")
    dev = np.abs(np.swapaxes(Us.conj(), -1, -2) @ Us - np.eye(d)).max(axis=(-2, -1))
    worst = float(dev.max(initial=0.0))
    if worst > UNITARITY_REJECT:
        raise ValueError(f"matrix is not unitary (deviation {worst:.2e})")
    if worst > UNITARITY_WARN:
        warnings.warn(f"matrix deviates from unitarity by {worst:.2e}", RuntimeWarning, stacklevel=2)
    lam = np.linalg.eigvals(Us)
    diff = np.abs(lam[..., :, None] - lam[..., None, :]) ** 2
    s = diff.sum(axis=(-2, -1)) / (2 * d * d)
    tr = np.abs(np.trace(Us, axis1=-2, axis2=-1)) / d
    val = np.sqrt(np.clip(s / (1 + np.minimum(tr, 1.0)), 0.0, 1.0))
    return float(val[0]) if single else val


def loglog_slope(points: Sequence[tuple[float, float]], window: tuple[float, float] = FIT_WINDOW) -> float:
    """Least-squares slope of ``log y`` against ``log x`` inside ``window`` (on y)."""
    pts = [(float(x), float(y)) for x, y in points]
    if any(x <= 0 or y <= 0 for x, y in pts):
        raise ValueError("points must be positive")
    sel = [(x, y) for x, y in pts if window[0] <= y <= window[1]]
    if len(sel) < 4:
        raise ValueError(f"need at least 4 points with y in {window}, found {len(sel)}")
    lx = np.log([x for x, _ in sel])
    ly = np.log([y for _, y in sel])
    slope, _ = np.polyfit(lx, ly, 1)
    return float(slope)


# ---------------------------------------------------------------------------
# Corrected gates


def dcg_propagator(
    H: np.ndarray,
    seq: PulseSequence,
    ensemble,
    gate_generator: np.ndarray,
    gate_angle: float,
) -> np.ndarray:
    """Propagator of a corrected-gate sequence and its ideal target.

    The flagged identity slot evolves under ``H + (gate_angle/t) Q`` for its
    interval ``t``, realising ``exp(-i gate_angle Q)``. Every other identity
    slot runs the balanced identity: ``Q`` at twice the rate for half the
    interval, then reversed for the other half. Both visit the same path of
    ``exp(-i phi Q)`` for the same total time, so their first-order error
    terms coincide. Returns ``U_target^dagger U``.
    """
    ensemble = as_ensemble(ensemble)
    Hs, single = _as_stack(H, ensemble)
    Q = np.asarray(gate_generator, dtype=complex)
    if seq.gate_slot is None:
        raise ValueError("sequence has no gate slot")
    d = ensemble.dim
    ev = _Evolver(Hs)
    U = np.broadcast_to(np.eye(d, dtype=complex), Hs.shape).copy()
    cache: dict = {}
    for k, step in enumerate(seq.steps):
        t = step.interval
        if step.is_identity and t > 0:
            rate = gate_angle / t
            if k == seq.gate_slot:
                U = _expm_herm(Hs + rate * Q, t) @ U
            else:
                fwd = cache.get(("fwd", t))
                if fwd is None:
                    fwd = _expm_herm(Hs + 2 * rate * Q, t / 2)
                    bwd = _expm_herm(Hs - 2 * rate * Q, t / 2)
                    cache[("fwd", t)] = fwd
                    cache[("bwd", t)] = bwd
                U = cache[("bwd", t)] @ (fwd @ U)
        else:
            if t:
                U = ev.free(t) @ U
            if not step.is_identity:
                U = _pulse_unitary(step, ensemble, IDEAL, cache) @ U
    target = _expm_herm(Q, gate_angle)
    out = target.conj().T @ U
    return out[0] if single else out


# ---------------------------------------------------------------------------
# Parameter scans
#
#   family = gue
#   spins = 1; 3/2; 2            (';' separates alternative ensembles)
#   sequences = nodd, tedd, oedd
#   grid = h, 1e-4, 1e-2, 8, log
#   term.h2 = 1.0                 (strengths of terms not on the grid)
#   samples = 200
#   seed = 0
#   mode = ideal                  (or finite, with chi)
#   chi = 1
#   flip_angle_eps = 0
#   axis_misspec_eps = 0
#   anisotropic = true
#   geometry = secular


@dataclass(frozen=True)
class GridAxis:
    name: str
    lo: float
    hi: float
    points: int
    log: bool = True

    def __post_init__(self):
        if self.points < 1:
            raise ValueError(f"grid axis {self.name}: need at least one point")
        if self.log and (self.lo <= 0 or self.hi <= 0):
            raise ValueError(f"grid axis {self.name}: log axes need positive bounds")
        if self.points == 1 and self.lo != self.hi:
            raise ValueError(f"grid axis {self.name}: one point needs min == max")

    def values(self) -> np.ndarray:
        if self.points == 1:
            return np.array([self.lo])
        if self.log:
            return np.logspace(math.log10(self.lo), math.log10(self.hi), self.points)
        return np.linspace(self.lo, self.hi, self.points)


@dataclass(frozen=True)
class ScanConfig:
    family: str
    ensembles: tuple[SpinEnsemble, ...]
    sequences: tuple[str, ...]
    grid: tuple[GridAxis, ...]
    samples: int = 200
    seed: int = 0
    terms: tuple[tuple[str, float], ...] = ()
    mode: str = "ideal"
    model: ErrorModel = IDEAL
    tau: float = 1.0
    options: tuple[tuple[str, object], ...] = ()

    def __post_init__(self):
        fam = get_family(self.family)
        if self.mode not in ("ideal", "finite"):
            raise ValueError("mode must be 'ideal' or 'finite'")
        if self.mode == "finite" and not math.isfinite(self.model.chi):
            raise ValueError("finite mode needs a finite chi")
        if self.samples < 1:
            raise ValueError("samples must be positive")
        if not self.sequences:
            raise ValueError("no sequences listed")
        if not self.grid:
            raise ValueError("no grid axes")
        names = [a.name for a in self.grid]
        if len(set(names)) != len(names):
            raise ValueError("duplicate grid axis")
        for e in self.ensembles:
            allowed = set(fam.term_names(e)) | {"scale"}
            for n in names + [k for k, _ in self.terms]:
                if n not in allowed:
                    raise ValueError(f"family {self.family} has no term {n!r} for spins {list(e.spins)}")
        for s in self.sequences:
            if s.lower() != "nodd":
                build_scan_sequence(s, 1.0)

    @property
    def show_spins(self) -> bool:
        return len(self.ensembles) > 1


def build_scan_sequence(name: str, tau0: float) -> PulseSequence:
    """Sequence names: ``edd``, ``tedd``, ``oedd``, ``iedd``; suffix ``_tt``
    for the time-antisymmetric version (``tt`` alone means TEDD's)."""
    key = name.lower()
    if key == "tt":
        key = "tedd_tt"
    if key.endswith("_tt"):
        return replace(time_antisymmetric(named_sequence(key[:-3], tau0)), name=name)
    return named_sequence(key, tau0)


def _parse_spin(tok: str) -> Fraction:
    return Fraction(tok.strip())


def parse_scan_config(text: str) -> ScanConfig:
    """Parse the ``key = value`` scan format; raises ValueError on bad input."""
    kv: dict[str, str] = {}
    grid: list[GridAxis] = []
    terms: list[tuple[str, float]] = []
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {ln}: expected key = value")
        key, val = (p.strip() for p in line.split("=", 1))
        if key == "grid":
            parts = [p.strip() for p in val.split(",")]
            if len(parts) not in (4, 5):
                raise ValueError(f"line {ln}: grid needs name, min, max, points[, log|lin]")
            flag = parts[4].lower() if len(parts) == 5 else "log"
            if flag not in ("log", "lin"):
                raise ValueError(f"line {ln}: grid flag must be log or lin")
            grid.append(GridAxis(parts[0], float(parts[1]), float(parts[2]), int(parts[3]), flag == "log"))
        elif key.startswith("term."):
            terms.append((key[5:], float(val)))
        elif key in kv:
            raise ValueError(f"line {ln}: duplicate key {key!r}")
        else:
            kv[key] = val
    known = {
        "family", "spins", "sequences", "samples", "seed", "mode", "chi", "tau",
        "flip_angle_eps", "axis_misspec_eps", "anisotropic", "geometry",
    }
    extra = set(kv) - known
    if extra:
        raise ValueError(f"unknown keys {sorted(extra)}")
    for req in ("family", "spins", "sequences"):
        if req not in kv:
            raise ValueError(f"missing key {req!r}")
    try:
        ensembles = tuple(
            SpinEnsemble(tuple(_parse_spin(t) for t in group.split(","))) for group in kv["spins"].split(";")
        )
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad spins: {exc}") from None
    mode = kv.get("mode", "ideal")
    chi = float(kv.get("chi", "1" if mode == "finite" else "inf"))
    model = ErrorModel(float(kv.get("flip_angle_eps", 0)), float(kv.get("axis_misspec_eps", 0)), chi)
    aniso = kv.get("anisotropic", "true").lower()
    if aniso not in ("true", "false"):
        raise ValueError("anisotropic must be true or false")
    options = (("anisotropic", aniso == "true"), ("geometry", kv.get("geometry", "secular")))
    if options[1][1] not in ("secular", "general"):
        raise ValueError("geometry must be secular or general")
    return ScanConfig(
        family=kv["family"],
        ensembles=ensembles,
        sequences=tuple(s.strip() for s in kv["sequences"].split(",") if s.strip()),
        grid=tuple(grid),
        samples=int(kv.get("samples", 200)),
        seed=int(kv.get("seed", 0)),
        terms=tuple(terms),
        mode=mode,
        model=model,
        tau=float(kv.get("tau", 1.0)),
        options=options,
    )


def read_scan_config(path) -> ScanConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_scan_config(fh.read())


@dataclass(frozen=True)
class ScanRow:
    params: tuple[tuple[str, object], ...]
    sequence: str
    mean_distance: float
    stddev: float
    samples: int
    seed: int


def _grid_points(config: ScanConfig):
    axes = [a.values() for a in config.grid]
    for ens in config.ensembles:
        for combo in itertools.product(*axes):
            yield ens, dict(zip((a.name for a in config.grid), (float(v) for v in combo)))


def _term_strengths(config: ScanConfig, point: dict) -> dict:
    terms = dict(config.terms)
    terms.update({k: v for k, v in point.items() if k != "scale"})
    scale = point.get("scale", 1.0)
    return {k: scale * v for k, v in terms.items()}


def _run_point(config: ScanConfig, index: int, ens: SpinEnsemble, point: dict) -> list[ScanRow]:
    fam = get_family(config.family)
    strengths = _term_strengths(config, point)
    options = dict(config.options)
    Hs = np.stack(
        [fam.sample(rng_stream(config.seed, index, s), ens, strengths, options) for s in range(config.samples)]
    )
    dd = [s for s in config.sequences if s.lower() != "nodd"]
    finite = config.mode == "finite"
    if finite:
        tau0 = 0.0
        seqs = {s: build_scan_sequence(s, 0.0) for s in dd}
        baseline = min((sequence_duration(q, config.model) for q in seqs.values()), default=config.tau)
    else:
        n_min = min((len(build_scan_sequence(s, 1.0).steps) for s in dd), default=1)
        tau0 = config.tau / n_min
        seqs = {s: build_scan_sequence(s, tau0) for s in dd}
        baseline = config.tau
    params = tuple(point.items())
    if config.show_spins:
        params = (("spins", ";".join(_fmt_spin(j) for j in ens.spins)),) + params
    rows = []
    for name in config.sequences:
        if name.lower() == "nodd":
            U = _expm_herm(Hs, baseline)
        else:
            U = sequence_propagator(Hs, seqs[name], ens, config.model)
        D = distance(U)
        rows.append(ScanRow(params, name, float(D.mean()), float(D.std(ddof=1)) if len(D) > 1 else 0.0,
                            config.samples, config.seed))
    return rows


def _fmt_spin(j) -> str:
    f = Fraction(j).limit_denominator(2)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _threads() -> int:
    raw = os.environ.get("DD_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ValueError("DD_THREADS must be a positive integer") from None
    if n < 1:
        raise ValueError("DD_THREADS must be a positive integer")
    return n


def scan(config: ScanConfig, threads: int | None = None) -> list[ScanRow]:
    """Mean distance per grid point and sequence.

    Draw ``s`` at flattened grid index ``k`` uses the stream
    ``(seed, k, s)``, so results do not depend on ``threads``.
    """
    points = list(_grid_points(config))
    n = threads if threads is not None else _threads()
    if n <= 1 or len(points) == 1:
        chunks = [_run_point(config, k, e, p) for k, (e, p) in enumerate(points)]
    else:
        with ThreadPoolExecutor(max_workers=min(n, len(points))) as pool:
            chunks = list(pool.map(lambda kp: _run_point(config, kp[0], *kp[1]), enumerate(points)))
    return [row for chunk in chunks for row in chunk]


def _fmt(v) -> str:
    return repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)


def format_scan_csv(rows: Sequence[ScanRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if rows:
        w.writerow([k for k, _ in rows[0].params] + ["sequence", "mean_distance", "stddev", "samples", "seed"])
    for r in rows:
        w.writerow([_fmt(v) for _, v in r.params] + [r.sequence, _fmt(r.mean_distance), _fmt(r.stddev),
                                                     r.samples, r.seed])
    return buf.getvalue()


def fit_slopes(rows: Sequence[ScanRow], config: ScanConfig) -> list[tuple[str, str, str, float | str]]:
    """Slope of mean distance along each log axis, other parameters fixed.

    Returns ``(axis, fixed, sequence, slope)``; ``slope`` is an error
    message when the fit window holds too few points.
    """
    out = []
    for axis in config.grid:
        if not axis.log or axis.points < 4:
            continue
        series: dict[tuple, list[tuple[float, float]]] = {}
        for r in rows:
            p = dict(r.params)
            fixed = tuple((k, v) for k, v in r.params if k != axis.name)
            series.setdefault((fixed, r.sequence), []).append((p[axis.name], r.mean_distance))
        for (fixed, seq), pts in series.items():
            label = ";".join(f"{k}={_fmt(v)}" for k, v in fixed)
            try:
                slope: float | str = loglog_slope(pts)
            except ValueError as exc:
                slope = str(exc)
            out.append((axis.name, label, seq, slope))
    return out


def format_fit_rows(fits) -> str:
    lines = []
    for axis, fixed, seq, slope in fits:
        val = _fmt(slope) if isinstance(slope, float) else f'"{slope}"'
        lines.append(f"# fit,{axis},{fixed},{seq},{val}")
    return "\n".join(lines) + ("\n" if lines else "")
