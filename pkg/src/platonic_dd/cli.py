"""Command-line front end: ``platonic-dd {sequence,verify,detect,scan}``.

Exit codes: 0 success or decoupled, 1 verified negative, 2 usage error,
3 I/O error.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

import numpy as np

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

_GROUP_ALIASES = {"edd": "D2", "tedd": "T", "oedd": "O", "iedd": "I", "d2": "D2", "t": "T", "o": "O", "i": "I"}


class UsageError(Exception):
    pass


def _group_name(raw: str) -> str:
    try:
        return _GROUP_ALIASES[raw.lower()]
    except KeyError:
        raise UsageError(f"unknown group {raw!r}; expected edd, tedd, oedd or iedd") from None


def _parse_spins(raw: str) -> tuple[Fraction, ...]:
    try:
        spins = tuple(Fraction(t.strip()) for t in raw.split(",") if t.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad spin list {raw!r}") from None
    if not spins or any(s <= 0 or (2 * s).denominator != 1 for s in spins):
        raise UsageError(f"spins must be positive multiples of 1/2, got {raw!r}")
    return spins


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {out}: {exc.strerror or exc}") from exc


def _check_output_path(out: str | None) -> None:
    if out is None or out == "-":
        return
    parent = Path(out).resolve().parent
    if not parent.is_dir():
        raise OSError(f"output directory {parent} does not exist")


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from exc


# ---------------------------------------------------------------------------


def cmd_sequence(args) -> int:
    from .cayley import build_cayley_graph, dcg_path, format_sequence, named_sequence, word_to_pulses
    from .rotations import standard_group
    from .simulate import time_antisymmetric

    key = args.group.lower()
    if key not in ("edd", "tedd", "oedd", "iedd"):
        raise UsageError(f"unknown group {args.group!r}; expected edd, tedd, oedd or iedd")
    if args.tau0 < 0 or not math.isfinite(args.tau0):
        raise UsageError("--tau0 must be a non-negative number")
    _check_output_path(args.out)
    group = standard_group(_group_name(key))
    if args.dcg:
        word = dcg_path(build_cayley_graph(group, identity_loops=True))
        seq = word_to_pulses(word, group, args.tau0, name=f"{key.upper()}-DCG")
    else:
        seq = named_sequence(key, args.tau0)
    if args.tt_dagger:
        seq = time_antisymmetric(seq)
    if args.format == "word":
        word = seq.word
        if args.tt_dagger:
            word = word + "".join(f"{c}'" if c != "e" else c for c in reversed(seq.word))
        text = word + "\n"
    else:
        text = format_sequence(seq)
    _emit(text, args.out)
    return EXIT_OK


def _ensemble_ranks(spins) -> int:
    return int(sum(2 * s for s in spins))


def cmd_verify(args) -> int:
    from .multispin import parse_hamiltonian_spec
    from .rotations import standard_group
    from .symmetrize import group_average, rank_projector

    group = standard_group(_group_name(args.group))
    if (args.lmax is None) == (args.hamiltonian is None):
        raise UsageError("give exactly one of --lmax or --hamiltonian")

    def dims(Lmax: int) -> list[int]:
        return [int(round(np.trace(rank_projector(group, L)).real)) for L in range(1, Lmax + 1)]

    lines = [f"group {group.name} (order {group.order})"]
    if args.lmax is not None:
        if args.lmax < 1:
            raise UsageError("--lmax must be at least 1")
        ds = dims(args.lmax)
        for L, dL in enumerate(ds, 1):
            lines.append(f"L={L} invariant_dim={dL}")
        ok = all(dL == 0 for dL in ds)
    else:
        try:
            ensemble, H, _ = parse_hamiltonian_spec(_read_text(args.hamiltonian))
        except ValueError as exc:
            raise UsageError(f"{args.hamiltonian}: {exc}") from None
        d = ensemble.dim
        S = H - np.trace(H) / d * np.eye(d)
        n = np.linalg.norm(S)
        for L, dL in enumerate(dims(_ensemble_ranks(ensemble.spins)), 1):
            lines.append(f"L={L} invariant_dim={dL}")
        if n == 0:
            ok, res = True, 0.0
        else:
            r = group_average(S / n, group, ensemble.spins, args.tol)
            ok, res = r.is_identity_multiple, r.residual_norm
        lines.append(f"residual {res:.3e}")
    lines.append("decoupled: " + ("yes" if ok else "no"))
    print("\n".join(lines))
    return EXIT_OK if ok else EXIT_NEGATIVE


def _rank_norms(H: np.ndarray, ensemble, spinors) -> dict[int, float]:
    total = float(np.linalg.norm(H)) ** 2
    norms: dict[int, float] = {}
    for L, c in spinors:
        norms[L] = norms.get(L, 0.0) + float(np.linalg.norm(c)) ** 2
    rest = max(total - sum(norms.values()), 0.0)
    out = {0: math.sqrt(rest)}
    out.update({L: math.sqrt(v) for L, v in sorted(norms.items())})
    return out


def _vec(v) -> str:
    # round first so tiny negatives do not print as -0.000000
    return "(" + ", ".join(f"{round(float(c), 6) + 0.0:.6f}" for c in v) + ")"


def cmd_detect(args) -> int:
    from .majorana import covariant_spinors, detect_point_group, majorana_roots
    from .multispin import SpinEnsemble
    from .spin_algebra import parse_operator

    try:
        H = parse_operator(_read_text(args.operator))
    except ValueError as exc:
        raise UsageError(f"{args.operator}: {exc}") from None
    d = H.shape[0]
    spins = _parse_spins(args.spins) if args.spins else (Fraction(d - 1, 2),)
    try:
        ensemble = SpinEnsemble(spins)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if ensemble.dim != d:
        raise UsageError(f"operator dimension {d} does not match spins ({ensemble.dim})")
    if not np.allclose(H, H.conj().T, atol=1e-10 * max(1.0, float(np.abs(H).max()))):
        raise UsageError("operator is not Hermitian")
    report = detect_point_group(H, ensemble)
    S = H - np.trace(H) / d * np.eye(d)
    spinors = covariant_spinors(S, ensemble)
    lines = [f"group: {report.describe()}"]
    for k, ax in report.axes:
        lines.append(f"axis order={'inf' if k == 0 else k} {_vec(ax)}")
    for L, v in _rank_norms(H, ensemble, spinors).items():
        lines.append(f"norm L={L} {v:.6g}")
    for L, c in spinors:
        for x, y, z in majorana_roots(c).stars:
            lines.append(f"star L={L} {_vec((x, y, z))}")
    print("\n".join(lines))
    return EXIT_OK


def cmd_scan(args) -> int:
    from .simulate import fit_slopes, format_fit_rows, format_scan_csv, parse_scan_config, scan

    try:
        config = parse_scan_config(_read_text(args.config))
    except ValueError as exc:
        raise UsageError(f"{args.config}: {exc}") from None
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            raise UsageError("--seed must fit in 64 bits")
        config = replace(config, seed=args.seed)
    _check_output_path(args.out)
    try:
        rows = scan(config)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = format_scan_csv(rows)
    if args.fit:
        text += format_fit_rows(fit_slopes(rows, config))
    _emit(text, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="platonic-dd", description="Platonic dynamical decoupling toolkit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("sequence", help="emit a decoupling sequence")
    s.add_argument("--group", required=True, help="edd, tedd, oedd or iedd")
    s.add_argument("--format", choices=("word", "pulses"), default="pulses")
    s.add_argument("--dcg", action="store_true", help="identity-augmented path ending in a gate slot")
    s.add_argument("--tt-dagger", action="store_true", help="append the time-reversed inverse")
    s.add_argument("--tau0", type=float, default=1.0, help="free interval before each pulse (s)")
    s.add_argument("--out", help="output file (default stdout)")
    s.set_defaults(func=cmd_sequence)

    v = sub.add_parser("verify", help="check which ranks a group averages away")
    v.add_argument("--group", required=True)
    v.add_argument("--lmax", type=int)
    v.add_argument("--hamiltonian", help="Hamiltonian spec file")
    v.add_argument("--tol", type=float, default=1e-10)
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("detect", help="point group of an operator")
    d.add_argument("operator", help="operator file")
    d.add_argument("--spins", help="comma-separated spins; default one spin of matching dimension")
    d.set_defaults(func=cmd_detect)

    c = sub.add_parser("scan", help="Monte Carlo distance scan")
    c.add_argument("config")
    c.add_argument("--out", help="CSV path (default stdout)")
    c.add_argument("--fit", action="store_true", help="append log-log slope rows")
    c.add_argument("--seed", type=int)
    c.set_defaults(func=cmd_scan)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
