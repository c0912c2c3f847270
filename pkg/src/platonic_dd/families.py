"""Random Hamiltonian families used by parameter scans.

A family turns named term strengths into one random Hamiltonian per draw.
Zero-strength terms are skipped without consuming randomness.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .multispin import (
    BodyTerm,
    SpinEnsemble,
    disorder_dipolar_hamiltonian,
    gue,
    operator_norm,
    random_multilinear_term,
    remove_isotropic,
)
from .spin_algebra import multipole_decompose, multipole_reconstruct

BODY_TERMS = {"gamma": 1, "beta": 2, "lambda": 3, "k4": 4, "k5": 5}


def _scaled(H: np.ndarray, strength: float, norm: Callable[[np.ndarray], float] = operator_norm) -> np.ndarray:
    n = norm(H)
    if n == 0:
        raise ValueError("random term vanished; cannot rescale")
    return H * (strength / n)


def _gue(rng, ensemble: SpinEnsemble, terms, options) -> np.ndarray:
    return _scaled(gue(rng, ensemble.dim), terms.get("h", 0.0))


def _multipole(rng, ensemble: SpinEnsemble, terms, options) -> np.ndarray:
    if len(ensemble) != 1:
        raise ValueError("the multipole family needs a single spin")
    j = ensemble.spins[0]
    d = ensemble.dim
    H = np.zeros((d, d), dtype=complex)
    for name, s in terms.items():
        L = int(name[1:])
        if not 1 <= L <= d - 1:
            raise ValueError(f"term {name} is out of range for spin {j}")
        if s == 0:
            continue
        parts = multipole_decompose(gue(rng, d), j)
        H += _scaled(multipole_reconstruct([parts[L]], j), s, np.linalg.norm)
    return H


def _multilinear(rng, ensemble: SpinEnsemble, terms, options) -> np.ndarray:
    aniso = options.get("anisotropic", True)
    sites = tuple(range(len(ensemble)))
    H = np.zeros((ensemble.dim, ensemble.dim), dtype=complex)
    for name, s in terms.items():
        K = BODY_TERMS[name]
        if K > len(sites):
            raise ValueError(f"term {name} needs at least {K} sites")
        if s == 0:
            continue
        H += _scaled(random_multilinear_term(rng, ensemble, BodyTerm(sites, K), aniso), s)
    return H


def _unit(rng) -> np.ndarray:
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


def _disorder_dipolar(rng, ensemble: SpinEnsemble, terms, options) -> np.ndarray:
    n = len(ensemble)
    secular = options.get("geometry", "secular") == "secular"
    H = np.zeros((ensemble.dim, ensemble.dim), dtype=complex)
    delta, Delta = terms.get("delta", 0.0), terms.get("Delta", 0.0)
    if delta:
        dirs = None if secular else [_unit(rng) for _ in range(n)]
        Hd = disorder_dipolar_hamiltonian(ensemble, rng.standard_normal(n), dirs, {})
        H += _scaled(Hd, delta)
    if Delta:
        pairs = list(itertools.combinations(range(n), 2))
        if not pairs:
            raise ValueError("dipolar term needs at least two spins")
        bonds = None if secular else {p: _unit(rng) for p in pairs}
        couplings = {p: rng.standard_normal() for p in pairs}
        Hdd = disorder_dipolar_hamiltonian(ensemble, [0.0] * n, None, couplings, bonds)
        H += _scaled(Hdd, Delta)
    return H


def split_two_site(H: np.ndarray, d1: int, d2: int) -> tuple[np.ndarray, np.ndarray]:
    """Split a two-site operator into its traceless one-body and two-body parts."""
    d = d1 * d2
    T = H.reshape(d1, d2, d1, d2)
    h0 = np.trace(H) / d
    A = np.einsum("ikjk->ij", T) / d2 - h0 * np.eye(d1)
    B = np.einsum("kikj->ij", T) / d1 - h0 * np.eye(d2)
    one = np.kron(A, np.eye(d2)) + np.kron(np.eye(d1), B)
    two = H - h0 * np.eye(d) - one
    return one, two


def _qubit_qutrit(rng, ensemble: SpinEnsemble, terms, options) -> np.ndarray:
    if len(ensemble) != 2:
        raise ValueError("the qubit_qutrit family needs exactly two spins")
    d1, d2 = ensemble.dims
    H = np.zeros((ensemble.dim, ensemble.dim), dtype=complex)
    gamma, beta = terms.get("gamma", 0.0), terms.get("beta", 0.0)
    if gamma:
        H += _scaled(split_two_site(gue(rng, ensemble.dim), d1, d2)[0], gamma)
    if beta:
        two = split_two_site(gue(rng, ensemble.dim), d1, d2)[1]
        if options.get("anisotropic", True):
            two = remove_isotropic(two, ensemble)
        H += _scaled(two, beta)
    return H


@dataclass(frozen=True)
class Family:
    name: str
    sampler: Callable
    term_names: Callable[[SpinEnsemble], tuple[str, ...]]

    def sample(self, rng, ensemble: SpinEnsemble, terms: Mapping[str, float], options: Mapping) -> np.ndarray:
        allowed = self.term_names(ensemble)
        unknown = set(terms) - set(allowed)
        if unknown:
            raise ValueError(f"family {self.name} has no terms {sorted(unknown)}; expected {list(allowed)}")
        ordered = {k: float(terms[k]) for k in allowed if k in terms}
        return self.sampler(rng, ensemble, ordered, options)


FAMILIES: dict[str, Family] = {
    "gue": Family("gue", _gue, lambda e: ("h",)),
    "multipole": Family("multipole", _multipole, lambda e: tuple(f"h{L}" for L in range(1, e.dim))),
    "multilinear": Family(
        "multilinear", _multilinear, lambda e: tuple(k for k, K in BODY_TERMS.items() if K <= len(e))
    ),
    "disorder_dipolar": Family("disorder_dipolar", _disorder_dipolar, lambda e: ("delta", "Delta")),
    "qubit_qutrit": Family("qubit_qutrit", _qubit_qutrit, lambda e: ("gamma", "beta")),
}


def get_family(name: str) -> Family:
    try:
        return FAMILIES[name]
    except KeyError:
        raise ValueError(f"unknown family {name!r}; expected one of {sorted(FAMILIES)}") from None
