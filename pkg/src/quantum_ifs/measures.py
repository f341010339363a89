"""Finitely-supported probability measures on the state space.

The Markov operator pushes a measure forward along the branches,
``V mu = sum_a sum_i w_a p_i(rho_a) delta_{F_i(rho_a)}``; the transfer
operator acts on functions, ``(U f)(rho) = sum_i p_i(rho) f(F_i(rho))``.
Word quantities (``p_iota``, ``F_iota``) are enumerated depth first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

from .errors import CapExceeded, DegenerateBranch, MassLoss, ValidationError
from .matrixcore import DensityMatrix, as_density, hs_distance, validate_density
from .qifs import DEGENERATE_WEIGHT, TOL_BRANCH, QifsSystem, branch_probs

MERGE_TOL = 1e-10
WORD_CAP = 10**6
WORD_CUTOFF = 1e-15

StateFunction = Callable[[DensityMatrix], float]


@dataclass(frozen=True, eq=False)
class AtomicMeasure:
    """``sum_a w_a delta_{rho_a}``; build with :meth:`from_atoms` to merge and validate."""

    atoms: tuple[tuple[float, DensityMatrix], ...]
    merge_tol: float = MERGE_TOL

    @classmethod
    def from_atoms(cls, atoms, merge_tol: float = MERGE_TOL, mass_tol: float = 1e-12) -> "AtomicMeasure":
        """Merge atoms closer than ``merge_tol`` (Hilbert-Schmidt).

        A merged atom keeps the state of whichever contributor brought the
        larger weight. Zero-weight atoms are dropped.
        """
        merged: list[list] = []  # [weight, state, representative weight]
        stack = None  # matrices of merged atoms, grown by doubling
        for w, rho in atoms:
            w = float(w)
            if w < 0:
                raise ValidationError(f"negative atom weight {w}", invariant="weights")
            if w == 0:
                continue
            rho = as_density(rho)
            n = len(merged)
            if n:
                dist = np.linalg.norm(stack[:n] - rho.matrix, axis=(1, 2))
                hit = int(np.argmin(dist))
                if dist[hit] < merge_tol:
                    slot = merged[hit]
                    slot[0] += w
                    if w > slot[2]:
                        slot[1], slot[2] = rho, w
                        stack[hit] = rho.matrix
                    continue
            if stack is None:
                stack = np.empty((8,) + rho.matrix.shape, dtype=complex)
            elif n == len(stack):
                stack = np.concatenate([stack, np.empty_like(stack)])
            stack[n] = rho.matrix
            merged.append([w, rho, w])
        total = sum(s[0] for s in merged)
        if abs(total - 1) > mass_tol:
            raise ValidationError(f"atom weights sum to {total:.15g}", invariant="probability")
        return cls(tuple((s[0], s[1]) for s in merged), merge_tol)

    @classmethod
    def dirac(cls, rho, merge_tol: float = MERGE_TOL) -> "AtomicMeasure":
        return cls(((1.0, as_density(rho)),), merge_tol)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.atoms])

    @property
    def states(self) -> list[DensityMatrix]:
        return [s for _, s in self.atoms]

    @property
    def mass(self) -> float:
        return float(sum(w for w, _ in self.atoms))

    def integrate(self, f: StateFunction) -> float:
        return float(sum(w * f(s) for w, s in self.atoms))

    def __len__(self):
        return len(self.atoms)


def _image(sys: QifsSystem, i: int, r: np.ndarray):
    v = sys.branches[i].v
    s = v @ r @ v.conj().T
    return s, float(np.trace(s).real)


def markov_push(sys: QifsSystem, mu: AtomicMeasure, tol_branch: float = TOL_BRANCH) -> AtomicMeasure:
    """One step of the Markov operator on an atomic measure.

    Mass on branches without a defined image is dropped and the result
    renormalized, unless the dropped mass reaches ``1e-9``
    (:class:`MassLoss`).
    """
    out = []
    lost = 0.0
    for w, rho in mu.atoms:
        r = rho.matrix
        p = branch_probs(sys, r)
        for i in range(sys.k):
            if p[i] <= tol_branch:
                continue
            s, t = _image(sys, i, r)
            if t <= tol_branch:
                lost += w * p[i]
                continue
            out.append((w * p[i], DensityMatrix((s / t + (s / t).conj().T) / 2)))
    if lost >= DEGENERATE_WEIGHT:
        raise MassLoss(lost)
    total = sum(w for w, _ in out)
    return AtomicMeasure.from_atoms([(w / total, s) for w, s in out], mu.merge_tol, mass_tol=1e-9)


def markov_push_n(sys: QifsSystem, mu: AtomicMeasure, n: int) -> AtomicMeasure:
    for _ in range(n):
        mu = markov_push(sys, mu)
    return mu


def transfer_apply(sys: QifsSystem, f: StateFunction, rho, tol_branch: float = TOL_BRANCH) -> float:
    """``(U f)(rho) = sum_i p_i(rho) f(F_i(rho))`` over branches of positive weight."""
    r = as_density(rho).matrix
    p = branch_probs(sys, r)
    total = 0.0
    for i in range(sys.k):
        if p[i] <= tol_branch:
            continue
        s, t = _image(sys, i, r)
        if t <= tol_branch:
            if p[i] > DEGENERATE_WEIGHT:
                raise DegenerateBranch(i, t, float(p[i]))
            continue
        total += p[i] * f(DensityMatrix(s / t))
    return float(total)


def iter_words(sys: QifsSystem, rho, n: int, cap: int = WORD_CAP, cutoff: float = WORD_CUTOFF,
               tol_branch: float = TOL_BRANCH) -> Iterator[tuple[tuple[int, ...], float, np.ndarray]]:
    """Yield ``(word, p_word(rho), F_word(rho))`` for words of length ``n``.

    Words are produced in lexicographic order. A prefix whose weight drops
    below ``cutoff`` is not extended; zero-weight words are never yielded.
    """
    if sys.k ** n > cap:
        raise CapExceeded(sys.k ** n, cap)
    r0 = as_density(rho).matrix

    def walk(word, weight, r):
        if len(word) == n:
            yield word, weight, r
            return
        p = branch_probs(sys, r)
        for i in range(sys.k):
            wi = weight * p[i]
            if p[i] <= tol_branch or wi < cutoff:
                continue
            s, t = _image(sys, i, r)
            if t <= tol_branch:
                if p[i] > DEGENERATE_WEIGHT:
                    raise DegenerateBranch(i, t, float(p[i]))
                continue
            yield from walk(word + (i,), wi, s / t)

    yield from walk((), 1.0, r0)


def transfer_power(sys: QifsSystem, f: StateFunction, rho, n: int, cap: int = WORD_CAP) -> float:
    """``(U^n f)(rho) = sum_iota p_iota(rho) f(F_iota(rho))`` by word enumeration."""
    return float(sum(w * f(DensityMatrix(r)) for _, w, r in iter_words(sys, rho, n, cap)))


def duality_check(sys: QifsSystem, f: StateFunction, mu: AtomicMeasure) -> tuple[float, float]:
    """Both sides of ``<f, V mu> = <U f, mu>``."""
    lhs = markov_push(sys, mu).integrate(f)
    rhs = float(sum(w * transfer_apply(sys, f, s) for w, s in mu.atoms))
    return lhs, rhs


def barycenter(mu: AtomicMeasure) -> DensityMatrix:
    return validate_density(sum(w * s.matrix for w, s in mu.atoms))


def eta(x: float) -> float:
    return 0.0 if x <= 0 else float(-x * np.log(x))


def shannon(ps: Sequence[float]) -> float:
    return float(sum(eta(p) for p in ps))


def shannon_boltzmann(sys: QifsSystem) -> StateFunction:
    """``h(rho) = sum_i eta(p_i(rho))``."""
    return lambda rho: shannon(branch_probs(sys, rho))


def partial_entropy_state(sys: QifsSystem, rho, n: int, cap: int = WORD_CAP) -> float:
    """``H_n(rho) = sum_{|iota| = n} eta(p_iota(rho))``; ``H_0 = 0``."""
    if n == 0:
        return 0.0
    return shannon([w for _, w, _ in iter_words(sys, rho, n, cap)])


def word_masses(sys: QifsSystem, mu: AtomicMeasure, n: int, cap: int = WORD_CAP,
                cutoff: float = WORD_CUTOFF) -> dict[tuple[int, ...], float]:
    """``<p_iota, mu>`` for every word of length ``n`` with positive mass."""
    if sys.k ** n > cap:
        raise CapExceeded(sys.k ** n, cap)
    masses: dict[tuple[int, ...], float] = {}
    for w, s in mu.atoms:
        for word, pw, _ in iter_words(sys, s, n, cap, cutoff=cutoff / max(w, 1e-300)):
            masses[word] = masses.get(word, 0.0) + w * pw
    return dict(sorted(masses.items()))


def partial_entropy_measure(sys: QifsSystem, mu: AtomicMeasure, n: int, cap: int = WORD_CAP) -> float:
    """``H_n(mu) = sum_iota eta(<p_iota, mu>)``. Invariance of ``mu`` is not checked."""
    if n == 0:
        return 0.0
    return shannon(word_masses(sys, mu, n, cap).values())


def entropy_of_measure(sys: QifsSystem, mu: AtomicMeasure, n_max: int,
                       cap: int = WORD_CAP) -> tuple[float, list[float]]:
    """Estimate ``lim (H_{n+1} - H_n)(mu)`` by its value at ``n_max - 1``.

    Returns the estimate and the differences ``H_{n+1} - H_n`` for
    ``n = 0 .. n_max - 1``.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    hs = [partial_entropy_measure(sys, mu, n, cap) for n in range(n_max + 1)]
    diffs = [hs[n + 1] - hs[n] for n in range(n_max)]
    return diffs[-1], diffs


def invariance_residual(sys: QifsSystem, mu: AtomicMeasure, pushed: AtomicMeasure | None = None) -> float:
    """Transport distance between ``mu`` and ``V mu`` over matched atoms.

    Atoms are matched within ``merge_tol``; matched pairs contribute
    ``|w - w'| + min(w, w') * d_HS``, unmatched atoms their full weight.
    """
    pushed = markov_push(sys, mu) if pushed is None else pushed
    unmatched = list(pushed.atoms)
    total = 0.0
    for w, s in mu.atoms:
        best = None
        for idx, (w2, s2) in enumerate(unmatched):
            d = hs_distance(s, s2)
            if d < mu.merge_tol and (best is None or d < best[1]):
                best = (idx, d)
        if best is None:
            total += w
        else:
            w2 = unmatched.pop(best[0])[0]
            total += abs(w - w2) + min(w, w2) * best[1]
    total += sum(w for w, _ in unmatched)
    return float(total)
