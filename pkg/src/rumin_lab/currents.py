"""Weighted comass, currents carried by chains, their boundaries, and mass bounds.

Comass and mass are suprema over infinite sets.  Everything sampled here is a
certified lower bound and is labeled as one; exact values are only returned
on the fast paths where they are known in closed form.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import HypothesisFailed, WeightNotAttainable, ZMembershipFailed
from .exterior import AlgebraicForm, bits, mask_weight, masks_of_weight
from .geometry import CubicalChain, boundary, degree, integrate, is_spectral_manifold
from .polyforms import PolyForm
from .spectral import ZWitness, delta_r, homogeneous_weight, z_solve
from .stokes_lab import spectral_pairing

CHUNK = 128


@dataclass
class ComassEstimate:
    value: float
    exact: bool
    upper_bound: float  # Euclidean norm of the weight-p part
    samples: int
    history: List[float] = field(default_factory=list)  # running maximum after each chunk

    @property
    def label(self) -> str:
        return "exact" if self.exact else "lower bound"

    def __float__(self) -> float:
        return self.value

    def to_dict(self) -> Dict[str, object]:
        return {"value": self.value, "kind": self.label, "upper_bound": self.upper_bound, "samples": self.samples}


def _layers(weights: Sequence[int]) -> Dict[int, List[int]]:
    out: Dict[int, List[int]] = {}
    for i, w in enumerate(weights):
        out.setdefault(w, []).append(i)
    return out


@lru_cache(maxsize=None)
def layer_compositions(weights: Tuple[int, ...], k: int, p: int) -> Tuple[Tuple[Tuple[int, int], ...], ...]:
    """Ways to pick k vectors layer by layer so that their weights sum to p.

    Each composition is ((layer weight, count), ...) with count <= layer dimension.
    """
    layers = sorted(_layers(weights).items())
    found = []

    def rec(i, left, need, acc):
        if i == len(layers):
            if left == 0 and need == 0:
                found.append(tuple(acc))
            return
        w, idx = layers[i]
        for c in range(min(len(idx), left) + 1):
            if c * w > need:
                break
            rec(i + 1, left - c, need - c * w, acc + ([(w, c)] if c else []))

    rec(0, k, p, [])
    return tuple(found)


def _euclidean(coeffs: Iterable[Fraction]) -> float:
    return math.sqrt(sum(float(c) ** 2 for c in coeffs))


def _sample_chunk(seed_seq, weights, comps, n, k, terms):
    """Values |xi(v_1 ^ ... ^ v_k)| on CHUNK random orthonormal layered frames."""
    rng = np.random.default_rng(seed_seq)
    layers = _layers(weights)
    choice = rng.integers(len(comps), size=CHUNK)
    out = np.zeros(CHUNK)
    for ci, comp in enumerate(comps):
        rows = np.flatnonzero(choice == ci)
        frames = np.zeros((CHUNK, n, k))
        col = 0
        for w, c in comp:
            idx = layers[w]
            g = rng.standard_normal((CHUNK, len(idx), c))
            q, _ = np.linalg.qr(g)
            frames[:, idx, col:col + c] = q[:, :, :c]
            col += c
        if not rows.size:
            continue
        frames = frames[rows]
        acc = np.zeros(rows.size)
        for m, v in terms:
            acc += v * np.linalg.det(frames[:, list(bits(m)), :])
        out[rows] = np.abs(acc)
    return out


def p_comass(xi: AlgebraicForm, p: int, weights: Sequence[int], samples: int = 512, seed: int = 0,
             workers: int = 1) -> ComassEstimate:
    """Weighted comass of xi against unit simple k-vectors of pure weight p."""
    weights = tuple(weights)
    k = xi.k
    if not masks_of_weight(weights, k, p):
        raise WeightNotAttainable(f"no simple {k}-vector has weight {p}")
    part = {m: c for m, c in xi.coeffs.items() if mask_weight(m, weights) == p}
    upper = _euclidean(part.values())
    if not part:
        return ComassEstimate(0.0, True, 0.0, 0, [0.0])
    if len(part) == 1 or k == 1:
        # one basis covector, or a 1-form: the bound |xi(v)| <= |xi| |v| is attained
        return ComassEstimate(upper, True, upper, 0, [upper])
    # coordinate frames are admissible and give |xi_I| exactly
    best = max(abs(float(c)) for c in part.values())
    if best >= upper:
        return ComassEstimate(best, True, upper, 0, [best])
    comps = layer_compositions(weights, k, p)
    terms = [(m, float(c)) for m, c in part.items()]
    n_chunks = -(-samples // CHUNK)
    seqs = np.random.SeedSequence(seed).spawn(n_chunks)
    job = lambda s: _sample_chunk(s, weights, comps, len(weights), k, terms)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(job, seqs))
    else:
        chunks = [job(s) for s in seqs]
    values = np.concatenate(chunks)[:samples] if chunks else np.zeros(0)
    history = []
    running = best
    for i in range(0, len(values), CHUNK):
        running = max(running, float(values[i:i + CHUNK].max()))
        history.append(running)
    return ComassEstimate(min(running, upper), False, upper, samples, history)


# currents --------------------------------------------------------------------------


class ChainCurrent:
    """The functional omega -> integral of omega over a chain, labeled by a weight p."""

    def __init__(self, group, chain: CubicalChain, p: Optional[int] = None):
        self.group = group
        self.chain = chain
        self.p = degree(group, chain) if p is None else p

    @property
    def k(self) -> int:
        return self.chain.k

    def __call__(self, omega: PolyForm) -> Fraction:
        if self.chain.is_zero():
            return Fraction(0)
        return integrate(self.group, self.chain, omega)

    def __repr__(self) -> str:
        return f"ChainCurrent(k={self.k}, p={self.p}, charts={len(self.chain)})"


class BoundaryCurrent:
    """omega -> T(Delta_j omega) for forms of weight T.p - j."""

    def __init__(self, current, j: int):
        if j < 1:
            raise ValueError("j must be at least 1")
        self.current = current
        self.j = j
        self.p = current.p - j
        self.group = current.group

    @property
    def k(self) -> int:
        return self.current.k - 1

    def witness(self, omega: PolyForm) -> ZWitness:
        w = z_solve(omega, self.j, homogeneous_weight(omega))
        if w is None:
            raise ZMembershipFailed(f"{omega.to_str()} is not in Z_{self.j}")
        return w

    def __call__(self, omega: PolyForm) -> Fraction:
        return self.current(delta_r(self.witness(omega)))


def boundary_current(current, j: int) -> BoundaryCurrent:
    return BoundaryCurrent(current, j)


@dataclass
class DualityReport:
    form: str
    p: int
    j: int
    boundary_value: Fraction
    interior_value: Fraction
    delta_form: str
    canonical_witness: bool

    @property
    def holds(self) -> bool:
        return self.boundary_value == self.interior_value

    def to_dict(self) -> Dict[str, object]:
        return {
            "form": self.form,
            "p": self.p,
            "j": self.j,
            "boundary_value": str(self.boundary_value),
            "interior_value": str(self.interior_value),
            "delta_form": self.delta_form,
            "holds": self.holds,
            # the quotient norm would take an infimum over witnesses; only the canonical one is used
            "witness": "canonical" if self.canonical_witness else "solved",
        }


def stokes_duality_check(group, chain: CubicalChain, omega: PolyForm,
                         bound: Optional[CubicalChain] = None) -> DualityReport:
    """Compare the boundary current on omega with the current of the chain on Delta_j omega."""
    if bound is None:
        bound = boundary(chain)
    info = is_spectral_manifold(group, chain, bound)
    p = homogeneous_weight(omega)
    if not info["spectral"] or info["j"] is None:
        raise HypothesisFailed("the chain is not a spectral manifold with nonempty boundary")
    if info["boundary_degree"] != p:
        raise HypothesisFailed(f"the boundary has degree {info['boundary_degree']}, the form has weight {p}")
    j = info["j"]
    witness = z_solve(omega, j, p)
    if witness is None:
        raise ZMembershipFailed(f"{omega.to_str()} is not in Z_{j}")
    lhs, rhs, delta = spectral_pairing(group, chain, bound, witness)
    return DualityReport(omega.to_str(), p, j, lhs, rhs, delta.to_str(), witness.canonical)


# mass --------------------------------------------------------------------------------


@dataclass
class MassEstimate:
    value: Fraction
    used: int
    skipped: int
    best_form: Optional[str]
    kind: str = "lower bound"

    def to_dict(self) -> Dict[str, object]:
        return {"value": float(self.value), "kind": self.kind, "probes_used": self.used,
                "probes_skipped": self.skipped, "best_form": self.best_form}


def _norm_upper(omega: PolyForm) -> Optional[float]:
    """An upper bound for the comass of a constant-coefficient form, or None."""
    if any(not f.is_constant() for f in omega.coeffs.values()):
        return None
    values = [f.constant_term() for f in omega.coeffs.values()]
    if len(values) == 1:
        return abs(float(values[0]))
    return _euclidean(values)


def mass_estimate(current, probes: Sequence[PolyForm]) -> MassEstimate:
    """Largest |T(omega)| / ||omega|| over constant-coefficient probes.

    ||omega|| is bounded above by its Euclidean norm, which dominates every
    weighted comass, so each ratio is below the mass.
    """
    best = Fraction(0)
    best_form = None
    used = skipped = 0
    for omega in probes:
        norm = _norm_upper(omega)
        if not norm:
            skipped += 1
            continue
        used += 1
        value = abs(current(omega))
        ratio = Fraction(value) / Fraction(norm) if value else Fraction(0)
        if ratio > best:
            best, best_form = ratio, omega.to_str()
    return MassEstimate(best, used, skipped, best_form)
