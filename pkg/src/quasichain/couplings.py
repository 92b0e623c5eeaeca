"""Coupling chain generators for disordered spin and Majorana chains.

Chains come in two kinds:

* ``bond``: L couplings J_1..J_L between L spin sites on a ring.
* ``majorana``: 2N couplings of a nearest-neighbor Majorana chain, even
  1-based entries sitting between sites and odd entries within a site.

The multiscale generator multiplies elementary letter couplings across
every inflation layer of a substitution sequence; the last-layer
generator reads only the final letters.  Aubry-Andre-Harper and Gaussian
random chains are provided for comparison.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt

import numpy as np

from .substitution import (
    InflationRule,
    LetterSequence,
    SymmetrizationError,
    inflate_with_ancestry,
)

__all__ = [
    "ElementaryCouplings",
    "CouplingChain",
    "DisorderStats",
    "multiscale_couplings",
    "last_layer_couplings",
    "expand_to_majorana",
    "aah_couplings",
    "random_couplings",
    "disorder_stats",
    "match_aah_amplitude",
]

GOLDEN_RATIO = (1.0 + np.sqrt(5.0)) / 2.0


@dataclass(frozen=True)
class ElementaryCouplings:
    """Per-letter couplings; only the ratio j_b/j_a affects eigenstates."""

    j_a: float = 1.0
    j_b: float = 1.0
    j_o: float = 1.0

    def __post_init__(self):
        if min(self.j_a, self.j_b, self.j_o) <= 0:
            raise ValueError("elementary couplings must be strictly positive")

    @property
    def ratio(self) -> float:
        return self.j_b / self.j_a

    @classmethod
    def from_ratio(cls, r: float) -> "ElementaryCouplings":
        if r <= 0:
            raise ValueError("coupling ratio must be strictly positive")
        return cls(j_a=1.0, j_b=float(r), j_o=1.0)

    def value(self, symbol: str) -> float:
        try:
            return {"a": self.j_a, "b": self.j_b, "o": self.j_o}[symbol]
        except KeyError:
            raise ValueError(f"no elementary coupling for letter {symbol!r}") from None


@dataclass(frozen=True)
class CouplingChain:
    """A cyclic chain of strictly positive couplings with provenance."""

    values: np.ndarray
    kind: str  # "bond" or "majorana"
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if self.kind not in ("bond", "majorana"):
            raise ValueError(f"unknown chain kind {self.kind!r}")
        if vals.ndim != 1 or vals.size == 0:
            raise ValueError("couplings must form a nonempty 1-d array")
        if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
            raise ValueError("couplings must be strictly positive and finite")

    def __len__(self) -> int:
        return int(self.values.size)

    def normalized(self) -> "CouplingChain":
        """Rescale to unit arithmetic mean (eigenstates are unaffected)."""
        return CouplingChain(
            self.values / self.values.mean(),
            self.kind,
            {**self.provenance, "normalized": True},
        )

    def sites(self) -> int:
        """Number of spin sites the chain describes."""
        return len(self) if self.kind == "bond" else len(self) // 2


@dataclass(frozen=True)
class DisorderStats:
    sigma: float  # population standard deviation
    ratio_mean: float  # cyclic mean of max/min over adjacent pairs (R >= 1)
    mean: float


def disorder_stats(chain: CouplingChain) -> DisorderStats:
    v = chain.values
    nxt = np.roll(v, -1)
    big_r = float(np.mean(np.maximum(v, nxt) / np.minimum(v, nxt)))
    return DisorderStats(sigma=float(np.std(v)), ratio_mean=big_r, mean=float(np.mean(v)))


def _ancestor_products(
    rule: InflationRule, seed: LetterSequence, n: int, j: ElementaryCouplings
) -> tuple[np.ndarray, bool]:
    """Multiply elementary couplings along ancestor chains, layer by layer.

    Merged letters (two parents) take the geometric mean of the parent
    products before multiplying their own coupling.  Returns the raw
    products and whether the symmetrized rule was used.
    """
    symmetrized = rule.symmetrized is not None
    tree = inflate_with_ancestry(seed, rule, n, symmetrized=symmetrized)
    prod = np.array([j.value(s) for s in tree.layers[0]], dtype=float)
    for m in range(1, n + 1):
        syms = tree.layers[m]
        pars = tree.parents[m]
        nxt = np.empty(len(syms))
        for i, (s, p) in enumerate(zip(syms, pars)):
            inherited = prod[p[0]] if len(p) == 1 else sqrt(prod[p[0]] * prod[p[1]])
            nxt[i] = j.value(s) * inherited
        prod = nxt
    return prod, symmetrized


def multiscale_couplings(
    rule: InflationRule,
    seed: LetterSequence,
    n: int,
    j: ElementaryCouplings,
    normalize: bool = True,
) -> CouplingChain:
    """Bond couplings from letter products across all inflation layers.

    Every bond multiplies the elementary couplings of its full ancestor
    chain, seed letter included; rescaling all elementary couplings by a
    common factor only changes the normalization.
    """
    if n < 1:
        raise ValueError("multiscale couplings need at least one inflation step")
    if not seed.cyclic:
        raise ValueError("multiscale couplings are defined on cyclic sequences")
    prod, symmetrized = _ancestor_products(rule, seed, n, j)
    chain = CouplingChain(
        prod,
        "bond",
        {
            "generator": "multiscale",
            "rule": rule.name,
            "seed": str(seed),
            "steps": n,
            "j_a": j.j_a,
            "j_b": j.j_b,
            "j_o": j.j_o,
            "ratio": j.ratio,
            "symmetrized": symmetrized,
        },
    )
    return chain.normalized() if normalize else chain


def last_layer_couplings(
    sequence: LetterSequence, j: ElementaryCouplings, normalize: bool = True
) -> CouplingChain:
    """Two-valued bond couplings read off the final letter sequence."""
    symbols = sequence.symbols()
    if "o" in symbols:
        raise ValueError("no last-layer coupling is defined for the letter 'o'")
    vals = np.array([j.value(s) for s in symbols], dtype=float)
    chain = CouplingChain(
        vals,
        "bond",
        {
            "generator": "last-layer",
            "word": symbols if len(symbols) <= 64 else f"<{len(symbols)} letters>",
            "steps": sequence.step,
            "j_a": j.j_a,
            "j_b": j.j_b,
            "ratio": j.ratio,
        },
    )
    return chain.normalized() if normalize else chain


def expand_to_majorana(bond: CouplingChain) -> CouplingChain:
    """Interleave bond couplings with on-site averages of their neighbors.

    1-based even entries J_2k carry bond k; odd entries are the cyclic
    averages J_2k+1 = (J_2k + J_2k+2)/2, with J_1 wrapping around.
    """
    if bond.kind != "bond":
        raise ValueError("expected a bond chain")
    L = len(bond)
    if L < 2:
        raise ValueError("need at least two bonds to expand")
    v = bond.values
    out = np.empty(2 * L)
    out[1::2] = v
    out[2::2] = (v[:-1] + v[1:]) / 2.0
    out[0] = (v[-1] + v[0]) / 2.0
    return CouplingChain(out, "majorana", {**bond.provenance, "expanded": True})


def aah_couplings(length: int, amplitude: float) -> CouplingChain:
    """Aubry-Andre-Harper Majorana chain of the given (even) length.

    1-based even entries follow 1 + D cos(2 pi k phi) with the golden
    ratio phi and k = 1..length/2; odd entries all equal the mean of the
    even ones.  |D| < 1 keeps every coupling positive.
    """
    if length < 2 or length % 2:
        raise ValueError("chain length must be a positive even integer")
    if abs(amplitude) >= 1.0:
        raise ValueError("|D| >= 1 would produce non-positive couplings")
    k = np.arange(1, length // 2 + 1, dtype=float)
    even = 1.0 + amplitude * np.cos(2.0 * np.pi * k * GOLDEN_RATIO)
    out = np.empty(length)
    out[1::2] = even
    out[0::2] = even.mean()
    return CouplingChain(
        out,
        "majorana",
        {
            "generator": "aah",
            "amplitude": float(amplitude),
            "even_entries": "1-based even slots carry the cosine modulation",
        },
    )


def random_couplings(
    length: int, mean: float, variance: float, seed: int, kind: str = "bond"
) -> CouplingChain:
    """Positive couplings drawn from a normal distribution.

    Non-positive draws are resampled so the chain stays valid; the chain
    is left unnormalized so its sample statistics approach (mean, variance).
    """
    if mean <= 0:
        raise ValueError("mean must be strictly positive")
    if variance < 0:
        raise ValueError("variance must be nonnegative")
    rng = np.random.default_rng(seed)
    std = sqrt(variance)
    vals = rng.normal(mean, std, size=length)
    bad = vals <= 0
    while np.any(bad):
        vals[bad] = rng.normal(mean, std, size=int(bad.sum()))
        bad = vals <= 0
    return CouplingChain(
        vals,
        kind,
        {"generator": "random", "mean": mean, "variance": variance, "rng_seed": seed},
    )


def match_aah_amplitude(
    target_sigma: float, length: int, tol: float = 1e-10, max_iter: int = 200
) -> float:
    """Amplitude D whose chain has the requested standard deviation.

    sigma grows monotonically with D on [0, 1), so a bisection suffices.
    """
    if target_sigma < 0:
        raise ValueError("target sigma must be nonnegative")
    if target_sigma == 0:
        return 0.0
    hi_sigma = disorder_stats(aah_couplings(length, 1.0 - 1e-9)).sigma
    if target_sigma > hi_sigma:
        raise ValueError(
            f"target sigma {target_sigma:.4g} unreachable; max is {hi_sigma:.4g} at |D| < 1"
        )
    lo, hi = 0.0, 1.0 - 1e-9
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        s = disorder_stats(aah_couplings(length, mid)).sigma
        if abs(s - target_sigma) < tol:
            return mid
        if s < target_sigma:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
