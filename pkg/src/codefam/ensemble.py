"""
Erasure code families: indexed ensembles of same-length linear codes in
which every bounded erasure pattern is correctable by all but a small
fraction of members.

Provides exact (exhaustive) and Monte Carlo family verification, random
sampling at the existence-lemma size, and a deterministic exhaustive
search for tiny inner ensembles.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product

import numpy as np

from codefam import matrix as mx
from codefam.code import LinearCode, corrects_pattern, code_to_text, code_from_text
from codefam.gf import FieldSpec, make_field


class EnsembleError(ValueError):
    pass


class BudgetExceeded(EnsembleError):
    pass


class RateNonpositive(EnsembleError):
    pass


class SearchExhausted(EnsembleError):
    pass


# Running tally of candidate ensembles examined by exhaustive_inner_search;
# lets callers assert that a construction path avoided the search entirely.
SEARCH_STATS = {"ensembles_examined": 0, "calls": 0}


class ErasureFamily:
    """Indexed list of [n, k] codes with family parameters (delta, epsilon)."""

    def __init__(self, codes: list[LinearCode], delta, epsilon):
        if not codes:
            raise EnsembleError("family must contain at least one code")
        n = codes[0].n
        k = codes[0].k
        spec = codes[0].spec
        for c in codes:
            if (c.n, c.k, c.spec) != (n, k, spec):
                raise EnsembleError("all family members must share (spec, n, k)")
        self.codes = list(codes)
        self.spec = spec
        self.n = n
        self.k = k
        self.delta = Fraction(delta)
        self.epsilon = Fraction(epsilon)
        if not (0 <= self.delta < 1 and 0 <= self.epsilon < 1):
            raise EnsembleError("delta and epsilon must lie in [0, 1)")

    @property
    def rate(self) -> Fraction:
        return Fraction(self.k, self.n)

    def __len__(self):
        return len(self.codes)

    def __repr__(self):
        return (f"ErasureFamily({len(self.codes)} codes, [{self.n},{self.k}] "
                f"over GF({self.spec.p}^{self.spec.m}), "
                f"delta={self.delta}, epsilon={self.epsilon})")


@dataclass
class FamilyReport:
    worst_fail_fraction: Fraction
    worst_pattern: tuple
    patterns_tested: int
    mode: str
    rng_seed: int | None = None
    passed: bool = False
    notes: dict = field(default_factory=dict)


def failure_fraction(F: ErasureFamily, pat) -> Fraction:
    """Fraction of family members that cannot correct the pattern."""
    fails = sum(1 for c in F.codes if not corrects_pattern(c, pat))
    return Fraction(fails, len(F.codes))


def max_pattern_size(F: ErasureFamily) -> int:
    return math.floor(F.delta * F.n)


def verify_family(F: ErasureFamily, mode: str = "exhaustive",
                  budget: int = 10 ** 7, rng_seed: int | None = None) -> FamilyReport:
    """Certify the family property.

    Exhaustive mode enumerates every pattern of size exactly floor(delta*n)
    (smaller patterns are covered by correction monotonicity, which is
    property-tested separately, not assumed silently).  Monte Carlo mode
    samples `budget` uniform patterns of that size.  The report passes when
    the worst per-pattern failing fraction is <= epsilon.
    """
    s = max_pattern_size(F)
    worst = Fraction(0)
    witness: tuple = ()
    tested = 0
    if mode == "exhaustive":
        count = math.comb(F.n, s) * len(F.codes)
        if count > budget:
            raise BudgetExceeded(f"{count} rank checks exceed budget {budget}")
        for pat in combinations(range(F.n), s):
            frac = failure_fraction(F, pat)
            tested += 1
            if frac > worst:
                worst, witness = frac, pat
        seed_used = None
    elif mode == "montecarlo":
        if rng_seed is None:
            raise EnsembleError("montecarlo mode requires rng_seed")
        rng = random.Random(rng_seed)
        for _ in range(budget):
            pat = tuple(sorted(rng.sample(range(F.n), s)))
            frac = failure_fraction(F, pat)
            tested += 1
            if frac > worst or (frac == worst and (not witness or pat < witness)):
                worst, witness = frac, pat
        seed_used = rng_seed
    else:
        raise EnsembleError(f"unknown mode {mode!r}")
    return FamilyReport(
        worst_fail_fraction=worst,
        worst_pattern=witness,
        patterns_tested=tested,
        mode=mode,
        rng_seed=seed_used,
        passed=worst <= F.epsilon,
    )


def existence_params(q: int, delta, eta, epsilon) -> tuple[int, int]:
    """Family size and length thresholds from the random-coding argument.

    t_min = ceil(2 / (eta * epsilon * log2 q)),
    n0    = ceil(2 * log2(e / epsilon) / (eta * log2 q)).
    """
    eta = Fraction(eta)
    epsilon = Fraction(epsilon)
    log2q = math.log2(q)
    t_min = math.ceil(2 / (float(eta) * float(epsilon) * log2q))
    n0 = math.ceil(2 * math.log2(math.e / float(epsilon)) / (float(eta) * log2q))
    return t_min, n0


def sample_random_family(spec: FieldSpec, n: int, delta, eta, epsilon,
                         t: int, rng_seed: int) -> ErasureFamily:
    """t codes with uniformly random full-rank k x n generators.

    k = floor((1 - delta - eta) * n).  Generators that come out rank
    deficient are resampled (probability <= q^(k-n) each), keeping the
    family rate exactly uniform.
    """
    delta = Fraction(delta)
    eta = Fraction(eta)
    k = math.floor((1 - delta - eta) * n)
    if k < 1:
        raise RateNonpositive(f"rate (1 - {delta} - {eta}) gives k = {k}")
    rng = np.random.default_rng(rng_seed)
    codes = []
    for _ in range(t):
        while True:
            G = rng.integers(0, spec.q, size=(k, n), dtype=np.int64)
            if mx.rank(spec, G) == k:
                codes.append(LinearCode(spec, G))
                break
    return ErasureFamily(codes, delta, epsilon)


def _rref_generators(spec: FieldSpec, k: int, L: int) -> list[np.ndarray]:
    """All k x L generators in reduced row echelon form, in the canonical
    order induced by row-major integer enumeration.

    One RREF matrix per k-dimensional subspace, so enumerating these walks
    every [L, k] code exactly once.
    """
    q = spec.q
    out = []
    total = q ** (k * L)
    for v in range(total):
        flat = np.zeros(k * L, dtype=np.int64)
        t = v
        for i in range(k * L - 1, -1, -1):
            flat[i] = t % q
            t //= q
        G = flat.reshape(k, L)
        if _is_rref(spec, G):
            out.append(G)
    return out


def _is_rref(spec: FieldSpec, G: np.ndarray) -> bool:
    k, L = G.shape
    prev = -1
    for r in range(k):
        nz = np.nonzero(G[r])[0]
        if len(nz) == 0:
            return False
        lead = int(nz[0])
        if lead <= prev:
            return False
        if G[r, lead] != 1:
            return False
        col = G[:, lead]
        if np.count_nonzero(col) != 1:
            return False
        prev = lead
    return True


def exhaustive_inner_search(spec: FieldSpec, L: int, delta_in, mu,
                            family_size: int, k: int | None = None,
                            budget: int = 10 ** 8) -> ErasureFamily:
    """First ensemble, in canonical order, meeting the family property.

    Candidate codes are enumerated one per subspace (RREF representatives
    in row-major integer order), and ensembles are tuples of those codes
    in product order.  Deterministic; raises SearchExhausted when no
    ensemble of the requested size achieves worst failing fraction <= mu.
    """
    delta_in = Fraction(delta_in)
    mu = Fraction(mu)
    if k is None:
        k = L - math.floor(delta_in * L)
    if k < 1 or k > L:
        raise EnsembleError(f"inner dimension k = {k} out of range")
    if spec.q ** (k * L) > budget:
        raise BudgetExceeded("code enumeration space too large")
    gens = _rref_generators(spec, k, L)
    codes = [LinearCode(spec, G) for G in gens]
    s = math.floor(delta_in * L)
    patterns = list(combinations(range(L), s))
    # per-code correctable-pattern bitmask, shared across ensembles
    masks = []
    for c in codes:
        m = 0
        for idx, pat in enumerate(patterns):
            if corrects_pattern(c, pat):
                m |= 1 << idx
        masks.append(m)
    allowed_fails = mu * family_size
    SEARCH_STATS["calls"] += 1
    for combo in product(range(len(codes)), repeat=family_size):
        SEARCH_STATS["ensembles_examined"] += 1
        ok = True
        for idx in range(len(patterns)):
            bit = 1 << idx
            fails = sum(1 for ci in combo if not masks[ci] & bit)
            if fails > allowed_fails:
                ok = False
                break
        if ok:
            return ErasureFamily([codes[ci] for ci in combo], delta_in, mu)
    raise SearchExhausted(
        f"no size-{family_size} ensemble of [{L},{k}] codes over "
        f"GF({spec.p}^{spec.m}) achieves mu = {mu}")


# ----------------------------------------------------------------------
# Manifest I/O: JSON with inline generators.
# ----------------------------------------------------------------------

def family_to_manifest(F: ErasureFamily, provenance: dict | None = None) -> dict:
    return {
        "field": {"p": F.spec.p, "m": F.spec.m,
                  "irreducible": list(F.spec.irreducible)},
        "n": F.n,
        "k": F.k,
        "delta": str(F.delta),
        "epsilon": str(F.epsilon),
        "codes": [code_to_text(c) for c in F.codes],
        "provenance": provenance or {},
    }


def family_from_manifest(man: dict) -> ErasureFamily:
    codes = [code_from_text(t) for t in man["codes"]]
    return ErasureFamily(codes, Fraction(man["delta"]), Fraction(man["epsilon"]))


def save_family(F: ErasureFamily, path: str, provenance: dict | None = None) -> None:
    with open(path, "w") as fh:
        json.dump(family_to_manifest(F, provenance), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_family(path: str) -> ErasureFamily:
    with open(path) as fh:
        return family_from_manifest(json.load(fh))
