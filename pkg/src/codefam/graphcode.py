"""
Bipartite graph codes on M x N matrices and their nearly-MDS
specialization.

A codeword matrix is produced by encoding a message with a row code
over F_{q^ell} (realized as a bundled Reed-Solomon code over a smaller
extension) and then encoding each row symbol into a length-N row by a
member of a column-erasure family.  Decoding tolerates the erasure of
whole rows and whole columns: surviving rows are column-decoded first,
rows whose column code fails become row-symbol erasures, and the row
code finishes the job.

The nearly-MDS path is the delta_row = 0 case with the matrix columns
re-read as symbols of F_{q^M}; the improved variant replaces the
column-erasure family with a single MDS code over a slightly larger
alphabet and a single outer code across all blocks of all seeds,
eliminating the ensemble search entirely.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations

import numpy as np

from codefam import matrix as mx
from codefam.code import (LinearCode, BundledCode, DecodingFailure, bundle,
                          encode, erasure_decode, reed_solomon)
from codefam.ensemble import ErasureFamily, verify_family
from codefam.gf import FieldSpec, make_field
from codefam.shuffler import make_seeded_random


class GraphCodeError(ValueError):
    pass


class InfeasibleAtDeskScale(GraphCodeError):
    pass


class RowCodeRS:
    """Bundled Reed-Solomon row code over F_{q^ell0}, symbols in F_{q^ell}.

    ell = r * ell0 q-ary digits per row symbol; message is k_row * ell
    q-ary digits.
    """

    def __init__(self, q_spec: FieldSpec, M: int, k_row: int, ell0: int, r: int):
        if q_spec.m != 1:
            raise GraphCodeError("row code requires a prime base alphabet")
        self.q_spec = q_spec
        row_spec = make_field(q_spec.p, ell0)
        if row_spec.q < M:
            raise GraphCodeError(f"row alphabet q^{ell0} < M = {M}")
        self.row_spec = row_spec
        self.base = reed_solomon(row_spec, k_row, M)
        self.bundled = bundle(self.base, r)
        self.M = M
        self.k_row = k_row
        self.ell0 = ell0
        self.r = r
        self.ell = r * ell0
        self.k_total = k_row * self.ell

    @property
    def rate(self) -> Fraction:
        return Fraction(self.k_row, self.M)

    @property
    def max_symbol_erasures(self) -> int:
        return self.M - self.k_row

    def _digits_to_syms(self, digits: np.ndarray) -> np.ndarray:
        """(..., ell) q-ary digits -> (..., r) row-field elements."""
        grouped = digits.reshape(digits.shape[:-1] + (self.r, self.ell0))
        return np.asarray(self.row_spec.from_digits(grouped))

    def _syms_to_digits(self, syms: np.ndarray) -> np.ndarray:
        return self.row_spec.to_digits(syms).reshape(syms.shape[:-1] + (self.ell,))

    def encode_syms(self, msg) -> np.ndarray:
        """q-ary message (k_total,) -> (M, ell) q-ary row symbols."""
        msg = np.asarray(msg, dtype=np.int64).reshape(self.k_row, self.ell)
        bundled_msg = self._digits_to_syms(msg).T            # (r, k_row)
        cw = self.bundled.encode(bundled_msg)                # (r, M)
        return self._syms_to_digits(cw.T)                    # (M, ell)

    def decode_syms(self, syms: list) -> np.ndarray:
        """syms[i] is a length-ell digit vector or None; returns the message."""
        received = [[None] * self.M for _ in range(self.r)]
        for i, s in enumerate(syms):
            if s is not None:
                elems = self._digits_to_syms(np.asarray(s, dtype=np.int64))
                for t in range(self.r):
                    received[t][i] = int(elems[t])
        bundled_msg = self.bundled.erasure_decode(received)  # (r, k_row)
        return self._syms_to_digits(bundled_msg.T).reshape(-1)


class BipartiteGraphCode:
    """[M, N, delta_row, delta_col] graph code on M x N matrices over F_q."""

    def __init__(self, q_spec: FieldSpec, M: int, N: int, delta_row, delta_col,
                 row: RowCodeRS, col_family: ErasureFamily, provenance=None):
        if col_family.n != N or col_family.k != row.ell:
            raise GraphCodeError("column family shape mismatch")
        if len(col_family) > M:
            raise GraphCodeError("column family larger than row count")
        if M % len(col_family) != 0:
            raise GraphCodeError("family size must divide M for repetition")
        self.q_spec = q_spec
        self.M = M
        self.N = N
        self.delta_row = Fraction(delta_row)
        self.delta_col = Fraction(delta_col)
        self.row = row
        self.col_family = col_family
        self.k_total = row.k_total
        self.provenance = dict(provenance or {})
        self._gen = None

    def assignment(self, i: int) -> int:
        """Row i uses column-family code i mod M0 (round-robin repetition)."""
        return i % len(self.col_family)

    @property
    def rate(self) -> Fraction:
        return Fraction(self.k_total, self.M * self.N)

    @property
    def row_rate(self) -> Fraction:
        return self.row.rate

    @property
    def col_rate(self) -> Fraction:
        return Fraction(self.row.ell, self.N)

    def encode_matrix(self, msg) -> np.ndarray:
        msg = np.asarray(msg, dtype=np.int64).reshape(self.k_total)
        syms = self.row.encode_syms(msg)                     # (M, ell)
        out = np.zeros((self.M, self.N), dtype=np.int64)
        for i in range(self.M):
            code = self.col_family.codes[self.assignment(i)]
            out[i] = encode(code, syms[i])
        return out

    def decode_matrix(self, received, S=(), T=()) -> np.ndarray:
        """received: (M, N) with None entries allowed; S/T: erased rows/cols."""
        S = frozenset(S)
        T = frozenset(T)
        syms: list = []
        for i in range(self.M):
            if i in S:
                syms.append(None)
                continue
            word = [None if (j in T or received[i][j] is None)
                    else int(received[i][j]) for j in range(self.N)]
            code = self.col_family.codes[self.assignment(i)]
            try:
                syms.append(erasure_decode(code, word))
            except DecodingFailure:
                syms.append(None)
        return self.row.decode_syms(syms)

    def generator(self) -> np.ndarray:
        """(k_total, M*N) generator, row-major cell order; cached."""
        if self._gen is None:
            G = np.zeros((self.k_total, self.M * self.N), dtype=np.int64)
            for rr in range(self.k_total):
                msg = np.zeros(self.k_total, dtype=np.int64)
                msg[rr] = 1
                G[rr] = self.encode_matrix(msg).reshape(-1)
            self._gen = G
        return self._gen

    def corrects(self, S=(), T=()) -> bool:
        """Rank criterion on the surviving submatrix, no codeword search."""
        S = frozenset(S)
        T = frozenset(T)
        cols = [i * self.N + j for i in range(self.M) if i not in S
                for j in range(self.N) if j not in T]
        return mx.rank(self.q_spec, self.generator()[:, cols]) == self.k_total


def corrects_bipartite(GC: BipartiteGraphCode, S=(), T=()) -> bool:
    return GC.corrects(S, T)


def _sample_column_family(q_spec: FieldSpec, N: int, ell: int, size: int,
                          delta_col, eps_fam, rng_seed: int, budget: int):
    """Random [N, ell] family passing exhaustive verification; resamples."""
    rng = np.random.default_rng(rng_seed)
    for attempt in range(budget):
        codes = []
        while len(codes) < size:
            G = rng.integers(0, q_spec.q, size=(ell, N), dtype=np.int64)
            if mx.rank(q_spec, G) == ell:
                codes.append(LinearCode(q_spec, G))
        fam = ErasureFamily(codes, Fraction(delta_col), Fraction(eps_fam))
        if verify_family(fam, budget=10 ** 8).passed:
            return fam, attempt + 1
    raise InfeasibleAtDeskScale(
        f"no [{N},{ell}] family of size {size} found in {budget} attempts")


def build_bipartite(q: int, M: int, N: int, delta_row, delta_col, eta,
                    *, rng_seed: int = 0, budget: int = 200,
                    ell: int | None = None, ell0: int | None = None,
                    k_row: int | None = None, family_size: int | None = None,
                    eps_fam=None) -> BipartiteGraphCode:
    """Explicit-path bipartite graph code from desk-scale components.

    The row code is Reed-Solomon over F_{q^ell0} (q^ell0 >= M) bundled to
    symbols of F_{q^ell}; the column family is sampled and exhaustively
    verified at (delta_col, eps_fam), then repeated round-robin over the
    rows.  Feasibility check: erased rows plus worst-case family-failing
    rows must stay within the row code's erasure tolerance.
    """
    q_spec = make_field(*_prime_power(q))
    if q_spec.m != 1:
        raise InfeasibleAtDeskScale("composite constructions require prime q")
    delta_row = Fraction(delta_row)
    delta_col = Fraction(delta_col)
    eta = Fraction(eta)
    if ell0 is None:
        ell0 = 1
        while q ** ell0 < M:
            ell0 += 1
    if ell is None:
        ell = ell0
    if ell % ell0 != 0:
        raise GraphCodeError(f"ell = {ell} must be a multiple of ell0 = {ell0}")
    if k_row is None:
        k_row = max(1, M - math.floor(delta_row * M)
                    - max(1, math.floor(eta * M)))
    if family_size is None:
        family_size = M
    if eps_fam is None:
        eps_fam = Fraction(1, family_size)
    eps_fam = Fraction(eps_fam)
    erased = math.floor(delta_row * M)
    failing = math.floor(eps_fam * family_size) * (M // family_size)
    if erased + failing > M - k_row:
        raise InfeasibleAtDeskScale(
            f"row code [{M},{k_row}] cannot absorb {erased} erased + "
            f"{failing} family-failing rows")
    row = RowCodeRS(q_spec, M, k_row, ell0, ell // ell0)
    fam, attempts = _sample_column_family(q_spec, N, ell, family_size,
                                          delta_col, eps_fam, rng_seed, budget)
    return BipartiteGraphCode(
        q_spec, M, N, delta_row, delta_col, row, fam,
        provenance={"rng_seed": rng_seed, "sampling_attempts": attempts,
                    "eps_fam": str(eps_fam), "eta": str(eta)})


def _prime_power(q: int) -> tuple[int, int]:
    for p in range(2, q + 1):
        if q % p == 0:
            m = 0
            t = q
            while t % p == 0:
                t //= p
                m += 1
            if t != 1:
                raise GraphCodeError(f"q = {q} is not a prime power")
            return p, m
    raise GraphCodeError(f"bad q = {q}")


class RandomMatrixCode:
    """Span of k uniformly random M x N matrices (existence-bound oracle)."""

    def __init__(self, q_spec: FieldSpec, M: int, N: int, k: int, rng_seed: int):
        rng = np.random.default_rng(rng_seed)
        self.q_spec = q_spec
        self.M = M
        self.N = N
        self.G = rng.integers(0, q_spec.q, size=(k, M * N), dtype=np.int64)
        self.dim = mx.rank(q_spec, self.G)

    def corrects(self, S=(), T=()) -> bool:
        S = frozenset(S)
        T = frozenset(T)
        cols = [i * self.N + j for i in range(self.M) if i not in S
                for j in range(self.N) if j not in T]
        return mx.rank(self.q_spec, self.G[:, cols]) == self.dim


def sample_random_bipartite(q: int, M: int, N: int, rate, rng_seed: int) -> RandomMatrixCode:
    k = math.floor(Fraction(rate) * M * N)
    if k < 1:
        raise GraphCodeError("rate too small for a single generator")
    return RandomMatrixCode(make_field(*_prime_power(q)), M, N, k, rng_seed)


# ----------------------------------------------------------------------
# Nearly-MDS codes: delta_row = 0, columns bundled into F_{q^M} symbols.
# ----------------------------------------------------------------------

class NearlyMDSCode:
    """Column-symbol view of an M-row matrix code: alphabet F_Q, Q = q^M."""

    def __init__(self, inner, M_rows: int, N: int, delta, eta):
        self.inner = inner
        self.M_rows = M_rows
        self.N = N
        self.delta = Fraction(delta)
        self.eta = Fraction(eta)
        self.q_spec = inner.q_spec
        self.k_total = inner.k_total

    @property
    def rate(self) -> Fraction:
        return Fraction(self.k_total, self.M_rows * self.N)

    @property
    def log_Q(self) -> int:
        return self.M_rows  # Q = q^M_rows

    def encode_columns(self, msg) -> np.ndarray:
        """Message -> (M_rows, N) matrix; column j is one F_Q symbol."""
        return self.inner.encode_matrix(msg)

    def decode_columns(self, received, T=()) -> np.ndarray:
        return self.inner.decode_matrix(received, S=(), T=T)

    def corrects_columns(self, T=()) -> bool:
        return self.inner.corrects((), T)


def build_nearly_mds(q: int, N: int, delta, eta, *, M: int = 4,
                     rng_seed: int = 0, budget: int = 200,
                     ell: int | None = None, ell0: int | None = None,
                     k_row: int | None = None,
                     eps_fam=None) -> NearlyMDSCode:
    """Nearly-MDS code over F_{q^M}: the delta_row = 0 bipartite case."""
    inner = build_bipartite(q, M, N, 0, delta, eta, rng_seed=rng_seed,
                            budget=budget, ell=ell, ell0=ell0, k_row=k_row,
                            family_size=M, eps_fam=eps_fam)
    code = NearlyMDSCode(inner, M, N, delta, eta)
    if code.rate < 1 - code.delta - code.eta:
        raise InfeasibleAtDeskScale(
            f"instance rate {code.rate} below target {1 - code.delta - code.eta}")
    return code


class ImprovedNearlyMDSCode:
    """Single-inner-MDS, single-outer-code nearly-MDS construction.

    Codewords are D x N matrices over F_q; each row z is partitioned into
    M_b blocks of L positions by seed z of a shuffler.  A block carries a
    Reed-Solomon codeword over F_{q'}, q' = q^e the smallest power of q
    with enough elements for the block; a q-ary erasure marks its whole
    q'-symbol erased (pessimistic).  One outer Reed-Solomon code over
    F_{q^ell} spans all M_b * D blocks.  No ensemble search is performed.
    """

    def __init__(self, q_spec: FieldSpec, N: int, delta, eta, M_b: int, D: int,
                 e: int, k_inner: int, k_out: int, rng_seed: int):
        if q_spec.m != 1:
            raise GraphCodeError("composite constructions require prime q")
        self.q_spec = q_spec
        self.N = N
        self.delta = Fraction(delta)
        self.eta = Fraction(eta)
        self.M_b = M_b
        self.D = D
        if N % M_b != 0:
            raise GraphCodeError("block count must divide N")
        self.L = N // M_b
        if self.L % e != 0:
            raise GraphCodeError("q'-symbol size must divide block length")
        self.e = e
        self.L2 = self.L // e                       # block length in q'-symbols
        self.inner_spec = make_field(q_spec.p, e)
        if self.inner_spec.q < self.L2:
            raise GraphCodeError(f"q' = {self.inner_spec.q} < block length {self.L2}")
        self.k_inner = k_inner
        self.inner = reed_solomon(self.inner_spec, k_inner, self.L2)
        self.ell = k_inner * e                      # q-ary digits per block message
        self.outer_spec = make_field(q_spec.p, self.ell)
        self.k_out = k_out
        self.outer = reed_solomon(self.outer_spec, k_out, M_b * D)
        self.sh = make_seeded_random(N, M_b, D, rng_seed)
        self.k_total = k_out * self.ell
        self.M_rows = D
        self._gen = None

    @property
    def rate(self) -> Fraction:
        return Fraction(self.k_total, self.D * self.N)

    @property
    def log_Q(self) -> int:
        return self.D  # columns read as F_{q^D} symbols

    def _block_positions(self, z: int) -> list[list[int]]:
        return self.sh.blocks(z)

    def encode_columns(self, msg) -> np.ndarray:
        msg = np.asarray(msg, dtype=np.int64).reshape(self.k_total)
        outer_msg = self.outer_spec.from_digits(
            self.q_spec.to_digits(msg.reshape(self.k_out, self.ell))
            .reshape(self.k_out, self.ell))
        outer_cw = encode(self.outer, np.asarray(outer_msg, dtype=np.int64))
        out = np.zeros((self.D, self.N), dtype=np.int64)
        for z in range(self.D):
            blocks = self._block_positions(z)
            for i in range(self.M_b):
                sym = int(outer_cw[z * self.M_b + i])
                digits = self.outer_spec.to_digits(sym)          # (ell,)
                inner_msg = self.inner_spec.from_digits(
                    np.asarray(digits).reshape(self.k_inner, self.e))
                word = encode(self.inner, np.asarray(inner_msg, dtype=np.int64))
                qdigits = self.inner_spec.to_digits(word).reshape(-1)  # (L,)
                for j, x in enumerate(blocks[i]):
                    out[z, x] = qdigits[j]
        return out

    def decode_columns(self, received, T=()) -> np.ndarray:
        T = frozenset(T)
        outer_received: list = []
        for z in range(self.D):
            blocks = self._block_positions(z)
            for i in range(self.M_b):
                word: list = [None] * self.L2
                ok_digits = np.zeros(self.L, dtype=np.int64)
                present = np.ones(self.L2, dtype=bool)
                for j, x in enumerate(blocks[i]):
                    if x in T or received[z][x] is None:
                        present[j // self.e] = False
                    else:
                        ok_digits[j] = int(received[z][x])
                for s in range(self.L2):
                    if present[s]:
                        word[s] = int(self.inner_spec.from_digits(
                            ok_digits[s * self.e:(s + 1) * self.e]))
                try:
                    inner_msg = erasure_decode(self.inner, word)
                    digits = self.inner_spec.to_digits(inner_msg).reshape(-1)
                    outer_received.append(int(self.outer_spec.from_digits(digits)))
                except DecodingFailure:
                    outer_received.append(None)
        outer_msg = erasure_decode(self.outer, outer_received)
        digits = self.outer_spec.to_digits(outer_msg)            # (k_out, ell)
        return np.asarray(self.q_spec.from_digits(
            np.asarray(digits).reshape(self.k_out * self.ell, 1))).reshape(-1)

    def generator(self) -> np.ndarray:
        if self._gen is None:
            G = np.zeros((self.k_total, self.D * self.N), dtype=np.int64)
            for rr in range(self.k_total):
                msg = np.zeros(self.k_total, dtype=np.int64)
                msg[rr] = 1
                G[rr] = self.encode_columns(msg).reshape(-1)
            self._gen = G
        return self._gen

    def corrects_columns(self, T=()) -> bool:
        T = frozenset(T)
        cols = [z * self.N + j for z in range(self.D)
                for j in range(self.N) if j not in T]
        return mx.rank(self.q_spec, self.generator()[:, cols]) == self.k_total


def build_nearly_mds_improved(q: int, N: int, delta, eta, *, M_b: int = 2,
                              D: int = 4, rng_seed: int = 0) -> ImprovedNearlyMDSCode:
    """Improved nearly-MDS construction; derives all sizes from (N, delta).

    Inner: single RS over F_{q^e}, e the smallest exponent with
    q^e >= L / e for some divisor split of the block length L = N / M_b.
    Outer: single RS over F_{q^ell} of length M_b * D whose distance covers
    the worst case of floor(f / (inner erasure tolerance + 1)) failing
    blocks per seed, f = floor(delta * N).
    """
    from codefam.ensemble import SEARCH_STATS
    search_before = SEARCH_STATS["ensembles_examined"]
    q_spec = make_field(*_prime_power(q))
    delta = Fraction(delta)
    eta = Fraction(eta)
    if N % M_b != 0:
        raise InfeasibleAtDeskScale(f"M_b = {M_b} must divide N = {N}")
    L = N // M_b
    e = None
    for cand in range(1, L + 1):
        if L % cand == 0 and q ** cand >= L // cand:
            e = cand
            break
    if e is None:
        raise InfeasibleAtDeskScale("no q'-symbol size fits the block length")
    L2 = L // e
    f = math.floor(delta * N)
    best = None
    for k_inner in range(1, L2 + 1):
        tol = L2 - k_inner                       # inner erasure tolerance
        fail_per_seed = f // (tol + 1)
        total_fail = D * fail_per_seed
        k_out = M_b * D - total_fail
        if k_out < 1:
            continue
        rate = Fraction(k_out * k_inner * e, D * N)
        if best is None or rate > best[0]:
            best = (rate, k_inner, k_out)
    if best is None:
        raise InfeasibleAtDeskScale("no feasible inner dimension")
    rate, k_inner, k_out = best
    if rate < 1 - delta - eta:
        raise InfeasibleAtDeskScale(
            f"instance rate {rate} below target {1 - delta - eta}")
    code = ImprovedNearlyMDSCode(q_spec, N, delta, eta, M_b, D, e,
                                 k_inner, k_out, rng_seed)
    assert SEARCH_STATS["ensembles_examined"] == search_before, \
        "improved construction must not invoke the ensemble search"
    code.search_enumerations = 0
    return code
