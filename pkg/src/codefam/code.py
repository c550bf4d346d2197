"""
F_q-linear block codes.

A LinearCode is a full-row-rank generator matrix over a FieldSpec.
Erasure correction is rank-characterized: a pattern S is correctable
exactly when the generator with the columns in S removed still has full
row rank, and decoding solves the linear system on the survivors.

Positions and erasure patterns are 0-based throughout the library.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import numpy as np

from codefam import matrix as mx
from codefam.gf import FieldSpec, make_field, parse_field_tag


class CodeError(ValueError):
    pass


class LengthMismatch(CodeError):
    pass


class DimensionMismatch(CodeError):
    pass


class TooManyPoints(CodeError):
    pass


class DuplicatePoint(CodeError):
    pass


class TooLarge(CodeError):
    pass


class Infeasible(CodeError):
    pass


class DecodingFailure(Exception):
    pass


BRUTE_FORCE_BOUND = 1 << 20


class ErasurePattern:
    """Set of erased codeword positions (0-based) for a length-n code."""

    __slots__ = ("n", "erased")

    def __init__(self, n: int, erased):
        erased = frozenset(int(e) for e in erased)
        if erased and (min(erased) < 0 or max(erased) >= n):
            raise CodeError(f"erased positions out of range for n={n}")
        self.n = n
        self.erased = erased

    def survivors(self) -> list[int]:
        return [i for i in range(self.n) if i not in self.erased]

    def __repr__(self):
        return f"ErasurePattern(n={self.n}, erased={sorted(self.erased)})"


def _as_erased(C, pat) -> frozenset:
    if isinstance(pat, ErasurePattern):
        if pat.n != C.n:
            raise LengthMismatch(f"pattern length {pat.n} != code length {C.n}")
        return pat.erased
    return ErasurePattern(C.n, pat).erased


class LinearCode:
    """[n, k] linear code over GF(q), held as a k x n generator matrix."""

    def __init__(self, spec: FieldSpec, G):
        G = mx.as_matrix(spec, G)
        k, n = G.shape
        if k < 1 or n < 1:
            raise CodeError("generator must be nonempty")
        if mx.rank(spec, G) != k:
            raise CodeError("generator matrix is not full row rank")
        self.spec = spec
        self.k = k
        self.n = n
        self.G = G
        self._packed = None  # GF(2) bit-packed rows, built lazily

    @property
    def rate(self) -> Fraction:
        return Fraction(self.k, self.n)

    def _packed_rows(self):
        if self._packed is None:
            self._packed = mx.pack_rows(self.G)
        return self._packed

    def __repr__(self):
        return f"LinearCode([{self.n},{self.k}] over GF({self.spec.p}^{self.spec.m}))"


def encode(C: LinearCode, msg) -> np.ndarray:
    msg = np.asarray(msg, dtype=np.int64)
    if msg.shape != (C.k,):
        raise LengthMismatch(f"message length {msg.shape} != k={C.k}")
    return mx.matmul(C.spec, msg[None, :], C.G)[0]


def corrects_pattern(C: LinearCode, pat) -> bool:
    """True iff the generator restricted to surviving columns has rank k."""
    erased = _as_erased(C, pat)
    if not erased:
        return True
    if C.n - len(erased) < C.k:
        return False
    spec = C.spec
    if spec.p == 2 and spec.m == 1:
        mask = 0
        for e in erased:
            mask |= 1 << e
        keep = ~mask
        return mx.rank_packed([r & keep for r in C._packed_rows()]) == C.k
    surv = [i for i in range(C.n) if i not in erased]
    return mx.rank(spec, C.G[:, surv]) == C.k


def erasure_decode(C: LinearCode, received):
    """Recover the message from a codeword with None marking erasures.

    Raises DecodingFailure when the surviving positions do not pin down a
    unique message.
    """
    if len(received) != C.n:
        raise LengthMismatch(f"received length {len(received)} != n={C.n}")
    surv = [i for i, v in enumerate(received) if v is not None]
    b = np.array([int(received[i]) for i in surv], dtype=np.int64)
    # G[:, surv]^T x = received_surv
    x = mx.solve(C.spec, C.G[:, surv].T, b)
    if x is mx.NO_SOLUTION or x is mx.UNDERDETERMINED:
        raise DecodingFailure(f"erasure pattern of size {C.n - len(surv)} uncorrectable")
    return x


def min_distance(C: LinearCode) -> int:
    """Minimum Hamming weight over nonzero codewords.

    Enumerates messages when q^k is small; otherwise falls back to the
    erasure-pattern characterization (the distance is the smallest size of
    an uncorrectable pattern), which only needs 2^n to be small.
    """
    q, k, n = C.spec.q, C.k, C.n
    if q ** k <= BRUTE_FORCE_BOUND:
        best = n
        total = q ** k
        chunk = 1 << 16
        for lo in range(1, total, chunk):
            idx = np.arange(lo, min(lo + chunk, total), dtype=np.int64)
            msgs = np.stack([(idx // q ** i) % q for i in range(k)], axis=1)
            cws = mx.matmul(C.spec, msgs, C.G)
            w = int(np.count_nonzero(cws, axis=1).min())
            if w < best:
                best = w
                if best == 1:
                    return best
        return best
    if 2 ** n <= BRUTE_FORCE_BOUND:
        for w in range(1, n + 1):
            for S in combinations(range(n), w):
                if not corrects_pattern(C, S):
                    return w
        return n  # unreachable for k >= 1
    raise TooLarge(f"q^k = {q}^{k} and 2^n both exceed the brute-force bound")


def reed_solomon(spec: FieldSpec, k: int, n: int, points=None) -> LinearCode:
    """RS code: G[i, j] = points[j]^i (row i = coefficient of x^i).

    Default evaluation points are the first n field elements in canonical
    encoding order.
    """
    if n > spec.q:
        raise TooManyPoints(f"n={n} exceeds field size q={spec.q}")
    if not 1 <= k <= n:
        raise CodeError(f"need 1 <= k <= n, got k={k}, n={n}")
    if points is None:
        points = list(range(n))
    points = [int(x) for x in points]
    if len(set(points)) != len(points):
        raise DuplicatePoint("evaluation points must be distinct")
    if len(points) != n:
        raise LengthMismatch("need exactly n evaluation points")
    G = np.zeros((k, n), dtype=np.int64)
    for j, x in enumerate(points):
        for i in range(k):
            G[i, j] = spec.pow(x, i)
    return LinearCode(spec, G)


class BundledCode:
    """r interleaved independent codewords of a base code.

    Symbol j of the bundled code is column j of an (r, n) array, i.e. an
    element of F_{q^{r*ell0}} when the base alphabet is F_{q^ell0}.  Length,
    rate, and the set of correctable erasure patterns all match the base
    code; bundling only enlarges the alphabet.
    """

    def __init__(self, base: LinearCode, r: int):
        if r < 1:
            raise CodeError("bundle factor must be >= 1")
        self.base = base
        self.r = r
        self.spec = base.spec
        self.k = base.k
        self.n = base.n

    @property
    def rate(self) -> Fraction:
        return self.base.rate

    def encode(self, msg) -> np.ndarray:
        msg = np.asarray(msg, dtype=np.int64)
        if msg.shape != (self.r, self.k):
            raise LengthMismatch(f"message shape {msg.shape} != ({self.r},{self.k})")
        return np.stack([encode(self.base, msg[t]) for t in range(self.r)])

    def corrects_pattern(self, pat) -> bool:
        return corrects_pattern(self.base, pat)

    def erasure_decode(self, received) -> np.ndarray:
        """received: (r, n) array with None marks, erasures column-aligned."""
        out = np.zeros((self.r, self.k), dtype=np.int64)
        for t in range(self.r):
            out[t] = erasure_decode(self.base, list(received[t]))
        return out


def bundle(C: LinearCode, r: int) -> BundledCode:
    return BundledCode(C, r)


def symbol_digit_map(outer_spec: FieldSpec, inner_spec: FieldSpec) -> int:
    """Number of inner-alphabet symbols per outer symbol.

    Outer symbols decompose into base-p digits grouped inner_spec.m at a
    time.  The decomposition is additive for any pair of fields with the
    same characteristic, and fully scalar-linear over the inner alphabet
    when that alphabet is the prime field.  Composite constructions in
    this library therefore fix a prime inner alphabet.
    """
    if outer_spec.p != inner_spec.p:
        raise DimensionMismatch("fields must share characteristic")
    if outer_spec.m % inner_spec.m != 0:
        raise DimensionMismatch(
            f"inner degree {inner_spec.m} does not divide outer degree {outer_spec.m}")
    return outer_spec.m // inner_spec.m


def split_symbols(outer_spec: FieldSpec, inner_spec: FieldSpec, vec) -> np.ndarray:
    """Expand outer-field symbols into inner-field symbol vectors."""
    ell = symbol_digit_map(outer_spec, inner_spec)
    vec = np.asarray(vec, dtype=np.int64)
    digits = outer_spec.to_digits(vec)            # (..., outer m)
    chunks = digits.reshape(vec.shape + (ell, inner_spec.m))
    return np.asarray(inner_spec.from_digits(chunks)).reshape(vec.shape[:-1] + (-1,))


def join_symbols(outer_spec: FieldSpec, inner_spec: FieldSpec, vec) -> np.ndarray:
    """Inverse of split_symbols."""
    ell = symbol_digit_map(outer_spec, inner_spec)
    vec = np.asarray(vec, dtype=np.int64)
    chunks = inner_spec.to_digits(vec.reshape(-1, ell))   # (n_out, ell, inner m)
    digits = chunks.reshape(-1, outer_spec.m)
    return np.asarray(outer_spec.from_digits(digits)).reshape(-1)


def concatenate(outer: LinearCode, inner: LinearCode) -> LinearCode:
    """Forney concatenation: outer over F_{q^ell}, inner [L, ell] over F_q.

    Each outer codeword symbol is split into ell q-ary symbols and encoded
    by the inner code.  Requires a prime inner alphabet so the symbol
    splitting is scalar-linear and the result is a genuine F_q-linear code.
    """
    ell = symbol_digit_map(outer.spec, inner.spec)
    if inner.k != ell:
        raise DimensionMismatch(
            f"inner dimension {inner.k} != outer alphabet exponent {ell}")
    if inner.spec.m != 1:
        raise DimensionMismatch("concatenation requires a prime inner alphabet")
    q = inner.spec
    k_total = outer.k * ell
    G = np.zeros((k_total, outer.n * inner.n), dtype=np.int64)
    for i in range(outer.k):
        for t in range(ell):
            # outer message = e_i times the t-th digit basis element of F_Q
            msg = np.zeros(outer.k, dtype=np.int64)
            msg[i] = outer.spec.p ** t
            cw = encode(outer, msg)
            inner_syms = split_symbols(outer.spec, q, cw).reshape(outer.n, ell)
            for b in range(outer.n):
                G[i * ell + t, b * inner.n:(b + 1) * inner.n] = encode(inner, inner_syms[b])
    return LinearCode(q, G)


def expand_code(C: LinearCode, sub: FieldSpec) -> LinearCode:
    """Re-express a code over GF(p^m) as a code over the prime field.

    Equivalent to concatenating with the identity inner code.
    """
    from codefam.matrix import identity
    inner = LinearCode(sub, identity(symbol_digit_map(C.spec, sub)))
    return concatenate(C, inner)


class TensorCode:
    """Tensor product: matrices whose columns lie in C1 and rows in C2."""

    def __init__(self, C1: LinearCode, C2: LinearCode):
        if C1.spec != C2.spec:
            raise CodeError("tensor factors must share a field")
        self.spec = C1.spec
        self.C1 = C1
        self.C2 = C2
        self.shape = (C1.n, C2.n)
        self.k = C1.k * C2.k

    def encode(self, msg) -> np.ndarray:
        """msg: (k1, k2) array -> (n1, n2) codeword G1^T msg G2."""
        msg = np.asarray(msg, dtype=np.int64)
        if msg.shape != (self.C1.k, self.C2.k):
            raise LengthMismatch(f"message shape {msg.shape}")
        tmp = mx.matmul(self.spec, self.C1.G.T, msg)
        return mx.matmul(self.spec, tmp, self.C2.G)

    def basis(self) -> np.ndarray:
        """(k1*k2, n1*n2) generator; row (i*k2+j) encodes unit message e_ij."""
        out = np.zeros((self.k, self.shape[0] * self.shape[1]), dtype=np.int64)
        for i in range(self.C1.k):
            for j in range(self.C2.k):
                m = np.zeros((self.C1.k, self.C2.k), dtype=np.int64)
                m[i, j] = 1
                out[i * self.C2.k + j] = self.encode(m).reshape(-1)
        return out


def tensor(C1: LinearCode, C2: LinearCode) -> TensorCode:
    return TensorCode(C1, C2)


def _int_to_vec(v: int, q: int, n: int) -> np.ndarray:
    """Base-q digits of v, most significant digit first (canonical order)."""
    out = np.zeros(n, dtype=np.int64)
    for i in range(n - 1, -1, -1):
        out[i] = v % q
        v //= q
    return out


def gv_search(spec: FieldSpec, n: int, d: int) -> LinearCode:
    """Greedy search for a code of length n and min distance >= d.

    Scans candidate generator rows in canonical integer order and keeps a
    row whenever the enlarged span still has minimum weight >= d.  The
    result is inclusion-maximal (no further row can be added), determinate,
    and meets the Gilbert-Varshamov dimension on the small instances this
    library targets.
    """
    q = spec.q
    if q ** n > BRUTE_FORCE_BOUND * 16:
        raise TooLarge(f"q^n = {q}^{n} too large for exhaustive row scan")
    if d > n:
        raise Infeasible(f"no length-{n} code has distance {d}")
    rows: list[np.ndarray] = []
    span = {0: np.zeros(n, dtype=np.int64)}  # span elements keyed by encoding
    for v in range(1, q ** n):
        vec = _int_to_vec(v, q, n)
        ok = True
        new = {}
        for w in span.values():
            for c in range(1, q):
                cand = spec.add(w, spec.mul(np.int64(c), vec))
                key = int(np.dot(cand, q ** np.arange(n - 1, -1, -1)))
                if key in span or key in new:
                    ok = False  # v already in span (c*v = w' - w)
                    break
                if np.count_nonzero(cand) < d:
                    ok = False
                    break
                new[key] = cand
            if not ok:
                break
        if ok:
            rows.append(vec)
            span.update(new)
    if not rows:
        raise Infeasible(f"no [{n}, >=1] code with distance {d} found")
    return LinearCode(spec, np.stack(rows))


def plotkin_rate_bound(q: int, delta) -> Fraction:
    delta = Fraction(delta)
    if not 0 <= delta <= 1:
        raise CodeError("delta must lie in [0, 1]")
    bound = 1 - delta * Fraction(q, q - 1)
    return max(Fraction(0), bound)


def dual_parity(C: LinearCode) -> np.ndarray:
    """(n-k) x n parity matrix H with G H^T = 0 (possibly 0 rows)."""
    return mx.kernel_basis(C.spec, C.G)


# ----------------------------------------------------------------------
# Serialization: line 1 "field p m <irreducible coeffs>", line 2 "k n",
# then k rows of n integers.
# ----------------------------------------------------------------------

def save_code(C: LinearCode, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(code_to_text(C))


def code_to_text(C: LinearCode) -> str:
    lines = [f"field {C.spec.p} {C.spec.m} " + " ".join(map(str, C.spec.irreducible)),
             f"{C.k} {C.n}"]
    for row in C.G:
        lines.append(" ".join(str(int(x)) for x in row))
    return "\n".join(lines) + "\n"


def code_from_text(text: str) -> LinearCode:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    head = lines[0].split()
    if head[0] != "field":
        raise CodeError("bad code file: missing field header")
    p, m = int(head[1]), int(head[2])
    spec = FieldSpec(p, m, tuple(int(c) for c in head[3:3 + m + 1]))
    k, n = map(int, lines[1].split())
    G = np.array([[int(x) for x in lines[2 + i].split()] for i in range(k)],
                 dtype=np.int64)
    if G.shape != (k, n):
        raise CodeError("bad code file: generator shape mismatch")
    return LinearCode(spec, G)


def load_code(path: str) -> LinearCode:
    with open(path) as fh:
        return code_from_text(fh.read())
