"""Code families and structural operations: Hamming, Reed-Muller, duals, (u|u+v).

A ``LinearCode`` carries both a full-rank generator and a parity-check
basis; constructors fix coordinate orders explicitly so that downstream
bucket lists and recovery sets are reproducible:

* Hamming parity columns follow binary counting order (column j is the
  binary expansion of j, least significant bit in the first row).
* Reed-Muller evaluation points are ordered base-q least-significant
  digit first, so the first and second halves of the coordinate list are
  exactly the u and u+v blocks of the recursive construction.
"""

from __future__ import annotations

from math import comb
from typing import Iterable, Iterator, Optional

from .fields import (
    CapExceededError,
    ENUMERATION_WORD_CAP,
    Field,
    FieldMatrix,
    FieldVector,
    enumerate_codewords,
    null_space,
    rref,
)

# Budget for the increasing-weight column-dependency search used when a
# code is too large to enumerate directly (cost counted in coefficient
# assignments tried).
COLUMN_SEARCH_CAP = 1 << 24

# Full enumeration is preferred below this many words even when the
# column search would also be possible.
_ENUM_PREFERRED = 1 << 16


class LinearCode:
    """A length-n, dimension-k linear code over a prime field."""

    __slots__ = ("field", "n", "k", "generator", "parity", "label")

    def __init__(self, generator: FieldMatrix, parity: FieldMatrix, label: str = "code"):
        if generator.field != parity.field:
            raise ValueError("generator and parity matrices must share one field")
        if generator.col_count != parity.col_count:
            raise ValueError("generator and parity matrices must share the block length")
        self.field = generator.field
        self.n = generator.col_count
        self.k = generator.row_count
        self.generator = generator
        self.parity = parity
        self.label = label
        if parity.row_count != self.n - self.k:
            raise ValueError(
                f"parity matrix must have n-k={self.n - self.k} rows, got {parity.row_count}")
        if len(rref(generator)[1]) != self.k:
            raise ValueError("generator rows must be linearly independent")
        if len(rref(parity)[1]) != parity.row_count:
            raise ValueError("parity rows must be linearly independent")
        for g in generator.rows:
            for h in parity.rows:
                if g.dot(h):
                    raise ValueError("generator and parity matrices are not orthogonal")

    @classmethod
    def from_generator(cls, field: Field, rows: Iterable[Iterable[int]], *,
                       n: Optional[int] = None, label: str = "code",
                       packed: Optional[bool] = None) -> "LinearCode":
        g = FieldMatrix.from_rows(field, rows, col_count=n, packed=packed)
        return cls(g, null_space(g), label)

    @classmethod
    def from_generator_matrix(cls, g: FieldMatrix, label: str = "code") -> "LinearCode":
        return cls(g, null_space(g), label)

    @property
    def q(self) -> int:
        return self.field.p

    def dual(self) -> "LinearCode":
        return LinearCode(self.parity, self.generator, f"dual({self.label})")

    def contains(self, v: FieldVector) -> bool:
        if v.field != self.field:
            raise ValueError(f"field mismatch: {self.field} vs {v.field}")
        if v.n != self.n:
            raise ValueError(f"length mismatch: {self.n} vs {v.n}")
        return all(h.dot(v) == 0 for h in self.parity.rows)

    def words(self, weight_cap: Optional[int] = None) -> Iterator[FieldVector]:
        return enumerate_codewords(self.generator, weight_cap)

    def codeword(self, message: Iterable[int]) -> FieldVector:
        msg = list(message)
        if len(msg) != self.k:
            raise ValueError(f"message length must be k={self.k}")
        acc = FieldVector.zero(self.field, self.n,
                               packed=(self.q == 2 and (self.k == 0 or self.generator.rows[0].is_packed)))
        for c, row in zip(msg, self.generator.rows):
            if c % self.q:
                acc = acc + row.scale(c)
        return acc

    def min_distance(self) -> int:
        return min_weight_cover(self, cover=False)[0]

    def __repr__(self) -> str:
        return f"LinearCode({self.label}: [{self.n},{self.k}] over {self.field})"


def min_weight_cover(code: LinearCode, *, cover: bool = True) -> tuple:
    """Minimum nonzero codeword weight, plus the coordinates covered by
    minimum-weight codewords (0-based; empty frozenset when ``cover`` is off).

    Enumerates the code when its dimension is the cheaper side, otherwise
    searches the parity-check columns for a smallest dependency.
    """
    k, n, q = code.k, code.n, code.q
    if k == 0:
        raise ValueError("the zero code has no nonzero codewords")
    if k == n:
        return 1, frozenset(range(n)) if cover else frozenset()
    enum_cost = q ** k
    prefer_enum = k <= n - k
    if prefer_enum and enum_cost <= _ENUM_PREFERRED:
        return _min_weight_by_enumeration(code, cover)
    try:
        return _min_weight_by_column_search(code, cover)
    except CapExceededError:
        if enum_cost <= ENUMERATION_WORD_CAP:
            return _min_weight_by_enumeration(code, cover)
        raise


def _min_weight_by_enumeration(code: LinearCode, cover: bool) -> tuple:
    best = None
    covered: set = set()
    for w in code.words():
        wt = w.weight
        if wt == 0:
            continue
        if best is None or wt < best:
            best = wt
            covered = set(w.support) if cover else set()
        elif cover and wt == best:
            covered.update(w.support)
    if best is None:
        raise ValueError("the zero code has no nonzero codewords")
    return best, frozenset(covered)


def _min_weight_by_column_search(code: LinearCode, cover: bool) -> tuple:
    """Find the smallest w such that w parity-check columns admit a full-support
    dependency; that w is the minimum distance. At the minimal w every
    dependency has full support, so collecting supports there is exact."""
    n, q = code.n, code.q
    parity = code.parity
    all_coords = frozenset(range(n))
    budget = 0
    if q == 2:
        cols = [parity.column_bits(j) for j in range(n)]
        for w in range(1, n + 1):
            budget += comb(n, w)
            if budget > COLUMN_SEARCH_CAP:
                raise CapExceededError(
                    f"column-dependency search beyond weight {w - 1} exceeds the budget")
            found = False
            covered: set = set()
            for combo, acc in _combinations_with_xor(cols, n, w):
                if acc == 0:
                    if not cover:
                        return w, frozenset()
                    found = True
                    covered.update(combo)
                    if len(covered) == n:
                        return w, all_coords
            if found:
                return w, frozenset(covered)
    else:
        from itertools import combinations, product

        col_vals = [parity.column_values(j) for j in range(n)]
        rows = parity.row_count
        for w in range(1, n + 1):
            budget += comb(n, w) * (q - 1) ** (w - 1)
            if budget > COLUMN_SEARCH_CAP:
                raise CapExceededError(
                    f"column-dependency search beyond weight {w - 1} exceeds the budget")
            found = False
            covered = set()
            for combo in combinations(range(n), w):
                # first coefficient normalized to 1
                for rest in product(range(1, q), repeat=w - 1):
                    coeffs = (1,) + rest
                    ok = True
                    for r in range(rows):
                        s = 0
                        for j, c in zip(combo, coeffs):
                            s += c * col_vals[j][r]
                        if s % q:
                            ok = False
                            break
                    if ok:
                        if not cover:
                            return w, frozenset()
                        found = True
                        covered.update(combo)
                        break
                if found and len(covered) == n:
                    return w, all_coords
            if found:
                return w, frozenset(covered)
    raise ValueError("no dependency found; parity matrix is not a parity check")


def _combinations_with_xor(cols, n, w):
    """Yield (combo, xor of cols over combo) for all w-subsets, lexicographically."""
    combo = list(range(w))
    accs = [0] * (w + 1)
    for i in range(w):
        accs[i + 1] = accs[i] ^ cols[combo[i]]
    while True:
        yield combo, accs[w]
        i = w - 1
        while i >= 0 and combo[i] == n - w + i:
            i -= 1
        if i < 0:
            return
        combo[i] += 1
        for j in range(i + 1, w):
            combo[j] = combo[j - 1] + 1
        for j in range(i, w):
            accs[j + 1] = accs[j] ^ cols[combo[j]]


class EvaluationPointSet:
    """The q^mu points of F_q^mu in the fixed coordinate order.

    The point at 1-based index i is the base-q expansion of i-1 with x_1
    the least significant digit and x_mu the most significant, so the
    first q^(mu-1) points have x_mu = 0.
    """

    __slots__ = ("q", "mu", "points", "_index")

    def __init__(self, q: int, mu: int):
        if not _prime(q):
            raise ValueError(f"q must be prime, got {q}")
        if mu < 1:
            raise ValueError("mu must be at least 1")
        self.q = q
        self.mu = mu
        pts = []
        for idx in range(q ** mu):
            rem = idx
            coords = []
            for _ in range(mu):
                coords.append(rem % q)
                rem //= q
            pts.append(tuple(coords))
        self.points = tuple(pts)
        self._index = {p: i + 1 for i, p in enumerate(pts)}

    def point(self, i: int) -> tuple:
        """The point at 1-based coordinate index i."""
        return self.points[i - 1]

    def index_of(self, point: tuple) -> int:
        return self._index[tuple(v % self.q for v in point)]

    def __len__(self) -> int:
        return len(self.points)


def _prime(p: int) -> bool:
    try:
        Field(p)
    except ValueError:
        return False
    return True


def evaluation_points(q: int, mu: int) -> EvaluationPointSet:
    return EvaluationPointSet(q, mu)


def hamming_code(s: int) -> LinearCode:
    """The binary [2^s-1, 2^s-1-s, 3] Hamming code, parity columns in counting order."""
    if s < 2:
        raise ValueError("Hamming codes need s >= 2")
    n = (1 << s) - 1
    field = Field(2)
    rows = []
    for d in range(s):
        bits = 0
        for j in range(1, n + 1):
            if (j >> d) & 1:
                bits |= 1 << (j - 1)
        rows.append(FieldVector.from_bits(field, n, bits))
    parity = FieldMatrix(field, rows)
    return LinearCode(null_space(parity), parity, f"Hamming({s})")


def _rm_rows(rho: int, mu: int) -> list:
    n = 1 << mu
    if rho == 0:
        return [(1 << n) - 1]
    if rho == mu:
        return [1 << j for j in range(n)]
    half = 1 << (mu - 1)
    top = [r | (r << half) for r in _rm_rows(rho, mu - 1)]
    bottom = [r << half for r in _rm_rows(rho - 1, mu - 1)]
    return top + bottom


def rm_binary(rho: int, mu: int) -> LinearCode:
    """RM(rho, mu) by the (u|u+v) generator recursion; n=2^mu, k=sum_{i<=rho} C(mu,i)."""
    if not 0 <= rho <= mu:
        raise ValueError(f"need 0 <= rho <= mu, got rho={rho}, mu={mu}")
    field = Field(2)
    n = 1 << mu
    rows = [FieldVector.from_bits(field, n, bits) for bits in _rm_rows(rho, mu)]
    g = FieldMatrix(field, rows, col_count=n)
    code = LinearCode(g, null_space(g), f"RM({rho},{mu})")
    assert code.k == sum(comb(mu, i) for i in range(rho + 1))
    return code


def rm_q_first_order(q: int, mu: int) -> LinearCode:
    """RM_q(1, mu): evaluations of 1, x_1, ..., x_mu on the fixed point order."""
    pts = EvaluationPointSet(q, mu)
    field = Field(q)
    n = q ** mu
    rows = [[1] * n]
    for var in range(mu):
        rows.append([p[var] for p in pts.points])
    g = FieldMatrix.from_rows(field, rows)
    label = f"RM(1,{mu})" if q == 2 else f"RMq({q};1,{mu})"
    return LinearCode(g, null_space(g), label)


def uv_construct(c1: LinearCode, c2: LinearCode) -> LinearCode:
    """The (u | u+v) combination of two codes with equal field and length."""
    if c1.field != c2.field:
        raise ValueError(f"field mismatch: {c1.field} vs {c2.field}")
    if c1.n != c2.n:
        raise ValueError(f"length mismatch: {c1.n} vs {c2.n}")
    rows = [u.concat(u) for u in c1.generator.rows]
    zero = FieldVector.zero(c1.field, c1.n,
                            packed=(c1.q == 2 and (not c2.generator.rows or c2.generator.rows[0].is_packed)))
    rows.extend(zero.concat(v) for v in c2.generator.rows)
    g = FieldMatrix(c1.field, rows, col_count=2 * c1.n)
    return LinearCode(g, null_space(g), f"uv({c1.label},{c2.label})")


def write_code(code: LinearCode) -> str:
    """Serialize as a 'q n k' header plus k generator rows of residues."""
    lines = [f"{code.q} {code.n} {code.k}"]
    for row in code.generator.rows:
        lines.append(" ".join(str(v) for v in row.values))
    return "\n".join(lines) + "\n"


def parse_code(text: str, label: str = "parsed") -> LinearCode:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty code file")
    header = lines[0].split()
    if len(header) != 3:
        raise ValueError(f"malformed header {lines[0]!r}, expected 'q n k'")
    q, n, k = (int(x) for x in header)
    field = Field(q)
    if len(lines) - 1 != k:
        raise ValueError(f"expected {k} generator rows, found {len(lines) - 1}")
    rows = []
    for ln in lines[1:]:
        vals = [int(x) for x in ln.split()]
        if len(vals) != n:
            raise ValueError(f"row has {len(vals)} entries, expected n={n}")
        if any(not 0 <= v < q for v in vals):
            raise ValueError("row entries must be residues in [0, q)")
        rows.append(vals)
    return LinearCode.from_generator(field, rows, n=n, label=label)
