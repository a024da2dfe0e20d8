"""Prime-field arithmetic and the dense GF(p) linear algebra everything else consumes.

GF(2) vectors are packed into Python integers, one bit per coordinate;
other prime fields store tuples of residues. Both storage kinds behave
identically, so every algorithm below is written once against the
``FieldVector`` interface. Positions are 0-indexed inside this module;
the 1-based coordinate numbering of the user-facing layers is applied by
the modules that build on it.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Optional, Sequence

ENUMERATION_WORD_CAP = 1 << 24


class CapExceededError(RuntimeError):
    """A computation was refused because it exceeds a search budget."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


class Field:
    """The prime field GF(p). Scalars are plain int residues in [0, p)."""

    __slots__ = ("p",)

    def __init__(self, p: int):
        if not isinstance(p, int) or isinstance(p, bool) or not _is_prime(p):
            raise ValueError(f"field modulus must be a prime integer, got {p!r}")
        self.p = p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in GF({self.p})")
        return pow(a, self.p - 2, self.p)

    def element(self, value: int) -> "FieldElement":
        return FieldElement(value % self.p, self)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("GF", self.p))

    def __repr__(self) -> str:
        return f"GF({self.p})"


GF2 = Field(2)


class FieldElement:
    """A residue bound to its field, with checked arithmetic."""

    __slots__ = ("value", "field")

    def __init__(self, value: int, field: Field):
        if not 0 <= value < field.p:
            raise ValueError(f"residue {value} out of range for {field}")
        self.value = value
        self.field = field

    def _coerced(self, other: "FieldElement") -> int:
        if not isinstance(other, FieldElement):
            raise TypeError(f"expected FieldElement, got {type(other).__name__}")
        if other.field != self.field:
            raise ValueError(f"modulus mismatch: {self.field} vs {other.field}")
        return other.value

    def __add__(self, other: "FieldElement") -> "FieldElement":
        return FieldElement(self.field.add(self.value, self._coerced(other)), self.field)

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        return FieldElement(self.field.sub(self.value, self._coerced(other)), self.field)

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        return FieldElement(self.field.mul(self.value, self._coerced(other)), self.field)

    def __neg__(self) -> "FieldElement":
        return FieldElement(self.field.neg(self.value), self.field)

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field.inv(self.value), self.field)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FieldElement)
            and other.field == self.field
            and other.value == self.value
        )

    def __hash__(self) -> int:
        return hash((self.field.p, self.value))

    def __repr__(self) -> str:
        return f"{self.value} (mod {self.field.p})"


class FieldVector:
    """Immutable vector over GF(p).

    Storage is either a packed bitmask (``_bits``, GF(2) only) or a tuple
    of residues (``_vals``). The packed path is the default for GF(2);
    ``packed=False`` forces the generic representation, which must behave
    identically (this is tested).
    """

    __slots__ = ("field", "n", "_bits", "_vals")

    def __init__(self, field: Field, n: int, *, bits: Optional[int] = None,
                 vals: Optional[tuple] = None):
        self.field = field
        self.n = n
        self._bits = bits
        self._vals = vals

    @classmethod
    def from_values(cls, field: Field, values: Iterable[int], *,
                    packed: Optional[bool] = None) -> "FieldVector":
        vals = tuple(v % field.p for v in values)
        if packed is None:
            packed = field.p == 2
        if packed:
            if field.p != 2:
                raise ValueError("packed storage is only available over GF(2)")
            bits = 0
            for i, v in enumerate(vals):
                if v:
                    bits |= 1 << i
            return cls(field, len(vals), bits=bits)
        return cls(field, len(vals), vals=vals)

    @classmethod
    def zero(cls, field: Field, n: int, *, packed: Optional[bool] = None) -> "FieldVector":
        if packed is None:
            packed = field.p == 2
        if packed:
            if field.p != 2:
                raise ValueError("packed storage is only available over GF(2)")
            return cls(field, n, bits=0)
        return cls(field, n, vals=(0,) * n)

    @classmethod
    def from_bits(cls, field: Field, n: int, bits: int) -> "FieldVector":
        if field.p != 2:
            raise ValueError("bitmask construction requires GF(2)")
        return cls(field, n, bits=bits)

    @property
    def is_packed(self) -> bool:
        return self._bits is not None

    @property
    def values(self) -> tuple:
        if self._vals is not None:
            return self._vals
        bits = self._bits
        return tuple((bits >> i) & 1 for i in range(self.n))

    @property
    def bits(self) -> int:
        """The vector as an integer sum(v_i * p^i); equals the bitmask for GF(2)."""
        if self._bits is not None:
            return self._bits
        acc = 0
        for v in reversed(self._vals):
            acc = acc * self.field.p + v
        return acc

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(i)
        if self._bits is not None:
            return (self._bits >> i) & 1
        return self._vals[i]

    def __iter__(self) -> Iterator[int]:
        return iter(self.values)

    @property
    def weight(self) -> int:
        if self._bits is not None:
            return self._bits.bit_count()
        return sum(1 for v in self._vals if v)

    @property
    def support(self) -> tuple:
        if self._bits is not None:
            bits = self._bits
            out = []
            while bits:
                low = bits & -bits
                out.append(low.bit_length() - 1)
                bits ^= low
            return tuple(out)
        return tuple(i for i, v in enumerate(self._vals) if v)

    def is_zero(self) -> bool:
        if self._bits is not None:
            return self._bits == 0
        return not any(self._vals)

    def _check_compat(self, other: "FieldVector") -> None:
        if not isinstance(other, FieldVector):
            raise TypeError(f"expected FieldVector, got {type(other).__name__}")
        if other.field != self.field:
            raise ValueError(f"modulus mismatch: {self.field} vs {other.field}")
        if other.n != self.n:
            raise ValueError(f"length mismatch: {self.n} vs {other.n}")

    def __add__(self, other: "FieldVector") -> "FieldVector":
        self._check_compat(other)
        if self._bits is not None and other._bits is not None:
            return FieldVector(self.field, self.n, bits=self._bits ^ other._bits)
        p = self.field.p
        vals = tuple((a + b) % p for a, b in zip(self.values, other.values))
        if self._bits is not None:
            return FieldVector.from_values(self.field, vals)
        return FieldVector(self.field, self.n, vals=vals)

    def __sub__(self, other: "FieldVector") -> "FieldVector":
        if self.field.p == 2:
            return self.__add__(other)
        self._check_compat(other)
        p = self.field.p
        vals = tuple((a - b) % p for a, b in zip(self.values, other.values))
        return FieldVector(self.field, self.n, vals=vals)

    def scale(self, c: int) -> "FieldVector":
        c %= self.field.p
        if c == 1:
            return self
        if self._bits is not None:
            return FieldVector(self.field, self.n, bits=self._bits if c else 0)
        p = self.field.p
        return FieldVector(self.field, self.n, vals=tuple((v * c) % p for v in self._vals))

    def dot(self, other: "FieldVector") -> int:
        self._check_compat(other)
        if self._bits is not None and other._bits is not None:
            return (self._bits & other._bits).bit_count() & 1
        p = self.field.p
        return sum(a * b for a, b in zip(self.values, other.values)) % p

    def concat(self, other: "FieldVector") -> "FieldVector":
        if other.field != self.field:
            raise ValueError(f"modulus mismatch: {self.field} vs {other.field}")
        if self._bits is not None and other._bits is not None:
            return FieldVector(self.field, self.n + other.n,
                               bits=self._bits | (other._bits << self.n))
        return FieldVector(self.field, self.n + other.n,
                           vals=self.values + other.values)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FieldVector):
            return NotImplemented
        return (self.field == other.field and self.n == other.n
                and self.bits == other.bits)

    def __hash__(self) -> int:
        return hash((self.field.p, self.n, self.bits))

    def __repr__(self) -> str:
        body = "".join(str(v) for v in self.values) if self.n <= 64 else f"<{self.n} entries>"
        return f"FieldVector({self.field}, {body})"


class FieldMatrix:
    """Immutable rectangular matrix over GF(p), stored as a tuple of row vectors."""

    __slots__ = ("field", "rows", "row_count", "col_count")

    def __init__(self, field: Field, rows: Sequence[FieldVector], col_count: Optional[int] = None):
        rows = tuple(rows)
        if rows:
            col_count = rows[0].n
            for r in rows:
                if r.field != field:
                    raise ValueError("matrix rows must share one field")
                if r.n != col_count:
                    raise ValueError("matrix rows must have equal length")
        elif col_count is None:
            raise ValueError("empty matrix needs an explicit column count")
        self.field = field
        self.rows = rows
        self.row_count = len(rows)
        self.col_count = col_count

    @classmethod
    def from_rows(cls, field: Field, rows: Iterable[Iterable[int]], *,
                  col_count: Optional[int] = None,
                  packed: Optional[bool] = None) -> "FieldMatrix":
        vecs = [FieldVector.from_values(field, r, packed=packed) for r in rows]
        return cls(field, vecs, col_count=col_count)

    def entry(self, i: int, j: int) -> int:
        return self.rows[i][j]

    def column_bits(self, j: int) -> int:
        """Column j packed into an int, one digit per row (base p)."""
        acc = 0
        for r in reversed(self.rows):
            acc = acc * self.field.p + r[j]
        return acc

    def column_values(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    def mul_vector(self, v: FieldVector) -> tuple:
        """The tuple (row_i . v) for all rows; zero tuple means v is in the kernel."""
        return tuple(r.dot(v) for r in self.rows)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FieldMatrix):
            return NotImplemented
        return (self.field == other.field and self.col_count == other.col_count
                and self.rows == other.rows)

    def __hash__(self) -> int:
        return hash((self.field.p, self.col_count, self.rows))

    def __repr__(self) -> str:
        return f"FieldMatrix({self.field}, {self.row_count}x{self.col_count})"


def rref(m: FieldMatrix) -> tuple:
    """Reduced row echelon form of ``m``.

    Returns ``(reduced, pivot_columns)``. The reduced matrix keeps the
    shape of the input (zero rows stay, moved to the bottom) and the
    pivot columns are strictly increasing, 0-based.
    """
    field = m.field
    rows = list(m.rows)
    pivots = []
    r = 0
    for col in range(m.col_count):
        pivot_row = None
        for rr in range(r, len(rows)):
            if rows[rr][col]:
                pivot_row = rr
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        lead = rows[r][col]
        if lead != 1:
            rows[r] = rows[r].scale(field.inv(lead))
        for rr in range(len(rows)):
            if rr != r:
                f = rows[rr][col]
                if f:
                    rows[rr] = rows[rr] - rows[r].scale(f)
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return FieldMatrix(field, rows, col_count=m.col_count), tuple(pivots)


def rank(m: FieldMatrix) -> int:
    return len(rref(m)[1])


def null_space(m: FieldMatrix) -> FieldMatrix:
    """A basis of {x : m x^T = 0}, one row per free column of rref(m)."""
    field = m.field
    n = m.col_count
    reduced, pivots = rref(m)
    pivot_set = set(pivots)
    free_cols = [c for c in range(n) if c not in pivot_set]
    packed = field.p == 2 and (not m.rows or m.rows[0].is_packed)
    basis = []
    for fc in free_cols:
        vals = [0] * n
        vals[fc] = 1
        for row_idx, pc in enumerate(pivots):
            coef = reduced.rows[row_idx][fc]
            if coef:
                vals[pc] = field.neg(coef)
        basis.append(FieldVector.from_values(field, vals, packed=packed))
    return FieldMatrix(field, basis, col_count=n)


def row_space_contains(m: FieldMatrix, v: FieldVector) -> bool:
    reduced, pivots = rref(m)
    residue = v
    for row_idx, pc in enumerate(pivots):
        c = residue[pc]
        if c:
            residue = residue - reduced.rows[row_idx].scale(c)
    return residue.is_zero()


def row_space_equal(a: FieldMatrix, b: FieldMatrix) -> bool:
    if a.field != b.field or a.col_count != b.col_count:
        return False
    ra = [r for r in rref(a)[0].rows if not r.is_zero()]
    rb = [r for r in rref(b)[0].rows if not r.is_zero()]
    return ra == rb


def enumerate_codewords(g: FieldMatrix, weight_cap: Optional[int] = None) -> Iterator[FieldVector]:
    """Yield all q^k combinations of the rows of ``g`` exactly once.

    Order is lexicographic in the coefficient vectors (first row is the
    most significant digit). With ``weight_cap``, only words of weight
    at most the cap are yielded; the enumeration itself is not pruned.
    Refuses dimensions whose word count exceeds ENUMERATION_WORD_CAP.
    """
    field = g.field
    k = g.row_count
    q = field.p
    total = q ** k
    if total > ENUMERATION_WORD_CAP:
        raise CapExceededError(
            f"enumerating {q}^{k} codewords exceeds the cap of {ENUMERATION_WORD_CAP}")
    zero = FieldVector.zero(field, g.col_count,
                            packed=(q == 2 and (not g.rows or g.rows[0].is_packed)))
    if k == 0:
        if weight_cap is None or 0 <= weight_cap:
            yield zero
        return
    coeffs = [0] * k
    # partial[i] holds the combination of rows 0..i-1 with the current coefficients
    partial = [zero] * (k + 1)
    scaled_rows = [[g.rows[i].scale(c) for c in range(q)] for i in range(k)]
    while True:
        word = partial[k]
        if weight_cap is None or word.weight <= weight_cap:
            yield word
        pos = k - 1
        while pos >= 0 and coeffs[pos] == q - 1:
            coeffs[pos] = 0
            pos -= 1
        if pos < 0:
            return
        coeffs[pos] += 1
        for i in range(pos, k):
            partial[i + 1] = partial[i] + scaled_rows[i][coeffs[i]]
