"""Prime-field arithmetic, parity-check matrices, syndromes and empirical types.

Vectors are row vectors.  Internally the hot paths work on *packed* vectors: a
vector ``x`` over F_q of length ``n`` is the integer ``sum(x[j] * q**j)``.  For
q = 2 this is a bitmask (bit ``j`` holds coordinate ``j``) and addition is XOR.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

EmpiricalType = tuple  # counts per symbol, length q, summing to n


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    if q % 2 == 0:
        return q == 2
    f = 3
    while f * f <= q:
        if q % f == 0:
            return False
        f += 2
    return True


def _check_modulus(q: int) -> None:
    if not isinstance(q, (int, np.integer)) or not is_prime(int(q)):
        raise ValueError(f"field order must be prime, got {q!r}")


@dataclass(frozen=True)
class FieldElement:
    value: int
    q: int

    def __post_init__(self):
        _check_modulus(self.q)
        if not 0 <= self.value < self.q:
            raise ValueError(f"{self.value} is not an element of F_{self.q}")

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.q != self.q:
                raise ValueError("modulus mismatch")
            return other.value
        return int(other) % self.q

    def __add__(self, other):
        return FieldElement((self.value + self._coerce(other)) % self.q, self.q)

    def __sub__(self, other):
        return FieldElement((self.value - self._coerce(other)) % self.q, self.q)

    def __mul__(self, other):
        return FieldElement((self.value * self._coerce(other)) % self.q, self.q)

    def __neg__(self):
        return FieldElement((-self.value) % self.q, self.q)

    def inverse(self) -> "FieldElement":
        if self.value == 0:
            raise ZeroDivisionError("0 has no inverse")
        return FieldElement(pow(self.value, self.q - 2, self.q), self.q)

    def __int__(self):
        return self.value


@dataclass(frozen=True)
class FieldVector:
    """An element of F_q^n."""

    entries: tuple
    q: int

    def __post_init__(self):
        _check_modulus(self.q)
        entries = tuple(int(e.value if isinstance(e, FieldElement) else e) for e in self.entries)
        if any(not 0 <= e < self.q for e in entries):
            raise ValueError(f"entries must lie in [0, {self.q})")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def zeros(cls, n: int, q: int = 2) -> "FieldVector":
        return cls((0,) * n, q)

    @classmethod
    def unit(cls, n: int, i: int, q: int = 2) -> "FieldVector":
        e = [0] * n
        e[i] = 1
        return cls(tuple(e), q)

    @classmethod
    def from_packed(cls, value: int, n: int, q: int = 2) -> "FieldVector":
        return cls(tuple(unpack(value, n, q)), q)

    @property
    def n(self) -> int:
        return len(self.entries)

    def packed(self) -> int:
        return pack(self.entries, self.q)

    def __len__(self):
        return len(self.entries)

    def __iter__(self) -> Iterator[int]:
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def _other(self, other: "FieldVector") -> tuple:
        if other.q != self.q or other.n != self.n:
            raise ValueError("dimension/modulus mismatch")
        return other.entries

    def __add__(self, other):
        o = self._other(other)
        return FieldVector(tuple((a + b) % self.q for a, b in zip(self.entries, o)), self.q)

    def __sub__(self, other):
        o = self._other(other)
        return FieldVector(tuple((a - b) % self.q for a, b in zip(self.entries, o)), self.q)

    def __neg__(self):
        return FieldVector(tuple((-a) % self.q for a in self.entries), self.q)

    @property
    def weight(self) -> int:
        return sum(1 for e in self.entries if e)

    def as_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64)


@dataclass(frozen=True)
class PermutationMatrix:
    """Coordinate permutation; ``apply`` realizes the row-vector product x·Π.

    ``(x·Π)[j] = x[perm[j]]``.
    """

    perm: tuple

    def __post_init__(self):
        perm = tuple(int(p) for p in self.perm)
        if sorted(perm) != list(range(len(perm))):
            raise ValueError("not a permutation")
        object.__setattr__(self, "perm", perm)

    @classmethod
    def identity(cls, n: int) -> "PermutationMatrix":
        return cls(tuple(range(n)))

    @property
    def n(self) -> int:
        return len(self.perm)

    def inverse(self) -> "PermutationMatrix":
        inv = [0] * self.n
        for j, p in enumerate(self.perm):
            inv[p] = j
        return PermutationMatrix(tuple(inv))

    def apply(self, x: FieldVector) -> FieldVector:
        return FieldVector(tuple(x.entries[p] for p in self.perm), x.q)

    def matrix(self) -> np.ndarray:
        """0/1 matrix Π with x @ Π == apply(x)."""
        m = np.zeros((self.n, self.n), dtype=np.int64)
        for j, p in enumerate(self.perm):
            m[p, j] = 1
        return m


# ---------------------------------------------------------------------------
# packed vectors


def pack(entries: Iterable[int], q: int) -> int:
    if q == 2:
        v = 0
        for j, e in enumerate(entries):
            if e:
                v |= 1 << j
        return v
    v = 0
    mult = 1
    for e in entries:
        v += int(e) * mult
        mult *= q
    return v


def unpack(value: int, n: int, q: int) -> list:
    if q == 2:
        return [(value >> j) & 1 for j in range(n)]
    out = []
    for _ in range(n):
        value, r = divmod(value, q)
        out.append(r)
    return out


def packed_add(a: int, b: int, n: int, q: int) -> int:
    if q == 2:
        return a ^ b
    return pack(((x + y) % q for x, y in zip(unpack(a, n, q), unpack(b, n, q))), q)


def packed_sub(a: int, b: int, n: int, q: int) -> int:
    if q == 2:
        return a ^ b
    return pack(((x - y) % q for x, y in zip(unpack(a, n, q), unpack(b, n, q))), q)


def packed_weight(a: int, n: int, q: int) -> int:
    if q == 2:
        return a.bit_count() if hasattr(a, "bit_count") else bin(a).count("1")
    return sum(1 for e in unpack(a, n, q) if e)


def packed_type(a: int, n: int, q: int) -> EmpiricalType:
    if q == 2:
        w = packed_weight(a, n, 2)
        return (n - w, w)
    counts = [0] * q
    for e in unpack(a, n, q):
        counts[e] += 1
    return tuple(counts)


def packed_permute(a: int, perm: Sequence[int], q: int) -> int:
    """Packed form of x·Π for ``(x·Π)[j] = x[perm[j]]``."""
    if q == 2:
        out = 0
        for j, p in enumerate(perm):
            if (a >> p) & 1:
                out |= 1 << j
        return out
    x = unpack(a, len(perm), q)
    return pack((x[p] for p in perm), q)


def packed_unpermute(a: int, perm: Sequence[int], q: int) -> int:
    """Inverse of :func:`packed_permute`."""
    if q == 2:
        out = 0
        for j, p in enumerate(perm):
            if (a >> j) & 1:
                out |= 1 << p
        return out
    x = unpack(a, len(perm), q)
    y = [0] * len(perm)
    for j, p in enumerate(perm):
        y[p] = x[j]
    return pack(y, q)


class PackedLinearMap:
    """x ↦ x·Aᵀ for a fixed matrix A (rows × cols), on packed vectors.

    Over F_2 the product is evaluated with per-byte lookup tables, so a
    24-bit input costs three table lookups and two XORs.
    """

    def __init__(self, A: np.ndarray, q: int):
        A = np.asarray(A, dtype=np.int64) % q
        self.q = q
        self.rows, self.cols = A.shape if A.ndim == 2 else (0, 0)
        self.A = A.reshape(self.rows, self.cols)
        if q == 2:
            col_masks = [pack(self.A[:, j], 2) for j in range(self.cols)]
            self._tables = []
            for start in range(0, self.cols, 8):
                cols = col_masks[start:start + 8]
                table = [0] * (1 << len(cols))
                for byte in range(1, len(table)):
                    low = byte & -byte
                    table[byte] = table[byte ^ low] ^ cols[low.bit_length() - 1]
                self._tables.append(table)

    def __call__(self, x: int) -> int:
        if self.q == 2:
            out = 0
            for table in self._tables:
                out ^= table[x & 0xFF]
                x >>= 8
            return out
        v = np.array(unpack(x, self.cols, self.q), dtype=np.int64)
        return pack((self.A @ v) % self.q, self.q)

    def apply_many(self, xs: np.ndarray) -> np.ndarray:
        """Vectorized F_2 version for an array of packed inputs (uint64)."""
        assert self.q == 2
        xs = np.asarray(xs, dtype=np.uint64)
        out = np.zeros_like(xs)
        for i in range(self.rows):
            row_mask = np.uint64(pack(self.A[i], 2))
            bit = np.bitwise_count(xs & row_mask).astype(np.uint64) & np.uint64(1)
            out |= bit << np.uint64(i)
        return out


# ---------------------------------------------------------------------------
# matrices


def _rref(A: np.ndarray, q: int) -> tuple[np.ndarray, list]:
    """Reduced row echelon form with leftmost pivots; returns (R, pivot_cols)."""
    A = np.array(A, dtype=np.int64) % q
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + nz[0]
        if p != r:
            A[[r, p]] = A[[p, r]]
        A[r] = (A[r] * pow(int(A[r, c]), q - 2, q)) % q
        for i in range(rows):
            if i != r and A[i, c]:
                A[i] = (A[i] - A[i, c] * A[r]) % q
        pivots.append(c)
        r += 1
    return A, pivots


def rank(A: np.ndarray, q: int) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    return len(_rref(A, q)[1])


def inverse_matrix(A: np.ndarray, q: int) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64) % q
    m = A.shape[0]
    if m == 0:
        return A.copy()
    R, piv = _rref(np.concatenate([A, np.eye(m, dtype=np.int64)], axis=1), q)
    if piv[:m] != list(range(m)) or len(piv) < m:
        raise ValueError("matrix is singular")
    return R[:, m:]


@dataclass(frozen=True, eq=False)
class ParityCheckMatrix:
    """Full-row-rank (n−k)×n matrix over F_q."""

    q: int
    n: int
    k: int
    rows: tuple

    def __post_init__(self):
        _check_modulus(self.q)
        if not 0 <= self.k <= self.n or self.n <= 0:
            raise ValueError(f"need 0 <= k <= n and n > 0, got n={self.n}, k={self.k}")
        rows = tuple(tuple(int(x) % self.q for x in row) for row in self.rows)
        if len(rows) != self.n - self.k or any(len(r) != self.n for r in rows):
            raise ValueError("parity-check matrix must have n-k rows of length n")
        object.__setattr__(self, "rows", rows)
        if rank(self.array, self.q) != self.n - self.k:
            raise ValueError("parity-check matrix is not full row rank")

    @classmethod
    def from_array(cls, A, q: int = 2) -> "ParityCheckMatrix":
        A = np.asarray(A, dtype=np.int64)
        if A.ndim != 2:
            raise ValueError("expected a 2-D array")
        m, n = A.shape
        return cls(q, n, n - m, tuple(map(tuple, A.tolist())))

    @classmethod
    def empty(cls, n: int, q: int = 2) -> "ParityCheckMatrix":
        return cls(q, n, n, ())

    @cached_property
    def array(self) -> np.ndarray:
        return np.array(self.rows, dtype=np.int64).reshape(self.n - self.k, self.n)

    @property
    def m(self) -> int:
        return self.n - self.k

    def __eq__(self, other):
        return (isinstance(other, ParityCheckMatrix) and self.q == other.q
                and self.n == other.n and self.rows == other.rows)

    def __hash__(self):
        return hash((self.q, self.n, self.rows))

    def to_json(self) -> dict:
        return {"q": self.q, "n": self.n, "k": self.k, "rows": [list(r) for r in self.rows]}

    @classmethod
    def from_json(cls, obj) -> "ParityCheckMatrix":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(int(obj["q"]), int(obj["n"]), int(obj["k"]), tuple(map(tuple, obj["rows"])))

    @cached_property
    def syndrome_map(self) -> PackedLinearMap:
        return PackedLinearMap(self.array, self.q)


def block_diagonal(H: ParityCheckMatrix, r: int) -> ParityCheckMatrix:
    """I_r ⊗ H."""
    if r < 1:
        raise ValueError("r must be positive")
    A = np.kron(np.eye(r, dtype=np.int64), H.array)
    return ParityCheckMatrix(H.q, H.n * r, H.k * r, tuple(map(tuple, A.tolist())))


def syndrome(z: FieldVector, H: ParityCheckMatrix) -> tuple:
    """z·Hᵀ over F_q, as a tuple of length n−k."""
    if z.n != H.n or z.q != H.q:
        raise ValueError(f"dimension/modulus mismatch: vector F_{z.q}^{z.n}, matrix over F_{H.q} with n={H.n}")
    if H.m == 0:
        return ()
    return tuple(int(v) for v in (H.array @ z.as_array()) % H.q)


@dataclass(frozen=True)
class StandardForm:
    """H_std = R · H · P = [H̃ | I_{n−k}].

    ``col_perm[j]`` is the original column placed at position ``j``; a vector
    ``z`` in original coordinates maps to ``col_perm.apply(z)`` and satisfies
    ``syndrome(col_perm.apply(z), H_std) == R · syndrome(z, H)``.
    """

    h_std: ParityCheckMatrix
    col_perm: PermutationMatrix
    row_transform: np.ndarray = field(repr=False)

    @property
    def h_tilde(self) -> np.ndarray:
        return self.h_std.array[:, : self.h_std.k]


def standard_form(H: ParityCheckMatrix) -> StandardForm:
    q, n, m = H.q, H.n, H.m
    if m == 0:
        return StandardForm(H, PermutationMatrix.identity(n), np.zeros((0, 0), dtype=np.int64))
    A = H.array
    # Pivot search right-to-left so matrices already of the form [H̃ | I] are left untouched.
    _, rev_piv = _rref(A[:, ::-1], q)
    if len(rev_piv) != m:
        raise ValueError("parity-check matrix is rank deficient")
    pivots = sorted(n - 1 - c for c in rev_piv)
    pivot_set = set(pivots)
    perm = [c for c in range(n) if c not in pivot_set] + pivots
    R = inverse_matrix(A[:, pivots], q)
    std = (R @ A[:, perm]) % q
    return StandardForm(ParityCheckMatrix.from_array(std, q), PermutationMatrix(tuple(perm)), R)


def to_standard_form(H: ParityCheckMatrix) -> tuple[ParityCheckMatrix, PermutationMatrix]:
    sf = standard_form(H)
    return sf.h_std, sf.col_perm


# ---------------------------------------------------------------------------
# types


def type_of(z: FieldVector) -> EmpiricalType:
    counts = [0] * z.q
    for e in z.entries:
        counts[e] += 1
    return tuple(counts)


def type_weight(p: EmpiricalType) -> int:
    return sum(p) - p[0]


def type_sort_key(p: EmpiricalType) -> tuple:
    """Increasing weight, then lexicographic on the nonzero-symbol counts."""
    return (sum(p) - p[0],) + tuple(p[1:])


def type_class_size(p: EmpiricalType) -> int:
    """Multinomial n! / prod(counts!)."""
    if any(c < 0 for c in p):
        raise ValueError("counts must be nonnegative")
    out = 1
    total = 0
    for c in p:
        total += c
        out *= math.comb(total, c)
    return out


def all_types(n: int, q: int) -> list:
    """Every type in P_n(F_q), sorted by :func:`type_sort_key`."""

    def rec(remaining: int, parts: int):
        if parts == 1:
            yield (remaining,)
            return
        for c in range(remaining + 1):
            for rest in rec(remaining - c, parts - 1):
                yield rest + (c,)

    return sorted(rec(n, q), key=type_sort_key)


def weight_type(n: int, w: int) -> EmpiricalType:
    """The binary type of weight ``w``."""
    return (n - w, w)


def add_types(a: EmpiricalType, b: EmpiricalType) -> EmpiricalType:
    return tuple(x + y for x, y in zip(a, b))


def sub_types(a: EmpiricalType, b: EmpiricalType) -> EmpiricalType:
    return tuple(x - y for x, y in zip(a, b))
