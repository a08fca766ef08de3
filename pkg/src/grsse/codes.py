"""Catalog of inner codes and their coset statistics."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path

import numpy as np

from .cosets import (
    BinaryRepetitionCosets,
    BudgetExceeded,
    CompleteCosets,
    CosetGeometry,
    EnumeratedCosets,
    JuxtaposedCosets,
    TrivialCosets,
    TypeSet,
    TypeSetDistribution,
    juxtapose_tsd,
)
from .gf import FieldVector, ParityCheckMatrix, block_diagonal, pack, standard_form

INF = math.inf

# First row of the 11×11 circulant in the extended Golay generator [I | B].
_GOLAY_CIRCULANT_ROW = (1, 1, 0, 1, 1, 1, 0, 0, 0, 1, 0)


@dataclass(eq=False)
class LinearCode:
    name: str
    H: ParityCheckMatrix
    kind: str = "enumerated"
    declared_distance: float | int | None = None

    @property
    def n(self) -> int:
        return self.H.n

    @property
    def k(self) -> int:
        return self.H.k

    @property
    def q(self) -> int:
        return self.H.q

    @property
    def m(self) -> int:
        return self.H.m

    @cached_property
    def standard(self):
        return standard_form(self.H)

    @cached_property
    def cosets(self) -> CosetGeometry:
        if self.kind == "trivial":
            return TrivialCosets(self.n, self.q)
        if self.kind == "complete":
            return CompleteCosets(self.n, self.q)
        if self.kind == "repetition" and self.q == 2:
            return BinaryRepetitionCosets(self.n)
        return EnumeratedCosets(self.H)

    @cached_property
    def distance(self):
        if self.declared_distance is not None:
            return self.declared_distance
        return code_distance(self)

    @property
    def distance_is_exact(self) -> bool:
        return True

    @property
    def effective_distance(self):
        d = self.distance
        return d if d == INF else Fraction(d)

    def type_set_distribution(self) -> TypeSetDistribution:
        return self.cosets.tsd

    def __repr__(self):
        return f"LinearCode({self.name!r}, n={self.n}, k={self.k}, q={self.q})"


@dataclass(eq=False, repr=False)
class JuxtapositionCode(LinearCode):
    base: LinearCode | None = None
    r: int = 1

    @cached_property
    def cosets(self) -> CosetGeometry:
        return JuxtaposedCosets(self.base.cosets, self.r)

    @cached_property
    def distance(self):
        # true distance: a single nonzero block
        return self.base.distance

    @property
    def distance_is_exact(self) -> bool:
        return self.r == 1

    @property
    def effective_distance(self):
        d = self.base.distance
        return d if d == INF else Fraction(d) * self.r


# ---------------------------------------------------------------------------
# constructors


def golay_code() -> LinearCode:
    """Extended binary Golay code [24, 12, 8], H = [B | I_12].

    B is the bordered circulant: the 11×11 circulant of quadratic-residue
    pattern, an all-ones last column and row, and a zero corner.  B is
    symmetric with B·Bᵀ = I, so the code is self-dual.
    """
    A = np.array([np.roll(_GOLAY_CIRCULANT_ROW, i) for i in range(11)], dtype=np.int64)
    B = np.zeros((12, 12), dtype=np.int64)
    B[:11, :11] = A
    B[:11, 11] = 1
    B[11, :11] = 1
    H = ParityCheckMatrix.from_array(np.concatenate([B, np.eye(12, dtype=np.int64)], axis=1), 2)
    code = LinearCode("golay", H)
    weights = code_weight_distribution(code)
    if any(weights[w] for w in range(1, 8)):
        raise RuntimeError("Golay self-check failed: nonzero codeword of weight < 8")
    code.declared_distance = 8
    return code


def repetition_code(n: int, q: int = 2) -> LinearCode:
    """[n, 1, n] repetition code with H = [−1 | I_{n−1}]."""
    if n < 2:
        raise ValueError("repetition code needs n >= 2")
    A = np.zeros((n - 1, n), dtype=np.int64)
    A[:, 0] = q - 1
    A[:, 1:] = np.eye(n - 1, dtype=np.int64)
    return LinearCode(f"repetition:{n}", ParityCheckMatrix.from_array(A, q), "repetition", n)


def trivial_code(n: int, q: int = 2) -> LinearCode:
    """k = 0, H = I_n; only the zero codeword, distance ∞."""
    return LinearCode(f"trivial:{n}", ParityCheckMatrix.from_array(np.eye(n, dtype=np.int64), q), "trivial", INF)


def complete_code(n: int, q: int = 2) -> LinearCode:
    """k = n, empty H; every vector is a codeword (distance 1)."""
    return LinearCode(f"complete:{n}", ParityCheckMatrix.empty(n, q), "complete", 1)


def parity_code(n: int, q: int = 2) -> LinearCode:
    """[n, n−1, 2] single parity check."""
    return LinearCode(f"parity:{n}", ParityCheckMatrix.from_array(np.ones((1, n), dtype=np.int64), q),
                      "enumerated", 2 if n >= 2 else INF)


def hamming_code(extended: bool = False) -> LinearCode:
    """Binary [7, 4, 3] Hamming code, or its [8, 4, 4] parity extension."""
    cols = [c for c in range(1, 8)]
    A = np.array([[(c >> i) & 1 for c in cols] for i in range(3)], dtype=np.int64)
    if not extended:
        H = ParityCheckMatrix.from_array(A, 2)
        return LinearCode("hamming:7", standard_form(H).h_std, "enumerated", 3)
    ext = np.zeros((4, 8), dtype=np.int64)
    ext[:3, :7] = A
    ext[3, :] = 1
    H = ParityCheckMatrix.from_array(ext, 2)
    return LinearCode("hamming:8", standard_form(H).h_std, "enumerated", 4)


def juxtapose(base: LinearCode, r: int) -> LinearCode:
    """The r-fold juxtaposition with parity-check matrix I_r ⊗ H."""
    if r < 1:
        raise ValueError("r must be a positive integer")
    if r == 1:
        return base
    return JuxtapositionCode(f"{r}*{base.name}", block_diagonal(base.H, r), "juxtaposition", None, base=base, r=r)


def code_from_json(obj, name: str | None = None) -> LinearCode:
    if isinstance(obj, str):
        obj = json.loads(obj)
    H = ParityCheckMatrix.from_json(obj)
    name = name or obj.get("name") or f"custom[{H.n},{H.k}]"
    if H.m == 0:
        return LinearCode(name, H, "complete", 1)
    if H.k == 0:
        return LinearCode(name, H, "enumerated", INF)
    d = obj.get("distance")
    return LinearCode(name, H, "enumerated", int(d) if d is not None else None)


def load_code(path) -> LinearCode:
    path = Path(path)
    obj = json.loads(path.read_text())
    return code_from_json(obj, obj.get("name") or f"file:{path}")


def code_by_name(name: str, n: int | None = None, q: int = 2) -> LinearCode:
    """Resolve a registry name.

    Names: ``golay``, ``hamming:7``, ``hamming:8``, ``repetition:N``,
    ``trivial:N``, ``complete:N``, ``parity:N``, ``R*NAME`` (juxtaposition)
    and ``file:PATH``.  The ``:N`` suffix may be omitted when ``n`` is given.
    """
    name = name.strip()
    if name.startswith("file:"):
        return load_code(name[5:])
    if "*" in name:
        r, base = name.split("*", 1)
        r = int(r)
        base_n = None if n is None else n // r
        return juxtapose(code_by_name(base, base_n, q), r)
    head, _, arg = name.partition(":")
    size = int(arg) if arg else n
    if head == "golay":
        _require_binary(q, head)
        return golay_code()
    if head == "hamming":
        _require_binary(q, head)
        return hamming_code(extended=(size == 8))
    builders = {"repetition": repetition_code, "trivial": trivial_code,
                "complete": complete_code, "parity": parity_code}
    if head not in builders:
        raise KeyError(f"unknown code {name!r}")
    if size is None:
        raise ValueError(f"code {name!r} needs a length")
    return builders[head](size, q)


def _require_binary(q: int, name: str) -> None:
    if q != 2:
        raise ValueError(f"{name} is a binary code")


def registry_codes(n: int = 24, q: int = 2) -> list:
    """Codes the registry ships for a block length (used by ``codes list``)."""
    names = [f"trivial:{n}", f"repetition:{n}"]
    if q == 2 and n == 24:
        names += ["golay", "3*hamming:8", "8*parity:3"]
    if q == 2 and n % 24 == 0 and n > 24:
        names.append(f"{n // 24}*golay")
    if q == 2 and n in (7, 8):
        names.append("hamming" if n == 7 else "hamming:8")
    names += [f"parity:{n}", f"complete:{n}"]
    out = []
    for nm in names:
        try:
            out.append(code_by_name(nm, n, q))
        except (ValueError, KeyError):
            continue
    return out


# ---------------------------------------------------------------------------
# operations


def _packed_syndrome(s, code: LinearCode) -> int:
    entries = tuple(s.entries) if isinstance(s, FieldVector) else tuple(int(x) for x in s)
    if len(entries) != code.m:
        raise ValueError(f"syndrome must have length {code.m}")
    if isinstance(s, FieldVector) and s.q != code.q:
        raise ValueError("modulus mismatch")
    return pack(entries, code.q)


def code_weight_distribution(code: LinearCode) -> list:
    """Number of codewords of each weight 0..n (enumerates q^k codewords)."""
    W = EnumeratedCosets(code.H).codeword_weights()
    return np.bincount(np.asarray(W, dtype=np.int64), minlength=code.n + 1).tolist()


def code_distance(code: LinearCode):
    """Minimum nonzero codeword weight; ``math.inf`` when k = 0."""
    if code.k == 0:
        return INF
    if isinstance(code, JuxtapositionCode):
        return code_distance(code.base)
    if code.kind == "complete":
        return 1
    weights = code_weight_distribution(code)
    return next(w for w in range(1, code.n + 1) if weights[w])


def coset_leader(s, code: LinearCode) -> FieldVector:
    """Minimum-weight z with z·Hᵀ = s; ties go to the lexicographically smallest z."""
    z = code.cosets.coset_leader(_packed_syndrome(s, code))
    return FieldVector.from_packed(z, code.n, code.q)


def type_set(s, code: LinearCode) -> TypeSet:
    return code.cosets.type_set(_packed_syndrome(s, code))


def type_set_distribution(code: LinearCode) -> TypeSetDistribution:
    return code.cosets.tsd


def juxtapose_type_set_distribution(base: TypeSetDistribution, r: int) -> TypeSetDistribution:
    return juxtapose_tsd(base, r)


def coset_members(s, code: LinearCode) -> list:
    """Every vector in the coset of ``s`` (small codes only; brute force)."""
    if code.q ** code.n > (1 << 20):
        raise BudgetExceeded("coset listing is for small codes")
    target = _packed_syndrome(s, code)
    smap = code.H.syndrome_map
    out = []
    for z in range(code.q ** code.n):
        if (smap(z) if code.m else 0) == target:
            out.append(FieldVector.from_packed(z, code.n, code.q))
    return out


def describe(code: LinearCode) -> dict:
    d = code.distance
    return {
        "name": code.name,
        "n": code.n,
        "k": code.k,
        "q": code.q,
        "d": "inf" if d == INF else int(d),
        "effective_d": "inf" if code.effective_distance == INF else str(code.effective_distance),
        "type_sets": len(code.cosets.tsd),
    }
