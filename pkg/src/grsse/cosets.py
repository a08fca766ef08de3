"""Coset geometry of linear codes: type sets, type-set distributions, coset sampling.

Each engine answers the same questions about the cosets {z : z·Hᵀ = s} of a
code, keyed by the *packed* syndrome ``s`` in the code's own coordinates:

* ``typeset_id(s)``: index of t_H(s) in the canonical type-set distribution,
* ``coset_type_counts(s)``: how many coset members have each type,
* ``sample(s, p, rng)``: a uniform coset member of type ``p``,
* ``leader_type_counts()``: number of cosets whose leader has each type.

Enumeration engines touch every vector of F_q^n once; structured engines
(trivial, complete, binary repetition, juxtaposition) use closed forms.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .gf import (
    EmpiricalType,
    PackedLinearMap,
    ParityCheckMatrix,
    add_types,
    all_types,
    pack,
    packed_type,
    packed_unpermute,
    standard_form,
    sub_types,
    type_class_size,
    type_sort_key,
    unpack,
    weight_type,
)

ENUMERATION_BUDGET = 1 << 26
_CHUNK = 1 << 21


class BudgetExceeded(RuntimeError):
    """Raised when an exhaustive enumeration would exceed the work budget."""


@dataclass(frozen=True)
class TypeSet:
    """A canonical (sorted, duplicate-free) set of empirical types."""

    members: tuple

    def __post_init__(self):
        members = tuple(sorted(set(map(tuple, self.members)), key=type_sort_key))
        if not members:
            raise ValueError("type sets are nonempty")
        object.__setattr__(self, "members", members)

    def __contains__(self, p) -> bool:
        return tuple(p) in self._lookup

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    @cached_property
    def _lookup(self) -> frozenset:
        return frozenset(self.members)

    @property
    def sort_key(self) -> tuple:
        return tuple(type_sort_key(p) for p in self.members)

    @property
    def weights(self) -> tuple:
        return tuple(sum(p) - p[0] for p in self.members)

    def minkowski(self, other: "TypeSet") -> "TypeSet":
        return TypeSet(tuple(add_types(a, b) for a in self.members for b in other.members))

    def __repr__(self):
        if len(self.members[0]) == 2:
            return f"TypeSet(weights={list(self.weights)})"
        return f"TypeSet({list(self.members)})"


@dataclass(frozen=True)
class TypeSetDistribution:
    """Probability of each type set under a uniform syndrome."""

    n: int
    q: int
    typesets: tuple
    probs: tuple

    def __post_init__(self):
        merged: dict = {}
        for t, p in zip(self.typesets, self.probs):
            merged[t] = merged.get(t, 0) + p
        order = sorted(merged, key=lambda t: t.sort_key)
        object.__setattr__(self, "typesets", tuple(order))
        object.__setattr__(self, "probs", tuple(merged[t] for t in order))
        if any(p < 0 for p in self.probs):
            raise ValueError("negative probability")
        total = sum(self.probs)
        exact = all(isinstance(p, (int, Fraction)) for p in self.probs)
        if (exact and total != 1) or (not exact and abs(total - 1) > 1e-12):
            raise ValueError(f"type-set probabilities sum to {total}")

    @classmethod
    def from_dict(cls, n: int, q: int, mapping: dict) -> "TypeSetDistribution":
        return cls(n, q, tuple(mapping), tuple(mapping.values()))

    def __len__(self):
        return len(self.typesets)

    def as_dict(self) -> dict:
        return dict(zip(self.typesets, self.probs))

    def index(self, t: TypeSet) -> int:
        return self._index[t]

    @cached_property
    def _index(self) -> dict:
        return {t: i for i, t in enumerate(self.typesets)}

    @property
    def exact(self) -> bool:
        return all(isinstance(p, (int, Fraction)) for p in self.probs)

    def to_float(self) -> "TypeSetDistribution":
        return TypeSetDistribution(self.n, self.q, self.typesets, tuple(float(p) for p in self.probs))


def juxtapose_tsd(base: TypeSetDistribution, r: int) -> TypeSetDistribution:
    """r-fold Minkowski-sum convolution of a type-set distribution."""
    if r < 1:
        raise ValueError("r must be a positive integer")
    acc = base.as_dict()
    for _ in range(r - 1):
        nxt: dict = {}
        for t1, p1 in acc.items():
            for t2, p2 in zip(base.typesets, base.probs):
                t = t1.minkowski(t2)
                nxt[t] = nxt.get(t, 0) + p1 * p2
        acc = nxt
    return TypeSetDistribution.from_dict(base.n * r, base.q, acc)


# ---------------------------------------------------------------------------
# engines


class CosetGeometry:
    n: int
    q: int
    k: int

    @property
    def m(self) -> int:
        return self.n - self.k

    @property
    def tsd(self) -> TypeSetDistribution:
        raise NotImplementedError

    def typeset_id(self, s: int) -> int:
        raise NotImplementedError

    def type_set(self, s: int) -> TypeSet:
        return self.tsd.typesets[self.typeset_id(s)]

    def coset_type_counts(self, s: int) -> dict:
        raise NotImplementedError

    def sample(self, s: int, p: EmpiricalType, rng) -> int:
        raise NotImplementedError

    def leader_type_counts(self) -> dict:
        raise NotImplementedError

    def coset_leader(self, s: int) -> int:
        raise NotImplementedError


def _lex_key(z: int, n: int, q: int) -> tuple:
    digits = unpack(z, n, q)
    return (sum(1 for d in digits if d),) + tuple(digits)


class EnumeratedCosets(CosetGeometry):
    """Exhaustive enumeration through the standard form [H̃ | I].

    In standard coordinates the coset of s' is {[u | s' − u·H̃ᵀ] : u ∈ F_q^k},
    so a coset is listed by one vectorized pass over the q^k messages.
    """

    def __init__(self, H: ParityCheckMatrix, budget: int = ENUMERATION_BUDGET):
        self.H = H
        self.n, self.q, self.k = H.n, H.q, H.k
        self.budget = budget
        self.sf = standard_form(H)
        self.perm = self.sf.col_perm.perm
        self._to_std = PackedLinearMap(self.sf.row_transform, self.q) if self.m else None

    # -- message side --------------------------------------------------------
    @cached_property
    def _messages(self):
        """(packed std-coordinate message part, parity part, message weight)."""
        q, k = self.q, self.k
        if q ** k > self.budget:
            raise BudgetExceeded(f"q^k = {q}^{k} exceeds the enumeration budget")
        if q == 2:
            U = np.arange(1 << k, dtype=np.uint64)
            if self.m:
                P = PackedLinearMap(self.sf.h_tilde, 2).apply_many(U)
            else:
                P = np.zeros_like(U)
            return U, P, np.bitwise_count(U).astype(np.int64)
        U = _all_digit_vectors(k, q)
        P = (U @ self.sf.h_tilde.T) % q if self.m else np.zeros((len(U), 0), dtype=np.int64)
        return U, P, None

    def _coset_std(self, s_std: int):
        """All members of a coset in standard coordinates (packed for q=2, digits otherwise)."""
        U, P, _ = self._messages
        if self.q == 2:
            return U | ((np.uint64(s_std) ^ P) << np.uint64(self.k))
        s_digits = np.array(unpack(s_std, self.m, self.q), dtype=np.int64)
        return np.concatenate([U, (s_digits[None, :] - P) % self.q], axis=1)

    def _std_syndrome(self, s: int) -> int:
        return self._to_std(s) if self.m else 0

    # -- full enumeration ----------------------------------------------------
    @cached_property
    def _table(self):
        """(typesets, exact probs, typeset id per original syndrome, leader counts)."""
        if self.q ** self.n > self.budget:
            raise BudgetExceeded(f"q^n = {self.q}^{self.n} exceeds the enumeration budget")
        if self.q == 2:
            return self._table_binary()
        return self._table_generic()

    def _table_binary(self):
        n, m = self.n, self.m
        U, P, wu = self._messages
        S = np.arange(1 << m, dtype=np.uint64)
        masks = np.zeros(1 << m, dtype=np.uint64)
        one = np.uint64(1)
        if len(S) >= len(U):
            step = max(1, _CHUNK // len(S))
            for start in range(0, len(U), step):
                W = np.bitwise_count(S[None, :] ^ P[start:start + step, None]).astype(np.uint64)
                W += wu[start:start + step, None].astype(np.uint64)
                masks |= np.bitwise_or.reduce(one << W, axis=0)
        else:
            step = max(1, _CHUNK // len(U))
            for start in range(0, len(S), step):
                W = np.bitwise_count(S[start:start + step, None] ^ P[None, :]).astype(np.uint64)
                W += wu[None, :].astype(np.uint64)
                masks[start:start + step] = np.bitwise_or.reduce(one << W, axis=1)
        uniq, inverse, counts = np.unique(masks, return_inverse=True, return_counts=True)
        typesets = [TypeSet(tuple(weight_type(n, w) for w in range(n + 1) if (int(mk) >> w) & 1))
                    for mk in uniq]
        order = sorted(range(len(typesets)), key=lambda i: typesets[i].sort_key)
        rank = np.empty(len(order), dtype=np.int64)
        rank[order] = np.arange(len(order))
        tsid_std = rank[inverse.reshape(-1)]
        if m:
            std_of_orig = PackedLinearMap(self.sf.row_transform, 2).apply_many(S).astype(np.int64)
            tsid = tsid_std[std_of_orig]
        else:
            tsid = tsid_std
        denom = 1 << m
        probs = [Fraction(int(counts[i]), denom) for i in order]
        low = masks & (~masks + one)
        leader_w = np.bitwise_count(low - one).astype(np.int64)
        lw_counts = np.bincount(leader_w, minlength=n + 1)
        leaders = {weight_type(n, w): int(c) for w, c in enumerate(lw_counts) if c}
        return [typesets[i] for i in order], probs, _compact(tsid), leaders

    def _table_generic(self):
        n, q, m = self.n, self.q, self.m
        inv = np.argsort(np.array(self.perm))
        radix = (n + 1) ** np.arange(q, dtype=np.int64)
        sig_of_syn = {}
        leaders: Counter = Counter()
        for s_std in range(q ** m):
            Z = self._coset_std(s_std)
            C = np.stack([(Z == a).sum(axis=1) for a in range(q)], axis=1)
            keys = np.unique(C @ radix)
            sig_of_syn[s_std] = tuple(int(x) for x in keys)
            Zo = Z[:, inv]
            wt = n - C[:, 0]
            best = np.lexsort([Zo[:, j] for j in range(n - 1, -1, -1)] + [wt])[0]
            leaders[tuple(int(x) for x in C[best])] += 1

        def decode_key(key):
            return tuple((key // (n + 1) ** a) % (n + 1) for a in range(q))

        sig_counts = Counter(sig_of_syn.values())
        ts_of_sig = {sig: TypeSet(tuple(decode_key(x) for x in sig)) for sig in sig_counts}
        ordered = sorted(ts_of_sig.values(), key=lambda t: t.sort_key)
        rank = {t: i for i, t in enumerate(ordered)}
        probs = [Fraction(0)] * len(ordered)
        for sig, c in sig_counts.items():
            probs[rank[ts_of_sig[sig]]] += Fraction(c, q ** m)
        to_std = self._std_syndrome
        tsid = [rank[ts_of_sig[sig_of_syn[to_std(s)]]] for s in range(q ** m)]
        return ordered, probs, tsid, dict(leaders)

    @cached_property
    def tsd(self) -> TypeSetDistribution:
        typesets, probs, _, _ = self._table
        return TypeSetDistribution(self.n, self.q, tuple(typesets), tuple(probs))

    @cached_property
    def _tsid(self):
        return self._table[2]

    def typeset_id(self, s: int) -> int:
        return int(self._tsid[s])

    def leader_type_counts(self) -> dict:
        return dict(self._table[3])

    # -- single cosets -------------------------------------------------------
    def _coset_members(self, s: int):
        """Coset members in standard coordinates, with their weights (q=2) or type counts."""
        Z = self._coset_std(self._std_syndrome(s))
        if self.q == 2:
            return Z, np.bitwise_count(Z).astype(np.int64)
        C = np.stack([(Z == a).sum(axis=1) for a in range(self.q)], axis=1)
        return Z, C

    def _to_original(self, z_std) -> int:
        if self.q == 2:
            return packed_unpermute(int(z_std), self.perm, 2)
        return packed_unpermute(pack(z_std, self.q), self.perm, self.q)

    def coset_type_counts(self, s: int) -> dict:
        Z, T = self._coset_members(s)
        if self.q == 2:
            counts = np.bincount(T, minlength=self.n + 1)
            return {weight_type(self.n, w): int(c) for w, c in enumerate(counts) if c}
        return dict(Counter(tuple(int(x) for x in row) for row in T))

    def sample(self, s: int, p: EmpiricalType, rng) -> int:
        Z, T = self._coset_members(s)
        if self.q == 2:
            idx = np.flatnonzero(T == p[1])
        else:
            idx = np.flatnonzero((T == np.array(p)).all(axis=1))
        if idx.size == 0:
            raise ValueError(f"type {p} does not occur in the coset of syndrome {s}")
        return self._to_original(Z[idx[rng.randrange(idx.size)]])

    def coset_leader(self, s: int) -> int:
        Z, T = self._coset_members(s)
        wt = T if self.q == 2 else self.n - T[:, 0]
        best = np.flatnonzero(wt == wt.min())
        cands = [self._to_original(Z[i]) for i in best]
        return min(cands, key=lambda z: _lex_key(z, self.n, self.q))

    # -- codewords -----------------------------------------------------------
    def codeword_weights(self) -> np.ndarray:
        """Weight of every codeword (coset of 0)."""
        Z, T = self._coset_members(0)
        return T if self.q == 2 else self.n - T[:, 0]


def _compact(arr: np.ndarray):
    """Python lists index faster than numpy for per-call lookups on small tables."""
    return arr.tolist() if arr.size <= (1 << 16) else arr


def _all_digit_vectors(k: int, q: int) -> np.ndarray:
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    idx = np.arange(q ** k, dtype=np.int64)
    return np.stack([(idx // q ** j) % q for j in range(k)], axis=1)


class TrivialCosets(CosetGeometry):
    """H = I_n: every coset is a single vector, the syndrome itself."""

    def __init__(self, n: int, q: int):
        self.n, self.q, self.k = n, q, 0
        self._types = all_types(n, q)
        self._rank = {p: i for i, p in enumerate(self._types)}

    @cached_property
    def tsd(self) -> TypeSetDistribution:
        total = self.q ** self.n
        return TypeSetDistribution(
            self.n, self.q,
            tuple(TypeSet((p,)) for p in self._types),
            tuple(Fraction(type_class_size(p), total) for p in self._types),
        )

    def typeset_id(self, s: int) -> int:
        if self.q == 2:
            return s.bit_count() if hasattr(s, "bit_count") else bin(s).count("1")
        return self._rank[packed_type(s, self.n, self.q)]

    def coset_type_counts(self, s: int) -> dict:
        return {packed_type(s, self.n, self.q): 1}

    def sample(self, s: int, p: EmpiricalType, rng) -> int:
        if packed_type(s, self.n, self.q) != tuple(p):
            raise ValueError("type not in singleton coset")
        return s

    def leader_type_counts(self) -> dict:
        return {p: type_class_size(p) for p in self._types}

    def coset_leader(self, s: int) -> int:
        return s


class CompleteCosets(CosetGeometry):
    """k = n: the single (empty) syndrome's coset is all of F_q^n."""

    def __init__(self, n: int, q: int):
        self.n, self.q, self.k = n, q, n

    @cached_property
    def tsd(self) -> TypeSetDistribution:
        return TypeSetDistribution(self.n, self.q, (TypeSet(tuple(all_types(self.n, self.q))),), (Fraction(1),))

    def typeset_id(self, s: int) -> int:
        return 0

    def coset_type_counts(self, s: int) -> dict:
        return {p: type_class_size(p) for p in all_types(self.n, self.q)}

    def sample(self, s: int, p: EmpiricalType, rng) -> int:
        if sum(p) != self.n or len(p) != self.q:
            raise ValueError("invalid type")
        symbols = [a for a, c in enumerate(p) for _ in range(c)]
        rng.shuffle(symbols)
        return pack(symbols, self.q)

    def leader_type_counts(self) -> dict:
        return {weight_type(self.n, 0) if self.q == 2 else (self.n,) + (0,) * (self.q - 1): 1}

    def coset_leader(self, s: int) -> int:
        return 0


class BinaryRepetitionCosets(CosetGeometry):
    """[n, 1] binary repetition code with H = [1 | I_{n−1}].

    The coset of s is {[0 | s], [1 | s̄]}, with weights wt(s) and n − wt(s).
    """

    def __init__(self, n: int):
        if n < 2:
            raise ValueError("repetition code needs n >= 2")
        self.n, self.q, self.k = n, 2, 1
        self._full = (1 << n) - 1

    @cached_property
    def tsd(self) -> TypeSetDistribution:
        n = self.n
        typesets, probs = [], []
        for w in range(n // 2 + 1):
            count = math.comb(n, w) if 2 * w < n else math.comb(n, w) // 2
            typesets.append(TypeSet((weight_type(n, w), weight_type(n, n - w))))
            probs.append(Fraction(count, 1 << (n - 1)))
        return TypeSetDistribution(n, 2, tuple(typesets), tuple(probs))

    def typeset_id(self, s: int) -> int:
        w = s.bit_count() if hasattr(s, "bit_count") else bin(s).count("1")
        return min(w, self.n - w)

    def _pair(self, s: int) -> tuple:
        z0 = s << 1
        return z0, z0 ^ self._full

    def coset_type_counts(self, s: int) -> dict:
        return dict(Counter(packed_type(z, self.n, 2) for z in self._pair(s)))

    def sample(self, s: int, p: EmpiricalType, rng) -> int:
        cands = [z for z in self._pair(s) if packed_type(z, self.n, 2) == tuple(p)]
        if not cands:
            raise ValueError("type not in coset")
        return cands[rng.randrange(len(cands))]

    def leader_type_counts(self) -> dict:
        n = self.n
        return {weight_type(n, w): (math.comb(n, w) if 2 * w < n else math.comb(n, w) // 2)
                for w in range(n // 2 + 1)}

    def coset_leader(self, s: int) -> int:
        return min(self._pair(s), key=lambda z: _lex_key(z, self.n, 2))


class JuxtaposedCosets(CosetGeometry):
    """I_r ⊗ H built from the geometry of H.

    Block b of a vector occupies coordinates [b·n_b, (b+1)·n_b) and block b of
    the syndrome the digits [b·m_b, (b+1)·m_b).
    """

    def __init__(self, base: CosetGeometry, r: int):
        if r < 1:
            raise ValueError("r must be positive")
        self.base, self.r = base, r
        self.n, self.q, self.k = base.n * r, base.q, base.k * r
        self._syn_radix = base.q ** base.m
        self._vec_radix = base.q ** base.n

    @cached_property
    def _combos(self):
        base = self.base.tsd
        T = len(base)
        acc: dict = {}
        ts_of_combo = {}
        for combo in itertools.combinations_with_replacement(range(T), self.r):
            mult = math.factorial(self.r)
            for c in Counter(combo).values():
                mult //= math.factorial(c)
            prob = Fraction(mult)
            t = None
            for i in combo:
                prob *= base.probs[i]
                t = base.typesets[i] if t is None else t.minkowski(base.typesets[i])
            ts_of_combo[combo] = t
            acc[t] = acc.get(t, 0) + prob
        tsd = TypeSetDistribution.from_dict(self.n, self.q, acc)
        return tsd, {c: tsd.index(t) for c, t in ts_of_combo.items()}

    @property
    def tsd(self) -> TypeSetDistribution:
        return self._combos[0]

    def _blocks(self, x: int, radix: int) -> list:
        out = []
        for _ in range(self.r):
            x, d = divmod(x, radix)
            out.append(d)
        return out

    def typeset_id(self, s: int) -> int:
        ids = sorted(self.base.typeset_id(sb) for sb in self._blocks(s, self._syn_radix))
        return self._combos[1][tuple(ids)]

    def _block_counts(self, s: int) -> list:
        return [self.base.coset_type_counts(sb) for sb in self._blocks(s, self._syn_radix)]

    def coset_type_counts(self, s: int) -> dict:
        acc = {(0,) * self.q: 1}
        for bc in self._block_counts(s):
            nxt: dict = {}
            for a, ca in acc.items():
                for b, cb in bc.items():
                    t = add_types(a, b)
                    nxt[t] = nxt.get(t, 0) + ca * cb
            acc = nxt
        return acc

    def sample(self, s: int, p: EmpiricalType, rng) -> int:
        """Uniform member of type p: choose per-block types by exact counting, then sample blocks."""
        blocks = self._blocks(s, self._syn_radix)
        counts = [self.base.coset_type_counts(sb) for sb in blocks]
        # ways[b][t] = number of ways blocks b.. realize the total type t
        ways = [None] * (self.r + 1)
        ways[self.r] = {(0,) * self.q: 1}
        for b in range(self.r - 1, -1, -1):
            nxt: dict = {}
            for a, ca in counts[b].items():
                for t, ct in ways[b + 1].items():
                    u = add_types(a, t)
                    nxt[u] = nxt.get(u, 0) + ca * ct
            ways[b] = nxt
        p = tuple(p)
        if p not in ways[0]:
            raise ValueError(f"type {p} does not occur in the coset")
        z = 0
        remaining = p
        for b in range(self.r):
            options = []
            for a, ca in counts[b].items():
                rest = sub_types(remaining, a)
                if min(rest) < 0:
                    continue
                c = ca * ways[b + 1].get(rest, 0)
                if c:
                    options.append((a, c))
            options.sort(key=lambda o: type_sort_key(o[0]))
            u = rng.randrange(sum(c for _, c in options))
            for a, c in options:
                if u < c:
                    break
                u -= c
            z += self.base.sample(blocks[b], a, rng) * self._vec_radix ** b
            remaining = sub_types(remaining, a)
        return z

    def leader_type_counts(self) -> dict:
        base = self.base.leader_type_counts()
        acc = {(0,) * self.q: 1}
        for _ in range(self.r):
            nxt: dict = {}
            for a, ca in acc.items():
                for b, cb in base.items():
                    t = add_types(a, b)
                    nxt[t] = nxt.get(t, 0) + ca * cb
            acc = nxt
        return acc

    def coset_leader(self, s: int) -> int:
        return sum(self.base.coset_leader(sb) * self._vec_radix ** b
                   for b, sb in enumerate(self._blocks(s, self._syn_radix)))
