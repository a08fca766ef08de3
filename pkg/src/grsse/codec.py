"""Runtime encoder and decoder.

Both sides draw a permutation and a syndrome offset per iteration from a
shared SplitMix64 stream.  Only the encoder uses local randomness (type
acceptance and the choice of a coset member).  The wire format is the
prefix code of the accepting index L followed by k_L payload symbols of
⌈log2 q⌉ bits each, most significant bit first.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property

from .bitcodes import HuffmanCode, MalformedPrefix, elias_gamma, elias_gamma_decode
from .codes import LinearCode
from .gf import (
    FieldVector,
    PackedLinearMap,
    PermutationMatrix,
    pack,
    packed_add,
    packed_permute,
    packed_sub,
    packed_type,
    packed_unpermute,
    packed_weight,
    unpack,
)
from .planner import IterationPlan, KappaPlan, LazyKappaPlan

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
CODERS = ("huffman", "elias-gamma")
REJECT = None


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SyncRng:
    """SplitMix64; identical seeds give identical streams everywhere."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return _mix64(self.state)

    def bounded(self, bound: int) -> int:
        """Unbiased integer in [0, bound) by rejecting the top partial range of 64-bit words."""
        if bound < 1:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % bound


def derive_seed(seed: int, index: int) -> int:
    """Seed of block ``index``: the index-th output of SplitMix64 seeded with ``seed``."""
    return _mix64((seed + (index + 1) * GOLDEN_GAMMA) & MASK64)


def _draw(rng: SyncRng, n: int, m: int, q: int) -> tuple[list, int]:
    perm = list(range(n))
    for i in range(n - 1, 0, -1):
        j = rng.bounded(i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    offset = [rng.bounded(q) for _ in range(m)]
    return perm, pack(offset, q)


def draw_common_randomness(rng: SyncRng, n: int, n_minus_k: int, q: int = 2):
    """One iteration's (Π, B): Fisher–Yates over n coordinates, then n−k offset symbols."""
    perm, b = _draw(rng, n, n_minus_k, q)
    return PermutationMatrix(tuple(perm)), FieldVector.from_packed(b, n_minus_k, q)


# ---------------------------------------------------------------------------
# per-code runtime tables


class _CodeRuntime:
    def __init__(self, code: LinearCode):
        self.code = code
        self.n, self.k, self.m, self.q = code.n, code.k, code.m, code.q
        sf = code.standard
        self.std_perm = sf.col_perm.perm
        if self.m:
            self.syndrome = code.H.syndrome_map
            self.to_std = PackedLinearMap(sf.row_transform, self.q)
            self.parity = PackedLinearMap(sf.h_tilde, self.q) if self.k else None
        self.cosets = code.cosets

    def syndrome_of(self, z: int) -> int:
        return self.syndrome(z) if self.m else 0

    def message_of(self, w: int) -> int:
        """First k standard-form coordinates of w (packed)."""
        ws = packed_permute(w, self.std_perm, self.q)
        return ws & ((1 << self.k) - 1) if self.q == 2 else ws % self.q ** self.k

    def word_of(self, msg: int, offset: int) -> int:
        """The w with message ``msg`` and syndrome ``offset``: [M | R·B − M·H̃ᵀ] in standard coordinates."""
        q, k = self.q, self.k
        if self.m == 0:
            ws = msg
        else:
            rb = self.to_std(offset)
            mh = self.parity(msg) if k else 0
            tail = packed_sub(rb, mh, self.m, q)
            ws = msg | (tail << k) if q == 2 else msg + tail * q ** k
        return packed_unpermute(ws, self.std_perm, q)


class _IterationSampler:
    """Cumulative acceptance thresholds γ_{t,p}/p_t per type set."""

    def __init__(self, it: IterationPlan, runtime: _CodeRuntime):
        probs = runtime.cosets.tsd.probs
        self.table = {}
        for tid, entries in it.gamma_by_typeset().items():
            pt = float(probs[tid])
            acc, cum = 0.0, []
            for p, mass in entries:
                acc += float(mass) / pt
                cum.append((acc, p))
            if it.terminal:
                cum = [(c / acc, p) for c, p in cum]
            self.table[tid] = cum

    def draw(self, tid: int, u: float):
        for c, p in self.table.get(tid, ()):
            if u < c:
                return p
        return REJECT


# ---------------------------------------------------------------------------
# messages


@dataclass(frozen=True)
class BitMessage:
    """Prefix code of L followed by the payload bits."""

    bits: str
    L: int
    prefix_len: int

    @property
    def payload(self) -> str:
        return self.bits[self.prefix_len:]

    def __len__(self):
        return len(self.bits)


@dataclass(frozen=True)
class SimulationResult:
    y: FieldVector
    L: int
    message: BitMessage
    distortion: int


def symbol_bits(q: int) -> int:
    return (q - 1).bit_length()


class Codec:
    """Encoder/decoder bound to one plan and one index coder."""

    def __init__(self, plan: KappaPlan, coder: str = "huffman"):
        if coder not in CODERS:
            raise ValueError(f"coder must be one of {CODERS}")
        if coder == "huffman":
            if isinstance(plan, LazyKappaPlan):
                raise ValueError("Huffman coding needs the whole law of L; use elias-gamma with lazy plans")
            if not plan.terminal:
                raise ValueError("Huffman coding needs a terminal plan")
        self.plan = plan
        self.coder = coder
        self.n, self.q = plan.n, plan.q
        self._runtimes: dict = {}
        self._samplers: dict = {}

    @cached_property
    def huffman(self) -> HuffmanCode:
        return HuffmanCode(self.plan.p_L)

    def _runtime(self, j: int) -> _CodeRuntime:
        rt = self._runtimes.get(j)
        if rt is None:
            rt = self._runtimes[j] = _CodeRuntime(self.plan.codes[j])
        return rt

    def _sampler(self, index: int) -> tuple[IterationPlan, _CodeRuntime, _IterationSampler]:
        hit = self._samplers.get(index)
        if hit is None:
            it = self.plan.iteration(index)
            rt = self._runtime(it.code_index)
            hit = self._samplers[index] = (it, rt, _IterationSampler(it, rt))
        return hit

    # -- prefix ----------------------------------------------------------------
    def index_bits(self, L: int) -> str:
        return self.huffman.encode(L) if self.coder == "huffman" else elias_gamma(L)

    def read_index(self, bits: str, pos: int) -> tuple[int, int]:
        if self.coder == "huffman":
            return self.huffman.decode(bits, pos)
        return elias_gamma_decode(bits, pos)

    def _payload_bits(self, msg: int, k: int) -> str:
        width = symbol_bits(self.q)
        if width == 0 or k == 0:
            return ""
        return "".join(format(d, f"0{width}b") for d in unpack(msg, k, self.q))

    # -- encode ----------------------------------------------------------------
    def encode_packed(self, x: int, seed: int, local_rng: random.Random | None = None):
        """Encode a packed input; returns (packed output, L, BitMessage)."""
        n, q = self.n, self.q
        rng = SyncRng(seed)
        local = local_rng if local_rng is not None else random.Random(f"grsse-local:{seed}")
        index = 0
        while True:
            index += 1
            try:
                it, rt, sampler = self._sampler(index)
            except IndexError:
                raise RuntimeError("plan exhausted before any iteration accepted") from None
            perm, offset = _draw(rng, n, rt.m, q)
            xp = packed_permute(x, perm, q)
            s = packed_sub(offset, rt.syndrome_of(xp), rt.m, q)
            p = sampler.draw(rt.cosets.typeset_id(s), local.random())
            if p is REJECT:
                continue
            v = rt.cosets.sample(s, p, local)
            z = packed_unpermute(v, perm, q)
            y = packed_add(x, z, n, q)
            msg = rt.message_of(packed_add(xp, v, n, q))
            prefix = self.index_bits(index)
            bits = prefix + self._payload_bits(msg, rt.k)
            return y, index, BitMessage(bits, index, len(prefix))

    def encode(self, x, seed: int, local_rng: random.Random | None = None) -> SimulationResult:
        xv = _as_vector(x, self.n, self.q)
        y, L, message = self.encode_packed(xv.packed(), seed, local_rng)
        d = packed_weight(packed_sub(y, xv.packed(), self.n, self.q), self.n, self.q)
        return SimulationResult(FieldVector.from_packed(y, self.n, self.q), L, message, d)

    # -- decode ----------------------------------------------------------------
    def decode_at(self, bits: str, pos: int, seed: int) -> tuple[int, int]:
        """Decode one message starting at ``pos``; returns (packed output, next position)."""
        L, pos = self.read_index(bits, pos)
        try:
            codes = [self.plan.iteration(i).code_index for i in range(1, L + 1)]
        except IndexError:
            raise MalformedPrefix(f"iteration index {L} is beyond the plan") from None
        rt = self._runtime(codes[-1])
        width = symbol_bits(self.q)
        end = pos + rt.k * width
        if end > len(bits):
            raise MalformedPrefix("bitstream ends inside the payload")
        if rt.k and width:
            digits = [int(bits[pos + i * width:pos + (i + 1) * width], 2) for i in range(rt.k)]
            if any(d >= self.q for d in digits):
                raise MalformedPrefix("payload symbol out of range")
            msg = pack(digits, self.q)
        else:
            msg = 0
        rng = SyncRng(seed)
        for j in codes:
            perm, offset = _draw(rng, self.n, self._runtime(j).m, self.q)
        w = rt.word_of(msg, offset)
        return packed_unpermute(w, perm, self.q), end

    def decode(self, message, seed: int) -> FieldVector:
        bits = message.bits if isinstance(message, BitMessage) else message
        y, end = self.decode_at(bits, 0, seed)
        if end != len(bits):
            raise MalformedPrefix("trailing bits after the message")
        return FieldVector.from_packed(y, self.n, self.q)


def _as_vector(x, n: int, q: int) -> FieldVector:
    if isinstance(x, FieldVector):
        if (x.n, x.q) != (n, q):
            raise ValueError("input does not match the plan's (n, q)")
        return x
    return FieldVector.from_packed(int(x), n, q)


def _codec(plan: KappaPlan, coder: str) -> Codec:
    cache = plan.__dict__.setdefault("_codecs", {})
    if coder not in cache:
        cache[coder] = Codec(plan, coder)
    return cache[coder]


def encode(x, plan: KappaPlan, seed: int, coder: str = "huffman") -> SimulationResult:
    return _codec(plan, coder).encode(x, seed)


def decode(message, plan: KappaPlan, seed: int, coder: str = "huffman") -> FieldVector:
    return _codec(plan, coder).decode(message, seed)


def sample_accept(it: IterationPlan, s, code: LinearCode, local_rng: random.Random):
    """Draw the accepted type for syndrome ``s``, or ``REJECT``."""
    rt = _CodeRuntime(code)
    sv = s.packed() if isinstance(s, FieldVector) else int(s)
    tid = code.cosets.typeset_id(sv)
    if tid >= len(code.cosets.tsd):
        raise ValueError("syndrome's type set is not in the plan")
    return _IterationSampler(it, rt).draw(tid, local_rng.random())


def sample_vector_in_coset(s, p, code: LinearCode, local_rng: random.Random) -> FieldVector:
    """A uniform member of the coset of ``s`` with type ``p``."""
    sv = s.packed() if isinstance(s, FieldVector) else int(s)
    z = code.cosets.sample(sv, tuple(p), local_rng)
    return FieldVector.from_packed(z, code.n, code.q)


def output_type(y: int, x: int, n: int, q: int):
    return packed_type(packed_sub(y, x, n, q), n, q)
