"""Prefix codes for the iteration index: Elias gamma and Huffman.

Bit strings are plain ``str`` objects over {'0', '1'}.
"""
from __future__ import annotations

import heapq
import math


class MalformedPrefix(ValueError):
    """The bitstream ends inside a prefix codeword or holds an unknown one."""


def elias_gamma(value: int) -> str:
    if value < 1:
        raise ValueError("Elias gamma encodes positive integers only")
    body = bin(value)[2:]
    return "0" * (len(body) - 1) + body


def elias_gamma_decode(bits: str, pos: int = 0) -> tuple[int, int]:
    """Decode one codeword at ``pos``; returns (value, next position)."""
    zeros = 0
    while pos + zeros < len(bits) and bits[pos + zeros] == "0":
        zeros += 1
    end = pos + 2 * zeros + 1
    if end > len(bits):
        raise MalformedPrefix("bitstream ends inside an Elias-gamma codeword")
    return int(bits[pos + zeros:end], 2), end


def elias_gamma_length(value: int) -> int:
    return 2 * (value.bit_length() - 1) + 1


class HuffmanCode:
    """Huffman code over iteration indices 1..len(pmf).

    Ties merge the pair whose largest index is smallest, so the codebook
    depends only on the pmf.  A single-symbol support gets the empty word.
    """

    def __init__(self, pmf):
        support = [(i + 1, p) for i, p in enumerate(pmf) if p > 0]
        if not support:
            raise ValueError("Huffman code needs a nonempty support")
        self.codebook: dict[int, str] = {}
        if len(support) == 1:
            self.codebook[support[0][0]] = ""
        else:
            # heap entries: (prob, max index, tiebreak, tree)
            heap = [(p, i, i, i) for i, p in support]
            heapq.heapify(heap)
            counter = len(pmf) + 1
            while len(heap) > 1:
                p1, m1, _, a = heapq.heappop(heap)
                p2, m2, _, b = heapq.heappop(heap)
                heapq.heappush(heap, (p1 + p2, max(m1, m2), counter, (a, b)))
                counter += 1
            stack = [(heap[0][3], "")]
            while stack:
                node, prefix = stack.pop()
                if isinstance(node, tuple):
                    stack.append((node[1], prefix + "1"))
                    stack.append((node[0], prefix + "0"))
                else:
                    self.codebook[node] = prefix
        self._decode_table = {w: i for i, w in self.codebook.items()}
        self._max_len = max(len(w) for w in self.codebook.values())

    def encode(self, value: int) -> str:
        try:
            return self.codebook[value]
        except KeyError:
            raise ValueError(f"index {value} has zero probability under the Huffman pmf") from None

    def decode(self, bits: str, pos: int = 0) -> tuple[int, int]:
        if self._max_len == 0:
            return next(iter(self.codebook)), pos
        end = pos
        while end < len(bits) and end - pos < self._max_len:
            end += 1
            hit = self._decode_table.get(bits[pos:end])
            if hit is not None:
                return hit, end
        raise MalformedPrefix("bitstream ends inside a Huffman codeword")

    def expected_length(self, pmf) -> float:
        return sum(p * len(self.codebook[i + 1]) for i, p in enumerate(pmf) if p > 0)


def entropy_bits(pmf) -> float:
    return -sum(float(p) * math.log2(p) for p in pmf if p > 0)
