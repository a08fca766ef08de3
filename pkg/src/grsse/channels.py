"""Additive exchangeable noise models, kept as distributions over types."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .gf import EmpiricalType, all_types, is_prime, type_class_size, type_weight

KINDS = ("q-ary-symmetric", "hamming-ball", "constant-weight")
_ALIASES = {"bsc": "q-ary-symmetric", "qsc": "q-ary-symmetric", "symmetric": "q-ary-symmetric",
            "ball": "hamming-ball", "cw": "constant-weight", "constant": "constant-weight"}


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction))


@dataclass(frozen=True)
class NoiseModel:
    """Target noise law on F_q^n.

    ``exact`` selects the numeric backend: rational masses (requires a
    rational ``alpha`` for the symmetric channel) or binary64.  ``None``
    picks rationals whenever the parameters allow it.
    """

    kind: str
    n: int
    q: int = 2
    alpha: Fraction | float | None = None
    w: int | None = None
    exact: bool | None = None

    def __post_init__(self):
        kind = _ALIASES.get(self.kind, self.kind)
        if kind not in KINDS:
            raise ValueError(f"unknown channel kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if self.n < 1 or not is_prime(self.q):
            raise ValueError("need n >= 1 and prime q")
        if kind == "q-ary-symmetric":
            if isinstance(self.alpha, str):
                object.__setattr__(self, "alpha", Fraction(self.alpha))
            if self.alpha is None or not 0 <= self.alpha <= 1:
                raise ValueError(f"alpha must lie in [0, 1], got {self.alpha!r}")
        else:
            if self.w is None or not 0 <= self.w <= self.n:
                raise ValueError(f"w must lie in [0, n], got {self.w!r}")
        can_be_exact = kind != "q-ary-symmetric" or _is_exact(self.alpha)
        if self.exact is None:
            object.__setattr__(self, "exact", can_be_exact)
        elif self.exact and not can_be_exact:
            raise ValueError("exact backend needs a rational alpha")

    @classmethod
    def bsc(cls, n: int, alpha, exact=None) -> "NoiseModel":
        return cls("q-ary-symmetric", n, 2, alpha=alpha, exact=exact)

    @classmethod
    def ball(cls, n: int, w: int, q: int = 2, exact=None) -> "NoiseModel":
        return cls("hamming-ball", n, q, w=w, exact=exact)

    @classmethod
    def constant_weight(cls, n: int, w: int, q: int = 2, exact=None) -> "NoiseModel":
        return cls("constant-weight", n, q, w=w, exact=exact)

    def spec(self) -> dict:
        out = {"kind": self.kind, "n": self.n, "q": self.q}
        if self.kind == "q-ary-symmetric":
            a = self.alpha
            out["alpha"] = f"{a.numerator}/{a.denominator}" if isinstance(a, Fraction) else a
        else:
            out["w"] = self.w
        return out

    @classmethod
    def from_spec(cls, spec: dict, exact=None) -> "NoiseModel":
        alpha = spec.get("alpha")
        if isinstance(alpha, str):
            alpha = Fraction(alpha)
        return cls(spec["kind"], int(spec["n"]), int(spec.get("q", 2)), alpha=alpha,
                   w=spec.get("w"), exact=exact)

    def label(self) -> str:
        if self.kind == "q-ary-symmetric":
            return f"symmetric(alpha={self.alpha})"
        return f"{self.kind}(w={self.w})"


@dataclass(frozen=True)
class TypeDistribution:
    """Probability mass over P_n(F_q); ``mass`` maps types to probabilities."""

    n: int
    q: int
    mass: dict

    def __post_init__(self):
        if any(v < 0 for v in self.mass.values()):
            raise ValueError("negative mass")
        for p in self.mass:
            if len(p) != self.q or sum(p) != self.n:
                raise ValueError(f"{p} is not a type of F_{self.q}^{self.n}")
        total = sum(self.mass.values())
        if self.exact:
            if total != 1:
                raise ValueError(f"masses sum to {total}")
        elif abs(total - 1) > 1e-12:
            raise ValueError(f"masses sum to {total}")

    @cached_property
    def exact(self) -> bool:
        return all(_is_exact(v) for v in self.mass.values())

    def __getitem__(self, p: EmpiricalType):
        return self.mass.get(tuple(p), 0)

    def support(self) -> list:
        return [p for p, v in self.mass.items() if v > 0]

    def to_float(self) -> "TypeDistribution":
        return TypeDistribution(self.n, self.q, {p: float(v) for p, v in self.mass.items()})

    def vector_probability(self, p: EmpiricalType):
        """p_Z(z) for any z of type p."""
        v = self[p]
        return v / type_class_size(tuple(p)) if v else v

    def weight_pmf(self) -> list:
        out = [0] * (self.n + 1)
        for p, v in self.mass.items():
            out[type_weight(p)] += v
        return out


def type_distribution(model: NoiseModel) -> TypeDistribution:
    n, q = model.n, model.q
    types = all_types(n, q)
    conv = (lambda x: x) if model.exact else float
    mass = {}
    if model.kind == "q-ary-symmetric":
        a = Fraction(model.alpha) if model.exact else float(model.alpha)
        stay = 1 - a
        flip = a / (q - 1)
        for p in types:
            mass[p] = type_class_size(p) * stay ** p[0] * flip ** (n - p[0])
    else:
        keep = (lambda w: w <= model.w) if model.kind == "hamming-ball" else (lambda w: w == model.w)
        chosen = [p for p in types if keep(type_weight(p))]
        total = sum(type_class_size(p) for p in chosen)
        for p in types:
            mass[p] = Fraction(type_class_size(p), total) if p in chosen else Fraction(0)
    return TypeDistribution(n, q, {p: conv(v) for p, v in mass.items()})


def _xlog2(x) -> float:
    return 0.0 if x == 0 else float(x) * math.log2(x)


def _log2(x) -> float:
    if isinstance(x, int) or (isinstance(x, Fraction)):
        x = Fraction(x)
        # exact big-integer logs; floats would overflow for large type classes
        return math.log2(x.numerator) - math.log2(x.denominator)
    return math.log2(x)


def noise_entropy(dist: TypeDistribution) -> float:
    """H(Z) in bits, using that Z is uniform within each type class."""
    h = 0.0
    for p, v in dist.mass.items():
        if v > 0:
            h += float(v) * (_log2(type_class_size(p)) - _log2(v))
    return h


def capacity(dist: TypeDistribution) -> float:
    """n·log2 q − H(Z): the mutual information under a uniform input."""
    return dist.n * math.log2(dist.q) - noise_entropy(dist)


def asymptotic_ball_capacity(alpha: float, q: int = 2) -> float:
    """log q + (1−α)log(1−α) + α log(α/(q−1)), in bits per symbol."""
    if not 0 <= alpha <= 1 - 1 / q:
        raise ValueError(f"alpha must lie in [0, 1 - 1/q], got {alpha}")
    a = float(alpha)
    return math.log2(q) + _xlog2(1 - a) + (0.0 if a == 0 else a * math.log2(a / (q - 1)))


def tail_weight_probability(dist: TypeDistribution, threshold):
    """P(wt(Z) >= threshold); exact when the distribution is."""
    return sum((v for p, v in dist.mass.items() if type_weight(p) >= threshold), 0 if dist.exact else 0.0)
