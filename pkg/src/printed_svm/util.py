"""Small shared utilities: a portable seeded RNG, rounding, hashing, JSON."""

import hashlib
import json
import math

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


class SplitMix64:
    """Deterministic 64-bit generator (splitmix64 finalizer over a Weyl
    sequence). Used for every shuffle/sample in the toolchain so results
    are reproducible across platforms and library versions."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Unbiased integer in [0, bound) via rejection sampling."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = _MASK64 - (_MASK64 + 1) % bound
        while True:
            r = self.next_u64()
            if r <= limit:
                return r % bound

    def float01(self) -> float:
        # 53 high bits -> uniform in [0, 1)
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def gauss(self) -> float:
        # Box-Muller; one value per call keeps the stream simple.
        u1 = self.float01()
        while u1 == 0.0:
            u1 = self.float01()
        u2 = self.float01()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]

    def permutation(self, count: int) -> list:
        idx = list(range(count))
        self.shuffle(idx)
        return idx


def derive_seed(seed: int, stream: int) -> int:
    """Independent child seed for sub-stream `stream` of a master seed."""
    return (seed + _GOLDEN * (stream + 1)) & _MASK64


def splitmix64_block(seed: int, start: int, count: int):
    """Vectorized splitmix64: outputs [start, start+count) of SplitMix64(seed).

    The stream is a pure function of the counter, so blocks can be produced
    in one shot; element k equals the (k+1)-th next_u64() call.
    """
    k = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    z = np.uint64(seed & _MASK64) + np.uint64(_GOLDEN) * k
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def round_half_away(x: float) -> int:
    """Round half away from zero (symmetric, language-portable)."""
    if x >= 0.0:
        return math.floor(x + 0.5)
    return math.ceil(x - 0.5)


def ceil_log2(value: int) -> int:
    if value < 1:
        raise ValueError("value must be >= 1")
    return (value - 1).bit_length()


def to_signed(raw: int, width: int) -> int:
    """Interpret `width` low bits of raw as a two's-complement value."""
    raw &= (1 << width) - 1
    if raw >= 1 << (width - 1):
        raw -= 1 << width
    return raw


def stable_json(obj) -> str:
    """Canonical JSON text: sorted keys, no whitespace churn."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()
