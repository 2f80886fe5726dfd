"""Boolean oracles for the Deutsch-Jozsa and Bernstein-Vazirani problems.

Truth tables are integer bitmasks: bit ``x`` of ``table`` is ``f(x)``, and
``x`` is read with qubit 1 as its most significant bit.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import combinations
from typing import Any

from .errors import ArityTooLarge

MAX_ARITY = 16
MAX_ENUMERATION_ARITY = 4


class Classification(str, enum.Enum):
    CONSTANT = "constant"
    BALANCED = "balanced"
    NEITHER = "neither"


@dataclass(frozen=True)
class BooleanFunction:
    n: int
    table: int

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MAX_ARITY:
            raise ValueError(f"arity must be in 1..{MAX_ARITY}, got {self.n}")
        if not 0 <= self.table < (1 << self.size):
            raise ValueError(f"table 0x{self.table:x} does not fit {self.size} entries")

    @property
    def size(self) -> int:
        return 1 << self.n

    def __call__(self, x: int) -> int:
        return (self.table >> x) & 1

    def outputs(self) -> list[int]:
        return [(self.table >> x) & 1 for x in range(self.size)]

    @property
    def ones(self) -> int:
        return bin(self.table).count("1")

    @property
    def is_canonical(self) -> bool:
        return self(0) == 0

    @classmethod
    def from_outputs(cls, outputs: list[int]) -> "BooleanFunction":
        size = len(outputs)
        n = size.bit_length() - 1
        if size < 2 or 1 << n != size:
            raise ValueError(f"{size} outputs is not a power of two")
        return cls(n, sum((int(v) & 1) << x for x, v in enumerate(outputs)))

    @classmethod
    def parse(cls, text: str, n: int) -> "BooleanFunction":
        """Read a hex/binary/decimal bitmask such as ``"0x96"``."""
        return cls(n, int(text, 0))

    def hex(self) -> str:
        width = max(1, self.size // 4)
        return f"0x{self.table:0{width}x}"

    def to_dict(self) -> dict[str, Any]:
        return {"n": self.n, "table": self.hex()}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "BooleanFunction":
        return cls(int(data["n"]), int(str(data["table"]), 0))


@dataclass(frozen=True)
class BVFunction:
    """``f(x) = a . x XOR b`` over ``n`` bits."""

    n: int
    a: int
    b: int = 0

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MAX_ARITY:
            raise ValueError(f"arity must be in 1..{MAX_ARITY}, got {self.n}")
        if not 0 <= self.a < (1 << self.n):
            raise ValueError(f"mask {self.a:#b} does not fit {self.n} bits")
        if self.b not in (0, 1):
            raise ValueError(f"b must be 0 or 1, got {self.b}")

    def bits(self) -> list[int]:
        """Digits a_1..a_n, most significant first."""
        return [(self.a >> (self.n - 1 - j)) & 1 for j in range(self.n)]

    def to_dict(self) -> dict[str, Any]:
        return {"n": self.n, "a": f"0b{self.a:0{self.n}b}", "b": self.b}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "BVFunction":
        digits = str(data["a"]).removeprefix("0b")
        n = int(data.get("n", len(digits)))
        return cls(n, int(digits, 2), int(data.get("b", 0)))


def parity(v: int) -> int:
    return bin(v).count("1") & 1


def classify(f: BooleanFunction) -> Classification:
    ones = f.ones
    if ones == 0 or ones == f.size:
        return Classification.CONSTANT
    if ones == f.size // 2:
        return Classification.BALANCED
    return Classification.NEITHER


def canonicalize(f: BooleanFunction) -> BooleanFunction:
    """Pick the representative with f(0...0) = 0 under bitwise NOT."""
    if f(0) == 0:
        return f
    return BooleanFunction(f.n, f.table ^ ((1 << f.size) - 1))


def enumerate_balanced(n: int) -> list[BooleanFunction]:
    """All canonical balanced functions of ``n`` bits, ascending by table."""
    if n > MAX_ENUMERATION_ARITY:
        raise ArityTooLarge(f"exhaustive enumeration is limited to n <= {MAX_ENUMERATION_ARITY}")
    size = 1 << n
    # canonical: x = 0 maps to 0, so choose the half of ones among x = 1..size-1
    tables = sorted(sum(1 << x for x in ones) for ones in combinations(range(1, size), size // 2))
    return [BooleanFunction(n, t) for t in tables]


def enumerate_canonical(n: int) -> list[BooleanFunction]:
    """The constant function followed by every canonical balanced one."""
    return [BooleanFunction(n, 0), *enumerate_balanced(n)]


def bv_table(g: BVFunction) -> BooleanFunction:
    return BooleanFunction(g.n, sum((parity(g.a & x) ^ g.b) << x for x in range(1 << g.n)))


def classical_worst_case(n: int) -> int:
    """Deterministic queries needed to separate constant from balanced."""
    return (1 << (n - 1)) + 1
