"""Bijective codecs between parameter configurations and natural numbers.

Everything here runs on plain Python ints, which are unbounded, so the
codes can grow as large as the configuration space demands (roughly
2**(sum of parameter indices)) without losing exactness.

The building blocks:

``pair(x, y) = 2**x * (2*y + 1) - 1``
    A bijection from ordered pairs of naturals onto the naturals.  The
    inverse recovers ``x`` as the number of factors of two in ``z + 1``
    and ``y`` from the remaining odd part.

``encode_triple(m, n, q) = pair(pair(m-1, n-1), q-1)``
    A bijection from ordered triples of positive naturals onto the
    naturals, built by pairing twice.  The minus-ones pull the domain
    down so that zero is reachable.

``encode_seq(a1, ..., ak)``
    A bijection from non-empty finite sequences of naturals onto the
    naturals: ``t + 1`` has set bits exactly at positions
    ``b_i = a1 + ... + a_i + (i - 1)``, so the sequence is recovered
    from the gaps between set bits.  The sequence length is
    ``popcount(t + 1)``.

On top of these, ``encode_config``/``decode_config`` map a full
three-phase parameter assignment to one code and back.  Decoding is
total: integers that do not correspond to any configuration of the
declared shape decode to an :class:`Infeasible` value carrying the
reason, never an exception, so windows of raw integers can be scanned
safely.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

__all__ = [
    "ParamSchema",
    "PhaseShares",
    "Settings",
    "Infeasible",
    "pair",
    "unpair",
    "encode_triple",
    "decode_triple",
    "encode_seq",
    "decode_seq",
    "encode_config",
    "decode_config",
    "decode_structure",
    "split_settings",
    "settings_values",
    "check_settings",
]

#: One concrete index per declared parameter, in declaration order.
Settings = tuple[int, ...]

PHASE_NAMES = ("veni", "vidi", "vici")


@dataclass(frozen=True)
class ParamSchema:
    """A quantization grid for one parameter.

    Index ``i`` in ``[0, count)`` maps to the value ``min + i * step``.
    Codes carry indices, never raw values, so the codec stays exact.
    """

    name: str
    min: float
    step: float
    count: int

    def __post_init__(self) -> None:
        if self.step <= 0:
            raise ValueError(f"parameter {self.name!r}: step must be > 0, got {self.step}")
        if self.count < 1:
            raise ValueError(f"parameter {self.name!r}: count must be >= 1, got {self.count}")

    def value(self, index: int) -> float:
        """Grid value at ``index``; raises if the index is off the grid."""
        if not 0 <= index < self.count:
            raise ValueError(
                f"parameter {self.name!r}: index {index} outside grid [0, {self.count})"
            )
        return self.min + index * self.step


@dataclass(frozen=True)
class PhaseShares:
    """How the n declared parameters split across the three phases."""

    a: int
    b: int
    c: int

    def __post_init__(self) -> None:
        if min(self.a, self.b, self.c) < 0:
            raise ValueError(f"shares must be non-negative, got {(self.a, self.b, self.c)}")

    @property
    def total(self) -> int:
        return self.a + self.b + self.c

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)


@dataclass(frozen=True)
class Infeasible:
    """A code that decodes to no configuration of the declared shape.

    Infeasibility is a value, not an error: most integers in an
    enumeration window decode to the wrong arities, and the explorer
    must be able to skip them.
    """

    reason: str


def _check_natural(value: int, label: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise TypeError(f"{label} must be an int, got {type(value).__name__}")
    if value < 0:
        raise ValueError(f"{label} must be >= 0, got {value}")
    return value


def pair(x: int, y: int) -> int:
    """Map the ordered pair ``(x, y)`` to ``2**x * (2*y + 1) - 1``.

    Exponential in ``x``, linear in ``y``; bijective onto the naturals.
    """
    _check_natural(x, "x")
    _check_natural(y, "y")
    return (1 << x) * (2 * y + 1) - 1


def unpair(z: int) -> tuple[int, int]:
    """Invert :func:`pair`: split ``z`` back into its unique ``(x, y)``.

    ``x`` is the number of factors of two in ``z + 1``; ``y`` comes from
    the remaining odd cofactor.
    """
    _check_natural(z, "z")
    n = z + 1
    x = (n & -n).bit_length() - 1
    y = ((n >> x) - 1) >> 1
    return (x, y)


def encode_triple(m: int, n: int, q: int) -> int:
    """Map the ordered triple of positive naturals ``(m, n, q)`` to one code."""
    for label, value in (("m", m), ("n", n), ("q", q)):
        _check_natural(value, label)
        if value == 0:
            raise ValueError(f"{label} must be >= 1, got 0")
    return pair(pair(m - 1, n - 1), q - 1)


def decode_triple(z: int) -> tuple[int, int, int]:
    """Invert :func:`encode_triple`; total on the naturals."""
    inner, q1 = unpair(z)
    m1, n1 = unpair(inner)
    return (m1 + 1, n1 + 1, q1 + 1)


def encode_seq(seq: tuple[int, ...] | list[int]) -> int:
    """Map a non-empty sequence of naturals to one code.

    ``result + 1`` has exactly ``len(seq)`` set bits, at strictly
    increasing positions ``a1``, ``a1 + a2 + 1``, ``a1 + a2 + a3 + 2``
    and so on.
    """
    if len(seq) == 0:
        raise ValueError("cannot encode an empty sequence")
    total = 0
    position = -1
    for element in seq:
        _check_natural(element, "sequence element")
        position += element + 1
        total += 1 << position
    return total - 1


def decode_seq(t: int) -> tuple[int, ...]:
    """Invert :func:`encode_seq` via the set-bit positions of ``t + 1``."""
    _check_natural(t, "t")
    n = t + 1
    elements = []
    previous = -1
    position = 0
    while n:
        if n & 1:
            elements.append(position - previous - 1)
            previous = position
        n >>= 1
        position += 1
    return tuple(elements)


def split_settings(settings: Settings, shares: PhaseShares) -> tuple[Settings, Settings, Settings]:
    """Partition a full index tuple into (veni, vidi, vici) slices."""
    if len(settings) != shares.total:
        raise ValueError(
            f"settings have {len(settings)} indices but shares sum to {shares.total}"
        )
    a, b = shares.a, shares.b
    return (settings[:a], settings[a : a + b], settings[a + b :])


def _phase_code(indices: Settings) -> int:
    # A phase with no parameters contributes the fixed code 0.
    return encode_seq(indices) if indices else 0


def encode_config(settings: Settings, shares: PhaseShares) -> int:
    """Encode a full configuration as one natural number.

    Each phase's indices collapse to a phase code via :func:`encode_seq`
    (0 for a phase with no parameters); the three phase codes then nest
    through :func:`pair` as ``pair(veni, pair(vidi, vici))``.  Keeping
    the later phase codes in the linear slot of each pairing keeps the
    composite code single-exponential in the index sums, so every
    feasible configuration has a materializable code.
    """
    veni, vidi, vici = split_settings(settings, shares)
    return pair(_phase_code(veni), pair(_phase_code(vidi), _phase_code(vici)))


def decode_structure(code: int, shares: PhaseShares) -> Union[Settings, Infeasible]:
    """Decode a code against declared shares without any grid in hand.

    Checks the structural constraints only: per-phase arity must match
    the share, and a zero-share phase's slot must hold the code 0.
    Returns the flat index tuple or an :class:`Infeasible` reason.
    """
    _check_natural(code, "code")
    veni_code, rest = unpair(code)
    vidi_code, vici_code = unpair(rest)
    indices: list[int] = []
    for name, phase_code, share in zip(
        PHASE_NAMES, (veni_code, vidi_code, vici_code), shares.as_tuple()
    ):
        if share == 0:
            if phase_code != 0:
                return Infeasible(f"{name}: zero-share phase has nonzero slot {phase_code}")
            continue
        decoded = decode_seq(phase_code)
        if len(decoded) != share:
            return Infeasible(f"{name}: arity {len(decoded)} != share {share}")
        indices.extend(decoded)
    return tuple(indices)


def decode_config(
    code: int, shares: PhaseShares, schemas: list[ParamSchema] | tuple[ParamSchema, ...]
) -> Union[Settings, Infeasible]:
    """Invert :func:`encode_config`, validating indices against their grids.

    Total on the naturals: structurally or grid-wise invalid codes come
    back as :class:`Infeasible`, never as an exception.
    """
    if len(schemas) != shares.total:
        raise ValueError(
            f"{len(schemas)} schemas declared but shares sum to {shares.total}"
        )
    structural = decode_structure(code, shares)
    if isinstance(structural, Infeasible):
        return structural
    for position, (index, schema) in enumerate(zip(structural, schemas)):
        if index >= schema.count:
            return Infeasible(
                f"parameter {schema.name!r} (position {position}): "
                f"index {index} outside grid [0, {schema.count})"
            )
    return structural


def check_settings(
    settings: Settings, schemas: list[ParamSchema] | tuple[ParamSchema, ...]
) -> list[str]:
    """Return every way ``settings`` fails to fit the declared grids."""
    problems = []
    if len(settings) != len(schemas):
        problems.append(
            f"settings have {len(settings)} indices but {len(schemas)} parameters are declared"
        )
        return problems
    for position, (index, schema) in enumerate(zip(settings, schemas)):
        if not isinstance(index, int) or isinstance(index, bool) or index < 0:
            problems.append(
                f"parameter {schema.name!r} (position {position}): index {index!r} is not a natural"
            )
        elif index >= schema.count:
            problems.append(
                f"parameter {schema.name!r} (position {position}): "
                f"index {index} outside grid [0, {schema.count})"
            )
    return problems


def settings_values(
    settings: Settings, schemas: list[ParamSchema] | tuple[ParamSchema, ...]
) -> tuple[float, ...]:
    """Map a feasible index tuple to its concrete grid values."""
    if len(settings) != len(schemas):
        raise ValueError(
            f"settings have {len(settings)} indices but {len(schemas)} parameters are declared"
        )
    return tuple(schema.value(index) for schema, index in zip(schemas, settings))
