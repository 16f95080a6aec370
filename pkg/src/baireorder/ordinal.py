"""
Countable ordinals in Cantor normal form.

An ordinal is stored as a tuple of ``(exponent, coefficient)`` terms with
strictly decreasing exponents, where every exponent is itself an
:class:`Ordinal`. The empty tuple is 0. Only comparison, addition,
classification and parity are provided; nothing in the engine multiplies
ordinals.
"""

import enum
from dataclasses import dataclass
from functools import total_ordering
from typing import Any, NamedTuple, Optional, Tuple, Union

from .config import DEFAULT_CONFIG
from .errors import OrdinalDepthError, ValidationError

DEPTH_CAP = DEFAULT_CONFIG.ordinal_depth_cap


class Order(enum.Enum):
    """Outcome of a three-way comparison."""
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"

    @classmethod
    def from_sign(cls, sign: int) -> "Order":
        if sign < 0:
            return cls.LESS
        if sign > 0:
            return cls.GREATER
        return cls.EQUAL

    def flipped(self) -> "Order":
        return {Order.LESS: Order.GREATER, Order.GREATER: Order.LESS}.get(self, self)


class Parity(enum.Enum):
    EVEN = "even"
    ODD = "odd"


class OrdinalKind(enum.Enum):
    ZERO = "zero"
    SUCCESSOR = "successor"
    LIMIT = "limit"


class Classification(NamedTuple):
    kind: OrdinalKind
    pred: Optional["Ordinal"] = None


# Indexed by n % 2 for the finite part n. Self-test fault injection swaps it.
_PARITY = (Parity.EVEN, Parity.ODD)


@total_ordering
@dataclass(frozen=True)
class Ordinal:
    """Ordinal below epsilon_0 in Cantor normal form."""
    terms: Tuple[Tuple["Ordinal", int], ...] = ()

    def __post_init__(self):
        terms = tuple(self.terms)
        object.__setattr__(self, "terms", terms)
        for i, (exp, coeff) in enumerate(terms):
            if not isinstance(exp, Ordinal):
                raise ValidationError(f"CNF exponent must be an Ordinal, got {exp!r}")
            if isinstance(coeff, bool) or not isinstance(coeff, int) or coeff < 1:
                raise ValidationError(f"CNF coefficient must be a positive integer, got {coeff!r}")
            if i > 0 and _cmp(terms[i - 1][0], exp) <= 0:
                raise ValidationError("CNF exponents must be strictly decreasing")
        if self.depth > DEPTH_CAP:
            raise OrdinalDepthError(f"CNF nesting depth {self.depth} exceeds cap {DEPTH_CAP}")

    # -- constructors -----------------------------------------------------

    @classmethod
    def of(cls, n: int) -> "Ordinal":
        """The finite ordinal ``n``."""
        if isinstance(n, bool) or not isinstance(n, int) or n < 0:
            raise ValidationError(f"Finite ordinal must be a nonnegative integer, got {n!r}")
        if n == 0:
            return ZERO
        return cls(((ZERO, n),))

    @classmethod
    def coerce(cls, value: Union["Ordinal", int]) -> "Ordinal":
        if isinstance(value, Ordinal):
            return value
        return cls.of(value)

    # -- structure --------------------------------------------------------

    @property
    def depth(self) -> int:
        if not self.terms:
            return 0
        return 1 + max(exp.depth for exp, _ in self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_finite(self) -> bool:
        return all(exp.is_zero for exp, _ in self.terms)

    @property
    def finite_part(self) -> int:
        """The ``n`` in ``self = gamma + n`` with gamma zero or a limit."""
        if self.terms and self.terms[-1][0].is_zero:
            return self.terms[-1][1]
        return 0

    @property
    def limit_part(self) -> "Ordinal":
        if self.terms and self.terms[-1][0].is_zero:
            return Ordinal(self.terms[:-1])
        return self

    @property
    def leading_exponent(self) -> "Ordinal":
        return self.terms[0][0] if self.terms else ZERO

    def __int__(self) -> int:
        if not self.is_finite:
            raise ValidationError(f"{self} is not finite")
        return self.finite_part

    # -- arithmetic and order ---------------------------------------------

    def __add__(self, other: Union["Ordinal", int]) -> "Ordinal":
        return ord_add(self, Ordinal.coerce(other))

    def __radd__(self, other: int) -> "Ordinal":
        return ord_add(Ordinal.coerce(other), self)

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, int) and not isinstance(other, bool):
            return other >= 0 and self.terms == Ordinal.of(other).terms
        if not isinstance(other, Ordinal):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.terms)

    def __lt__(self, other: Union["Ordinal", int]) -> bool:
        return _cmp(self, Ordinal.coerce(other)) < 0

    # -- text form --------------------------------------------------------

    def to_json(self) -> list:
        """Nested ``[[exponent, coefficient], ...]`` form; finite exponents as ints."""
        out = []
        for exp, coeff in self.terms:
            out.append([int(exp) if exp.is_finite else exp.to_json(), coeff])
        return out

    @classmethod
    def from_json(cls, data: Any) -> "Ordinal":
        if isinstance(data, int) and not isinstance(data, bool):
            return cls.of(data)
        if isinstance(data, str):
            try:
                return cls.of(int(data))
            except ValueError as exc:
                raise ValidationError(f"Malformed ordinal {data!r}") from exc
        if not isinstance(data, list):
            raise ValidationError(f"Malformed ordinal {data!r}")
        terms = []
        for term in data:
            if not isinstance(term, list) or len(term) != 2:
                raise ValidationError(f"Malformed CNF term {term!r}")
            terms.append((cls.from_json(term[0]), term[1]))
        return cls(tuple(terms))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exp, coeff in self.terms:
            if exp.is_zero:
                parts.append(str(coeff))
                continue
            if exp == ONE:
                base = "ω"
            elif exp.is_finite:
                base = f"ω^{int(exp)}"
            else:
                base = f"ω^({exp})"
            parts.append(base if coeff == 1 else f"{base}·{coeff}")
        return "+".join(parts)

    def __repr__(self) -> str:
        return f"Ordinal({self})"


def _cmp(a: Ordinal, b: Ordinal) -> int:
    for (ea, ca), (eb, cb) in zip(a.terms, b.terms):
        c = _cmp(ea, eb)
        if c:
            return c
        if ca != cb:
            return -1 if ca < cb else 1
    return (len(a.terms) > len(b.terms)) - (len(a.terms) < len(b.terms))


ZERO = Ordinal()
ONE = Ordinal(((ZERO, 1),))
OMEGA = Ordinal(((ONE, 1),))


def omega_power(k: int) -> Ordinal:
    """omega^k for a finite k."""
    return Ordinal(((Ordinal.of(k), 1),))


def omega_times(j: int, m: int = 0) -> Ordinal:
    """The ordinal omega*j + m."""
    terms = []
    if j:
        terms.append((ONE, j))
    if m:
        terms.append((ZERO, m))
    return Ordinal(tuple(terms))


def ord_compare(a: Ordinal, b: Ordinal) -> Order:
    """Three-way comparison of CNF ordinals (lexicographic on terms)."""
    return Order.from_sign(_cmp(a, b))


def ord_add(a: Ordinal, b: Ordinal) -> Ordinal:
    """
    Ordinal sum ``a + b``.

    Terms of ``a`` below the leading exponent of ``b`` are absorbed; a term of
    equal exponent merges its coefficient with ``b``'s leading term.
    """
    if b.is_zero:
        return a
    lead_exp, lead_coeff = b.terms[0]
    kept = []
    for exp, coeff in a.terms:
        c = _cmp(exp, lead_exp)
        if c > 0:
            kept.append((exp, coeff))
        elif c == 0:
            lead_coeff += coeff
            break
        else:
            break
    return Ordinal(tuple(kept) + ((lead_exp, lead_coeff),) + b.terms[1:])


def ord_classify(a: Ordinal) -> Classification:
    if a.is_zero:
        return Classification(OrdinalKind.ZERO)
    if a.finite_part:
        return Classification(OrdinalKind.SUCCESSOR, ord_predecessor(a))
    return Classification(OrdinalKind.LIMIT)


def ord_predecessor(a: Ordinal) -> Ordinal:
    n = a.finite_part
    if n == 0:
        raise ValidationError(f"{a} has no predecessor")
    head = a.terms[:-1]
    if n > 1:
        return Ordinal(head + ((ZERO, n - 1),))
    return Ordinal(head)


def ord_parity(a: Ordinal) -> Parity:
    """Parity of the finite part; 0 and limit ordinals are even."""
    return _PARITY[a.finite_part % 2]


def is_even(a: Ordinal) -> bool:
    return ord_parity(a) is Parity.EVEN


def ord_split_row(a: Ordinal) -> Tuple[int, int]:
    """
    Write ``a`` as ``omega*j + m``.

    Raises
    ------
    ValidationError if ``a >= omega^2``
    """
    j = m = 0
    for exp, coeff in a.terms:
        if exp == ONE:
            j = coeff
        elif exp.is_zero:
            m = coeff
        else:
            raise ValidationError(f"{a} is not below omega^2")
    return j, m


def ord_split_block(a: Ordinal, level: int) -> Tuple[int, Ordinal]:
    """
    Write ``a < omega^level`` as ``omega^(level-1)*i + rho`` with ``rho < omega^(level-1)``.

    Parameters
    ----------
    a : Ordinal
    level : int, at least 1

    Returns
    -------
    i : int
    rho : Ordinal
    """
    if not a.terms:
        return 0, ZERO
    exp, coeff = a.terms[0]
    sub = Ordinal.of(level - 1)
    c = _cmp(exp, sub)
    if c > 0:
        raise ValidationError(f"{a} is not below omega^{level}")
    if c == 0:
        return coeff, Ordinal(a.terms[1:])
    return 0, a


def ord_block_start(i: int, level: int) -> Ordinal:
    """The ordinal omega^(level-1)*i."""
    if i == 0:
        return ZERO
    return Ordinal(((Ordinal.of(level - 1), i),))
