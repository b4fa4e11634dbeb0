"""Complex-coefficient polynomials: the symbol class for every operator.

Coefficients are stored lowest degree first in canonical form (no trailing
zeros; the zero polynomial has an empty coefficient tuple). All arithmetic
is exact up to double-precision rounding of the coefficients themselves.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "ComplexPolynomial",
    "AffineMap",
    "poly_eval",
    "poly_derivative",
    "poly_antiderivative0",
    "poly_compose",
    "poly_multiply",
    "parse_complex",
    "format_complex",
    "parse_polynomial",
    "format_polynomial",
]


def _canonical(coeffs: Iterable[complex]) -> tuple[complex, ...]:
    out = [complex(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


@dataclass(frozen=True)
class ComplexPolynomial:
    """Polynomial sum_k coeffs[k] * z**k with complex coefficients."""

    coeffs: tuple[complex, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _canonical(self.coeffs))

    @classmethod
    def monomial(cls, n: int, c: complex = 1.0) -> "ComplexPolynomial":
        if n < 0:
            raise ValueError("monomial degree must be nonnegative")
        return cls((0,) * n + (c,))

    @classmethod
    def constant(cls, c: complex) -> "ComplexPolynomial":
        return cls((c,))

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int | None:
        """Degree, or ``None`` for the zero polynomial."""
        return len(self.coeffs) - 1 if self.coeffs else None

    def coefficient(self, k: int) -> complex:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0j

    def as_array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=complex)

    def __call__(self, z):
        return poly_eval(self, z)

    def __add__(self, other):
        other = _coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return ComplexPolynomial(
            self.coefficient(k) + other.coefficient(k) for k in range(n)
        )

    __radd__ = __add__

    def __neg__(self):
        return ComplexPolynomial(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        return poly_multiply(self, _coerce(other))

    __rmul__ = __mul__

    def __str__(self):
        return format_polynomial(self)


def _coerce(x) -> ComplexPolynomial:
    if isinstance(x, ComplexPolynomial):
        return x
    if isinstance(x, (int, float, complex, np.number)):
        return ComplexPolynomial.constant(x)
    return ComplexPolynomial(x)


@dataclass(frozen=True)
class AffineMap:
    """The map z -> a*z + b."""

    a: complex
    b: complex = 0j

    def to_polynomial(self) -> ComplexPolynomial:
        return ComplexPolynomial((self.b, self.a))

    @classmethod
    def from_polynomial(cls, P: ComplexPolynomial) -> "AffineMap":
        deg = P.degree()
        if deg is not None and deg > 1:
            raise ValueError(f"polynomial of degree {deg} is not affine")
        return cls(P.coefficient(1), P.coefficient(0))

    def __call__(self, z):
        return self.a * z + self.b


def poly_eval(P: ComplexPolynomial, z):
    """Horner evaluation; ``z`` may be a scalar or a numpy array."""
    if P.is_zero:
        return np.zeros_like(z, dtype=complex) if isinstance(z, np.ndarray) else 0j
    acc = P.coeffs[-1]
    for c in reversed(P.coeffs[:-1]):
        acc = acc * z + c
    if isinstance(z, np.ndarray) and not isinstance(acc, np.ndarray):
        acc = np.full(z.shape, acc, dtype=complex)
    return acc


def poly_derivative(P: ComplexPolynomial) -> ComplexPolynomial:
    return ComplexPolynomial(k * c for k, c in enumerate(P.coeffs) if k > 0)


def poly_antiderivative0(P: ComplexPolynomial) -> ComplexPolynomial:
    """The antiderivative vanishing at the origin."""
    if P.is_zero:
        return P
    return ComplexPolynomial((0j,) + tuple(c / (k + 1) for k, c in enumerate(P.coeffs)))


def poly_multiply(P: ComplexPolynomial, Q: ComplexPolynomial) -> ComplexPolynomial:
    if P.is_zero or Q.is_zero:
        return ComplexPolynomial()
    return ComplexPolynomial(np.convolve(P.as_array(), Q.as_array()))


def _power(Q: np.ndarray, n: int) -> np.ndarray:
    result = np.ones(1, dtype=complex)
    base = Q
    while n:
        if n & 1:
            result = np.convolve(result, base)
        n >>= 1
        if n:
            base = np.convolve(base, base)
    return result


def poly_compose(P: ComplexPolynomial, Q: ComplexPolynomial) -> ComplexPolynomial:
    """Return P(Q(z)).

    Monomials c*z**n are raised by repeated squaring; everything else goes
    through Horner's scheme in polynomial arithmetic.
    """
    if P.is_zero:
        return P
    if Q.is_zero:
        return ComplexPolynomial.constant(P.coeffs[0])
    q = Q.as_array()
    nonzero = [k for k, c in enumerate(P.coeffs) if c != 0]
    if len(nonzero) == 1:
        n = nonzero[0]
        return ComplexPolynomial(P.coeffs[n] * _power(q, n))
    acc = np.array([P.coeffs[-1]], dtype=complex)
    for c in reversed(P.coeffs[:-1]):
        acc = np.convolve(acc, q)
        acc[0] += c
    return ComplexPolynomial(acc)


# --- text form -------------------------------------------------------------

_COMPLEX_RE = re.compile(
    r"""^\s*
    (?:
        (?P<re>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
        (?:(?P<sign>[+-])(?P<im>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?i)?
      |
        (?P<pure_sign>[+-]?)(?P<pure_im>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?i
    )
    \s*$""",
    re.VERBOSE,
)


def parse_complex(text: str) -> complex:
    """Parse ``<re>[+|-]<im>i`` (either part may be absent, e.g. ``-0.5i``)."""
    m = _COMPLEX_RE.match(text)
    if m is None:
        raise ValueError(f"malformed complex literal: {text!r}")
    if m.group("re") is not None:
        re_part = float(m.group("re"))
        if m.group("sign") is None:
            return complex(re_part, 0.0)
        im = float(m.group("im")) if m.group("im") else 1.0
        return complex(re_part, im if m.group("sign") == "+" else -im)
    im = float(m.group("pure_im")) if m.group("pure_im") else 1.0
    return complex(0.0, -im if m.group("pure_sign") == "-" else im)


def format_complex(c: complex) -> str:
    c = complex(c)
    if c.imag == 0:
        return repr(c.real)
    if c.real == 0:
        return f"{c.imag!r}i"
    sign = "-" if c.imag < 0 else "+"
    return f"{c.real!r}{sign}{abs(c.imag)!r}i"


def parse_polynomial(text: str) -> ComplexPolynomial:
    """Comma-separated coefficients, lowest degree first (``0,1`` is z)."""
    text = text.strip()
    if not text:
        return ComplexPolynomial()
    return ComplexPolynomial(parse_complex(part) for part in text.split(","))


def format_polynomial(P: ComplexPolynomial) -> str:
    return ",".join(format_complex(c) for c in P.coeffs) if P.coeffs else "0"


def as_polynomial(x: ComplexPolynomial | str | Sequence[complex] | complex | None) -> ComplexPolynomial:
    """Accept the common ways callers spell a polynomial."""
    if x is None:
        return ComplexPolynomial()
    if isinstance(x, str):
        return parse_polynomial(x)
    if isinstance(x, AffineMap):
        return x.to_polynomial()
    return _coerce(x)
