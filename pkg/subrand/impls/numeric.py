# Copyright (c) subrand contributors.
# Licensed under the MIT license.

"""Exact dyadic/rational arithmetic, binary strings, clopen subsets of Cantor space.

Binary strings are plain `str` objects over the alphabet {'0', '1'}; the empty
string is a valid string and [''] is the whole space. Nothing in this module
(nor in the library) uses floating point.
"""

import re
import itertools
import functools
from fractions import Fraction
from numbers import Integral

from .errors import MalformedInput, PreconditionViolated

Rational = Fraction

_BITS_RE = re.compile('^[01]*$')
_DYADIC_RE = re.compile(r'^\s*(-?\d+)\s*/\s*2\^(\d+)\s*$')


class Dyadic:
    """Exact number `numerator * 2^-exponent`, always stored in canonical form."""
    __slots__ = ('numerator', 'exponent')

    def __init__(self, numerator=0, exponent=0):
        if isinstance(numerator, Dyadic):
            numerator, exponent = numerator.numerator, numerator.exponent + exponent
        if not isinstance(numerator, Integral) or not isinstance(exponent, Integral):
            raise TypeError('Dyadic expects integral numerator/exponent, get: %r, %r' % (numerator, exponent))
        numerator, exponent = int(numerator), int(exponent)
        if exponent < 0:
            numerator, exponent = numerator << -exponent, 0
        if numerator == 0:
            exponent = 0
        elif exponent > 0:
            shift = min((numerator & -numerator).bit_length() - 1, exponent)
            numerator, exponent = numerator >> shift, exponent - shift
        object.__setattr__(self, 'numerator', numerator)
        object.__setattr__(self, 'exponent', exponent)

    def __setattr__(self, name, value):
        raise AttributeError('Dyadic values are immutable')

    @staticmethod
    def coerce(value):
        if isinstance(value, Dyadic):
            return value
        if isinstance(value, Integral):
            return Dyadic(int(value), 0)
        if isinstance(value, Fraction):
            den = value.denominator
            if den & (den - 1) == 0:
                return Dyadic(value.numerator, den.bit_length() - 1)
        raise TypeError('Value is not dyadic: %r' % (value,))

    @staticmethod
    def parse(text):
        match = _DYADIC_RE.match(str(text))
        if match is None:
            try:
                return Dyadic(int(str(text).strip()), 0)
            except ValueError:
                raise MalformedInput('Cannot parse dyadic number from: %r (expecting "m/2^n")' % (text,))
        return Dyadic(int(match.group(1)), int(match.group(2)))

    def to_fraction(self):
        return Fraction(self.numerator, 1 << self.exponent)

    def scale(self, k):
        """Multiply by 2^k (k may be negative)."""
        return Dyadic(self.numerator, self.exponent - k)

    def floor(self):
        return self.numerator >> self.exponent

    def is_integer(self):
        return self.exponent == 0

    def _align(self, other):
        e = max(self.exponent, other.exponent)
        return self.numerator << (e - self.exponent), other.numerator << (e - other.exponent), e

    def __add__(self, other):
        if isinstance(other, Fraction) and not isinstance(other, Integral):
            return self.to_fraction() + other
        try:
            other = Dyadic.coerce(other)
        except TypeError:
            return NotImplemented
        a, b, e = self._align(other)
        return Dyadic(a + b, e)

    __radd__ = __add__

    def __neg__(self):
        return Dyadic(-self.numerator, self.exponent)

    def __pos__(self):
        return self

    def __abs__(self):
        return Dyadic(abs(self.numerator), self.exponent)

    def __sub__(self, other):
        if isinstance(other, Fraction) and not isinstance(other, Integral):
            return self.to_fraction() - other
        try:
            other = Dyadic.coerce(other)
        except TypeError:
            return NotImplemented
        a, b, e = self._align(other)
        return Dyadic(a - b, e)

    def __rsub__(self, other):
        if isinstance(other, Fraction) and not isinstance(other, Integral):
            return other - self.to_fraction()
        try:
            other = Dyadic.coerce(other)
        except TypeError:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        if isinstance(other, Fraction) and not isinstance(other, Integral):
            return self.to_fraction() * other
        try:
            other = Dyadic.coerce(other)
        except TypeError:
            return NotImplemented
        return Dyadic(self.numerator * other.numerator, self.exponent + other.exponent)

    __rmul__ = __mul__

    def __truediv__(self, other):
        # dyadics are not closed under division, the quotient is a Rational
        return self.to_fraction() / (other.to_fraction() if isinstance(other, Dyadic) else other)

    def __rtruediv__(self, other):
        return other / self.to_fraction()

    def __pow__(self, k):
        if not isinstance(k, Integral) or k < 0:
            return NotImplemented
        return Dyadic(self.numerator ** k, self.exponent * k)

    def _cmp(self, other):
        if isinstance(other, Fraction) and not isinstance(other, Integral):
            a, b = self.to_fraction(), other
            return (a > b) - (a < b)
        other = Dyadic.coerce(other)
        a, b, _ = self._align(other)
        return (a > b) - (a < b)

    def __eq__(self, other):
        if isinstance(other, (Dyadic, Integral, Fraction)):
            return self._cmp(other) == 0
        return NotImplemented

    def __lt__(self, other):
        if isinstance(other, (Dyadic, Integral, Fraction)):
            return self._cmp(other) < 0
        return NotImplemented

    def __le__(self, other):
        if isinstance(other, (Dyadic, Integral, Fraction)):
            return self._cmp(other) <= 0
        return NotImplemented

    def __gt__(self, other):
        if isinstance(other, (Dyadic, Integral, Fraction)):
            return self._cmp(other) > 0
        return NotImplemented

    def __ge__(self, other):
        if isinstance(other, (Dyadic, Integral, Fraction)):
            return self._cmp(other) >= 0
        return NotImplemented

    def __hash__(self):
        if self.exponent == 0:
            return hash(self.numerator)
        return hash(self.to_fraction())

    def __bool__(self):
        return self.numerator != 0

    def __repr__(self):
        return 'Dyadic(%d, %d)' % (self.numerator, self.exponent)

    def __str__(self):
        return '%d/2^%d' % (self.numerator, self.exponent)


ZERO = Dyadic(0)
ONE = Dyadic(1)


def pow2(k):
    """2^k as an exact dyadic, k may be negative."""
    return Dyadic(1, -k)


def floor_to_precision(value, precision):
    """Largest dyadic m*2^-precision that is <= value (value: Dyadic, Fraction or int)."""
    value = value.to_fraction() if isinstance(value, Dyadic) else Fraction(value)
    scaled = value * (1 << precision)
    return Dyadic(scaled.numerator // scaled.denominator, precision)


def as_fraction(value):
    return value.to_fraction() if isinstance(value, Dyadic) else Fraction(value)


def as_exact(value):
    """Dyadic when the value has a power-of-two denominator, Rational otherwise."""
    if isinstance(value, Dyadic):
        return value
    try:
        return Dyadic.coerce(value)
    except TypeError:
        return Fraction(value)


def format_exact(value):
    if isinstance(value, Infinity):
        return str(value)
    if isinstance(value, Dyadic):
        return str(value)
    value = as_exact(value)
    if isinstance(value, Dyadic):
        return str(value)
    return '%d/%d' % (value.numerator, value.denominator)


def parse_exact(text):
    text = str(text).strip()
    if '^' in text:
        return Dyadic.parse(text)
    try:
        return as_exact(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise MalformedInput('Cannot parse exact number from: %r' % (text,))


@functools.total_ordering
class Infinity:
    """The distinguished unbounded value; `-INFINITY` orders below every number."""
    _instances = {}

    def __new__(cls, sign=1):
        if sign not in cls._instances:
            cls._instances[sign] = super().__new__(cls)
            cls._instances[sign].sign = sign
        return cls._instances[sign]

    def __neg__(self):
        return Infinity(-self.sign)

    def __rsub__(self, other):
        if isinstance(other, (Integral, Dyadic, Fraction)):
            return Infinity(-self.sign)
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, (Integral, Dyadic, Fraction)):
            return self
        return NotImplemented

    __radd__ = __add__

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        if isinstance(other, Infinity):
            return self.sign < other.sign
        if isinstance(other, (Integral, Dyadic, Fraction)):
            return self.sign < 0
        return NotImplemented

    def __hash__(self):
        return hash(('inf', self.sign))

    def __repr__(self):
        return 'INFINITY' if self.sign > 0 else 'NEG_INFINITY'

    def __str__(self):
        return 'inf' if self.sign > 0 else '-inf'


INFINITY = Infinity(1)
NEG_INFINITY = Infinity(-1)


def is_bits(value):
    return isinstance(value, str) and _BITS_RE.match(value) is not None


def as_bits(value):
    if not is_bits(value):
        raise MalformedInput('Binary strings must only include characters 0 and 1, get: %r' % (value,))
    return value


def restrict(x, i):
    """x restricted to its first i bits."""
    if i < 0 or i > len(x):
        raise PreconditionViolated('Restriction x|%d is undefined for |x| = %d' % (i, len(x)))
    return x[:i]


def is_prefix(y, x):
    """y is a (not necessarily proper) prefix of x."""
    return x.startswith(y)


def strings_of_length(n):
    return (''.join(bits) for bits in itertools.product('01', repeat=n))


def strings_up_to(maxlen):
    """All strings of length <= maxlen in length-lexicographic order."""
    for n in range(maxlen + 1):
        yield from strings_of_length(n)


def llex_key(x):
    return (len(x), x)


def llex_cmp(x, y):
    kx, ky = llex_key(x), llex_key(y)
    return (kx > ky) - (kx < ky)


def sqsubseteq_key(p):
    m, x = p
    return (len(x), x, m)


def sqsubseteq_cmp(p, q):
    """Well-ordering on index/string pairs: llex order on strings, then index order."""
    kp, kq = sqsubseteq_key(p), sqsubseteq_key(q)
    return (kp > kq) - (kp < kq)


def minimal_strings(strings):
    """The prefix-minimal elements of a collection of strings, in llex order."""
    kept, lookup = [], set()
    for x in sorted(set(strings), key=llex_key):
        if any(x[:j] in lookup for j in range(len(x) + 1)):
            continue
        kept.append(x)
        lookup.add(x)
    return kept


def dyadic_sum_of_cylinders(strings):
    """Sum of 2^-|x| over the given strings (no prefix reduction)."""
    strings = list(strings)
    if not strings:
        return ZERO
    depth = max(len(x) for x in strings)
    return Dyadic(sum(1 << (depth - len(x)) for x in strings), depth)


class ClopenSet:
    """Finite set of generators; [X] is the union of the cylinders [x], x in X."""
    __slots__ = ('generators', '_minimal', '_lookup')

    def __init__(self, generators=()):
        generators = frozenset(as_bits(x) for x in generators)
        object.__setattr__(self, 'generators', generators)
        minimal = tuple(minimal_strings(generators))
        object.__setattr__(self, '_minimal', minimal)
        object.__setattr__(self, '_lookup', frozenset(minimal))

    def __setattr__(self, name, value):
        raise AttributeError('ClopenSet values are immutable')

    @property
    def prefix_free(self):
        return len(self._minimal) == len(self.generators)

    @property
    def minimal(self):
        return self._minimal

    def __iter__(self):
        return iter(sorted(self.generators, key=llex_key))

    def __len__(self):
        return len(self.generators)

    def __contains__(self, x):
        return x in self.generators

    def __eq__(self, other):
        return isinstance(other, ClopenSet) and other.generators == self.generators

    def __hash__(self):
        return hash(self.generators)

    def __repr__(self):
        return 'ClopenSet(%s)' % ([x for x in self],)

    def covers(self, x):
        """Some generator is a prefix of x, i.e. [x] is inside [X]."""
        return any(x[:j] in self._lookup for j in range(len(x) + 1))

    def union(self, other):
        return ClopenSet(self.generators | ClopenSet.of(other).generators)

    def difference(self, other):
        """Generator-wise difference (equals the open-set difference for prefix-free sets)."""
        return ClopenSet(self.generators - ClopenSet.of(other).generators)

    @staticmethod
    def of(value):
        return value if isinstance(value, ClopenSet) else ClopenSet(value)

    def measure(self):
        return dyadic_sum_of_cylinders(self._minimal)

    def conditional_measure(self, x):
        if self.covers(x):
            return ONE
        n = len(x)
        extensions = [a for a in self._minimal if len(a) > n and a.startswith(x)]
        return dyadic_sum_of_cylinders(extensions).scale(n)


def measure(X):
    return ClopenSet.of(X).measure()


def conditional_measure(A, x):
    return ClopenSet.of(A).conditional_measure(as_bits(x))


def minimal_prefix_free(X):
    return ClopenSet(minimal_strings(as_bits(x) for x in X))
