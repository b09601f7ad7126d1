# Copyright (c) subrand contributors.
# Licensed under the MIT license.

"""Infinite binary sequences as pure index -> bit maps."""

import logging
from fractions import Fraction

import numpy as np

from .numeric import Dyadic, as_bits, floor_to_precision, pow2, format_exact
from .errors import HorizonExhausted, MalformedInput, PreconditionViolated


class SequenceSource:
    kind = 'abstract'

    def __init__(self):
        self._cache = ''

    def bit(self, n):
        raise NotImplementedError()

    def prefix(self, n):
        if n < 0:
            raise PreconditionViolated('Prefix length must be non-negative, get: %d' % n)
        if len(self._cache) < n:
            self._cache += ''.join(self.bit(k) for k in range(len(self._cache), n))
        return self._cache[:n]

    def describe(self):
        return {'kind': self.kind}

    def __repr__(self):
        return '%s(%s)' % (type(self).__name__, self.describe())


class ConstantSource(SequenceSource):
    kind = 'constant'

    def __init__(self, bit='0'):
        super().__init__()
        if bit not in ('0', '1'):
            raise MalformedInput('Constant sequence needs bit 0 or 1, get: %r' % (bit,))
        self.value = bit

    def bit(self, n):
        return self.value

    def describe(self):
        return {'kind': self.kind, 'bit': self.value}


class PeriodicSource(SequenceSource):
    kind = 'periodic'

    def __init__(self, word):
        super().__init__()
        self.word = as_bits(word)
        if not self.word:
            raise MalformedInput('Periodic sequence needs a non-empty word')

    def bit(self, n):
        return self.word[n % len(self.word)]

    def describe(self):
        return {'kind': self.kind, 'word': self.word}


class ChampernowneSource(SequenceSource):
    """Concatenation of all non-empty strings in length-lexicographic order: 0 1 00 01 10 11 000 ..."""
    kind = 'champernowne'

    def bit(self, n):
        if n < len(self._cache):
            return self._cache[n]
        length, offset = 1, n
        while offset >= length << length:
            offset -= length << length
            length += 1
        index, position = divmod(offset, length)
        return format(index, '0%db' % length)[position]

    def describe(self):
        return {'kind': self.kind}


class RationalSource(SequenceSource):
    """Binary expansion of p/q in [0, 1) by long division."""
    kind = 'rational'

    def __init__(self, p, q):
        super().__init__()
        value = Fraction(p, q)
        if not (0 <= value < 1):
            raise MalformedInput('Binary expansions are taken for values in [0, 1), get: %s' % value)
        self.value = value

    def bit(self, n):
        # (n+1)-th digit after the binary point
        return str((self.value.numerator << (n + 1)) // self.value.denominator & 1)

    def describe(self):
        return {'kind': self.kind, 'p': self.value.numerator, 'q': self.value.denominator}


class BitsSource(SequenceSource):
    """A finite bit buffer; queries past its end raise HorizonExhausted."""
    kind = 'bits'

    def __init__(self, bits, label=None):
        super().__init__()
        self.buffer = np.frombuffer(as_bits(bits).encode('ascii'), dtype=np.uint8) - ord('0')
        self.label = label

    def bit(self, n):
        if n >= self.buffer.shape[0]:
            raise HorizonExhausted('Sequence %s only holds %d bits, bit %d requested' % (self.label or self.kind, self.buffer.shape[0], n))
        return '1' if self.buffer[n] else '0'

    def prefix(self, n):
        if n > self.buffer.shape[0]:
            raise HorizonExhausted('Sequence %s only holds %d bits, prefix of %d requested' % (self.label or self.kind, self.buffer.shape[0], n))
        return ''.join('1' if b else '0' for b in self.buffer[:n].tolist())

    def describe(self):
        return {'kind': self.kind, 'bits': ''.join('1' if b else '0' for b in self.buffer.tolist())}


class FileSource(BitsSource):
    """ASCII 0/1 read from a file, whitespace ignored."""
    kind = 'file'

    def __init__(self, path):
        with open(path, 'r') as fp:
            text = ''.join(fp.read().split())
        if not text or set(text) - {'0', '1'}:
            raise MalformedInput('Sequence file %s must only hold 0/1 characters and whitespace' % path)
        super().__init__(text, label=path)
        self.path = path

    def describe(self):
        return {'kind': self.kind, 'path': self.path}


class TraceSource(BitsSource):
    """The bits of a diagonal trace, bounded by the trace horizon."""
    kind = 'trace'

    def __init__(self, trace):
        super().__init__(trace.bits, label='diagonal trace')
        self.horizon = len(trace.bits)

    def describe(self):
        return {'kind': self.kind, 'horizon': self.horizon}


def constant(bit='0'):
    return ConstantSource(bit)


def periodic(word):
    return PeriodicSource(word)


def alternating():
    return PeriodicSource('01')


def density(ones, period):
    """Periodic word with `ones` leading ones per period."""
    if not (0 <= ones <= period) or period < 1:
        raise MalformedInput('Density word needs 0 <= ones <= period, get: %d/%d' % (ones, period))
    return PeriodicSource('1' * ones + '0' * (period - ones))


def champernowne():
    return ChampernowneSource()


def rational_expansion(p, q):
    return RationalSource(p, q)


def from_file(path):
    return FileSource(path)


def from_trace(trace):
    return TraceSource(trace)


def prefix(source, n):
    return source.prefix(n)


def lln_statistic(source, n):
    if n < 1:
        raise PreconditionViolated('lln_statistic() needs n >= 1, get: %d' % n)
    bits = source.prefix(n)
    return Fraction(bits.count('1'), n)


class LLNParameters:
    """Betting fraction q and slope k0 so that lln(q) reaches 2^floor(n/k0) along a biased sequence."""

    def __init__(self, density, q, k0, growth):
        self.density, self.q, self.k0, self.growth = density, q, k0, growth

    def order(self):
        from . import orders
        return orders.closed_form('floor_div', k=self.k0)

    def to_dict(self):
        return {'density': format_exact(self.density), 'q': str(self.q), 'k0': self.k0, 'growth': format_exact(self.growth)}


def lln_parameters(source, horizon, precision=6):
    """Measured upper density u/v > 1/2 on [horizon/2, horizon]; q is 2u/v - 1 floored to `precision` bits.

    The per-block growth (1+q)^u (1-q)^(v-u) must exceed 1, and k0 is the least k with growth^k >= 2^(2v),
    i.e. 1/k0 <= c/2 for the per-bit logarithmic rate c.
    """
    if horizon < 2:
        raise PreconditionViolated('lln_parameters() needs horizon >= 2, get: %d' % horizon)
    bits = source.prefix(horizon)
    ones, best = 0, None
    for n in range(1, horizon + 1):
        ones += bits[n - 1] == '1'
        if 2 * n >= horizon:
            ratio = Fraction(ones, n)
            if best is None or ratio > best:
                best = ratio
    if best <= Fraction(1, 2):
        raise PreconditionViolated('Upper density %s of the sequence is not above 1/2' % best)
    q = floor_to_precision(2 * best - 1, precision)
    if q == 0:
        q = Dyadic(1, precision)
    if q >= 1:
        q = 1 - Dyadic(1, precision)
    u, v = best.numerator, best.denominator
    growth = (1 + q) ** u * (1 - q) ** (v - u)
    if growth <= 1:
        raise PreconditionViolated('No capital growth for q = %s at density %s' % (q, best))
    target, power, k0 = pow2(2 * v), growth, 1
    while power < target:
        power, k0 = power * growth, k0 + 1
        if k0 > (1 << 20):
            raise HorizonExhausted('Slope k0 for density %s exceeds 2^20' % best)
    logging.debug('LLN parameters: density=%s q=%s k0=%d' % (best, q, k0))
    return LLNParameters(best, q, k0, growth)
