"""Exact rational interval arithmetic and box certification.

Intervals carry Fraction endpoints, so every enclosure computed here is
rigorous without any rounding-mode bookkeeping.  The branch-and-bound
driver decides whether a real polynomial is bounded away from zero on a
product of boxes, bisecting along the widest axis until the enclosure is
sign-definite or a subdivision budget runs out.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .poly import PolyFn


@dataclass(frozen=True)
class QInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, v) -> "QInterval":
        v = Fraction(v)
        return cls(v, v)

    @classmethod
    def of(cls, lo, hi) -> "QInterval":
        return cls(Fraction(lo), Fraction(hi))

    def __add__(self, other):
        other = _as_interval(other)
        return QInterval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self):
        return QInterval(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-_as_interval(other))

    def __rsub__(self, other):
        return _as_interval(other) - self

    def __mul__(self, other):
        other = _as_interval(other)
        cands = (self.lo * other.lo, self.lo * other.hi,
                 self.hi * other.lo, self.hi * other.hi)
        return QInterval(min(cands), max(cands))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative interval power")
        if k == 0:
            return QInterval.point(1)
        if k % 2 == 1:
            return QInterval(self.lo ** k, self.hi ** k)
        mags = (abs(self.lo), abs(self.hi))
        hi = max(mags) ** k
        lo = Fraction(0) if self.contains_zero() else min(mags) ** k
        return QInterval(lo, hi)

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def width(self) -> Fraction:
        return self.hi - self.lo

    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def split(self):
        m = self.midpoint()
        return QInterval(self.lo, m), QInterval(m, self.hi)

    def mag_hi(self) -> Fraction:
        return max(abs(self.lo), abs(self.hi))

    def __str__(self):
        return f"[{self.lo}, {self.hi}]"


def _as_interval(v) -> QInterval:
    if isinstance(v, QInterval):
        return v
    return QInterval.point(v)


def eval_interval(poly: PolyFn, values: dict) -> QInterval:
    """Rigorous enclosure of a real polynomial over interval arguments."""
    total = QInterval.point(0)
    for exps, coeff in poly.terms.items():
        if not coeff.is_real():
            raise ValueError("interval evaluation requires real coefficients")
        part = QInterval.point(coeff.re)
        for name, k in zip(poly.vars, exps):
            if k == 0:
                continue
            part = part * (_as_interval(values[name]) ** k)
        total = total + part
    return total


def certify_sign(poly: PolyFn, box: dict, max_nodes: int = 4000):
    """Decide whether a real polynomial is sign-definite on a box.

    Returns ("pos", lower_bound), ("neg", upper_bound) or ("unknown", None).
    Fixed variables may be passed as Fractions inside ``box``.  The bound
    returned is a rigorous bound on |poly| over the whole box.
    """
    names = [n for n in poly.vars if poly.uses(n)]
    base = {}
    split_names = []
    for n in names:
        v = _as_interval(box[n])
        base[n] = v
        if v.width() > 0:
            split_names.append(n)
    first = eval_interval(poly, base)
    sign = None
    best = None
    queue = [base]
    nodes = 0
    while queue:
        cur = queue.pop()
        nodes += 1
        if nodes > max_nodes:
            return ("unknown", None)
        enc = eval_interval(poly, cur)
        if enc.lo > 0:
            if sign == "neg":
                return ("unknown", None)
            sign = "pos"
            best = enc.lo if best is None else min(best, enc.lo)
            continue
        if enc.hi < 0:
            if sign == "pos":
                return ("unknown", None)
            sign = "neg"
            best = abs(enc.hi) if best is None else min(best, abs(enc.hi))
            continue
        # straddles zero: split the widest axis
        widest = None
        wdt = Fraction(0)
        for n in split_names:
            w = cur[n].width()
            if w > wdt:
                wdt = w
                widest = n
        if widest is None:
            # a point box that straddles only because it IS zero
            return ("unknown", None)
        a, b = cur[widest].split()
        for half in (a, b):
            nxt = dict(cur)
            nxt[widest] = half
            queue.append(nxt)
    if sign is None:
        # polynomial had no active variables: constant
        c = first
        if c.lo > 0:
            return ("pos", c.lo)
        if c.hi < 0:
            return ("neg", abs(c.hi))
        return ("unknown", None)
    return (sign, best)
