"""Exact multivariate polynomial arithmetic over the Gaussian rationals.

Coefficients live in Q(i): pairs of ``fractions.Fraction`` with i^2 = -1.
Monomials are exponent tuples aligned with an explicit, ordered variable
tuple, so normal forms are canonical and equality is syntactic.  Negative
exponents are tolerated internally (they appear transiently during
conjugation by boundary-defining-function powers); ``is_polynomial``
checks that a value is a true polynomial again.

Display and serialization order monomials graded-lexicographically.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping


class QI:
    """A Gaussian rational re + im*i with exact Fraction parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    # -- algebra --

    def __add__(self, other):
        other = _as_qi(other)
        return QI(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_qi(other)
        return QI(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _as_qi(other) - self

    def __mul__(self, other):
        other = _as_qi(other)
        return QI(self.re * other.re - self.im * other.im,
                  self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_qi(other)
        n = other.re * other.re + other.im * other.im
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        return QI((self.re * other.re + self.im * other.im) / n,
                  (self.im * other.re - self.re * other.im) / n)

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power in Q(i)")
        out = QI(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conj(self):
        return QI(self.re, -self.im)

    def norm_sq(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    # -- predicates --

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_real(self) -> bool:
        return self.im == 0

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, QI):
            return self.re == other.re and self.im == other.im
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        return f"QI({self.re!r}, {self.im!r})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            if self.im == 1:
                return "i"
            if self.im == -1:
                return "-i"
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        mag = abs(self.im)
        imag = "i" if mag == 1 else f"{mag}*i"
        return f"({self.re}{sign}{imag})"


QI_ZERO = QI(0)
QI_ONE = QI(1)
QI_I = QI(0, 1)


def _as_qi(value) -> QI:
    if isinstance(value, QI):
        return value
    if isinstance(value, (int, Fraction)):
        return QI(value)
    raise TypeError(f"cannot coerce {value!r} into Q(i)")


def _grlex_key(exps: tuple) -> tuple:
    # graded lexicographic: total degree first, then lexicographic on the
    # exponent tuple; negated so sorting ascending lists leading terms last
    return (sum(exps), exps)


class PolyFn:
    """A sparse polynomial over Q(i) in a fixed ordered tuple of variables."""

    __slots__ = ("vars", "terms")

    def __init__(self, variables: tuple, terms: Mapping[tuple, QI] | None = None):
        self.vars = tuple(variables)
        clean = {}
        if terms:
            for exps, coeff in terms.items():
                coeff = _as_qi(coeff)
                if coeff:
                    clean[tuple(exps)] = coeff
        self.terms = clean

    # -- constructors --

    @classmethod
    def zero(cls, variables: tuple) -> "PolyFn":
        return cls(variables, {})

    @classmethod
    def constant(cls, variables: tuple, value) -> "PolyFn":
        value = _as_qi(value)
        if not value:
            return cls(variables, {})
        return cls(variables, {(0,) * len(variables): value})

    @classmethod
    def variable(cls, variables: tuple, name: str) -> "PolyFn":
        idx = variables.index(name)
        exps = [0] * len(variables)
        exps[idx] = 1
        return cls(variables, {tuple(exps): QI_ONE})

    @classmethod
    def monomial(cls, variables: tuple, exps: Iterable[int], coeff=1) -> "PolyFn":
        return cls(variables, {tuple(exps): _as_qi(coeff)})

    # -- ring operations --

    def _check(self, other: "PolyFn"):
        if self.vars != other.vars:
            raise ValueError(f"variable mismatch: {self.vars} vs {other.vars}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction, QI)):
            other = PolyFn.constant(self.vars, other)
        self._check(other)
        terms = dict(self.terms)
        for exps, coeff in other.terms.items():
            acc = terms.get(exps, QI_ZERO) + coeff
            if acc:
                terms[exps] = acc
            else:
                terms.pop(exps, None)
        return PolyFn(self.vars, terms)

    __radd__ = __add__

    def __neg__(self):
        return PolyFn(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, QI)):
            other = PolyFn.constant(self.vars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, QI)):
            other = _as_qi(other)
            if not other:
                return PolyFn.zero(self.vars)
            return PolyFn(self.vars,
                          {e: c * other for e, c in self.terms.items()})
        self._check(other)
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                key = tuple(a + b for a, b in zip(e1, e2))
                acc = terms.get(key, QI_ZERO) + c1 * c2
                if acc:
                    terms[key] = acc
                else:
                    terms.pop(key, None)
        return PolyFn(self.vars, terms)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative polynomial power")
        out = PolyFn.constant(self.vars, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- calculus and substitution --

    def derivative(self, name: str) -> "PolyFn":
        idx = self.vars.index(name)
        terms: dict = {}
        for exps, coeff in self.terms.items():
            k = exps[idx]
            if k == 0:
                continue
            new = list(exps)
            new[idx] = k - 1
            key = tuple(new)
            acc = terms.get(key, QI_ZERO) + coeff * k
            if acc:
                terms[key] = acc
            else:
                terms.pop(key, None)
        return PolyFn(self.vars, terms)

    def set_zero(self, name: str) -> "PolyFn":
        """Evaluate one variable at 0 (drops monomials containing it)."""
        idx = self.vars.index(name)
        terms = {}
        for exps, coeff in self.terms.items():
            if exps[idx] == 0:
                terms[exps] = coeff
            elif exps[idx] < 0:
                raise ZeroDivisionError(
                    f"evaluating {name}=0 against exponent {exps[idx]}")
        return PolyFn(self.vars, terms)

    def evaluate(self, values: Mapping[str, object]):
        """Full evaluation; values may be Fractions, QIs or intervals."""
        missing = [v for v in self.vars if v not in values]
        if missing:
            raise ValueError(f"no value for variables {missing}")
        total = None
        for exps, coeff in sorted(self.terms.items()):
            part = None
            for name, k in zip(self.vars, exps):
                if k == 0:
                    continue
                fac = values[name] ** k if k >= 0 else values[name] ** k
                part = fac if part is None else part * fac
            term = coeff if part is None else part * coeff
            total = term if total is None else total + term
        if total is None:
            return QI_ZERO
        return total

    def substitute(self, name: str, replacement: "PolyFn") -> "PolyFn":
        """Replace a variable by a polynomial (same variable tuple)."""
        self._check(replacement)
        idx = self.vars.index(name)
        out = PolyFn.zero(self.vars)
        for exps, coeff in self.terms.items():
            k = exps[idx]
            if k < 0:
                raise ValueError("cannot substitute into a Laurent term")
            rest = list(exps)
            rest[idx] = 0
            term = PolyFn.monomial(self.vars, tuple(rest), coeff)
            if k:
                term = term * (replacement ** k)
            out = out + term
        return out

    # -- variable management --

    def embed(self, new_vars: tuple, rename: Mapping[str, str] | None = None) -> "PolyFn":
        """Re-express over a larger variable tuple (optionally renaming)."""
        rename = rename or {}
        pos = []
        for v in self.vars:
            target = rename.get(v, v)
            pos.append(new_vars.index(target))
        n = len(new_vars)
        terms = {}
        for exps, coeff in self.terms.items():
            new = [0] * n
            for p, k in zip(pos, exps):
                new[p] += k
            terms[tuple(new)] = coeff
        return PolyFn(new_vars, terms)

    def restrict(self, new_vars: tuple) -> "PolyFn":
        """Drop unused variables; fails if a dropped variable occurs."""
        keep = [self.vars.index(v) for v in new_vars]
        dropped = [j for j in range(len(self.vars)) if j not in keep]
        terms = {}
        for exps, coeff in self.terms.items():
            if any(exps[j] for j in dropped):
                raise ValueError(
                    f"variable {self.vars[[j for j in dropped if exps[j]][0]]} "
                    "still occurs")
            terms[tuple(exps[j] for j in keep)] = coeff
        return PolyFn(new_vars, terms)

    # -- queries --

    def is_zero(self) -> bool:
        return not self.terms

    def is_polynomial(self) -> bool:
        return all(min(e) >= 0 for e in self.terms) if self.terms else True

    def is_real(self) -> bool:
        return all(c.is_real() for c in self.terms.values())

    def conj(self) -> "PolyFn":
        return PolyFn(self.vars, {e: c.conj() for e, c in self.terms.items()})

    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def degree_in(self, names) -> int:
        idxs = [self.vars.index(n) for n in names]
        if not self.terms:
            return 0
        return max(sum(e[j] for j in idxs) for e in self.terms)

    def uses(self, name: str) -> bool:
        idx = self.vars.index(name)
        return any(e[idx] for e in self.terms)

    def constant_value(self) -> QI:
        """The coefficient of the constant monomial."""
        return self.terms.get((0,) * len(self.vars), QI_ZERO)

    def homogeneous_part(self, names, degree: int) -> "PolyFn":
        idxs = [self.vars.index(n) for n in names]
        terms = {e: c for e, c in self.terms.items()
                 if sum(e[j] for j in idxs) == degree}
        return PolyFn(self.vars, terms)

    def divisible_by_monomial(self, exps: Iterable[int]) -> bool:
        exps = tuple(exps)
        return all(all(a >= b for a, b in zip(e, exps)) for e in self.terms)

    def divide_by_monomial(self, exps: Iterable[int], coeff=1) -> "PolyFn":
        """Exact division by coeff * x^exps; raises if the remainder is nonzero."""
        exps = tuple(exps)
        coeff = _as_qi(coeff)
        if not self.divisible_by_monomial(exps):
            raise ValueError("not divisible by the requested monomial")
        terms = {tuple(a - b for a, b in zip(e, exps)): c / coeff
                 for e, c in self.terms.items()}
        return PolyFn(self.vars, terms)

    # -- canonical form --

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: _grlex_key(kv[0]))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, QI)):
            other = PolyFn.constant(self.vars, other)
        if not isinstance(other, PolyFn):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for exps, coeff in reversed(self.sorted_terms()):
            factors = []
            for name, k in zip(self.vars, exps):
                if k == 0:
                    continue
                factors.append(name if k == 1 else f"{name}^{k}")
            body = "*".join(factors)
            cs = str(coeff)
            if not body:
                parts.append(cs)
            elif cs == "1":
                parts.append(body)
            elif cs == "-1":
                parts.append(f"-{body}")
            else:
                parts.append(f"{cs}*{body}")
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    def __repr__(self):
        return f"PolyFn({self})"
