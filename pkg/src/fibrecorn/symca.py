"""Exact coordinate algebra on a corner chart.

A chart lists the boundary hypersurfaces present near a corner point, in
increasing order, together with the tangential (base) coordinates attached
to each of them and the free interior coordinates.  The distinguished
local frame

    x_i * w_i * d/dx_i,   w_i * d/dy_i^j,   d/dz^m,
    w_i = product of x_m for m >= i,

spans the vector fields tangent to all boundary fibrations and vanishing
to second order against the boundary defining functions.  Membership in
that class (and in the larger class of b-fields) is decided by exact
monomial divisibility of the coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import ChartMismatch
from .poly import PolyFn


@dataclass(frozen=True)
class Chart:
    """A corner chart: ordered hypersurface blocks plus interior variables.

    ``blocks[i] = (bdf, (y names...))`` for the i-th smallest hypersurface
    present; ``interior`` holds the z-variables.  Variable names must be
    distinct.  ``periodic`` optionally marks interior variables as angular
    coordinates on a flat torus (used by the verdict engine).
    """

    blocks: tuple = ()
    interior: tuple = ()
    periodic: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        names = list(self.all_vars)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in chart: {names}")
        bad = set(self.periodic) - set(self.interior)
        if bad:
            raise ValueError(f"periodic variables not interior: {sorted(bad)}")

    @property
    def ell(self) -> int:
        return len(self.blocks)

    @property
    def k(self) -> tuple:
        return tuple(len(ys) for _, ys in self.blocks)

    @property
    def q(self) -> int:
        return len(self.interior)

    @property
    def bdfs(self) -> tuple:
        return tuple(x for x, _ in self.blocks)

    @property
    def all_vars(self) -> tuple:
        out = []
        for x, ys in self.blocks:
            out.append(x)
            out.extend(ys)
        out.extend(self.interior)
        return tuple(out)

    @property
    def dim(self) -> int:
        return len(self.all_vars)

    def base_dim(self, i: int) -> int:
        """dim of the fibration base of the i-th block (0-based index)."""
        return i + sum(len(self.blocks[j][1]) for j in range(i + 1))

    def w_exponents(self, i: int) -> tuple:
        """Exponent tuple of w_i = prod_{m>=i} x_m over ``all_vars``."""
        names = self.all_vars
        exps = [0] * len(names)
        for m in range(i, self.ell):
            exps[names.index(self.blocks[m][0])] = 1
        return tuple(exps)

    def zero(self) -> PolyFn:
        return PolyFn.zero(self.all_vars)

    def const(self, c) -> PolyFn:
        return PolyFn.constant(self.all_vars, c)

    def var(self, name: str) -> PolyFn:
        return PolyFn.variable(self.all_vars, name)

    def generators(self):
        """Frame generator descriptors in the fixed global order.

        Each descriptor is ``(kind, block, var, coeff_exponents)`` with kind
        in {"x", "y", "z"}; the generator is ``coeff * d/d(var)``.
        """
        names = self.all_vars
        out = []
        for i, (x, ys) in enumerate(self.blocks):
            w = self.w_exponents(i)
            xw = list(w)
            xw[names.index(x)] += 1
            out.append(("x", i, x, tuple(xw)))
            for y in ys:
                out.append(("y", i, y, w))
        for z in self.interior:
            zero = (0,) * len(names)
            out.append(("z", None, z, zero))
        return out

    def fibre_chart(self, drop: int = 1) -> "Chart":
        """Chart of the fibre after removing the first ``drop`` blocks."""
        return Chart(self.blocks[drop:], self.interior, self.periodic)


@dataclass(frozen=True)
class VField:
    """A vector field: polynomial coefficient for each coordinate derivation."""

    chart: Chart
    coeffs: Mapping[str, PolyFn] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for name, poly in self.coeffs.items():
            if name not in self.chart.all_vars:
                raise ValueError(f"unknown coordinate {name}")
            if poly:
                clean[name] = poly
        object.__setattr__(self, "coeffs", clean)

    def coeff(self, name: str) -> PolyFn:
        return self.coeffs.get(name, self.chart.zero())

    def apply(self, f: PolyFn) -> PolyFn:
        out = self.chart.zero()
        for name, poly in self.coeffs.items():
            out = out + poly * f.derivative(name)
        return out

    def __add__(self, other: "VField") -> "VField":
        if self.chart != other.chart:
            raise ChartMismatch("vector fields on different charts")
        names = set(self.coeffs) | set(other.coeffs)
        return VField(self.chart,
                      {n: self.coeff(n) + other.coeff(n) for n in names})

    def __neg__(self) -> "VField":
        return VField(self.chart, {n: -p for n, p in self.coeffs.items()})

    def scale(self, f: PolyFn) -> "VField":
        return VField(self.chart, {n: f * p for n, p in self.coeffs.items()})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        return (isinstance(other, VField) and self.chart == other.chart
                and self.coeffs == dict(other.coeffs))

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = [f"({p})*d{n}" for n, p in sorted(self.coeffs.items())]
        return " + ".join(parts)


def frame(chart: Chart) -> list:
    """The distinguished spanning fields, in the fixed documented order.

    Per hypersurface block i (smallest first): ``x_i w_i d/dx_i`` then
    ``w_i d/dy_i^j`` for each tangential variable; interior derivations
    ``d/dz^m`` come last.
    """
    out = []
    for kind, _i, var, coeff_exps in chart.generators():
        coeff = PolyFn.monomial(chart.all_vars, coeff_exps)
        out.append(VField(chart, {var: coeff}))
    return out


def lie_bracket(v: VField, w: VField) -> VField:
    """Exact commutator [v, w] as a first-order derivation."""
    if v.chart != w.chart:
        raise ChartMismatch("lie_bracket operands on different charts")
    chart = v.chart
    coeffs = {}
    for name in chart.all_vars:
        acc = v.apply(w.coeff(name)) - w.apply(v.coeff(name))
        if acc:
            coeffs[name] = acc
    return VField(chart, coeffs)


def is_b_field(v: VField) -> bool:
    """True iff v(x_i) is divisible by x_i for every boundary function."""
    chart = v.chart
    names = chart.all_vars
    for x in chart.bdfs:
        exps = [0] * len(names)
        exps[names.index(x)] = 1
        if not v.coeff(x).divisible_by_monomial(exps):
            return False
    return True


def is_s_field(v: VField, chart: Chart | None = None) -> bool:
    """Local criterion for tangency to all boundary fibrations.

    The d/dx_i coefficient must be divisible by x_i*w_i and every d/dy_i^j
    coefficient by w_i; interior coefficients are unconstrained.
    """
    chart = chart or v.chart
    if chart != v.chart:
        raise ChartMismatch("is_s_field chart disagrees with the field")
    names = chart.all_vars
    for i, (x, ys) in enumerate(chart.blocks):
        w = chart.w_exponents(i)
        xw = list(w)
        xw[names.index(x)] += 1
        if not v.coeff(x).divisible_by_monomial(xw):
            return False
        for y in ys:
            if not v.coeff(y).divisible_by_monomial(w):
                return False
    return True
