"""The exact algebra of frame-normal-form differential operators.

An operator is stored as a finite sum  sum_a  f_a * G^a  where G^a is an
ordered product of the chart's frame generators (smallest hypersurface
block first, interior derivations last) and the f_a are exact polynomial
coefficients.  Internally every computation round-trips through the plain
coordinate form  sum_b  p_b * d^b , where composition is the classical
multi-index Leibniz expansion; the frame form is recovered by exact
monomial division against the frame leading coefficients.  This keeps
composition associative on the nose and makes every identity in the test
suite a syntactic equality of dictionaries.

Operators may carry inert scalar variables ("scalars"): symbolic base
coordinates frozen by a boundary restriction and suspension parameters
introduced by it.  Those join the coefficient ring but are never
differentiated, which is exactly the sense in which suspension parameters
are central.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (ChartMismatch, MissingDensityData, NotAnSOp,
                     NotDownClosed, NotMinimalInChart, SignatureMismatch)
from .poly import QI, PolyFn, QI_I
from .symca import Chart, VField


def _ring(chart: Chart, scalars: tuple) -> tuple:
    return chart.all_vars + tuple(scalars)


class SOp:
    """A differential operator in frame normal form on a corner chart."""

    __slots__ = ("chart", "scalars", "terms")

    def __init__(self, chart: Chart, terms=None, scalars: tuple = ()):
        self.chart = chart
        self.scalars = tuple(scalars)
        n = len(chart.generators())
        clean = {}
        if terms:
            for fexps, coeff in terms.items():
                fexps = tuple(fexps)
                if len(fexps) != n:
                    raise ValueError("frame exponent tuple of wrong length")
                if coeff:
                    clean[fexps] = coeff
        self.terms = clean

    # -- constructors --

    @classmethod
    def zero(cls, chart: Chart, scalars: tuple = ()) -> "SOp":
        return cls(chart, {}, scalars)

    @classmethod
    def identity(cls, chart: Chart, scalars: tuple = ()) -> "SOp":
        return cls.from_poly(chart, PolyFn.constant(_ring(chart, scalars), 1),
                             scalars)

    @classmethod
    def from_poly(cls, chart: Chart, coeff: PolyFn, scalars: tuple = ()) -> "SOp":
        """Multiplication operator f * Id."""
        if coeff.vars != _ring(chart, scalars):
            coeff = coeff.embed(_ring(chart, scalars))
        n = len(chart.generators())
        return cls(chart, {(0,) * n: coeff}, scalars)

    @classmethod
    def generator(cls, chart: Chart, position: int, scalars: tuple = ()) -> "SOp":
        gens = chart.generators()
        exps = [0] * len(gens)
        exps[position] = 1
        one = PolyFn.constant(_ring(chart, scalars), 1)
        return cls(chart, {tuple(exps): one}, scalars)

    @classmethod
    def from_vfield(cls, v: VField) -> "SOp":
        """Lift an S-vector field to a first-order operator."""
        chart = v.chart
        coord = {}
        ring = _ring(chart, ())
        names = chart.all_vars
        for name, poly in v.coeffs.items():
            exps = [0] * len(names)
            exps[names.index(name)] = 1
            coord[tuple(exps)] = poly.embed(ring)
        return cls.from_coordinate(chart, coord)

    @classmethod
    def from_coordinate(cls, chart: Chart, coord, scalars: tuple = ()) -> "SOp":
        terms = _coord_to_frame(chart, scalars, coord)
        return cls(chart, terms, scalars)

    # -- basic algebra --

    def _compat(self, other: "SOp"):
        if self.chart != other.chart:
            raise ChartMismatch("operators live on different charts")
        if self.scalars != other.scalars:
            raise ChartMismatch("operators carry different scalar variables")

    def __add__(self, other: "SOp") -> "SOp":
        self._compat(other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            acc = terms.get(k)
            acc = v if acc is None else acc + v
            if acc:
                terms[k] = acc
            else:
                terms.pop(k, None)
        return SOp(self.chart, terms, self.scalars)

    def __neg__(self) -> "SOp":
        return SOp(self.chart, {k: -v for k, v in self.terms.items()},
                   self.scalars)

    def __sub__(self, other: "SOp") -> "SOp":
        return self + (-other)

    def scale(self, coeff) -> "SOp":
        if isinstance(coeff, PolyFn):
            return compose(SOp.from_poly(self.chart, coeff, self.scalars), self)
        return SOp(self.chart, {k: v * coeff for k, v in self.terms.items()},
                   self.scalars)

    def __eq__(self, other):
        return (isinstance(other, SOp) and self.chart == other.chart
                and self.scalars == other.scalars and self.terms == other.terms)

    def __hash__(self):
        return hash((self.chart, self.scalars,
                     frozenset((k, v) for k, v in self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def order(self) -> int:
        if not self.terms:
            return 0
        return max(sum(k) for k in self.terms)

    @property
    def ring(self) -> tuple:
        return _ring(self.chart, self.scalars)

    # -- views --

    def coordinate_form(self) -> dict:
        out: dict = {}
        for fexps, coeff in self.terms.items():
            _acc_coord(out, _expand_frame_term(self.chart, self.scalars,
                                               fexps, coeff))
        return {k: v for k, v in out.items() if v}

    def apply(self, f: PolyFn) -> PolyFn:
        """Act on a polynomial function of the chart variables."""
        if f.vars != self.ring:
            f = f.embed(self.ring)
        names = self.chart.all_vars
        out = PolyFn.zero(self.ring)
        for dexps, p in self.coordinate_form().items():
            g = f
            for name, k in zip(names, dexps):
                for _ in range(k):
                    g = g.derivative(name)
            out = out + p * g
        return out

    def coefficients_use(self, names) -> bool:
        return any(c.uses(n) for c in self.terms.values()
                   for n in names if n in c.vars)

    def __str__(self):
        if not self.terms:
            return "0"
        gens = self.chart.generators()
        labels = [_gen_label(g) for g in gens]
        parts = []
        for fexps in sorted(self.terms, key=lambda k: (sum(k), k)):
            coeff = self.terms[fexps]
            mono = "*".join(
                lab if e == 1 else f"{lab}^{e}"
                for lab, e in zip(labels, fexps) if e)
            cs = str(coeff)
            if mono:
                cs = f"({cs})*{mono}" if ("+" in cs or "-" in cs[1:] or "*" in cs
                                          ) else (mono if cs == "1" else f"{cs}*{mono}")
            parts.append(cs)
        return " + ".join(parts)

    def __repr__(self):
        return f"SOp({self})"


def _gen_label(gen) -> str:
    kind, _i, var, _c = gen
    return {"x": "X", "y": "Y", "z": "Z"}[kind] + "_" + var


# ---------------------------------------------------------------------------
# coordinate-form engine
# ---------------------------------------------------------------------------

def _acc_coord(target: dict, source: dict):
    for k, v in source.items():
        acc = target.get(k)
        acc = v if acc is None else acc + v
        if acc:
            target[k] = acc
        else:
            target.pop(k, None)


def _coord_compose(names: tuple, a: dict, b: dict) -> dict:
    """Exact composition of coordinate-form operators (Leibniz expansion)."""
    out: dict = {}
    for bexps, p in a.items():
        order_positions = [(j, e) for j, e in enumerate(bexps) if e]
        for gexps, q in b.items():
            # spread the derivatives of the left factor over the coefficient
            # of the right factor: sum over delta <= bexps
            stack = [(0, q, 1, list(bexps))]
            while stack:
                j, qd, mult, rem = stack.pop()
                if j == len(order_positions):
                    key = tuple(r + g for r, g in zip(rem, gexps))
                    term = p * qd * mult
                    acc = out.get(key)
                    acc = term if acc is None else acc + term
                    if acc:
                        out[key] = acc
                    else:
                        out.pop(key, None)
                    continue
                pos, avail = order_positions[j]
                name = names[pos]
                cur = qd
                for d in range(avail + 1):
                    if d > 0:
                        cur = cur.derivative(name)
                        if cur.is_zero():
                            break
                    nrem = list(rem)
                    nrem[pos] = avail - d
                    stack.append((j + 1, cur, mult * math.comb(avail, d), nrem))
    return {k: v for k, v in out.items() if v}


def _expand_frame_term(chart: Chart, scalars: tuple, fexps: tuple,
                       coeff: PolyFn) -> dict:
    """Coordinate form of coeff * G^fexps."""
    ring = _ring(chart, scalars)
    names = chart.all_vars
    n = len(names)
    zero_key = (0,) * n
    cur = {zero_key: coeff}
    for gen, power in zip(chart.generators(), fexps):
        if not power:
            continue
        kind, _i, var, cexps = gen
        gcoeff = PolyFn.monomial(ring, cexps + (0,) * len(scalars))
        gkey = [0] * n
        gkey[names.index(var)] = 1
        gop = {tuple(gkey): gcoeff}
        for _ in range(power):
            cur = _coord_compose(names, cur, gop)
    return cur


def _coord_to_frame(chart: Chart, scalars: tuple, coord: dict) -> dict:
    """Recover the unique frame normal form from a coordinate form.

    Raises NotAnSOp when a coefficient is not divisible by the frame
    leading monomial, i.e. when the operator is not generated by the
    chart's frame.
    """
    ring = _ring(chart, scalars)
    names = chart.all_vars
    gens = chart.generators()
    pos_of_var = {g[2]: j for j, g in enumerate(gens)}
    work = {tuple(k): v for k, v in coord.items() if v}
    terms: dict = {}
    while work:
        d = max(sum(k) for k in work)
        top = [(k, v) for k, v in work.items() if sum(k) == d]
        for dexps, p in top:
            fexps = [0] * len(gens)
            lead = [0] * len(ring)
            for name, e in zip(names, dexps):
                if not e:
                    continue
                j = pos_of_var[name]
                fexps[j] = e
                cexps = gens[j][3]
                for t, c in enumerate(cexps):
                    lead[t] += c * e
            try:
                f = p.divide_by_monomial(tuple(lead))
            except ValueError:
                raise NotAnSOp(
                    f"coefficient {p} of d^{dexps} is not divisible by the "
                    "frame leading monomial") from None
            fexps = tuple(fexps)
            acc = terms.get(fexps)
            acc = f if acc is None else acc + f
            if acc:
                terms[fexps] = acc
            else:
                terms.pop(fexps, None)
            expanded = _expand_frame_term(chart, scalars, fexps, f)
            for k, v in expanded.items():
                acc = work.get(k)
                acc = -v if acc is None else acc - v
                if acc:
                    work[k] = acc
                else:
                    work.pop(k, None)
        if any(sum(k) == d for k in work):
            raise NotAnSOp("frame reduction failed to lower the order")
    return terms


# ---------------------------------------------------------------------------
# composition and symbols
# ---------------------------------------------------------------------------

def compose(a: SOp, b: SOp) -> SOp:
    """Exact operator composition a o b in normal form."""
    a._compat(b)
    coord = _coord_compose(a.chart.all_vars, a.coordinate_form(),
                           b.coordinate_form())
    return SOp.from_coordinate(a.chart, coord, a.scalars)


def fibre_var_name(gen) -> str:
    kind, _i, var, _c = gen
    return {"x": "xi_", "y": "eta_", "z": "zeta_"}[kind] + var


@dataclass(frozen=True)
class Symbol:
    """A fibre-variable polynomial, homogeneous of the operator order."""

    chart: Chart
    degree: int
    fibre_vars: tuple
    poly: PolyFn

    def __mul__(self, other: "Symbol") -> "Symbol":
        if self.chart != other.chart:
            raise ChartMismatch("symbols on different charts")
        return Symbol(self.chart, self.degree + other.degree,
                      self.fibre_vars, self.poly * other.poly)

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def __str__(self):
        return str(self.poly)


def principal_symbol(a: SOp) -> Symbol:
    """Top-order part with each generator replaced by its dual fibre variable.

    The real frame-dual convention: no factor of i is introduced, so
    symbols stay in the same polynomial ring as the coefficients.
    """
    gens = a.chart.generators()
    fibre_vars = tuple(fibre_var_name(g) for g in gens)
    symring = a.ring + fibre_vars
    m = a.order
    poly = PolyFn.zero(symring)
    for fexps, coeff in a.terms.items():
        if sum(fexps) != m:
            continue
        exps = [0] * len(symring)
        base = coeff.embed(symring)
        off = len(a.ring)
        for j, e in enumerate(fexps):
            exps[off + j] = e
        poly = poly + base * PolyFn.monomial(symring, tuple(exps))
    return Symbol(a.chart, m, fibre_vars, poly)


# ---------------------------------------------------------------------------
# boundary (normal) symbols as suspended families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SuspensionLevel:
    """Bookkeeping for one boundary restriction."""

    bdf: str               # boundary defining function that was frozen
    tau: str               # suspension variable dual to x*w*d/dx
    mus: tuple             # suspension variables dual to the w*d/dy block
    base: tuple            # base coordinates kept as symbolic parameters
    weight: tuple          # exponents of the fibre weight v over the new ring


@dataclass(frozen=True)
class SuspendedOp:
    """A normal-operator family: fibre operator + suspension parameters."""

    sop: SOp
    levels: tuple

    @property
    def chart(self) -> Chart:
        return self.sop.chart

    @property
    def base_params(self) -> tuple:
        out = []
        for lev in self.levels:
            out.extend(lev.base)
        return tuple(out)

    @property
    def suspension_vars(self) -> tuple:
        out = []
        for lev in self.levels:
            out.append(lev.tau)
            out.extend(lev.mus)
        return tuple(out)

    def signature(self) -> tuple:
        return (self.chart, self.sop.scalars,
                tuple((l.tau, l.mus) for l in self.levels))

    def restrict_param_zero(self, name: str) -> "SuspendedOp":
        """Evaluate one frozen base parameter at 0 (corner restriction)."""
        if name not in self.sop.scalars:
            raise ValueError(f"{name} is not a frozen parameter")
        terms = {k: v.set_zero(name) for k, v in self.sop.terms.items()}
        return SuspendedOp(SOp(self.chart, terms, self.sop.scalars),
                           self.levels)

    def canonical(self):
        """A representation-independent fingerprint for equality tests.

        Scalar variables that no longer occur in any coefficient (killed by
        deeper restrictions) are dropped, and the remaining ones sorted, so
        the two substitution orders through a corner can be compared.
        """
        used = set()
        for coeff in self.sop.terms.values():
            for name in coeff.vars:
                if coeff.uses(name):
                    used.add(name)
        keep = tuple(s for s in self.sop.scalars if s in used)
        ring = self.chart.all_vars + tuple(sorted(keep))
        terms = {}
        for fexps, coeff in self.sop.terms.items():
            slim = coeff.restrict(tuple(v for v in coeff.vars
                                        if v in ring))
            terms[fexps] = slim.embed(ring)
        return (self.chart, ring,
                tuple(sorted((k, frozenset(v.terms.items()))
                             for k, v in terms.items())))

    def is_zero(self) -> bool:
        return self.sop.is_zero()

    def __str__(self):
        return str(self.sop)


def boundary_symbol(a, index: int = 0) -> SuspendedOp:
    """Normal-operator family at a minimal hypersurface of the chart.

    Coefficients are evaluated at the boundary, base coordinates become
    symbolic parameters, and the minimal block's generators become central
    suspension scalars i*v*tau and i*v*mu_j weighted by the product v of
    the deeper boundary defining functions.  Apply ``transport`` first to
    reach a non-minimal hypersurface.
    """
    if isinstance(a, SuspendedOp):
        inner = boundary_symbol(a.sop, index)
        return SuspendedOp(inner.sop, a.levels + inner.levels)
    chart = a.chart
    if not chart.blocks:
        raise NotMinimalInChart("chart has no boundary hypersurface")
    if isinstance(index, str):
        index = chart.bdfs.index(index)
    if index != 0:
        raise NotMinimalInChart(
            f"hypersurface {chart.bdfs[index]} is not minimal in this chart; "
            "transport away the smaller ones first")
    x, ys = chart.blocks[0]
    fibre = chart.fibre_chart(1)
    tau = "tau_" + x
    mus = tuple("mu_" + y for y in ys)
    scalars = a.scalars + tuple(ys) + (tau,) + mus
    ring = _ring(fibre, scalars)

    vexps = [0] * len(ring)
    for bdf in fibre.bdfs:
        vexps[ring.index(bdf)] = 1
    vexps = tuple(vexps)

    k0 = len(ys)
    old_gens = chart.generators()
    terms: dict = {}
    n_new = len(fibre.generators())
    for fexps, coeff in a.terms.items():
        a_x, a_mu, rest = fexps[0], fexps[1:1 + k0], fexps[1 + k0:]
        c = coeff.set_zero(x)
        c = c.restrict(tuple(v for v in c.vars if v != x)).embed(ring)
        t = a_x + sum(a_mu)
        if t:
            sexps = [0] * len(ring)
            sexps[ring.index(tau)] = a_x
            for mu, e in zip(mus, a_mu):
                sexps[ring.index(mu)] = e
            for j, e in enumerate(vexps):
                sexps[j] += e * t
            c = c * PolyFn.monomial(ring, tuple(sexps), QI_I ** t)
        rest = tuple(rest)
        if len(rest) != n_new:
            raise AssertionError("generator bookkeeping is off")
        if c:
            acc = terms.get(rest)
            acc = c if acc is None else acc + c
            if acc:
                terms[rest] = acc
            else:
                terms.pop(rest, None)
    level = SuspensionLevel(bdf=x, tau=tau, mus=mus, base=tuple(ys),
                            weight=vexps)
    return SuspendedOp(SOp(fibre, terms, scalars), (level,))


def suspended_compose(p: SuspendedOp, q: SuspendedOp) -> SuspendedOp:
    """Compose normal families; suspension parameters are central scalars."""
    if p.signature() != q.signature():
        raise SignatureMismatch(
            "suspended operands disagree on fibre chart or parameters")
    return SuspendedOp(compose(p.sop, q.sop), p.levels)


# ---------------------------------------------------------------------------
# transport, conjugation, adjoints
# ---------------------------------------------------------------------------

def transport(a: SOp, away_from) -> SOp:
    """Re-express the operator on the chart of the region x_j > 0.

    Every boundary defining function in ``away_from`` (a down-closed set of
    block indices) is reclassified as a tangential variable of the smallest
    remaining hypersurface; coefficients stay polynomial because the old
    frame generators are polynomial multiples of the new ones.
    """
    away = sorted(away_from)
    if not away:
        return a
    if away != list(range(len(away))):
        raise NotDownClosed(f"{set(away_from)} is not down-closed in the "
                            "chart order")
    chart = a.chart
    r = len(away)
    if r > chart.ell:
        raise NotDownClosed("more indices than hypersurfaces")
    moved = []
    for j in range(r):
        x, ys = chart.blocks[j]
        moved.append(x)
        moved.extend(ys)
    if r == chart.ell:
        new_chart = Chart((), tuple(moved) + chart.interior, chart.periodic)
    else:
        x_r, ys_r = chart.blocks[r]
        first = (x_r, tuple(moved) + tuple(ys_r))
        new_chart = Chart((first,) + chart.blocks[r + 1:], chart.interior,
                          chart.periodic)
    new_ring = _ring(new_chart, a.scalars)
    names = chart.all_vars
    coord = {}
    for dexps, p in a.coordinate_form().items():
        key = [0] * len(new_chart.all_vars)
        for name, e in zip(names, dexps):
            key[new_chart.all_vars.index(name)] = e
        coord[tuple(key)] = p.embed(new_ring)
    return SOp.from_coordinate(new_chart, coord, a.scalars)


def conjugate_by_bdf_power(a: SOp, index: int, z: int) -> SOp:
    """Exact conjugation  x^z . a . x^(-z)  by a boundary-function power."""
    if z == 0:
        return a
    chart = a.chart
    if isinstance(index, str):
        index = chart.bdfs.index(index)
    x = chart.bdfs[index]
    names = chart.all_vars
    ring = a.ring
    xpos = names.index(x)
    # conjugated coordinate derivation: d/dx - z/x (Laurent, transiently)
    dkey = [0] * len(names)
    dkey[xpos] = 1
    lexps = [0] * len(ring)
    lexps[ring.index(x)] = -1
    dop = {tuple(dkey): PolyFn.constant(ring, 1),
           (0,) * len(names): PolyFn.monomial(ring, tuple(lexps), -z)}
    coord_out: dict = {}
    for dexps, p in a.coordinate_form().items():
        b = dexps[xpos]
        rest = list(dexps)
        rest[xpos] = 0
        cur = {(0,) * len(names): p}
        for _ in range(b):
            cur = _coord_compose(names, cur, dop)
        shifted = {}
        for k, v in cur.items():
            key = tuple(kk + rr for kk, rr in zip(k, rest))
            shifted[key] = v
        _acc_coord(coord_out, shifted)
    for p in coord_out.values():
        if not p.is_polynomial():
            raise NotAnSOp("conjugation left the polynomial coefficient ring")
    return SOp.from_coordinate(chart, coord_out, a.scalars)


def _generator_adjoint(chart: Chart, scalars: tuple, position: int) -> SOp:
    """G* = -G - div(G) against the boundary-weighted density.

    The density is the product of x_i^-(2+dim S_i) over the chart's
    hypersurfaces times Lebesgue measure, with unit smooth factor.
    """
    gens = chart.generators()
    kind, i, var, cexps = gens[position]
    ring = _ring(chart, scalars)
    coeff = PolyFn.monomial(ring, cexps + (0,) * len(scalars))
    div = coeff.derivative(var)
    if kind == "x":
        s_i = chart.base_dim(i)
        lexps = [0] * len(ring)
        lexps[ring.index(var)] = -1
        div = div - coeff * PolyFn.monomial(ring, tuple(lexps), 2 + s_i)
    if not div.is_polynomial():
        raise MissingDensityData("density divergence is not polynomial")
    out = -SOp.generator(chart, position, scalars)
    return out - SOp.from_poly(chart, div, scalars)


def formal_adjoint(a: SOp) -> SOp:
    """Formal adjoint against the chart's boundary-weighted density."""
    chart = a.chart
    gens = chart.generators()
    adjoints = [_generator_adjoint(chart, a.scalars, j)
                for j in range(len(gens))]
    total = SOp.zero(chart, a.scalars)
    for fexps, coeff in a.terms.items():
        cur = SOp.from_poly(chart, coeff.conj(), a.scalars)
        for j, e in enumerate(fexps):
            for _ in range(e):
                cur = compose(adjoints[j], cur)
        total = total + cur
    return total


def build_dm(a: SOp) -> SOp:
    """The invertibility witness  a* o a + Id  of the Sobolev scale."""
    return compose(formal_adjoint(a), a) + SOp.identity(a.chart, a.scalars)
