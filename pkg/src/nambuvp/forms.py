"""Exterior calculus with polynomial coefficients, and the form-level checks built on it.

Forms live over a :class:`~nambuvp.symalg.VariableTable`; a subset of its
variables are the form coordinates (the ones that get differentials).  Any
other variable is a parameter: ``d`` treats it as constant.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np

from .hierarchy import VpTriple, nambu3
from .symalg import LaurentSeries, MultiPoly, Variable, VariableTable, VariableTableError

__all__ = [
    "DifferentialForm",
    "FormPencil",
    "SymmetricProduct",
    "wedge",
    "ext_d",
    "wedge_power",
    "omega3_forms",
    "omega3_check",
    "krichever_closedness",
    "PLEBANSKI_COORDINATES",
    "plebanski_residual",
    "plebanski_two_form",
    "plebanski_pencil",
    "GindikinResult",
    "gindikin_check",
    "det_metric3",
    "hydro_compat_residual",
    "HydroGridResult",
    "twistor_residual",
]


def _sort_sign(idx: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Sign of the permutation sorting ``idx`` (0 if an index repeats) and the sorted tuple."""
    if len(set(idx)) != len(idx):
        return 0, ()
    inversions = sum(1 for a, b in itertools.combinations(idx, 2) if a > b)
    return (-1 if inversions % 2 else 1), tuple(sorted(idx))


class DifferentialForm:
    """Homogeneous k-form ``sum_I c_I dx_I`` with ``I`` strictly increasing coordinate indices."""

    __slots__ = ("table", "coordinates", "degree", "_terms", "_coord_index")

    def __init__(self, table: VariableTable, coordinates: Sequence[str], degree: int,
                 terms: Mapping[Sequence[int], MultiPoly | int | Fraction] | None = None):
        coordinates = tuple(coordinates)
        if len(set(coordinates)) != len(coordinates):
            raise ValueError("repeated form coordinate")
        for c in coordinates:
            table.index(c)
        if degree < 0:
            raise ValueError("negative form degree")
        clean: dict[tuple[int, ...], MultiPoly] = {}
        for idx, c in (terms or {}).items():
            idx = tuple(idx)
            if len(idx) != degree:
                raise ValueError(f"index {idx} does not match degree {degree}")
            if any(not 0 <= i < len(coordinates) for i in idx):
                raise ValueError(f"index {idx} outside the coordinate range")
            sign, key = _sort_sign(idx)
            if not sign:
                continue
            if not isinstance(c, MultiPoly):
                c = table.const(c)
            elif c.table != table:
                c = c.rebase(table)
            v = clean.get(key, table.zero()) + (c if sign > 0 else -c)
            if v:
                clean[key] = v
            else:
                clean.pop(key, None)
        self._init(table, coordinates, degree, clean)

    def _init(self, table, coordinates, degree, terms):
        self.table = table
        self.coordinates = coordinates
        self.degree = degree
        self._terms = terms
        self._coord_index = {c: i for i, c in enumerate(coordinates)}

    @classmethod
    def _raw(cls, table, coordinates, degree, terms) -> "DifferentialForm":
        obj = cls.__new__(cls)
        obj._init(table, coordinates, degree, terms)
        return obj

    # constructors ------------------------------------------------------
    @classmethod
    def zero(cls, table: VariableTable, coordinates: Sequence[str], degree: int) -> "DifferentialForm":
        return cls(table, coordinates, degree)

    @classmethod
    def function(cls, f: MultiPoly, coordinates: Sequence[str]) -> "DifferentialForm":
        """The 0-form ``f``."""
        return cls(f.table, coordinates, 0, {(): f})

    @classmethod
    def differential(cls, table: VariableTable, coordinates: Sequence[str], name: str) -> "DifferentialForm":
        """``d name`` for a coordinate ``name``."""
        coordinates = tuple(coordinates)
        if name not in coordinates:
            raise VariableTableError(f"{name!r} is not a form coordinate")
        return cls(table, coordinates, 1, {(coordinates.index(name),): 1})

    @classmethod
    def basis(cls, table: VariableTable, coordinates: Sequence[str], names: Sequence[str],
              coefficient=1) -> "DifferentialForm":
        """``coefficient * d names[0] ^ d names[1] ^ ...``."""
        coordinates = tuple(coordinates)
        idx = [coordinates.index(n) for n in names]
        return cls(table, coordinates, len(idx), {tuple(idx): coefficient})

    # access ------------------------------------------------------------
    @property
    def terms(self) -> Mapping[tuple[int, ...], MultiPoly]:
        return dict(self._terms)

    def component(self, names: Sequence[str]) -> MultiPoly:
        """Coefficient of ``d names[0] ^ ...`` (sign-adjusted for the order given)."""
        idx = [self._coord_index[n] for n in names]
        sign, key = _sort_sign(idx)
        if not sign:
            return self.table.zero()
        c = self._terms.get(key, self.table.zero())
        return c if sign > 0 else -c

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def _check(self, other: "DifferentialForm"):
        if other.table != self.table or other.coordinates != self.coordinates:
            raise VariableTableError("forms over different coordinate tables")

    def __eq__(self, other):
        if isinstance(other, DifferentialForm):
            return (self.table == other.table and self.coordinates == other.coordinates
                    and (self.degree == other.degree or not (self._terms or other._terms))
                    and self._terms == other._terms)
        if isinstance(other, int) and other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self):
        return hash((self.coordinates, self.degree, frozenset(self._terms.items())))

    # arithmetic --------------------------------------------------------
    def __add__(self, other: "DifferentialForm") -> "DifferentialForm":
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        self._check(other)
        if other.degree != self.degree:
            if not other._terms:
                return self
            if not self._terms:
                return other
            raise ValueError("cannot add forms of different degree")
        out = dict(self._terms)
        for k, c in other._terms.items():
            v = out.get(k, self.table.zero()) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return DifferentialForm._raw(self.table, self.coordinates, self.degree, out)

    def __neg__(self):
        return DifferentialForm._raw(self.table, self.coordinates, self.degree,
                                     {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar):
        """Multiply by a function (MultiPoly or rational)."""
        if isinstance(scalar, DifferentialForm):
            return NotImplemented
        if not isinstance(scalar, MultiPoly):
            scalar = self.table.const(scalar)
        out = {}
        for k, c in self._terms.items():
            v = c * scalar
            if v:
                out[k] = v
        return DifferentialForm._raw(self.table, self.coordinates, self.degree, out)

    __rmul__ = __mul__

    def __xor__(self, other):
        return wedge(self, other)

    def map_coefficients(self, fn: Callable[[MultiPoly], MultiPoly]) -> "DifferentialForm":
        out = {}
        for k, c in self._terms.items():
            v = fn(c)
            if v:
                out[k] = v
        return DifferentialForm._raw(self.table, self.coordinates, self.degree, out)

    def substitute(self, values) -> "DifferentialForm":
        return self.map_coefficients(lambda c: c.substitute(values))

    # serialization -----------------------------------------------------
    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "coordinates": list(self.coordinates),
            "variables": self.table.to_json(),
            "terms": [[list(k), self._terms[k].to_json(with_table=False)] for k in sorted(self._terms)],
        }

    @classmethod
    def from_json(cls, data: dict, table: VariableTable | None = None) -> "DifferentialForm":
        own = VariableTable.from_json(data["variables"]) if "variables" in data else table
        if own is None:
            raise VariableTableError("form JSON carries no variable table")
        terms = {tuple(k): MultiPoly.from_json(c, own) for k, c in data["terms"]}
        form = cls(own, data["coordinates"], int(data["degree"]), terms)
        if table is not None and table != own:
            form = form.rebase(table)
        return form

    def rebase(self, table: VariableTable) -> "DifferentialForm":
        return DifferentialForm(table, self.coordinates, self.degree,
                                {k: c.rebase(table) for k, c in self._terms.items()})

    def __repr__(self):
        return f"DifferentialForm({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for k in sorted(self._terms):
            basis = "^".join("d" + self.coordinates[i] for i in k)
            parts.append(f"({self._terms[k]})" + (f" {basis}" if basis else ""))
        return " + ".join(parts)


def wedge(a: DifferentialForm, b: DifferentialForm) -> DifferentialForm:
    """Graded-antisymmetric product; beyond the coordinate count the result is the zero form."""
    a._check(b)
    out: dict[tuple[int, ...], MultiPoly] = {}
    zero = a.table.zero()
    for I, c in a._terms.items():
        for J, e in b._terms.items():
            sign, key = _sort_sign(I + J)
            if not sign:
                continue
            prod = c * e
            v = out.get(key, zero) + (prod if sign > 0 else -prod)
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return DifferentialForm._raw(a.table, a.coordinates, a.degree + b.degree, out)


def ext_d(a: DifferentialForm) -> DifferentialForm:
    """Exterior derivative with respect to the form coordinates."""
    out: dict[tuple[int, ...], MultiPoly] = {}
    zero = a.table.zero()
    for I, c in a._terms.items():
        for j, name in enumerate(a.coordinates):
            if j in I:
                continue
            dc = c.partial(name)
            if not dc:
                continue
            sign, key = _sort_sign((j,) + I)
            v = out.get(key, zero) + (dc if sign > 0 else -dc)
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return DifferentialForm._raw(a.table, a.coordinates, a.degree + 1, out)


def wedge_power(a: DifferentialForm, k: int) -> DifferentialForm:
    if k < 0:
        raise ValueError("negative wedge power")
    result = DifferentialForm(a.table, a.coordinates, 0, {(): 1})
    for _ in range(k):
        result = wedge(result, a)
    return result


def _d_function(f: MultiPoly, coordinates: Sequence[str]) -> DifferentialForm:
    return ext_d(DifferentialForm.function(f, coordinates))


# ----------------------------------------------------------------------
# pencils
# ----------------------------------------------------------------------

class FormPencil:
    """A form polynomial in parameters ``tau``: ``sum_a tau^a Omega_a``.

    Held as one form whose coefficients may contain the parameter variables;
    :meth:`members` splits it by parameter monomial.
    """

    def __init__(self, form: DifferentialForm, params: Sequence[str]):
        params = tuple(params)
        for p in params:
            form.table.index(p)
            if p in form.coordinates:
                raise ValueError(f"parameter {p!r} is also a form coordinate")
        self.form = form
        self.params = params

    @classmethod
    def from_members(cls, members: Mapping[Sequence[int], DifferentialForm], params: Sequence[str]) -> "FormPencil":
        members = {tuple(k): f for k, f in members.items()}
        if not members:
            raise ValueError("a pencil needs at least one member")
        forms = list(members.values())
        base = forms[0]
        if any(f.degree != base.degree and f for f in forms):
            raise ValueError("pencil members must share one degree")
        table = base.table
        missing = [Variable(p) for p in params if p not in table]
        ext = table.extend(*missing) if missing else table
        total = DifferentialForm.zero(ext, base.coordinates, base.degree)
        for mono, f in members.items():
            if len(mono) != len(params):
                raise ValueError("parameter monomial of wrong length")
            weight = ext.one()
            for p, k in zip(params, mono):
                weight = weight * ext.var(p) ** k
            total = total + f.rebase(ext) * weight
        return cls(total, params)

    @property
    def degree(self) -> int:
        return self.form.degree

    def members(self) -> dict[tuple[int, ...], DifferentialForm]:
        """Split by parameter monomial; keys are exponent tuples over ``params``."""
        table = self.form.table
        pidx = [table.index(p) for p in self.params]
        groups: dict[tuple[int, ...], dict] = {}
        for I, c in self.form._terms.items():
            for e, coef in c.terms.items():
                mono = tuple(e[i] for i in pidx)
                rest = list(e)
                for i in pidx:
                    rest[i] = 0
                groups.setdefault(mono, {}).setdefault(I, {})[tuple(rest)] = coef
        out = {}
        for mono in sorted(groups):
            terms = {I: MultiPoly(table, t) for I, t in groups[mono].items()}
            out[mono] = DifferentialForm(table, self.form.coordinates, self.form.degree, terms)
        return out

    def nonzero_members(self) -> list[tuple[tuple[int, ...], DifferentialForm]]:
        return [(m, f) for m, f in self.members().items() if f]

    def is_zero(self) -> bool:
        return self.form.is_zero()

    def wedge(self, other: "FormPencil") -> "FormPencil":
        return FormPencil(wedge(self.form, other.form), self.params)

    def power(self, k: int) -> "FormPencil":
        return FormPencil(wedge_power(self.form, k), self.params)

    def ext_d(self) -> "FormPencil":
        return FormPencil(ext_d(self.form), self.params)

    def to_json(self) -> dict:
        return {
            "params": list(self.params),
            "degree": self.degree,
            "members": [{"monomial": list(m), "form": f.to_json()} for m, f in self.members().items()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "FormPencil":
        members = {tuple(m["monomial"]): DifferentialForm.from_json(m["form"]) for m in data["members"]}
        return cls.from_members(members, data["params"])

    def __str__(self):
        parts = [f"{m}: {f}" for m, f in self.nonzero_members()]
        return "{" + "; ".join(parts) + "}"


@dataclass(frozen=True)
class GindikinResult:
    power_residual: FormPencil
    witness: tuple[tuple[int, ...], tuple[str, ...], MultiPoly] | None
    closedness: FormPencil

    @property
    def passed(self) -> bool:
        return self.power_residual.is_zero() and self.witness is not None and self.closedness.is_zero()

    def to_json(self) -> dict:
        w = None
        if self.witness is not None:
            mono, basis, coef = self.witness
            w = {"monomial": list(mono), "basis": list(basis), "coefficient": str(coef)}
        return {
            "power_residual_zero": self.power_residual.is_zero(),
            "power_residual": self.power_residual.to_json(),
            "witness": w,
            "closedness_zero": self.closedness.is_zero(),
            "closedness": self.closedness.to_json(),
            "verdict": "pass" if self.passed else "fail",
        }


def gindikin_check(pencil: FormPencil, l: int) -> GindikinResult:
    """``(Omega^k)^{l+1} = 0``, ``(Omega^k)^l != 0`` (with a witness), ``d Omega^k = 0``."""
    if pencil.degree != 2:
        raise ValueError("Gindikin conditions apply to a pencil of 2-forms")
    if l < 1:
        raise ValueError("rank parameter l must be at least 1")
    top = pencil.power(l)
    witness = None
    for mono, f in top.nonzero_members():
        key = min(f.terms)
        witness = (mono, tuple(f.coordinates[i] for i in key), f.terms[key])
        break
    return GindikinResult(top.wedge(pencil), witness, pencil.ext_d())


# ----------------------------------------------------------------------
# volume-preserving three-forms
# ----------------------------------------------------------------------

def _form_table(triple: VpTriple) -> tuple[VariableTable, tuple[str, ...]]:
    base = triple.table
    table = base if "lam" in base else base.extend(Variable("lam", invertible=True))
    coords = ("lam", "p", "q") + tuple(f"t{n}" for n in range(2, triple.K + 1))
    return table, coords


def omega3_forms(triple: VpTriple) -> tuple[DifferentialForm, DifferentialForm]:
    """``Omega = dlam^dp^dq + sum_{n>=2} dB_1n^dB_2n^dt_n`` and ``dL^dM^dN``.

    Form coordinates are ``(lam, p, q, t_2..t_K)``; ``t_1`` is a parameter.
    """
    table, coords = _form_table(triple)
    poly = lambda X: X.to_poly(table, "lam")  # noqa: E731
    d = lambda f: _d_function(f, coords)  # noqa: E731
    Omega = DifferentialForm.basis(table, coords, ("lam", "p", "q"))
    for n in range(2, triple.K + 1):
        dt = DifferentialForm.differential(table, coords, f"t{n}")
        Omega = Omega + wedge(wedge(d(poly(triple.B1(n))), d(poly(triple.B2(n)))), dt)
    L, M, N = (poly(X) for X in triple.members())
    return Omega, wedge(wedge(d(L), d(M)), d(N))


def omega3_check(triple: VpTriple) -> tuple[DifferentialForm, DifferentialForm, DifferentialForm]:
    """``(d Omega, Omega ^ Omega, Omega - dL^dM^dN)``."""
    Omega, vol = omega3_forms(triple)
    return ext_d(Omega), wedge(Omega, Omega), Omega - vol


def krichever_closedness(triple: VpTriple) -> DifferentialForm:
    """``d(M dL^dN + sum_n B_1n dB_2n^dt_n)``.

    The ``n = 1`` summand is ``lam dp^dq``: with ``t_1`` paired against ``q``
    it contributes the ``dlam^dp^dq`` term of ``Omega``, so the result equals
    ``Omega - dL^dM^dN`` and vanishes exactly on solutions.
    """
    table, coords = _form_table(triple)
    poly = lambda X: X.to_poly(table, "lam")  # noqa: E731
    d = lambda f: _d_function(f, coords)  # noqa: E731
    L, M, N = (poly(X) for X in triple.members())
    theta = wedge(d(L), d(N)) * M
    theta = theta + DifferentialForm.basis(table, coords, ("p", "q"), table.var("lam"))
    for n in range(2, triple.K + 1):
        dt = DifferentialForm.differential(table, coords, f"t{n}")
        theta = theta + wedge(d(poly(triple.B2(n))), dt) * poly(triple.B1(n))
    return ext_d(theta)


# ----------------------------------------------------------------------
# heavenly equation
# ----------------------------------------------------------------------

PLEBANSKI_COORDINATES = ("x", "y", "xt", "yt")


def plebanski_residual(Omega: MultiPoly, coordinates: Sequence[str] = PLEBANSKI_COORDINATES) -> MultiPoly:
    """``W_{x xt} W_{y yt} - W_{x yt} W_{y xt} - 1``; ``xt, yt`` are the tilde coordinates."""
    x, y, xt, yt = coordinates
    W = Omega
    return W.partial(x).partial(xt) * W.partial(y).partial(yt) - W.partial(x).partial(yt) * W.partial(y).partial(xt) - 1


def plebanski_two_form(Omega: MultiPoly, coordinates: Sequence[str] = PLEBANSKI_COORDINATES,
                       spectral: str = "lam") -> FormPencil:
    """``dx^dy + lam (W_{x xt} dx^dxt + W_{x yt} dx^dyt + W_{y xt} dy^dxt + W_{y yt} dy^dyt) + lam^2 dxt^dyt``."""
    x, y, xt, yt = coordinates
    table = Omega.table if spectral in Omega.table else Omega.table.extend(Variable(spectral))
    W = Omega.rebase(table)
    lam = table.var(spectral)
    B = lambda a, b, c=1: DifferentialForm.basis(table, coordinates, (a, b), c)  # noqa: E731
    form = B(x, y)
    for a in (x, y):
        for b in (xt, yt):
            form = form + B(a, b, W.partial(a).partial(b) * lam)
    form = form + B(xt, yt, lam * lam)
    return FormPencil(form, (spectral,))


def plebanski_pencil(Omega: MultiPoly, coordinates: Sequence[str] = PLEBANSKI_COORDINATES,
                     spectral: str = "lam") -> tuple[FormPencil, FormPencil]:
    """``(d Omega(lam), Omega(lam) ^ Omega(lam))`` as pencils graded by ``lam``."""
    P = plebanski_two_form(Omega, coordinates, spectral)
    return P.ext_d(), P.power(2)


# ----------------------------------------------------------------------
# symmetric products and the 3x3 determinant metric
# ----------------------------------------------------------------------

class SymmetricProduct:
    """Element of the symmetric algebra of 1-forms: ``sum c_K dx_K`` over sorted index multisets."""

    def __init__(self, table: VariableTable, coordinates: Sequence[str], degree: int,
                 terms: Mapping[tuple[int, ...], MultiPoly]):
        self.table = table
        self.coordinates = tuple(coordinates)
        self.degree = degree
        self.terms = {tuple(sorted(k)): v for k, v in terms.items() if v}

    @classmethod
    def one(cls, table: VariableTable, coordinates: Sequence[str]) -> "SymmetricProduct":
        return cls(table, coordinates, 0, {(): table.one()})

    @classmethod
    def from_one_form(cls, a: DifferentialForm) -> "SymmetricProduct":
        if a.degree != 1:
            raise ValueError("symmetric products are built from 1-forms")
        return cls(a.table, a.coordinates, 1, a.terms)

    def __mul__(self, other: "SymmetricProduct") -> "SymmetricProduct":
        out: dict[tuple[int, ...], MultiPoly] = {}
        for I, c in self.terms.items():
            for J, e in other.terms.items():
                key = tuple(sorted(I + J))
                out[key] = out.get(key, self.table.zero()) + c * e
        return SymmetricProduct(self.table, self.coordinates, self.degree + other.degree, out)

    def __add__(self, other: "SymmetricProduct") -> "SymmetricProduct":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, self.table.zero()) + c
        return SymmetricProduct(self.table, self.coordinates, max(self.degree, other.degree), out)

    def __neg__(self):
        return SymmetricProduct(self.table, self.coordinates, self.degree, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if isinstance(other, SymmetricProduct):
            return self.coordinates == other.coordinates and self.terms == other.terms
        return NotImplemented

    def component(self, names: Sequence[str]) -> MultiPoly:
        key = tuple(sorted(self.coordinates.index(n) for n in names))
        return self.terms.get(key, self.table.zero())

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "coordinates": list(self.coordinates),
            "variables": self.table.to_json(),
            "terms": [[list(k), self.terms[k].to_json(with_table=False)] for k in sorted(self.terms)],
        }

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({self.terms[k]}) " + "*".join("d" + self.coordinates[i] for i in k)
                          for k in sorted(self.terms))


# (row, column) triples of e^{ij}; written out as displayed for the three-form metric
_METRIC3_TERMS = (
    (+1, ((1, 1), (2, 2), (3, 3))),
    (-1, ((1, 1), (3, 2), (2, 3))),
    (+1, ((1, 2), (3, 1), (2, 3))),
    (-1, ((1, 2), (2, 1), (3, 3))),
    (+1, ((1, 3), (2, 1), (3, 2))),
    (-1, ((1, 3), (3, 1), (2, 2))),
)


def det_metric3(frame: Sequence[Sequence[DifferentialForm]]) -> SymmetricProduct:
    """``g = e11 e22 e33 - e11 e32 e23 + e12 e31 e23 - e12 e21 e33 + e13 e21 e32 - e13 e31 e22``."""
    if len(frame) != 3 or any(len(row) != 3 for row in frame):
        raise ValueError("the frame must be a 3x3 array of 1-forms")
    first = frame[0][0]
    for row in frame:
        for e in row:
            first._check(e)
    sym = [[SymmetricProduct.from_one_form(e) for e in row] for row in frame]
    g = SymmetricProduct(first.table, first.coordinates, 3, {})
    for sign, entries in _METRIC3_TERMS:
        term = SymmetricProduct.one(first.table, first.coordinates)
        for i, j in entries:
            term = term * sym[i - 1][j - 1]
        g = g + term if sign > 0 else g - term
    return g


# ----------------------------------------------------------------------
# hydrodynamic Lax compatibility
# ----------------------------------------------------------------------

def _check_square(A, B):
    n = len(A)
    if n == 0 or any(len(r) != n for r in A) or len(B) != n or any(len(r) != n for r in B):
        raise ValueError("A and B must be square matrices of equal size")
    return n


def _compose(P: MultiPoly, var: str, u: MultiPoly) -> MultiPoly:
    """``P(u)`` for ``P`` a polynomial in the single variable ``var``."""
    coeffs = P.coefficients_in(var)
    result = u.table.zero()
    top = max(coeffs) if coeffs else 0
    if min(coeffs, default=0) < 0:
        raise ValueError("negative powers of the field variable are not supported")
    for k in range(top, -1, -1):
        c = coeffs.get(k)
        if c is not None and not c.is_constant():
            raise VariableTableError("A and B may depend only on the field variable")
        result = result * u + (c.constant() if c is not None else 0)
    return result


def _matmul(X, Y):
    n = len(X)
    return [[sum((X[i][k] * Y[k][j] for k in range(1, n)), X[i][0] * Y[0][j]) for j in range(n)] for i in range(n)]


@dataclass(frozen=True)
class HydroGridResult:
    flux_residual: float
    commutator_residual: float
    shape: tuple[int, int]

    def to_json(self) -> dict:
        return {"flux_residual": self.flux_residual, "commutator_residual": self.commutator_residual,
                "grid": list(self.shape)}


def hydro_compat_residual(A: Sequence[Sequence[MultiPoly]], B: Sequence[Sequence[MultiPoly]], u_of,
                          field: str = "u", x: str = "x", t: str = "t",
                          grid: tuple[np.ndarray, np.ndarray] | None = None):
    """``A_t - B_x`` along ``u(x, t)`` and the commutator ``AB - BA``.

    Symbolic mode: ``u_of`` is a MultiPoly in ``x, t``; returns two matrices of
    polynomials (the first in ``x, t``, the commutator in ``u``).

    Grid mode: ``grid = (xs, ts)`` and ``u_of`` is either a callable
    ``(X, T) -> u`` or an array of shape ``(len(ts), len(xs))``.  Derivatives are
    second-order central differences on interior points; returns the max-abs
    residuals as a :class:`HydroGridResult`.
    """
    n = _check_square(A, B)
    comm = _matmul(A, B)
    BA = _matmul(B, A)
    comm = [[comm[i][j] - BA[i][j] for j in range(n)] for i in range(n)]
    if grid is None:
        if not isinstance(u_of, MultiPoly):
            raise TypeError("symbolic mode needs u as a polynomial in x and t")
        flux = []
        for i in range(n):
            row = []
            for j in range(n):
                a = _compose(A[i][j], field, u_of).partial(t)
                b = _compose(B[i][j], field, u_of).partial(x)
                row.append(a - b)
            flux.append(row)
        return flux, comm
    xs, ts = (np.asarray(v, dtype=float) for v in grid)
    if xs.ndim != 1 or ts.ndim != 1 or len(xs) < 3 or len(ts) < 3:
        raise ValueError("grid axes must be 1-D with at least three points")
    if callable(u_of):
        T, X = np.meshgrid(ts, xs, indexing="ij")
        U = np.asarray(u_of(X, T), dtype=float)
    else:
        U = np.asarray(u_of, dtype=float)
    if U.shape != (len(ts), len(xs)):
        raise ValueError(f"u grid has shape {U.shape}, expected {(len(ts), len(xs))}")
    flux_max = 0.0
    for i in range(n):
        for j in range(n):
            a = _evaluate_in(A[i][j], field, U)
            b = _evaluate_in(B[i][j], field, U)
            a_t = (a[2:, 1:-1] - a[:-2, 1:-1]) / (ts[2:, None] - ts[:-2, None])
            b_x = (b[1:-1, 2:] - b[1:-1, :-2]) / (xs[None, 2:] - xs[None, :-2])
            flux_max = max(flux_max, float(np.max(np.abs(a_t - b_x))))
    comm_max = 0.0
    for i in range(n):
        for j in range(n):
            comm_max = max(comm_max, float(np.max(np.abs(_evaluate_in(comm[i][j], field, U)))))
    return HydroGridResult(flux_max, comm_max, U.shape)


def _evaluate_in(P: MultiPoly, var: str, U: np.ndarray) -> np.ndarray:
    coeffs = P.coefficients_in(var)
    out = np.zeros_like(U)
    for k in range(max(coeffs, default=0), -1, -1):
        c = coeffs.get(k)
        if c is not None and not c.is_constant():
            raise VariableTableError("A and B may depend only on the field variable")
        out = out * U + (float(c.constant()) if c is not None else 0.0)
    return out


# ----------------------------------------------------------------------
# twistor data
# ----------------------------------------------------------------------

def twistor_residual(f1, f2, f3, variables: Sequence[str] = ("p", "q")) -> LaurentSeries:
    """``{f1, f2, f3} - 1`` for gluing data in ``(lam, p, q)``."""
    return nambu3(f1, f2, f3, variables) - 1
