"""Exact symbolic kernel.

Rational coefficients (``fractions.Fraction``), sparse multivariate
polynomials over a named variable table, truncated Laurent series in the
spectral variable, and the jet ring used for formal x-derivatives.

Polynomials are immutable.  Every arithmetic operation returns a new object
with zero coefficients pruned, so ``p == 0`` is a literal structural test.
"""

from __future__ import annotations

import ast
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Callable, Iterable, Mapping, Sequence, Union

__all__ = [
    "SymalgError",
    "VariableTableError",
    "JetOrderError",
    "WindowError",
    "Variable",
    "VariableTable",
    "MultiPoly",
    "LaurentSeries",
    "as_fraction",
    "parse_poly",
    "poly_arith",
    "laurent_arith",
    "project_nonneg",
    "det",
]

Rational = Union[int, Fraction]

KINDS = ("coordinate", "time", "jet")


class SymalgError(Exception):
    """Base class for errors raised by the symbolic kernel."""


class VariableTableError(SymalgError, ValueError):
    """Operands live on different variable tables, or a name is unknown."""


class JetOrderError(SymalgError):
    """A total x-derivative would need a jet symbol beyond the table's maximum order."""


class WindowError(SymalgError):
    """A truncated Laurent computation has no exact coefficients where they are needed."""


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, float):
        # exact binary value; callers wanting decimal semantics pass strings
        return Fraction(value)
    raise TypeError(f"cannot use {type(value).__name__} as an exact coefficient")


def jet_name(base: str, order: int) -> str:
    return base if order == 0 else f"{base}_{order}"


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str = "coordinate"
    base: str | None = None
    order: int = 0
    # invertible variables may carry negative exponents (Laurent monomials)
    invertible: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise VariableTableError(f"unknown variable kind {self.kind!r}")
        if self.kind == "jet":
            if self.base is None or self.order < 0:
                raise VariableTableError(f"jet variable {self.name!r} needs a base name and order >= 0")

    def to_json(self) -> dict:
        out = {"name": self.name, "kind": self.kind}
        if self.kind == "jet":
            out["base"] = self.base
            out["order"] = self.order
        if self.invertible:
            out["invertible"] = True
        return out

    @classmethod
    def from_json(cls, data) -> "Variable":
        if isinstance(data, str):
            return cls(data)
        return cls(
            data["name"],
            data.get("kind", "coordinate"),
            data.get("base"),
            int(data.get("order", 0)),
            bool(data.get("invertible", False)),
        )


@dataclass(frozen=True)
class VariableTable:
    """Ordered list of distinct variables.  Exponent tuples follow this order."""

    variables: tuple[Variable, ...]
    _index: Mapping[str, int] = field(init=False, repr=False, compare=False, hash=False)
    _dx: Mapping[str, str | int] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        index = {}
        for i, v in enumerate(self.variables):
            if v.name in index:
                raise VariableTableError(f"duplicate variable {v.name!r}")
            index[v.name] = i
        object.__setattr__(self, "_index", MappingProxyType(index))
        jets = {(v.base, v.order): v.name for v in self.variables if v.kind == "jet"}
        dx = {}
        for v in self.variables:
            if v.kind == "jet":
                nxt = jets.get((v.base, v.order + 1))
                dx[v.name] = nxt if nxt is not None else -1
        object.__setattr__(self, "_dx", MappingProxyType(dx))

    @classmethod
    def of(cls, names: str | Iterable[str], kind: str = "coordinate", invertible: Iterable[str] = ()) -> "VariableTable":
        if isinstance(names, str):
            names = names.replace(",", " ").split()
        inv = set(invertible)
        return cls(tuple(Variable(n, kind, invertible=n in inv) for n in names))

    @classmethod
    def with_jets(cls, bases: Sequence[str], max_order: int, before: Iterable[Variable] = (),
                  after: Iterable[Variable] = ()) -> "VariableTable":
        jets = [Variable(jet_name(b, j), "jet", b, j) for b in bases for j in range(max_order + 1)]
        return cls(tuple(before) + tuple(jets) + tuple(after))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def __len__(self):
        return len(self.variables)

    def __contains__(self, name):
        return name in self._index

    def __getitem__(self, name: str) -> Variable:
        return self.variables[self.index(name)]

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise VariableTableError(f"unknown variable {name!r}") from None

    def jet(self, base: str, order: int) -> str:
        name = jet_name(base, order)
        if name not in self or self[name].kind != "jet":
            raise JetOrderError(f"jet symbol {base}^({order}) is not in the table")
        return name

    def max_jet_order(self, base: str) -> int:
        orders = [v.order for v in self.variables if v.kind == "jet" and v.base == base]
        if not orders:
            raise VariableTableError(f"no jet family {base!r}")
        return max(orders)

    def extend(self, *variables: Variable) -> "VariableTable":
        return VariableTable(self.variables + tuple(variables))

    # constructors for polynomials on this table
    def zero(self) -> "MultiPoly":
        return MultiPoly._raw(self, {})

    def one(self) -> "MultiPoly":
        return self.const(1)

    def const(self, c) -> "MultiPoly":
        c = as_fraction(c)
        return MultiPoly._raw(self, {(0,) * len(self): c} if c else {})

    def var(self, name: str) -> "MultiPoly":
        e = [0] * len(self)
        e[self.index(name)] = 1
        return MultiPoly._raw(self, {tuple(e): Fraction(1)})

    def vars(self, names: str | Iterable[str]) -> tuple["MultiPoly", ...]:
        if isinstance(names, str):
            names = names.replace(",", " ").split()
        return tuple(self.var(n) for n in names)

    def poly(self, text: str) -> "MultiPoly":
        return parse_poly(text, self)

    def to_json(self) -> list:
        return [v.to_json() for v in self.variables]

    @classmethod
    def from_json(cls, data) -> "VariableTable":
        return cls(tuple(Variable.from_json(v) for v in data))


def _check_exponent(table: VariableTable, e: tuple[int, ...]):
    if len(e) != len(table):
        raise VariableTableError(f"exponent length {len(e)} does not match table size {len(table)}")
    for k, v in zip(e, table.variables):
        if k < 0 and not v.invertible:
            raise VariableTableError(f"negative exponent on non-invertible variable {v.name!r}")


class MultiPoly:
    """Sparse polynomial with exact rational coefficients.

    Terms map an exponent tuple (one entry per table variable) to a nonzero
    ``Fraction``.  Variables flagged invertible may carry negative exponents.
    """

    __slots__ = ("table", "_terms", "_hash")

    def __init__(self, table: VariableTable, terms: Mapping[Sequence[int], Rational] | None = None):
        clean: dict[tuple[int, ...], Fraction] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(k) for k in e)
            _check_exponent(table, e)
            c = as_fraction(c)
            if c:
                clean[e] = clean.get(e, Fraction(0)) + c
                if not clean[e]:
                    del clean[e]
        self.table = table
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, table, terms):
        obj = cls.__new__(cls)
        obj.table = table
        obj._terms = terms
        obj._hash = None
        return obj

    @property
    def terms(self) -> Mapping[tuple[int, ...], Fraction]:
        return MappingProxyType(self._terms)

    # coercion ---------------------------------------------------------
    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.table is not self.table and other.table != self.table:
                raise VariableTableError("operands are defined on different variable tables")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.table.const(other)
        return NotImplemented

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return MultiPoly._raw(self.table, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw(self.table, {e: -c for e, c in self._terms.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if not other:
                return self.table.zero()
            return MultiPoly._raw(self.table, {e: c * other for e, c in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[tuple[int, ...], Fraction] = {}
        get = out.get
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple([a + b for a, b in zip(e1, e2)])
                out[e] = get(e, 0) + c1 * c2
        return MultiPoly._raw(self.table, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if not other:
                raise ZeroDivisionError("division of a polynomial by zero")
            return self * (1 / Fraction(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.reciprocal_monomial()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.reciprocal_monomial() ** (-k)
        result = self.table.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def reciprocal_monomial(self) -> "MultiPoly":
        """Inverse of a single term whose variables are all invertible."""
        if len(self._terms) != 1:
            raise ZeroDivisionError("only nonzero monomials can be inverted")
        (e, c), = self._terms.items()
        e_inv = tuple(-k for k in e)
        _check_exponent(self.table, e_inv)
        return MultiPoly._raw(self.table, {e_inv: 1 / c})

    # comparison -------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.table == other.table and self._terms == other._terms
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            other = as_fraction(other)
            if not other:
                return not self._terms
            return self._terms == {(0,) * len(self.table): other}
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.table.names, frozenset(self._terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    # inspection -------------------------------------------------------
    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def constant(self) -> Fraction:
        """Coefficient of the empty monomial."""
        return self._terms.get((0,) * len(self.table), Fraction(0))

    def degree(self) -> int:
        if not self._terms:
            return -1
        return max(sum(e) for e in self._terms)

    def degree_in(self, name: str) -> int:
        i = self.table.index(name)
        if not self._terms:
            return -1
        return max(e[i] for e in self._terms)

    def variables_used(self) -> tuple[str, ...]:
        used = set()
        for e in self._terms:
            used.update(i for i, k in enumerate(e) if k)
        return tuple(self.table.variables[i].name for i in sorted(used))

    def coefficients_in(self, name: str) -> dict[int, "MultiPoly"]:
        """Split by the power of ``name``: ``{k: c_k}`` with ``self = sum c_k name**k``."""
        i = self.table.index(name)
        out: dict[int, dict] = {}
        for e, c in self._terms.items():
            k = e[i]
            out.setdefault(k, {})[e[:i] + (0,) + e[i + 1:]] = c
        return {k: MultiPoly._raw(self.table, t) for k, t in sorted(out.items())}

    # calculus ---------------------------------------------------------
    def partial(self, name: str) -> "MultiPoly":
        i = self.table.index(name)
        out = {}
        for e, c in self._terms.items():
            k = e[i]
            if k:
                out[e[:i] + (k - 1,) + e[i + 1:]] = c * k
        return MultiPoly._raw(self.table, out)

    def total_x_derivative(self, x: str = "x") -> "MultiPoly":
        """Jet derivation: u^(j) -> u^(j+1), ``x`` -> 1, every other variable -> 0."""
        result = self.table.zero()
        for name in self.variables_used():
            v = self.table[name]
            if v.kind == "jet":
                nxt = self.table._dx[name]
                if nxt == -1:
                    raise JetOrderError(
                        f"D_x of {name} needs {v.base}^({v.order + 1}); "
                        f"table stops at order {self.table.max_jet_order(v.base)}"
                    )
                result = result + self.partial(name) * self.table.var(nxt)
            elif name == x:
                result = result + self.partial(name)
        return result

    # substitution -----------------------------------------------------
    def rebase(self, table: VariableTable) -> "MultiPoly":
        """Same polynomial expressed on another table containing every used variable."""
        if table == self.table:
            return self
        used = set(self.variables_used())
        mapping = [table.index(v.name) if v.name in used else -1 for v in self.table.variables]
        out = {}
        for e, c in self._terms.items():
            new = [0] * len(table)
            for i, k in enumerate(e):
                if k:
                    new[mapping[i]] = k
            new = tuple(new)
            _check_exponent(table, new)
            out[new] = c
        return MultiPoly._raw(table, out)

    def substitute(self, values: Mapping[str, "MultiPoly | Rational"]) -> "MultiPoly":
        """Replace variables by polynomials (or rationals) on the same table."""
        idx = {self.table.index(n): (v if isinstance(v, MultiPoly) else self.table.const(v))
               for n, v in values.items()}
        for v in idx.values():
            if v.table != self.table:
                raise VariableTableError("substituted polynomial lives on another table")
        powers: dict[tuple[int, int], MultiPoly] = {}

        def power(i, k):
            key = (i, k)
            if key not in powers:
                powers[key] = idx[i] ** k
            return powers[key]

        result = self.table.zero()
        for e, c in self._terms.items():
            kept = list(e)
            term = self.table.one()
            for i in idx:
                if e[i]:
                    term = term * power(i, e[i])
                    kept[i] = 0
            result = result + term * MultiPoly._raw(self.table, {tuple(kept): c})
        return result

    def evaluate(self, values: Mapping[str, Rational]):
        """Full evaluation.  Exact when all values are rationals."""
        index = self.table.index
        vals = {index(n): v for n, v in values.items()}
        total = 0
        for e, c in self._terms.items():
            t = c
            for i, k in enumerate(e):
                if k:
                    if i not in vals:
                        raise VariableTableError(f"no value for {self.table.variables[i].name!r}")
                    t = t * vals[i] ** k
            total = total + t
        return total

    def compile(self, argnames: Sequence[str], coerce: Callable = float, namespace: dict | None = None,
                prefix: str = "c") -> str:
        """Python source for this polynomial in ``argnames``.

        Coefficients are stored in ``namespace`` under generated names, converted
        with ``coerce(numerator) / coerce(denominator)``.
        """
        ns = namespace if namespace is not None else {}
        pos = {self.table.index(a): a for a in argnames}
        pieces = []
        for e, c in sorted(self._terms.items()):
            cname = f"{prefix}{len(ns)}"
            ns[cname] = coerce(c.numerator) / coerce(c.denominator)
            factors = [cname]
            for i, k in enumerate(e):
                if not k:
                    continue
                if i not in pos:
                    raise VariableTableError(f"{self.table.variables[i].name!r} is not an argument")
                factors.append(pos[i] if k == 1 else f"{pos[i]}**{k}")
            pieces.append("*".join(factors))
        return " + ".join(pieces) if pieces else "0"

    # serialization ----------------------------------------------------
    def to_json(self, with_table: bool = True) -> dict | list:
        terms = [[list(e), f"{c.numerator}/{c.denominator}"] for e, c in sorted(self._terms.items())]
        if not with_table:
            return terms
        return {"variables": self.table.to_json(), "terms": terms}

    @classmethod
    def from_json(cls, data, table: VariableTable | None = None) -> "MultiPoly":
        if isinstance(data, str):
            if table is None:
                raise VariableTableError("a polynomial string needs a variable table")
            return parse_poly(data, table)
        if isinstance(data, (int, Fraction)):
            if table is None:
                raise VariableTableError("a constant needs a variable table")
            return table.const(data)
        if isinstance(data, dict):
            own = VariableTable.from_json(data["variables"]) if "variables" in data else table
            if own is None:
                raise VariableTableError("polynomial JSON carries no variable table")
            poly = cls(own, {tuple(e): as_fraction(c) for e, c in data["terms"]})
            return poly.rebase(table) if table is not None else poly
        if table is None:
            raise VariableTableError("a bare term list needs a variable table")
        return cls(table, {tuple(e): as_fraction(c) for e, c in data})

    def __repr__(self):
        return f"MultiPoly({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        names = self.table.names
        out = []
        for e, c in sorted(self._terms.items(), key=lambda t: (-sum(t[0]), tuple(-k for k in t[0]))):
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if mono:
                body = mono if a == 1 else f"{a}*{mono}"
            else:
                body = str(a)
            out.append((sign, body))
        text = ("-" if out[0][0] == "-" else "") + out[0][1]
        for sign, body in out[1:]:
            text += f" {sign} {body}"
        return text


def poly_arith(a: MultiPoly, b: MultiPoly, op: str) -> MultiPoly:
    if not isinstance(a, MultiPoly) or not isinstance(b, MultiPoly):
        raise TypeError("poly_arith expects two MultiPoly operands")
    if a.table != b.table:
        raise VariableTableError("operands are defined on different variable tables")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


_ALLOWED_NODES = (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Constant, ast.Name, ast.Load,
                  ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.USub, ast.UAdd)


def parse_poly(text: str, table: VariableTable) -> MultiPoly:
    """Parse ``"1/2*(a2*m1^2 - a1*m2^2)"`` style input on ``table``.

    Decimal literals are read exactly (``0.1`` is ``1/10``).  Division is only
    allowed by constants or by monomials in invertible variables.
    """
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse polynomial {text!r}: {exc.msg}") from None
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED_NODES):
            raise ValueError(f"unsupported syntax in polynomial {text!r}: {type(node).__name__}")

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
                raise ValueError(f"bad literal {node.value!r}")
            return table.const(Fraction(ast.get_source_segment(text.replace("^", "**"), node) or repr(node.value)))
        if isinstance(node, ast.Name):
            return table.var(node.id)
        if isinstance(node, ast.UnaryOp):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        left, right = ev(node.left), ev(node.right)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if isinstance(node.op, ast.Div):
            if right.is_constant():
                return left / right.constant()
            return left / right
        # power: exponent must be an integer constant
        if not right.is_constant() or right.constant().denominator != 1:
            raise ValueError("exponents must be integer constants")
        return left ** int(right.constant())

    return ev(tree)


def det(matrix: Sequence[Sequence]):
    """Determinant by cofactor expansion with memoised minors.

    Works for any ring elements supporting ``+``, ``-`` and ``*``.
    """
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("determinant of a non-square matrix")
    memo = {}

    def minor(row, cols):
        if row == n:
            return None
        key = (row, cols)
        if key in memo:
            return memo[key]
        total = None
        sign = 1
        for pos, c in enumerate(cols):
            rest = cols[:pos] + cols[pos + 1:]
            sub = minor(row + 1, rest)
            term = matrix[row][c] if sub is None else matrix[row][c] * sub
            term = term if sign > 0 else -term
            total = term if total is None else total + term
            sign = -sign
        memo[key] = total
        return total

    return minor(0, tuple(range(n)))


# ----------------------------------------------------------------------
# Laurent series in the spectral variable
# ----------------------------------------------------------------------

class LaurentSeries:
    """Finite Laurent expansion ``sum c_e lam^e`` with polynomial coefficients.

    ``lo`` is the lowest exponent whose coefficient is known exactly; ``None``
    means the object is an exact Laurent polynomial.  ``hi`` bounds every
    exponent from above.  Coefficients below ``lo`` are never stored and are
    reported as indeterminate, not zero.
    """

    __slots__ = ("table", "_terms", "lo", "hi")

    def __init__(self, table: VariableTable, terms: Mapping[int, MultiPoly | Rational] | None = None,
                 lo: int | None = None, hi: int | None = None):
        clean = {}
        for e, c in (terms or {}).items():
            if not isinstance(c, MultiPoly):
                c = table.const(c)
            elif c.table != table:
                raise VariableTableError("Laurent coefficient on a different table")
            if c and (lo is None or e >= lo):
                clean[int(e)] = c
        top = max(clean) if clean else None
        if lo is None:
            if hi is not None and top is not None and top > hi:
                raise WindowError(f"term lam^{top} lies above the declared window top {hi}")
            hi = top
        else:
            if hi is None:
                hi = top if top is not None else lo
            elif top is not None and top > hi:
                raise WindowError(f"term lam^{top} lies above the declared window top {hi}")
            if lo > hi:
                raise WindowError(f"empty window [{lo}, {hi}]")
        self.table = table
        self._terms = clean
        self.lo = lo
        self.hi = hi

    @classmethod
    def _raw(cls, table, terms, lo, hi):
        obj = cls.__new__(cls)
        obj.table = table
        obj._terms = terms
        obj.lo = lo
        obj.hi = (max(terms) if terms else None) if lo is None else hi
        if lo is not None and lo > hi:
            raise WindowError(f"empty window [{lo}, {hi}]")
        return obj

    @classmethod
    def monomial(cls, table: VariableTable, e: int, c=1) -> "LaurentSeries":
        return cls(table, {e: c})

    @classmethod
    def from_poly(cls, p: MultiPoly) -> "LaurentSeries":
        return cls(p.table, {0: p})

    @property
    def terms(self) -> Mapping[int, MultiPoly]:
        return MappingProxyType(self._terms)

    @property
    def window(self) -> tuple[int | None, int | None]:
        return (self.lo, self.hi)

    @property
    def exact(self) -> bool:
        return self.lo is None

    def coefficient(self, e: int) -> MultiPoly:
        if self.lo is not None and e < self.lo:
            raise WindowError(f"coefficient of lam^{e} is below the exact window (starts at {self.lo})")
        return self._terms.get(e, self.table.zero())

    __getitem__ = coefficient

    def is_zero_in_window(self) -> bool:
        return not self._terms

    def nonzero_exponents(self) -> list[int]:
        return sorted(self._terms)

    # arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "LaurentSeries":
        if isinstance(other, LaurentSeries):
            if other.table != self.table:
                raise VariableTableError("Laurent operands on different coefficient tables")
            return other
        if isinstance(other, MultiPoly):
            return LaurentSeries.from_poly(other.rebase(self.table) if other.table != self.table else other)
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return LaurentSeries(self.table, {0: other})
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        los = [x for x in (self.lo, other.lo) if x is not None]
        lo = max(los) if los else None
        his = [x for x in (self.hi, other.hi) if x is not None]
        hi = max(his) if his else None
        if lo is not None and (hi is None or hi < lo):
            hi = lo
        out = {}
        for src in (self._terms, other._terms):
            for e, c in src.items():
                if lo is not None and e < lo:
                    continue
                s = out[e] + c if e in out else c
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return LaurentSeries._raw(self.table, out, lo, hi)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries._raw(self.table, {e: -c for e, c in self._terms.items()}, self.lo, self.hi)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, MultiPoly) or (isinstance(other, (int, Fraction)) and not isinstance(other, bool)):
            if not other:
                return LaurentSeries._raw(self.table, {}, None, None)
            return LaurentSeries._raw(self.table, {e: c * other for e, c in self._terms.items()
                                                   if c * other}, self.lo, self.hi)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self, other
        if (a.exact and not a._terms) or (b.exact and not b._terms):
            return LaurentSeries._raw(self.table, {}, None, None)
        cands = []
        if a.lo is not None:
            cands.append(a.lo + b.hi)
        if b.lo is not None:
            cands.append(b.lo + a.hi)
        lo = max(cands) if cands else None
        hi = a.hi + b.hi
        out: dict[int, MultiPoly] = {}
        for e1, c1 in a._terms.items():
            for e2, c2 in b._terms.items():
                e = e1 + e2
                if lo is not None and e < lo:
                    continue
                p = c1 * c2
                out[e] = out[e] + p if e in out else p
        out = {e: c for e, c in out.items() if c}
        return LaurentSeries._raw(self.table, out, lo, hi)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            raise ValueError("negative powers need reciprocal() with an explicit window")
        result = LaurentSeries(self.table, {0: 1})
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, LaurentSeries):
            return (self.table == other.table and self.lo == other.lo and self.hi == other.hi
                    and self._terms == other._terms)
        if isinstance(other, (int, Fraction, MultiPoly)) and not isinstance(other, bool):
            return self.exact and self == self._coerce(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.lo, self.hi, frozenset(self._terms.items())))

    def reciprocal(self, lo: int) -> "LaurentSeries":
        """``1/self`` down to ``lam^lo`` (or the inherited truncation, if higher).

        The leading coefficient must be a nonzero rational constant.
        """
        if not self._terms:
            raise ZeroDivisionError("reciprocal of zero")
        h = max(self._terms)
        lead = self._terms[h]
        if not lead.is_constant():
            raise ValueError("leading coefficient must be a constant to invert")
        c = lead.constant()
        if self.lo is None and len(self._terms) == 1:
            return LaurentSeries._raw(self.table, {-h: self.table.const(1 / c)}, None, None)
        target = lo if self.lo is None else max(lo, self.lo - 2 * h)
        if target > -h:
            raise WindowError(f"requested window lam^{lo} lies above the leading term lam^{-h}")
        inner_lo = target + h
        # self = c lam^h (1 + w) with w in strictly negative powers
        w = LaurentSeries._raw(self.table, {e - h: t / c for e, t in self._terms.items() if e != h},
                               None if self.lo is None else self.lo - h, -1)
        acc = LaurentSeries(self.table, {0: 1})
        power = acc
        for _ in range(-inner_lo):
            power = (power * (-w)).truncate(inner_lo)
            acc = acc + power
        acc = acc.truncate(inner_lo)
        out = {e - h: t / c for e, t in acc._terms.items()}
        return LaurentSeries._raw(self.table, out, target, -h)

    def truncate(self, lo: int) -> "LaurentSeries":
        """Forget coefficients below ``lam^lo``."""
        new_lo = lo if self.lo is None else max(lo, self.lo)
        out = {e: c for e, c in self._terms.items() if e >= new_lo}
        hi = self.hi if self.hi is not None else new_lo
        return LaurentSeries._raw(self.table, out, new_lo, max(hi, new_lo))

    # calculus ---------------------------------------------------------
    def d_lambda(self) -> "LaurentSeries":
        out = {e - 1: c * e for e, c in self._terms.items() if e}
        lo = None if self.lo is None else self.lo - 1
        hi = None if self.hi is None else self.hi - 1
        return LaurentSeries._raw(self.table, out, lo, hi)

    def map_coefficients(self, fn: Callable[[MultiPoly], MultiPoly]) -> "LaurentSeries":
        """Apply a linear map to every coefficient; the window is kept."""
        out = {}
        for e, c in self._terms.items():
            v = fn(c)
            if v:
                out[e] = v
        return LaurentSeries._raw(self.table, out, self.lo, self.hi)

    def partial(self, name: str) -> "LaurentSeries":
        return self.map_coefficients(lambda c: c.partial(name))

    def total_x_derivative(self, x: str = "x") -> "LaurentSeries":
        return self.map_coefficients(lambda c: c.total_x_derivative(x))

    def substitute(self, values) -> "LaurentSeries":
        return self.map_coefficients(lambda c: c.substitute(values))

    def project_nonneg(self) -> "LaurentSeries":
        out = {e: c for e, c in self._terms.items() if e >= 0}
        if self.lo is None or self.lo <= 0:
            return LaurentSeries._raw(self.table, out, None, None)
        return LaurentSeries._raw(self.table, out, self.lo, self.hi)

    def to_poly(self, table: VariableTable, var: str) -> MultiPoly:
        """Exact Laurent polynomial as a MultiPoly in ``var`` on ``table``."""
        if not self.exact:
            raise WindowError("a truncated Laurent series has no exact polynomial form")
        i = table.index(var)
        result = table.zero()
        for e, c in self._terms.items():
            mono = [0] * len(table)
            mono[i] = e
            mono = tuple(mono)
            _check_exponent(table, mono)
            result = result + c.rebase(table) * MultiPoly._raw(table, {mono: Fraction(1)})
        return result

    # serialization ----------------------------------------------------
    def to_json(self) -> dict:
        return {
            "variables": self.table.to_json(),
            "window": [self.lo, self.hi],
            "terms": [[e, c.to_json(with_table=False)] for e, c in sorted(self._terms.items())],
        }

    @classmethod
    def from_json(cls, data, table: VariableTable | None = None) -> "LaurentSeries":
        own = VariableTable.from_json(data["variables"]) if "variables" in data else table
        if own is None:
            raise VariableTableError("Laurent JSON carries no variable table")
        lo, hi = data.get("window", [None, None])
        terms = {int(e): MultiPoly.from_json(c, own) for e, c in data["terms"]}
        obj = cls(own, terms, lo, hi)
        if table is not None and table != own:
            obj = obj.map_coefficients(lambda c: c.rebase(table))
            obj = LaurentSeries._raw(table, dict(obj._terms), obj.lo, obj.hi)
        return obj

    def __repr__(self):
        return f"LaurentSeries({self}, window={self.window})"

    def __str__(self):
        if not self._terms:
            body = "0"
        else:
            parts = []
            for e, c in sorted(self._terms.items(), reverse=True):
                mono = "" if e == 0 else ("lam" if e == 1 else f"lam^{e}")
                cs = str(c)
                if mono and cs == "1":
                    parts.append(mono)
                elif mono:
                    parts.append(f"({cs})*{mono}")
                else:
                    parts.append(f"({cs})")
            body = " + ".join(parts)
        if self.lo is not None:
            body += f" + O(lam^{self.lo - 1})"
        return body


def laurent_arith(a: LaurentSeries, b: LaurentSeries | None, op: str, k: int | None = None) -> LaurentSeries:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "pow":
        if k is None or k < 0:
            raise ValueError("pow needs an exponent k >= 0")
        return a ** k
    raise ValueError(f"unknown operation {op!r}")


def project_nonneg(a: LaurentSeries) -> LaurentSeries:
    """Keep the terms with non-negative powers of lam, including lam^0."""
    return a.project_nonneg()


def monomials(table: VariableTable, max_degree: int, names: Sequence[str] | None = None):
    """Exponent tuples of total degree <= max_degree in ``names`` (all variables by default)."""
    idx = [table.index(n) for n in (names if names is not None else table.names)]
    for degs in itertools.product(range(max_degree + 1), repeat=len(idx)):
        if sum(degs) <= max_degree:
            e = [0] * len(table)
            for i, d in zip(idx, degs):
                e[i] = d
            yield tuple(e)


def random_poly(table: VariableTable, rng, max_degree: int, names: Sequence[str] | None = None,
                density: float = 0.5, coeff_range: int = 3) -> MultiPoly:
    """Random integer-coefficient polynomial; ``rng`` is a ``random.Random``."""
    terms = {}
    for e in monomials(table, max_degree, names):
        if rng.random() < density:
            c = rng.randint(-coeff_range, coeff_range)
            if c:
                terms[e] = Fraction(c)
    return MultiPoly._raw(table, terms)
