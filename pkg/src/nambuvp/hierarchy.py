"""Dispersionless KP in jet variables and the volume-preserving three-flow hierarchy.

dKP side: ``L = lam + sum_{n=1}^{K} u_{n+1} lam^{-n}`` with the ``u`` living in
a jet ring, ``B_n = (L^n)_{>=0}`` and ``{f, g} = f_lam D_x g - D_x f g_lam``.

Volume-preserving side: Laurent series ``L, M, N`` in ``lam`` with
coefficients in ``(p, q, t_1..t_K)``, flows ``dX/dt_n = {B_1n, B_2n, X}`` with
the Jacobian 3-bracket in ``(lam, p, q)``, and ``{L, M, N} = 1``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .symalg import (
    LaurentSeries,
    MultiPoly,
    Variable,
    VariableTable,
    VariableTableError,
    WindowError,
    det,
)

__all__ = [
    "DEFAULT_MAX_JET",
    "max_jet_from_env",
    "DkpState",
    "OrlovData",
    "VpTriple",
    "ResidualReport",
    "poisson2",
    "lax_projection",
    "dkp_flow",
    "time_derivative",
    "zero_curvature_residual",
    "nambu3",
    "vp_flow_residual",
    "volume_constraint_residual",
    "vacuum_solution",
    "cross_flow_residual",
    "orlov_m",
    "residual_report",
    "indeterminate_report",
    "laurent_from_lam_poly",
    "vp_table",
    "dkp_table",
]

DEFAULT_MAX_JET = 4


def max_jet_from_env(default: int = DEFAULT_MAX_JET) -> int:
    raw = os.environ.get("NAMBU_MAX_JET")
    if raw is None or raw == "":
        return default
    value = int(raw)
    if value < 1:
        raise ValueError("NAMBU_MAX_JET must be at least 1")
    return value


def _as_laurent(obj, table: VariableTable) -> LaurentSeries:
    if isinstance(obj, LaurentSeries):
        return obj
    if isinstance(obj, MultiPoly):
        return LaurentSeries.from_poly(obj)
    return LaurentSeries(table, {0: obj})


# ----------------------------------------------------------------------
# dispersionless KP
# ----------------------------------------------------------------------

def dkp_table(K: int, max_jet: int | None = None) -> VariableTable:
    J = max_jet_from_env() if max_jet is None else max_jet
    before = [Variable("x")] + [Variable(f"t{n}", "time") for n in range(1, K + 1)]
    return VariableTable.with_jets([f"u{m}" for m in range(2, K + 2)], J, before=before)


@dataclass(frozen=True)
class DkpState:
    """Truncated Lax series; ``K`` coefficients ``u_2 .. u_{K+1}`` are kept."""

    K: int
    L: LaurentSeries

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("truncation depth K must be at least 1")
        if self.L.hi != 1 or self.L.coefficient(1) != 1:
            raise ValueError("the Lax series must start with exactly lam")

    @classmethod
    def generic(cls, K: int, max_jet: int | None = None) -> "DkpState":
        table = dkp_table(K, max_jet)
        terms = {1: table.one()}
        for n in range(1, K + 1):
            terms[-n] = table.var(f"u{n + 1}")
        return cls(K, LaurentSeries(table, terms, lo=-K, hi=1))

    @classmethod
    def vacuum(cls, K: int, max_jet: int | None = None) -> "DkpState":
        """``L = lam`` exactly (every ``u`` vanishes)."""
        table = dkp_table(K, max_jet)
        return cls(K, LaurentSeries(table, {1: 1}))

    @property
    def table(self) -> VariableTable:
        return self.L.table

    def u(self, m: int) -> MultiPoly:
        return self.table.var(f"u{m}")


def poisson2(f, g, x: str = "x") -> LaurentSeries:
    """``{f, g} = d_lam f * D_x g - D_x f * d_lam g``."""
    table = f.table
    f = _as_laurent(f, table)
    g = _as_laurent(g, table)
    return f.d_lambda() * g.total_x_derivative(x) - f.total_x_derivative(x) * g.d_lambda()


def lax_projection(state: DkpState, n: int) -> LaurentSeries:
    """``B_n = (L^n)_{>=0}``; raises when truncation leaves a nonnegative power undetermined."""
    if n < 1:
        raise ValueError("flow index must be >= 1")
    P = state.L ** n
    B = P.project_nonneg()
    if not B.exact:
        raise WindowError(f"B_{n} needs u-coefficients beyond truncation depth K={state.K}")
    return B


def dkp_flow(state: DkpState, n: int) -> dict[int, MultiPoly]:
    """``{m: du_m/dt_n}`` for every ``u_m`` whose flow is exactly determined."""
    B = lax_projection(state, n)
    R = poisson2(B, state.L)
    out = {}
    for m in range(2, state.K + 2):
        e = -(m - 1)
        if R.lo is None or e >= R.lo:
            out[m] = R.coefficient(e)
    if not out:
        raise WindowError(f"truncation depth K={state.K} determines no flow for t_{n}")
    return out


def time_derivative(poly: MultiPoly, flows: Mapping[int, MultiPoly], x: str = "x") -> MultiPoly:
    """Chain rule ``sum dP/du_k^(j) * D_x^j (du_k/dt)`` for a differential polynomial ``P``."""
    table = poly.table
    total = table.zero()
    for name in poly.variables_used():
        v = table[name]
        if v.kind != "jet":
            continue
        k = int(v.base[1:])
        if k not in flows:
            raise WindowError(f"flow of {v.base} is not determined at this truncation depth")
        rate = flows[k]
        for _ in range(v.order):
            rate = rate.total_x_derivative(x)
        total = total + poly.partial(name) * rate
    return total


def zero_curvature_residual(state: DkpState, n: int, m: int) -> LaurentSeries:
    """``dB_n/dt_m - dB_m/dt_n + {B_n, B_m}`` with time derivatives from the flows."""
    Bn = lax_projection(state, n)
    Bm = lax_projection(state, m)
    fn = dkp_flow(state, n)
    fm = dkp_flow(state, m)
    dBn = Bn.map_coefficients(lambda c: time_derivative(c, fm))
    dBm = Bm.map_coefficients(lambda c: time_derivative(c, fn))
    return dBn - dBm + poisson2(Bn, Bm)


@dataclass(frozen=True)
class OrlovData:
    """Times ``t_1..t_K`` (symbols of the table unless given) and corrections ``v_i``.

    ``x`` enters through its own term; ``t_1`` is kept as a separate symbol so
    that ``D_x`` sees only the explicit ``x``.
    """

    times: Mapping[int, object] = field(default_factory=dict)
    v: Mapping[int, object] = field(default_factory=dict)


def orlov_m(state: DkpState, data: OrlovData | None = None) -> LaurentSeries:
    """``M = sum_n n t_n L^{n-1} + x + sum_i v_i L^{-i-1}``."""
    data = data or OrlovData()
    table = state.table
    L = state.L
    M = LaurentSeries(table, {0: table.var("x")})
    power = LaurentSeries(table, {0: 1})
    for n in range(1, state.K + 1):
        t = data.times.get(n, table.var(f"t{n}"))
        t = t if isinstance(t, MultiPoly) else table.const(t)
        if t:
            M = M + power * (t * n)
        power = power * L
    if data.v:
        lo = L.lo if L.lo is not None else -(state.K + 1)
        inv = L.reciprocal(lo - 1)
        inv_power = inv
        for i in range(1, max(data.v) + 1):
            inv_power = inv_power * inv
            vi = data.v.get(i, 0)
            vi = vi if isinstance(vi, MultiPoly) else table.const(vi)
            if vi:
                M = M + inv_power * vi
    return M


# ----------------------------------------------------------------------
# volume-preserving hierarchy
# ----------------------------------------------------------------------

def vp_table(K: int) -> VariableTable:
    return VariableTable((Variable("p"), Variable("q"))
                         + tuple(Variable(f"t{n}", "time") for n in range(1, K + 1)))


@dataclass(frozen=True)
class VpTriple:
    L: LaurentSeries
    M: LaurentSeries
    N: LaurentSeries
    K: int

    def __post_init__(self):
        tables = {self.L.table, self.M.table, self.N.table}
        if len(tables) != 1:
            raise VariableTableError("L, M, N must share one coefficient table")
        for name in ("p", "q"):
            self.table.index(name)

    @property
    def table(self) -> VariableTable:
        return self.L.table

    @classmethod
    def from_polys(cls, L, M, N, K: int, table: VariableTable | None = None) -> "VpTriple":
        """Build from polynomial strings or MultiPolys in ``lam, p, q, t_n``."""
        table = table or vp_table(K)
        return cls(*(laurent_from_lam_poly(X, table) for X in (L, M, N)), K)

    def members(self) -> tuple[LaurentSeries, LaurentSeries, LaurentSeries]:
        return (self.L, self.M, self.N)

    def map(self, fn) -> "VpTriple":
        return VpTriple(fn(self.L), fn(self.M), fn(self.N), self.K)

    def shift_times(self, shifts: Mapping[int, object]) -> "VpTriple":
        """Substitute ``t_n -> t_n + c_n``."""
        table = self.table
        sub = {f"t{n}": table.var(f"t{n}") + c for n, c in shifts.items()}
        return self.map(lambda X: X.substitute(sub))

    def B1(self, n: int) -> LaurentSeries:
        return _projected_power(self.L, n, "B_1")

    def B2(self, n: int) -> LaurentSeries:
        return _projected_power(self.M, n, "B_2")


def laurent_from_lam_poly(X, table: VariableTable) -> LaurentSeries:
    """Exact Laurent series from a polynomial (or string) in ``lam`` and the variables of ``table``."""
    if isinstance(X, LaurentSeries):
        return X
    lam_table = table.extend(Variable("lam", invertible=True))
    if isinstance(X, str):
        X = lam_table.poly(X)
    elif isinstance(X, MultiPoly) and X.table != lam_table:
        X = X.rebase(lam_table)
    terms = {}
    for k, c in X.coefficients_in("lam").items():
        terms[k] = c.rebase(table)
    return LaurentSeries(table, terms)


def _projected_power(X: LaurentSeries, n: int, label: str) -> LaurentSeries:
    B = (X ** n).project_nonneg()
    if not B.exact:
        raise WindowError(f"{label}{n} is not determined by the truncated series")
    return B


def nambu3(f, g, h, variables: Sequence[str] = ("p", "q")) -> LaurentSeries:
    """Jacobian 3-bracket in ``(lam, p, q)`` of Laurent series."""
    table = next(o.table for o in (f, g, h) if isinstance(o, (LaurentSeries, MultiPoly)))
    rows = []
    for obj in (f, g, h):
        X = _as_laurent(obj, table)
        rows.append([X.d_lambda()] + [X.partial(v) for v in variables])
    return det(rows)


def _time_partial(X: LaurentSeries, n: int) -> LaurentSeries:
    name = f"t{n}"
    X.table.index(name)
    return X.partial(name)


def vp_flow_residual(triple: VpTriple, n: int) -> tuple[LaurentSeries, LaurentSeries, LaurentSeries]:
    """``dX/dt_n - {B_1n, B_2n, X}`` for ``X = L, M, N``."""
    B1, B2 = triple.B1(n), triple.B2(n)
    return tuple(_time_partial(X, n) - nambu3(B1, B2, X) for X in triple.members())


def volume_constraint_residual(triple: VpTriple) -> LaurentSeries:
    return nambu3(triple.L, triple.M, triple.N) - 1


def vacuum_solution(K: int) -> VpTriple:
    """``L = lam, M = p, N = q + t_1 + sum_{n=2}^{K} n^2 t_n lam^{n-1} p^{n-1}``."""
    if K < 1:
        raise ValueError("K must be at least 1")
    table = vp_table(K)
    p, q = table.var("p"), table.var("q")
    N_terms = {0: q + table.var("t1")}
    for n in range(2, K + 1):
        N_terms[n - 1] = table.var(f"t{n}") * (p ** (n - 1)) * (n * n)
    return VpTriple(LaurentSeries(table, {1: 1}), LaurentSeries(table, {0: p}),
                    LaurentSeries(table, N_terms), K)


def cross_flow_residual(triple: VpTriple, n: int, m: int) -> tuple[LaurentSeries, ...]:
    """Commutativity of the t_n and t_m flows.

    ``D_m {B_1n, B_2n, X} - D_n {B_1m, B_2m, X}``, where ``D_m`` differentiates
    along the t_m flow: ``D_m X = {B_1m, B_2m, X}`` and
    ``D_m B_1n = ({B_1m, B_2m, L^n})_{>=0}`` (likewise ``B_2n`` from ``M^n``).
    """
    B1 = {k: triple.B1(k) for k in (n, m)}
    B2 = {k: triple.B2(k) for k in (n, m)}

    def flow(k, Y):
        return nambu3(B1[k], B2[k], Y)

    def along(k, j, X):
        # derivative of {B_1j, B_2j, X} along the t_k flow
        dB1 = flow(k, triple.L ** j).project_nonneg()
        dB2 = flow(k, triple.M ** j).project_nonneg()
        return nambu3(dB1, B2[j], X) + nambu3(B1[j], dB2, X) + nambu3(B1[j], B2[j], flow(k, X))

    return tuple(along(m, n, X) - along(n, m, X) for X in triple.members())


# ----------------------------------------------------------------------
# reports
# ----------------------------------------------------------------------

@dataclass
class ResidualReport:
    check: str
    flow_indices: list[int]
    window: list
    nonzero_coefficients: list[dict]
    verdict: str
    reason: str | None = None

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "flow_indices": list(self.flow_indices),
            "window": self.window,
            "nonzero_coefficients": self.nonzero_coefficients,
            "verdict": self.verdict,
        } | ({"reason": self.reason} if self.reason else {})


def residual_report(check: str, residuals, flow_indices: Sequence[int] = ()) -> ResidualReport:
    """Summarise Laurent residuals: every exact coefficient must vanish."""
    if isinstance(residuals, LaurentSeries):
        residuals = [residuals]
    windows = []
    nonzero = []
    for i, R in enumerate(residuals):
        windows.append([R.lo, R.hi])
        for e in R.nonzero_exponents():
            nonzero.append({"component": i, "exponent": e, "value": str(R.coefficient(e))})
    return ResidualReport(check, list(flow_indices), windows, nonzero, "fail" if nonzero else "pass")


def indeterminate_report(check: str, flow_indices: Sequence[int], reason: str) -> ResidualReport:
    """Verdict for a check the truncation window could not decide."""
    return ResidualReport(check, list(flow_indices), [], [], "indeterminate", reason)
