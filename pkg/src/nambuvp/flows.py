"""Nambu-Hamiltonian vector fields, their divergence, and RK4 integration."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .nambu import BracketSpace, nambu_bracket
from .symalg import MultiPoly, Variable, VariableTable, VariableTableError, as_fraction

__all__ = [
    "IntegrationError",
    "NambuSystem",
    "Trajectory",
    "vector_field",
    "divergence",
    "integrate",
    "conserved_drift",
    "rigid_body",
    "rigid_body_from_inertia",
    "euler_top",
]


class IntegrationError(ArithmeticError):
    """The integrated state stopped being finite."""

    def __init__(self, time: float, state):
        super().__init__(f"non-finite state {[float(v) for v in state]} at t = {time:.17g}")
        self.time = time
        self.state = state


@dataclass(frozen=True)
class NambuSystem:
    """Phase coordinates plus ``n - 1`` Hamiltonians.

    ``constants`` binds symbolic parameters to rationals for numeric runs;
    any parameter left unbound keeps the system symbolic.
    """

    coordinates: tuple[str, ...]
    hamiltonians: tuple[MultiPoly, ...]
    constants: Mapping[str, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "coordinates", tuple(self.coordinates))
        object.__setattr__(self, "hamiltonians", tuple(self.hamiltonians))
        object.__setattr__(self, "constants", {k: as_fraction(v) for k, v in dict(self.constants).items()})
        n = len(self.coordinates)
        if len(self.hamiltonians) != n - 1:
            raise ValueError(f"{n} phase coordinates need {n - 1} Hamiltonians, got {len(self.hamiltonians)}")
        tables = {h.table for h in self.hamiltonians}
        if len(tables) != 1:
            raise VariableTableError("Hamiltonians live on different variable tables")
        table = self.table
        for c in self.coordinates:
            table.index(c)
        for name in self.constants:
            table.index(name)
            if name in self.coordinates:
                raise ValueError(f"{name!r} is both a coordinate and a constant")

    @property
    def table(self) -> VariableTable:
        return self.hamiltonians[0].table

    @property
    def space(self) -> BracketSpace:
        return BracketSpace(self.table, self.coordinates)

    def parameters(self) -> tuple[str, ...]:
        used = set()
        for h in self.hamiltonians:
            used.update(h.variables_used())
        return tuple(n for n in self.table.names if n in used and n not in self.coordinates)

    def bound(self) -> "NambuSystem":
        """The same system with every bound constant substituted."""
        if not self.constants:
            return self
        hs = tuple(h.substitute(self.constants) for h in self.hamiltonians)
        return NambuSystem(self.coordinates, hs)


def vector_field(sys: NambuSystem) -> tuple[MultiPoly, ...]:
    """Component i is ``{H_1, ..., H_{n-1}, x_i}``.

    For n = 3 this equals ``{x_i, H_1, H_2}`` (cyclic shifts of an odd-arity
    bracket are even permutations).
    """
    space = sys.space
    hs = list(sys.hamiltonians)
    return tuple(nambu_bracket(hs + [sys.table.var(x)], space) for x in sys.coordinates)


def divergence(field: Sequence[MultiPoly], coordinates: Sequence[str]) -> MultiPoly:
    if len(field) != len(coordinates):
        raise ValueError("field and coordinate list differ in length")
    total = field[0].table.zero()
    for f, x in zip(field, coordinates):
        total = total + f.partial(x)
    return total


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    coordinates: tuple[str, ...]
    method: str = "rk4"
    dt: float = 0.0

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise ValueError("times and states differ in length")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("trajectory times must be strictly increasing")

    def __len__(self):
        return len(self.times)

    def to_csv(self, path=None) -> str:
        """``t,x1,...,xn`` rows at 17 significant digits; returns the text."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", *self.coordinates])
        for t, s in zip(self.times, self.states):
            w.writerow([format(float(t), ".17g")] + [format(float(v), ".17g") for v in s])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_csv(cls, text: str) -> "Trajectory":
        rows = list(csv.reader(io.StringIO(text)))
        header, body = rows[0], rows[1:]
        data = np.array([[float(v) for v in r] for r in body])
        return cls(data[:, 0], data[:, 1:], tuple(header[1:]))


def _compile_field(polys: Sequence[MultiPoly], coordinates: Sequence[str], dtype):
    """Callable ``state -> array`` evaluating ``polys`` in ``dtype`` arithmetic."""
    ns: dict = {}
    body = ", ".join(p.compile(list(coordinates), coerce=dtype, namespace=ns) for p in polys)
    unpack = ", ".join(coordinates) + ("," if len(coordinates) == 1 else "")
    code = f"def _f(_s):\n    {unpack} = _s\n    return ({body},)\n"
    exec(compile(code, "<nambu-field>", "exec"), ns)
    fn = ns["_f"]
    return lambda s: np.array(fn(s), dtype=dtype)


def _to_dtype(v, dtype):
    if isinstance(v, (int, Fraction, str)) and not isinstance(v, bool):
        v = as_fraction(v)
        return dtype(v.numerator) / dtype(v.denominator)
    return dtype(v)


def integrate(sys: NambuSystem, initial: Sequence, t_end: float, dt: float, method: str = "rk4",
              dtype=np.float64) -> Trajectory:
    """Classical fixed-step RK4.  A final short step lands exactly on ``t_end``.

    ``dtype`` defaults to double precision; ``np.longdouble`` is accepted
    for drift studies below double-precision roundoff.
    """
    if method != "rk4":
        raise ValueError(f"unsupported method {method!r}; only 'rk4' is available")
    if not dt > 0:
        raise ValueError("dt must be positive")
    if t_end < 0:
        raise ValueError("t_end must be non-negative")
    bound = sys.bound()
    free = bound.parameters()
    if free:
        raise ValueError(f"unbound symbolic constants {free}; bind them before integrating")
    fieldfn = _compile_field(vector_field(bound), bound.coordinates, dtype)
    y = np.array([_to_dtype(v, dtype) for v in initial], dtype=dtype)
    if y.shape != (len(sys.coordinates),):
        raise ValueError("initial state has the wrong dimension")
    h_full = _to_dtype(dt, dtype)
    t_stop = _to_dtype(t_end, dtype)
    n_full = int(math.floor(t_end / dt + 1e-9))
    steps = [h_full] * n_full
    rest = t_stop - dtype(n_full) * h_full
    if rest > h_full * dtype(1e-9):
        steps.append(rest)
    half, sixth = dtype(1) / dtype(2), dtype(1) / dtype(6)
    times = np.empty(len(steps) + 1, dtype=dtype)
    states = np.empty((len(steps) + 1, len(y)), dtype=dtype)
    times[0] = 0
    states[0] = y
    with np.errstate(over="ignore", invalid="ignore"):
        for i, h in enumerate(steps):
            k1 = fieldfn(y)
            k2 = fieldfn(y + half * h * k1)
            k3 = fieldfn(y + half * h * k2)
            k4 = fieldfn(y + h * k3)
            y = y + sixth * h * (k1 + 2 * k2 + 2 * k3 + k4)
            t = dtype(i + 1) * h_full if i < n_full else t_stop
            if not np.all(np.isfinite(y)):
                raise IntegrationError(float(t), y)
            times[i + 1] = t
            states[i + 1] = y
    return Trajectory(times, states, tuple(sys.coordinates), method, float(dt))


def conserved_drift(traj: Trajectory, integrals: Sequence[MultiPoly]) -> list[float]:
    """Per integral, ``max_t |F(t) - F(0)| / max(1, |F(0)|)``."""
    dtype = traj.states.dtype.type
    out = []
    for F in integrals:
        used = [n for n in F.variables_used() if n not in traj.coordinates]
        if used:
            raise VariableTableError(f"integral depends on non-phase variables {used}")
        fn = _compile_field([F], traj.coordinates, dtype)
        vals = np.array([fn(s)[0] for s in traj.states], dtype=dtype)
        ref = vals[0]
        scale = max(dtype(1), abs(ref))
        out.append(float(np.max(np.abs(vals - ref)) / scale))
    return out


def rigid_body() -> NambuSystem:
    """Symbolic rigid body with feedback torque ``u = -k m1 m2``.

    Parameters ``a1, a2, a3, k`` stay symbolic; ``a1`` is invertible because
    the second Hamiltonian carries ``(a3 - k)/a1``.
    """
    table = VariableTable((
        Variable("m1"), Variable("m2"), Variable("m3"),
        Variable("a1", invertible=True), Variable("a2"), Variable("a3"), Variable("k"),
    ))
    H1 = table.poly("1/2*(a2*m1^2 - a1*m2^2)")
    H2 = table.poly("1/2*((a3 - k)/a1*m1^2 - m3^2)")
    return NambuSystem(("m1", "m2", "m3"), (H1, H2))


def rigid_body_from_inertia(I: Sequence = (1, 2, 3), k=1) -> NambuSystem:
    """Rigid body with ``a1 = 1/I2 - 1/I3`` etc. bound as exact constants."""
    I1, I2, I3 = (as_fraction(v) for v in I)
    if 0 in (I1, I2, I3):
        raise ValueError("moments of inertia must be nonzero")
    a1 = 1 / I2 - 1 / I3
    a2 = 1 / I3 - 1 / I1
    a3 = 1 / I1 - 1 / I2
    return _bound_rigid_body(a1, a2, a3, as_fraction(k))


def euler_top() -> NambuSystem:
    """Scalar Euler top: ``a1 = a2 = a3 = 1``, no torque."""
    return _bound_rigid_body(Fraction(1), Fraction(1), Fraction(1), Fraction(0))


def _bound_rigid_body(a1, a2, a3, k) -> NambuSystem:
    if a1 == 0:
        raise ValueError("a1 = 0 (I2 = I3) makes the second Hamiltonian singular")
    sym = rigid_body()
    return NambuSystem(sym.coordinates, sym.hamiltonians, {"a1": a1, "a2": a2, "a3": a3, "k": k})
