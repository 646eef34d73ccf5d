"""n-ary Nambu brackets, Nambu tensors and their decomposability constraints.

Tensor indices are 1-based in every public signature and in JSON, matching
the usual ``eta_{i1...in}`` notation.  Internally dense arrays are 0-based.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .symalg import MultiPoly, VariableTable, VariableTableError, as_fraction, det

__all__ = [
    "BracketSpace",
    "NambuTensor",
    "nambu_bracket",
    "fundamental_identity_residual",
    "tensor_bracket",
    "algebraic_constraint_residual",
    "differential_constraint_residual",
    "is_decomposable_oracle",
    "permutation_sign",
    "random_constant_tensor",
]


def permutation_sign(seq: Sequence) -> int:
    """Sign of the permutation sorting ``seq``; 0 if an entry repeats."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@dataclass(frozen=True)
class BracketSpace:
    """Coordinates defining the Jacobian bracket ``{f1..fn} = det(df_i/dx_j)``."""

    table: VariableTable
    coordinates: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "coordinates", tuple(self.coordinates))
        if len(set(self.coordinates)) != len(self.coordinates):
            raise VariableTableError("bracket coordinates must be distinct")
        for c in self.coordinates:
            self.table.index(c)

    @property
    def order(self) -> int:
        return len(self.coordinates)


def nambu_bracket(fs: Sequence[MultiPoly], space: BracketSpace) -> MultiPoly:
    if len(fs) != space.order:
        raise ValueError(f"a {space.order}-bracket needs {space.order} arguments, got {len(fs)}")
    fs = [space.table.const(f) if not isinstance(f, MultiPoly) else f for f in fs]
    return det([[f.partial(x) for x in space.coordinates] for f in fs])


def fundamental_identity_residual(fs: Sequence[MultiPoly], space: BracketSpace) -> MultiPoly:
    """Left minus right side of the fundamental identity for ``2n-1`` functions.

    With ``X = {f1, ..., f_{n-1}, .}`` and ``g = (f_n, ..., f_{2n-1})`` the
    identity reads ``sum_k {g_1, ..., X g_k, ..., g_n} = X {g_1, ..., g_n}``.
    """
    n = space.order
    if len(fs) != 2 * n - 1:
        raise ValueError(f"the fundamental identity for n={n} needs {2 * n - 1} functions, got {len(fs)}")
    head, g = list(fs[: n - 1]), list(fs[n - 1:])

    def X(h):
        return nambu_bracket(head + [h], space)

    lhs = space.table.zero()
    for k in range(n):
        args = list(g)
        args[k] = X(g[k])
        lhs = lhs + nambu_bracket(args, space)
    return lhs - X(nambu_bracket(g, space))


class NambuTensor:
    """Totally antisymmetric order-n tensor on N coordinates.

    Only strictly increasing index tuples are stored; any other tuple is
    resolved by the permutation sign.
    """

    def __init__(self, table: VariableTable, coordinates: Sequence[str], order: int,
                 entries: Mapping[Sequence[int], MultiPoly | int | Fraction]):
        self.table = table
        self.coordinates = tuple(coordinates)
        self.order = int(order)
        self.dimension = len(self.coordinates)
        if not 1 <= self.order <= self.dimension:
            raise ValueError(f"order {self.order} outside [1, {self.dimension}]")
        for c in self.coordinates:
            table.index(c)
        stored: dict[tuple[int, ...], MultiPoly] = {}
        for idx, value in entries.items():
            idx = tuple(int(i) for i in idx)
            if len(idx) != self.order:
                raise ValueError(f"index {idx} has the wrong length for order {self.order}")
            if any(not 1 <= i <= self.dimension for i in idx):
                raise ValueError(f"index {idx} outside [1, {self.dimension}]")
            value = value if isinstance(value, MultiPoly) else table.const(value)
            sign = permutation_sign(idx)
            if sign == 0:
                if value:
                    raise ValueError(f"nonzero entry on repeated index {idx}")
                continue
            key = tuple(sorted(idx))
            total = stored.get(key, table.zero()) + value * sign
            if total:
                stored[key] = total
            else:
                stored.pop(key, None)
        self._entries = stored

    @classmethod
    def levi_civita(cls, table: VariableTable, coordinates: Sequence[str], scale=1) -> "NambuTensor":
        n = len(coordinates)
        return cls(table, coordinates, n, {tuple(range(1, n + 1)): scale})

    @classmethod
    def basis(cls, table: VariableTable, coordinates: Sequence[str], *index_sets: Sequence[int]) -> "NambuTensor":
        """Sum of elementary polyvectors ``e_I`` for each index set ``I``."""
        order = len(index_sets[0])
        return cls(table, coordinates, order, {tuple(I): 1 for I in index_sets})

    @classmethod
    def wedge_of(cls, table: VariableTable, coordinates: Sequence[str],
                 vectors: Sequence[Sequence]) -> "NambuTensor":
        """Decomposable tensor ``v_1 ^ ... ^ v_n`` from component lists."""
        n, N = len(vectors), len(coordinates)
        vecs = [[v if isinstance(v, MultiPoly) else table.const(v) for v in vec] for vec in vectors]
        entries = {}
        for I in itertools.combinations(range(N), n):
            entries[tuple(i + 1 for i in I)] = det([[vec[i] for i in I] for vec in vecs])
        return cls(table, coordinates, n, entries)

    @property
    def entries(self) -> dict[tuple[int, ...], MultiPoly]:
        return dict(self._entries)

    def component(self, idx: Sequence[int]) -> MultiPoly:
        sign = permutation_sign(idx)
        if sign == 0:
            return self.table.zero()
        value = self._entries.get(tuple(sorted(idx)))
        if value is None:
            return self.table.zero()
        return value if sign > 0 else -value

    def is_constant(self) -> bool:
        return all(v.is_constant() for v in self._entries.values())

    def scaled(self, factor) -> "NambuTensor":
        return NambuTensor(self.table, self.coordinates, self.order,
                           {k: v * factor for k, v in self._entries.items()})

    def __add__(self, other: "NambuTensor") -> "NambuTensor":
        if (other.coordinates, other.order) != (self.coordinates, self.order):
            raise ValueError("tensors of different shape")
        entries = dict(self._entries)
        for k, v in other._entries.items():
            entries[k] = entries.get(k, self.table.zero()) + v
        return NambuTensor(self.table, self.coordinates, self.order, entries)

    def dense(self) -> np.ndarray:
        """Object array of shape ``(N,)*n`` holding every signed component."""
        N, n = self.dimension, self.order
        arr = np.empty((N,) * n, dtype=object)
        zero = self.table.zero()
        arr.fill(zero)
        for key, value in self._entries.items():
            neg = -value
            for perm in itertools.permutations(range(n)):
                idx = tuple(key[p] - 1 for p in perm)
                arr[idx] = value if permutation_sign(perm) > 0 else neg
        return arr

    def dense_integer(self) -> tuple[np.ndarray, int]:
        """Integer array ``D * eta`` for constant tensors, with the common denominator ``D``."""
        if not self.is_constant():
            raise ValueError("tensor entries are not constant")
        values = {k: v.constant() for k, v in self._entries.items()}
        D = math.lcm(*(v.denominator for v in values.values())) if values else 1
        big = max((abs(v * D) for v in values.values()), default=0)
        dtype = np.int64 if big < 2 ** 20 else object
        N, n = self.dimension, self.order
        arr = np.zeros((N,) * n, dtype=dtype)
        for key, v in values.items():
            iv = int(v * D)
            for perm in itertools.permutations(range(n)):
                arr[tuple(key[p] - 1 for p in perm)] = iv * permutation_sign(perm)
        return arr, D

    def to_json(self) -> dict:
        return {
            "n": self.order,
            "N": self.dimension,
            "coordinates": list(self.coordinates),
            "variables": self.table.to_json(),
            "terms": [[list(k), v.to_json(with_table=False)] for k, v in sorted(self._entries.items())],
        }

    @classmethod
    def from_json(cls, data: dict, table: VariableTable | None = None) -> "NambuTensor":
        if table is None:
            if "variables" in data:
                table = VariableTable.from_json(data["variables"])
            else:
                table = VariableTable.of([f"x{i}" for i in range(1, int(data["N"]) + 1)])
        coords = data.get("coordinates") or [f"x{i}" for i in range(1, int(data["N"]) + 1)]
        if len(coords) != int(data["N"]):
            raise ValueError("coordinate list does not match N")
        entries = {}
        for idx, value in data["terms"]:
            entries[tuple(idx)] = _entry_from_json(value, table)
        return cls(table, coords, int(data["n"]), entries)

    def __repr__(self):
        body = " + ".join(f"({v})*e{''.join(map(str, k))}" for k, v in sorted(self._entries.items()))
        return f"NambuTensor(n={self.order}, N={self.dimension}: {body or '0'})"


def _entry_from_json(value, table: VariableTable) -> MultiPoly:
    if isinstance(value, int) and not isinstance(value, bool):
        return table.const(value)
    if isinstance(value, str):
        try:
            return table.const(Fraction(value))
        except ValueError:
            return table.poly(value)
    return MultiPoly.from_json(value, table)


def tensor_bracket(eta: NambuTensor, fs: Sequence[MultiPoly]) -> MultiPoly:
    """``eta(df_1, ..., df_n)`` summed over all index tuples."""
    if len(fs) != eta.order:
        raise ValueError(f"an order-{eta.order} tensor takes {eta.order} functions, got {len(fs)}")
    for f in fs:
        if isinstance(f, MultiPoly) and f.table != eta.table:
            raise VariableTableError("functions and tensor live on different tables")
    fs = [f if isinstance(f, MultiPoly) else eta.table.const(f) for f in fs]
    grads = [[f.partial(x) for x in eta.coordinates] for f in fs]
    total = eta.table.zero()
    for key, value in eta._entries.items():
        minor = det([[g[i - 1] for i in key] for g in grads])
        total = total + value * minor
    return total


def _placed(arr: np.ndarray, labels: Sequence[int], ndim: int) -> np.ndarray:
    """View of ``arr`` broadcastable over ``ndim`` axes, its axis k sitting at ``labels[k]``."""
    order = np.argsort(labels)
    moved = np.transpose(arr, order)
    shape = [1] * ndim
    for lab in labels:
        shape[lab] = arr.shape[0]
    return moved.reshape(shape)


def _s_tensor(E: np.ndarray, n: int) -> np.ndarray:
    """``S_ij`` for every pair of index tuples, axes ``(i1..in, j1..jn)``."""
    I = list(range(n))
    J = list(range(n, 2 * n))
    nd = 2 * n
    S = _placed(E, I, nd) * _placed(E, J, nd)
    # k-th term: i1 -> jn, i_k -> i1 in the first factor; (j1..j_{n-1}, i_k) in the second
    for k in range(1, n):
        first = list(I)
        first[0] = J[-1]
        first[k] = I[0]
        S = S + _placed(E, first, nd) * _placed(E, J[:-1] + [I[k]], nd)
    first = [J[-1]] + I[1:]
    S = S - _placed(E, first, nd) * _placed(E, J[:-1] + [I[0]], nd)
    return np.broadcast_to(S, (E.shape[0],) * nd)


def algebraic_constraint_residual(eta: NambuTensor) -> dict[tuple[tuple[int, ...], tuple[int, ...]], MultiPoly]:
    """Nonzero components of ``S_ij + P(S)_ij`` keyed by ``(i, j)`` (1-based).

    ``P`` swaps ``i1`` and ``j1``.  An empty result means the constraint holds
    identically.  For ``n >= 3`` this is equivalent to decomposability; for
    ``n = 2`` it reduces to the Jacobi identity of a bivector.  For ``n > 3`` the middle terms of ``S`` follow the cyclic
    pattern of the ``n = 3`` case.
    """
    n = eta.order
    table = eta.table
    if eta.is_constant():
        E, D = eta.dense_integer()
        S = _s_tensor(E, n)
        R = S + np.swapaxes(S, 0, n)
        scale = Fraction(1, D * D)
        nz = np.nonzero(R)
        consts = {int(v): table.const(int(v) * scale) for v in np.unique(R[nz])}
        out = {}
        for idx, v in zip(zip(*(a.tolist() for a in nz)), R[nz].tolist()):
            key = tuple(i + 1 for i in idx)
            out[(key[:n], key[n:])] = consts[int(v)]
        return out
    E = eta.dense()
    S = _s_tensor(E, n)
    R = S + np.swapaxes(S, 0, n)
    out = {}
    for idx in np.ndindex(R.shape):
        v = R[idx]
        if v:
            key = tuple(int(i) + 1 for i in idx)
            out[(key[:n], key[n:])] = v
    return out


def differential_constraint_residual(eta: NambuTensor) -> dict[tuple[int, ...], MultiPoly]:
    """Nonzero components of the differential constraint, keyed by ``(i2..in, j1..jn)``.

    The residual is
    ``sum_l [eta_{l i2..in} d_l eta_{j} + sum_{k>=2} eta_{jn i2..(l at k)..in} d_l eta_{j1..j_{n-1} ik}]
    - sum_l eta_{j1..j_{n-1} l} d_l eta_{jn i2..in}``.
    """
    n, N = eta.order, eta.dimension
    if eta.is_constant():
        return {}
    E = eta.dense()
    zero = eta.table.zero()
    # dE[l, a1..an] = d eta_a / d x_l
    dE = np.empty((N,) * (n + 1), dtype=object)
    for l, x in enumerate(eta.coordinates):
        for idx in np.ndindex(E.shape):
            dE[(l,) + idx] = E[idx].partial(x) if E[idx] else zero
    # axis labels: i2..in -> 0..n-2, j1..jn -> n-1..2n-2, l -> 2n-1
    I = list(range(n - 1))
    J = list(range(n - 1, 2 * n - 1))
    Lax = 2 * n - 1
    nd = 2 * n
    R = _placed(E, [Lax] + I, nd) * _placed(dE, [Lax] + J, nd)
    for k in range(2, n + 1):
        first = [J[-1]] + list(I)
        first[k - 1] = Lax
        R = R + _placed(E, first, nd) * _placed(dE, [Lax] + J[:-1] + [I[k - 2]], nd)
    R = R - _placed(E, J[:-1] + [Lax], nd) * _placed(dE, [Lax, J[-1]] + I, nd)
    R = np.broadcast_to(R, (N,) * nd).sum(axis=Lax)
    out = {}
    for idx in np.ndindex(R.shape):
        v = R[idx]
        if isinstance(v, MultiPoly) and v:
            out[tuple(int(i) + 1 for i in idx)] = v
    return out


def _contract(eta_vals: dict, n: int, A: tuple[int, ...], N: int) -> list[Fraction]:
    """Vector ``v^k = eta^{A k}``: interior product of eta with the basis (n-1)-form indexed by A."""
    v = []
    for k in range(N):
        idx = A + (k,)
        s = permutation_sign(idx)
        v.append(s * eta_vals.get(tuple(sorted(idx)), Fraction(0)) if s else Fraction(0))
    return v


def is_decomposable_oracle(eta: NambuTensor) -> bool:
    """Plücker test: ``(i_w eta) ^ eta = 0`` for every basis (n-1)-form ``w``.

    Independent of the S-constraint code path; exact rational arithmetic.
    """
    if not eta.is_constant():
        raise ValueError("the decomposability oracle needs constant tensor entries")
    n, N = eta.order, eta.dimension
    vals = {tuple(i - 1 for i in k): v.constant() for k, v in eta._entries.items()}
    if not vals:
        return True
    for A in itertools.combinations(range(N), n - 1):
        v = _contract(vals, n, A, N)
        if not any(v):
            continue
        # (v ^ eta)_K for each increasing (n+1)-tuple K
        for K in itertools.combinations(range(N), n + 1):
            total = Fraction(0)
            for s in range(n + 1):
                if v[K[s]]:
                    rest = K[:s] + K[s + 1:]
                    c = vals.get(rest)
                    if c:
                        total += (-1) ** s * v[K[s]] * c
            if total:
                return False
    return True


def random_constant_tensor(rng, N: int = 6, n: int = 3, max_nonzero: int = 20, value_range: int = 3,
                           table: VariableTable | None = None) -> NambuTensor:
    """Constant order-n tensor with a uniform number (1..max_nonzero) of nonzero components.

    Sparse draws make decomposable tensors common enough for both branches of
    a decomposability comparison to be exercised.  ``rng`` is a ``random.Random``.
    """
    table = table or VariableTable.of([f"x{i}" for i in range(1, N + 1)])
    slots = list(itertools.combinations(range(1, N + 1), n))
    k = rng.randint(1, min(max_nonzero, len(slots)))
    values = [v for v in range(-value_range, value_range + 1) if v]
    return NambuTensor(table, table.names[:N], n, {I: rng.choice(values) for I in rng.sample(slots, k)})
