import itertools
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nambuvp.forms import (
    DifferentialForm,
    FormPencil,
    det_metric3,
    ext_d,
    gindikin_check,
    hydro_compat_residual,
    krichever_closedness,
    omega3_check,
    plebanski_pencil,
    plebanski_residual,
    plebanski_two_form,
    twistor_residual,
    wedge,
    wedge_power,
)
from nambuvp.hierarchy import VpTriple, vacuum_solution
from nambuvp.symalg import MultiPoly, VariableTable, random_poly

C4 = ("x", "y", "z", "w")
T4 = VariableTable.of(C4)
PLEB = VariableTable.of("x y xt yt")


def random_form(seed, degree, table=T4, coords=C4):
    r = random.Random(seed)
    terms = {I: random_poly(table, r, 2, density=0.3) for I in itertools.combinations(range(len(coords)), degree)}
    return DifferentialForm(table, coords, degree, terms)


forms_ = st.builds(random_form, st.integers(0, 10 ** 6), st.integers(0, 3))


def d(name, c=1, table=T4, coords=C4):
    return DifferentialForm.basis(table, coords, (name,), c)


# --- algebra ---------------------------------------------------------------

def test_wedge_antisymmetry_of_differentials():
    assert wedge(d("x"), d("y")) == -wedge(d("y"), d("x"))


def test_wedge_with_function_coefficients():
    x, y = T4.vars("x y")
    assert wedge(d("y", x), d("x", y)) == DifferentialForm.basis(T4, C4, ("x", "y"), -x * y)


def test_wedge_repeated_factor_is_zero():
    T = VariableTable.of("lam p q")
    vol = DifferentialForm.basis(T, ("lam", "p", "q"), ("lam", "p", "q"))
    assert wedge(vol, vol).is_zero()


def test_wedge_beyond_dimension_is_zero_form():
    top = DifferentialForm.basis(T4, C4, C4)
    assert wedge(top, d("x")).is_zero()


def test_d_examples():
    x = T4.var("x")
    assert ext_d(d("y", x)) == DifferentialForm.basis(T4, C4, ("x", "y"))
    assert ext_d(d("x")).is_zero()


@given(forms_)
def test_d_squared_is_zero(a):
    assert ext_d(ext_d(a)).is_zero()


@given(forms_, forms_)
def test_graded_commutativity(a, b):
    sign = -1 if (a.degree * b.degree) % 2 else 1
    assert wedge(a, b) == wedge(b, a) * sign


@given(forms_, forms_)
def test_leibniz_rule(a, b):
    sign = -1 if a.degree % 2 else 1
    assert ext_d(wedge(a, b)) == wedge(ext_d(a), b) + wedge(a, ext_d(b)) * sign


def test_d_of_sum_of_exact_wedges_is_closed():
    r = random.Random(5)
    f, g, h, k = (random_poly(T4, r, 3) for _ in range(4))
    dd = lambda p: ext_d(DifferentialForm.function(p, C4))
    Omega = wedge(wedge(dd(f), dd(g)), d("w")) + wedge(wedge(dd(h), dd(k)), d("z"))
    assert ext_d(Omega).is_zero()


@given(forms_)
def test_form_json_roundtrip(a):
    assert DifferentialForm.from_json(a.to_json()) == a


def test_parameters_are_constants_for_d():
    T = VariableTable.of("x y s")
    f = DifferentialForm.function(T.poly("s*x"), ("x", "y"))
    assert ext_d(f) == DifferentialForm.basis(T, ("x", "y"), ("x",), T.var("s"))


# --- volume-preserving three-forms --------------------------------------------

@pytest.mark.parametrize("K", [1, 2, 3, 4])
def test_omega_identities_on_vacuum(K):
    tr = vacuum_solution(K)
    closed, square, thm = omega3_check(tr)
    assert closed.is_zero() and square.is_zero() and thm.is_zero()
    assert krichever_closedness(tr).is_zero()


def test_perturbed_vacuum_breaks_the_form_identity():
    tr = vacuum_solution(3)
    T = tr.table
    bad = VpTriple(tr.L, tr.M, tr.N + T.var("q") ** 2, 3)
    closed, square, thm = omega3_check(bad)
    assert not thm.is_zero()
    assert thm.component(("lam", "p", "q")) == thm.table.poly("-2*q")
    assert closed.is_zero() and square.is_zero()
    assert not krichever_closedness(bad).is_zero()


def test_theorem_residual_coefficient_is_the_volume_defect():
    # Omega - dL^dM^dN on the dlam^dp^dq component equals 1 - {L, M, N}
    tr = VpTriple.from_polys("lam", "p", "lam*q", K=1)
    thm = omega3_check(tr)[2]
    T = thm.table
    assert thm.component(("lam", "p", "q")) == T.poly("1 - lam")
    assert krichever_closedness(tr) == thm


def test_theorem_residual_zero_implies_other_residuals_zero():
    for K in (1, 2, 3):
        tr = vacuum_solution(K).shift_times({1: 2, K: -1})
        closed, square, thm = omega3_check(tr)
        assert thm.is_zero()
        assert closed.is_zero() and square.is_zero()


# --- heavenly equation ------------------------------------------------------

def test_plebanski_flat_and_family():
    assert plebanski_residual(PLEB.poly("x*xt + y*yt")) == 0
    r = random.Random(8)
    for _ in range(10):
        g = random_poly(PLEB, r, 4, names=["x", "y"])
        assert plebanski_residual(PLEB.poly("x*xt + y*yt") + g) == 0


def test_plebanski_scaled_non_solution():
    assert plebanski_residual(PLEB.poly("2*x*xt + y*yt")) == 1


def test_pencil_vanishes_on_solutions():
    for W in ("x*xt + y*yt", "x*xt + y*yt + x^2*y"):
        closed, square = plebanski_pencil(PLEB.poly(W))
        assert closed.is_zero() and square.is_zero()


def test_pencil_witness_sits_at_lambda_squared():
    closed, square = plebanski_pencil(PLEB.poly("2*x*xt + y*yt"))
    assert closed.is_zero()
    members = square.nonzero_members()
    assert [m for m, _ in members] == [(2,)]
    form = members[0][1]
    assert form.component(("x", "y", "xt", "yt")) == -2


def test_pencil_wedge_square_is_twice_the_heavenly_residual():
    r = random.Random(3)
    for _ in range(5):
        W = random_poly(PLEB, r, 3)
        _, square = plebanski_pencil(W)
        lam2 = square.members().get((2,))
        top = lam2.component(("x", "y", "xt", "yt")) if lam2 is not None else PLEB.zero()
        assert top.rebase(PLEB) == plebanski_residual(W) * -2


# --- Gindikin pencils ------------------------------------------------------

G = VariableTable.of("x y xt yt tau1 tau2")
GC = ("x", "y", "xt", "yt")


def test_gindikin_rank_one_fails_for_symplectic_pencil():
    O = DifferentialForm.basis(G, GC, ("x", "y"), G.var("tau1")) + \
        DifferentialForm.basis(G, GC, ("xt", "yt"), G.var("tau2"))
    pen = FormPencil(O, ("tau1", "tau2"))
    r1 = gindikin_check(pen, 1)
    assert not r1.passed
    sq = r1.power_residual.nonzero_members()
    assert [(m, f.component(GC)) for m, f in sq] == [((1, 1), 2)]
    r2 = gindikin_check(pen, 2)
    assert r2.passed
    assert r2.witness[0] == (1, 1) and r2.witness[2] == 2


def test_gindikin_single_term_passes():
    pen = FormPencil(DifferentialForm.basis(G, GC, ("x", "y"), G.var("tau1")), ("tau1", "tau2"))
    assert gindikin_check(pen, 1).passed


def test_gindikin_on_plebanski_pencil():
    assert gindikin_check(plebanski_two_form(PLEB.poly("x*xt + y*yt + x*y^3")), 1).passed
    assert not gindikin_check(plebanski_two_form(PLEB.poly("2*x*xt + y*yt")), 1).passed


def test_pencil_members_and_json():
    pen = plebanski_two_form(PLEB.poly("x*xt + y*yt"))
    assert sorted(pen.members()) == [(0,), (1,), (2,)]
    back = FormPencil.from_json(pen.to_json())
    assert back.form == pen.form


# --- metric ---------------------------------------------------------------

M = VariableTable.of("x1 x2 x3 f g h")
MC = ("x1", "x2", "x3")


def dm(name, c=1):
    return DifferentialForm.basis(M, MC, (name,), c)


Z = DifferentialForm.zero(M, MC, 1)


def test_metric_identity_frame():
    g = det_metric3([[dm("x1"), Z, Z], [Z, dm("x2"), Z], [Z, Z, dm("x3")]])
    assert g.terms == {(0, 1, 2): M.one()}


def test_metric_row_swap_flips_sign():
    g = det_metric3([[Z, dm("x2"), Z], [dm("x1"), Z, Z], [Z, Z, dm("x3")]])
    assert g.terms == {(0, 1, 2): -M.one()}


def test_metric_diagonal_frame():
    f, gg, h = M.vars("f g h")
    g = det_metric3([[dm("x1", f), Z, Z], [Z, dm("x2", gg), Z], [Z, Z, dm("x3", h)]])
    assert g.component(("x1", "x2", "x3")) == f * gg * h


def test_metric_equals_symmetric_determinant(rng):
    # compare with a Leibniz-formula determinant over the symmetric algebra
    for _ in range(5):
        frame = [[DifferentialForm(M, MC, 1, {(k,): rng.randint(-2, 2) for k in range(3)}) for _ in range(3)]
                 for _ in range(3)]
        g = det_metric3(frame)
        coeffs = [[np.array([float(e.component((c,)).constant()) for c in MC]) for e in row] for row in frame]
        # sum over perms of sign * e[0][p0] e[1][p1] e[2][p2], then symmetrize coefficient tensor
        tensor = np.zeros((3, 3, 3))
        for perm in itertools.permutations(range(3)):
            sign = np.linalg.det(np.eye(3)[list(perm)])
            tensor += sign * np.einsum("i,j,k->ijk", coeffs[0][perm[0]], coeffs[1][perm[1]], coeffs[2][perm[2]])
        for key in itertools.combinations_with_replacement(range(3), 3):
            expected = sum(tensor[p] for p in set(itertools.permutations(key)))
            assert float(g.terms.get(key, M.zero()).constant()) == pytest.approx(expected)


# --- hydrodynamic compatibility ----------------------------------------------

H = VariableTable.of("u x t")
u = H.var("u")


def test_hydro_equal_matrices_along_translation():
    flux, comm = hydro_compat_residual([[u]], [[u]], H.poly("x + t"))
    assert flux == [[0]] and comm == [[0]]


def test_hydro_control():
    flux, _ = hydro_compat_residual([[u]], [[u]], H.poly("x"))
    assert flux[0][0] != 0


def test_hydro_commutator_detected():
    A = [[u, H.one()], [H.zero(), u]]
    B = [[H.zero(), H.zero()], [H.one(), H.zero()]]
    _, comm = hydro_compat_residual(A, B, H.poly("x"))
    assert any(v != 0 for row in comm for v in row)


def test_hydro_burgers_on_grid():
    xs = np.linspace(-1, 1, 200)
    ts = np.linspace(0, 0.1, 200)
    sol = hydro_compat_residual([[u]], [[-u * u / 2]], lambda X, T: X / (1 + T), grid=(xs, ts))
    assert sol.flux_residual <= 1e-6 and sol.commutator_residual == 0
    ctl = hydro_compat_residual([[u]], [[u * u / 2]], lambda X, T: X / (1 + T), grid=(xs, ts))
    assert ctl.flux_residual > 1e-2


def test_hydro_dimension_mismatch():
    with pytest.raises(ValueError):
        hydro_compat_residual([[u]], [[u, u], [u, u]], H.poly("x"))


# --- twistor data ------------------------------------------------------------

def test_twistor_canonical_and_sheared():
    sheared = VpTriple.from_polys("lam", "p", "q + lam^2*p", K=1)
    assert twistor_residual(*sheared.members()) == 0
    bad = VpTriple.from_polys("lam", "2*p", "q", K=1)
    assert twistor_residual(*bad.members()) == 1
