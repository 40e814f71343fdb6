import numpy as np
import pytest

from rqet import (DomainError, InputError, ScalarSignTable,
                  analytic_pade_phases, canonicalize_angles,
                  check_flattened_structure, chebyshev_reflection_phases,
                  coherent_perturb, complexity_estimate, compose_phases,
                  dilate_hermitian, distinct_nonzero_angles, error_bound,
                  extract, flatten_sign_phases, matrix_sign, operator_norm,
                  pade, poly_eval, qet_assemble, qet_recursive_step,
                  query_count, recovery_cost, run_sign, scalar_sign_iterate,
                  sign_iterations)
from rqet.qet import plan_from_phases, scalar_grid, template_daggers
from conftest import hermitian_with_spectrum


@pytest.fixture
def gapped8():
    vals = [0.52, -0.61, 0.7, -0.8, 0.88, -0.95, 0.99, -0.55]
    return hermitian_with_spectrum(42, vals)


def test_template_daggers_pattern():
    assert list(template_daggers(5)) == [False, True, False, True, False]
    assert list(template_daggers(4)) == [True, False, True, False]


def test_plan_rejects_empty():
    with pytest.raises(InputError):
        plan_from_phases(np.array([]))


@pytest.mark.parametrize("q", [2, 3, 4, 5, 6, 7])
def test_chebyshev_operator_oracle(q):
    # trivial phase lists must reproduce Chebyshev matrix polynomials,
    # pinning the product-order and dagger conventions
    A, Q = hermitian_with_spectrum(q, [0.9, -0.3, 0.45, -0.7])
    be = dilate_hermitian(A)
    U = qet_assemble(be, chebyshev_reflection_phases(q))
    X = U[:4, :4]
    w = np.array([0.9, -0.3, 0.45, -0.7])
    ref = (Q * np.cos(q * np.arccos(w))[None, :]) @ Q.conj().T
    assert operator_norm(X - ref) < 1e-10


def test_single_level_matches_polynomial(gapped8):
    A, Q = gapped8
    be = dilate_hermitian(A)
    X = extract(qet_recursive_step(be, analytic_pade_phases(2)))
    w, V = np.linalg.eigh(A)
    ref = (V * np.real(poly_eval(pade(2), w))[None, :]) @ V.conj().T
    assert operator_norm(X - ref) < 1e-11


def test_compose_associative_and_faithful():
    base = analytic_pade_phases(2)
    c2 = compose_phases(base, base)
    c3a = compose_phases(c2, base)
    c3b = compose_phases(base, c2)
    A, _ = hermitian_with_spectrum(11, [0.6, -0.75])
    be = dilate_hermitian(A)
    Ua = qet_assemble(be, c3a)
    Ub = qet_assemble(be, c3b)
    nested = qet_recursive_step(qet_recursive_step(qet_recursive_step(be, base), base), base)
    assert operator_norm(Ua - nested.unitary) < 1e-12
    assert operator_norm(Ub - nested.unitary) < 1e-12


def test_compose_scalar_against_iterate():
    base = analytic_pade_phases(2)
    flat = compose_phases(base, base)
    from rqet import reflection_upper_left
    xs = np.linspace(-1, 1, 41)
    f = reflection_upper_left(flat, xs)
    ref = np.array([scalar_sign_iterate(float(x), 2, 2) for x in xs])
    assert np.abs(f - ref).max() < 1e-12


def test_flattened_length_and_query_count():
    for n in (1, 2, 3, 4):
        flat = flatten_sign_phases(2, n)
        assert len(flat) == 5 ** n
        assert query_count(n, 2) == 5 ** n
    assert query_count(0, 2) == 1
    assert query_count(3, 4) == 9 ** 3


@pytest.mark.parametrize("n", [2, 3, 4])
def test_eight_angle_structure(n):
    base = analytic_pade_phases(2)
    flat = flatten_sign_phases(2, n)
    assert distinct_nonzero_angles(flat) <= 8
    # every nonzero angle comes from the base list up to sign
    allowed = canonicalize_angles(np.concatenate((base, -base)))
    allowed = np.concatenate((allowed, [0.0]))
    vals = canonicalize_angles(flat)
    for v in vals:
        assert np.abs(allowed - v).min() < 1e-9
    assert check_flattened_structure(flat, base)


def test_structure_rejects_shuffled_list():
    base = analytic_pade_phases(2)
    flat = flatten_sign_phases(2, 2).copy()
    flat[3], flat[4] = flat[4], flat[3]
    assert not check_flattened_structure(flat, base)


def test_sign_iterations_reference_values():
    assert sign_iterations(0.1, 1e-10, 2) == 8
    assert sign_iterations(0.5, 1e-8, 2) == 4
    assert sign_iterations(0.5, 0.99, 2) == 0
    assert sign_iterations(0.9, 2.0, 2) == 0


def test_sign_iterations_guards():
    with pytest.raises(DomainError):
        sign_iterations(0.0, 1e-8)
    with pytest.raises(DomainError):
        sign_iterations(1.5, 1e-8)
    with pytest.raises(DomainError):
        sign_iterations(0.5, 0.0)


def test_error_bound_monotone():
    b = [error_bound(0.5, n) for n in range(5)]
    assert all(x > y for x, y in zip(b, b[1:]))
    assert b[0] == 0.75


def test_complexity_estimate_exponent():
    bound, nu = complexity_estimate(0.1, 1e-10, 2)
    assert abs(nu - np.log(5.0) / np.log(3.0)) < 1e-15
    # gap exponent 2*nu is below the square-root-free baseline of 2
    assert 1.0 < nu < 2.0
    assert bound > 0


def test_recovery_cost_exact_integers():
    assert recovery_cost(2, 8, 1) == 16384
    assert recovery_cost(0, 8, 1) == 1
    assert recovery_cost(3, 8, 2) == 2 ** 3 * 8 ** 9 * 2
    with pytest.raises(InputError):
        recovery_cost(-1)


def test_scalar_grid_contents():
    g = scalar_grid(0.1)
    assert len(g) == 21
    assert g.min() == -1.0 and g.max() == 1.0
    assert np.abs(g).min() >= 0.1 - 1e-15


def test_run_sign_modes_agree(gapped8):
    A, _ = gapped8
    be_r, rep_r = run_sign(A, 0.5, 1e-8, mode="recursive")
    be_f, rep_f = run_sign(A, 0.5, 1e-8, mode="flattened")
    tab, rep_s = run_sign(A, 0.5, 1e-8, mode="scalar")
    assert operator_norm(be_r.unitary - be_f.unitary) < 1e-9
    assert rep_r.rows[-1].n == rep_f.rows[-1].n == rep_s.rows[-1].n == 4
    assert rep_r.converged and rep_f.converged and rep_s.converged
    assert isinstance(tab, ScalarSignTable)
    for rr, rf in zip(rep_r.rows, rep_f.rows):
        assert abs(rr.error - rf.error) < 1e-9
        assert rr.queries == rf.queries


def test_run_sign_errors_below_bounds(gapped8):
    A, _ = gapped8
    _, rep = run_sign(A, 0.5, 1e-8, mode="recursive")
    for row in rep.rows:
        assert row.error <= row.bound


def test_run_sign_rejects_bad_gap(gapped8):
    A, _ = gapped8
    with pytest.raises(DomainError):
        run_sign(A, 0.75, 1e-8)


def test_run_sign_depth_cap(gapped8):
    A, _ = gapped8
    with pytest.raises(DomainError):
        run_sign(A, 0.5, 1e-14, mode="recursive")
    # scalar mode has no cap
    _, rep = run_sign(A, 0.5, 1e-14, mode="scalar")
    assert rep.rows[-1].n == 5


def test_run_sign_zero_levels(gapped8):
    A, _ = gapped8
    be, rep = run_sign(A, 0.5, 0.999, mode="recursive")
    assert rep.rows[-1].n == 0
    assert rep.rows[-1].queries == 1
    assert operator_norm(extract(be) - A) < 1e-12


def test_report_csv_format(gapped8):
    A, _ = gapped8
    _, rep = run_sign(A, 0.5, 1e-4, mode="recursive")
    lines = rep.to_csv().strip().split("\n")
    assert lines[0] == "n,error,bound,queries,distinct_angles,wall_time_ms"
    first = lines[1].split(",")
    assert first[0] == "1" and first[3] == "5"
    float(first[1]); float(first[2]); float(first[5])


def test_scalar_headline_regime():
    # the small-gap regime runs only in scalar mode: 5^8 phases
    _, rep = run_sign(np.diag([0.5, -0.5]).astype(complex), 0.1, 1e-10, mode="scalar")
    assert rep.rows[-1].n == 8
    assert rep.rows[-1].queries == 390625
    assert rep.final_error <= 1e-10


def test_coherent_perturb_first_order():
    base = analytic_pade_phases(2)
    A, _ = hermitian_with_spectrum(23, [0.55, -0.7, 0.9])
    be = dilate_hermitian(A)
    ref = qet_assemble(be, base)
    errs = []
    for d in (1e-3, 5e-4, 2.5e-4):
        U = qet_assemble(be, coherent_perturb(base, d))
        errs.append(operator_norm(U - ref))
    assert 1.8 <= errs[0] / errs[1] <= 2.2
    assert 1.8 <= errs[1] / errs[2] <= 2.2


def test_coherent_perturb_no_wraparound():
    phases = np.array([np.pi - 1e-12, -np.pi + 1e-12])
    out = coherent_perturb(phases, 1e-3)
    # scaling must not be folded back into the principal interval
    assert out[0] > np.pi


def test_scalar_sign_iterate_matches_numpy_iteration():
    x = 0.3
    y = x
    p = pade(2)
    for _ in range(3):
        y = float(np.real(poly_eval(p, y)))
    assert scalar_sign_iterate(0.3, 2, 3) == y
    assert abs(scalar_sign_iterate(0.3, 2, 1) - 0.52966125) < 1e-15
