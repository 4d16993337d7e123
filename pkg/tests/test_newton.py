import numpy as np
import pytest

from shiftconv.arith import primes_up_to
from shiftconv.newton import LaurentPoly, newton_polytope, nondegenerate_check, tilde_phase_poly


def test_polytopes():
    f = tilde_phase_poly(7, 3, 2, 5, 1)
    assert set(newton_polytope(f)) == {(1, 0), (-1, 0), (-1, 1), (0, -1)}
    g = tilde_phase_poly(7, 3, 0, 5, 1)
    assert set(newton_polytope(g)) == {(1, 0), (-1, 1), (0, -1)}
    assert newton_polytope(LaurentPoly.from_dict(7, {(1, 0): 1})) == [(1, 0)]
    with pytest.raises(ValueError):
        newton_polytope(LaurentPoly.from_dict(7, {(1, 0): 7}))


def test_monomial_face():
    r = nondegenerate_check(LaurentPoly.from_dict(7, {(1, 0): 3}))
    assert r.nondegenerate and r.faces[0].method == "monomial"


def test_phase_polynomial_face_counts_p7():
    r = nondegenerate_check(tilde_phase_poly(7, 3, 2, 5, 1))
    assert r.nondegenerate and len(r.faces) == 8 and r.field_level == "exact"
    r = nondegenerate_check(tilde_phase_poly(7, 3, 7, 5, 1))
    assert r.nondegenerate and len(r.faces) == 6


def test_degenerate_binomial_found():
    # on the edge (1,1)-(6,1), x f_x = y f_y = xy(1 + 2x^5) in characteristic 5
    f = LaurentPoly.from_dict(5, {(1, 1): 1, (6, 1): 2})
    r = nondegenerate_check(f)
    assert not r.nondegenerate and r.witness is not None


def test_trinomial_face_brute_force():
    f = LaurentPoly.from_dict(5, {(1, 0): 1, (0, 1): 1, (1, 1): 1, (2, 0): 0})
    r = nondegenerate_check(f)
    assert r.field_level in ("exact", "F_p", "F_p^2")


def test_random_in_contract_parameters():
    rng = np.random.default_rng(11)
    for p in primes_up_to(100)[1:]:
        r1h, r2, r3n2 = (int(v) for v in rng.integers(1, p, size=3))
        w = int(rng.integers(1, p))
        assert len(nondegenerate_check(tilde_phase_poly(p, r1h, w, r2, r3n2)).faces) == 8
        assert len(nondegenerate_check(tilde_phase_poly(p, r1h, 0, r2, r3n2)).faces) == 6
