import math

import numpy as np
import pytest

from flagflows.config import IndexOrder, NotLoxodromic
from flagflows.flows import Flag_apply
from flagflows.reps import (
    JordanData,
    SurfaceGroupRep,
    boundary_vector,
    bulge_deform,
    circular_gap,
    contragredient,
    fixed_flags,
    fuchsian_genus2,
    jordan_projection,
    loxodromic_eigensystem,
    mobius_theta,
    positively_oriented,
    root_length,
    sym_matrix,
    sym_power,
    theta_of_vector,
)


def sl2_length(m):
    return 2.0 * math.acosh(abs(np.trace(m)) / 2.0)


def test_boundary_vector_roundtrip():
    for theta in np.linspace(0.01, 2 * math.pi - 0.01, 17):
        assert abs(theta_of_vector(boundary_vector(theta)) - theta) < 1e-12


def test_circular_order_predicates():
    assert positively_oriented(0.1, 1.0, 2.0)
    assert not positively_oriented(0.1, 2.0, 1.0)
    assert abs(circular_gap(6.0, 0.5) - (0.5 + 2 * math.pi - 6.0)) < 1e-12


def test_mobius_action_matches_matrix_action():
    rng = np.random.default_rng(0)
    for _ in range(10):
        m = rng.standard_normal((2, 2))
        m /= math.sqrt(abs(np.linalg.det(m)))
        theta = rng.uniform(0, 2 * math.pi)
        moved = mobius_theta(m, theta)
        v = m @ boundary_vector(theta)
        assert abs(circular_gap(theta_of_vector(v), moved)) < 1e-9 \
            or abs(circular_gap(moved, theta_of_vector(v))) < 1e-9


def test_fuchsian_genus2_is_a_representation(reference):
    rel = reference.matrix(reference.presentation.relator())
    assert min(np.linalg.norm(rel - np.eye(2)), np.linalg.norm(rel + np.eye(2))) < 1e-8
    # regular-octagon side pairing: all four generators share the trace
    # of the hyperbolic translation between opposite sides
    for m in reference.images.values():
        assert abs(abs(np.trace(m)) - (2.0 + math.sqrt(2.0))) < 1e-10
    reference.check_loxodromy(3)


def test_sym_matrix_on_diagonal_input():
    lam = 1.7
    d = sym_matrix(np.diag([lam, 1 / lam]), 4)
    want = np.diag([lam**3, lam, lam**-1, lam**-3])
    assert np.allclose(d, want, atol=1e-12)


def test_sym_matrix_is_a_homomorphism():
    rng = np.random.default_rng(1)
    def random_sl2():
        a = rng.standard_normal((2, 2))
        if np.linalg.det(a) < 0:
            a = a[:, ::-1].copy()
        return a / math.sqrt(np.linalg.det(a))

    for m in (3, 5):
        a = random_sl2()
        b = random_sl2()
        left = sym_matrix(a @ b, m)
        right = sym_matrix(a, m) @ sym_matrix(b, m)
        assert np.allclose(left, np.sign(np.trace(left @ right.T)) * right, atol=1e-9)


def test_jordan_projection_of_symmetric_power(reference):
    rep3 = sym_power(reference, 3)
    for text in ("a1", "a1 b1", "a2 B1 a1"):
        w = reference.presentation.parse_word(text)
        t = sl2_length(reference.matrix(w))
        jd = jordan_projection(rep3.matrix(w), rep3.matrix(w.inverse()))
        assert np.allclose(jd.log_moduli, [t, 0.0, -t], atol=1e-9)
        assert abs(root_length(jd, 1, 3) - 2 * t) < 1e-9
        assert abs(root_length(jd, 1, 2) - t) < 1e-9


def test_jordan_projection_inverse_refinement_is_consistent(reference):
    rep3 = sym_power(reference, 3)
    w = reference.presentation.parse_word("a1 b1 a2")
    g = rep3.matrix(w)
    plain = jordan_projection(g)
    refined = jordan_projection(g, rep3.matrix(w.inverse()))
    assert np.allclose(plain.log_moduli, refined.log_moduli, atol=1e-8)


def test_jordan_data_validation():
    with pytest.raises(ValueError):
        JordanData((0.0, 1.0, -1.0))
    with pytest.raises(ValueError):
        JordanData((2.0, 0.0, -1.0))
    with pytest.raises(IndexOrder):
        root_length(JordanData((1.0, 0.0, -1.0)), 2, 1)


def test_loxodromic_eigensystem_sorting_and_rejection():
    vals, vecs = loxodromic_eigensystem(np.diag([3.0, 1.0, 1 / 3.0]))
    assert list(np.abs(vals)) == sorted(np.abs(vals), reverse=True)
    assert np.allclose(np.abs(vecs), np.eye(3), atol=1e-12)
    rot = np.array([[0.0, -1.0], [1.0, 0.0]])
    with pytest.raises(NotLoxodromic):
        loxodromic_eigensystem(rot)


def test_fixed_flags_are_invariant(reference):
    rep3 = sym_power(reference, 3)
    g = rep3.matrix(reference.presentation.parse_word("a1 b2"))
    attract, repel = fixed_flags(g)
    moved = Flag_apply(g, attract)
    for k in (1, 2):
        assert attract[k].principal_angle(moved[k]) < 1e-8
    assert attract[1].principal_angle(repel[1]) > 0.01


def test_contragredient_is_an_involution(reference):
    rep3 = sym_power(reference, 3)
    back = contragredient(contragredient(rep3))
    for k in rep3.images:
        assert np.allclose(back.images[k], rep3.images[k], atol=1e-10)


def test_bulge_deform_keeps_the_relator(reference):
    rep3 = sym_power(reference, 3)
    for s in (0.3, 0.7):
        bulged = bulge_deform(rep3, s)
        rel = bulged.matrix(bulged.presentation.relator())
        assert min(np.linalg.norm(rel - np.eye(3)),
                   np.linalg.norm(rel + np.eye(3))) < 1e-7
        # the separating element keeps its eigenvalues
        c_word = [1, 2, -1, -2]
        assert np.allclose(
            np.sort(np.abs(np.linalg.eigvals(bulged.matrix(c_word)))),
            np.sort(np.abs(np.linalg.eigvals(rep3.matrix(c_word)))),
            rtol=1e-9,
        )
    assert bulge_deform(rep3, 0.0) is rep3


def test_rep_serialization_roundtrip(reference):
    rep3 = sym_power(reference, 3)
    back = SurfaceGroupRep.from_dict(rep3.to_dict())
    for k in rep3.images:
        assert np.allclose(back.images[k], rep3.images[k], atol=1e-14)


def test_rep_rejects_non_unimodular_images(reference):
    images = {k: 2.0 * v for k, v in reference.images.items()}
    with pytest.raises(ValueError):
        SurfaceGroupRep(reference.presentation, 2, images)
