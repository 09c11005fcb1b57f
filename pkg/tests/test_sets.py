import numpy as np
import pytest

from aamr import (AffineSubspace, Ball, Box, Diagonal, DimensionMismatchError,
                  Halfspace, Hyperplane, LinearSubspace, NoOracleError,
                  ProblemFormatError, ProductSet, Translate, dump_problem,
                  full_space, load_problem, project,
                  project_intersection_oracle, zero_subspace)
from conftest import VARIANTS, make_variant, scaled_set, shifted_set


def norm(v):
    return float(np.linalg.norm(v))


# --- example projections -----------------------------------------------------

def test_ball_interior_point_is_fixed():
    ball = Ball((1.0, 1.0), 1.0)
    assert np.array_equal(project(ball, [1.0, 1.0]), [1.0, 1.0])


def test_ball_exterior_matches_radial_formula():
    ball = Ball((1.0, 1.0), 1.0)
    x = np.array([1.0, -1.0])
    # independent route: center + radius * (x - center)/|x - center|
    expected = np.array([1.0, 1.0]) + 1.0 * (x - [1.0, 1.0]) / 2.0
    got = project(ball, x)
    assert np.allclose(got, expected, atol=1e-15)
    assert np.allclose(got, [1.0, 0.0], atol=1e-15)


def test_ball_degenerate_radius_and_center():
    point = Ball((2.0, 3.0), 0.0)
    assert np.allclose(project(point, [5.0, 5.0]), [2.0, 3.0])
    ball = Ball((1.0, 1.0), 2.0)
    assert np.array_equal(project(ball, [1.0, 1.0]), [1.0, 1.0])


def test_subspace_coordinate_projection():
    line = LinearSubspace([[1.0], [0.0]])
    assert np.allclose(project(line, [3.0, 4.0]), [3.0, 0.0])


def test_halfspace_projection_formula():
    hs = Halfspace([1.0, 0.0], 0.0)
    # x - max(0, <a,x> - b) a/|a|^2 gives (0, 3)
    assert np.allclose(project(hs, [2.0, 3.0]), [0.0, 3.0])
    assert np.array_equal(project(hs, [-2.0, 3.0]), [-2.0, 3.0])


def test_hyperplane_projects_both_sides():
    hp = Hyperplane([0.0, 2.0], 2.0)
    assert np.allclose(project(hp, [5.0, 7.0]), [5.0, 1.0])
    assert np.allclose(project(hp, [5.0, -7.0]), [5.0, 1.0])


def test_box_clamps():
    box = Box([0.0, 0.0], [1.0, 2.0])
    assert np.allclose(project(box, [-1.0, 3.0]), [0.0, 2.0])


def test_translate_algebraic_identity():
    rng = np.random.default_rng(0)
    inner = Ball(rng.standard_normal(3), 1.2)
    shift = rng.standard_normal(3)
    moved = Translate(inner, shift)
    for _ in range(20):
        x = 3 * rng.standard_normal(3)
        assert np.array_equal(moved.project(x), inner.project(x + shift) - shift)


def test_product_and_diagonal_shapes():
    prod = ProductSet([Box([0.0], [1.0]), Ball([0.0, 0.0], 1.0)])
    assert prod.dim == 3
    out = project(prod, [2.0, 3.0, 4.0])
    assert np.allclose(out[:1], [1.0])
    assert np.allclose(out[1:], np.array([3.0, 4.0]) / 5.0)

    diag = Diagonal(3, 2)
    z = np.array([1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
    got = project(diag, z)
    assert np.allclose(got, np.tile([3.0, 4.0], 3))


def test_construction_rejects_degenerate_descriptions():
    with pytest.raises(ValueError):
        Ball((0.0, 0.0), -1.0)
    with pytest.raises(ValueError):
        Halfspace([0.0, 0.0], 1.0)
    with pytest.raises(ValueError):
        Hyperplane([0.0, 0.0, 0.0], 0.0)
    with pytest.raises(ValueError):
        Box([0.0, 1.0], [1.0, 0.0])
    with pytest.raises(ValueError):
        ProductSet([])
    with pytest.raises(ValueError):
        Diagonal(0, 3)


def test_dimension_mismatch_raises():
    ball = Ball((0.0, 0.0), 1.0)
    with pytest.raises(DimensionMismatchError):
        project(ball, [1.0, 2.0, 3.0])


# --- projector identities over all variants ----------------------------------

def _variant_instances(samples_per_variant=4, n=5, seed=123):
    rng = np.random.default_rng(seed)
    for kind in VARIANTS:
        for _ in range(samples_per_variant):
            point = rng.standard_normal(n)
            yield make_variant(kind, rng, n, point), rng


def test_idempotence_and_firm_nonexpansiveness():
    rng = np.random.default_rng(7)
    for kind in VARIANTS:
        count = 0
        for _ in range(10):
            s = make_variant(kind, rng, 5, rng.standard_normal(5))
            for _ in range(100):
                x = 4 * rng.standard_normal(5)
                y = 4 * rng.standard_normal(5)
                px, py = s.project(x), s.project(y)
                assert norm(s.project(px) - px) <= 1e-10 * (1 + norm(x))
                assert (x - y) @ (px - py) >= norm(px - py) ** 2 - 1e-10
                count += 1
        assert count >= 1000


def test_ray_invariance():
    rng = np.random.default_rng(8)
    for s, _ in _variant_instances(seed=8):
        for _ in range(5):
            x = 4 * rng.standard_normal(s.dim)
            px = s.project(x)
            for lam in (0.0, 0.5, 1.0, 2.0, 10.0):
                back = s.project(px + lam * (x - px))
                assert norm(back - px) <= 1e-10 * (1 + norm(x))


def test_translation_identity_concrete_sets():
    rng = np.random.default_rng(9)
    for s, _ in _variant_instances(seed=9):
        y = rng.standard_normal(s.dim)
        moved = shifted_set(s, y)
        for _ in range(5):
            x = 4 * rng.standard_normal(s.dim)
            assert norm(moved.project(x) - (y + s.project(x - y))) <= 1e-10


def test_scaling_identity_concrete_sets():
    rng = np.random.default_rng(10)
    for s, _ in _variant_instances(seed=10):
        for lam in (-2.0, -1.0, 0.5, 3.0):
            scaled = scaled_set(s, lam)
            for _ in range(4):
                x = 3 * rng.standard_normal(s.dim)
                assert norm(scaled.project(lam * x) - lam * s.project(x)) <= 1e-10


def _grid_argmin(candidates, x):
    d = np.linalg.norm(candidates - x, axis=1)
    return candidates[int(np.argmin(d))], float(d.min())


def test_product_projection_against_grid_search():
    box = Box([-1.0, -1.0], [1.0, 1.0])
    ball = Ball([0.5, 0.0], 1.0)
    prod = ProductSet([box, ball])
    lin = np.linspace(-1.6, 1.6, 33)
    mesh = np.stack(np.meshgrid(lin, lin), axis=-1).reshape(-1, 2)
    cand_box = mesh[np.all(np.abs(mesh) <= 1.0, axis=1)]
    cand_ball = mesh[np.linalg.norm(mesh - [0.5, 0.0], axis=1) <= 1.0]
    joint = np.concatenate(
        [np.repeat(cand_box, len(cand_ball), axis=0),
         np.tile(cand_ball, (len(cand_box), 1))], axis=1)
    rng = np.random.default_rng(11)
    for _ in range(5):
        x = 3 * rng.standard_normal(4)
        best, _ = _grid_argmin(joint, x)
        got = prod.project(x)
        assert norm(got - best) <= 0.2  # grid resolution
        assert norm(x - got) <= norm(x - best) + 1e-12


def test_diagonal_projection_against_grid_search():
    diag = Diagonal(3, 2)
    lin = np.linspace(-2.0, 2.0, 41)
    base = np.stack(np.meshgrid(lin, lin), axis=-1).reshape(-1, 2)
    candidates = np.tile(base, (1, 3))
    rng = np.random.default_rng(12)
    for _ in range(5):
        x = rng.standard_normal(6)
        best, _ = _grid_argmin(candidates, x)
        got = diag.project(x)
        assert norm(got - best) <= 0.15
        assert norm(x - got) <= norm(x - best) + 1e-12


# --- intersection oracle ------------------------------------------------------

def test_oracle_boxes():
    boxes = [Box([0.0, 0.0], [2.0, 2.0]), Box([1.0, 1.0], [3.0, 3.0])]
    assert np.allclose(project_intersection_oracle(boxes, [0.0, 0.0]), [1.0, 1.0])


def test_oracle_two_subspaces():
    u = LinearSubspace(np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]))
    v = LinearSubspace(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    got = project_intersection_oracle([u, v], [1.0, 2.0, 3.0])
    assert np.allclose(got, [0.0, 2.0, 0.0], atol=1e-12)


def test_oracle_single_set_reduces_to_projection():
    ball = Ball([0.0, 1.0], 0.5)
    x = np.array([2.0, 1.0])
    assert np.allclose(project_intersection_oracle([ball], x), ball.project(x))


def test_oracle_affine_family_variational_inequality():
    rng = np.random.default_rng(13)
    n = 6
    y = rng.standard_normal(n)
    fams = [AffineSubspace(y, rng.standard_normal((n, 4))),
            AffineSubspace(y, rng.standard_normal((n, 4))),
            Hyperplane(rng.standard_normal(n), 0.0)]
    fams[2] = Hyperplane(fams[2].normal, float(fams[2].normal @ y))
    x = 5 * rng.standard_normal(n)
    p = project_intersection_oracle(fams, x)
    for s in fams:
        assert s.distance(p) <= 1e-8
    # optimality: <c - p, x - p> <= 0 for members c of the intersection;
    # sample members by projecting random points through the oracle
    for _ in range(50):
        c = project_intersection_oracle(fams, 5 * rng.standard_normal(n))
        assert (c - p) @ (x - p) <= 1e-8


def test_oracle_rejects_unsupported_family():
    with pytest.raises(NoOracleError):
        project_intersection_oracle([Ball([0.0], 1.0), Box([0.0], [1.0])], [0.5])


def test_oracle_empty_box_intersection():
    with pytest.raises(ValueError):
        project_intersection_oracle(
            [Box([0.0], [1.0]), Box([2.0], [3.0])], [0.5])


# --- problem files ------------------------------------------------------------

def test_load_problem_all_spec_types(tmp_path):
    doc = {
        "dim": 2,
        "sets": [
            {"type": "ball", "center": [1.0, 1.0], "radius": 1.0},
            {"type": "subspace", "basis": [[1.0, 0.0]]},
            {"type": "halfspace", "a": [1.0, 0.0], "b": 0.5},
            {"type": "box", "lower": [0.0, 0.0], "upper": [1.0, 1.0]},
        ],
    }
    path = tmp_path / "problem.json"
    path.write_text(__import__("json").dumps(doc))
    dim, sets = load_problem(path)
    assert dim == 2
    assert [type(s) for s in sets] == [Ball, LinearSubspace, Halfspace, Box]
    assert sets[1].rank == 1
    # round trip
    again = dump_problem(dim, sets)
    dim2, sets2 = load_problem(again)
    assert dim2 == 2 and len(sets2) == 4


def test_load_problem_diagnostics_name_fields():
    with pytest.raises(ProblemFormatError, match=r"sets\[0\]\.radius"):
        load_problem({"dim": 2, "sets": [{"type": "ball", "center": [0, 0]}]})
    with pytest.raises(ProblemFormatError, match=r"sets\[0\]\.center"):
        load_problem({"dim": 2, "sets": [{"type": "ball", "center": [0], "radius": 1}]})
    with pytest.raises(ProblemFormatError, match=r"sets\[1\]\.basis\[0\]"):
        load_problem({"dim": 2, "sets": [
            {"type": "box", "lower": [0, 0], "upper": [1, 1]},
            {"type": "subspace", "basis": [[1.0, 0.0, 9.0]]}]})
    with pytest.raises(ProblemFormatError, match="dim"):
        load_problem({"dim": -2, "sets": [{"type": "ball", "center": [0], "radius": 1}]})
    with pytest.raises(ProblemFormatError, match="type"):
        load_problem({"dim": 1, "sets": [{"type": "pyramid"}]})
    with pytest.raises(ProblemFormatError, match=r"sets\[0\]"):
        load_problem({"dim": 2, "sets": [{"type": "ball", "center": [0.0, 0.0],
                                          "radius": -3.0}]})


def test_full_and_zero_subspace_helpers():
    assert np.array_equal(project(full_space(3), [1.0, 2.0, 3.0]), [1.0, 2.0, 3.0])
    assert np.array_equal(project(zero_subspace(3), [1.0, 2.0, 3.0]), [0.0, 0.0, 0.0])
