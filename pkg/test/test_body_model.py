import dataclasses

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from services.body.body_model import (
    BodyParams, bone_lengths, default_template, forward, height, pose_joints, rest_bone_lengths, shape_blend,
    stature_beta, uniform_scale_beta, uniform_scale_beta_tangent,
)
from services.errors import TooFewVertices
from services.io.documents import load_template, save_template
from test.conftest import make_upright


# Template construction
def test_default_template_shapes(template):
    assert template.num_joints == 24
    assert template.num_vertices == 445
    assert template.template_vertices.shape == (445, 3)
    assert template.skin_weights.shape == (445, 24)
    assert template.joint_regressor.shape == (24, 445)
    assert template.shape_dirs.shape == (445, 3, 10)
    assert template.parents[0] == -1
    assert all(template.parents[j] < j for j in range(1, 24))


def test_template_weights_are_convex(template):
    assert np.all(template.skin_weights >= 0)
    np.testing.assert_allclose(template.skin_weights.sum(axis=1), 1.0, atol=1e-12)
    assert np.all(template.joint_regressor >= 0)
    np.testing.assert_allclose(template.joint_regressor.sum(axis=1), 1.0, atol=1e-15)


def test_default_template_is_deterministic(template):
    again = default_template()
    np.testing.assert_array_equal(again.template_vertices, template.template_vertices)
    np.testing.assert_array_equal(again.skin_weights, template.skin_weights)
    np.testing.assert_array_equal(again.shape_dirs, template.shape_dirs)


def test_pelvis_is_at_the_origin(template):
    _, joints = shape_blend(template, np.zeros(10))
    np.testing.assert_allclose(joints[0], 0.0, atol=1e-12)


@pytest.mark.parametrize("count", [0, 71])
def test_too_few_vertices(count):
    with pytest.raises(TooFewVertices):
        default_template(count)


def test_minimum_vertex_count_is_accepted():
    tpl = default_template(72)
    assert tpl.num_vertices == 72
    assert height(tpl, np.zeros(10)) == pytest.approx(1.70, abs=1e-6)


# Parameters
def test_body_params_vector_layout():
    x = np.arange(85, dtype=float) / 100.0
    params = BodyParams.from_vector(x)
    np.testing.assert_array_equal(params.beta, x[69:79])
    np.testing.assert_array_equal(params.transl, x[82:85])
    np.testing.assert_array_equal(params.to_vector(), x)


def test_body_params_rejects_long_rotations():
    with pytest.raises(ValueError):
        BodyParams.zeros().replace(root_orient=np.array([2 * np.pi, 0.0, 0.0]))


def test_body_params_rejects_wrong_sizes_and_nan():
    with pytest.raises(ValueError):
        BodyParams.zeros().replace(beta=np.zeros(9))
    with pytest.raises(ValueError):
        BodyParams.zeros().replace(transl=np.array([0.0, np.nan, 1.0]))


# Shape blending
def test_shape_blend_zero_is_template(template):
    vertices, joints = shape_blend(template, np.zeros(10))
    np.testing.assert_array_equal(vertices, template.template_vertices)
    np.testing.assert_allclose(joints, template.joint_regressor @ template.template_vertices)


def test_shape_blend_is_linear(template):
    rng = np.random.default_rng(2)
    b1, b2 = rng.normal(size=10), rng.normal(size=10)
    v12, _ = shape_blend(template, b1 + b2)
    v1, _ = shape_blend(template, b1)
    v2, _ = shape_blend(template, b2)
    np.testing.assert_allclose(v12, v1 + v2 - template.template_vertices, atol=1e-12)


# Height
def test_neutral_height(template):
    assert height(template, np.zeros(10)) == pytest.approx(1.70, abs=1e-6)


@pytest.mark.parametrize("b0", [-3.0, -1.0, 1.0, 2.5])
def test_height_gain_per_stature_unit(template, b0):
    beta = np.zeros(10)
    beta[0] = b0
    assert height(template, beta) == pytest.approx(1.70 + 0.07 * b0, abs=1e-9)


def test_height_is_monotone_in_stature(template):
    heights = []
    for b0 in np.linspace(-3, 3, 121):
        beta = np.zeros(10)
        beta[0] = b0
        heights.append(height(template, beta))
    assert np.all(np.diff(heights) > 0)


@pytest.mark.parametrize("k", range(1, 10))
def test_other_shape_directions_keep_height(template, k):
    for value in (-3.0, 3.0):
        beta = np.zeros(10)
        beta[k] = value
        assert abs(height(template, beta) - 1.70) < 1e-3


def test_stature_beta_hits_height_ratio(template):
    beta = np.random.default_rng(4).normal(0.0, 0.5, 10)
    for factor in (0.9, 1.05, 1.2):
        assert height(template, stature_beta(beta, factor)) == pytest.approx(factor * height(template, beta),
                                                                          rel=1e-12)
        assert np.array_equal(stature_beta(beta, factor)[1:], beta[1:])


def test_uniform_scale_beta_scales_the_rest_body_exactly(template):
    beta = np.random.default_rng(5).normal(0.0, 0.8, 10)
    rest, _ = shape_blend(template, beta)
    for factor in (0.8, 1.1, 2.0):
        scaled, _ = shape_blend(template, uniform_scale_beta(beta, factor))
        np.testing.assert_allclose(scaled, factor * rest, atol=1e-12)


def test_uniform_scale_beta_tangent_matches_difference(template):
    beta = np.random.default_rng(6).normal(size=10)
    h = 1e-6
    numeric = (uniform_scale_beta(beta, 1 + h) - uniform_scale_beta(beta, 1 - h)) / (2 * h)
    np.testing.assert_allclose(uniform_scale_beta_tangent(beta), numeric, rtol=1e-6, atol=1e-6)


# Forward kinematics and skinning
def test_rest_pose_forward_is_template(template):
    state = forward(template, BodyParams.zeros())
    np.testing.assert_allclose(state.vertices, template.template_vertices, atol=1e-12)
    np.testing.assert_allclose(state.joints, template.joint_regressor @ template.template_vertices, atol=1e-12)


def test_translation_shifts_every_output(template):
    base = make_upright(1)
    at_origin = forward(template, base.replace(transl=np.zeros(3)))
    moved = forward(template, base.replace(transl=np.array([0.0, 0.0, 5.0])))
    np.testing.assert_array_equal(moved.joints, at_origin.joints + [0.0, 0.0, 5.0])
    np.testing.assert_array_equal(moved.vertices, at_origin.vertices + [0.0, 0.0, 5.0])


def test_root_rotation_rotates_every_output(template):
    base = make_upright(2).replace(transl=np.zeros(3))
    R = Rotation.from_rotvec([0.3, -0.7, 0.2])
    rotated = base.replace(root_orient=(R * Rotation.from_rotvec(base.root_orient)).as_rotvec())
    a = forward(template, base)
    b = forward(template, rotated)
    pelvis = a.joints[0]
    np.testing.assert_allclose(b.joints - pelvis, R.apply(a.joints - pelvis), atol=1e-10)
    np.testing.assert_allclose(b.vertices - pelvis, R.apply(a.vertices - pelvis), atol=1e-10)


@pytest.mark.parametrize("seed", range(5))
def test_posing_preserves_bone_lengths(template, seed):
    params = make_upright(seed, pose_scale=0.8)
    posed = bone_lengths(pose_joints(template, params), template.parents)
    rest = rest_bone_lengths(template, params.beta)
    np.testing.assert_allclose(posed, rest, rtol=1e-9)


def test_pose_joints_match_forward(template):
    params = make_upright(3)
    np.testing.assert_allclose(pose_joints(template, params), forward(template, params).joints, atol=1e-12)


def test_single_bone_vertex_moves_rigidly(template):
    # bind vertex 100 fully to the left knee
    weights = template.skin_weights.copy()
    weights[100] = 0.0
    weights[100, 4] = 1.0
    tpl = dataclasses.replace(template, skin_weights=weights)
    rest = forward(tpl, BodyParams.zeros())
    posed = forward(tpl, make_upright(4, pose_scale=0.6).replace(beta=np.zeros(10)))
    for j in (4, 7):
        d_rest = np.linalg.norm(rest.vertices[100] - rest.joints[j])
        d_posed = np.linalg.norm(posed.vertices[100] - posed.joints[j])
        assert d_posed == pytest.approx(d_rest, abs=1e-12)


def test_regressed_joints_track_kinematic_joints(template):
    state = forward(template, make_upright(5, pose_scale=0.1))
    regressed = template.joint_regressor @ state.vertices
    assert np.max(np.linalg.norm(regressed - state.joints, axis=1)) < 0.02


# Persistence
def test_template_file_round_trip(template, tmp_path):
    path = save_template(template, tmp_path / "tpl.json")
    loaded = load_template(path)
    assert loaded.joint_names == template.joint_names
    np.testing.assert_array_equal(loaded.parents, template.parents)
    np.testing.assert_allclose(loaded.template_vertices, template.template_vertices, rtol=0, atol=1e-15)
    np.testing.assert_allclose(loaded.shape_dirs, template.shape_dirs, rtol=0, atol=1e-15)
    assert height(loaded, np.zeros(10)) == pytest.approx(height(template, np.zeros(10)), abs=1e-12)
