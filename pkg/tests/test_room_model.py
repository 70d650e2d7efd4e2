import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from modalsmooth.room_model import (
    SceneConfig,
    ShoeboxRoom,
    doa_of,
    dor_of,
    enumerate_images,
    lambda_l,
    reflection_table,
)
from modalsmooth.sh_math import great_circle_deg

from conftest import TABLE_ROWS


def test_six_reflections_match_reference_table(window_reflections):
    assert len(window_reflections) == 6
    for refl, (delay, dor, doa) in zip(window_reflections, TABLE_ROWS):
        assert abs(refl.delay_s - delay) <= 5e-5
        assert np.allclose(refl.dor.degrees, dor, atol=0.05)
        assert np.allclose(refl.doa.degrees, doa, atol=0.05)


def test_equal_delay_pairs(window_reflections):
    d = [r.delay_s for r in window_reflections]
    assert abs(d[2] - d[3]) < 1e-9 and abs(d[4] - d[5]) < 1e-9
    assert len({round(x, 9) for x in d}) == 4


def test_direct_path(scene):
    refl = enumerate_images(scene, 0.0130)
    assert len(refl) == 1
    direct = refl[0]
    assert direct.bounce_count == 0
    assert direct.mirror_signs == (1, 1, 1)
    assert direct.distance_m == pytest.approx(np.sqrt(19.5625))


def test_before_direct_is_empty(scene):
    assert enumerate_images(scene, 0.01) == []


def test_lambda(window_reflections):
    direct, first = window_reflections[:2]
    assert lambda_l(direct, 0.0) == pytest.approx(1 / 4.4229, rel=1e-4)
    assert abs(lambda_l(first, 0.0)) == pytest.approx(0.8 / 6.3689, rel=1e-4)
    w = 2 * np.pi * np.array([10.0, 1000.0, 7000.0])
    assert np.allclose(np.abs(lambda_l(first, w)), first.amplitude)


def test_doa_dor_functions_agree_with_stored(window_reflections, scene):
    for r in window_reflections:
        assert great_circle_deg(doa_of(r, scene.mic_pos), r.doa) < 1e-12
        assert great_circle_deg(dor_of(r, scene.mic_pos), r.dor) < 1e-12


def test_unmirrored_doa_and_dor_are_antipodal(window_reflections):
    direct = window_reflections[0]
    assert great_circle_deg(direct.doa, direct.dor) == pytest.approx(180.0)


def test_reflection_invariants(scene):
    for r in enumerate_images(scene, 0.05):
        assert r.delay_s == pytest.approx(r.distance_m / scene.sound_speed)
        assert r.amplitude == pytest.approx(0.8**r.bounce_count / r.distance_m)
        # a negative mirror sign means an odd number of bounces on that axis
        img = np.array(r.image_pos)
        src = np.array(scene.loudspeaker_pos)
        dims = np.array(scene.room.dims)
        for ax in range(3):
            if r.mirror_signs[ax] == 1:
                assert np.isclose(np.mod(img[ax] - src[ax], 2 * dims[ax]), 0) or np.isclose(
                    np.mod(img[ax] - src[ax], 2 * dims[ax]), 2 * dims[ax]
                )
            else:
                assert np.isclose(np.mod(img[ax] + src[ax], 2 * dims[ax]), 0) or np.isclose(
                    np.mod(img[ax] + src[ax], 2 * dims[ax]), 2 * dims[ax]
                )


def test_sorted_by_delay(scene):
    d = [r.delay_s for r in enumerate_images(scene, 0.06)]
    assert d == sorted(d)


@settings(max_examples=30, deadline=None)
@given(
    st.tuples(st.floats(3, 12), st.floats(3, 12), st.floats(2.5, 6)),
    st.tuples(st.floats(0.1, 0.9), st.floats(0.1, 0.9), st.floats(0.1, 0.9)),
    st.tuples(st.floats(0.1, 0.9), st.floats(0.1, 0.9), st.floats(0.1, 0.9)),
)
def test_image_count_bounds(dims, frac_s, frac_m):
    room = ShoeboxRoom(dims=dims)
    s = tuple(f * d for f, d in zip(frac_s, dims))
    m = tuple(f * d for f, d in zip(frac_m, dims))
    assume(np.linalg.norm(np.subtract(s, m)) > 1e-3)
    scene = SceneConfig(room=room, mic_pos=m, loudspeaker_pos=s)
    max_d = 0.04
    refl = enumerate_images(scene, max_d)
    # every image within the radius is found: brute force check
    radius = max_d * 343.0
    count = 0
    for ax_x in range(-6, 7):
        for ax_y in range(-6, 7):
            for ax_z in range(-8, 9):
                for sx in (1, -1):
                    for sy in (1, -1):
                        for sz in (1, -1):
                            p = np.array(
                                [2 * ax_x * dims[0] + sx * s[0], 2 * ax_y * dims[1] + sy * s[1], 2 * ax_z * dims[2] + sz * s[2]]
                            )
                            if np.linalg.norm(p - np.array(m)) <= radius:
                                count += 1
    assert len(refl) == count


def test_table_rows(window_reflections):
    rows = reflection_table(window_reflections)
    assert rows[0]["reflection"] == "direct"
    assert rows[4]["mirror_sy"] == -1 and rows[4]["mirror_sz"] == -1


def test_invalid_scene():
    with pytest.raises(ValueError):
        SceneConfig(mic_pos=(11.0, 5.0, 3.0))
    with pytest.raises(ValueError):
        SceneConfig(mic_pos=(2.0, 2.0, 1.75))
    with pytest.raises(ValueError):
        ShoeboxRoom(wall_reflection=1.5)
    with pytest.raises(ValueError):
        enumerate_images(SceneConfig(), 0.0)
