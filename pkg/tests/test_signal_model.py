import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fscs import (
    PROBLEMS,
    CaseSpec,
    FilteringProblem,
    InvalidArgumentError,
    Tone,
    draw_random_case,
    make_time_grid,
    synth_case,
    synth_tone,
)


def test_time_grid_default():
    g = make_time_grid(1e-3, 0.5e-6)
    assert g.M == 2000
    assert g.times[0] == 0.0
    assert g.times[1] == pytest.approx(0.5e-6)
    assert np.all(np.diff(g.times) > 0)


def test_time_grid_single_point():
    g = make_time_grid(1e-3, 1e-3)
    assert g.M == 1
    assert list(g.times) == [0.0]


def test_time_grid_floor():
    assert make_time_grid(1e-3, 0.3e-6).M == 3333


def test_time_grid_survives_roundoff():
    # 0.2e-3 / 0.5e-6 evaluates to 399.99999999999994
    assert make_time_grid(0.2e-3, 0.5e-6).M == 400


@pytest.mark.parametrize("window,res", [(0, 1e-6), (1e-3, 0), (-1e-3, 1e-6), (1e-6, 1e-3)])
def test_time_grid_rejects(window, res):
    with pytest.raises(InvalidArgumentError):
        make_time_grid(window, res)


def test_grid_steps_refuses_to_round(grid_1ms):
    assert grid_1ms.steps(28.5e-6) == 57
    with pytest.raises(InvalidArgumentError):
        grid_1ms.steps(28.3e-6 + 1e-7)


def test_synth_tone_zero_amplitude(grid_1ms):
    assert not synth_tone(grid_1ms, Tone(5e3, 0.0)).any()


def test_synth_tone_period(grid_1ms):
    x = synth_tone(grid_1ms, Tone(5e3, 1.0, 0.0))
    assert x[0] == 1.0
    assert x[400] == pytest.approx(math.cos(2 * math.pi * 5000 * 200e-6), abs=1e-12)
    assert x[400] == pytest.approx(1.0, abs=1e-12)


def test_synth_tone_quadrature(grid_1ms):
    assert synth_tone(grid_1ms, Tone(5e3, 1.0, math.pi / 2))[0] == pytest.approx(0.0, abs=1e-15)


def test_tone_invariants():
    with pytest.raises(InvalidArgumentError):
        Tone(-5e3)
    with pytest.raises(InvalidArgumentError):
        Tone(5e3, -1.0)
    with pytest.raises(InvalidArgumentError):
        Tone(5e3, 1.0, 2 * math.pi)


def test_synth_case_empty(grid_1ms):
    x, s_b = synth_case(grid_1ms, CaseSpec())
    assert not x.any() and not s_b.any()


def test_synth_case_no_interference(grid_1ms):
    x, s_b = synth_case(grid_1ms, CaseSpec([Tone(5e3, 0.7, 1.0)]))
    np.testing.assert_array_equal(x, s_b)


def test_synth_case_superposition_at_zero(grid_1ms):
    x, s_b = synth_case(grid_1ms, CaseSpec([Tone(5e3)], [Tone(25e3)]))
    assert x[0] == 2.0
    assert s_b[0] == 1.0


def test_case_rejects_duplicate_frequencies():
    with pytest.raises(InvalidArgumentError):
        CaseSpec([Tone(5e3)], [Tone(5e3)])


tones = st.builds(
    Tone,
    frequency=st.sampled_from([5e3, 10e3, 15e3, 20e3, 25e3]),
    amplitude=st.floats(0, 2),
    phase=st.floats(0, 2 * math.pi, exclude_max=True),
)


@settings(max_examples=50, deadline=None)
@given(st.lists(tones, max_size=5, unique_by=lambda t: t.frequency), st.integers(0, 5))
def test_superposition(tone_list, split):
    grid = make_time_grid(1e-3, 0.5e-6)
    case = CaseSpec(tone_list[:split], tone_list[split:])
    x, s_b = synth_case(grid, case)
    ref = sum((synth_tone(grid, t) for t in tone_list), np.zeros(grid.M))
    ref_b = sum((synth_tone(grid, t) for t in tone_list[:split]), np.zeros(grid.M))
    scale = max(1.0, np.abs(ref).max())
    assert np.abs(x - ref).max() <= 1e-12 * scale
    assert np.abs(s_b - ref_b).max() <= 1e-12 * scale


def test_filtering_problem_invariants():
    with pytest.raises(InvalidArgumentError):
        FilteringProblem(25e3, 30e3, 5, 5e3)
    with pytest.raises(InvalidArgumentError):
        FilteringProblem(25e3, 5e3, 4, 5e3)  # dictionary would not span B_x_dag
    p1, p2 = PROBLEMS["P1"], PROBLEMS["P2"]
    assert (p1.N_b, p1.max_interferers) == (1, 4)
    assert (p2.N_b, p2.max_interferers) == (2, 3)


def test_random_case_full_interference():
    case = draw_random_case(PROBLEMS["P1"], 1, 4, np.random.default_rng(3))
    assert [t.frequency for t in case.wanted_tones] == [5e3]
    assert sorted(t.frequency for t in case.interference_tones) == [10e3, 15e3, 20e3, 25e3]


def test_random_case_no_interference():
    case = draw_random_case(PROBLEMS["P2"], 2, 0, np.random.default_rng(3))
    assert [t.frequency for t in case.wanted_tones] == [5e3, 10e3]
    assert case.interference_tones == ()


def test_random_case_deterministic():
    a = draw_random_case(PROBLEMS["P1"], 1, 2, np.random.default_rng(11))
    b = draw_random_case(PROBLEMS["P1"], 1, 2, np.random.default_rng(11))
    assert a == b


def test_random_case_rejects_too_many_interferers():
    with pytest.raises(InvalidArgumentError):
        draw_random_case(PROBLEMS["P2"], 2, 4, np.random.default_rng(0))
    with pytest.raises(InvalidArgumentError):
        draw_random_case(PROBLEMS["P1"], 2, 0, np.random.default_rng(0))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["P1", "P2"]), st.integers(0, 3), st.integers(0, 2**32 - 1))
def test_random_case_on_lattice(name, n_i, seed):
    problem = PROBLEMS[name]
    case = draw_random_case(problem, problem.N_b, n_i, np.random.default_rng(seed))
    case.validate(problem)
    assert case.N_b == problem.N_b and case.N_I == n_i
    for t in case.tones:
        assert t.frequency in problem.lattice
        assert 0.2 <= t.amplitude <= 1.0
        assert 0 <= t.phase < 2 * math.pi
    assert all(t.frequency > problem.B_b for t in case.interference_tones)


def test_random_case_sequences_repeat():
    def seq(seed):
        g = np.random.default_rng(seed)
        return [draw_random_case(PROBLEMS["P1"], 1, 3, g) for _ in range(5)]

    assert seq(4) == seq(4)
    assert seq(4) != seq(5)
