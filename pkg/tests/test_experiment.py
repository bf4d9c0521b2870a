import dataclasses
import random

import numpy as np
import pytest

from fscs import LassoConfig
from fscs import experiment as ex
from fscs._errors import ConfigError, DegenerateAcquisitionError, InvalidArgumentError
from fscs.experiment import (
    ExperimentConfig,
    afcs_sweep,
    derive_trial_seed,
    format_config,
    load_config,
    parse_config,
    run_trial,
    success_map,
    write_afcs_csv,
    write_success_csv,
)

SMALL = ExperimentConfig(trials_per_cell=8, W=200, period_sweep=(25e-6, 27e-6, 1e-6))

CONFIG_TEXT = """\
# a small P2 run
problem = P2
window = 0.0002
resolution: 5e-07
K = 5
delta_f = 5000
period_sweep = 25e-6, 26e-6, 0.5e-6
N_I_range = [0, 1, 3]
trials_per_cell = 12
W = 300
seed = 99  # trailing comment
snr_threshold_db = 20
lasso.k_reg = 1000
lasso.polish_every = None
"""


def test_parse_config():
    c = parse_config(CONFIG_TEXT)
    assert c.problem == "P2" and c.B_b == 10e3
    assert c.period_sweep == (25e-6, 26e-6, 0.5e-6)
    assert c.N_I_range == (0, 1, 3)
    assert c.seed == 99 and c.snr_threshold_db == 20.0
    assert c.lasso == LassoConfig(k_reg=1000.0, polish_every=None)
    assert c.period_steps() == [50, 51, 52]


@pytest.mark.parametrize("config", [ExperimentConfig(), SMALL, parse_config(CONFIG_TEXT)])
def test_format_parse_roundtrip(config):
    assert parse_config(format_config(config)) == config


def test_load_config(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text(CONFIG_TEXT)
    assert load_config(p) == parse_config(CONFIG_TEXT)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.cfg")


@pytest.mark.parametrize(
    "text",
    [
        "colour = red\n",
        "seed = 1\nseed = 2\n",
        "lasso.gamma = 3\n",
        "seed\n",
        "seed = 1.5\n",
        "W = 0\n",
        "problem = P3\n",
        "problem = custom\n",
        "period_sweep = 30e-6, 25e-6, 0.5e-6\n",
        "period_sweep = 25e-6, 30e-6\n",
        "N_I_range = 0, 9\n",
        "report_columns = 0, 4\n",
        "lasso.tol = -1\n",
        "resolution = 0\n",
    ],
)
def test_config_rejects(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_off_grid_period_is_config_error():
    c = ExperimentConfig(period_sweep=(25.25e-6, 26e-6, 0.5e-6))
    with pytest.raises(ConfigError):
        c.period_steps()
    with pytest.raises(InvalidArgumentError):
        run_trial(ExperimentConfig(), 25.2e-6, 1, 0)


def test_defaults():
    c = ExperimentConfig()
    assert c.trials_per_cell == 1000 and c.W == 1000
    assert c.lasso == LassoConfig(k_reg=1e4, max_iters=50_000, tol=1e-8)
    assert c.interferer_counts() == (0, 1, 2, 3, 4)
    assert ExperimentConfig(problem="P2").interferer_counts() == (0, 1, 2, 3)
    assert c.columns_to_report() == (4, 5, 6, 7)
    assert c.period_steps() == list(range(50, 61))
    assert c.period_steps(ex.AFCS_SWEEP) == list(range(40, 61))


def test_trial_seed_is_positional():
    a = derive_trial_seed(1, 25e-6, 2, 7)
    assert a == derive_trial_seed(1, 24.999999999999996e-6, 2, 7)
    others = {derive_trial_seed(1, 25e-6, 2, 8), derive_trial_seed(1, 25.5e-6, 2, 7),
              derive_trial_seed(1, 25e-6, 3, 7), derive_trial_seed(2, 25e-6, 2, 7)}
    assert a not in others and len(others) == 4


def test_trial_deterministic_and_good():
    a = run_trial(ExperimentConfig(), 25e-6, 0, 7)
    b = run_trial(ExperimentConfig(), 25e-6, 0, 7)
    assert a == b
    assert a.success and a.converged and a.error is None
    assert a.kkt_residual <= 1e-8
    assert set(a.as_dict()) == {"case_digest", "snr_db", "success", "iterations", "kkt_residual", "converged", "error"}
    assert run_trial(ExperimentConfig(), 25e-6, 0, 8).case_digest != a.case_digest


def test_trial_interferer_range():
    with pytest.raises(InvalidArgumentError):
        run_trial(ExperimentConfig(), 25e-6, 5, 0)


@pytest.fixture
def degenerate(monkeypatch):
    """Every acquisition reports a zero band column."""

    def boom(phi, psi, band=None):
        raise DegenerateAcquisitionError((5,), phi.T_s)

    monkeypatch.setattr(ex, "compose_and_normalize", boom)
    ex._setup.cache_clear()
    yield
    ex._setup.cache_clear()


def test_degenerate_trial_is_failed(degenerate):
    out = run_trial(ExperimentConfig(), 25e-6, 1, 3)
    assert not out.success and not out.converged
    assert "5" in out.error


def test_degenerate_sweep_rows(degenerate):
    sweep = afcs_sweep(SMALL)
    assert sweep.all_degenerate
    assert all(np.isnan(sweep.xi[p]) for p in sweep.periods)
    smap = success_map(SMALL)
    assert smap.all_degenerate
    assert all(c.successes == 0 and c.nonconverged == 0 for c in smap.cells)


def test_afcs_sweep_matches_oracle(oracle):
    c = ExperimentConfig(W=1000, seed=1)
    sweep = afcs_sweep(c, verbose=True)
    assert len(sweep.periods) == 21
    rows = oracle["windows"]["0.2ms"]
    for step, T_s in zip(range(40, 61), sweep.periods):
        row = rows[str(step)]
        assert T_s == pytest.approx(row["period_s"], rel=1e-12)
        assert sweep.xi[T_s] == pytest.approx(row["xi"]["5kHz"], abs=1e-10)
        for k in (4, 5, 6, 7):
            assert sweep.zeta[T_s][k] == pytest.approx(row["zeta"][str(k)], abs=1e-10)
        # verbatim sign convention is never below the absolute one
        assert sweep.xi_verbatim[T_s] >= sweep.xi[T_s] - 1e-12


def test_success_map_shape_and_order_independence():
    smap = success_map(SMALL)
    assert len(smap.cells) == 3 * 5
    assert all(c.trials == 8 and 0 <= c.ratio <= 1 for c in smap.cells)
    jobs = [(SMALL, s, n) for s in SMALL.period_steps() for n in SMALL.interferer_counts()]
    random.Random(0).shuffle(jobs)
    shuffled = {(c.period, c.n_interferers): c for c in map(ex._run_cell, jobs)}
    assert shuffled == {(c.period, c.n_interferers): c for c in smap.cells}
    assert smap.ratio(25e-6, 0) == 1.0
    with pytest.raises(KeyError):
        smap.cell(25.5e-6, 0)


def test_success_map_counts_match_trials():
    c = dataclasses.replace(SMALL, N_I_range=(2,), period_sweep=(26e-6, 26e-6, 1e-6))
    cell = success_map(c).cells[0]
    outs = [run_trial(c, 26e-6, 2, derive_trial_seed(c.seed, 26e-6, 2, i)) for i in range(c.trials_per_cell)]
    assert cell.successes == sum(o.success for o in outs)


def test_csvs_byte_identical(tmp_path):
    paths = []
    for run in range(2):
        a, x, s = (tmp_path / f"{n}{run}.csv" for n in ("afcs", "xi", "succ"))
        write_afcs_csv(afcs_sweep(SMALL), a, x)
        write_success_csv(success_map(SMALL), s)
        paths.append((a, x, s))
    for p, q in zip(*paths):
        assert p.read_bytes() == q.read_bytes()
    lines = paths[0][0].read_text().splitlines()
    assert lines[0] == "period_s,column,zeta"
    assert lines[1].startswith("2.5e-05,4,")
    assert paths[0][1].read_text().splitlines()[0] == "period_s,xi"
    assert paths[0][2].read_text().splitlines()[0] == "period_s,n_interferers,trials,successes,ratio,nonconverged"


def test_workers_give_identical_map():
    c = dataclasses.replace(SMALL, trials_per_cell=5)
    assert success_map(c, workers=1).cells == success_map(c, workers=2).cells
