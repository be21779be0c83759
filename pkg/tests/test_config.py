import numpy as np
import pytest

from hdbs.config import (OUTPUT_ENV, Config, ConfigError, cosine_grid, parse_config,
                         parse_config_text, parse_grid)


def test_defaults():
    cfg = parse_config_text("", env={})
    assert cfg.schemes == ("adaptive", "fixed", "discrete")
    assert cfg.mode == "snr" and cfg.snr_db == 15.0 and cfg.rate is None
    assert cfg.snr_grid == (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
    assert len(cfg.mu_grid) == 41 and cfg.mu_grid[0] == 0.0 and cfg.mu_grid[-1] == 1.0
    assert cfg.mean_gains() == (pytest.approx(10 ** 1.5), pytest.approx(10 ** 1.5))
    assert cfg.budgets() == (1.0, 1.0)
    assert cfg.levels == Config().levels and cfg.search_slots == Config().search_slots


def test_grid_parsing():
    assert list(parse_grid("0:30:5")) == [0, 5, 10, 15, 20, 25, 30]
    assert list(parse_grid("0:1:0.1"))[-1] == 1.0
    assert list(parse_grid("1, 2.5")) == [1.0, 2.5]
    for bad in ("1:2", "0:1:0", "2:1:1"):
        with pytest.raises(ConfigError):
            parse_grid(bad)
    g = cosine_grid(5)
    assert g[2] == pytest.approx(0.5) and np.all(np.diff(g) > 0)


@pytest.mark.parametrize("text", [
    "[calibration]\nmu = 1.2\n",
    "[run]\nmode = space\n",
    "[run]\nschemes = adaptive, magic\n",
    "[snr]\npbar = 0\n",
    "[slots]\ncalibration = 1.5\n",
    "[fairness]\njoint = maybe\n",
    "[discrete]\nlevels = 0\n",
    "[estimator]\nexponent = 0.5\n",
    "[region]\nmu_grid = 0.5, 0.2\n",
])
def test_invalid_values(text):
    with pytest.raises(ConfigError):
        parse_config_text(text, env={})


def test_mu_error_message():
    with pytest.raises(ConfigError, match="mu out of"):
        parse_config_text("[calibration]\nmu = 1.2\n", env={})


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError, match="snr.snrdb"):
        parse_config_text("[snr]\nsnrdb = 10\n", env={})
    with pytest.raises(ConfigError, match=r"\[bogus\]"):
        parse_config_text("[bogus]\nx = 1\n", env={})
    with pytest.raises(ConfigError):
        parse_config_text("", {"snr.nope": "1"}, env={})


def test_physical_mode():
    cfg = parse_config_text("[run]\nmode = physical\n", env={})
    m1, mB = cfg.mean_gains()
    p1, pB = cfg.budgets()
    assert p1 == pytest.approx(0.251189, rel=1e-5) and pB == pytest.approx(39.8107, rel=1e-5)
    # same path, noise figures differ by 5 dB
    assert m1 / mB == pytest.approx(10 ** 0.5, rel=1e-12)
    assert 10 * np.log10(p1 * m1) == pytest.approx(10 * np.log10(p1 * 3.5922e-13 / 1.2619e-15),
                                                   abs=1e-3)


def test_precedence(tmp_path):
    path = tmp_path / "c.ini"
    path.write_text("[run]\noutput_dir = from_file\nseed = 4\n")
    assert parse_config(path, env={}).output_dir == "from_file"
    assert parse_config(path, env={OUTPUT_ENV: "from_env"}).output_dir == "from_env"
    cfg = parse_config(path, {"run.output_dir": "from_flag"}, env={OUTPUT_ENV: "from_env"})
    assert cfg.output_dir == "from_flag" and cfg.seed == 4
    assert parse_config(None, env={}).output_dir == "results"


def test_inline_comments_and_roundtrip():
    cfg = parse_config_text("[snr]\nsnr_db = 20  # dB\n; note\n", env={})
    assert cfg.snr_db == 20.0
    again = parse_config_text(cfg.to_ini(), env={})
    assert again == cfg and again.to_ini() == cfg.to_ini()
