import configparser
from argparse import Namespace
from fractions import Fraction

import pytest

from ivp2Tube.config_parser import apply_flags, load_configurations, logging_level
from ivp2Tube.errors import ParameterError
from ivp2Tube.models.application import SolveConfig, config_to_app


def parsed(text):
    config = configparser.ConfigParser()
    config.read_string(text)
    return config


def test_solver_section():
    cfg = config_to_app(parsed("[Solver]\ngrid_depth = 6\ntarget_width = 1/64\nmax_bisections = 0\n"))
    assert cfg.grid_depth == 6
    assert cfg.target_width == Fraction(1, 64)
    assert cfg.max_bisections == 0
    assert cfg.refine_rounds == SolveConfig().refine_rounds


def test_missing_section_keeps_the_defaults():
    assert config_to_app(parsed("[Python]\nlogging = DEBUG\n")) == SolveConfig()


@pytest.mark.parametrize("text", ["[Solver]\ngrid_depth = deep\n",
                                  "[Solver]\nrefine_rounds = 0\n",
                                  "[Solver]\nprecision = 16\n"])
def test_bad_values(text):
    with pytest.raises(ParameterError):
        config_to_app(parsed(text))


def test_flags_override_the_file(tmp_path):
    ini = tmp_path / "app.ini"
    ini.write_text("[Python]\nlogging = WARNING\n\n[Solver]\ngrid_depth = 6\nworkers = 2\n", encoding="utf-8")
    app_config, solve_config = load_configurations(str(ini))
    assert logging_level(app_config) == "WARNING"
    args = Namespace(grid_depth=9, refine_rounds=None, max_bisections=None, precision=None, workers=None)
    cfg = apply_flags(solve_config, args)
    assert (cfg.grid_depth, cfg.workers) == (9, 2)
