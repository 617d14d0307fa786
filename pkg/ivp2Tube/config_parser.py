"""Here we work with config files, instance files and the output directory"""
import os
import configparser
from dataclasses import replace
from pathlib import Path

from ivp2Tube.models.application import config_to_app
from ivp2Tube.models.instance import instance_from_dict
from ivp2Tube.utils.writers import read_json

OUT_DIR_ENV = 'IVP2TUBE_OUT_DIR'
DEFAULT_OUT_DIR = 'output'

# CLI flag name -> SolveConfig field
SOLVER_FLAGS = {
    'grid_depth': 'grid_depth',
    'refine_rounds': 'refine_rounds',
    'max_bisections': 'max_bisections',
    'precision': 'precision',
    'workers': 'workers',
}


def load_configurations(app_config_path=None):
    """Load app.ini; a missing file leaves every default in place."""
    if app_config_path is None:
        app_config_path = os.path.join(os.getcwd(), 'data', 'app.ini')

    app_config = configparser.ConfigParser()
    app_config.read(app_config_path, encoding='utf-8')
    solve_config = config_to_app(app_config)
    return app_config, solve_config


def logging_level(app_config):
    return app_config.get('Python', 'logging', fallback='INFO')


def apply_flags(solve_config, args):
    """CLI flags win over whatever app.ini said."""
    overrides = {field: getattr(args, flag) for flag, field in SOLVER_FLAGS.items()
                 if getattr(args, flag, None) is not None}
    return replace(solve_config, **overrides).validate()


def resolve_out_dir(args, app_config):
    """--out > IVP2TUBE_OUT_DIR > [Output] out_dir > ./output"""
    flag = getattr(args, 'out', None)
    if flag:
        return Path(flag)
    if os.environ.get(OUT_DIR_ENV):
        return Path(os.environ[OUT_DIR_ENV])
    return Path(app_config.get('Output', 'out_dir', fallback=DEFAULT_OUT_DIR))


def read_instance(path):
    return instance_from_dict(read_json(path))
