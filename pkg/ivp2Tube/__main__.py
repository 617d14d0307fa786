"""Entering the program, this is where it all starts"""
import sys

from ivp2Tube.args_parser import get_parser
from ivp2Tube.config_parser import load_configurations, logging_level, resolve_out_dir
from ivp2Tube.logger_setup import setup_logging
from ivp2Tube.main_logic import dispatch
from ivp2Tube.models.config import Config


def main(argv=None):
    # app_config - generic configuration of application, based on data/app.ini
    # solve_config - [Solver] section converted to SolveConfig, flags are applied per command
    parser = get_parser()
    args = parser.parse_args(argv)
    try:
        app_config, solve_config = load_configurations()
    except Exception as e:
        print(f"ivp2Tube: bad data/app.ini: {e}", file=sys.stderr)
        return getattr(e, "exit_code", 3)
    logger = setup_logging(logging_level(app_config))
    logger.info("------------------------------------------")
    logger.debug(f"{args.command} {vars(args)}")

    config = Config(
        args=args,
        logger=logger,
        app_config=app_config,
        solve_config=solve_config,
        out_dir=resolve_out_dir(args, app_config),
    )
    response = dispatch(config)
    logger.debug(response)
    return response.exit_code


if __name__ == '__main__':
    sys.exit(main())
