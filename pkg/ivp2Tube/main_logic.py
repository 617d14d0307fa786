import sys
from pathlib import Path

from ivp2Tube.config_parser import apply_flags, read_instance
from ivp2Tube.errors import ParameterError, UsageError
from ivp2Tube.interval.core import dyadic_str, working_precision
from ivp2Tube.models.instance import SCHEMA_VERSION, OpenSet, instance_from_dict
from ivp2Tube.models.operation_result import OperationType, ResponseCode
from ivp2Tube.rhs.gadget import GadgetRef, ParallelGadget
from ivp2Tube.utils.decoder import Coverage, decode_llpo
from ivp2Tube.utils.extender import extend
from ivp2Tube.utils.general import parse_streams
from ivp2Tube.utils.operation_decorator import operation_tracker
from ivp2Tube.utils.solver import enclose_all
from ivp2Tube.utils.verify_suites import run_suite
from ivp2Tube.utils.writers import (
    extension_segments_from_dict,
    extension_to_dict,
    json_line,
    read_json,
    solve_result_from_dict,
    solve_result_to_dict,
    write_json,
    write_rows,
    write_tube_csv,
)


def _emit(record):
    print(json_line(record), flush=True)


def _stem(path):
    return Path(path).stem


@operation_tracker(OperationType.SOLVE)
def cmd_solve(config):
    args = config.args
    cfg = apply_flags(config.solve_config, args)
    inst = read_instance(args.instance)
    result = enclose_all(inst, (inst.x0, inst.y0), cfg)

    stem = _stem(args.instance)
    artifacts = []
    if args.format != "csv":
        artifacts.append(write_json(config.out_dir / f"{stem}.solve.json", solve_result_to_dict(result, inst)))
    if args.format != "structured":
        for index, branch in enumerate(result.branches):
            artifacts.append(write_tube_csv(config.out_dir / f"{stem}.tube-{index:03d}.csv", branch.tube))
    config.operation_result.artifacts = [str(path) for path in artifacts]

    summary = {
        "a": dyadic_str(result.local_box.a),
        "b": dyadic_str(result.local_box.b),
        "confirmed": len(result.confirmed),
        "undecided": len(result.undecided),
        "pruned": result.pruned_count,
        "bisections": result.bisections,
        "artifacts": config.operation_result.artifacts,
    }
    _emit(summary)
    config.logger.info(f"solve {args.instance}: {summary}")
    config.operation_result.response = summary
    return config.operation_result


@operation_tracker(OperationType.EXTEND)
def cmd_extend(config):
    args = config.args
    if args.rounds < 1:
        raise UsageError(f"--rounds must be at least 1, got {args.rounds}")
    cfg = apply_flags(config.solve_config, args)
    inst = read_instance(args.instance)

    def on_round(record):
        document = record.to_dict()
        config.operation_result.records.append(document)
        _emit(document)

    state = extend(inst, args.rounds, cfg, on_round=on_round)

    stem = _stem(args.instance)
    artifacts = []
    if args.format != "structured":
        artifacts.append(write_rows(config.out_dir / f"{stem}.extend.csv", state.rows()))
    if args.format != "csv":
        artifacts.append(write_json(config.out_dir / f"{stem}.extend.json",
                                    extension_to_dict(state, inst, config.operation_result.records)))
    config.operation_result.artifacts = [str(path) for path in artifacts]

    summary = {
        "a": dyadic_str(state.a),
        "b": dyadic_str(state.b),
        "left": state.left_status,
        "right": state.right_status,
        "artifacts": config.operation_result.artifacts,
    }
    _emit(summary)
    config.operation_result.response = summary
    return config.operation_result


@operation_tracker(OperationType.GADGET)
def cmd_gadget(config):
    args = config.args
    try:
        streams = parse_streams(args.streams)
    except ValueError as e:
        raise UsageError(str(e)) from None
    document = {
        "schema_version": SCHEMA_VERSION,
        "dimension": 1,
        "rhs": {"gadget": {"streams": streams, "cell_budget": args.cell_budget}},
        "domain": {"balls": [ball.to_dict() for ball in OpenSet.unit_strip().balls]},
        "x0": "0",
        "y0": ["0"],
    }
    # Round trip through the reader so bad streams fail here, not at solve time
    document = instance_from_dict(document).to_dict()
    if args.out:
        path = write_json(args.out, document)
        config.operation_result.artifacts = [str(path)]
        _emit({"instance": str(path), "streams": len(streams), "cell_budget": args.cell_budget})
    else:
        print(json_line(document))
    config.operation_result.response = document
    return config.operation_result


def _coverage(document):
    """Decode from a solve result or from the glued tubes of an extension."""
    if isinstance(document, dict) and document.get("kind") == "extension":
        return Coverage.from_extension(extension_segments_from_dict(document))
    return Coverage.from_solve_result(solve_result_from_dict(document))


@operation_tracker(OperationType.DECODE)
def cmd_decode(config):
    args = config.args
    cfg = apply_flags(config.solve_config, args)
    document = read_json(args.result)
    inst = read_instance(args.instance)
    if not isinstance(inst.rhs, GadgetRef):
        raise UsageError(f"{args.instance} is not a gadget instance")
    available = len(inst.rhs.streams) if isinstance(inst.rhs, ParallelGadget) else 1
    count = available if args.bits is None else args.bits
    if count < 0:
        raise ParameterError(f"--bits must not be negative, got {count}")
    with working_precision(cfg.precision):
        reports = decode_llpo(_coverage(document), inst.rhs, range(count), strict=False)
    decoded = {
        "schema_version": SCHEMA_VERSION,
        "kind": "decode_report",
        "bits": {str(index): report.to_dict() for index, report in reports.items()},
    }
    print(json_line(decoded))
    config.operation_result.response = decoded

    uncertified = [index for index, report in reports.items() if not report.certified]
    if uncertified:
        config.operation_result.exit_code = 4
        config.operation_result.response_code = ResponseCode.FAILURE
        config.operation_result.status_message = f"uncertified bits for streams {uncertified}"
    return config.operation_result


@operation_tracker(OperationType.VERIFY)
def cmd_verify(config):
    args = config.args
    cfg = apply_flags(config.solve_config, args)
    report = run_suite(args.suite, cfg, args.samples)
    document = dict(schema_version=SCHEMA_VERSION, **report.to_dict())
    print(json_line(document))
    config.operation_result.response = document
    if not report.passed:
        config.operation_result.exit_code = 1
        config.operation_result.response_code = ResponseCode.FAILURE
        failed = [check.name for check in report.checks if not check.passed]
        config.operation_result.status_message = f"suite {args.suite} failed: {failed}"
    return config.operation_result


COMMANDS = {
    "solve": cmd_solve,
    "extend": cmd_extend,
    "gadget": cmd_gadget,
    "decode": cmd_decode,
    "verify": cmd_verify,
}


def dispatch(config):
    result = COMMANDS[config.args.command](config)
    if result.exit_code and result.status_message:
        print(f"ivp2Tube {config.args.command}: {result.status_message}", file=sys.stderr)
    return result
