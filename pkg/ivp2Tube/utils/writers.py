"""JSON documents, JSON-lines records and CSV tube dumps."""
import csv
import json
from pathlib import Path
from typing import List

from ivp2Tube.errors import SchemaError
from ivp2Tube.models.instance import SCHEMA_VERSION, LocalBox, check_schema_version
from ivp2Tube.utils.extender import ExtensionState, Segment
from ivp2Tube.utils.solver import Branch, SolveResult

CSV_VERSION_LINE = f"# schema_version {SCHEMA_VERSION}"


def write_json(path, document):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    return path


def read_json(path):
    path = Path(path)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise SchemaError(f"{path} does not exist") from None
    except (OSError, UnicodeDecodeError) as e:
        raise SchemaError(f"cannot read {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path} is not valid JSON: {e}") from None


def json_line(record):
    return json.dumps(record, ensure_ascii=False, sort_keys=False)


def write_rows(path, rows):
    """CSV tube dump; the first line is a comment naming the schema version."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        f.write(CSV_VERSION_LINE + "\n")
        w = csv.writer(f, lineterminator="\n")
        w.writerows(rows)
    return path


def write_tube_csv(path, tube):
    return write_rows(path, tube.to_rows())


def solve_result_to_dict(result: SolveResult, instance=None):
    document = {
        "schema_version": SCHEMA_VERSION,
        "kind": "solve_result",
        "local_box": result.local_box.to_dict(),
        "pruned_count": result.pruned_count,
        "bisections": result.bisections,
        "confirmed": [branch.to_dict() for branch in result.confirmed],
        "undecided": [branch.to_dict() for branch in result.undecided],
    }
    if instance is not None:
        document["instance"] = instance.to_dict()
    return document


def solve_result_from_dict(document) -> SolveResult:
    if not isinstance(document, dict):
        raise SchemaError("solve result must be a JSON object")
    check_schema_version(document)
    if document.get("kind") != "solve_result":
        raise SchemaError(f"expected a solve_result document, got kind {document.get('kind')!r}")
    try:
        return SolveResult(
            local_box=LocalBox.from_dict(document["local_box"]),
            confirmed=[Branch.from_dict(b) for b in document["confirmed"]],
            undecided=[Branch.from_dict(b) for b in document["undecided"]],
            pruned_count=int(document.get("pruned_count", 0)),
            bisections=int(document.get("bisections", 0)),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"malformed solve result: {e}") from None


def extension_to_dict(state: ExtensionState, instance, records):
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "extension",
        "instance": instance.to_dict(),
        "records": records,
        "segments": [segment.to_dict() for segment in state.glued()],
    }


def extension_segments_from_dict(document) -> List[Segment]:
    """Glued segments of an ``extension`` document, in position order."""
    if not isinstance(document, dict):
        raise SchemaError("extension must be a JSON object")
    check_schema_version(document)
    if document.get("kind") != "extension":
        raise SchemaError(f"expected an extension document, got kind {document.get('kind')!r}")
    segments = document.get("segments")
    if not isinstance(segments, list):
        raise SchemaError("extension document has no segment list")
    return [Segment.from_dict(segment) for segment in segments]
