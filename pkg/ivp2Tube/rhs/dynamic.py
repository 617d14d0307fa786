import logging

from ivp2Tube.errors import SchemaError

logger = logging.getLogger("appLogger.rhs")

RHS_KINDS = {"expr": "expression", "gadget": "gadget"}


def dynamic_rhs_init(document, dimension):
    """Import the module serving the instance-file rhs kind and build the right-hand side."""
    if not isinstance(document, dict) or len(document) != 1:
        raise SchemaError("'rhs' must be an object with exactly one of: " + ", ".join(sorted(RHS_KINDS)))
    kind, options = next(iter(document.items()))
    if kind not in RHS_KINDS:
        raise SchemaError(f"unknown rhs kind {kind!r}")
    module_name = f"ivp2Tube.rhs.{RHS_KINDS[kind]}"

    rhs_module = __import__(module_name, fromlist=["from_document"])
    rhs = rhs_module.from_document(options, dimension)
    logger.debug(f"Built {kind} right-hand side {rhs!r}")
    return rhs
