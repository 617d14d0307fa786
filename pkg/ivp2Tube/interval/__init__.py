from ivp2Tube.interval.core import (
    IBox,
    Interval,
    ZERO,
    dyadic_str,
    get_precision,
    iv_arith,
    iv_norm_max,
    iv_scbrt,
    iv_set_ops,
    scalar,
    set_precision,
    to_fraction,
    working_precision,
)
