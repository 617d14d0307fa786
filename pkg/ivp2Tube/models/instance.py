"""IVP instance: right-hand side, open set as a ball union and the initial point."""
from dataclasses import dataclass
from typing import Tuple

from mpmath import mp

from ivp2Tube.errors import DimensionError, NotInDomain, SchemaError
from ivp2Tube.interval.core import IBox, Interval, dyadic_str, shift
from ivp2Tube.rhs.dynamic import dynamic_rhs_init
from ivp2Tube.utils.general import parse_dyadic

SCHEMA_VERSION = "1.0"
AUTO_GROWING_BALLS = 32
STRIP_REACH = 256


def check_schema_version(document, required=True):
    version = document.get("schema_version")
    if version is None:
        if required:
            raise SchemaError("missing schema_version")
        return
    major = str(version).split(".")[0]
    if major != SCHEMA_VERSION.split(".")[0]:
        raise SchemaError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")


@dataclass(frozen=True)
class Ball:
    """Open max-norm ball B(center, radius) in R^(n+1)."""
    center: Tuple[object, ...]
    radius: object

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(self.center))
        if not self.radius > 0:
            raise ValueError(f"ball radius must be positive, got {self.radius}")

    def distance_to(self, box: IBox) -> Interval:
        """Enclosure of ||center - z|| over z in the box."""
        return (IBox.point(self.center) - box).norm_max()

    def to_dict(self):
        return {"center": [dyadic_str(c) for c in self.center], "radius": dyadic_str(self.radius)}


@dataclass(frozen=True)
class OpenSet:
    balls: Tuple[Ball, ...]

    def __post_init__(self):
        object.__setattr__(self, "balls", tuple(self.balls))
        if not self.balls:
            raise ValueError("an open set needs at least one ball")

    @classmethod
    def auto_growing(cls, dimension):
        """Balls B(0, 2^m), m = 0..31."""
        origin = (mp.zero,) * (dimension + 1)
        return cls(tuple(Ball(origin, shift(mp.one, m)) for m in range(AUTO_GROWING_BALLS)))

    @classmethod
    def unit_strip(cls, reach=STRIP_REACH):
        """(-1, 1) x (-reach - 1, reach + 1) as unit balls centred at (0, j), j = 0, 1, -1, 2, -2, ...

        Radius 1 is the largest that fits in the strip, so the cover grows
        outward one ball per unit of |y|.
        """
        offsets = [0]
        for j in range(1, reach + 1):
            offsets.extend((j, -j))
        return cls(tuple(Ball((mp.zero, mp.mpf(j)), mp.one) for j in offsets))

    def contains(self, point):
        """True when some ball verifiably contains the point strictly inside."""
        box = IBox.point(point)
        return any(ball.distance_to(box).hi < ball.radius for ball in self.balls)

    def __len__(self):
        return len(self.balls)

    def __getitem__(self, index):
        return self.balls[index]


class IVPInstance:
    def __init__(self, rhs, domain: OpenSet, x0, y0, auto_growing=False):
        self.rhs = rhs
        self.domain = domain
        self.x0 = x0
        self.y0 = tuple(y0)
        self.auto_growing = auto_growing
        if len(self.y0) != rhs.dimension:
            raise DimensionError(f"y0 has {len(self.y0)} component(s), rhs has dimension {rhs.dimension}")
        for ball in domain.balls:
            if len(ball.center) != rhs.dimension + 1:
                raise DimensionError(f"ball centre {ball.center} does not live in R^{rhs.dimension + 1}")

    @property
    def dimension(self):
        return self.rhs.dimension

    @property
    def point(self):
        return (self.x0,) + self.y0

    def check_initial_point(self):
        if not self.domain.contains(self.point):
            raise NotInDomain(f"initial point ({dyadic_str(self.x0)}, {[dyadic_str(v) for v in self.y0]}) "
                              f"is not verifiably inside any listed ball")
        return self

    def to_dict(self):
        document = {
            "schema_version": SCHEMA_VERSION,
            "dimension": self.dimension,
            "rhs": self.rhs.describe(),
            "x0": dyadic_str(self.x0),
            "y0": [dyadic_str(v) for v in self.y0],
        }
        if self.auto_growing:
            document["domain"] = {"auto_growing": True}
        else:
            document["domain"] = {"balls": [ball.to_dict() for ball in self.domain.balls]}
        return document


@dataclass(frozen=True)
class LocalBox:
    """Certified local data around an anchor: delta = 2^-k_sel, K, M and [a, b]."""
    m_sel: int
    k_sel: int
    delta: object
    K: IBox
    M: object
    a: object
    b: object
    x0: object
    anchor: IBox

    @property
    def ball(self) -> IBox:
        """Closed delta-neighbourhood of the anchor in the state variables."""
        return IBox(self.K.components[1:])

    def to_dict(self):
        return {
            "m_sel": self.m_sel,
            "k_sel": self.k_sel,
            "delta": dyadic_str(self.delta),
            "M": dyadic_str(self.M),
            "a": dyadic_str(self.a),
            "b": dyadic_str(self.b),
            "x0": dyadic_str(self.x0),
            "anchor": [[dyadic_str(c.lo), dyadic_str(c.hi)] for c in self.anchor],
            "K": [[dyadic_str(c.lo), dyadic_str(c.hi)] for c in self.K],
        }

    @classmethod
    def from_dict(cls, document):
        try:
            return cls(
                m_sel=int(document["m_sel"]),
                k_sel=int(document["k_sel"]),
                delta=parse_dyadic(document["delta"]),
                K=box_from_pairs(document["K"]),
                M=parse_dyadic(document["M"]),
                a=parse_dyadic(document["a"]),
                b=parse_dyadic(document["b"]),
                x0=parse_dyadic(document["x0"]),
                anchor=box_from_pairs(document["anchor"]),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise SchemaError(f"malformed local box: {e}") from None


def box_from_pairs(pairs) -> IBox:
    return IBox(tuple(Interval(parse_dyadic(lo), parse_dyadic(hi)) for lo, hi in pairs))


def _dyadic(document, key):
    try:
        return parse_dyadic(document[key])
    except KeyError:
        raise SchemaError(f"missing field {key!r}") from None
    except ValueError as e:
        raise SchemaError(f"field {key!r}: {e}") from None


def instance_from_dict(document) -> IVPInstance:
    if not isinstance(document, dict):
        raise SchemaError("instance file must hold a JSON object")
    check_schema_version(document, required=False)
    dimension = document.get("dimension")
    if isinstance(dimension, bool) or not isinstance(dimension, int) or dimension < 1:
        raise SchemaError(f"'dimension' must be a positive integer, got {dimension!r}")
    if "rhs" not in document:
        raise SchemaError("missing field 'rhs'")
    rhs = dynamic_rhs_init(document["rhs"], dimension)

    x0 = _dyadic(document, "x0")
    y0_raw = document.get("y0")
    if not isinstance(y0_raw, list):
        raise SchemaError("'y0' must be an array")
    try:
        y0 = tuple(parse_dyadic(v) for v in y0_raw)
    except ValueError as e:
        raise SchemaError(f"field 'y0': {e}") from None

    domain_doc = document.get("domain")
    if not isinstance(domain_doc, dict):
        raise SchemaError("'domain' must be an object")
    auto_growing = bool(domain_doc.get("auto_growing"))
    if auto_growing:
        domain = OpenSet.auto_growing(dimension)
    else:
        balls = domain_doc.get("balls")
        if not isinstance(balls, list) or not balls:
            raise SchemaError("'domain' needs a non-empty 'balls' array or auto_growing")
        try:
            domain = OpenSet(tuple(Ball(tuple(parse_dyadic(c) for c in b["center"]), parse_dyadic(b["radius"]))
                                   for b in balls))
        except (KeyError, TypeError, ValueError) as e:
            raise SchemaError(f"malformed ball: {e}") from None
    return IVPInstance(rhs, domain, x0, y0, auto_growing=auto_growing)
