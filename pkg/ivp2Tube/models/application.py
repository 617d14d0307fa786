from dataclasses import dataclass, fields
from fractions import Fraction

from ivp2Tube.errors import ParameterError

SECTION = 'Solver'


@dataclass
class SolveConfig:
    grid_depth: int = 8
    refine_rounds: int = 30
    max_bisections: int = 64
    precision: int = 53
    target_width: Fraction = Fraction(1, 256)
    bound_budget: int = 256
    sweep_budget: int = 40
    workers: int = 1

    def validate(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if value < 0 or (value == 0 and f.name != 'max_bisections'):
                raise ParameterError(f"{f.name} must be positive, got {value}")
        if self.precision < 24:
            raise ParameterError(f"precision must be at least 24 bits, got {self.precision}")
        return self


def config_to_app(config):
    if SECTION not in config:
        return SolveConfig()

    section = config[SECTION]
    # Deserialize the "Solver" section back into a SolveConfig dataclass
    kwargs = {}
    for f in fields(SolveConfig):
        if f.name in section:
            try:
                if f.type == int:
                    kwargs[f.name] = int(section[f.name])
                elif f.type == Fraction:
                    kwargs[f.name] = Fraction(section[f.name].strip())
                else:
                    kwargs[f.name] = section[f.name]
            except ValueError as e:
                raise ParameterError(f"[{SECTION}] {f.name}: {e}") from None
    return SolveConfig(**kwargs).validate()
