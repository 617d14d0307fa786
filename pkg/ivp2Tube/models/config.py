from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

from ivp2Tube.models.application import SolveConfig


@dataclass
class Config:
    """Everything a command needs: parsed flags, logger, INI sections and where to write."""
    args: Any = None
    logger: Any = None
    app_config: Any = None
    solve_config: Optional[SolveConfig] = None
    out_dir: Optional[Path] = None
    operation_result: Any = None
