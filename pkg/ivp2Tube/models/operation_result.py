from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any, List, Optional


class OperationType(Enum):
    SOLVE = "solve"
    EXTEND = "extend"
    GADGET = "gadget"
    DECODE = "decode"
    VERIFY = "verify"


class ResponseCode(Enum):
    SUCCESS = "success"
    FAILURE = "failure"
    PARTIAL = "partial"
    ERROR = "error"


@dataclass
class OperationResult:
    """Outcome of one command. ``exit_code`` becomes the process exit status."""
    operation_type: Optional[OperationType] = None
    response_code: Optional[ResponseCode] = None
    exit_code: int = 0
    status_message: Optional[str] = None
    # paths written by the command
    artifacts: List[str] = field(default_factory=list)
    # streamed per-round documents (extend)
    records: List[Any] = field(default_factory=list)
    response: Optional[Any] = None
    operation_logs: List[str] = field(default_factory=list)
    start_time: Optional[datetime] = None
    end_time: Optional[datetime] = None

    @property
    def duration(self):
        if self.start_time is None or self.end_time is None:
            return 0.0
        return (self.end_time - self.start_time).total_seconds()
