# right_hand_side.py
from abc import ABC, abstractmethod

from ivp2Tube.errors import DimensionError
from ivp2Tube.interval.core import IBox


class RightHandSide(ABC):
    def __init__(self, dimension):
        self._dimension = dimension

    @abstractmethod
    def eval_box(self, box: IBox) -> IBox:
        """Enclose f over a box (x, y1..yn); returns a box of length n."""
        pass

    @abstractmethod
    def describe(self):
        """JSON-ready description used in instance files and reports."""
        pass

    @property
    def dimension(self):
        """Number of state components n."""
        return self._dimension

    def check_box(self, box):
        if len(box) != self._dimension + 1:
            raise DimensionError(f"expected a box of length {self._dimension + 1}, got {len(box)}")
