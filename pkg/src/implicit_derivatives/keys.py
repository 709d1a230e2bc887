"""The index type shared by every formula representation."""

from typing import NamedTuple


class VectorKey(NamedTuple):
    """A pair of differentiation counts: ``l`` in x and ``r`` in y.

    The expanded-form modules read the same pair as (p, t).
    """

    l: int
    r: int
