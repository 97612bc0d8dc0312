"""
Finite universes and subset encodings.

Usage:
    u = Universe(names=("a", "b", "c"))
    s = image_set([0, 2, 0], u)           # 0b101
    canonical_subset_key(s, u)            # "a,c"
    parse_subset_key("a,c", u)            # 0b101
"""

from typing import Dict, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..exceptions import InputError
from .bitsets import MAX_UNIVERSE, mask_members


class Universe(BaseModel):
    """Ordered list of distinct element labels; index i <-> names[i]."""

    model_config = ConfigDict(frozen=True)

    names: Tuple[str, ...] = Field(..., description="Element labels in universe order")

    @field_validator("names")
    @classmethod
    def validate_names(cls, v: Tuple[str, ...]) -> Tuple[str, ...]:
        if not 1 <= len(v) <= MAX_UNIVERSE:
            raise ValueError(f"universe size must be between 1 and {MAX_UNIVERSE}, got {len(v)}")
        for name in v:
            if not name:
                raise ValueError("labels must be nonempty")
            if "," in name:
                raise ValueError(f"label {name!r} contains a comma")
        if len(set(v)) != len(v):
            raise ValueError("labels must be pairwise distinct")
        return v

    @classmethod
    def indexed(cls, n: int, prefix: str = "x") -> "Universe":
        """Universe labelled prefix0 .. prefix{n-1}."""
        if not 1 <= n <= MAX_UNIVERSE:
            raise InputError(f"universe size must be between 1 and {MAX_UNIVERSE}, got {n}")
        return cls(names=tuple(f"{prefix}{i}" for i in range(n)))

    @classmethod
    def from_labels(cls, labels: Sequence[str]) -> "Universe":
        """Build a universe, reporting validation failures as InputError."""
        try:
            return cls(names=tuple(labels))
        except ValueError as e:
            raise InputError(f"invalid universe: {e}") from e

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def size(self) -> int:
        """Number of masks, 2**n (the empty set included)."""
        return 1 << len(self.names)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.names)) - 1

    def index_map(self) -> Dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}

    def index_of(self, label: str) -> int:
        try:
            return self.names.index(label)
        except ValueError:
            raise InputError(f"unknown label {label!r}") from None


def image_set(points: Sequence[int], universe: Universe) -> int:
    """
    Bitmask of the distinct indices occurring in points.

    Raises:
        InputError: points is empty or holds an index outside the universe
    """
    if len(points) == 0:
        raise InputError("image of an empty point list is undefined")
    mask = 0
    for p in points:
        i = int(p)
        if not 0 <= i < universe.n:
            raise InputError(f"index {i} outside universe of size {universe.n}")
        mask |= 1 << i
    return mask


def check_subset(mask: int, universe: Universe) -> int:
    """Validate that mask is a nonempty subset of the universe."""
    if mask <= 0:
        raise InputError("subset must be nonempty")
    if mask > universe.full_mask:
        raise InputError(f"subset {mask:#x} is not within the universe")
    return mask


def canonical_subset_key(mask: int, universe: Universe) -> str:
    """Comma-joined labels in universe order."""
    check_subset(mask, universe)
    return ",".join(universe.names[i] for i in mask_members(mask))


def parse_subset_key(key: str, universe: Universe) -> int:
    """
    Inverse of canonical_subset_key.

    Only canonical keys are accepted: labels known, distinct, in universe order.
    """
    if not key:
        raise InputError("empty subset key")
    index = universe.index_map()
    mask = 0
    last = -1
    for label in key.split(","):
        if label not in index:
            raise InputError(f"unknown label {label!r} in key {key!r}")
        i = index[label]
        if i <= last:
            raise InputError(f"key {key!r} is not in canonical universe order")
        mask |= 1 << i
        last = i
    return mask
