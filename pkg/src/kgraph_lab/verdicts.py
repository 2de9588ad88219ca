"""Three-valued answers for bounded searches."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any


class Verdict(str, enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class TriState:
    value: Verdict
    witness: Any = None
    note: str = ""

    @classmethod
    def yes(cls, note: str = "", witness: Any = None) -> "TriState":
        return cls(Verdict.YES, witness, note)

    @classmethod
    def no(cls, witness: Any = None, note: str = "") -> "TriState":
        return cls(Verdict.NO, witness, note)

    @classmethod
    def unknown(cls, note: str = "", witness: Any = None) -> "TriState":
        return cls(Verdict.UNKNOWN, witness, note)

    def __bool__(self) -> bool:
        return self.value is Verdict.YES

    @property
    def is_yes(self) -> bool:
        return self.value is Verdict.YES

    @property
    def is_no(self) -> bool:
        return self.value is Verdict.NO

    def to_json(self) -> dict:
        return {"verdict": self.value.value, "witness": _plain(self.witness), "note": self.note}


def _plain(obj: Any) -> Any:
    """Convert witnesses into JSON-friendly values."""
    from .core import Path

    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    if isinstance(obj, Path):
        return obj.literal
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))}
    if isinstance(obj, (set, frozenset)):
        return sorted((_plain(x) for x in obj), key=str)
    if isinstance(obj, (list, tuple)):
        return [_plain(x) for x in obj]
    return str(obj)
