"""Status values shared by the partition check and the auditor."""
from __future__ import annotations

from enum import Enum


class Status(str, Enum):
    CONFIRMED = "Confirmed"
    REFUTED = "Refuted"
    INAPPLICABLE = "Inapplicable"

    def __str__(self) -> str:
        return self.value
