"""Protocol definition for run history repositories."""

from __future__ import annotations

from typing import Any, Protocol


class RunHistoryRepository(Protocol):
    """Storage abstraction for experiment records keyed by run id."""

    def get(self, run_id: str) -> dict[str, Any] | None:
        """Return the stored record for the run, or ``None``."""

    def save(self, run_id: str, record: dict[str, Any]) -> None:
        """Persist the record, replacing any previous record of the same run."""

    def list_ids(self) -> list[str]:
        """Return stored run ids, oldest first."""
