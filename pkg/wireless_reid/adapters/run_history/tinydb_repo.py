"""TinyDB-backed run history repository implementation."""

from __future__ import annotations

from pathlib import Path
from typing import Any

from tinydb import Query, TinyDB

from wireless_reid.adapters.run_history.base import RunHistoryRepository


class TinyDbRunHistoryRepo(RunHistoryRepository):
    """Persist experiment records in a TinyDB document store, newest ``max_length`` kept."""

    def __init__(
        self,
        db_path: Path,
        *,
        max_length: int = 50,
        table_name: str = "runs",
        logger: Any | None = None,
    ) -> None:
        self._db_path = db_path
        self._db_path.parent.mkdir(parents=True, exist_ok=True)
        self._db = TinyDB(self._db_path, sort_keys=True, indent=2)
        self._table = self._db.table(table_name)
        self._max_length = max(max_length, 1)
        self._logger = logger
        self._query = Query()

    def get(self, run_id: str) -> dict[str, Any] | None:
        record = self._table.get(self._query.run_id == run_id)
        if record is None:
            return None

        payload = record.get("record") if isinstance(record, dict) else None
        if isinstance(payload, dict):
            return dict(payload)

        if self._logger is not None:
            self._logger.warning("run history record for %s is malformed; ignoring", run_id)
        return None

    def save(self, run_id: str, record: dict[str, Any]) -> None:
        self._table.upsert(
            {"run_id": run_id, "record": record},
            self._query.run_id == run_id,
        )
        documents = sorted(self._table.all(), key=lambda doc: doc.doc_id)
        stale = documents[: max(len(documents) - self._max_length, 0)]
        if stale:
            self._table.remove(doc_ids=[doc.doc_id for doc in stale])

    def list_ids(self) -> list[str]:
        documents = sorted(self._table.all(), key=lambda doc: doc.doc_id)
        return [str(doc.get("run_id")) for doc in documents]

    def close(self) -> None:
        """Close the underlying TinyDB instance."""

        self._db.close()
