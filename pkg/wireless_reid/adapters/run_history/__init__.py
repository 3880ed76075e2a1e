"""Run history repository abstractions."""

from wireless_reid.adapters.run_history.tinydb_repo import TinyDbRunHistoryRepo

__all__ = ["TinyDbRunHistoryRepo"]
