"""Exception hierarchy with module-qualified messages."""

from __future__ import annotations

from pathlib import Path


class WirelessReidError(Exception):
    """Base error; ``str(err)`` is prefixed with the module that raised it."""

    module = "wireless_reid"

    def __init__(self, message: str) -> None:
        super().__init__(message)
        self.message = message

    def __str__(self) -> str:
        return f"{self.module}: {self.message}"


class DegenerateConfigurationError(WirelessReidError):
    module = "geomap"


class PointAtInfinityError(WirelessReidError):
    module = "geomap"


class InvalidTrajectoryError(WirelessReidError):
    module = "geomap"


class ZeroVectorError(WirelessReidError):
    module = "affinity"


class UnknownQueryError(WirelessReidError):
    module = "eval"

    def __init__(self, query_id: str) -> None:
        super().__init__(f"unknown query id {query_id!r}")
        self.query_id = query_id


class NoRelevantItemError(WirelessReidError):
    module = "eval"

    def __init__(self, query_id: str) -> None:
        super().__init__(f"query {query_id!r} has no relevant item in its ranked list")
        self.query_id = query_id


class InvalidConfigError(WirelessReidError):
    """A configuration value failed validation; ``field`` names the offending key."""

    module = "config"

    def __init__(self, field: str, message: str, *, module: str | None = None) -> None:
        super().__init__(f"invalid value for {field!r}: {message}")
        self.field = field
        if module is not None:
            self.module = module


class ScenarioIOError(WirelessReidError):
    module = "io"

    def __init__(self, path: Path | str, message: str) -> None:
        super().__init__(f"{path}: {message}")
        self.path = Path(path)
