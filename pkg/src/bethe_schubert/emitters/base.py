from __future__ import annotations

from typing import Any, Mapping, Protocol


class ReportEmitter(Protocol):
    """Common interface for report renderers."""

    def emit(self, payload: Mapping[str, Any]) -> None: ...
