from __future__ import annotations

from typing import Any, Mapping

from rich.console import Console
from rich.pretty import Pretty
from rich.table import Table

_VERDICT_STYLES = {
    "COMPLETE": "green",
    "VERIFIED": "green",
    "equal": "green",
    "PARTIAL": "yellow",
    "FAILED": "red",
    "mismatch": "red",
}


class TextEmitter:
    """Key/value table for humans; nested values are pretty-printed."""

    def __init__(self, console: Console | None = None) -> None:
        self._console = console

    @property
    def console(self) -> Console:
        return self._console or Console(highlight=False, soft_wrap=True)

    def emit(self, payload: Mapping[str, Any]) -> None:
        table = Table(show_header=False, box=None, pad_edge=False)
        table.add_column(style="bold")
        table.add_column()
        for key in sorted(payload):
            value = payload[key]
            if isinstance(value, (dict, list)):
                table.add_row(key, Pretty(value, expand_all=False))
            elif key == "verdict" and value in _VERDICT_STYLES:
                table.add_row(key, f"[{_VERDICT_STYLES[value]}]{value}[/]")
            else:
                table.add_row(key, str(value))
        self.console.print(table)
