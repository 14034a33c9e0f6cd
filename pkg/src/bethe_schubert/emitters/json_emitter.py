from __future__ import annotations

import json
from typing import Any, Mapping


class JsonEmitter:
    """Sorted, indented JSON on stdout."""

    def emit(self, payload: Mapping[str, Any]) -> None:
        print(json.dumps(payload, sort_keys=True, indent=2))
