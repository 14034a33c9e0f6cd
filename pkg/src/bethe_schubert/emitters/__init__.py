from __future__ import annotations

from typing import Callable, Iterable, Mapping

from .base import ReportEmitter
from .json_emitter import JsonEmitter
from .text_emitter import TextEmitter

EmitterFactory = Callable[[], ReportEmitter]

_EMITTERS: Mapping[str, EmitterFactory] = {
    "json": JsonEmitter,
    "text": TextEmitter,
}


def available_emitters() -> Iterable[str]:
    return sorted(_EMITTERS.keys())


def get_emitter(name: str) -> ReportEmitter:
    try:
        factory = _EMITTERS[name]
    except KeyError as exc:
        raise ValueError(
            f"Unknown format '{name}'. Available: {', '.join(available_emitters())}"
        ) from exc
    return factory()
