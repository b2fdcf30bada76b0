from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass

from .errors import ParamError

ENV_VAR = "FORCING_LAB_CAPS"


@dataclass(frozen=True)
class Caps:
    """Size limits applied by the loader and the brute-force routines."""

    poset: int = 64
    pe: int = 8
    x: int = 8
    superconditions: int = 2_000_000
    dense: int = 12

    def override(self, text: str | None) -> Caps:
        """Return a copy updated from ``"key=value,key=value"``."""
        if not text:
            return self
        known = {f.name for f in dataclasses.fields(self)}
        updates = {}
        for item in text.split(","):
            item = item.strip()
            if not item:
                continue
            key, sep, value = item.partition("=")
            key = key.strip()
            if not sep or key not in known:
                raise ParamError(f"bad cap override {item!r}; keys: {sorted(known)}")
            try:
                updates[key] = int(value)
            except ValueError:
                raise ParamError(f"cap {key} needs an integer, got {value!r}") from None
        return dataclasses.replace(self, **updates)


DEFAULT_CAPS = Caps()


def caps_from_env(base: Caps = DEFAULT_CAPS) -> Caps:
    return base.override(os.environ.get(ENV_VAR))
