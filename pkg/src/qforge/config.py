"""Run configuration: caps, parallelism, output location and seed."""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, replace

ENV_VAR = "QFORGE_CAPS"
_CAP_KEYS = {"subgroup": "cap_subgroup", "group": "cap_group", "lattice": "cap_lattice", "aut": "cap_aut"}


@dataclass(frozen=True)
class RunConfig:
    cap_subgroup: int = 10_000     # elements of a module scanned for submodules
    cap_group: int = 100_000       # permutation group closure (LMlt)
    cap_lattice: int = 100_000     # congruences listed by all_congruences
    cap_aut: int = 256             # largest group whose automorphisms are listed
    jobs: int = 1
    outdir: str = "."
    seed: int = 0

    def __post_init__(self):
        for name in ("cap_subgroup", "cap_group", "cap_lattice", "cap_aut", "jobs"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")

    def with_env(self, environ=None) -> RunConfig:
        """Apply ``QFORGE_CAPS``, e.g. ``lattice=5000,group=1e6``."""
        raw = (environ if environ is not None else os.environ).get(ENV_VAR, "").strip()
        if not raw:
            return self
        changes = {}
        for part in raw.split(","):
            if not part.strip():
                continue
            key, _, val = part.partition("=")
            key = key.strip().lower().removeprefix("cap_").removeprefix("cap-")
            if key not in _CAP_KEYS:
                raise ValueError(f"{ENV_VAR}: unknown cap {key!r} (known: {', '.join(_CAP_KEYS)})")
            changes[_CAP_KEYS[key]] = int(float(val))
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return asdict(self)

    def config_hash(self) -> str:
        # outdir and jobs do not influence results, so they are left out of the hash
        d = self.as_dict()
        d.pop("outdir")
        d.pop("jobs")
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()[:16]
