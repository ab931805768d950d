import json
import time
from dataclasses import asdict, dataclass, field

from django.conf import settings


@dataclass
class RunManifest:
    """
    Everything needed to reproduce a command run.
    """

    command: str
    parameters: dict = field(default_factory=dict)
    seeds: dict = field(default_factory=dict)
    version: str = ""
    threads: int = 1
    wall_time: float = 0.0

    @classmethod
    def start(cls, command, parameters):
        manifest = cls(
            command=command,
            parameters={k: _plain(v) for k, v in sorted(parameters.items())},
            version=getattr(settings, "DISKLAB_VERSION", ""),
            threads=int(getattr(settings, "DISKLAB_THREADS", 1)),
        )
        manifest._started = time.perf_counter()
        return manifest

    def finish(self, seeds=None):
        self.seeds = dict(seeds or {})
        self.wall_time = time.perf_counter() - getattr(
            self, "_started", time.perf_counter()
        )
        return self

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True)


def _plain(value):
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return str(value)
