"""Pipeline configuration: TOML file plus CLI overrides.

A config file is optional; every field has a default that works with the
mock providers.  Unknown keys are rejected rather than ignored so typos
surface as errors instead of silently falling back to defaults.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Mapping

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .errors import ConfigError
from .providers import (
    EmbeddingProviderSpec,
    GenerationProviderSpec,
    HashEmbedder,
    HashLogitsProvider,
    HttpEmbeddingClient,
    HttpGenerationClient,
    HttpLogitsClient,
    ExtractiveGenerator,
    LogitsProviderSpec,
)

__all__ = ["PipelineConfig", "load_config", "build_providers", "config_echo", "CHUNKERS"]

# parent chunker x whether quarter/half children are indexed alongside
CHUNKERS = ("recursive", "paragraph", "logits", "multigranular", "lgmgc")

_MULTI_GRANULAR = {"multigranular", "lgmgc"}
_LOGITS_PARENTS = {"logits", "lgmgc"}


@dataclass(frozen=True)
class PipelineConfig:
    chunker: str = "lgmgc"
    theta: int = 200
    k: int = 5
    context_cap: int = 1500
    jobs: int = 1
    mock: bool = False
    seed: int = 0
    stop_threshold: int | None = None
    window_cap: int | None = None
    sweep_thetas: tuple[int, ...] = (200, 300, 500)
    k_list: tuple[int, ...] = (1, 2, 5, 10, 20)
    corpus_path: str | None = None
    index_path: str | None = None
    store_path: str | None = None
    report_path: str | None = None
    embedding: EmbeddingProviderSpec = field(
        default_factory=lambda: EmbeddingProviderSpec(endpoint="", dimension=256)
    )
    logits: LogitsProviderSpec = field(
        default_factory=lambda: LogitsProviderSpec(endpoint="")
    )
    generation: GenerationProviderSpec = field(
        default_factory=lambda: GenerationProviderSpec(endpoint="")
    )

    def __post_init__(self):
        if self.chunker not in CHUNKERS:
            raise ConfigError(
                f"unknown chunker {self.chunker!r}; expected one of {', '.join(CHUNKERS)}"
            )
        if self.theta < 1:
            raise ConfigError(f"theta must be >= 1, got {self.theta}")
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if self.context_cap < self.theta:
            raise ConfigError(
                f"context_cap ({self.context_cap}) must be >= theta ({self.theta}); "
                "one parent chunk has to fit"
            )
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")
        if not self.sweep_thetas:
            raise ConfigError("sweep_thetas must not be empty")
        if any(t < 1 for t in self.sweep_thetas):
            raise ConfigError("sweep_thetas must all be >= 1")
        if not self.k_list or any(k < 1 for k in self.k_list):
            raise ConfigError("k_list must contain only values >= 1")

    @property
    def multi_granular(self) -> bool:
        return self.chunker in _MULTI_GRANULAR

    @property
    def logits_parents(self) -> bool:
        return self.chunker in _LOGITS_PARENTS


_SPEC_TYPES = {
    "embedding": EmbeddingProviderSpec,
    "logits": LogitsProviderSpec,
    "generation": GenerationProviderSpec,
}


def _build_spec(name: str, table: Mapping[str, object]):
    spec_type = _SPEC_TYPES[name]
    allowed = {f.name for f in fields(spec_type)}
    unknown = set(table) - allowed
    if unknown:
        raise ConfigError(f"[{name}]: unknown keys {sorted(unknown)}")
    # endpoint may be omitted for mock runs; build_providers enforces it
    kwargs = {"endpoint": "", **table}
    if name == "embedding":
        kwargs.setdefault("dimension", 256)
    try:
        return spec_type(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{name}]: {exc}") from exc


def load_config(path: str | Path | None = None, **overrides) -> PipelineConfig:
    """Build a config from an optional TOML file and keyword overrides.

    Overrides with value ``None`` are ignored, so CLI flags can be passed
    straight through whether or not the user set them.
    """
    data: dict[str, object] = {}
    if path is not None:
        try:
            with open(path, "rb") as fh:
                parsed = tomllib.load(fh)
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        pipeline = parsed.pop("pipeline", {})
        if not isinstance(pipeline, dict):
            raise ConfigError("[pipeline] must be a table")
        data.update(pipeline)
        for section in ("embedding", "logits", "generation"):
            table = parsed.pop(section, None)
            if table is not None:
                data[section] = _build_spec(section, table)
        if parsed:
            raise ConfigError(f"unknown config sections {sorted(parsed)}")

    data.update({k: v for k, v in overrides.items() if v is not None})

    allowed = {f.name for f in fields(PipelineConfig)}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    for key in ("sweep_thetas", "k_list"):
        if key in data:
            data[key] = tuple(data[key])
    try:
        return PipelineConfig(**data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def build_providers(cfg: PipelineConfig):
    """(logits, embedding, generation) providers for this config.

    With ``mock`` set, all three are deterministic in-process stand-ins;
    otherwise HTTP clients are built and every endpoint must be configured.
    """
    if cfg.mock:
        return (
            HashLogitsProvider(spec=cfg.logits),
            HashEmbedder(dimension=cfg.embedding.dimension, spec=cfg.embedding),
            ExtractiveGenerator(),
        )
    missing = [
        name
        for name, spec in (
            ("logits", cfg.logits),
            ("embedding", cfg.embedding),
            ("generation", cfg.generation),
        )
        if not spec.endpoint
    ]
    if missing:
        raise ConfigError(
            f"no endpoint configured for {', '.join(missing)}; "
            "set one in the config file or pass --mock"
        )
    return (
        HttpLogitsClient(cfg.logits),
        HttpEmbeddingClient(cfg.embedding),
        HttpGenerationClient(cfg.generation),
    )


def config_echo(cfg: PipelineConfig) -> dict[str, object]:
    """The config subset recorded in reports and index files.

    Paths, endpoints, and timing knobs are left out so an artifact's bytes
    depend only on inputs that affect its numbers.  The logits prompt is
    echoed as a hash: it changes break points, so it belongs in the echo,
    but it can be long.
    """
    prompt = cfg.logits.prompt
    return {
        "chunker": cfg.chunker,
        "theta": cfg.theta,
        "k": cfg.k,
        "context_cap": cfg.context_cap,
        "k_list": list(cfg.k_list),
        "mock": cfg.mock,
        "embedding_dimension": cfg.embedding.dimension,
        "stop_threshold": cfg.stop_threshold,
        "window_cap": cfg.window_cap,
        "prompt_sha256": hashlib.sha256(prompt.encode("utf-8")).hexdigest(),
    }
