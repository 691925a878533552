"""Pipeline configuration file (YAML)."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml


class ConfigError(ValueError):
    pass


@dataclass
class PipelineConfig:
    inputs: dict[str, Path]
    roster: Path
    output_root: Path
    parties: Path | None = None
    sessions: Path | None = None
    patterns: Path | None = None
    lexicon: Path | None = None
    protected_names: Path | None = None
    spellcheck: bool = True
    merge_successors: bool = False
    workers: int = 1
    base_dir: Path = field(default_factory=Path.cwd)

    def validate(self) -> None:
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        for name, path in self.inputs.items():
            if not path.is_dir():
                raise ConfigError(f"input root for {name!r} not found: {path}")
        for key in ("roster", "parties", "sessions", "patterns", "lexicon",
                    "protected_names"):
            path = getattr(self, key)
            if path is not None and not path.is_file():
                raise ConfigError(f"{key} file not found: {path}")

    @property
    def corpus_dir(self) -> Path:
        return self.output_root / "out"

    @property
    def original_dir(self) -> Path:
        return self.output_root / "out-original"

    @property
    def corpus_file(self) -> Path:
        return self.output_root / "corpus.jsonl"

    @property
    def stats_dir(self) -> Path:
        return self.output_root / "stats"


_KNOWN = {"inputs", "roster", "output_root", "parties", "sessions", "patterns",
          "lexicon", "protected_names", "spellcheck", "merge_successors",
          "workers"}


def load_config(path, validate=True) -> PipelineConfig:
    """Read a config file; relative paths resolve against its directory."""
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    unknown = set(data) - _KNOWN
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    for key in ("inputs", "roster", "output_root"):
        if key not in data:
            raise ConfigError(f"{path}: missing required key {key!r}")
    base = path.resolve().parent

    def p(value):
        return None if value in (None, "") else (base / str(value))

    if not isinstance(data["inputs"], dict) or not data["inputs"]:
        raise ConfigError(f"{path}: inputs must map parliament -> directory")
    try:
        workers = int(data.get("workers", 1))
    except (TypeError, ValueError):
        raise ConfigError(f"{path}: workers must be an integer") from None
    cfg = PipelineConfig(
        inputs={str(k): p(v) for k, v in data["inputs"].items()},
        roster=p(data["roster"]),
        output_root=p(data["output_root"]),
        parties=p(data.get("parties")),
        sessions=p(data.get("sessions")),
        patterns=p(data.get("patterns")),
        lexicon=p(data.get("lexicon")),
        protected_names=p(data.get("protected_names")),
        spellcheck=bool(data.get("spellcheck", True)),
        merge_successors=bool(data.get("merge_successors", False)),
        workers=workers,
        base_dir=base,
    )
    if validate:
        cfg.validate()
    return cfg
