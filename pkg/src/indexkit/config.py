"""Pipeline configuration: `key = value` lines, `#` comments.

Paths in the file are resolved relative to the file itself. Every
referenced file must exist at load time so a bad run fails before any work
is done.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .corpus import DEFAULT_NOUN_SUFFIXES, IngestOptions, TagLexicon
from .errors import BadConfig
from .index import DEFAULT_MAX_DEPTH
from .ranking import RankingWeights, SalienceMultipliers
from .references import RefPolicy
from .terms import DEFAULT_CUE_PHRASES, ChunkOptions

_BOOL = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}


def parse_key_values(text: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise BadConfig(f"line {lineno}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        values[key.strip()] = value.strip()
    return values


def _as_bool(raw: str, key: str) -> bool:
    try:
        return _BOOL[raw.lower()]
    except KeyError:
        raise BadConfig(f"{key}: expected a boolean, got {raw!r}") from None


def _as_int(raw: str, key: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise BadConfig(f"{key}: expected an integer, got {raw!r}") from None


def _as_float(raw: str, key: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise BadConfig(f"{key}: expected a number, got {raw!r}") from None


@dataclass
class PipelineConfig:
    document_id: str = "doc"
    first_page: int = 1
    language: str = "en"
    lexicon_path: Path | None = None
    rules_path: Path | None = None
    synonyms_path: Path | None = None
    min_frequency: int = 1
    cue_phrases: tuple[str, ...] = DEFAULT_CUE_PHRASES
    noun_suffixes: tuple[str, ...] = tuple(DEFAULT_NOUN_SUFFIXES)
    weights: RankingWeights = field(default_factory=RankingWeights)
    salience: SalienceMultipliers = field(default_factory=SalienceMultipliers)
    ref_policy: RefPolicy = field(default_factory=RefPolicy)
    budget: int | None = None
    max_depth: int = DEFAULT_MAX_DEPTH

    def validate(self) -> None:
        self.weights.validate()
        if self.budget is not None and self.budget < 1:
            raise BadConfig("budget must be >= 1")
        if self.min_frequency < 1:
            raise BadConfig("min_frequency must be >= 1")
        for path in (self.lexicon_path, self.rules_path, self.synonyms_path):
            if path is not None and not Path(path).is_file():
                raise BadConfig(f"referenced file does not exist: {path}")

    def ingest_options(self) -> IngestOptions:
        lexicon = (
            TagLexicon.load(self.lexicon_path)
            if self.lexicon_path is not None
            else None
        )
        return IngestOptions(
            document_id=self.document_id,
            first_page=self.first_page,
            language=self.language,
            lexicon=lexicon,
            noun_suffixes=self.noun_suffixes,
        )

    def chunk_options(self) -> ChunkOptions:
        return ChunkOptions(
            min_frequency=self.min_frequency, cue_phrases=self.cue_phrases
        )

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise BadConfig(f"cannot read config: {exc}") from exc
        config = cls.from_values(parse_key_values(text), base_dir=path.parent)
        return config

    @classmethod
    def from_values(
        cls, values: dict[str, str], base_dir: Path | None = None
    ) -> "PipelineConfig":
        base = base_dir or Path(".")
        cfg = cls()

        def path_of(raw: str) -> Path:
            p = Path(raw)
            return p if p.is_absolute() else base / p

        weights = {
            "frequency": cfg.weights.frequency,
            "dispersion": cfg.weights.dispersion,
            "salience": cfg.weights.salience,
            "cohesion": cfg.weights.cohesion,
        }
        multipliers = {
            "heading": cfg.salience.heading,
            "emphasis": cfg.salience.emphasis,
            "cue": cfg.salience.cue,
        }
        for key, raw in values.items():
            if key == "document_id":
                cfg.document_id = raw
            elif key == "first_page":
                cfg.first_page = _as_int(raw, key)
            elif key == "language":
                cfg.language = raw
            elif key == "lexicon":
                cfg.lexicon_path = path_of(raw)
            elif key == "rules":
                cfg.rules_path = path_of(raw)
            elif key == "synonyms":
                cfg.synonyms_path = path_of(raw)
            elif key == "min_frequency":
                cfg.min_frequency = _as_int(raw, key)
            elif key == "cue_phrases":
                cfg.cue_phrases = tuple(
                    p.strip().lower() for p in raw.split(";") if p.strip()
                )
            elif key == "noun_suffixes":
                cfg.noun_suffixes = tuple(
                    s.strip().lower() for s in raw.split(";") if s.strip()
                )
            elif key.startswith("weights."):
                name = key.split(".", 1)[1]
                if name not in weights:
                    raise BadConfig(f"unknown weight {name!r}")
                weights[name] = _as_float(raw, key)
            elif key.startswith("salience."):
                name = key.split(".", 1)[1]
                if name not in multipliers:
                    raise BadConfig(f"unknown salience multiplier {name!r}")
                multipliers[name] = _as_float(raw, key)
            elif key == "mention_threshold":
                cfg.ref_policy.mention_threshold = _as_int(raw, key)
            elif key == "keep_mentions":
                cfg.ref_policy.keep_mentions = _as_bool(raw, key)
            elif key == "variant_closure":
                cfg.ref_policy.variant_closure = _as_bool(raw, key)
            elif key in ("budget", "max_entries"):
                cfg.budget = _as_int(raw, key)
            elif key == "max_depth":
                cfg.max_depth = _as_int(raw, key)
            else:
                raise BadConfig(f"unknown configuration key {key!r}")
        cfg.weights = RankingWeights(**weights)
        cfg.salience = SalienceMultipliers(**multipliers)
        cfg.validate()
        return cfg
