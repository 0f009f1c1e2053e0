from pathlib import Path

import pytest

from indexkit.config import PipelineConfig
from indexkit.corpus import IngestOptions, TagLexicon, ingest_plain_text

REPO = Path(__file__).resolve().parent.parent
FIXTURES = REPO / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def fixture_config() -> PipelineConfig:
    cfg = PipelineConfig.load(FIXTURES / "config.ini")
    cfg.document_id = "ai_primer"
    return cfg


@pytest.fixture(scope="session")
def fixture_doc(fixture_config):
    text = (FIXTURES / "ai_primer.txt").read_text(encoding="utf-8")
    return ingest_plain_text(text, fixture_config.ingest_options())


@pytest.fixture(scope="session")
def fixture_draft(fixture_doc, fixture_config):
    from indexkit.pipeline import build_draft

    return build_draft(fixture_doc, fixture_config)


TINY_LEXICON = TagLexicon.default()
TINY_LEXICON.entries.update(
    {
        "knowledge": ("knowledge", "NOUN"),
        "representation": ("representation", "NOUN"),
        "representations": ("representation", "NOUN"),
        "acquisition": ("acquisition", "NOUN"),
        "artificial": ("artificial", "ADJ"),
        "intelligence": ("intelligence", "NOUN"),
        "formalism": ("formalism", "NOUN"),
        "formalisms": ("formalism", "NOUN"),
        "frame": ("frame", "NOUN"),
        "frames": ("frame", "NOUN"),
        "script": ("script", "NOUN"),
        "scripts": ("script", "NOUN"),
        "system": ("system", "NOUN"),
        "systems": ("system", "NOUN"),
        "film": ("film", "NOUN"),
        "films": ("film", "NOUN"),
        "movie": ("movie", "NOUN"),
        "movies": ("movie", "NOUN"),
        "index": ("index", "NOUN"),
        "indexes": ("index", "NOUN"),
        "elicitation": ("elicitation", "NOUN"),
        "expert": ("expert", "NOUN"),
        "experts": ("expert", "NOUN"),
    }
)


def make_doc(text: str, document_id: str = "doc") -> "Document":
    return ingest_plain_text(
        text, IngestOptions(document_id=document_id, lexicon=TINY_LEXICON)
    )


@pytest.fixture()
def tiny_doc():
    return make_doc(
        "# Knowledge\n"
        "Knowledge representation matters. Knowledge representation helps."
    )
