from __future__ import annotations

import os

import pytest

from docground import MatchConfig, SynthParams, generate_synthetic_corpus, parse_layout
from docground.records import loads_gt_records

FIXTURES = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "fixtures")


def read_fixture(name: str) -> str:
    with open(os.path.join(FIXTURES, name), encoding="utf-8") as fh:
        return fh.read()


@pytest.fixture(scope="session")
def doc_small():
    return parse_layout(read_fixture("doc_small.json"))


@pytest.fixture(scope="session")
def doc_multiblock():
    return parse_layout(read_fixture("doc_multiblock.json"))


@pytest.fixture(scope="session")
def default_cfg():
    return MatchConfig()


def _corpus(tmp_path_factory, name: str, **overrides) -> tuple[str, str]:
    out_dir = str(tmp_path_factory.mktemp(name))
    params = SynthParams(**overrides)
    _, gt_path = generate_synthetic_corpus(params, out_dir)
    return out_dir, gt_path


@pytest.fixture(scope="session")
def clean_corpus(tmp_path_factory):
    """Seed-42 corpus, no noise: planted answers must ground perfectly."""
    return _corpus(tmp_path_factory, "corpus-clean", seed=42, n_docs=120, ocr_noise_rate=0.0)


@pytest.fixture(scope="session")
def noisy_corpus(tmp_path_factory):
    """Seed-42 corpus with 2% character noise."""
    return _corpus(tmp_path_factory, "corpus-noisy", seed=42, n_docs=120, ocr_noise_rate=0.02)


@pytest.fixture(scope="session")
def ablation_corpus(tmp_path_factory):
    """Seed-42 corpus with 5% noise and distractor lines for sweep trends."""
    return _corpus(
        tmp_path_factory,
        "corpus-ablation",
        seed=42,
        n_docs=120,
        ocr_noise_rate=0.05,
        distractor_fraction=0.5,
    )


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """A fast 8-document corpus for CLI and format tests."""
    return _corpus(tmp_path_factory, "corpus-small", seed=7, n_docs=8, ocr_noise_rate=0.0)


def load_gts(gt_path: str):
    with open(gt_path, encoding="utf-8") as fh:
        return loads_gt_records(fh.read())
