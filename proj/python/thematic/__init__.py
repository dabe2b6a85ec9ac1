"""Multi-run LLM thematic analysis with reliability metrics."""

import json

try:
    from . import _thematic
except ImportError:  # in-tree build: the extension sits outside the package
    import _thematic

ThematicError = _thematic.ThematicError
cohen_kappa = _thematic.cohen_kappa
consistency_pct = _thematic.consistency_pct
cosine_band = _thematic.cosine_band
landis_koch = _thematic.landis_koch
pair_count = _thematic.pair_count
stability_band = _thematic.stability_band
text_similarity = _thematic.text_similarity

__all__ = [
    "ThematicError",
    "analyze",
    "cohen_kappa",
    "consistency_pct",
    "cosine_band",
    "extract_json",
    "generate_report",
    "landis_koch",
    "pair_count",
    "recompute_consensus",
    "simulate",
    "stability_band",
    "text_similarity",
    "validate_prompt",
]


def extract_json(raw, mode="custom"):
    """Returns (value, stage, diagnostics)."""
    text, stage, diagnostics = _thematic.extract_json(raw, mode)
    return json.loads(text), stage, diagnostics


def validate_prompt(body):
    text_var, has_seed, warnings = _thematic.validate_prompt(body)
    return {"text_var": text_var, "has_seed": has_seed, "warnings": list(warnings)}


def analyze(document, config, fixed_clock=None):
    """Runs an ensemble. `config` uses the same keys as the CLI config file."""
    return json.loads(_thematic.analyze(document, json.dumps(config), fixed_clock))


def recompute_consensus(report, threshold):
    return json.loads(_thematic.recompute_consensus(json.dumps(report), threshold))


def generate_report(report, fmt="markdown"):
    return _thematic.generate_report(json.dumps(report), fmt)


def simulate(scenario, trials=10000):
    return _thematic.simulate(json.dumps(scenario), trials)
