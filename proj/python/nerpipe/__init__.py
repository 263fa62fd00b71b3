"""NER data pipeline: corpus filtering, entity-preserving paraphrase augmentation,
instruction dataset building and entity-level evaluation."""

import json as _json

from . import _core
from ._core import (
    AnnotatedSentence,
    BudgetError,
    ConfigError,
    CountError,
    EntitySpan,
    EvalError,
    InvariantError,
    LabelSchema,
    MaskError,
    MaskedTemplate,
    MismatchError,
    NerpipeError,
    ParseError,
    ReinjectError,
    ResponseParseError,
    SchemaError,
    TagFormatError,
    TransportError,
    UnknownLabelError,
    bio_to_spans,
    build_instruction,
    build_paraphrase_prompt,
    count_tokens,
    emit_jsonl,
    filter_corpus,
    load_schema,
    mask_entities,
    parse_conll,
    parse_jsonl,
    parse_schema,
    parse_variants,
    read_corpus,
    reinject_entities,
    render_generations,
    run_cli,
    sample_corpus,
    similarity,
    slash_to_tags,
    spans_to_bio,
    spans_to_slash,
)


def evaluate(gold, generations, format="flat"):
    """Score {id: output} generations against gold; returns the report as a dict."""
    return _json.loads(_core.evaluate(gold, generations, format))


def augment_with_fixture(sentences, fixture, n_variants=2, max_parallel=4):
    """Augment with a scripted response fixture; returns (variants, summary dict)."""
    variants, summary = _core.augment_with_fixture(sentences, fixture, n_variants, max_parallel)
    return variants, _json.loads(summary)


def build_examples(sentence, schema, include_guidelines=True, max_tokens=2048):
    """Instruction-tuning records for one sentence, chunked to the token budget."""
    text = _core.build_examples(sentence, schema, include_guidelines, max_tokens)
    return [_json.loads(line) for line in text.splitlines()]
