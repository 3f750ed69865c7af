"""Text pipeline: preprocessing, auxiliary features, a multi-headed linear
classifier over hashed tokens, and the evaluation metrics.

Feature definitions (all computed on the RAW text; "words" are the
whitespace-separated chunks, "tokens" the lowercased alphanumeric runs):

    polarity            mean lexicon score of matching tokens, in [-1, 1]
    subjectivity        lexicon-matched tokens / tokens, in [0, 1]
    sentiment           sign of the summed lexicon scores: -1, 0, or 1
    wordsVsLength       words / characters
    exclamationMarks    count of '!'
    questionMarks       count of '?'
    digitVsLength       digit characters / characters
    digitVsWord         words containing a digit / words
    punctuationVsLength punctuation characters / characters
    punctuationVsWords  punctuation characters / words, capped at 1
    nounsVsWords        noun-list or noun-suffix tokens / words
    sadVsWords          sad-lexicon tokens / words
    angryVsWords        angry-lexicon tokens / words
    capitalsWords       count of fully-uppercase words (>= 2 letters)
    capitalsVsWords     capitalsWords / words
    uniqueWords         count of distinct tokens
    repeatedWords       count of distinct tokens occurring more than once
    numberOfHashtags    count of '#'-prefixed words

Every ratio is 0 when its denominator is 0; no NaN or infinity is ever
emitted.
"""

from __future__ import annotations

import csv
import json
import math
import re
import string
import zlib
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

from .core import LABEL_NAMES, DispatchError, LabelVector
from .lexicon import (
    ANGRY_WORDS,
    NOUN_SUFFIXES,
    NOUN_WORDS,
    SAD_WORDS,
    SENTIMENT_SCORES,
    STOP_WORDS,
)

MODEL_FORMAT = "model/1"

_URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_MENTION_RE = re.compile(r"@\w+")
_TOKEN_RE = re.compile(r"[a-z0-9']+")
_PUNCTUATION = set(string.punctuation)


class CorpusError(DispatchError):
    """Labeled-corpus rows that violate the expected schema."""


def preprocess(raw_text: str) -> tuple:
    """Lowercased tokens with URLs, mentions, and stop words stripped.

    Returns (tokens, cleaned_text); cleaning is idempotent: preprocessing the
    cleaned text yields the same tokens again.
    """
    text = _URL_RE.sub(" ", raw_text or "")
    text = _MENTION_RE.sub(" ", text)
    tokens = [t for t in _TOKEN_RE.findall(text.lower()) if t not in STOP_WORDS]
    return tokens, " ".join(tokens)


@dataclass(frozen=True)
class FeatureVector:
    polarity: float = 0.0
    subjectivity: float = 0.0
    sentiment: float = 0.0
    wordsVsLength: float = 0.0
    exclamationMarks: float = 0.0
    questionMarks: float = 0.0
    digitVsLength: float = 0.0
    digitVsWord: float = 0.0
    punctuationVsLength: float = 0.0
    punctuationVsWords: float = 0.0
    nounsVsWords: float = 0.0
    sadVsWords: float = 0.0
    angryVsWords: float = 0.0
    capitalsWords: float = 0.0
    capitalsVsWords: float = 0.0
    uniqueWords: float = 0.0
    repeatedWords: float = 0.0
    numberOfHashtags: float = 0.0

    def as_tuple(self) -> tuple:
        return tuple(getattr(self, name) for name in FEATURE_NAMES)

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in FEATURE_NAMES}


FEATURE_NAMES = tuple(FeatureVector.__dataclass_fields__)


def _is_noun(token: str) -> bool:
    return token in NOUN_WORDS or token.endswith(NOUN_SUFFIXES)


def extract_features(raw_text: str) -> FeatureVector:
    """Deterministic auxiliary features of one raw message."""
    raw = raw_text or ""
    length = len(raw)
    words = raw.split()
    n_words = len(words)
    tokens = _TOKEN_RE.findall(raw.lower())

    scores = [SENTIMENT_SCORES[t] for t in tokens if t in SENTIMENT_SCORES]
    total_score = sum(scores)
    counts = Counter(tokens)

    digit_chars = sum(c.isdigit() for c in raw)
    punct_chars = sum(c in _PUNCTUATION for c in raw)
    digit_words = sum(any(c.isdigit() for c in w) for w in words)
    capital_words = sum(
        1 for w in words
        if sum(c.isalpha() for c in w) >= 2
        and all(c.isupper() for c in w if c.isalpha())
    )

    def ratio(num, den):
        return num / den if den else 0.0

    return FeatureVector(
        polarity=ratio(total_score, len(scores)),
        subjectivity=ratio(len(scores), len(tokens)),
        sentiment=float((total_score > 0) - (total_score < 0)),
        wordsVsLength=ratio(n_words, length),
        exclamationMarks=float(raw.count("!")),
        questionMarks=float(raw.count("?")),
        digitVsLength=ratio(digit_chars, length),
        digitVsWord=ratio(digit_words, n_words),
        punctuationVsLength=ratio(punct_chars, length),
        punctuationVsWords=min(1.0, ratio(punct_chars, n_words)),
        nounsVsWords=ratio(sum(_is_noun(t) for t in tokens), n_words),
        sadVsWords=ratio(sum(t in SAD_WORDS for t in tokens), n_words),
        angryVsWords=ratio(sum(t in ANGRY_WORDS for t in tokens), n_words),
        capitalsWords=float(capital_words),
        capitalsVsWords=ratio(capital_words, n_words),
        uniqueWords=float(len(counts)),
        repeatedWords=float(sum(1 for c in counts.values() if c > 1)),
        numberOfHashtags=float(sum(w.startswith("#") and len(w) > 1 for w in words)),
    )


# ---------------------------------------------------------------------------
# Linear multi-headed classifier over hashed tokens + auxiliary features.

@dataclass(frozen=True)
class TrainConfig:
    hash_dim: int = 2 ** 18
    learning_rate: float = 0.05
    epochs: int = 400
    seed: int = 0


def _hash_token(token: str, dim: int) -> int:
    return zlib.crc32(token.encode("utf-8")) % dim


def featurize(raw_text: str, hash_dim: int) -> list:
    """Sparse feature row: hashed token presence, auxiliary block, bias term."""
    tokens, _ = preprocess(raw_text)
    row = {}
    for token in tokens:
        row[_hash_token(token, hash_dim)] = 1.0
    aux = extract_features(raw_text).as_tuple()
    for i, value in enumerate(aux):
        if value != 0.0:
            row[hash_dim + i] = value
    row[hash_dim + len(aux)] = 1.0  # bias
    return sorted(row.items())


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-min(z, 500.0)))
    ez = math.exp(max(z, -500.0))
    return ez / (1.0 + ez)


def _dot(weights: Mapping[int, float], row) -> float:
    return sum(weights.get(i, 0.0) * v for i, v in row)


def head_loss(weights: Mapping[int, float], rows, ys) -> float:
    """Mean logistic loss of one head over featurized rows."""
    total = 0.0
    for row, y in zip(rows, ys):
        p = min(max(_sigmoid(_dot(weights, row)), 1e-12), 1.0 - 1e-12)
        total += -(math.log(p) if y else math.log(1.0 - p))
    return total / len(rows)


def head_gradient(weights: Mapping[int, float], rows, ys) -> dict:
    """Mean gradient of the logistic loss; sparse over touched indices."""
    grad: dict = {}
    for row, y in zip(rows, ys):
        err = _sigmoid(_dot(weights, row)) - y
        for i, v in row:
            grad[i] = grad.get(i, 0.0) + err * v
    n = len(rows)
    return {i: g / n for i, g in grad.items()}


@dataclass
class LinearModel:
    """Six independent binary heads over a shared hashed feature space."""

    hash_dim: int
    heads: dict                  # label -> {index: weight}
    skipped_heads: tuple = ()    # heads without both classes in the corpus
    config: Optional[TrainConfig] = None
    losses: Mapping[str, tuple] = field(default_factory=dict)

    def scores(self, raw_text: str) -> dict:
        """Per-head probability, or None for heads that were never trained."""
        row = featurize(raw_text, self.hash_dim)
        out = {}
        for name in LABEL_NAMES:
            if name in self.skipped_heads:
                out[name] = None
            else:
                out[name] = _sigmoid(_dot(self.heads[name], row))
        return out

    def classify(self, raw_text: str) -> tuple:
        """(LabelVector, scores, unavailable_heads); flag = 1 iff score >= 0.5."""
        scores = self.scores(raw_text)
        flags = {name: (1 if s is not None and s >= 0.5 else 0)
                 for name, s in scores.items()}
        return LabelVector(**flags), scores, tuple(sorted(self.skipped_heads))

    def save(self, path) -> None:
        doc = {
            "format": MODEL_FORMAT,
            "hash_dim": self.hash_dim,
            "skipped_heads": list(self.skipped_heads),
            "config": None if self.config is None else {
                "hash_dim": self.config.hash_dim,
                "learning_rate": self.config.learning_rate,
                "epochs": self.config.epochs,
                "seed": self.config.seed,
            },
            "heads": {name: {str(i): w for i, w in sorted(weights.items())}
                      for name, weights in self.heads.items()},
        }
        Path(path).write_text(json.dumps(doc, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path) -> "LinearModel":
        doc = json.loads(Path(path).read_text())
        if doc.get("format") != MODEL_FORMAT:
            raise DispatchError(f"model file format must be {MODEL_FORMAT!r}")
        cfg = doc.get("config")
        return cls(
            hash_dim=int(doc["hash_dim"]),
            heads={name: {int(i): float(w) for i, w in weights.items()}
                   for name, weights in doc["heads"].items()},
            skipped_heads=tuple(doc.get("skipped_heads") or ()),
            config=TrainConfig(**cfg) if cfg else None,
        )


def train(corpus: Sequence, config: Optional[TrainConfig] = None) -> LinearModel:
    """Full-batch gradient descent per head; deterministic for a fixed config.

    `corpus` rows are (text, LabelVector) pairs. Heads lacking at least one
    positive and one negative example are skipped rather than trained.
    """
    config = config or TrainConfig()
    if not corpus:
        raise CorpusError("empty corpus")
    rows = [featurize(text, config.hash_dim) for text, _ in corpus]
    heads, skipped, losses = {}, [], {}
    for name in LABEL_NAMES:
        ys = [labels.signal(name) for _, labels in corpus]
        if not (any(ys) and not all(ys)):
            skipped.append(name)
            heads[name] = {}
            continue
        weights: dict = {}
        trace = []
        for _ in range(config.epochs):
            grad = head_gradient(weights, rows, ys)
            for i, g in grad.items():
                weights[i] = weights.get(i, 0.0) - config.learning_rate * g
            trace.append(head_loss(weights, rows, ys))
        heads[name] = weights
        losses[name] = tuple(trace)
    return LinearModel(hash_dim=config.hash_dim, heads=heads,
                       skipped_heads=tuple(skipped), config=config, losses=losses)


def load_corpus(path) -> list:
    """CSV with columns text,rescue_needed,flood,water_needed,dcew,injured,sick."""
    expected = ["text", *LABEL_NAMES]
    problems, out = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != expected:
            raise CorpusError(
                f"corpus columns must be {expected}, got {reader.fieldnames}")
        for lineno, row in enumerate(reader, start=2):
            try:
                labels = LabelVector(**{n: int(row[n]) for n in LABEL_NAMES})
            except (TypeError, ValueError) as exc:
                problems.append(f"line {lineno}: {exc}")
                continue
            out.append((row["text"] or "", labels))
    if problems:
        raise CorpusError("; ".join(problems))
    return out


# ---------------------------------------------------------------------------
# Evaluation.

@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    accuracy: float
    support: int


@dataclass(frozen=True)
class EvalReport:
    per_class: Mapping[str, ClassMetrics]
    weighted: ClassMetrics
    auc: Mapping[str, Optional[float]] = field(default_factory=dict)


def _class_metrics(pred: Sequence[int], gold: Sequence[int]) -> ClassMetrics:
    tp = sum(1 for p, g in zip(pred, gold) if p == 1 and g == 1)
    fp = sum(1 for p, g in zip(pred, gold) if p == 1 and g == 0)
    fn = sum(1 for p, g in zip(pred, gold) if p == 0 and g == 1)
    tn = sum(1 for p, g in zip(pred, gold) if p == 0 and g == 0)
    precision = 100.0 * tp / (tp + fp) if tp + fp else 0.0
    recall = 100.0 * tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    accuracy = 100.0 * (tp + tn) / len(gold) if gold else 0.0
    return ClassMetrics(precision, recall, f1, accuracy, tp + fn)


def _auc(scores: Sequence[float], gold: Sequence[int]) -> Optional[float]:
    pos = [s for s, g in zip(scores, gold) if g == 1]
    neg = [s for s, g in zip(scores, gold) if g == 0]
    if not pos or not neg:
        return None
    wins = 0.0
    for p in pos:
        for n in neg:
            if p > n:
                wins += 1.0
            elif p == n:
                wins += 0.5
    return 100.0 * wins / (len(pos) * len(neg))


def evaluate(predictions: Sequence[LabelVector], gold: Sequence[LabelVector],
             scores: Optional[Sequence[Mapping[str, float]]] = None) -> EvalReport:
    """Per-class and support-weighted precision/recall/F1/accuracy, plus AUC
    per head when ranked scores are supplied."""
    if len(predictions) != len(gold):
        raise ValueError(f"prediction/gold length mismatch: "
                         f"{len(predictions)} vs {len(gold)}")
    per_class = {}
    for name in LABEL_NAMES:
        per_class[name] = _class_metrics(
            [getattr(p, name) for p in predictions],
            [getattr(g, name) for g in gold])
    total_support = sum(m.support for m in per_class.values())

    def weighted(attr):
        if not total_support:
            return 0.0
        return sum(getattr(m, attr) * m.support
                   for m in per_class.values()) / total_support

    auc = {}
    if scores is not None:
        for name in LABEL_NAMES:
            head_scores = [s.get(name) for s in scores]
            if any(v is None for v in head_scores):
                auc[name] = None
            else:
                auc[name] = _auc(head_scores, [getattr(g, name) for g in gold])
    return EvalReport(
        per_class=per_class,
        weighted=ClassMetrics(weighted("precision"), weighted("recall"),
                              weighted("f1"), weighted("accuracy"),
                              total_support),
        auc=auc,
    )
