"""Synthetic corpora for exercising the classifier end to end.

Two generators:

* keyword dataset -- each label has a planted keyword that fully
  determines it; any competent model should reach near-perfect micro-F1,
  and the planted keyword should dominate occlusion saliency.
* confound corpus -- abstracts whose Result and Conclusion sentences
  share the surface word "results" and are often distinguishable only by
  their position in the abstract; built to separate the plain, context
  and saliency variants.
"""

from __future__ import annotations

import numpy as np

from .classifier import SentenceExample
from .records import Abstract, AnnotatedAbstract, Annotation, Span

PLANTED_KEYWORDS = {
    "BAC": "background",
    "GAP": "however",
    "PUR": "propose",
    "MTD": "method",
    "RST": "results",
    "CLN": "conclude",
    "IMP": "implications",
    "CTN": "contribution",
}

_FILLER = (
    "the a of for on with to and model data task system approach analysis "
    "language learning neural network corpus paper study performance "
    "training evaluation text feature information large deep robust new"
).split()

# eight sentence shells; {k} is the planted keyword, {f} a filler slot
_TEMPLATES = (
    "the {f} {k} of the {f} {f} is {f}",
    "{k} the {f} {f} {f} for {f} {f}",
    "in this {f} we {k} a {f} {f} {f}",
    "our {f} {f} {k} {f} {f} on {f} {f}",
    "{f} {f} and {f} {k} for the {f} {f}",
    "a {f} {f} {f} with {k} on {f} {f}",
    "this {f} {k} {f} {f} {f} of {f}",
    "{f} {f} {f} {k} the {f} {f} {f}",
)


def _fill(template: str, keyword: str, rng: np.random.Generator) -> str:
    out = []
    for piece in template.split():
        if piece == "{k}":
            out.append(keyword)
        elif piece == "{f}":
            out.append(_FILLER[rng.integers(0, len(_FILLER))])
        else:
            out.append(piece)
    sentence = " ".join(out)
    return sentence[0].upper() + sentence[1:] + "."


def make_keyword_dataset(n_train: int = 800, n_test: int = 200, seed: int = 0,
                         multi_label_rate: float = 0.08
                         ) -> tuple[list[SentenceExample], list[SentenceExample]]:
    """Separable sentence dataset: the planted keyword decides the label.

    A small fraction of sentences carry two keywords (and two labels) to
    keep the multi-label path honest.
    """
    rng = np.random.default_rng(seed)
    codes = list(PLANTED_KEYWORDS)
    examples: list[SentenceExample] = []
    for i in range(n_train + n_test):
        code = codes[rng.integers(0, len(codes))]
        template = _TEMPLATES[rng.integers(0, len(_TEMPLATES))]
        text = _fill(template, PLANTED_KEYWORDS[code], rng)
        labels = {code}
        if rng.random() < multi_label_rate:
            other = codes[rng.integers(0, len(codes))]
            if other != code:
                labels.add(other)
                text = text[:-1] + f" and the {PLANTED_KEYWORDS[other]}."
        examples.append(SentenceExample(id=i, text=text, labels=frozenset(labels)))
    return examples[:n_train], examples[n_train:]


# -- confound corpus --

_BAC = (
    "Research on {f} {f} has a long history in the field.",
    "Models for {f} {f} are widely used in the field.",
    "The study of {f} {f} has attracted broad attention.",
)
_GAP = (
    "However existing work on {f} {f} remains limited.",
    "However prior systems handle {f} {f} poorly.",
    "However little attention has been paid to {f} {f}.",
)
_PUR = (
    "We propose a new approach to {f} {f}.",
    "In this paper we propose a framework for {f} {f}.",
    "We propose to study {f} {f} directly.",
)
_MTD = (
    "The method combines {f} {f} with {f} features.",
    "Our method trains a {f} model on {f} data.",
    "The method uses {f} {f} and a {f} encoder.",
)

# Result/Conclusion pools: every sentence contains "results"; the shared
# pool is deliberately usable by either move, so surface form alone
# cannot always decide between RST and CLN.
_RST_HINTED = (
    "The results show the model achieves higher accuracy on {f} {f}.",
    "Experimental results show our system outperforms the baseline on {f} {f}.",
    "The results show a clear gain in accuracy over {f} {f}.",
)
_CLN_HINTED = (
    "Overall the results suggest the approach is effective for {f} {f}.",
    "The results overall confirm the value of the approach to {f} {f}.",
    "Taken together the results suggest this approach suits {f} {f}.",
)
_SHARED_RESULTS = (
    "The results show the strength of the approach on {f} {f}.",
    "The results show the promise of this approach for {f} {f}.",
    "The results show the benefit of the approach across {f} {f}.",
    "The results show the impact of the approach on {f} {f}.",
)

_TOPICS = (
    "machine translation", "question answering", "image retrieval",
    "speech recognition", "text classification", "entity linking",
    "heat transfer", "signal processing", "channel coding", "beam design",
)


def _fill_topic(template: str, rng: np.random.Generator) -> str:
    topic = _TOPICS[rng.integers(0, len(_TOPICS))].split()
    out, ti = [], 0
    for piece in template.split():
        if piece == "{f}":
            out.append(topic[ti % len(topic)])
            ti += 1
        else:
            out.append(piece)
    return " ".join(out)


def make_confound_corpus(n_abstracts: int = 150, seed: int = 0,
                         ambiguous_rate: float = 0.5) -> list[AnnotatedAbstract]:
    """Six-sentence abstracts BAC GAP PUR MTD RST CLN with gold spans.

    With probability ``ambiguous_rate`` the Result and the Conclusion
    sentence are both drawn from a shared "results" pool, so only
    position and neighbors can tell them apart.
    """
    rng = np.random.default_rng(seed)
    corpus: list[AnnotatedAbstract] = []
    for i in range(n_abstracts):
        plan = []
        for code, pool in (("BAC", _BAC), ("GAP", _GAP), ("PUR", _PUR), ("MTD", _MTD)):
            plan.append((code, pool[rng.integers(0, len(pool))]))
        if rng.random() < ambiguous_rate:
            rst_t = _SHARED_RESULTS[rng.integers(0, len(_SHARED_RESULTS))]
        else:
            rst_t = _RST_HINTED[rng.integers(0, len(_RST_HINTED))]
        if rng.random() < ambiguous_rate:
            cln_t = _SHARED_RESULTS[rng.integers(0, len(_SHARED_RESULTS))]
        else:
            cln_t = _CLN_HINTED[rng.integers(0, len(_CLN_HINTED))]
        plan.append(("RST", rst_t))
        plan.append(("CLN", cln_t))

        spans, parts, cursor = [], [], 0
        for code, template in plan:
            sentence = _fill_topic(template, rng)
            if parts:
                cursor += 1  # joining space
            spans.append(Span(cursor, cursor + len(sentence), code))
            parts.append(sentence)
            cursor += len(sentence)
        text = " ".join(parts)
        corpus.append(AnnotatedAbstract(
            abstract=Abstract(id=i, text=text),
            annotation=Annotation(spans=tuple(spans),
                                  provenance=tuple("manual" for _ in spans)),
            status="reviewed"))
    return corpus
