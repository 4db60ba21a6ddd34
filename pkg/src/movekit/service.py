"""Review-loop service: auto-annotate, queue, correct, finalize, retrain.

Retraining runs against all reviewed abstracts, scores the candidate on
a frozen dev split, and promotes it only if dev micro-F1 does not drop
more than epsilon points below the active model's. Models live in a
versioned registry directory; the active model is swapped atomically
under a lock and prediction never blocks on training.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from . import classifier as clf_mod
from .classifier import ModelConfig, MoveClassifier, TrainConfig
from .errors import ConfigError, TrainingError
from .evaluation import SplitSpec, micro_prf, split
from .records import AnnotatedAbstract, derive_status
from .review import ReviewStore
from .segment import SegmenterConfig


@dataclass
class ServiceConfig:
    data_dir: str = "loop_data"
    model_dir: str = "loop_models"
    port: int = 8731
    retrain_threshold: int = 50     # newly reviewed abstracts needed
    promotion_epsilon: float = 0.5  # tolerated dev micro-F1 drop, in points
    dev_split_ratio: float = 0.8
    dev_split_seed: int = 13
    train: TrainConfig = field(default_factory=TrainConfig)
    model: ModelConfig = field(default_factory=ModelConfig)

    @classmethod
    def from_file(cls, path) -> "ServiceConfig":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        tc = TrainConfig(**raw.pop("train", {}))
        mraw = raw.pop("model", {})
        if "encoder" in mraw:
            mraw["encoder"] = clf_mod.EncoderConfig(**mraw["encoder"])
        mc = ModelConfig(**mraw)
        known = {f for f in cls.__dataclass_fields__ if f not in ("train", "model")}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(train=tc, model=mc, **raw)


@dataclass
class EnqueueReport:
    created: int
    skipped: list


@dataclass
class RetrainReport:
    ran: bool
    promoted: bool = False
    reason: str = ""
    new_version: str | None = None
    new_dev_f1: float | None = None
    baseline_dev_f1: float | None = None


class ModelRegistry:
    """Versioned model artifacts under one directory.

    ``versions/<name>/`` holds artifacts; ``active.json`` points at the
    promoted one; ``state.json`` keeps the frozen dev abstract ids and
    the reviewed-count watermark of the last training run.
    """

    def __init__(self, model_dir):
        self.root = Path(model_dir)
        (self.root / "versions").mkdir(parents=True, exist_ok=True)
        self.state_path = self.root / "state.json"
        self.active_path = self.root / "active.json"

    def state(self) -> dict:
        if self.state_path.exists():
            return json.loads(self.state_path.read_text(encoding="utf-8"))
        return {"dev_ids": None, "last_reviewed_count": 0, "n_versions": 0,
                "lineage": []}

    def save_state(self, state: dict) -> None:
        self.state_path.write_text(json.dumps(state, indent=2) + "\n", encoding="utf-8")

    def save_version(self, model: MoveClassifier, promoted: bool, info: dict) -> str:
        state = self.state()
        state["n_versions"] += 1
        name = f"v{state['n_versions']}"
        model.save(self.root / "versions" / name)
        state["lineage"].append({"name": name, "model_version": model.model_version,
                                 "promoted": promoted, **info})
        self.save_state(state)
        if promoted:
            self.active_path.write_text(
                json.dumps({"name": name, "model_version": model.model_version,
                            "dev_f1": info.get("dev_f1")}) + "\n", encoding="utf-8")
        return name

    def active_model(self) -> MoveClassifier | None:
        if not self.active_path.exists():
            return None
        pointer = json.loads(self.active_path.read_text(encoding="utf-8"))
        return MoveClassifier.load(self.root / "versions" / pointer["name"])

    def active_info(self) -> dict | None:
        if not self.active_path.exists():
            return None
        return json.loads(self.active_path.read_text(encoding="utf-8"))


class LoopService:
    def __init__(self, config: ServiceConfig, store: ReviewStore | None = None,
                 model: MoveClassifier | None = None,
                 seg_cfg: SegmenterConfig | None = None):
        self.config = config
        self.store = store or ReviewStore(config.data_dir)
        self.registry = ModelRegistry(config.model_dir)
        self.seg_cfg = seg_cfg
        self._model_lock = threading.Lock()
        self._model = model if model is not None else self.registry.active_model()

    @property
    def model(self) -> MoveClassifier | None:
        with self._model_lock:
            return self._model

    def _swap_model(self, model: MoveClassifier) -> None:
        with self._model_lock:
            self._model = model

    # -- queue operations --

    def enqueue(self, abstracts: Sequence[AnnotatedAbstract]) -> EnqueueReport:
        """Auto-annotate unlabeled abstracts and queue them for review."""
        model = self.model
        if model is None:
            raise ConfigError("no trained model available for auto-annotation")
        created, skipped = 0, []
        known = self.store.known_ids()
        for aa in abstracts:
            if str(aa.abstract.id) in known or aa.status != "unlabeled":
                skipped.append(aa.abstract.id)
                continue
            annotation = model.predict_abstract(aa.abstract, self.seg_cfg)
            record = AnnotatedAbstract(abstract=aa.abstract, annotation=annotation,
                                       status=derive_status(annotation))
            if self.store.add_auto_annotated(record):
                created += 1
                known.add(str(aa.abstract.id))
            else:
                skipped.append(aa.abstract.id)
        return EnqueueReport(created=created, skipped=skipped)

    def next_task(self, reviewer: str | None = None):
        return self.store.next_task(reviewer)

    def submit_correction(self, abstract_id, expected_version, spans, reviewer=None):
        return self.store.submit_correction(abstract_id, expected_version, spans,
                                            reviewer)

    def finalize(self, abstract_id) -> AnnotatedAbstract:
        return self.store.finalize(abstract_id)

    def confusion_report(self, since_ts: float | None = None):
        return self.store.confusion_report(since_ts)

    # -- retraining --

    def retrain(self, force: bool = False,
                trainer: Callable | None = None) -> RetrainReport:
        """Train on all reviewed data; promote behind the regression gate.

        ``trainer(train_examples, dev_examples) -> MoveClassifier`` may be
        injected (tests use this to exercise the gate); the default trains
        with the service's model/train configs.
        """
        reviewed = self.store.reviewed_records()
        state = self.registry.state()
        newly = len(reviewed) - state["last_reviewed_count"]
        if not force and newly < self.config.retrain_threshold:
            return RetrainReport(
                ran=False,
                reason=f"only {newly} newly reviewed abstracts "
                       f"(threshold {self.config.retrain_threshold})")
        if len(reviewed) < 2:
            return RetrainReport(ran=False, reason="not enough reviewed abstracts")

        if state["dev_ids"] is None:
            parts = split(reviewed, SplitSpec(ratio=self.config.dev_split_ratio,
                                              seed=self.config.dev_split_seed),
                          self.seg_cfg)
            state["dev_ids"] = sorted(str(a.abstract.id) for a in parts.test)
        dev_ids = set(state["dev_ids"])
        train_recs = [r for r in reviewed if str(r.abstract.id) not in dev_ids]
        dev_recs = [r for r in reviewed if str(r.abstract.id) in dev_ids]
        if not train_recs or not dev_recs:
            return RetrainReport(ran=False, reason="frozen dev split left no data")

        k = self.config.model.context_window
        train_ex = clf_mod.corpus_to_examples(train_recs, self.seg_cfg, k)
        dev_ex = clf_mod.corpus_to_examples(dev_recs, self.seg_cfg, k)

        try:
            if trainer is not None:
                candidate = trainer(train_ex, dev_ex)
            else:
                candidate, _ = clf_mod.train(train_ex, self.config.train,
                                             self.config.model, dev_examples=dev_ex)
            new_f1 = self._dev_f1(candidate, dev_ex)
        except TrainingError as e:
            return RetrainReport(ran=True, promoted=False,
                                 reason=f"training failed: {e}")

        baseline = self.model
        baseline_f1 = self._dev_f1(baseline, dev_ex) if baseline is not None else None
        promoted = baseline_f1 is None or \
            new_f1 >= baseline_f1 - self.config.promotion_epsilon
        info = {"dev_f1": new_f1, "baseline_dev_f1": baseline_f1,
                "n_train": len(train_ex), "n_dev": len(dev_ex)}
        name = self.registry.save_version(candidate, promoted, info)
        state = self.registry.state()
        state["last_reviewed_count"] = len(reviewed)
        self.registry.save_state(state)
        if promoted:
            self._swap_model(candidate)
            reason = "promoted"
        else:
            reason = (f"regression gate: candidate dev F1 {new_f1:.2f} more than "
                      f"{self.config.promotion_epsilon} points below "
                      f"baseline {baseline_f1:.2f}; archived as {name}")
        self.store.record_retrain({"promoted": promoted, "version": name, **info})
        return RetrainReport(ran=True, promoted=promoted, reason=reason,
                             new_version=name, new_dev_f1=new_f1,
                             baseline_dev_f1=baseline_f1)

    def _dev_f1(self, model: MoveClassifier, dev_ex) -> float:
        preds = model.predict_examples(dev_ex)
        gold = {ex.id: set(ex.labels) for ex in dev_ex}
        pred = {ex.id: set(p.labels) for ex, p in zip(dev_ex, preds)}
        return micro_prf(gold, pred).f1

    # -- introspection --

    def saliency_for_sentence(self, abstract_id, sentence_index: int):
        """Debug saliency payload for one sentence of a stored abstract."""
        from .saliency import occlusion_saliency
        from .segment import segment_sentences
        model = self.model
        if model is None:
            raise ConfigError("no trained model available")
        task = self.store.get_task(abstract_id)
        sents = segment_sentences(task.record.abstract.text, self.seg_cfg)
        if not 0 <= sentence_index < len(sents):
            raise IndexError(f"sentence index {sentence_index} out of range "
                             f"(abstract has {len(sents)} sentences)")
        sent = sents[sentence_index]
        pred = model.predict(sent.text)
        top = max(pred.probabilities, key=pred.probabilities.get)
        return occlusion_saliency(model, sent.text, top)
