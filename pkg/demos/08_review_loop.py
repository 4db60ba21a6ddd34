"""The human-in-the-loop session, end to end, without HTTP.

Auto-annotate a batch, review it (one relabel, one sentence split into
two moves), finalize everything, inspect the correction pattern report,
and watch the retrain promotion gate reject a crippled candidate.
"""

import tempfile
import warnings
from pathlib import Path

import numpy as np

from movekit import ModelConfig, MoveClassifier, TrainConfig, train
from movekit import network
from movekit.classifier import EncoderConfig
from movekit.datasets import make_keyword_dataset
from movekit.records import Abstract, AnnotatedAbstract, Span
from movekit.service import LoopService, ServiceConfig

warnings.simplefilter("ignore")

train_ex, _ = make_keyword_dataset(n_train=300, n_test=0, seed=3)
mc = ModelConfig(encoder=EncoderConfig(vocab_size=400, hidden=48, layers=1,
                                       heads=2, ff=96, max_len=32))
model, _ = train(train_ex, TrainConfig(epochs=10, seed=3), mc)

with tempfile.TemporaryDirectory() as tmp:
    service = LoopService(ServiceConfig(data_dir=str(Path(tmp) / "data"),
                                        model_dir=str(Path(tmp) / "models"),
                                        retrain_threshold=5),
                          model=model)
    batch = [AnnotatedAbstract(abstract=Abstract(id=i, text=(
        f"The background of topic {i} is known. "
        f"However a gap remains in area {i}. "
        f"We propose fix number {i}.")))
        for i in range(6)]
    print("enqueued:", service.enqueue(batch).created, "tasks")

    # reviewer 1: relabel a span
    task = service.next_task("alice")
    spans = list(task.record.annotation.spans)
    spans[0] = Span(spans[0].start, spans[0].end, "CTN")
    v = service.submit_correction(task.abstract_id, task.version, spans, "alice")
    print(f"relabel on abstract {task.abstract_id}: version {task.version} -> {v}")

    # reviewer 2: split a sentence-extent span into two moves
    task = service.next_task("bob")
    first = task.record.annotation.spans[0]
    mid = (first.start + first.end) // 2
    spans = [Span(first.start, mid, "BAC"), Span(mid + 1, first.end, "GAP")]
    spans += list(task.record.annotation.spans[1:])
    service.submit_correction(task.abstract_id, task.version, spans, "bob")
    print(f"split on abstract {task.abstract_id}: one span became two")

    for i in range(6):
        service.finalize(i)
    print("finalized all; reviewed records:", len(service.store.reviewed_records()))
    print("event replay consistent:", service.store.replay_check())

    print("\ncorrection patterns (old -> new, count):")
    for old, new, count in service.confusion_report():
        print(f"  {old} -> {new}: {count}")

    promoted = service.retrain(force=True, trainer=lambda tr, dv: model)
    print(f"\nretrain #1 promoted={promoted.promoted} "
          f"(dev F1 {promoted.new_dev_f1})")

    def crippled(tr, dv):
        bad = MoveClassifier(model.tokenizer, model.config, params={},
                             model_version="crippled")
        bad.params = {k: np.zeros_like(p) for k, p in
                      network.init_params(bad.net_config, seed=0).items()}
        return bad

    blocked = service.retrain(force=True, trainer=crippled)
    print(f"retrain #2 promoted={blocked.promoted}: {blocked.reason}")
