"""The review service over HTTP: the same loop the browser UI drives.

Spans travel as [start, end, "CODE"] triples; writes carry the version
the client saw and fail with 409 when stale.
"""

import tempfile
import warnings
from pathlib import Path

from fastapi.testclient import TestClient

from movekit import ModelConfig, TrainConfig, train
from movekit.classifier import EncoderConfig
from movekit.datasets import make_keyword_dataset
from movekit.records import Abstract, AnnotatedAbstract
from movekit.server import create_app
from movekit.service import LoopService, ServiceConfig

warnings.simplefilter("ignore")

train_ex, _ = make_keyword_dataset(n_train=300, n_test=0, seed=4)
mc = ModelConfig(encoder=EncoderConfig(vocab_size=400, hidden=48, layers=1,
                                       heads=2, ff=96, max_len=32))
model, _ = train(train_ex, TrainConfig(epochs=10, seed=4), mc)

with tempfile.TemporaryDirectory() as tmp:
    service = LoopService(ServiceConfig(data_dir=str(Path(tmp) / "d"),
                                        model_dir=str(Path(tmp) / "m")),
                          model=model)
    service.enqueue([AnnotatedAbstract(abstract=Abstract(id=1, text=(
        "The background is broad. However gaps remain. We propose a fix.")))])

    with TestClient(create_app(service)) as client:
        labels = client.get("/api/labels").json()["labels"]
        print("labels:", [(l["code"], l["color"]) for l in labels[:3]], "...")

        task = client.get("/api/tasks/next", params={"reviewer": "demo"}).json()["task"]
        print(f"\ntask {task['abstract_id']} v{task['version']}: "
              f"{len(task['label'])} spans over {len(task['sentences'])} sentences")

        spans = task["label"]
        spans[0] = [spans[0][0], spans[0][1], "CTN"]
        ok = client.put(f"/api/abstracts/{task['abstract_id']}/annotation",
                        json={"spans": spans, "expected_version": task["version"],
                              "reviewer": "demo"})
        print("relabel accepted, new version:", ok.json()["version"])

        stale = client.put(f"/api/abstracts/{task['abstract_id']}/annotation",
                           json={"spans": spans, "expected_version": task["version"],
                                 "reviewer": "demo"})
        print("stale write rejected with status:", stale.status_code)

        done = client.post(f"/api/abstracts/{task['abstract_id']}/finalize").json()
        print("finalized, record status:", done["status"])

        sal = client.get(f"/api/saliency/{task['abstract_id']}/2").json()
        print("saliency words:", sal["words"], "->", sal["label"])

        print("\nqueue:", client.get("/api/stats").json()["queue"])

print("\nto run a real server:  movekit serve --config service.json")
