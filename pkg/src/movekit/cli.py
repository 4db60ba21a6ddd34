"""Single command-line entry point.

Subcommands: ingest, annotate, train, stats, eval, compare, serve.
Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import classifier as clf_mod
from .errors import MovekitError
from .evaluation import (
    ComparisonError,
    SplitSpec,
    build_report,
    compare_variants,
    report_to_json_dict,
    report_to_text,
)
from .ingest import parse_bib, parse_tabular_export
from .records import (
    AnnotatedAbstract,
    align_spans_to_sentences,
    derive_status,
    load_corpus,
    save_corpus,
)
from .segment import segment_sentences
from .stats import compute_corpus_stats, stats_to_json_dict, stats_to_text

log = logging.getLogger("movekit")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_USAGE)


def _parse_colspec(spec: str) -> dict[str, str]:
    out = {}
    for part in spec.split(","):
        if "=" not in part:
            raise MovekitError(f"bad --map entry {part!r}; expected logical=Column")
        logical, column = part.split("=", 1)
        out[logical.strip()] = column.strip()
    return out


def cmd_ingest(args) -> int:
    if args.bib:
        result = parse_bib(Path(args.bib).read_text(encoding="utf-8"),
                           discipline=args.discipline)
    else:
        result = parse_tabular_export(Path(args.tabular).read_text(encoding="utf-8"),
                                      _parse_colspec(args.map),
                                      discipline=args.discipline)
    records = [AnnotatedAbstract(abstract=a) for a in result.abstracts]
    save_corpus(records, args.out)
    print(result.summary())
    for err in result.row_errors:
        log.warning("row error: %s", err)
    return EXIT_OK


def cmd_annotate(args) -> int:
    model_dir = Path(args.model)
    if not (model_dir / "config.json").exists():
        print(f"no model artifact at {model_dir}; train one with "
              f"'movekit train' or point --model at a saved directory",
              file=sys.stderr)
        return EXIT_DATA
    model = clf_mod.MoveClassifier.load(model_dir)
    corpus = load_corpus(getattr(args, "in"))
    out_records = []
    for aa in corpus:
        annotation = model.predict_abstract(aa.abstract)
        out_records.append(AnnotatedAbstract(abstract=aa.abstract,
                                             annotation=annotation,
                                             status=derive_status(annotation)))
    save_corpus(out_records, args.out, extended=True)
    print(f"annotated {len(out_records)} records with model {model.model_version}")
    return EXIT_OK


def cmd_train(args) -> int:
    corpus = load_corpus(getattr(args, "in"))
    labeled = [aa for aa in corpus if aa.annotation.spans]
    if not labeled:
        print("no labeled records to train on", file=sys.stderr)
        return EXIT_DATA
    mc = clf_mod.ModelConfig(variant=args.variant)
    tc = clf_mod.TrainConfig(epochs=args.epochs, seed=args.seed)
    from .evaluation import split
    parts = split(labeled, SplitSpec(ratio=0.9, seed=args.seed))
    train_ex = clf_mod.corpus_to_examples(parts.train, context_window=mc.context_window)
    dev_ex = clf_mod.corpus_to_examples(parts.test, context_window=mc.context_window)
    model, metrics = clf_mod.train(train_ex, tc, mc, dev_examples=dev_ex)
    model.save(args.model_out)
    with open(Path(args.model_out) / "train_log.jsonl", "w", encoding="utf-8") as f:
        for m in metrics:
            f.write(json.dumps(m) + "\n")
    last = metrics[-1]
    print(f"saved {model.model_version} to {args.model_out} "
          f"(final loss {last['loss']:.4f}, dev micro-F1 {last['dev_micro_f1']})")
    return EXIT_OK


def cmd_stats(args) -> int:
    corpus = load_corpus(getattr(args, "in"))
    annotated = [aa for aa in corpus if aa.annotation.spans]
    if not annotated:
        print("empty corpus: no annotated spans to count", file=sys.stderr)
        return EXIT_DATA
    stats = compute_corpus_stats(annotated, partition_key=args.partition)
    print(stats_to_text(stats))
    if args.json:
        Path(args.json).write_text(
            json.dumps(stats_to_json_dict(stats), indent=2) + "\n", encoding="utf-8")
    return EXIT_OK


def _sentence_label_sets(corpus) -> dict:
    sets = {}
    for aa in corpus:
        sents = segment_sentences(aa.abstract.text)
        for sent, labels in zip(sents, align_spans_to_sentences(aa, sents)):
            sets[(str(aa.abstract.id), sent.index)] = labels
    return sets


def cmd_eval(args) -> int:
    gold = _sentence_label_sets(load_corpus(args.gold))
    pred = _sentence_label_sets(load_corpus(args.pred))
    report = build_report(gold, pred)
    print(report_to_text(report))
    if args.json:
        Path(args.json).write_text(
            json.dumps(report_to_json_dict(report), indent=2) + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_compare(args) -> int:
    corpus = load_corpus(getattr(args, "in"))
    labeled = [aa for aa in corpus if aa.annotation.spans]
    if not labeled:
        print("no labeled records to compare on", file=sys.stderr)
        return EXIT_DATA
    variants = [v.strip() for v in args.variants.split(",") if v.strip()]
    tc = clf_mod.TrainConfig(epochs=args.epochs, seed=args.seed)
    try:
        report = compare_variants(labeled, variants, SplitSpec(seed=args.seed), tc)
    except ComparisonError as e:
        print(e.report.to_text())
        print(f"comparison aborted: {e}", file=sys.stderr)
        return EXIT_DATA
    print(report.to_text())
    if args.json:
        Path(args.json).write_text(
            json.dumps(report.to_json_dict(), indent=2) + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app
    from .service import LoopService, ServiceConfig

    config = ServiceConfig.from_file(args.config)
    service = LoopService(config)
    ui_dir = Path(args.ui_dir) if args.ui_dir else None
    app = create_app(service, frontend_dist=ui_dir)
    log.info("serving on port %d (data=%s, models=%s)",
             config.port, config.data_dir, config.model_dir)
    uvicorn.run(app, host=args.host, port=config.port, log_level="warning")
    return EXIT_OK


def build_parser() -> _Parser:
    p = _Parser(prog="movekit",
                description="Move-structure annotation toolkit for abstracts.")
    p.add_argument("--log-level", default="INFO",
                   choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("ingest", help="bibliography/tabular files -> unlabeled JSONL")
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--bib", help="bibliography metadata file")
    group.add_argument("--tabular", help="delimited export with a header row")
    sp.add_argument("--map", default="abstract=Abstract,title=Title",
                    help="logical=Column pairs for --tabular")
    sp.add_argument("--discipline", choices=["NLP", "CV", "ME", "CE"])
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_ingest)

    sp = sub.add_parser("annotate", help="auto-label a corpus with a saved model")
    sp.add_argument("--model", required=True, help="model artifact directory")
    sp.add_argument("--in", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_annotate)

    sp = sub.add_parser("train", help="train a model on labeled JSONL")
    sp.add_argument("--in", required=True)
    sp.add_argument("--model-out", required=True)
    sp.add_argument("--variant", default="plain",
                    choices=["plain", "context", "saliency"])
    sp.add_argument("--epochs", type=int, default=30)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("stats", help="corpus statistics tables")
    sp.add_argument("--in", required=True)
    sp.add_argument("--partition", default="field",
                    choices=["field", "discipline", "none"])
    sp.add_argument("--json", help="also write machine-readable JSON here")
    sp.set_defaults(func=cmd_stats)

    sp = sub.add_parser("eval", help="score predictions against gold")
    sp.add_argument("--gold", required=True)
    sp.add_argument("--pred", required=True)
    sp.add_argument("--json")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("compare", help="train and evaluate model variants")
    sp.add_argument("--in", required=True)
    sp.add_argument("--variants", default="plain,context,saliency")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--epochs", type=int, default=30)
    sp.add_argument("--json")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("serve", help="run the review service + UI")
    sp.add_argument("--config", required=True, help="service config JSON")
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--ui-dir", default="frontend/dist")
    sp.set_defaults(func=cmd_serve)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=args.log_level,
                        format="level=%(levelname)s logger=%(name)s msg=%(message)s")
    try:
        return args.func(args)
    except MovekitError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
