"""Single entry point orchestrating the pipeline via subcommands.

Exit codes: 0 success, 1 validation/configuration error (including bad
usage), 2 unexpected runtime failure. Machine-readable outputs always go
to the output directory; inputs are never mutated.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from . import augment as augment_mod
from . import corpus as corpus_mod
from . import metrics as metrics_mod
from . import preprocess as preprocess_mod
from . import reports
from .config import load_run_config, substream_seed
from .corpus import CLASSES, Corpus, Sample, SplitSpec, load_corpus, save_corpus
from .ensemble import EnsembleSpec, run_ensemble
from .errors import CtlabError, ValidationError
from .trainer import Checkpoint, ModelConfig, compute_class_weights, decide, predict, train


def _write_json(path: Path, payload) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")


def _load_splits(path) -> SplitSpec:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return SplitSpec(
        train=frozenset(data["train"]),
        val=frozenset(data["val"]),
        test=frozenset(data["test"]),
        seed=data["seed"],
    )


@click.group()
def cli():
    """Communal-violence text classification workbench."""


@cli.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", default="out", type=click.Path())
@click.option("--stopwords", type=click.Path(exists=True), default=None)
@click.option("--emoji-map", type=click.Path(exists=True), default=None)
def prep(corpus_path, out_dir, stopwords, emoji_map):
    """Normalize every text and write the preprocessed corpus."""
    overrides = {}
    if stopwords:
        overrides["stopword_list"] = preprocess_mod.load_stopwords(stopwords)
    if emoji_map:
        overrides["emoji_map"] = preprocess_mod.load_emoji_map(emoji_map)
    config = preprocess_mod.default_config(**overrides)
    corpus = load_corpus(corpus_path)
    cleaned = []
    dropped = 0
    for s in corpus:
        text = preprocess_mod.normalize(s.text, config)
        if not text:
            dropped += 1
            continue
        cleaned.append(Sample(s.id, text, s.labels, s.provenance, s.needs_context, s.sublabel))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_corpus(Corpus(cleaned), out / "corpus_preprocessed.jsonl")
    click.echo(f"wrote {len(cleaned)} samples ({dropped} emptied by preprocessing)")


@cli.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--seed", default=0, type=int)
@click.option("--out", "out_dir", default="out", type=click.Path())
def split(corpus_path, seed, out_dir):
    """Stratified train/val/test split, written as id lists."""
    corpus = load_corpus(corpus_path)
    spec = corpus_mod.split(corpus, substream_seed(seed, "split"))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(
        out / "splits.json",
        {
            "train": sorted(spec.train),
            "val": sorted(spec.val),
            "test": sorted(spec.test),
            "seed": spec.seed,
        },
    )
    click.echo(f"train={len(spec.train)} val={len(spec.val)} test={len(spec.test)}")


@cli.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--corpus", "corpus_path", type=click.Path(), default=None)
@click.option("--splits", "splits_path", type=click.Path(), default=None)
@click.option("--checkpoint-dir", type=click.Path(), default=None)
@click.option("--encoder-id", default=None)
@click.option("--epochs", type=int, default=None)
@click.option("--batch-size", type=int, default=None)
@click.option("--learning-rate", type=float, default=None)
@click.option("--patience", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--no-class-weights", is_flag=True, default=False)
def train_cmd(config_path, corpus_path, splits_path, checkpoint_dir, **flags):
    """Fine-tune one model and save the best checkpoint."""
    no_cw = flags.pop("no_class_weights")
    run = load_run_config(
        config_path,
        corpus=corpus_path,
        checkpoint_dir=checkpoint_dir,
        use_class_weights=False if no_cw else None,
        **{k: v for k, v in flags.items() if v is not None},
    ).validated_paths(("corpus",))
    corpus = load_corpus(run.corpus)
    if splits_path:
        spec = _load_splits(splits_path)
    else:
        spec = corpus_mod.split(corpus, substream_seed(run.seed, "split"))
    model_config = ModelConfig(
        encoder_id=run.encoder_id,
        epochs=run.epochs,
        batch_size=run.batch_size,
        learning_rate=run.learning_rate,
        patience=run.patience,
        use_class_weights=run.use_class_weights,
        max_tokens=run.max_tokens,
        seed=substream_seed(run.seed, "train"),
    )
    checkpoint, history = train(model_config, spec, corpus, run.checkpoint_dir)
    click.echo(
        f"best epoch {checkpoint.best_epoch} "
        f"(val macro F1 {checkpoint.val_metric_at_best:.4f}) -> {checkpoint.path}"
    )


cli.add_command(train_cmd, name="train")


@cli.command(name="predict")
@click.option("--checkpoint", "checkpoint_path", required=True, type=click.Path(exists=True))
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", default="out", type=click.Path())
@click.option("--threshold", default=0.5, type=float)
def predict_cmd(checkpoint_path, corpus_path, out_dir, threshold):
    """Score a corpus and write {id, probs, decision} JSONL."""
    checkpoint = Checkpoint.load(checkpoint_path)
    corpus = load_corpus(corpus_path)
    probs = predict(checkpoint, [s.text for s in corpus])
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with (out / "preds.jsonl").open("w", encoding="utf-8") as fh:
        for s, row in zip(corpus, probs):
            fh.write(
                json.dumps(
                    {
                        "id": s.id,
                        "probs": [round(float(p), 6) for p in row],
                        "decision": decide(row, threshold),
                    }
                )
                + "\n"
            )
    click.echo(f"wrote {len(corpus)} predictions to {out / 'preds.jsonl'}")


@cli.command(name="ensemble")
@click.option("--spec", "spec_path", required=True, type=click.Path(exists=True))
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", default="out", type=click.Path())
def ensemble_cmd(spec_path, corpus_path, out_dir):
    """Run a five-member ensemble over a corpus."""
    spec = EnsembleSpec.from_toml(spec_path)
    corpus = load_corpus(corpus_path)
    combined, decisions = run_ensemble(spec, [s.text for s in corpus])
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with (out / "ensemble_preds.jsonl").open("w", encoding="utf-8") as fh:
        for s, row, decision in zip(corpus, combined, decisions):
            fh.write(
                json.dumps(
                    {
                        "id": s.id,
                        "probs": [round(float(p), 6) for p in row],
                        "decision": decision,
                    }
                )
                + "\n"
            )
    click.echo(f"wrote {len(corpus)} ensemble predictions ({spec.combiner})")


@cli.command(name="eval")
@click.option("--pred", "pred_path", required=True, type=click.Path(exists=True))
@click.option("--gold", "gold_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", default="out", type=click.Path())
@click.option("--threshold", default=0.5, type=float)
def eval_cmd(pred_path, gold_path, out_dir, threshold):
    """Metrics report: JSON, rendered table, confusion CSV and heatmap."""
    gold = load_corpus(gold_path)
    preds = {}
    with Path(pred_path).open(encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                rec = json.loads(line)
                preds[rec["id"]] = rec
    missing = [s.id for s in gold if s.id not in preds]
    if missing:
        raise ValidationError(f"predictions missing for ids {missing[:5]}")
    gold_labels = np.array([s.labels.as_tuple() for s in gold])
    probs = np.array([preds[s.id]["probs"] for s in gold])
    pred_binary = (probs >= threshold).astype(int)
    decisions = [preds[s.id]["decision"] for s in gold]
    gold_decisions = [s.labels.decision() for s in gold]
    report = metrics_mod.evaluate(gold_labels, pred_binary, decisions, gold_decisions)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "metrics.json").write_text(report.to_json() + "\n", encoding="utf-8")
    table = reports.render_metrics_table(report)
    (out / "metrics.txt").write_text(table, encoding="utf-8")
    (out / "confusion.csv").write_text(
        reports.confusion_to_csv(report.confusion), encoding="utf-8"
    )
    reports.plot_confusion_heatmap(report.confusion, out / "confusion.png")
    click.echo(table)


@cli.command(name="explain")
@click.option("--checkpoint", "checkpoint_path", required=True, type=click.Path(exists=True))
@click.option("--text", required=True)
@click.option("--target-class", type=click.IntRange(0, 3), default=0)
@click.option("--n-samples", default=1000, type=int)
@click.option("--n-features", default=10, type=int)
@click.option("--seed", default=0, type=int)
@click.option("--out", "out_dir", default="out", type=click.Path())
def explain_cmd(checkpoint_path, text, target_class, n_samples, n_features, seed, out_dir):
    """Local surrogate explanation for one text, as JSON and HTML."""
    from .diagnostics import explain as explain_fn

    checkpoint = Checkpoint.load(checkpoint_path)
    result = explain_fn(
        text,
        checkpoint,
        target_class,
        n_samples=n_samples,
        n_features=n_features,
        seed=substream_seed(seed, "explain"),
    )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "explanation.json", result.to_dict())
    (out / "explanation.html").write_text(
        reports.explanation_to_html(result), encoding="utf-8"
    )
    for token, weight in result.features:
        click.echo(f"{weight:+.4f}  {token}")


@cli.command(name="diagnose")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--encoder-id", default="tiny")
@click.option("--top-k", default=20, type=int)
@click.option("--out", "out_dir", default="out", type=click.Path())
def diagnose_cmd(corpus_path, encoder_id, top_k, out_dir):
    """Frequent words, cross-class similarity table, distribution chart."""
    from .diagnostics import frequent_words, similarity_table

    corpus = load_corpus(corpus_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    frequent = {}
    for cls in (*CLASSES, "nonviolent"):
        try:
            frequent[cls] = frequent_words(corpus, cls, top_k)
        except CtlabError:
            frequent[cls] = []
    _write_json(out / "frequent_words.json", frequent)

    pairs = [
        (a, b)
        for a in frequent.get("noncommunal", [])[:2]
        for b in frequent.get("religio", [])[:6]
    ]
    if pairs:
        table = similarity_table(pairs, [encoder_id])
        (out / "similarity.csv").write_text(table.to_csv(), encoding="utf-8")

    distribution = corpus_mod.class_distribution(corpus, violent_only=False)
    _write_json(out / "distribution.json", distribution)
    reports.plot_class_distribution(distribution, out / "distribution.png")
    click.echo(f"diagnostics written to {out}")


@cli.command(name="mine")
@click.option("--checkpoint", "checkpoint_path", required=True, type=click.Path(exists=True))
@click.option("--texts", "texts_path", required=True, type=click.Path(exists=True))
@click.option("--threshold", default=0.5, type=float)
@click.option("--source", default="external")
@click.option("--out", "out_dir", default="out", type=click.Path())
def mine_cmd(checkpoint_path, texts_path, threshold, source, out_dir):
    """Classifier-gated candidate mining from an external text file."""
    checkpoint = Checkpoint.load(checkpoint_path)
    texts = augment_mod.load_external_texts(texts_path)
    candidates = augment_mod.mine_candidates(texts, checkpoint, threshold, source)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with (out / "candidates.jsonl").open("w", encoding="utf-8") as fh:
        for c in candidates:
            fh.write(
                json.dumps(
                    {
                        "id": c.id,
                        "text": c.text,
                        "source": c.source,
                        "model_score": list(c.model_score),
                        "status": c.status,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
    click.echo(f"{len(candidates)} of {len(texts)} texts cleared threshold {threshold}")


@cli.command(name="annotate-serve")
@click.option("--candidates", "candidates_path", type=click.Path(exists=True), default=None)
@click.option("--annotators", required=True, help="comma-separated annotator ids")
@click.option("--adjudicators", required=True, help="comma-separated adjudicator ids")
@click.option("--log", "log_path", default="annotation_events.jsonl", type=click.Path())
@click.option("--static-dir", type=click.Path(), default=None, help="built UI bundle")
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8000, type=int)
def annotate_serve_cmd(candidates_path, annotators, adjudicators, log_path, static_dir, host, port):
    """Serve the blind-voting annotation API (and the UI if built)."""
    import uvicorn

    from .annotation import AnnotationStore, StoreConfig, create_app

    config = StoreConfig(
        annotators=tuple(a.strip() for a in annotators.split(",") if a.strip()),
        adjudicators=tuple(a.strip() for a in adjudicators.split(",") if a.strip()),
    )
    if Path(log_path).exists():
        store = AnnotationStore.replay(log_path, config)
    else:
        store = AnnotationStore(config, log_path=log_path)
    if candidates_path:
        existing = set(store.tasks)
        new = []
        with Path(candidates_path).open(encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    rec = json.loads(line)
                    if rec["id"] not in existing:
                        new.append(rec)
        store.add_candidates(new)
    uvicorn.run(create_app(store, static_dir=static_dir), host=host, port=port)


@cli.command(name="export-annotations")
@click.option("--log", "log_path", required=True, type=click.Path(exists=True))
@click.option("--annotators", default="", help="comma-separated annotator ids")
@click.option("--adjudicators", default="", help="comma-separated adjudicator ids")
@click.option("--out", "out_dir", default="out", type=click.Path())
def export_annotations_cmd(log_path, annotators, adjudicators, out_dir):
    """Replay an event log and export the accepted batch as corpus JSONL."""
    from .annotation import AnnotationStore, StoreConfig

    config = StoreConfig(
        annotators=tuple(a.strip() for a in annotators.split(",") if a.strip()),
        adjudicators=tuple(a.strip() for a in adjudicators.split(",") if a.strip()),
    )
    store = AnnotationStore.replay(log_path, config)
    records = store.export_accepted()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with (out / "annotation_batch.jsonl").open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
    click.echo(f"exported {len(records)} accepted annotations")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as e:
        return 0 if e.exit_code == 0 else 1
    except (click.UsageError,) as e:
        click.echo(e.format_message(), err=True)
        if e.ctx is not None:
            click.echo(e.ctx.get_usage(), err=True)
        return 1
    except (CtlabError,) as e:
        click.echo(f"error: {e}", err=True)
        return 1
    except Exception as e:  # genuine runtime failure
        click.echo(f"runtime failure: {e}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
