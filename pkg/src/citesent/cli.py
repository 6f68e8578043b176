"""Command-line pipeline: extract, featurize, train, predict, evaluate.

Settings come from defaults, then an optional ``key=value`` config file
(``--config``), then command-line flags. All outputs are written under
``output_dir``::

    out/TypeI/*.xml  out/TypeII/*.xml  out/unlabeled/*.xml   citation records
    out/records.jsonl                                         JSON mirror
    out/extraction_summary.json
    out/features.jsonl
    out/model.json
    out/predictions.csv
    out/report.json  out/report.txt
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import bayes, evaluation
from .context import (CitationRecord, build_record, read_record, split_sentences,
                      write_record, _atomic_write)
from .errors import (AmbiguousReference, ArgumentError, CitesentError, ConversionFailed,
                     DegenerateTraining, NoInTextCitation, NoReferenceSection, RootNotCited,
                     StyleUndetected)
from .extraction import ReferenceStyle, extract_citations
from .ingest import (SentimentLabel, convert_pdf, load_title_index, read_text, safe_filename,
                     scan_corpus)
from .lexicon import extract_features, format_features, load_lexicons, parse_features

logger = logging.getLogger("citesent")

RECORD_DIRS = ("TypeI", "TypeII", "unlabeled")
PROTOCOLS = ("resubstitution", "balanced-windows", "monte-carlo")


@dataclass
class PipelineConfig:
    corpus_dir: str | None = None
    title_index: str | None = None
    lex_pos: str | None = None
    lex_neg: str | None = None
    inc_pos: str | None = None
    inc_neg: str | None = None
    window_before: int = 2
    window_after: int = 2
    max_window: int = 5
    alpha: float = 1.0
    seed: int = 0
    style_override: str | None = None
    converter_cmd: str | None = None
    mc_mode: str = "enumerate"
    output_dir: str = "out"
    co_citation: str = "keep"
    bare_numbers: bool = True
    superscripts: bool = True
    protocol: str = "resubstitution"
    preset: str | None = None
    window_width: int | None = None
    stride: int = 1
    mc_samples: int = 50
    split_fraction: float = 0.5
    predict_all: bool = False

    def validate(self) -> None:
        if min(self.window_before, self.window_after) < 0:
            raise ArgumentError("window_before/window_after must be >= 0")
        if self.window_before + self.window_after + 1 > self.max_window:
            raise ArgumentError("window_before + window_after + 1 must not exceed max_window")
        if not self.alpha > 0:
            raise ArgumentError("alpha must be > 0")
        if self.style_override is not None and self.style_override.upper() not in ReferenceStyle.__members__:
            raise ArgumentError(f"unknown style {self.style_override!r}")
        if self.mc_mode not in ("enumerate", "sample"):
            raise ArgumentError("mc_mode must be 'enumerate' or 'sample'")
        if self.co_citation not in ("keep", "strip"):
            raise ArgumentError("co_citation must be 'keep' or 'strip'")
        if self.protocol not in PROTOCOLS:
            raise ArgumentError(f"protocol must be one of {', '.join(PROTOCOLS)}")

    @property
    def out(self) -> Path:
        return Path(self.output_dir)


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(PipelineConfig)}


def _coerce(name: str, raw: str):
    kind = _FIELD_TYPES[name]
    raw = raw.strip()
    if raw.lower() in ("", "none") and "None" in kind:
        return None
    try:
        if kind.startswith("bool"):
            if raw.lower() not in ("1", "0", "true", "false", "yes", "no", "on", "off"):
                raise ValueError(raw)
            return raw.lower() in ("1", "true", "yes", "on")
        if kind.startswith("int"):
            return int(raw)
        if kind.startswith("float"):
            return float(raw)
    except ValueError:
        raise ArgumentError(f"bad value for {name}: {raw!r}") from None
    return raw


def read_config_file(path: str | Path) -> dict:
    """Parse a flat ``key = value`` file; ``#`` starts a comment line."""
    values = {}
    for lineno, line in enumerate(read_text(path).splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep:
            raise ArgumentError(f"{path}:{lineno}: expected key=value")
        if key not in _FIELD_TYPES:
            raise ArgumentError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = _coerce(key, value)
    return values


def build_config(file_values: dict, flag_values: dict) -> PipelineConfig:
    config = PipelineConfig()
    for source in (file_values, flag_values):
        for key, value in source.items():
            if value is not None:
                setattr(config, key, value)
    config.validate()
    return config


# --------------------------------------------------------------------------
# commands

def _style(config: PipelineConfig) -> ReferenceStyle | None:
    return ReferenceStyle[config.style_override.upper()] if config.style_override else None


def _convert_pdfs(corpus: Path, config: PipelineConfig, summary: dict, diagnostics: list) -> None:
    for pdf in sorted(corpus.glob("*/*.pdf")):
        txt = pdf.with_suffix(".txt")
        if txt.exists():
            continue
        try:
            txt.write_text(convert_pdf(pdf, config.converter_cmd), encoding="utf-8")
        except ConversionFailed as exc:
            if pdf.stem == "root":
                diagnostics.append(f"{pdf}: root conversion failed: {exc}")
            else:
                summary["conversion_failure"] += 1
                diagnostics.append(f"{pdf}: conversion_failure: {exc}")


def cmd_extract(config: PipelineConfig) -> dict:
    """Write one citation record per citing paper and return the summary."""
    if not config.corpus_dir:
        raise ArgumentError("corpus_dir is required")
    corpus = Path(config.corpus_dir)
    if not corpus.is_dir():
        raise FileNotFoundError(f"corpus directory not found: {corpus}")
    summary = {"succeeded": 0, "conversion_failure": 0, "style_not_followed": 0,
               "no_intext_citation": 0}
    diagnostics: list[str] = []
    if config.converter_cmd:
        _convert_pdfs(corpus, config, summary, diagnostics)
    titles = load_title_index(config.title_index, diagnostics) if config.title_index else None
    entries = scan_corpus(corpus, titles, diagnostics)

    out = config.out
    for sub in RECORD_DIRS:
        (out / sub).mkdir(parents=True, exist_ok=True)
        for stale in (out / sub).glob("*.xml"):
            stale.unlink()
    records = []
    style = _style(config)
    for entry in entries:
        for path in entry.citing_paths:
            citing_id = entry.citing_id(path)
            text = read_text(path)
            if not text.strip():
                summary["conversion_failure"] += 1
                diagnostics.append(f"{citing_id}: conversion_failure: empty text")
                continue
            try:
                ex = extract_citations(text, entry.root_title, style,
                                       bare_numbers=config.bare_numbers,
                                       superscripts=config.superscripts)
                record = build_record(citing_id, ex.occurrences, split_sentences(ex.body), ex.root,
                                      entry.labels.get(path), ex.matcher, config.max_window,
                                      config.window_before, config.window_after,
                                      strip_foreign=config.co_citation == "strip")
            except (NoReferenceSection, StyleUndetected, RootNotCited, AmbiguousReference) as exc:
                summary["style_not_followed"] += 1
                diagnostics.append(f"{citing_id}: style_not_followed: {type(exc).__name__}: {exc}")
                continue
            except NoInTextCitation as exc:
                summary["no_intext_citation"] += 1
                diagnostics.append(f"{citing_id}: no_intext_citation: {exc}")
                continue
            write_record(record, out / record.subfolder / f"{safe_filename(citing_id)}.xml")
            records.append(record)
            summary["succeeded"] += 1

    mirror = "".join(json.dumps(r.to_dict(), ensure_ascii=False, sort_keys=True) + "\n" for r in records)
    _atomic_write(out / "records.jsonl", mirror)
    summary["total"] = sum(summary[k] for k in ("succeeded", "conversion_failure",
                                                "style_not_followed", "no_intext_citation"))
    result = {"summary": summary, "diagnostics": diagnostics}
    _atomic_write(out / "extraction_summary.json", json.dumps(result, indent=2, sort_keys=True) + "\n")
    for note in diagnostics:
        logger.info(note)
    return result


def load_records(out: Path) -> list[CitationRecord]:
    paths = sorted(p for sub in RECORD_DIRS for p in (out / sub).glob("*.xml"))
    records = [read_record(p) for p in paths]
    return sorted(records, key=lambda r: r.citing_id)


def cmd_featurize(config: PipelineConfig) -> Path:
    records = load_records(config.out)
    if not records:
        raise CitesentError(f"no records under {config.out}; run 'extract' first")
    lexicons = load_lexicons(config.lex_pos, config.lex_neg, config.inc_pos, config.inc_neg)
    lines = []
    for record in records:
        vector = extract_features(record.corpus, lexicons)
        lines.append(json.dumps({"citing_id": record.citing_id,
                                 "label": record.label.value if record.label else None,
                                 "features": format_features(vector)}, ensure_ascii=False,
                                sort_keys=True))
    path = config.out / "features.jsonl"
    _atomic_write(path, "\n".join(lines) + "\n")
    return path


def load_feature_set(path: Path) -> list[tuple[str, SentimentLabel | None, frozenset]]:
    if not path.exists():
        raise CitesentError(f"{path} not found; run 'featurize' first")
    rows = []
    for line in read_text(path).splitlines():
        if not line.strip():
            continue
        try:
            item = json.loads(line)
            label = SentimentLabel(item["label"]) if item["label"] else None
            rows.append((item["citing_id"], label, parse_features(item["features"])))
        except (ValueError, KeyError, TypeError) as exc:
            raise CitesentError(f"{path}: corrupt feature line: {exc}") from exc
    return rows


def _labeled(rows) -> list[bayes.LabeledExample]:
    return [bayes.LabeledExample(vec, label) for _, label, vec in rows if label is not None]


def cmd_train(config: PipelineConfig) -> Path:
    rows = load_feature_set(config.out / "features.jsonl")
    model = bayes.train(_labeled(rows), config.alpha)
    path = config.out / "model.json"
    bayes.save_model(model, path)
    return path


def cmd_predict(config: PipelineConfig) -> Path:
    model = bayes.load_model(config.out / "model.json")
    rows = load_feature_set(config.out / "features.jsonl")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["citing_id", "label", "confidence"])
    for citing_id, label, vector in rows:
        if label is not None and not config.predict_all:
            continue
        pred = model.predict(vector)
        writer.writerow([citing_id, pred.label.value, f"{pred.confidence:.6f}"])
    path = config.out / "predictions.csv"
    _atomic_write(path, buf.getvalue())
    return path


def make_plan(config: PipelineConfig, n1: int, n2: int) -> evaluation.SplitPlan:
    if config.protocol == "resubstitution":
        return evaluation.make_resubstitution_plan(n1, config.seed)
    if config.protocol == "balanced-windows":
        return evaluation.make_balanced_windows(n1, n2, config.preset, config.seed)
    width = config.window_width or n2
    if config.mc_mode == "sample":
        return evaluation.sample_sliding_windows(n1, width, config.mc_samples, config.seed)
    return evaluation.make_sliding_windows(n1, width, config.stride, config.seed)


def cmd_evaluate(config: PipelineConfig, protocol: str | None = None) -> evaluation.ProtocolResult:
    if protocol is not None:
        config.protocol = protocol
        config.validate()
    rows = load_feature_set(config.out / "features.jsonl")
    by_class = {c: [vec for _, label, vec in rows if label is c] for c in evaluation.CLASSES}
    if not all(by_class.values()):
        raise DegenerateTraining("evaluation needs labelled examples of both classes")
    plan = make_plan(config, len(by_class[SentimentLabel.TypeI]), len(by_class[SentimentLabel.TypeII]))
    result = evaluation.run_protocol(by_class, plan, config.split_fraction, config.seed, config.alpha)
    _atomic_write(config.out / "report.json", result.to_json())
    _atomic_write(config.out / "report.txt", result.render() + "\n")
    return result


# --------------------------------------------------------------------------
# argument parsing

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value configuration file")
    p.add_argument("--corpus-dir")
    p.add_argument("--title-index")
    p.add_argument("--output-dir")
    p.add_argument("--lex-pos")
    p.add_argument("--lex-neg")
    p.add_argument("--inc-pos")
    p.add_argument("--inc-neg")
    p.add_argument("--window-before", type=int)
    p.add_argument("--window-after", type=int)
    p.add_argument("--max-window", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--style-override", choices=[s.value for s in ReferenceStyle])
    p.add_argument("--converter-cmd")
    p.add_argument("--co-citation", choices=["keep", "strip"])
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="citesent", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (("extract", "build citation records from a corpus"),
                            ("featurize", "turn records into lexicon feature vectors"),
                            ("train", "train the Naive-Bayes model on labelled features"),
                            ("predict", "label unlabelled records"),
                            ("evaluate", "run an evaluation protocol")):
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
        if name == "predict":
            p.add_argument("--all", dest="predict_all", action="store_true", default=None,
                           help="also predict records that already carry a label")
        if name == "evaluate":
            p.add_argument("--protocol", choices=PROTOCOLS)
            p.add_argument("--preset", choices=["paper"])
            p.add_argument("--mc-mode", choices=["enumerate", "sample"])
            p.add_argument("--window-width", type=int)
            p.add_argument("--stride", type=int)
            p.add_argument("--mc-samples", type=int)
            p.add_argument("--split-fraction", type=float)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    flags = {k: v for k, v in vars(args).items() if k in _FIELD_TYPES}
    try:
        file_values = read_config_file(args.config) if args.config else {}
        config = build_config(file_values, flags)
        if args.command == "extract":
            result = cmd_extract(config)
            s = result["summary"]
            print(f"succeeded={s['succeeded']} conversion_failure={s['conversion_failure']} "
                  f"style_not_followed={s['style_not_followed']} "
                  f"no_intext_citation={s['no_intext_citation']} total={s['total']}")
        elif args.command == "featurize":
            print(cmd_featurize(config))
        elif args.command == "train":
            print(cmd_train(config))
        elif args.command == "predict":
            print(cmd_predict(config))
        else:
            print(cmd_evaluate(config).render())
    except (CitesentError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
