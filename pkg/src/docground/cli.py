"""Command-line entry point.

Subcommands: ground, eval, ablate, synth, render, validate. Data goes to
files or stdout, diagnostics to stderr. Exit codes: 0 success, 1 input
or validation error, 2 internal error. Re-running any subcommand with
identical inputs produces byte-identical outputs, including batch
grounding with ``--jobs`` > 1.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from .ablation import AblationError, AblationSpec, DEFAULT_GRANULARITY, load_corpus, run_ablation
from .evaluation import EvalInputError, evaluate_corpus
from .granularity import GroundingResult, ground
from .jsonio import atomic_write_text, dumps_canonical
from .layout import (
    LayoutParseError,
    LayoutValidationError,
    parse_layout,
    validate_document,
)
from .matching import MatchConfig, MatchInputError
from .overlay import OverlayStyle, render_overlay
from .records import (
    RecordError,
    loads_gt_records,
    loads_prediction_records,
    record_to_result,
    result_to_record,
)
from .synthetic import GenerationError, SynthParams, generate_synthetic_corpus

INPUT_ERRORS = (
    LayoutParseError,
    LayoutValidationError,
    MatchInputError,
    EvalInputError,
    RecordError,
    AblationError,
    GenerationError,
    FileNotFoundError,
    IsADirectoryError,
    NotADirectoryError,
)


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _parse_values(spec: str) -> tuple[int, ...]:
    try:
        lo_s, hi_s = spec.split(":", 1)
        lo, hi = int(lo_s), int(hi_s)
    except ValueError as exc:
        raise AblationError(f"--values expects a:b, got '{spec}'") from exc
    if hi < lo:
        raise AblationError(f"--values range is empty: {spec}")
    return tuple(range(lo, hi + 1))


def _build_config(args: argparse.Namespace) -> MatchConfig:
    """Config file first, then individual flag overrides."""
    if getattr(args, "config", None):
        data = json.loads(_read(args.config))
        if not isinstance(data, dict):
            raise MatchInputError("--config file must hold a JSON object")
        cfg = MatchConfig.from_dict(data)
    else:
        cfg = MatchConfig()
    overrides = {}
    for flag, field in (
        ("iou", "iou_threshold"),
        ("max_blocks", "max_blocks"),
        ("max_lines", "max_lines"),
        ("top_k", "top_k"),
        ("threshold", "threshold"),
    ):
        value = getattr(args, flag, None)
        if value is not None:
            overrides[field] = value
    return cfg.with_overrides(**overrides) if overrides else cfg


def _load_question_records(path: str) -> list[dict]:
    data = json.loads(_read(path))
    if not isinstance(data, list):
        raise RecordError("questions file must hold a JSON array of records")
    for rec in data:
        for key in ("question_id", "doc_id", "question", "answer"):
            if key not in rec:
                raise RecordError(f"question record missing '{key}'")
    return data


def _cmd_ground(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    if args.questions:
        if os.path.isdir(args.layout):
            docs = load_corpus(args.layout)
        else:
            doc = parse_layout(_read(args.layout))
            docs = {doc.doc_id: doc}
        questions = _load_question_records(args.questions)
        for rec in questions:
            if rec["doc_id"] not in docs:
                raise RecordError(f"question {rec['question_id']} references unknown doc '{rec['doc_id']}'")

        def _one(rec: dict) -> dict:
            result = ground(
                rec["answer"], rec["question"], docs[rec["doc_id"]], cfg, question_id=rec["question_id"]
            )
            return result_to_record(result, rec["question"])

        jobs = args.jobs or os.cpu_count() or 1
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                records = list(pool.map(_one, questions))
        else:
            records = [_one(rec) for rec in questions]
    else:
        if not args.question or args.answer is None:
            raise MatchInputError("ground needs --question and --answer, or --questions for batch mode")
        doc = parse_layout(_read(args.layout))
        result = ground(args.answer, args.question, doc, cfg, question_id=args.question_id or "q0")
        records = [result_to_record(result, args.question)]
    payload = dumps_canonical(records)
    if args.out:
        atomic_write_text(args.out, payload)
        print(f"wrote {len(records)} prediction record(s) to {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(payload)
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    preds = loads_prediction_records(_read(args.pred))
    gts = loads_gt_records(_read(args.gt))
    report = evaluate_corpus(preds, gts, cfg)
    if args.out:
        atomic_write_text(args.out, report.to_csv())
        print(f"wrote report to {args.out}", file=sys.stderr)
    sys.stdout.write(dumps_canonical(report.to_dict()))
    return 0


def _cmd_ablate(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    parameter = args.param.replace("-", "_")
    granularity = args.granularity
    if granularity in (None, "all"):
        granularity = DEFAULT_GRANULARITY.get(parameter, "line")
    spec = AblationSpec(
        parameter=parameter,
        values=_parse_values(args.values),
        granularity=granularity,
        config=cfg,
    )
    table = run_ablation(args.corpus, args.gt, spec)
    csv_text = table.to_csv()
    if args.out:
        atomic_write_text(args.out, csv_text)
        print(f"wrote ablation table to {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(csv_text)
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    params = SynthParams(
        seed=args.seed if args.seed is not None else 42,
        n_docs=args.n_docs,
        questions_per_doc=args.questions_per_doc,
        ocr_noise_rate=args.noise,
        distractor_fraction=args.distractor_fraction,
    )
    layout_paths, gt_path = generate_synthetic_corpus(params, args.out)
    print(f"wrote {len(layout_paths)} documents and {gt_path}", file=sys.stderr)
    return 0


def _cmd_render(args: argparse.Namespace) -> int:
    doc = parse_layout(_read(args.layout))
    records = loads_prediction_records(_read(args.pred))
    if args.question_id:
        matches = [r for r in records if r.get("question_id") == args.question_id]
        if not matches:
            raise RecordError(f"no prediction record with question_id '{args.question_id}'")
        record = matches[0]
    elif len(records) == 1:
        record = records[0]
    else:
        raise RecordError("prediction file holds several records; pick one with --question-id")
    if record.get("doc_id") != doc.doc_id:
        raise RecordError(
            f"prediction is for doc '{record.get('doc_id')}', layout is '{doc.doc_id}'"
        )
    result = record_to_result(record)
    if args.granularity and args.granularity != "all":
        keep = args.granularity
        result = GroundingResult(
            question_id=result.question_id,
            doc_id=result.doc_id,
            answer=result.answer,
            block_regions=result.block_regions if keep == "block" else (),
            line_regions=result.line_regions if keep == "line" else (),
            word_regions=result.word_regions if keep == "word" else (),
            points=result.points if keep == "point" else (),
            config=result.config,
        )
    svg = render_overlay(doc, result, OverlayStyle())
    if args.out:
        atomic_write_text(args.out, svg)
        print(f"wrote overlay to {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(svg)
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    doc = parse_layout(_read(args.layout), validate=False)
    violations = validate_document(doc)
    sys.stdout.write(dumps_canonical([v.as_dict() for v in violations]))
    if violations:
        print(f"{len(violations)} violation(s) in {args.layout}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="docground",
        description="Ground answers in document layouts and evaluate the results.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON file with matcher configuration fields")
        p.add_argument("--iou", type=float, help="IoU threshold override")
        p.add_argument("--max-blocks", dest="max_blocks", type=int, help="block cap override")
        p.add_argument("--max-lines", dest="max_lines", type=int, help="line cap override")
        p.add_argument("--top-k", dest="top_k", type=int, help="top-k cap override")
        p.add_argument("--threshold", type=float, help="score threshold override")

    p_ground = sub.add_parser("ground", help="localize an answer in a layout")
    p_ground.add_argument("--layout", "-l", required=True, help="layout file, or directory for batch mode")
    p_ground.add_argument("--question", help="question text (single mode)")
    p_ground.add_argument("--answer", help="answer text to localize (single mode)")
    p_ground.add_argument("--questions", "-q", help="JSON file of question records (batch mode)")
    p_ground.add_argument("--question-id", dest="question_id", help="question id for single mode")
    p_ground.add_argument("--jobs", type=int, default=None, help="parallel workers for batch mode")
    p_ground.add_argument("--out", "-o", help="output predictions file (stdout when omitted)")
    add_config_flags(p_ground)
    p_ground.set_defaults(func=_cmd_ground)

    p_eval = sub.add_parser("eval", help="score predictions against ground truth")
    p_eval.add_argument("--pred", required=True, help="predictions file")
    p_eval.add_argument("--gt", required=True, help="ground-truth file")
    p_eval.add_argument("--out", "-o", help="CSV report path (JSON report always on stdout)")
    add_config_flags(p_eval)
    p_eval.set_defaults(func=_cmd_eval)

    p_ablate = sub.add_parser("ablate", help="sweep a region cap and tabulate P/R/F1")
    p_ablate.add_argument("--corpus", required=True, help="corpus directory (layouts or manifest root)")
    p_ablate.add_argument("--gt", required=True, help="ground-truth file")
    p_ablate.add_argument("--param", required=True, choices=["max-blocks", "max-lines"])
    p_ablate.add_argument("--values", required=True, help="inclusive range a:b")
    p_ablate.add_argument(
        "--granularity",
        choices=["block", "line", "word", "point", "all"],
        help="granularity to tabulate (defaults to the swept cap's granularity)",
    )
    p_ablate.add_argument("--out", "-o", help="CSV output path (stdout when omitted)")
    add_config_flags(p_ablate)
    p_ablate.set_defaults(func=_cmd_ablate)

    p_synth = sub.add_parser("synth", help="generate a synthetic planted-answer corpus")
    p_synth.add_argument("--out", "-o", required=True, help="output corpus directory")
    p_synth.add_argument("--seed", type=int, default=42)
    p_synth.add_argument("--n-docs", dest="n_docs", type=int, default=120)
    p_synth.add_argument("--questions-per-doc", dest="questions_per_doc", type=int, default=3)
    p_synth.add_argument("--noise", type=float, default=0.0, help="per-character substitution rate")
    p_synth.add_argument(
        "--distractor-fraction",
        dest="distractor_fraction",
        type=float,
        default=0.0,
        help="fraction of questions that get near-miss distractor lines",
    )
    p_synth.set_defaults(func=_cmd_synth)

    p_render = sub.add_parser("render", help="render an SVG overlay of grounded regions")
    p_render.add_argument("--layout", "-l", required=True)
    p_render.add_argument("--pred", required=True, help="predictions file")
    p_render.add_argument("--question-id", dest="question_id", help="record to render when the file has several")
    p_render.add_argument(
        "--granularity", choices=["block", "line", "word", "point", "all"], default="all"
    )
    p_render.add_argument("--out", "-o", help="SVG output path (stdout when omitted)")
    p_render.set_defaults(func=_cmd_render)

    p_validate = sub.add_parser("validate", help="report layout invariant violations")
    p_validate.add_argument("--layout", "-l", required=True)
    p_validate.set_defaults(func=_cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; the contract wants 1
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as exc:
        print(f"error: malformed JSON input: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # internal failure
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
