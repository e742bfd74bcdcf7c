"""Command-line driver.

Subcommands:
  train       run the sampler on a corpus and write artifacts to --out
  eval        score a predictions file against a gold corpus
  oracle      print the exact posterior table of a tiny corpus
  map-tagset  re-code a corpus's gold tags through a tagset mapping

Exit codes: 0 success, 1 unexpected runtime error, 2 usage or invalid
configuration, 3 malformed or mismatched input data, 4 enumeration budget
refused.

Hyperparameter settings (presets reproduce the published table verbatim;
settings 3 and 4 repeat 1 and 2):
  1: alpha=0.001, beta=0.1, gamma=0.001
  2: alpha=0.003, beta=1,   gamma=0.003
  3: alpha=0.001, beta=0.1, gamma=0.001
  4: alpha=0.003, beta=1,   gamma=0.003
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path
from typing import Optional

import numpy as np

import stemtag
from stemtag.corpus import (
    BUILTIN_MAPPINGS,
    Corpus,
    CorpusFormatError,
    TagsetMapping,
    apply_mapping,
    build_split_support,
    iter_corpus_lines,
    load_builtin_mapping,
    load_corpus,
    load_mapping,
)
from stemtag.metrics import EvalReport, labels_to_contingency, score_predictions
from stemtag.model import VARIANTS, Hyperparams
from stemtag.oracle import BudgetExceededError, EnumerationBudget, exact_posterior
from stemtag.sampler import SamplerConfig, run

SETTINGS = {
    1: (0.001, 0.1, 0.001),
    2: (0.003, 1.0, 0.003),
    3: (0.001, 0.1, 0.001),
    4: (0.003, 1.0, 0.003),
}

_DEFAULTS = {
    "corpus": None,
    "mapping": None,
    "variant": "w",
    "setting": None,
    "alpha": 0.001,
    "beta": 0.1,
    "gamma": 0.001,
    "iterations": 1000,
    "seed": 0,
    "tags": None,
    "lowercase": False,
    "anneal_schedule": None,
}

_INT_KEYS = {"setting", "iterations", "seed", "tags"}
_FLOAT_KEYS = {"alpha", "beta", "gamma"}
_BOOL_KEYS = {"lowercase"}


class UsageError(ValueError):
    """Invalid flag/config combination; maps to exit code 2."""


def _parse_schedule(text: str) -> tuple[tuple[int, float], ...]:
    """Parse "sweep:inv_temp,sweep:inv_temp,..." breakpoint lists."""
    points = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        pieces = part.split(":")
        if len(pieces) != 2:
            raise UsageError(
                f"bad schedule element {part!r}; expected sweep_index:inv_temp"
            )
        try:
            points.append((int(pieces[0]), float(pieces[1])))
        except ValueError:
            raise UsageError(f"bad schedule element {part!r}") from None
    if not points:
        raise UsageError("annealing schedule is empty")
    return tuple(points)


def _parse_config_file(path: str) -> dict:
    """Flat key=value file, or a manifest JSON (its "config" object is used)."""
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.lstrip()
    if stripped.startswith("{"):
        obj = json.loads(text)
        cfg = obj.get("config", obj)
        if not isinstance(cfg, dict):
            raise UsageError(f"config JSON in {path} has no config object")
        unknown = set(cfg) - set(_DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys in {path}: {sorted(unknown)}")
        return dict(cfg)
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path} line {lineno}: expected key=value")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        value = value.strip()
        if key not in _DEFAULTS:
            raise UsageError(f"{path} line {lineno}: unknown key {key!r}")
        try:
            if key in _INT_KEYS:
                out[key] = int(value)
            elif key in _FLOAT_KEYS:
                out[key] = float(value)
            elif key in _BOOL_KEYS:
                if value.lower() in ("true", "1", "yes"):
                    out[key] = True
                elif value.lower() in ("false", "0", "no"):
                    out[key] = False
                else:
                    raise ValueError(value)
            else:
                out[key] = value
        except ValueError:
            raise UsageError(
                f"{path} line {lineno}: bad value {value!r} for {key!r}"
            ) from None
    return out


def _resolve_train_config(args: argparse.Namespace) -> dict:
    """Defaults, then config file (its setting first), then CLI setting,
    then explicit CLI flags.
    """
    cfg = dict(_DEFAULTS)
    if args.config:
        file_cfg = _parse_config_file(args.config)
        file_setting = file_cfg.get("setting")
        if file_setting is not None:
            if file_setting not in SETTINGS:
                raise UsageError(f"unknown setting {file_setting!r} in config file")
            cfg["setting"] = file_setting
            cfg["alpha"], cfg["beta"], cfg["gamma"] = SETTINGS[file_setting]
        for key, value in file_cfg.items():
            if key != "setting":
                cfg[key] = value
    if getattr(args, "setting", None) is not None:
        cfg["setting"] = args.setting
        cfg["alpha"], cfg["beta"], cfg["gamma"] = SETTINGS[args.setting]
    for key in (
        "corpus", "mapping", "variant", "alpha", "beta", "gamma",
        "iterations", "seed", "tags", "anneal_schedule",
    ):
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    if getattr(args, "lowercase", None):
        cfg["lowercase"] = True
    return cfg


def _resolve_mapping(spec: str) -> TagsetMapping:
    if spec in BUILTIN_MAPPINGS:
        return load_builtin_mapping(spec)
    if Path(spec).exists():
        return load_mapping(spec)
    raise UsageError(
        f"mapping {spec!r} is neither a builtin name ({', '.join(BUILTIN_MAPPINGS)}) "
        "nor an existing file"
    )


def _load_gold_corpus(cfg_corpus: str, mapping_spec, lowercase: bool) -> tuple[Corpus, Optional[TagsetMapping]]:
    corpus = load_corpus(cfg_corpus, lowercase=lowercase)
    mapping = None
    if mapping_spec:
        mapping = _resolve_mapping(mapping_spec)
        if not corpus.has_gold_tags:
            raise CorpusFormatError(
                f"a tagset mapping was given but {cfg_corpus} has no tag column"
            )
        corpus = apply_mapping(corpus, mapping)
    return corpus, mapping


def _resolve_T(cfg: dict, corpus: Corpus, mapping: Optional[TagsetMapping]) -> int:
    if cfg.get("tags") is not None:
        return int(cfg["tags"])
    if mapping is not None:
        return mapping.T
    if corpus.has_gold_tags:
        return len(corpus.tag_names)
    raise UsageError(
        "tag count unknown: pass --tags, or a --mapping, or a corpus with gold tags"
    )


def _sha256(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _json_dump(obj: dict, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


def cmd_train(args: argparse.Namespace) -> int:
    cfg = _resolve_train_config(args)
    if not cfg.get("corpus"):
        raise UsageError("train requires --corpus (flag or config file)")
    if not args.out:
        raise UsageError("train requires --out")
    if cfg["variant"] not in VARIANTS:
        raise UsageError(f"variant must be one of {VARIANTS}, got {cfg['variant']!r}")

    corpus, mapping = _load_gold_corpus(
        cfg["corpus"], cfg.get("mapping"), cfg["lowercase"]
    )
    T = _resolve_T(cfg, corpus, mapping)
    cfg["tags"] = T
    variant = cfg["variant"]
    support = build_split_support(corpus) if variant != "w" else None

    hp = Hyperparams(
        alpha=float(cfg["alpha"]),
        beta=float(cfg["beta"]),
        T=T,
        variant=variant,
        gamma=float(cfg["gamma"]) if variant == "sm" else None,
    )
    schedule = (
        _parse_schedule(cfg["anneal_schedule"])
        if cfg.get("anneal_schedule") is not None
        else None
    )
    config = SamplerConfig(
        iterations=int(cfg["iterations"]),
        seed=int(cfg["seed"]),
        temperature_schedule=schedule,
        variant=variant,
    )

    result = run(corpus, support, hp, config)
    tags = result.final_state.tags
    splits = result.final_state.split_idx

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    artifacts = []

    # Predictions: word TAB tag for "w", word TAB tag TAB stem TAB suffix
    # for the stem variants; blank line between sentences.
    pred_path = out_dir / "predictions.tsv"
    with open(pred_path, "w", encoding="utf-8") as f:
        pos = 0
        for sent in corpus.sentences:
            for tok in sent:
                word = corpus.vocab.string(tok.word_id)
                if variant == "w":
                    f.write(f"{word}\t{tags[pos]}\n")
                else:
                    stem, suffix = support.split_strings(
                        tok.word_id, int(splits[pos])
                    )
                    f.write(f"{word}\t{tags[pos]}\t{stem}\t{suffix}\n")
                pos += 1
            f.write("\n")
    artifacts.append("predictions.tsv")

    trace_path = out_dir / "trace.csv"
    with open(trace_path, "w", encoding="utf-8") as f:
        f.write("sweep,joint_log_prob\n")
        for i, v in enumerate(result.joint_log_prob_trace, start=1):
            # repr of a python float is the shortest digits that round-trip.
            f.write(f"{i},{float(v)!r}\n")
    artifacts.append("trace.csv")

    from stemtag import reporting

    title = f"variant={variant} T={T} seed={cfg['seed']}"
    reporting.save_trace_plot(result.joint_log_prob_trace, out_dir / "trace.png", title)
    artifacts.append("trace.png")

    report = None
    if corpus.has_gold_tags:
        induced_labels = [str(int(t)) for t in tags]
        gold_labels = [
            corpus.tag_names.string(tok.gold_tag)
            for sent in corpus.sentences
            for tok in sent
        ]
        pred_stems = None
        gold_stems = None
        if variant != "w" and corpus.has_gold_stems:
            pred_stems = [
                support.split_strings(int(w), int(k))[0]
                for w, k in zip(corpus.word_ids, splits)
            ]
            gold_stems = [
                tok.gold_stem for sent in corpus.sentences for tok in sent
            ]
        report = score_predictions(
            induced_labels, gold_labels, pred_stems, gold_stems,
            metadata={
                "variant": variant,
                "alpha": hp.alpha,
                "beta": hp.beta,
                "gamma": hp.gamma,
                "seed": int(cfg["seed"]),
                "iterations": int(cfg["iterations"]),
            },
        )
        (out_dir / "report.json").write_text(report.to_json(), encoding="utf-8")
        artifacts.append("report.json")
        cont, induced_names, gold_names = labels_to_contingency(
            induced_labels, gold_labels
        )
        reporting.save_contingency_plot(
            cont.table, induced_names, gold_names,
            out_dir / "contingency.png", title,
        )
        artifacts.append("contingency.png")

    manifest = {
        "version": stemtag.__version__,
        "command": "train",
        "config": {
            "corpus": cfg["corpus"],
            "mapping": cfg.get("mapping"),
            "variant": variant,
            "setting": cfg.get("setting"),
            "alpha": float(cfg["alpha"]),
            "beta": float(cfg["beta"]),
            "gamma": float(cfg["gamma"]) if cfg.get("gamma") is not None else None,
            "iterations": int(cfg["iterations"]),
            "seed": int(cfg["seed"]),
            "tags": T,
            "lowercase": bool(cfg["lowercase"]),
            "anneal_schedule": cfg.get("anneal_schedule"),
        },
        "resolved": {
            "T": T,
            "n_sentences": len(corpus.sentences),
            "n_tokens": corpus.n_tokens,
            "n_word_types": corpus.n_types,
            "n_stem_types": support.S if support is not None else None,
            "n_suffix_types": support.M if support is not None else None,
        },
        "inputs": {
            "corpus_sha256": _sha256(cfg["corpus"]),
            "mapping_sha256": (
                _sha256(cfg["mapping"])
                if cfg.get("mapping") and Path(cfg["mapping"]).exists()
                else None
            ),
        },
        "artifacts": artifacts + ["manifest.json"],
    }
    _json_dump(manifest, out_dir / "manifest.json")

    print(f"wrote {out_dir} ({', '.join(manifest['artifacts'])})")
    print(f"final joint log prob: {result.joint_log_prob_trace[-1]:.6f}")
    print(f"wall time: {result.wall_time:.2f}s")
    if report is not None:
        line = f"many_to_one: {report.many_to_one:.4f}  vi_bits: {report.vi_bits:.4f}"
        if report.stemming_accuracy is not None:
            line += f"  stemming_accuracy: {report.stemming_accuracy:.4f}"
        print(line)
    return 0


def _parse_predictions(path: str) -> tuple[list[list[str]], list[int]]:
    """Token rows (2 or 4 columns each, consistent) and their line numbers."""
    rows: list[list[str]] = []
    lines: list[int] = []
    expected = None
    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            cols = line.split("\t")
            if expected is None:
                if len(cols) not in (2, 4):
                    raise CorpusFormatError(
                        f"predictions rows must have 2 or 4 columns, got {len(cols)}",
                        line=lineno,
                    )
                expected = len(cols)
            if len(cols) != expected:
                raise CorpusFormatError(
                    f"expected {expected} columns, got {len(cols)}", line=lineno
                )
            rows.append(cols)
            lines.append(lineno)
    if not rows:
        raise CorpusFormatError(f"predictions file {path} contains no tokens")
    return rows, lines


def cmd_eval(args: argparse.Namespace) -> int:
    rows, row_lines = _parse_predictions(args.predictions)
    corpus, _ = _load_gold_corpus(args.corpus, args.mapping, bool(args.lowercase))
    if not corpus.has_gold_tags:
        raise CorpusFormatError(f"gold corpus {args.corpus} has no tag column")
    gold_tokens = [tok for sent in corpus.sentences for tok in sent]
    if len(rows) != len(gold_tokens):
        if len(rows) < len(gold_tokens):
            si = len(rows)
            sent_idx, tok_idx, count = 0, 0, 0
            while count < si:
                count += 1
                tok_idx += 1
                if tok_idx == len(corpus.sentences[sent_idx]):
                    sent_idx += 1
                    tok_idx = 0
            where = (
                f"gold line {corpus.token_lines[sent_idx][tok_idx]}"
                if corpus.token_lines
                else f"gold token {si + 1}"
            )
        else:
            where = f"predictions line {row_lines[len(gold_tokens)]}"
        raise CorpusFormatError(
            f"token counts differ: {len(rows)} predicted vs {len(gold_tokens)} gold; "
            f"first unmatched token at {where}"
        )
    induced_labels = [r[1] for r in rows]
    gold_labels = [corpus.tag_names.string(t.gold_tag) for t in gold_tokens]
    pred_stems = [r[2] for r in rows] if len(rows[0]) == 4 else None
    gold_stems = (
        [t.gold_stem for t in gold_tokens] if corpus.has_gold_stems else None
    )
    if pred_stems is None or gold_stems is None:
        pred_stems = gold_stems = None
    report = score_predictions(induced_labels, gold_labels, pred_stems, gold_stems)
    text = report.to_json()
    sys.stdout.write(text)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    return 0


def cmd_oracle(args: argparse.Namespace) -> int:
    cfg = _resolve_train_config(args)
    if not cfg.get("corpus"):
        raise UsageError("oracle requires --corpus")
    if cfg["variant"] not in VARIANTS:
        raise UsageError(f"variant must be one of {VARIANTS}, got {cfg['variant']!r}")
    corpus, mapping = _load_gold_corpus(
        cfg["corpus"], cfg.get("mapping"), cfg["lowercase"]
    )
    T = _resolve_T(cfg, corpus, mapping)
    variant = cfg["variant"]
    support = build_split_support(corpus) if variant != "w" else None
    hp = Hyperparams(
        alpha=float(cfg["alpha"]),
        beta=float(cfg["beta"]),
        T=T,
        variant=variant,
        gamma=float(cfg["gamma"]) if variant == "sm" else None,
    )
    budget = EnumerationBudget(max_assignments=args.max_assignments)
    posterior = exact_posterior(corpus, support, hp, budget)

    def render(assignment) -> str:
        parts = []
        for wid, (t, k) in zip(corpus.word_ids, assignment):
            if variant == "w":
                parts.append(str(t))
            else:
                stem, suffix = support.split_strings(int(wid), k)
                parts.append(f"{t}:{stem}+{suffix}")
        return " ".join(parts)

    rendered = [(render(a), p) for a, p in posterior.items()]
    rendered.sort(key=lambda item: (-item[1], item[0]))
    for text, p in rendered:
        print(f"{text}\t{p:.12g}")
    return 0


def cmd_map_tagset(args: argparse.Namespace) -> int:
    corpus = load_corpus(args.corpus, lowercase=bool(args.lowercase))
    if not corpus.has_gold_tags:
        raise CorpusFormatError(f"corpus {args.corpus} has no tag column to map")
    mapping = _resolve_mapping(args.mapping)
    mapped = apply_mapping(corpus, mapping)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            for line in iter_corpus_lines(mapped):
                f.write(line + "\n")
    else:
        for line in iter_corpus_lines(mapped):
            print(line)
    return 0


def _add_common_hp_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--variant", choices=list(VARIANTS), default=None,
                   help="model variant: w (word), s (stem), sm (stem+suffix)")
    p.add_argument("--setting", type=int, choices=sorted(SETTINGS), default=None,
                   help="hyperparameter preset (see module docs)")
    p.add_argument("--alpha", type=float, default=None, help="transition concentration")
    p.add_argument("--beta", type=float, default=None, help="emission concentration")
    p.add_argument("--gamma", type=float, default=None,
                   help="suffix emission concentration (sm only)")
    p.add_argument("--tags", type=int, default=None,
                   help="induced tag count T (default: mapping size or gold tag count)")
    p.add_argument("--lowercase", action="store_true", default=None,
                   help="lowercase words and gold stems on load")
    p.add_argument("--config", default=None,
                   help="key=value config file or a manifest.json; flags override it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stemtag",
        description="Unsupervised joint part-of-speech tagger and stemmer.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="run the Gibbs sampler, write artifacts")
    p_train.add_argument("--corpus", default=None, help="input corpus file")
    p_train.add_argument("--mapping", default=None,
                         help="tagset mapping: builtin name or file")
    _add_common_hp_flags(p_train)
    p_train.add_argument("--iterations", type=int, default=None,
                         help="Gibbs sweeps (default 1000)")
    p_train.add_argument("--seed", type=int, default=None, help="PRNG seed (default 0)")
    p_train.add_argument("--anneal-schedule", dest="anneal_schedule", default=None,
                         help='breakpoints "sweep:inv_temp,..."; final value must be 1')
    p_train.add_argument("--out", default=None, help="output directory")
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("eval", help="score predictions against a gold corpus")
    p_eval.add_argument("--predictions", required=True, help="predictions.tsv path")
    p_eval.add_argument("--corpus", required=True, help="gold corpus file")
    p_eval.add_argument("--mapping", default=None,
                        help="tagset mapping applied to the gold corpus")
    p_eval.add_argument("--lowercase", action="store_true", default=None,
                        help="lowercase the gold corpus (match a lowercased run)")
    p_eval.add_argument("--out", default=None, help="also write the report JSON here")
    p_eval.set_defaults(func=cmd_eval)

    p_oracle = sub.add_parser("oracle", help="exact posterior of a tiny corpus")
    p_oracle.add_argument("--corpus", default=None, help="tiny corpus file")
    p_oracle.add_argument("--mapping", default=None,
                          help="tagset mapping: builtin name or file")
    _add_common_hp_flags(p_oracle)
    p_oracle.add_argument("--max-assignments", type=int, default=1_000_000,
                          help="enumeration budget (default 1e6)")
    p_oracle.set_defaults(func=cmd_oracle)

    p_map = sub.add_parser("map-tagset", help="re-code gold tags through a mapping")
    p_map.add_argument("--corpus", required=True, help="corpus with fine gold tags")
    p_map.add_argument("--mapping", required=True,
                       help="tagset mapping: builtin name or file")
    p_map.add_argument("--lowercase", action="store_true", default=None)
    p_map.add_argument("--out", default=None, help="output file (default stdout)")
    p_map.set_defaults(func=cmd_map_tagset)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceededError as e:
        print(f"error: {e}", file=sys.stderr)
        return 4
    except (CorpusFormatError, FileNotFoundError, IsADirectoryError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except (UsageError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 1
    except Exception as e:  # pragma: no cover - defensive
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
