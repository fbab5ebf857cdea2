"""Command-line interface.

Subcommands cover the full workflow: tokenize and validate SMILES files,
train a model, evaluate reconstruction and prior validity, probe collapse
diagnostics, sample molecules, run latent-space optimization, and plot
metrics. Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import subprocess
import sys
import tempfile
from dataclasses import asdict
from pathlib import Path

import numpy as np


def _read_lines(path: str | None) -> list[str]:
    text = sys.stdin.read() if path in (None, "-") else Path(path).read_text()
    return [line.strip() for line in text.splitlines() if line.strip()]


def _out_stream(path: str | None):
    return sys.stdout if path in (None, "-") else open(path, "w")


# -- tokenize ---------------------------------------------------------------

def cmd_tokenize(args) -> int:
    from .smiles import LexicalError, detokenize, tokenize

    lines = _read_lines(args.input)
    out = _out_stream(args.output)
    try:
        for lineno, smiles in enumerate(lines, start=1):
            try:
                tokens = tokenize(smiles)
            except LexicalError as err:
                print(f"line {lineno}: {err}", file=sys.stderr)
                return 1
            if detokenize(tokens) != smiles:
                print(f"line {lineno}: round trip failed", file=sys.stderr)
                return 1
            print(" ".join(tokens), file=out)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


# -- validate ---------------------------------------------------------------

def cmd_validate(args) -> int:
    from .smiles import check_validity

    lines = _read_lines(args.input)
    out = _out_stream(args.output)
    counts: dict[str, int] = {}
    n_valid = 0
    try:
        for smiles in lines:
            verdict = check_validity(smiles)
            if verdict.valid:
                n_valid += 1
                if not args.summary:
                    print(f"VALID\t{smiles}", file=out)
            else:
                label = verdict.error_class.value
                counts[label] = counts.get(label, 0) + 1
                if not args.summary:
                    print(f"INVALID\t{smiles}\t{label}\t{verdict.detail}",
                          file=out)
        if args.summary:
            report = {
                "total": len(lines),
                "valid": n_valid,
                "validity": n_valid / len(lines) if lines else 0.0,
                "errors": counts,
            }
            print(json.dumps(report, indent=2, sort_keys=True), file=out)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


# -- train ------------------------------------------------------------------

def cmd_train(args) -> int:
    from .config import (
        ConfigError,
        apply_overrides,
        build_train_config,
        load_config_file,
        write_snapshot,
    )
    from .training import train

    try:
        config = load_config_file(args.config) if args.config else {}
        if args.train_path:
            config["train_path"] = args.train_path
        if args.out_dir:
            config["out_dir"] = args.out_dir
        if args.valid_path:
            config["valid_path"] = args.valid_path
        cfg = build_train_config(apply_overrides(config, args.set or []))
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2

    Path(cfg.out_dir).mkdir(parents=True, exist_ok=True)
    write_snapshot(cfg, Path(cfg.out_dir) / "config.yaml")
    result = train(cfg)
    summary = {
        "checkpoint": str(result.checkpoint_path),
        "metrics": str(result.metrics_path),
        "steps": result.global_step,
        "wall_time_s": round(result.wall_time, 1),
    }
    if result.final_valid is not None:
        summary["final"] = json.loads(result.final_valid.to_json())
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


# -- evaluate ---------------------------------------------------------------

def cmd_evaluate(args) -> int:
    from .data import load_corpus
    from .evaluation import prior_validity, reconstruction_accuracy
    from .training import load_model

    model, vocab, data = load_model(args.checkpoint)
    max_tokens = data.config.get("max_tokens") or args.max_len
    rng = np.random.default_rng(args.seed)
    report: dict = {"checkpoint": args.checkpoint}

    if not args.skip_recon:
        if not args.data:
            print("error: --data is required unless --skip-recon", file=sys.stderr)
            return 2
        corpus = load_corpus(args.data, max_tokens, vocab=vocab)
        sequences = corpus.sequences[:args.recon_molecules]
        recon = reconstruction_accuracy(
            model, sequences, vocab, rng,
            n_encodings=args.recon_encodings,
            n_decodings=args.recon_decodings,
            max_len=max_tokens + 10)
        report["reconstruction"] = asdict(recon)

    if not args.skip_prior:
        prior = prior_validity(
            model, vocab, rng,
            n_latents=args.prior_latents,
            n_decodings=args.prior_decodings,
            max_len=max_tokens + 10)
        report["prior"] = asdict(prior)

    text = json.dumps(report, indent=2, sort_keys=True)
    if args.output:
        Path(args.output).write_text(text + "\n")
    print(text)
    return 0


# -- diagnose ---------------------------------------------------------------

def cmd_diagnose(args) -> int:
    from .data import load_corpus, pad_batch
    from .diagnostics import (
        alpha_from_ratio,
        batch_mutual_information,
        underestimation_ratio,
    )
    from .training import load_model

    model, vocab, data = load_model(args.checkpoint)
    max_tokens = data.config.get("max_tokens", 60)
    corpus = load_corpus(args.data, max_tokens, vocab=vocab)
    sequences = corpus.sequences[:args.molecules]
    rng = np.random.default_rng(args.seed)
    ids = pad_batch(sequences)

    mi = batch_mutual_information(model, ids, rng, n_samples=args.mi_samples)
    probe = underestimation_ratio(model, ids, rng)
    report = {
        "checkpoint": args.checkpoint,
        "n_molecules": len(sequences),
        "mutual_information": {
            "estimate": mi.mutual_info,
            "avg_kl": mi.avg_kl,
            "marginal_kl": mi.marginal_kl,
            "stderr": mi.stderr,
            "n_samples": mi.n_samples,
        },
        "underestimation": {
            "teacher_forced_per_token": probe.tf_loss,
            "free_running_per_token": probe.fr_loss,
            "ratio": probe.ratio,
            "suggested_alpha": alpha_from_ratio(probe),
        },
    }
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.output:
        Path(args.output).write_text(text + "\n")
    print(text)
    return 0


# -- sample -----------------------------------------------------------------

def cmd_sample(args) -> int:
    from .evaluation import generate_unique_valid
    from .training import load_model

    model, vocab, data = load_model(args.checkpoint)
    max_tokens = data.config.get("max_tokens", 60)
    rng = np.random.default_rng(args.seed)
    report = generate_unique_valid(model, vocab, args.n, rng,
                                   max_len=max_tokens + 10,
                                   timeout_s=args.timeout)
    out = _out_stream(args.output)
    try:
        for smiles in report.smiles:
            print(smiles, file=out)
    finally:
        if out is not sys.stdout:
            out.close()
    print(f"{len(report.smiles)} molecules in {report.attempts} attempts "
          f"({report.wall_time:.1f}s)", file=sys.stderr)
    return 0


# -- optimize ---------------------------------------------------------------

def _scorer_from_table(table):
    def score(smiles: str):
        return table.get(smiles)
    return score


def _scorer_from_command(command: str):
    """Run a shell command: SMILES lines on stdin, smiles,logP,SA CSV out."""
    from .latent_opt import load_property_csv

    def score(smiles: str):
        proc = subprocess.run(command, shell=True, input=smiles + "\n",
                              capture_output=True, text=True)
        if proc.returncode != 0:
            return None
        with tempfile.NamedTemporaryFile("w", suffix=".csv",
                                         delete=False) as fh:
            fh.write(proc.stdout)
            tmp = fh.name
        try:
            table = load_property_csv(tmp)
        finally:
            Path(tmp).unlink(missing_ok=True)
        return table.get(smiles)
    return score


def cmd_optimize(args) -> int:
    from .data import load_corpus, pad_batch
    from .latent_opt import (
        PropertyRecord,
        load_property_csv,
        optimize_molecules,
    )
    from .training import load_model

    model, vocab, data = load_model(args.checkpoint)
    max_tokens = data.config.get("max_tokens", 60)
    rng = np.random.default_rng(args.seed)

    # table answers known molecules, command covers novel proposals;
    # with both, the table is consulted first
    scorers = []
    if args.properties:
        scorers.append(_scorer_from_table(load_property_csv(args.properties)))
    if args.scorer_cmd:
        scorers.append(_scorer_from_command(args.scorer_cmd))
    if not scorers:
        print("error: provide --properties or --scorer-cmd", file=sys.stderr)
        return 2

    def scorer(smiles):
        for fn in scorers:
            props = fn(smiles)
            if props is not None:
                return props
        return None

    corpus = load_corpus(args.seeds, max_tokens, vocab=vocab)
    seed_records = []
    seed_rows = []
    for smiles, seq in zip(corpus.smiles, corpus.sequences):
        props = scorer(smiles)
        if props is None:
            print(f"warning: no properties for seed {smiles}, skipped",
                  file=sys.stderr)
            continue
        seed_records.append(PropertyRecord.from_properties(smiles, *props))
        seed_rows.append(seq)
    if len(seed_records) < 2:
        print("error: need at least 2 scored seed molecules", file=sys.stderr)
        return 1

    from .autodiff import no_grad
    with no_grad():
        dist = model.encode(pad_batch(seed_rows))
    latents = dist.mu.data.astype(np.float64)

    from .smiles import check_validity

    def decode(x: np.ndarray):
        rows, reached_eos = model.generate(
            np.repeat(x[None, :].astype(model.dtype), args.decode_tries, axis=0),
            max_tokens + 10, rng)
        # first decode that is an actual molecule, not merely a finished row
        for r, row in enumerate(rows):
            if not reached_eos[r]:
                continue
            if any(i < 4 for i in row):
                continue
            smiles = "".join(vocab.token(i) for i in row)
            if check_validity(smiles).valid:
                return smiles
        return None

    result = optimize_molecules(decode, latents, seed_records, scorer, rng,
                                n_iterations=args.iterations,
                                batch_size=args.batch)
    best = max(result.records, key=lambda r: r.y)
    report = {
        "best": asdict(best),
        "incumbents": result.incumbents,
        "n_scored": result.n_scored,
        "n_failed": result.n_failed,
        "evaluations": [asdict(r) for r in result.records],
    }
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.output:
        Path(args.output).write_text(text + "\n")
    print(text)
    return 0


# -- plot ---------------------------------------------------------------------

def cmd_plot(args) -> int:
    from .plots import plot_metrics

    plot_metrics(args.metrics, args.output, labels=args.labels)
    print(f"wrote {args.output}")
    return 0


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="molvae",
        description="Sequence VAE toolkit for SMILES molecules")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tokenize", help="split SMILES lines into tokens")
    p.add_argument("--input", "-i", help="SMILES file (default stdin)")
    p.add_argument("--output", "-o", help="output file (default stdout)")
    p.set_defaults(fn=cmd_tokenize)

    p = sub.add_parser("validate", help="check SMILES lines for validity")
    p.add_argument("--input", "-i", help="SMILES file (default stdin)")
    p.add_argument("--output", "-o", help="output file (default stdout)")
    p.add_argument("--summary", action="store_true",
                   help="print one JSON summary instead of per-line verdicts")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("train", help="train a model")
    p.add_argument("--config", "-c", help="YAML config file")
    p.add_argument("--train-path", help="training SMILES file")
    p.add_argument("--out-dir", help="output directory")
    p.add_argument("--valid-path", help="validation SMILES file")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override a config field (repeatable)")
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("evaluate", help="reconstruction and prior validity")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", help="SMILES file for reconstruction")
    p.add_argument("--output", "-o", help="also write the JSON report here")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-len", type=int, default=60,
                   help="fallback token budget when the checkpoint has none")
    p.add_argument("--recon-molecules", type=int, default=100)
    p.add_argument("--recon-encodings", type=int, default=10)
    p.add_argument("--recon-decodings", type=int, default=10)
    p.add_argument("--prior-latents", type=int, default=1000)
    p.add_argument("--prior-decodings", type=int, default=100)
    p.add_argument("--skip-recon", action="store_true")
    p.add_argument("--skip-prior", action="store_true")
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("diagnose", help="collapse and underestimation probes")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True, help="SMILES file")
    p.add_argument("--output", "-o")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--molecules", type=int, default=512)
    p.add_argument("--mi-samples", type=int, default=512)
    p.set_defaults(fn=cmd_diagnose)

    p = sub.add_parser("sample", help="draw unique valid molecules")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("-n", type=int, default=100)
    p.add_argument("--output", "-o")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--timeout", type=float, default=600.0)
    p.set_defaults(fn=cmd_sample)

    p = sub.add_parser("optimize", help="latent-space property optimization")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--seeds", required=True, help="seed SMILES file")
    p.add_argument("--properties", help="CSV property table (smiles,logP,SA)")
    p.add_argument("--scorer-cmd",
                   help="shell command scoring SMILES from stdin to CSV")
    p.add_argument("--iterations", type=int, default=5)
    p.add_argument("--batch", type=int, default=8)
    p.add_argument("--decode-tries", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o")
    p.set_defaults(fn=cmd_optimize)

    p = sub.add_parser("plot", help="six-panel metrics figure")
    p.add_argument("--metrics", nargs="+", required=True,
                   help="metrics.jsonl files, one per run")
    p.add_argument("--output", "-o", required=True)
    p.add_argument("--labels", nargs="+")
    p.set_defaults(fn=cmd_plot)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (FileNotFoundError, ValueError, RuntimeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
