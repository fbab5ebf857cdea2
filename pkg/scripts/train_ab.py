"""Train the collapse A/B pair used by the acceptance suite.

Run A is the vanilla objective (KL weight 1); run B re-balances it
(KL weight 0.1). Both share seed, data, schedule, and architecture, so
the only difference is the weight. Artifacts land in runs/desk_a and
runs/desk_b.

Usage: python3 scripts/train_ab.py [--epochs 30] [--seed 0]
"""

import argparse
import json
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from molvae.config import write_snapshot  # noqa: E402
from molvae.training import desk_train_config, train  # noqa: E402


def run(beta: float, out_dir: str, args) -> dict:
    cfg = desk_train_config(args.train, out_dir, beta, valid_path=args.valid,
                            seed=args.seed, epochs=args.epochs)
    Path(out_dir).mkdir(parents=True, exist_ok=True)
    write_snapshot(cfg, Path(out_dir) / "config.yaml")
    t0 = time.monotonic()
    result = train(cfg)
    final = result.final_valid
    summary = {
        "out_dir": out_dir,
        "beta": beta,
        "steps": result.global_step,
        "minutes": round((time.monotonic() - t0) / 60, 1),
        "final_kl": final.kl,
        "final_mutual_info": final.mutual_info,
        "final_recon_per_token": final.recon_per_token,
    }
    print(json.dumps(summary, indent=2), flush=True)
    return summary


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--train", default="data/train_5k.smi")
    parser.add_argument("--valid", default="data/valid_1k.smi")
    parser.add_argument("--epochs", type=int, default=30)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--only", choices=["a", "b"],
                        help="train a single arm instead of both")
    args = parser.parse_args()

    if args.only != "b":
        run(1.0, "runs/desk_a", args)
    if args.only != "a":
        run(0.1, "runs/desk_b", args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
