"""Marked-position pointer task: train on 200 sequences, score 50 held-out ones."""

import argparse
import json

from pnel.pointer_net import ModelConfig
from pnel.synthetic import run_marked_task


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--epochs", type=int, default=200)
    ap.add_argument("--hidden", type=int, default=32)
    ap.add_argument("--attention-dim", type=int, default=16)
    ap.add_argument("--dim", type=int, default=1142, help="vector width")
    ap.add_argument("--lr", type=float, default=1e-3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--marker", type=float, default=3.0)
    ap.add_argument("--weight-decay", type=float, default=0.0)
    ap.add_argument("--forget-bias", type=float, default=0.0)
    ap.add_argument("--mask-pointed", action="store_true")
    ap.add_argument("--raw", action="store_true", help="skip input standardisation")
    ap.add_argument("--eval-every", type=int, default=10)
    ap.add_argument("--time-budget", type=float, default=None, help="seconds")
    ap.add_argument("--json", action="store_true", help="print the result as JSON")
    args = ap.parse_args()

    cfg = ModelConfig(input_dim=args.dim, hidden=args.hidden, attention_dim=args.attention_dim,
                      lr=args.lr, seed=args.seed, weight_decay=args.weight_decay,
                      forget_bias=args.forget_bias, mask_pointed=args.mask_pointed)

    def report(epoch, loss, tr, te):
        print(f"epoch {epoch:4d}  loss {loss:.4f}  train F1 {tr:.3f}  held-out F1 {te:.3f}", flush=True)

    res = run_marked_task(cfg, args.epochs, marker=args.marker, normalize=not args.raw,
                          eval_every=args.eval_every, time_budget=args.time_budget, report=report)
    if args.json:
        print(json.dumps({"epochs": res.epochs, "seconds": res.seconds,
                          "train_f1": res.train_f1, "test_f1": res.test_f1}))
    else:
        print(f"{res.epochs} epochs in {res.seconds:.1f}s: train F1 {res.train_f1:.3f}, "
              f"held-out F1 {res.test_f1:.3f}")


if __name__ == "__main__":
    main()
