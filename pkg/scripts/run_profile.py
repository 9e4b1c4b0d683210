"""Mean link time against the per-tile candidate count K on a dense label corpus."""

import argparse

from pnel.embeddings import WordVectorTable
from pnel.evaluation import format_table, profile_k
from pnel.featurizer import QuestionRecord, Resources
from pnel.kg_store import build_label_index
from pnel.pipeline import link_question
from pnel.pointer_net import ModelConfig, init_model
from pnel.synthetic import profiling_questions, profiling_store


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--entities", type=int, default=3000)
    ap.add_argument("--questions", type=int, default=10)
    ap.add_argument("--hidden", type=int, default=64)
    ap.add_argument("--k-values", default="10,20,30,40,50")
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    store = profiling_store(args.entities)
    res = Resources(store, build_label_index(store), WordVectorTable(300, {}))
    model = init_model(ModelConfig(hidden=args.hidden, attention_dim=args.hidden // 2))
    data = [QuestionRecord(f"p{i}", q, ()) for i, q in enumerate(profiling_questions(args.questions))]
    ks = [int(k) for k in args.k_values.split(",")]
    rows = profile_k(lambda q, k: link_question(res, model, q, k), data, ks, args.repeats)
    print(format_table([("K", "seconds", "F1")] +
                       [(r.k, f"{r.mean_seconds:.4f}", f"{r.f1:.3f}") for r in rows]))


if __name__ == "__main__":
    main()
