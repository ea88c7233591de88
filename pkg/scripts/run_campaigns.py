"""Run the congruence and coarsest-congruence campaigns and write JSON reports.

    python scripts/run_campaigns.py --cases 500 --seed 1 --depth 5 --out results/
"""
import argparse
import json
from dataclasses import asdict
from pathlib import Path

from ccsdiv.harness import GenConfig, coarsest_campaign, congruence_campaign


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--cases", type=int, default=500)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--depth", type=int, default=5)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()

    cfg = GenConfig(max_depth=args.depth, seed=args.seed)
    args.out.mkdir(parents=True, exist_ok=True)
    status = 0
    for run in (congruence_campaign, coarsest_campaign):
        rep = run(args.cases, cfg, workers=args.workers)
        path = args.out / f"{rep.name}_seed{args.seed}.json"
        path.write_text(rep.to_json(timings=True) + "\n")
        print(f"{rep.name:<11} cases={rep.n_cases} violations={len(rep.violations)} "
              f"time={rep.timings['total_s']:.2f}s stats={json.dumps(rep.stats)} -> {path}")
        status |= not rep.ok
    (args.out / "config.json").write_text(json.dumps(asdict(cfg), indent=2) + "\n")
    raise SystemExit(status)


if __name__ == "__main__":
    main()
