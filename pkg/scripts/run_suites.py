"""Run the property-suite presets on the bundled domains and write one JSON report per run."""
import argparse
import json
from pathlib import Path

from qhgeo.analysis import SuiteConfig, run_suite
from qhgeo.cli import jsonable
from qhgeo.domains import Domain

ROOT = Path(__file__).resolve().parents[1]
RUNS = [("dstar-default", "dstar.json"), ("c01-scaled", "c01.json")]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", type=Path, default=ROOT / "runs")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    args.out.mkdir(exist_ok=True)
    for preset, fname in RUNS:
        dom = Domain.load(ROOT / "data" / fname)
        rep = run_suite(dom, SuiteConfig.preset(preset, seed=args.seed))
        path = args.out / f"{preset}.json"
        path.write_text(json.dumps(jsonable(rep.to_dict()), indent=2))
        bad = [c.name for c in rep.checks if not c.passed]
        print(f"{preset}: {'pass' if rep.passed else 'fail ' + ','.join(bad)} -> {path}")


if __name__ == "__main__":
    main()
