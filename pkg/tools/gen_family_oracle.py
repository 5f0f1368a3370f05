"""Score the parametric oracle family (centered segments and plus shapes).

Writes one JSON table per problem to ``tests/data``; the acceptance suite
re-scores a random subsample live to confirm the table.

    python tools/gen_family_oracle.py            # both problems
    python tools/gen_family_oracle.py mdp
"""
import json
import sys
import time
from pathlib import Path

from maxshape import functionals as FN
from maxshape import optimizer as O
from maxshape.geometry import DomainSpec

PROBLEMS = {
    "mdp": {"name": "Inradius"},
    "ch1": {"name": "SpectralComposite", "f": "inv_lambda_k", "k": 1},
}
OUT = Path(__file__).resolve().parent.parent / "tests" / "data"


def run(problem, L=1.0, h=1 / 64):
    cfg = O.OptConfig(DomainSpec.unit_square(), L, FN.from_spec(PROBLEMS[problem]), grid_h=h)
    rows = []
    t0 = time.time()
    for label, net in O.parametric_family(cfg.domain, L):
        rows.append({"label": label, "value": O.score(net, cfg), "network": net.to_dict()})
    best = min(rows, key=lambda r: r["value"])
    table = {"problem": problem, "functional": PROBLEMS[problem], "L": L, "grid_h": h,
             "domain": "unit_square", "count": len(rows), "best": best, "rows": rows}
    OUT.mkdir(parents=True, exist_ok=True)
    path = OUT / f"oracle_{problem}.json"
    path.write_text(json.dumps(table))
    print(f"{problem}: {len(rows)} shapes, best {best['value']!r} ({best['label']}) in {time.time() - t0:.0f}s")


if __name__ == "__main__":
    for name in sys.argv[1:] or list(PROBLEMS):
        run(name)
