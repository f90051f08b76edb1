#!/usr/bin/env python3
"""Generate a synthetic 4-class OFF corpus with ground-truth classes.

Writes m<N>.off files plus truth.cla, ready for `shape3d index`:

    python scripts/gen_corpus.py --out corpus/ --per-class 10
    shape3d index --corpus corpus/ --out index.json --cla corpus/truth.cla
"""

import argparse
from pathlib import Path

import numpy as np

from shape3d import offio
from shape3d import primitives as prim
from shape3d.mesh import Mesh


def scaled(mesh, s):
    return Mesh(mesh.vertices * np.asarray(s), mesh.faces, mesh.source_id)


GENERATORS = {
    "sphere": lambda s, seed: prim.perturbed(prim.icosphere(2, radius=s), 0.04 * s, seed=seed),
    "cube": lambda s, seed: prim.perturbed(prim.box(s, s, s), 0.04 * s, seed=seed),
    "longbox": lambda s, seed: prim.perturbed(prim.box(4.0 * s, s, s), 0.05 * s, seed=seed),
    "star": lambda s, seed: prim.perturbed(scaled(prim.spiky_star(spike=1.3), s), 0.03 * s, seed=seed),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", required=True, type=Path)
    ap.add_argument("--per-class", type=int, default=10)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--scale-low", type=float, default=0.7)
    ap.add_argument("--scale-high", type=float, default=1.5)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    args.out.mkdir(parents=True, exist_ok=True)
    by_class = {}
    n = 0
    for ci, (cname, gen) in enumerate(GENERATORS.items()):
        ids = []
        for i in range(args.per_class):
            s = rng.uniform(args.scale_low, args.scale_high)
            mesh = gen(s, 1000 * ci + i)
            mesh.source_id = f"m{n}"
            (args.out / f"m{n}.off").write_text(offio.serialize_off(mesh))
            ids.append(n)
            n += 1
        by_class[cname] = ids

    lines = ["PSB 1", f"{len(by_class)} {n}"]
    for cname in sorted(by_class):
        lines.append(f"{cname} 0 {len(by_class[cname])}")
        lines += [str(i) for i in by_class[cname]]
    (args.out / "truth.cla").write_text("\n".join(lines) + "\n")
    print(f"wrote {n} models in {len(by_class)} classes -> {args.out}")


if __name__ == "__main__":
    main()
