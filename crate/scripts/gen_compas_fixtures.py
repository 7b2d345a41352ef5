#!/usr/bin/env python3
"""Generate the synthetic COMPAS-shaped fixtures used by the test suite.

The fixtures are not ProPublica records. They are seeded synthetic cohorts
whose summary statistics equal the published GRRS/VRRS cohort figures:

  GRRS: n=11777, positives=4262, hits in top 4262 = 2260,
        correct pairs = 22128860 of 4262*7515, deciles 8-10: 1560/2698
  VRRS: n=12526, positives=1085, hits in top 1085 = 220,
        correct pairs = 8392054 of 1085*11441, deciles 8-10: 460/2590

Label order inside each rank segment comes from a binormal score model and
is then nudged by adjacent swaps until the pair count is exact. Score ties
only join records that share a label, so tie-credited AUC stays an integer
pair count. A handful of duplicate and incomplete rows are appended so the
loader's filters have something to drop.

Usage: python3 scripts/gen_compas_fixtures.py [OUTDIR]
"""

import csv
import random
import sys
from pathlib import Path

GRRS = dict(
    name="compas_grrs.csv",
    header=["person_id", "scale_text", "raw_score", "decile_score", "two_year_recid"],
    scale_text="Risk of Recidivism",
    seed=20170512,
    # (size, positives) per rank segment, top first
    segments=[(2698, 1560), (1564, 700), (7515, 2002)],
    target_pairs=22128860,
    # decile sizes from decile 10 down to 1
    deciles=[780, 900, 1018, 1000, 1050, 1100, 1150, 1250, 1500, 2029],
    top_score=1.9500,
    id_range=(1, 40000),
)

VRRS = dict(
    name="compas_vrrs.csv",
    header=["person_id", "scale_text", "v_raw_score", "v_decile_score", "two_year_violent_recid"],
    scale_text="Risk of Violence",
    seed=20170513,
    segments=[(1085, 220), (1505, 240), (9936, 625)],
    target_pairs=8392054,
    deciles=[700, 850, 1040, 1100, 1200, 1300, 1400, 1500, 1600, 1836],
    top_score=0.4500,
    id_range=(1, 40000),
)


def pairs_in(labels):
    """Correct (P before N) pairs within one label sequence."""
    negs_after = 0
    total = 0
    for lab in reversed(labels):
        if lab:
            total += negs_after
        else:
            negs_after += 1
    return total


def ordered_segment(rng, size, pos, shift):
    keys = [(rng.gauss(shift, 1.0), 1) for _ in range(pos)]
    keys += [(rng.gauss(0.0, 1.0), 0) for _ in range(size - pos)]
    keys.sort(key=lambda kv: -kv[0])
    return [lab for _, lab in keys]


def segment_with_pairs(rng, size, pos, target):
    state = rng.getstate()
    lo, hi = -4.0, 4.0
    labels = None
    for _ in range(40):
        mid = (lo + hi) / 2
        rng.setstate(state)
        labels = ordered_segment(rng, size, pos, mid)
        if pairs_in(labels) < target:
            lo = mid
        else:
            hi = mid
    got = pairs_in(labels)
    # each adjacent swap moves the pair count by exactly one
    while got != target:
        want = (0, 1) if got < target else (1, 0)
        start = rng.randrange(size - 1)
        for off in range(size - 1):
            i = (start + off) % (size - 1)
            if (labels[i], labels[i + 1]) == want:
                labels[i], labels[i + 1] = labels[i + 1], labels[i]
                got += 1 if got < target else -1
                break
        else:
            raise RuntimeError("no adjacent swap available")
    return labels


def build(spec):
    rng = random.Random(spec["seed"])
    segs = spec["segments"]
    n = sum(s for s, _ in segs)
    assert sum(spec["deciles"]) == n, (sum(spec["deciles"]), n)

    # cross-segment pairs are fixed by the segment counts
    cross = 0
    for i, (si, pi) in enumerate(segs):
        for sj, pj in segs[i + 1 :]:
            cross += pi * (sj - pj)
    within = spec["target_pairs"] - cross
    maxes = [p * (s - p) for s, p in segs]
    share = within / sum(maxes)
    targets = [round(share * m) for m in maxes]
    targets[-1] += within - sum(targets)

    labels = []
    for (size, pos), target in zip(segs, targets):
        labels += segment_with_pairs(rng, size, pos, target)
    assert pairs_in(labels) == spec["target_pairs"]

    boundaries = set()
    acc = 0
    for size, _ in segs:
        acc += size
        boundaries.add(acc)
    decile_of = []
    acc = 0
    for idx, size in enumerate(spec["deciles"]):
        decile_of += [10 - idx] * size
        acc += size
        boundaries.add(acc)

    # scores in ten-thousandths; ties only inside same-label runs
    scores = []
    cur = round(spec["top_score"] * 10000)
    for i, lab in enumerate(labels):
        if i > 0:
            same = labels[i - 1] == lab
            if not (same and i not in boundaries and rng.random() < 0.3):
                cur -= rng.randint(1, 9)
        scores.append(cur)

    lo, hi = spec["id_range"]
    ids = rng.sample(range(lo, hi), n)
    rows = [
        [str(pid), spec["scale_text"], f"{s / 10000:.4f}", str(d), str(lab)]
        for pid, s, d, lab in zip(ids, scores, decile_of, labels)
    ]
    rng.shuffle(rows)

    # noise the loader must remove: duplicates after the first occurrence,
    # rows with a blank score or outcome
    extra = []
    for _ in range(17):
        src = rng.randrange(n // 2)
        dup = list(rows[src])
        dup[2] = f"{rng.randint(-40000, 15000) / 10000:.4f}"
        dup[4] = str(rng.randint(0, 1))
        extra.append(dup)
    used = set(ids)
    for kind in ["score"] * 9 + ["outcome"] * 5 + ["na"] * 3:
        pid = rng.randrange(hi, hi + 10000)
        while pid in used:
            pid += 1
        used.add(pid)
        row = [str(pid), spec["scale_text"], f"{rng.randint(-40000, 15000) / 10000:.4f}",
               str(rng.randint(1, 10)), str(rng.randint(0, 1))]
        if kind == "score":
            row[2] = ""
        elif kind == "outcome":
            row[4] = ""
        else:
            row[2] = "NA"
        extra.append(row)
    for row in extra:
        pos = rng.randrange(n // 2, len(rows) + 1)
        rows.insert(pos, row)
    return rows


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "crates/core/tests/fixtures"
    out.mkdir(parents=True, exist_ok=True)
    for spec in (GRRS, VRRS):
        rows = build(spec)
        with open(out / spec["name"], "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(spec["header"])
            w.writerows(rows)
        print(f"wrote {out / spec['name']} ({len(rows)} data rows)")


if __name__ == "__main__":
    main()
