#!/usr/bin/env python3
"""Regenerate data/compas_synthetic.csv and data/compas_reference_counts.txt.

The synthetic CSV follows the ProPublica two-year export schema. Its rows are
constructed so that the default audit recipe (decile score >= 5 is high,
screening window [-30, +30] days, drop 'N/A' score text) reproduces the
reference confusion counts exactly. A handful of deliberately invalid rows
exercise each recipe filter. The original ProPublica file is not bundled;
point the CLI at it with --csv to audit the real data.
"""

import csv
import os

HERE = os.path.dirname(os.path.abspath(__file__))
DATA = os.path.join(HERE, "..", "data")

# group -> (TP, FN, FP, TN) with truth = two_year_recid, positive = high score
REFERENCE = {
    "black": (1369, 532, 805, 990),
    "white": (505, 461, 349, 1139),
    "all": (2035, 1216, 1282, 2681),
}

# The remainder of "all" beyond black+white, spread over the other race
# values that appear in the real export.
OTHER_SPLIT = {
    "Hispanic": (96, 133, 77, 331),
    "Other": (57, 79, 45, 196),
    "Asian": (5, 7, 4, 16),
    "Native American": (3, 4, 2, 9),
}

RACE_VALUES = {"black": "African-American", "white": "Caucasian"}

HIGH_SCORES = [5, 6, 7, 8, 9, 10]
LOW_SCORES = [1, 2, 3, 4]
DAYS = list(range(-30, 31))


def score_text(score):
    if score <= 4:
        return "Low"
    if score <= 7:
        return "Medium"
    return "High"


def fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


def main():
    os.makedirs(DATA, exist_ok=True)
    rows = []
    counters = {"id": 0, "day": 0, "high": 0, "low": 0}

    def add_row(race, recid, high, days=None, text=None):
        counters["id"] += 1
        if high:
            score = HIGH_SCORES[counters["high"] % len(HIGH_SCORES)]
            counters["high"] += 1
        else:
            score = LOW_SCORES[counters["low"] % len(LOW_SCORES)]
            counters["low"] += 1
        if days is None:
            days = DAYS[counters["day"] % len(DAYS)]
            counters["day"] += 1
        rows.append(
            {
                "id": counters["id"],
                "sex": "Male" if counters["id"] % 5 else "Female",
                "age": 19 + counters["id"] % 47,
                "race": race,
                "decile_score": score,
                "score_text": text if text is not None else score_text(score),
                "days_b_screening_arrest": days,
                "c_charge_degree": "F" if counters["id"] % 3 else "M",
                "is_recid": recid,
                "two_year_recid": recid,
            }
        )

    def add_cells(race, tp, fn, fp, tn):
        for _ in range(tp):
            add_row(race, 1, True)
        for _ in range(fn):
            add_row(race, 1, False)
        for _ in range(fp):
            add_row(race, 0, True)
        for _ in range(tn):
            add_row(race, 0, False)

    add_cells(RACE_VALUES["black"], *REFERENCE["black"])
    add_cells(RACE_VALUES["white"], *REFERENCE["white"])
    for race, cells in OTHER_SPLIT.items():
        add_cells(race, *cells)

    # Rows each filter must reject: outside the screening window ...
    for i in range(20):
        race = "African-American" if i % 2 else "Caucasian"
        add_row(race, i % 2, i % 3 == 0, days=-45 if i % 2 else 60)
    # ... and unusable score text.
    for i in range(10):
        race = "Caucasian" if i % 2 else "African-American"
        add_row(race, i % 2, i % 2 == 0, text="N/A")

    csv_path = os.path.join(DATA, "compas_synthetic.csv")
    with open(csv_path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)

    header = [
        "# COMPAS two-year audit: reference confusion counts (TP FN FP TN per group)",
        "# prediction = high iff decile score >= 5; truth = two-year recidivism",
        "# source: ProPublica Broward County data",
    ]
    payload_lines = [
        "all {} {} {} {}".format(*REFERENCE["all"]),
        "black {} {} {} {}".format(*REFERENCE["black"]),
        "white {} {} {} {}".format(*REFERENCE["white"]),
    ]
    payload = "\n".join(payload_lines)
    checksum = "fnv1a64:%016x" % fnv1a64(payload.encode())
    fixture_path = os.path.join(DATA, "compas_reference_counts.txt")
    with open(fixture_path, "w") as f:
        f.write("\n".join(header) + "\n")
        f.write("# checksum: " + checksum + "\n")
        f.write(payload + "\n")

    print("wrote %s (%d data rows)" % (csv_path, len(rows)))
    print("wrote %s (%s)" % (fixture_path, checksum))

    # Sanity: applying the recipe by hand lands on the reference counts.
    audited = [
        r
        for r in rows
        if r["score_text"] != "N/A" and -30 <= r["days_b_screening_arrest"] <= 30
    ]
    assert len(audited) == sum(REFERENCE["all"]), len(audited)
    for label, race in RACE_VALUES.items():
        sub = [r for r in audited if r["race"] == race]
        tp = sum(1 for r in sub if r["two_year_recid"] == 1 and r["decile_score"] >= 5)
        fn = sum(1 for r in sub if r["two_year_recid"] == 1 and r["decile_score"] < 5)
        fp = sum(1 for r in sub if r["two_year_recid"] == 0 and r["decile_score"] >= 5)
        tn = sum(1 for r in sub if r["two_year_recid"] == 0 and r["decile_score"] < 5)
        assert (tp, fn, fp, tn) == REFERENCE[label], (label, tp, fn, fp, tn)
    print("recipe sanity check passed")


if __name__ == "__main__":
    main()
