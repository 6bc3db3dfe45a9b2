#!/usr/bin/env python3
"""Regenerate data/nhanes_synthetic.csv.

A small synthetic table with the survey-style column schema used in the
documentation and the CLI tests: sex, age at interview, race, highest
education grade, poverty index, and a binary smoking indicator.  Smoking
propensity loads on a latent socioeconomic factor that also drives the
poverty index and education, so the table exhibits the proxy structure the
package is built to analyze.  Fixed seed; rerunning reproduces the file
byte for byte.
"""

import csv
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parent.parent / "data" / "nhanes_synthetic.csv"
N = 800


def main() -> None:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(20260809)))
    sex = np.where(rng.random(N) < 0.5, "Male", "Female")
    age = rng.integers(20, 76, size=N)
    race = rng.choice(["White", "Black", "Other"], size=N, p=[0.7, 0.2, 0.1])

    ses = rng.normal(size=N)  # latent socioeconomic factor
    poverty_index = np.round(200.0 + 95.0 * ses + 25.0 * rng.normal(size=N), 1)
    education = np.clip(np.round(10.5 + 2.2 * ses + 1.8 * rng.normal(size=N)), 0, 17)

    logit = (1.1
             - 0.022 * (age - 45)
             - 0.55 * ses
             - 0.06 * (education - 10)
             + np.where(sex == "Male", 0.25, -0.25)
             + np.where(race == "Black", 0.15, 0.0))
    p_smoke = 1.0 / (1.0 + np.exp(-logit))
    smoker = (rng.random(N) < p_smoke).astype(int)

    OUT.parent.mkdir(parents=True, exist_ok=True)
    with open(OUT, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["sex", "age", "race", "education_grade",
                         "poverty_index", "smoker"])
        for i in range(N):
            writer.writerow([sex[i], int(age[i]), race[i], int(education[i]),
                             f"{poverty_index[i]:.1f}", int(smoker[i])])
    print(f"wrote {OUT} ({N} rows)")


if __name__ == "__main__":
    main()
