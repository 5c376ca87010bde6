"""A configured experiment written to CSV.

Builds a count experiment from a JSON-style config, runs it twice and checks
that the CSV bodies agree byte for byte.
"""
import tempfile
from pathlib import Path

from matcount.harness import ExperimentConfig, csv_body, run_experiment


def main():
    config = {
        "suite": "count", "quantity": "rank_mod_p",
        "instance": {"random": {"m": 3, "degree": 2}}, "seed": 11,
        "grid": {"H": [1], "p": [3, 5], "r": [0, 1, 2, 3]},
    }
    with tempfile.TemporaryDirectory() as tmp:
        a, b = Path(tmp, "a.csv"), Path(tmp, "b.csv")
        report = run_experiment(ExperimentConfig.from_dict(config), a)
        run_experiment(ExperimentConfig.from_dict(config), b)
        print(a.read_text())
        print(report.summary())
        print("bodies identical:", csv_body(a.read_text()) == csv_body(b.read_text()))


if __name__ == "__main__":
    main()
