"""Runs the CLI over several scenarios and validates every JSON report
against the shipped schema. Usage: validate_schema.py CLI STUB SCHEMA"""
import json
import os
import random
import shlex
import subprocess
import sys
import tempfile

import jsonschema


def write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(row) + "\n")


def classification_data(path, rng, n, shift):
    rows = []
    for i in range(n):
        a = rng.gauss(shift, 1)
        label = "yes" if a + rng.gauss(0, 1) > 0 else "no"
        rows.append([f"{a:.6f}", f"{rng.gauss(0, 1):.6f}", "xyz"[i % 3], label])
    write_csv(path, ["a", "b", "c", "y"], rows)


def regression_data(path, rng, n):
    rows = []
    for _ in range(n):
        a = rng.gauss(0, 1)
        rows.append([f"{a:.6f}", f"{rng.gauss(0, 1):.6f}", f"{2 * a + rng.gauss(0, 0.5):.6f}"])
    write_csv(path, ["a", "b", "y"], rows)


def main():
    cli, stub, schema_path = sys.argv[1:4]
    with open(schema_path) as f:
        schema = json.load(f)
    validator = jsonschema.Draft202012Validator(schema)
    rng = random.Random(5)
    work = tempfile.mkdtemp(prefix="tabcheck_schema_")
    tr, te = os.path.join(work, "train.csv"), os.path.join(work, "test.csv")
    rtr, rte = os.path.join(work, "rtrain.csv"), os.path.join(work, "rtest.csv")
    classification_data(tr, rng, 400, 0.0)
    classification_data(te, rng, 400, 0.4)
    regression_data(rtr, rng, 300)
    regression_data(rte, rng, 300)
    stub_q = shlex.quote(stub)

    scenarios = {
        "data_integrity": ["run", "--suite", "data_integrity", "--train", tr, "--label", "y"],
        "train_test_validation": ["run", "--suite", "train_test_validation", "--train", tr, "--test", te,
                                  "--label", "y", "--predict-cmd", f"{stub_q} threshold a 0"],
        "model_evaluation": ["run", "--suite", "model_evaluation", "--train", tr, "--test", te, "--label", "y",
                             "--predict-cmd", f"{stub_q} threshold a 0"],
        "regression": ["run", "--suite", "model_evaluation", "--train", rtr, "--test", rte, "--label", "y",
                       "--predict-cmd", f"{stub_q} copy a"],
        "errored": ["run", "--suite", "model_evaluation", "--train", tr, "--label", "y", "--predict-cmd", "false"],
        "skipped": ["run", "--suite", "train_test_validation", "--train", tr],
        "single": ["check", "dataset_summary", "--train", tr],
    }
    failures = 0
    for name, args in scenarios.items():
        out = os.path.join(work, name + ".json")
        proc = subprocess.run([cli] + args + ["--output-json", out], capture_output=True, text=True)
        if proc.returncode == 3 or not os.path.exists(out):
            print(f"FAIL {name}: exit {proc.returncode}: {proc.stderr.strip()}")
            failures += 1
            continue
        with open(out) as f:
            doc = json.load(f)
        errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
        summary = doc["summary"]
        if sum(summary.values()) != len(doc["checks"]):
            errors.append("summary counts do not add up to the number of checks")
        if errors:
            failures += 1
            print(f"FAIL {name}:")
            for e in errors[:10]:
                print("   ", getattr(e, "message", e), list(getattr(e, "path", [])))
        else:
            print(f"ok   {name} (exit {proc.returncode}, {len(doc['checks'])} checks)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
