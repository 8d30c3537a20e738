#!/usr/bin/env python3
"""End-to-end checks for the uopa binary: schema validation, golden outputs, determinism, exit codes.

usage: UOPA=<binary> cli_suite.py <source-dir> [--update]
"""
import json
import os
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

REL_TOL = 1e-9
ABS_FLOOR = 1e-15

failures = []


def check(cond, what):
    print(("PASS " if cond else "FAIL ") + what)
    if not cond:
        failures.append(what)


def run(uopa, args, out):
    p = subprocess.run([uopa, *args, "--out", str(out)], capture_output=True, text=True)
    return p.returncode, p.stdout, p.stderr


def close(a, b, path="$"):
    """Return None when a and b agree (numbers to REL_TOL), else a description of the first mismatch."""
    if isinstance(a, bool) or isinstance(b, bool) or a is None or b is None or isinstance(a, str):
        return None if a == b else f"{path}: {a!r} != {b!r}"
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return None if abs(a - b) <= REL_TOL * max(abs(a), abs(b)) + ABS_FLOOR else f"{path}: {a!r} vs {b!r}"
    if isinstance(a, list) and isinstance(b, list):
        if len(a) != len(b):
            return f"{path}: length {len(a)} != {len(b)}"
        for i, (x, y) in enumerate(zip(a, b)):
            d = close(x, y, f"{path}[{i}]")
            if d:
                return d
        return None
    if isinstance(a, dict) and isinstance(b, dict):
        if a.keys() != b.keys():
            return f"{path}: keys {sorted(a.keys() ^ b.keys())} differ"
        for k in a:
            d = close(a[k], b[k], f"{path}.{k}")
            if d:
                return d
        return None
    return f"{path}: type mismatch"


def golden_view(artifact, ex):
    view = {"outputs": artifact["outputs"], "error": artifact.get("error")}
    return json.loads(json.dumps(view).replace(ex, "{ex}"))


def main():
    src = Path(sys.argv[1])
    update = "--update" in sys.argv
    uopa = os.environ["UOPA"]
    data = src / "data"
    schema = json.loads((data / "schema" / "run-artifact.schema.json").read_text())
    validator = jsonschema.Draft202012Validator(schema)
    runs = json.loads((data / "runs.json").read_text())
    ex = str(data / "examples")

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        for r in runs:
            name = r["name"]
            args = [a.replace("{ex}", ex) for a in r["args"]]
            out = tmp / f"{name}.json"
            code, stdout, stderr = run(uopa, args, out)
            check(code == r["exit"], f"{name}: exit {code} (expected {r['exit']})")
            if not out.exists():
                check(False, f"{name}: artifact written")
                continue
            artifact = json.loads(out.read_text())
            errors = sorted(validator.iter_errors(artifact), key=lambda e: list(e.path))
            check(not errors, f"{name}: schema" + (f" ({errors[0].message[:200]} at {list(errors[0].path)})" if errors else ""))
            check(json.loads(stdout) == (artifact["outputs"] if "error" not in artifact else {"error": artifact["error"]}),
                  f"{name}: stdout mirrors artifact")
            gpath = data / "golden" / f"{name}.json"
            view = golden_view(artifact, ex)
            if update:
                gpath.write_text(json.dumps(view, indent=1, sort_keys=True) + "\n")
            diff = close(view, json.loads(gpath.read_text())) if gpath.exists() else "golden file missing"
            check(diff is None, f"{name}: golden" + (f" ({diff})" if diff else ""))
            if r.get("csv"):
                csv = out.with_suffix(".csv").read_text().splitlines()
                rows = artifact["outputs"]["rows"]
                check(csv[0] == "n,residual,sup_circle,max_interior" and len(csv) == len(rows) + 1,
                      f"{name}: csv header and row count")
                check(all(abs(float(line.split(",")[1]) - row["residual"]) == 0.0 for line, row in zip(csv[1:], rows)),
                      f"{name}: csv values match artifact at 17 digits")

        # the documented example, checked against the closed form rather than the golden file
        a = json.loads((tmp / "opa-solve-one-minus-z.json").read_text())["outputs"]
        q = [c[0] for c in a["Q"]["coeffs"]]
        check(abs(q[0] - 2 / 3) < 1e-15 and abs(q[1] - 1 / 3) < 1e-15 and abs(a["residual_squared"] - 1 / 3) < 1e-15,
              "opa solve example: Q = [2/3, 1/3], residual^2 = 1/3")
        cfg = json.loads((tmp / "opa-solve-config.json").read_text())
        check(cfg["inputs"]["n"] == 2 and cfg["inputs"]["alpha"] == 0.5, "config file value used, flag overrides config")

        # determinism: re-running recorded commands reproduces outputs byte-identically
        for name in ["opa-converge", "rudin-build-dirichlet", "zerofree-hardy-single-point", "steer-to-five"]:
            r = next(x for x in runs if x["name"] == name)
            args = [a.replace("{ex}", ex) for a in r["args"]]
            _, s1, _ = run(uopa, args, tmp / "d1.json")
            _, s2, _ = run(uopa, args, tmp / "d2.json")
            check(s1 == s2 and s1, f"{name}: byte-identical outputs on rerun")

        # usage errors
        code, _, _ = run(uopa, ["opa", "solve", "--f", ex + "/one-minus-z.json", "--n", "1", "--bogus"], tmp / "u.json")
        check(code == 64, f"unknown flag: exit {code} (expected 64)")
        code, _, _ = run(uopa, ["frobnicate"], tmp / "u.json")
        check(code == 64, f"unknown subcommand: exit {code} (expected 64)")

        # default location and the output-directory override
        env = dict(os.environ, OPA_OUT_DIR=str(tmp / "envdir"))
        subprocess.run([uopa, "selftest"], env=env, capture_output=True)
        found = list((tmp / "envdir").glob("*-selftest.json"))
        check(len(found) == 1, "OPA_OUT_DIR receives <timestamp>-<command>.json")
        subprocess.run([uopa, "selftest"], cwd=tmp, capture_output=True,
                       env={k: v for k, v in os.environ.items() if k != "OPA_OUT_DIR"})
        check(len(list((tmp / "runs").glob("*-selftest.json"))) == 1, "default ./runs/<timestamp>-<command>.json")
        check(not list(tmp.rglob("*.tmp")), "no temporary files left behind")

    print(f"{len(failures)} failure(s)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
