"""Compare the compiled and pure-Python kernel backends.

Each backend runs in its own interpreter (the backend is chosen at import
time), on the same planted synthetic data. Usage:

    python benchmarks/bench_kernels.py [--rows 20000] [--repeat 3]
"""
import argparse
import json
import os
import subprocess
import sys

WORKLOAD = r"""
import json, sys, time
from capclass import kernels, synth
from capclass.capgrowth import ExtractionParams, extract_rules
from capclass.captree import build_captree
from capclass.ensemble import coverage_prune, sort_rules, train
from capclass.predict import score_batch

rows, repeat = int(sys.argv[1]), int(sys.argv[2])
d = synth.planted(rows, seed=1)
test = synth.planted(rows // 2, seed=2)
params = ExtractionParams(0.01)

def best(fn):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return min(times), out

t_build, tree = best(lambda: build_captree(d, params.minsup))
t_extract, rules = best(lambda: extract_rules(tree, params))
ordered = sort_rules(rules, d.dictionary)
t_cover, _ = best(lambda: coverage_prune(ordered, d))
model = train(d, 1, 1.0, params)
t_score, _ = best(lambda: score_batch(model, test))
print(json.dumps({"backend": kernels.BACKEND, "build_tree": t_build, "extract_rules": t_extract,
                  "coverage": t_cover, "score_batch": t_score, "rules": len(rules)}))
"""


def run(backend_env, rows, repeat):
    env = dict(os.environ)
    env.pop("CAPCLASS_PURE_PYTHON", None)
    env.update(backend_env)
    out = subprocess.run([sys.executable, "-c", WORKLOAD, str(rows), str(repeat)],
                         capture_output=True, text=True, env=env, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=20_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    native = run({}, args.rows, args.repeat)
    pure = run({"CAPCLASS_PURE_PYTHON": "1"}, args.rows, args.repeat)
    if native["rules"] != pure["rules"]:
        sys.exit(f"backends disagree: {native['rules']} vs {pure['rules']} rules")
    print(f"rows={args.rows} rules={native['rules']} (best of {args.repeat})")
    print(f"{'stage':<14}{native['backend']:>12}{pure['backend']:>12}{'speedup':>10}")
    for stage in ("build_tree", "extract_rules", "coverage", "score_batch"):
        a, b = native[stage], pure[stage]
        print(f"{stage:<14}{a:>11.4f}s{b:>11.4f}s{b / a:>9.1f}x")


if __name__ == "__main__":
    main()
