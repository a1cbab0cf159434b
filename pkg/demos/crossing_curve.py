"""Missed-detection curves and their 1% crossings.

A scaled-down run (200 trials per point). The CLI runs the same thing from a
TOML file: ``onoff-mud simulate demos/seqomp_robust.toml``.
"""

import sys

from onoff_mud import ExperimentSpec, find_crossing, run_experiment

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 200
cases = {
    "SUD, constant": dict(detector="sud", profile="constant", m_values=range(170, 251, 20)),
    "SeqOMP, constant": dict(detector="seqomp", profile="constant", m_values=range(130, 211, 20)),
    "SeqOMP, robust": dict(detector="seqomp", profile="robust", theta=0.1, m_values=range(60, 141, 20)),
}

for name, kw in cases.items():
    spec = ExperimentSpec.from_db(20.0, n=100, activity_probability=0.1, trials=trials, **kw)
    result = run_experiment(spec)
    curve = "  ".join(f"{r.m}:{r.p_md:.3f}" for r in result.rows)
    try:
        m_star = f"{find_crossing(result, 0.01):.0f}"
    except ValueError:
        m_star = "not bracketed"
    print(f"{name:<18} m*={m_star:>5}   {curve}")
