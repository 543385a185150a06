"""Standalone plot scripts written next to each experiment's CSVs.

The scripts import only the standard library and matplotlib, read the CSVs
from their own directory and save a PNG; the package itself never imports a
plotting library.
"""
from __future__ import annotations

HEADER = '''"""Plot for the {name} experiment. Run: python {script}"""
import csv
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = Path(__file__).resolve().parent


def read(name):
    with (HERE / name).open() as fh:
        return list(csv.DictReader(fh))


def num(rows, key):
    return [float(r[key]) if r[key] not in ("", "None") else float("nan") for r in rows]


fig, ax = plt.subplots(figsize=(6, 4.5))
'''

FOOTER = '''fig.tight_layout()
fig.savefig(HERE / "{name}.png", dpi=150)
print("wrote", HERE / "{name}.png")
'''

BODIES = {
    "annulus2d": '''rows = read("annulus_runs.csv")
for eps in sorted({r["eps"] for r in rows}, key=float, reverse=True):
    sel = [r for r in rows if r["eps"] == eps]
    ax.loglog(num(sel, "n_psi"), num(sel, "max_err"), "o-", label=f"eps = {eps}")
ax.loglog(num(sel, "n_psi"), num(sel, "bound"), "k--", label="5 h^2 sup|Theta''|")
ax.set_xlabel("n_psi")
ax.set_ylabel("max |T - Theta|")
ax.legend()
''',
    "rate": '''rows = read("{table}")
for key in ("H1_rho", "L2_rho", "Hb_rho", "Hperp_rho"):
    ax.loglog(num(rows, "eps"), num(rows, key), "o-", label=key)
ax.set_xlabel("eps")
ax.set_ylabel("error norm")
ax.legend()
''',
    "torus-perturbed": '''rows = read("perturbed_runs.csv")
for key in sorted({(r["amplitude"], r["a_exponent"]) for r in rows}):
    sel = [r for r in rows if (r["amplitude"], r["a_exponent"]) == key]
    ax.loglog(num(sel, "eps"), num(sel, "H1_rho"), "o-", label=f"A = {key[0]}, a = {key[1]}")
    ax.loglog(num(sel, "eps"), num(sel, "Hb0_rho"), "x:", label=f"b0 part, A = {key[0]}, a = {key[1]}")
ax.set_xlabel("eps")
ax.set_ylabel("error norm")
ax.legend(fontsize=7)
''',
    "noninteg-volume": '''rows = read("noninteg_runs.csv")
for key in sorted({(r["model"], r["amplitude"]) for r in rows}):
    sel = [r for r in rows if (r["model"], r["amplitude"]) == key]
    ax.semilogx(num(sel, "eps"), num(sel, "fraction"), "o-", label=f"{key[0]} A = {key[1]}")
ax.set_xlabel("eps")
ax.set_ylabel("volume fraction")
ax.legend()
''',
    "diophantine-scan": '''rows = read("diophantine_runs.csv")
ax.loglog(num(rows, "M"), num(rows, "excluded_measure"), "o-", label="excluded measure")
ax.loglog(num(rows, "M"), num(rows, "M_measure"), "s-", label="M x measure")
ax.set_xlabel("M")
ax.legend()
''',
    "mde-demo": '''rows = [r for r in read("mde_runs.csv") if r["rel_error"]]
ax.semilogy(range(len(rows)), num(rows, "rel_error"), "o")
ax.set_xticks(range(len(rows)))
ax.set_xticklabels([r["case"] for r in rows], rotation=90, fontsize=6)
ax.set_ylabel("relative error of L w - V")
''',
    "geometry-selftest": '''rows = read("geometry_runs.csv")
for key in sorted({(r["model"], r["check"]) for r in rows if r["check"] in ("derivative_identity", "compatibility")}):
    sel = [r for r in rows if (r["model"], r["check"]) == key]
    ax.loglog(num(sel, "n_psi"), num(sel, "value"), "o-", label=f"{key[0]} {key[1]}")
ax.set_xlabel("n_psi")
ax.set_ylabel("max residual")
ax.legend(fontsize=7)
''',
}


def plot_script(name: str) -> str:
    """Source of the plot script for experiment ``name``."""
    script = f"plot_{name.replace('-', '_')}.py"
    if name in ("channel2d", "torus-integrable"):
        table = "channel_runs.csv" if name == "channel2d" else "torus_integrable_runs.csv"
        body = BODIES["rate"].format(table=table)
    else:
        body = BODIES[name]
    return HEADER.format(name=name, script=script) + body + FOOTER.format(name=name)
